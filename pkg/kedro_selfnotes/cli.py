"""Command-line surface: ``selfnotes gen|train|eval|ablate|ladder|inspect``.

Every command takes a YAML experiment file (``--config``), dedicated flags and
trailing dotted overrides (``train.epochs=3``), in increasing precedence. The
resolved config is written as ``manifest.yml`` into the output directory.
"""

import functools
import logging
from typing import Any, Callable, Dict, List, Optional, Sequence

import click
from kedro.io import DataCatalog, MemoryDataset
from upath import UPath

from kedro_selfnotes import __version__
from kedro_selfnotes.config import ExperimentConfig, load_config
from kedro_selfnotes.corpus.sample import TASKS
from kedro_selfnotes.errors import RunLocked
from kedro_selfnotes.io.catalog import MANIFEST, input_dataset, run_datasets
from kedro_selfnotes.io.jsonl_dataset import JSONLinesDataset
from kedro_selfnotes.notectl.decoding import DECODERS
from kedro_selfnotes.notectl.enriched import CONTEXT, GOLD
from kedro_selfnotes.paradigms.config import METHODS, REGIMES
from kedro_selfnotes.pipeline import (
    ablate_pipeline,
    eval_pipeline,
    gen_pipeline,
    ladder_pipeline,
    run_pipeline,
    train_pipeline,
    with_manifest,
)
from kedro_selfnotes.plugin import write_error_record

logger = logging.getLogger(__name__)

_OVERRIDES = click.argument("overrides", nargs=-1, metavar="[KEY=VALUE]...")
_CONFIG = click.option(
    "--config", "config_path", type=click.Path(dir_okay=False), help="YAML experiment file."
)
_OUT = click.option("--out", required=True, type=click.Path(file_okay=False), help="Output directory.")


def _nested(flags: Dict[str, Any]) -> Dict[str, Any]:
    """Dotted flag keys as a nested mapping, unset flags dropped.

    Example:
        >>> _nested({"task": "algorithmic", "gen.count": 10, "gen.games": None})
        {'task': 'algorithmic', 'gen': {'count': 10}}
    """
    nested: Dict[str, Any] = {}
    for key, value in flags.items():
        if value is None:
            continue
        *parents, leaf = key.split(".")
        node = nested
        for parent in parents:
            node = node.setdefault(parent, {})
        node[leaf] = value
    return nested


def _manifest_of(path: Optional[str]) -> Optional[UPath]:
    """``manifest.yml`` of a run directory, or next to a file of one."""
    if path is None:
        return None
    path = UPath(path)
    candidate = (path if path.is_dir() else path.parent) / MANIFEST
    return candidate if candidate.exists() else None


def _resolve(
    config_path: Optional[str],
    overrides: Sequence[str],
    flags: Dict[str, Any],
    inherit_from: Sequence[Optional[str]] = (),
) -> ExperimentConfig:
    """Config file, else the manifest of an input run, then flags and overrides."""
    path = config_path
    if path is None:
        manifests = [_manifest_of(source) for source in inherit_from]
        path = next((manifest for manifest in manifests if manifest is not None), None)
        if path is not None:
            logger.info(f"Using the manifest of {path.parent}")
    return load_config(path, overrides, **_nested(flags))


def _require(path: str, what: str) -> str:
    if not UPath(path).exists():
        raise FileNotFoundError(f"{what} not found: {path}")
    return path


def _catalog(cfg: ExperimentConfig, out: str, outputs: Sequence[str], **inputs: Any) -> DataCatalog:
    datasets = run_datasets(out)
    entries: Dict[str, Any] = {
        "config": MemoryDataset(cfg, copy_mode="assign"),
        "manifest": datasets["manifest"],
    }
    entries.update({name: datasets[name] for name in outputs})
    entries.update(inputs)
    return DataCatalog(datasets=entries)


def _run(command: str, cfg: ExperimentConfig, pipeline, catalog: DataCatalog, out: str):
    run_params = {"command": command, "out_dir": out, "manifest_hash": cfg.manifest_hash}
    run_pipeline(with_manifest(pipeline), catalog, run_params)
    click.echo(f"{command}: wrote {out} (manifest {cfg.manifest_hash})")


def guarded(command: str) -> Callable:
    """Turns any failure into an ``error.json`` record, a stderr line and exit status 1."""

    def decorator(func: Callable) -> Callable:
        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            try:
                return func(*args, **kwargs)
            except click.ClickException:
                raise
            except Exception as error:
                out = kwargs.get("out")
                if out is not None and not isinstance(error, RunLocked):
                    UPath(out).mkdir(parents=True, exist_ok=True)
                    write_error_record(out, command, error)
                logger.debug("Command failed", exc_info=True)
                click.echo(f"Error: {type(error).__name__}: {error}", err=True)
                raise SystemExit(1) from error

        return wrapper

    return decorator


@click.group(name="selfnotes")
@click.version_option(__version__)
@click.option("-q", "--quiet", is_flag=True, help="Only log warnings and errors.")
def cli(quiet: bool):
    """Self-Notes workbench: generate, train, evaluate, ablate, inspect."""
    logging.basicConfig(
        level=logging.WARNING if quiet else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


@cli.command()
@click.option("--task", type=click.Choice(TASKS), help="Task family.")
@click.option("--count", type=int, help="Samples per split (smoke runs).")
@click.option("--seed", type=int, help="Generation seed.")
@click.option("--games", type=click.Path(dir_okay=False), help="Game file of the chess tasks.")
@_CONFIG
@_OUT
@_OVERRIDES
@guarded("gen")
def gen(task, count, seed, games, config_path, out, overrides):
    """Generate train/valid/test JSONL files, stats and vocabulary."""
    cfg = _resolve(
        config_path, overrides, {"task": task, "gen.count": count, "seed": seed, "gen.games": games}
    )
    if cfg.gen.games is not None:
        _require(cfg.gen.games, "game file")
    catalog = _catalog(cfg, out, ["splits", "stats", "vocab"])
    _run("gen", cfg, gen_pipeline(), catalog, out)


@cli.command()
@click.option("--data", required=True, type=click.Path(file_okay=False), help="Output of gen.")
@click.option("--method", type=click.Choice(METHODS), help="Training method.")
@click.option("--regime", type=click.Choice(REGIMES), help="Supervision regime.")
@click.option("--p", "fraction", type=float, help="Supervised fraction (semi_supervised).")
@click.option("--seed", type=int, help="Model, training and subset seed.")
@_CONFIG
@_OUT
@_OVERRIDES
@guarded("train")
def train(data, method, regime, fraction, seed, config_path, out, overrides):
    """Train a model and write checkpoint.pt and train_curve.csv."""
    _require(data, "data directory")
    flags = {
        "regime.method": method,
        "regime.regime": regime,
        "regime.p": fraction,
        "model.seed": seed,
        "train.seed": seed,
        "regime.seed": seed,
    }
    cfg = _resolve(config_path, overrides, flags, inherit_from=[data])
    catalog = _catalog(
        cfg,
        out,
        ["checkpoint", "train_curve"],
        splits=input_dataset(data, "splits"),
        vocab=input_dataset(data, "vocab"),
    )
    _run("train", cfg, train_pipeline(), catalog, out)


@cli.command(name="eval")
@click.option(
    "--ckpt", "ckpts", required=True, multiple=True, help="Checkpoint file or run dir; repeat per seed."
)
@click.option("--data", required=True, type=click.Path(file_okay=False), help="Output of gen.")
@click.option("--method", type=click.Choice(DECODERS), help="Decoding method.")
@click.option("--split", help="Bucket labels, e.g. '1-2,3*,4*'.")
@_CONFIG
@_OUT
@_OVERRIDES
@guarded("eval")
def evaluate(ckpts, data, method, split, config_path, out, overrides):
    """Exact-match report per difficulty bucket, plus decode traces."""
    checkpoints = {}
    for k, ckpt in enumerate(ckpts):
        dataset = input_dataset(_require(ckpt, "checkpoint"), "checkpoint")
        if not dataset.exists():
            raise FileNotFoundError(f"checkpoint not found: {ckpt}")
        checkpoints[f"checkpoint_{k}"] = dataset
    _require(data, "data directory")
    flags = {"eval.method": method, "eval.split": split}
    cfg = _resolve(config_path, overrides, flags, inherit_from=[ckpts[0], data])
    catalog = _catalog(
        cfg,
        out,
        ["report", "report_table", "traces"],
        splits=input_dataset(data, "splits"),
        **checkpoints,
    )
    _run("eval", cfg, eval_pipeline(len(ckpts)), catalog, out)


@cli.command()
@click.option("--mode", type=click.Choice(["dummy", "no-notes"]), default="dummy", show_default=True)
@click.option("--data", required=True, type=click.Path(file_okay=False), help="Output of gen.")
@click.option("--ckpt", help="Self-Notes checkpoint (no-notes mode).")
@click.option("--split", help="Bucket labels, e.g. '1-2,3*,4*'.")
@_CONFIG
@_OUT
@_OVERRIDES
@guarded("ablate")
def ablate(mode, data, ckpt, split, config_path, out, overrides):
    """Dummy-token or no-notes ablation report."""
    _require(data, "data directory")
    inputs: Dict[str, Any] = {"splits": input_dataset(data, "splits")}
    if mode == "no-notes":
        if ckpt is None:
            raise click.UsageError("--ckpt is required with --mode no-notes")
        inputs["checkpoint"] = input_dataset(_require(ckpt, "checkpoint"), "checkpoint")
    else:
        inputs["vocab"] = input_dataset(data, "vocab")
    flags = {"ablation.mode": mode, "eval.split": split}
    cfg = _resolve(config_path, overrides, flags, inherit_from=[ckpt, data])
    catalog = _catalog(cfg, out, ["report", "report_table"], **inputs)
    _run("ablate", cfg, ablate_pipeline(mode), catalog, out)


@cli.command()
@click.option("--data", type=click.Path(file_okay=False), help="Output of gen; generated into --out when unset.")
@_CONFIG
@_OUT
@_OVERRIDES
@guarded("ladder")
def ladder(data, config_path, out, overrides):
    """Unsupervised ladder, one directory per stage."""
    cfg = _resolve(config_path, overrides, {}, inherit_from=[data])
    if data is None:
        catalog = _catalog(
            cfg, out, ["splits", "stats", "vocab", "report", "report_table"], run_dir=MemoryDataset(out)
        )
    else:
        _require(data, "data directory")
        catalog = _catalog(
            cfg,
            out,
            ["report", "report_table"],
            splits=input_dataset(data, "splits"),
            vocab=input_dataset(data, "vocab"),
            run_dir=MemoryDataset(out),
        )
    _run("ladder", cfg, ladder_pipeline(generate=data is None), catalog, out)


def _note_style(origin: str) -> Dict[str, Any]:
    return {"fg": "yellow" if origin == GOLD else "green", "bold": True}


def render_trace(record: Dict[str, Any]) -> str:
    """Enriched context with notes marked ``<< >>`` and colored by origin.

    Example:
        >>> record = {"id": 0, "method": "selfnotes", "answer": ["x", "=", "2", ";"],
        ...           "segments": [{"origin": "context", "tokens": ["x", "=", "1", ";", "x", "++", ";"]},
        ...                        {"origin": "generated", "tokens": ["print", "x", "x", "=", "2", ";"]}],
        ...           "scratchpad": [], "terminated": True, "overflow": False, "triggers": [],
        ...           "token_budget": {"context": 7, "notes": 6, "enriched": 13, "scratchpad": 0}}
        >>> print(click.unstyle(render_trace(record)))
        sample 0 (selfnotes)
        x = 1 ; x ++ ; << print x x = 2 ; >>
        answer: x = 2 ;
        terminated: yes, overflow: no, triggers: 0
        tokens: context 7, notes 6, enriched 13, scratchpad 0
    """
    pieces: List[str] = []
    for segment in record["segments"]:
        text = " ".join(segment["tokens"])
        if segment["origin"] == CONTEXT:
            pieces.append(text)
        else:
            pieces.append(click.style(f"<< {text} >>", **_note_style(segment["origin"])))
    lines = [f"sample {record['id']} ({record['method']})", " ".join(pieces)]
    if record["scratchpad"]:
        lines.append(f"scratchpad: {' '.join(record['scratchpad'])}")
    lines.append(f"answer: {' '.join(record['answer'])}")
    lines.append(
        f"terminated: {'yes' if record['terminated'] else 'no'}, "
        f"overflow: {'yes' if record['overflow'] else 'no'}, "
        f"triggers: {len(record['triggers'])}"
    )
    budget = record["token_budget"]
    lines.append("tokens: " + ", ".join(f"{key} {value}" for key, value in budget.items()))
    return "\n".join(lines)


@cli.command()
@click.option("--trace", "trace_path", required=True, type=click.Path(dir_okay=False), help="traces.jsonl of an eval run.")
@click.option("--id", "sample_id", required=True, type=int, help="Sample id in the trace.")
@guarded("inspect")
def inspect(trace_path, sample_id):
    """Render one decode trace with its notes highlighted."""
    records = JSONLinesDataset(filepath=_require(trace_path, "trace file")).load()
    record = next((r for r in records if r["id"] == sample_id), None)
    if record is None:
        raise LookupError(f"no sample {sample_id} in {trace_path}")
    click.echo(render_trace(record))


@click.group(name="SelfNotes")
def commands():
    """Self-Notes workbench commands inside a Kedro project."""


commands.add_command(cli)
