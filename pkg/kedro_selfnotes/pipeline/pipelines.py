"""One Kedro pipeline per command."""

from typing import Dict

from kedro.pipeline import Pipeline, node

from kedro_selfnotes.pipeline import nodes


def gen_pipeline() -> Pipeline:
    """Generation: splits, stats sidecar and vocabulary.

    >>> sorted(gen_pipeline().all_outputs())
    ['splits', 'stats', 'vocab']
    """
    return Pipeline(
        [
            node(nodes.generate_splits, "config", "splits", name="generate_splits"),
            node(nodes.corpus_stats, ["config", "splits"], "stats", name="corpus_stats"),
            node(nodes.build_vocabulary, ["config", "splits"], "vocab", name="build_vocabulary"),
        ]
    )


def train_pipeline() -> Pipeline:
    return Pipeline(
        [
            node(
                nodes.train_model,
                ["config", "splits", "vocab"],
                ["checkpoint", "train_curve"],
                name="train_model",
            )
        ]
    )


def eval_pipeline(replicates: int = 1) -> Pipeline:
    """Evaluation of ``checkpoint_0`` .. ``checkpoint_<replicates - 1>``.

    >>> sorted(eval_pipeline(2).inputs())
    ['checkpoint_0', 'checkpoint_1', 'config', 'splits']
    """
    checkpoints = [f"checkpoint_{k}" for k in range(replicates)]
    return Pipeline(
        [
            node(
                nodes.evaluate_checkpoints,
                ["config", "splits", *checkpoints],
                ["report", "report_table", "traces"],
                name="evaluate_checkpoints",
            )
        ]
    )


def ablate_pipeline(mode: str = "dummy") -> Pipeline:
    if mode == "dummy":
        ablation = node(
            nodes.ablate_dummy,
            ["config", "splits", "vocab"],
            ["report", "report_table"],
            name="ablate_dummy",
        )
    else:
        ablation = node(
            nodes.ablate_no_notes,
            ["config", "splits", "checkpoint"],
            ["report", "report_table"],
            name="ablate_no_notes",
        )
    return Pipeline([ablation])


def ladder_pipeline(generate: bool = False) -> Pipeline:
    """Ladder over existing data, or over data generated into the run first.

    >>> sorted(ladder_pipeline(generate=True).inputs())
    ['config', 'run_dir']
    """
    ladder = Pipeline(
        [
            node(
                nodes.ladder,
                ["config", "splits", "vocab", "run_dir"],
                ["report", "report_table"],
                name="ladder",
            )
        ]
    )
    return gen_pipeline() + ladder if generate else ladder


def with_manifest(pipeline: Pipeline) -> Pipeline:
    """Adds the node writing the resolved config as ``manifest``.

    >>> sorted(with_manifest(train_pipeline()).all_outputs())
    ['checkpoint', 'manifest', 'train_curve']
    """
    return pipeline + Pipeline([node(nodes.resolve_manifest, "config", "manifest", name="manifest")])


def create_pipelines() -> Dict[str, Pipeline]:
    """Registry of the command pipelines, in the form a Kedro project expects."""
    pipelines = {
        "gen": with_manifest(gen_pipeline()),
        "train": with_manifest(train_pipeline()),
        "eval": with_manifest(eval_pipeline()),
        "ablate": with_manifest(ablate_pipeline()),
        "ladder": with_manifest(ladder_pipeline()),
    }
    pipelines["__default__"] = pipelines["gen"]
    return pipelines
