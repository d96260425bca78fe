"""Hook guarding a run directory: advisory lock, manifest hash log, error record."""

import logging
from typing import Any, Dict

from kedro.framework.hooks import hook_impl
from kedro.io import DataCatalog
from kedro.pipeline import Pipeline
from upath import UPath

from kedro_selfnotes.errors import RunLocked
from kedro_selfnotes.io.catalog import ERROR_RECORD, LOCK, run_datasets

logger = logging.getLogger(__name__)


def write_error_record(out_dir: str, command: str, error: BaseException) -> UPath:
    """Machine-readable record of a failed command.

    Example:
        >>> import tempfile
        >>> from kedro_datasets.json import JSONDataset
        >>> path = write_error_record(tempfile.mkdtemp(), "eval", FileNotFoundError("ckpt"))
        >>> JSONDataset(filepath=str(path)).load()["error_type"]
        'FileNotFoundError'
    """
    record = {"command": command, "error_type": type(error).__name__, "message": str(error)}
    run_datasets(out_dir)["error_record"].save(record)
    return UPath(out_dir) / ERROR_RECORD


class RunGuardHook:
    """Holds ``<out_dir>/.lock`` for the duration of a pipeline run.

    Runs whose ``run_params`` carry no ``out_dir`` (plain Kedro sessions) are
    left alone; ``command`` and ``manifest_hash`` are logged when present.

    >>> import tempfile
    >>> out = tempfile.mkdtemp()
    >>> hook = RunGuardHook()
    >>> hook.before_pipeline_run({"out_dir": out}, Pipeline([]), DataCatalog())
    >>> hook.before_pipeline_run({"out_dir": out}, Pipeline([]), DataCatalog())  # doctest: +ELLIPSIS
    Traceback (most recent call last):
    ...
    kedro_selfnotes.errors.RunLocked: another run holds the lock on ...
    >>> hook.after_pipeline_run({"out_dir": out}, {}, Pipeline([]), DataCatalog())
    >>> (UPath(out) / LOCK).exists()
    False
    """

    @hook_impl
    def before_pipeline_run(
        self,
        run_params: Dict[str, Any],
        pipeline: Pipeline,
        catalog: DataCatalog,
    ):
        """Creates the lock exclusively and logs the manifest hash.

        Args:
            run_params (Dict[str, Any]): Run parameters.
            pipeline (Pipeline): Pipeline to be run.
            catalog (DataCatalog): Catalog of data sources.

        Raises:
            RunLocked: the lock file already exists.
        """
        if "out_dir" not in run_params:
            return
        out = UPath(run_params["out_dir"])
        out.mkdir(parents=True, exist_ok=True)
        lock = out / LOCK
        try:
            lock.touch(exist_ok=False)
        except FileExistsError as error:
            raise RunLocked(f"another run holds the lock on {lock}") from error
        logger.info(
            f"Running {run_params.get('command', 'pipeline')} into {out} "
            f"(manifest {run_params.get('manifest_hash', '-')}, {len(pipeline.nodes)} nodes)"
        )

    @hook_impl
    def after_pipeline_run(
        self,
        run_params: Dict[str, Any],
        run_result: Dict[str, Any],
        pipeline: Pipeline,
        catalog: DataCatalog,
    ):
        self._release(run_params)

    @hook_impl
    def on_pipeline_error(
        self,
        error: Exception,
        run_params: Dict[str, Any],
        pipeline: Pipeline,
        catalog: DataCatalog,
    ):
        """Writes ``error.json`` and releases the lock."""
        if "out_dir" not in run_params:
            return
        path = write_error_record(run_params["out_dir"], run_params.get("command", "pipeline"), error)
        logger.error(f"Run failed with {type(error).__name__}, record in {path}")
        self._release(run_params)

    @staticmethod
    def _release(run_params: Dict[str, Any]):
        if "out_dir" not in run_params:
            return
        lock = UPath(run_params["out_dir"]) / LOCK
        if lock.exists():
            lock.unlink()


run_guard = RunGuardHook()
