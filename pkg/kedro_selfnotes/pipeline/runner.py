"""Runs a command pipeline with the run guard hook, the way a Kedro session does."""

import logging
from typing import Any, Dict, Iterable

from kedro.framework.hooks.manager import _create_hook_manager
from kedro.io import DataCatalog
from kedro.pipeline import Pipeline
from kedro.runner import SequentialRunner

from kedro_selfnotes.plugin import run_guard

logger = logging.getLogger(__name__)


def run_pipeline(
    pipeline: Pipeline,
    catalog: DataCatalog,
    run_params: Dict[str, Any],
    hooks: Iterable[Any] = (run_guard,),
) -> Dict[str, Any]:
    """Runs ``pipeline`` sequentially, firing the pipeline-level hooks around it.

    Args:
        pipeline (Pipeline): Pipeline to be run.
        catalog (DataCatalog): Catalog holding every input and persisted output.
        run_params (Dict[str, Any]): Passed to the hooks; ``out_dir`` names
            the run directory.
        hooks (Iterable[Any]): Hook implementations to register.

    Returns:
        Dict[str, Any]: Outputs the catalog does not declare.
    """
    hook_manager = _create_hook_manager()
    for hook in hooks:
        hook_manager.register(hook)
    hook_manager.hook.before_pipeline_run(run_params=run_params, pipeline=pipeline, catalog=catalog)
    try:
        result = SequentialRunner().run(pipeline, catalog, hook_manager)
    except Exception as error:
        hook_manager.hook.on_pipeline_error(
            error=error, run_params=run_params, pipeline=pipeline, catalog=catalog
        )
        raise
    hook_manager.hook.after_pipeline_run(
        run_params=run_params, run_result=result, pipeline=pipeline, catalog=catalog
    )
    logger.info(f"Finished {run_params.get('command', 'pipeline')}")
    return result
