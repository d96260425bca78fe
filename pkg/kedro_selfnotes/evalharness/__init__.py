"""Exact-match evaluation, dummy-token ablation and report tables."""

from kedro_selfnotes.evalharness.dummy import run_dummy_ablation
from kedro_selfnotes.evalharness.evaluate import BucketResult, EvalReport, evaluate, exact_match
from kedro_selfnotes.evalharness.report import emit_report, load_report, report_frame
from kedro_selfnotes.evalharness.splits import Bucket, SplitSpec, default_split, resolve_split

__all__ = [
    "Bucket",
    "BucketResult",
    "EvalReport",
    "SplitSpec",
    "default_split",
    "emit_report",
    "evaluate",
    "exact_match",
    "load_report",
    "report_frame",
    "resolve_split",
    "run_dummy_ablation",
]
