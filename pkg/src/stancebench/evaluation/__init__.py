from stancebench.evaluation.metrics import (
    ConfusionCounts,
    EvalReport,
    evaluate,
    f1_avg,
    f1_class,
)
from stancebench.evaluation.depth import DepthBucketReport, TargetKind, depth_bucket_report
from stancebench.evaluation.bootstrap import SignificanceResult, paired_bootstrap
from stancebench.evaluation.protocol import ProtocolConfig, ProtocolMode, ProtocolResult, run_protocol
from stancebench.evaluation.report import render_report_json, render_report_text

__all__ = [
    "ConfusionCounts", "DepthBucketReport", "EvalReport", "ProtocolConfig",
    "ProtocolMode", "ProtocolResult", "SignificanceResult", "TargetKind",
    "depth_bucket_report", "evaluate", "f1_avg", "f1_class", "paired_bootstrap",
    "render_report_json", "render_report_text", "run_protocol",
]
