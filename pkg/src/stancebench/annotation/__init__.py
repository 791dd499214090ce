from stancebench.annotation.records import AnnotationRecord, Round
from stancebench.annotation.vote import aggregate_gold, needs_tiebreak
from stancebench.annotation.kappa import cohen_kappa
from stancebench.annotation.store import AgreementReport, AnnotationStore, TaskView
from stancebench.annotation.service import serve_annotation

__all__ = [
    "AgreementReport",
    "AnnotationRecord",
    "AnnotationStore",
    "Round",
    "TaskView",
    "aggregate_gold",
    "cohen_kappa",
    "needs_tiebreak",
    "serve_annotation",
]
