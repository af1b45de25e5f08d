from .browser import (
    BrowserDriver,
    DispatchFailed,
    InteractiveElement,
    JsdomDriver,
    PageLoadFailed,
    ProbeResult,
)
from .judge import (
    JudgeFailed,
    JudgeOutOfRange,
    judge_content_richness,
    judge_interaction_design,
)
from .metrics import (
    DegenerateInput,
    IFResult,
    LengthMismatch,
    NonPositiveDuration,
    OutOfRangeInput,
    efficiency,
    extract_main_text,
    if_score,
    interaction_quality,
    pearson,
    spearman,
)
from .report import EvalReport, MetricError, evaluate

__all__ = [
    "BrowserDriver", "DispatchFailed", "InteractiveElement", "JsdomDriver",
    "PageLoadFailed", "ProbeResult", "JudgeFailed", "JudgeOutOfRange",
    "judge_content_richness", "judge_interaction_design", "DegenerateInput",
    "IFResult", "LengthMismatch", "NonPositiveDuration", "OutOfRangeInput",
    "efficiency", "extract_main_text", "if_score", "interaction_quality",
    "pearson", "spearman", "EvalReport", "MetricError", "evaluate",
]
