from floodlab.evaluation.metrics import (
    ConfusionMatrix,
    MetricsReport,
    ModelReport,
    Report,
    confusion,
    metrics,
    report,
)

__all__ = [
    "ConfusionMatrix",
    "MetricsReport",
    "ModelReport",
    "Report",
    "confusion",
    "metrics",
    "report",
]
