from floodlab.telemetry.records import StatRecord, export_csv
from floodlab.telemetry.registry import (
    StatRegistry,
    finalize,
    module_sort_key,
    record_sample,
    record_scalar,
)

__all__ = [
    "StatRecord",
    "StatRegistry",
    "export_csv",
    "finalize",
    "module_sort_key",
    "record_sample",
    "record_scalar",
]
