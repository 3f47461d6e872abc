"""
Streaming scalar and histogram statistics, finalised into StatRecords.
"""

import math
import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from floodlab.telemetry.records import StatRecord
from floodlab.utils.constants import HISTOGRAM_BINS
from floodlab.utils.exceptions import ConfigError, DataError, FloodlabError

_COMPONENT = re.compile(r"^(?P<name>[^\[\]]+)(\[(?P<index>\d+)\])?$")


def module_sort_key(module: str) -> Tuple[Tuple[str, int], ...]:
    """
    Natural order of module paths: "net.ue[2]" before "net.ue[10]", and a
    module before its sub-modules.
    """
    key = []
    for component in module.split("."):
        match = _COMPONENT.match(component)
        if match is None:
            key.append((component, -1))
        else:
            index = match.group("index")
            key.append((match.group("name"), -1 if index is None else int(index)))
    return tuple(key)


def _check_finite(module: str, name: str, x: float) -> float:
    x = float(x)
    if not math.isfinite(x):
        raise DataError(f"non-finite value {x} for {module}.{name}")
    return x


@dataclass
class Histogram:
    """Welford running moments plus fixed-width bins over [lo, hi)."""

    lo: float
    hi: float
    bins: int = HISTOGRAM_BINS
    unit: Optional[str] = None
    count: int = 0
    mean: float = 0.0
    m2: float = 0.0
    min: float = math.inf
    max: float = -math.inf
    underflows: int = 0
    overflows: int = 0
    values: np.ndarray = field(default=None)

    def __post_init__(self):
        if not self.hi > self.lo:
            raise ConfigError(f"histogram range [{self.lo}, {self.hi}) is empty")
        if self.values is None:
            self.values = np.zeros(self.bins, dtype=np.int64)
        self.width = (self.hi - self.lo) / self.bins

    def add(self, x: float) -> None:
        x = float(x)
        self.count += 1
        delta = x - self.mean
        self.mean += delta / self.count
        self.m2 += delta * (x - self.mean)
        if x < self.min:
            self.min = x
        if x > self.max:
            self.max = x
        if x < self.lo:
            self.underflows += 1
        elif x >= self.hi:
            self.overflows += 1
        else:
            # guard the top edge against rounding
            self.values[min(int((x - self.lo) / self.width), self.bins - 1)] += 1

    @property
    def stddev(self) -> float:
        # sample standard deviation; zero for fewer than two samples
        if self.count < 2:
            return 0.0
        return math.sqrt(max(self.m2, 0.0) / (self.count - 1))

    @property
    def edges(self) -> List[float]:
        return [self.lo + i * self.width for i in range(self.bins)] + [self.hi]

    def to_record(self, module: str, name: str, label: int) -> StatRecord:
        empty = self.count == 0
        return StatRecord(
            sumweights=float(self.count),
            type="histogram",
            module=module,
            name=name,
            attrname=None if self.unit is None else "unit",
            attrvalue=self.unit,
            value=None,
            count=self.count,
            mean=0.0 if empty else min(max(self.mean, self.min), self.max),
            stddev=self.stddev,
            min=0.0 if empty else self.min,
            max=0.0 if empty else self.max,
            underflows=self.underflows,
            overflows=self.overflows,
            binedges=" ".join(repr(float(e)) for e in self.edges),
            binvalues=" ".join(str(int(v)) for v in self.values),
            label=label,
        )


class StatRegistry:
    """
    Accumulators keyed by (module, name) for one statistics window.

    finalize() turns the registry into records once; after that it rejects
    further use.
    """

    def __init__(self, bins: int = HISTOGRAM_BINS):
        self.bins = bins
        self._scalars: Dict[Tuple[str, str], float] = {}
        self._histograms: Dict[Tuple[str, str], Histogram] = {}
        self._finalized = False

    def __len__(self) -> int:
        return len(self._scalars) + len(self._histograms)

    def _check_open(self) -> None:
        if self._finalized:
            raise FloodlabError("statistics registry has already been finalized")

    def declare_histogram(
        self, module: str, name: str, lo: float, hi: float, unit: Optional[str] = None
    ) -> Histogram:
        """Register an empty histogram, so it is emitted even without samples."""
        self._check_open()
        key = (module, name)
        if key not in self._histograms:
            self._histograms[key] = Histogram(lo, hi, self.bins, unit)
        return self._histograms[key]

    def histogram(self, module: str, name: str) -> Histogram:
        return self._histograms[(module, name)]


def record_scalar(reg: StatRegistry, module: str, name: str, v: float) -> None:
    """
    Store an end-of-window scalar; a later write replaces an earlier one.

    Raises:
        DataError: v is NaN or infinite.
    """
    reg._check_open()
    reg._scalars[(module, name)] = _check_finite(module, name, v)


def record_sample(
    reg: StatRegistry,
    module: str,
    name: str,
    x: float,
    lo: float = 0.0,
    hi: float = 1.0,
    unit: Optional[str] = None,
) -> None:
    """
    Add one observation to the histogram for (module, name).

    The range and unit only apply when the histogram does not exist yet.

    Raises:
        DataError: x is NaN or infinite.
    """
    reg._check_open()
    x = _check_finite(module, name, x)
    hist = reg._histograms.get((module, name))
    if hist is None:
        hist = reg.declare_histogram(module, name, lo, hi, unit)
    hist.add(x)


def finalize(reg: StatRegistry, label: int) -> List[StatRecord]:
    """
    Turn every accumulator into a record carrying the class label.

    Records are ordered by module (natural order), scalars before
    histograms, then by statistic name.

    Args:
        reg (StatRegistry): Registry to consume.
        label (int): 0 for benign, 1 for DDoS.

    Returns:
        List[StatRecord]: One record per accumulator.
    """
    if label not in (0, 1):
        raise DataError(f"label must be 0 or 1, got {label}")
    reg._check_open()
    reg._finalized = True
    keyed = []
    for (module, name), value in reg._scalars.items():
        keyed.append(((module_sort_key(module), 0, name), StatRecord.scalar(module, name, value, label)))
    for (module, name), hist in reg._histograms.items():
        record = hist.to_record(module, name, label)
        keyed.append(((module_sort_key(module), 1, name), record))
    keyed.sort(key=lambda item: item[0])
    return [record for _, record in keyed]
