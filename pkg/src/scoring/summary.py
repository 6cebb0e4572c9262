"""
Aggregation of per-unit scores into mean{std} summaries.
"""

from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Union

import numpy as np

from core import EmptyInput
from .metrics import METRIC_NAMES, EScores, UnitScore, ZScores

Scored = Union[EScores, ZScores, UnitScore]


@dataclass(frozen=True)
class MetricSummary:
    """Mean and standard deviation of one metric over its defined values"""
    mean: Optional[float]
    std: Optional[float]
    count: int
    excluded: int = 0

    def to_dict(self) -> dict:
        return {"mean": self.mean, "std": self.std, "count": self.count, "excluded": self.excluded}


@dataclass
class Summary:
    """
    Aggregate over evaluation units.

    Attributes:
        metrics: Per-metric mean/std; undefined unit values excluded and counted
        units: Number of units aggregated
        pooled: Corpus-level scores from summed counts (unit-size weighted)
    """
    metrics: Dict[str, MetricSummary]
    units: int
    pooled: Dict[str, Optional[float]] = field(default_factory=dict)

    def __getitem__(self, name: str) -> MetricSummary:
        return self.metrics[name]


def summarize(values: Sequence[Optional[float]], std_mode: str = "sample") -> MetricSummary:
    defined = np.array([v for v in values if v is not None], dtype=float)
    excluded = len(values) - len(defined)
    if len(defined) == 0:
        return MetricSummary(mean=None, std=None, count=0, excluded=excluded)
    ddof = 1 if std_mode == "sample" and len(defined) > 1 else 0
    return MetricSummary(
        mean=float(defined.mean()),
        std=float(defined.std(ddof=ddof)),
        count=len(defined),
        excluded=excluded,
    )


def aggregate(per_unit: Sequence[Scored], std_mode: str = "sample") -> Summary:
    """
    Mean and standard deviation of every metric the units report.

    Args:
        per_unit: EScores, ZScores or UnitScore items
        std_mode: "sample" uses n-1 when more than one value is defined
    """
    if not per_unit:
        raise EmptyInput("Nothing to aggregate")
    columns: Dict[str, list] = {}
    for unit in per_unit:
        for name, value in unit.metrics().items():
            columns.setdefault(name, []).append(value)
    metrics = {name: summarize(columns[name], std_mode) for name in METRIC_NAMES if name in columns}
    return Summary(metrics=metrics, units=len(per_unit), pooled=_pooled(per_unit))


def _pooled(per_unit: Sequence[Scored]) -> Dict[str, Optional[float]]:
    e_parts = [u.e if isinstance(u, UnitScore) else u for u in per_unit]
    z_parts = [u.z if isinstance(u, UnitScore) else u for u in per_unit]
    pooled: Dict[str, Optional[float]] = {}
    e_items = [e for e in e_parts if isinstance(e, EScores)]
    if e_items:
        pooled.update(sum(e_items[1:], e_items[0]).metrics())
    z_items = [z for z in z_parts if isinstance(z, ZScores)]
    if z_items:
        pooled.update(sum(z_items[1:], z_items[0]).metrics())
    return pooled
