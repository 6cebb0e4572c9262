"""
Report cells: one (model, condition, k) entry of the results table.
"""

from dataclasses import dataclass, field, replace
from typing import Dict, Optional, Sequence

from scoring import FailureMode, MetricSummary, ScoringOptions, UnitScore, aggregate, failure_mode

# Column order of the results table
METRIC_ORDER = ("e_f", "e_p", "e_r", "z_e", "z_i", "z_p")


@dataclass(frozen=True)
class ReportCell:
    """
    Aggregated scores of one grid cell.

    Attributes:
        model_id: Model of the cell
        condition: "f" or "s"
        k: Number of shots
        metrics: mean{std} per metric, keyed in METRIC_ORDER
        failure: Failure mode of the mean precision and recall
        units: Conversations aggregated
        excluded_units: Failed units left out before aggregation
        pooled: Corpus-level scores from summed counts
    """
    model_id: str
    condition: str
    k: int
    metrics: Dict[str, MetricSummary]
    failure: FailureMode = FailureMode.NONE
    units: int = 0
    excluded_units: int = 0
    pooled: Dict[str, Optional[float]] = field(default_factory=dict)

    def mean(self, name: str) -> Optional[float]:
        return self.metrics[name].mean

    @property
    def sort_key(self):
        return (self.model_id, self.condition, self.k)

    def reclassify(self, gap_threshold: float, high_threshold: float) -> "ReportCell":
        """Copy with the failure mode recomputed under other thresholds."""
        mode = failure_mode(self.mean("e_p"), self.mean("e_r"), gap_threshold, high_threshold)
        return replace(self, failure=mode)

    def to_record(self) -> dict:
        return {
            "model_id": self.model_id,
            "condition": self.condition,
            "k": self.k,
            "units": self.units,
            "excluded_units": self.excluded_units,
            "failure": self.failure.value,
            "metrics": {name: self.metrics[name].to_dict() for name in METRIC_ORDER},
            "pooled": {name: self.pooled.get(name) for name in METRIC_ORDER},
        }

    @classmethod
    def from_record(cls, record: dict) -> "ReportCell":
        return cls(
            model_id=record["model_id"],
            condition=record["condition"],
            k=int(record["k"]),
            metrics={name: MetricSummary(**record["metrics"][name]) for name in METRIC_ORDER},
            failure=FailureMode(record["failure"]),
            units=record["units"],
            excluded_units=record["excluded_units"],
            pooled=dict(record.get("pooled") or {}),
        )


def build_cell(model_id: str, condition: str, k: int, scores: Sequence[UnitScore],
               excluded_units: int = 0, options: ScoringOptions = None) -> ReportCell:
    """Aggregate per-conversation scores into a cell; a cell with no scores reports every metric undefined."""
    options = options or ScoringOptions()
    if scores:
        summary = aggregate(scores, options.std_mode)
        metrics, pooled = summary.metrics, summary.pooled
    else:
        metrics, pooled = {}, {}
    metrics = {name: metrics.get(name, MetricSummary(mean=None, std=None, count=0)) for name in METRIC_ORDER}
    cell = ReportCell(model_id=model_id, condition=condition, k=k, metrics=metrics,
                      units=len(scores), excluded_units=excluded_units, pooled=pooled)
    return cell.reclassify(options.gap_threshold, options.high_threshold)
