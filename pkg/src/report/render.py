"""
Markdown and CSV rendering of report cells.

Cells print as mean{std} with two decimals. Within each model block the
highest E_F is bold and the second highest italic. With three or more
distinct values the lowest carries "(min)", with four or more the second
lowest carries "(2nd min)". Every marked row also flags its highest Z mean
with an up arrow and its lowest with a down arrow.
"""

from typing import Dict, List, Optional, Sequence

import pandas as pd

from scoring import FailureMode, MetricSummary
from .cells import METRIC_ORDER, ReportCell

Z_METRICS = ("z_e", "z_i", "z_p")
HEADERS = {"e_f": "E_F", "e_p": "E_P", "e_r": "E_R", "z_e": "Z_E", "z_i": "Z_I", "z_p": "Z_P"}
UNDEFINED = "-"


def format_number(value: Optional[float]) -> str:
    return UNDEFINED if value is None else f"{value:.2f}"


def format_cell(summary: MetricSummary) -> str:
    """82.38{4.18}"""
    if summary.mean is None:
        return UNDEFINED
    return f"{summary.mean:.2f}{{{format_number(summary.std)}}}"


def sort_cells(cells: Sequence[ReportCell]) -> List[ReportCell]:
    return sorted(cells, key=lambda cell: cell.sort_key)


def _rounded(value: Optional[float]) -> Optional[float]:
    return None if value is None else round(value, 2)


def _highlights(block: Sequence[ReportCell]) -> Dict[int, str]:
    """Position in block -> "best" / "second" / "worst" / "second-worst" by rounded E_F mean"""
    values = [_rounded(cell.mean("e_f")) for cell in block]
    distinct = sorted({v for v in values if v is not None}, reverse=True)
    ranks = {}
    if distinct:
        ranks[distinct[0]] = "best"
    if len(distinct) > 1:
        ranks[distinct[1]] = "second"
    if len(distinct) > 2:
        ranks[distinct[-1]] = "worst"
    if len(distinct) > 3:
        ranks[distinct[-2]] = "second-worst"
    return {i: ranks[v] for i, v in enumerate(values) if v in ranks}


def _z_extremes(cell: ReportCell) -> Dict[str, str]:
    """Z metric -> "high" / "low" for the highest and lowest defined Z mean of a row"""
    values = {name: _rounded(cell.mean(name)) for name in Z_METRICS}
    defined = {v for v in values.values() if v is not None}
    if len(defined) < 2:
        return {}
    top, bottom = max(defined), min(defined)
    marks = {}
    for name, value in values.items():
        if value == top:
            marks[name] = "high"
        elif value == bottom:
            marks[name] = "low"
    return marks


def _decorate(text: str, mark: Optional[str]) -> str:
    if mark == "best":
        return f"**{text}**"
    if mark == "second":
        return f"_{text}_"
    if mark == "worst":
        return f"{text} (min)"
    if mark == "second-worst":
        return f"{text} (2nd min)"
    if mark == "high":
        return f"{text} ↑"
    if mark == "low":
        return f"{text} ↓"
    return text


def render_markdown(cells: Sequence[ReportCell]) -> str:
    """Results table, one row per cell, grouped by model."""
    lines = [
        "| Model | Cond | k | " + " | ".join(HEADERS[name] for name in METRIC_ORDER) + " | Units | Excl. | Failure |",
        "|---|---|---|" + "---|" * len(METRIC_ORDER) + "---|---|---|",
    ]
    ordered = sort_cells(cells)
    blocks: Dict[str, List[ReportCell]] = {}
    for cell in ordered:
        blocks.setdefault(cell.model_id, []).append(cell)
    for model_id, block in blocks.items():
        marks = _highlights(block)
        for i, cell in enumerate(block):
            row_marks = dict(_z_extremes(cell), e_f=marks[i]) if i in marks else {}
            row = [model_id, cell.condition, str(cell.k)]
            for name in METRIC_ORDER:
                row.append(_decorate(format_cell(cell.metrics[name]), row_marks.get(name)))
            failure = "" if cell.failure is FailureMode.NONE else cell.failure.value
            row += [str(cell.units), str(cell.excluded_units), failure]
            lines.append("| " + " | ".join(row) + " |")
    return "\n".join(lines) + "\n"


def render_segmentation_effect(cells: Sequence[ReportCell]) -> str:
    """E_F(s) - E_F(f) per model and k, for pairs where both conditions ran."""
    lookup = {(cell.model_id, cell.condition, cell.k): cell for cell in cells}
    lines = ["| Model | k | E_F (f) | E_F (s) | s - f |", "|---|---|---|---|---|"]
    pairs = sorted({(cell.model_id, cell.k) for cell in cells})
    for model_id, k in pairs:
        full, segmented = lookup.get((model_id, "f", k)), lookup.get((model_id, "s", k))
        if full is None or segmented is None:
            continue
        f_mean, s_mean = full.mean("e_f"), segmented.mean("e_f")
        delta = UNDEFINED if f_mean is None or s_mean is None else f"{s_mean - f_mean:+.2f}"
        lines.append(f"| {model_id} | {k} | {format_number(f_mean)} | {format_number(s_mean)} | {delta} |")
    return "\n".join(lines) + "\n"


def render_report(cells: Sequence[ReportCell], title: str = "Disfluency removal results") -> str:
    sections = [
        f"# {title}",
        "",
        "Scores are mean{std} over conversations. **Bold**: best E_F per model; "
        "_italic_: second best; (min) and (2nd min): lowest and second lowest. "
        "On marked rows ↑ and ↓ flag the highest and lowest Z score.",
        "",
        render_markdown(cells),
        "## Segmentation effect",
        "",
        render_segmentation_effect(cells),
    ]
    return "\n".join(sections)


def cells_frame(cells: Sequence[ReportCell]) -> pd.DataFrame:
    """Flat table of raw numbers, same cell order as the markdown."""
    rows = []
    for cell in sort_cells(cells):
        row = {"model": cell.model_id, "condition": cell.condition, "k": cell.k,
               "units": cell.units, "excluded_units": cell.excluded_units}
        for name in METRIC_ORDER:
            summary = cell.metrics[name]
            row[f"{name}_mean"] = summary.mean
            row[f"{name}_std"] = summary.std
            row[f"{name}_excluded"] = summary.excluded
        for name in METRIC_ORDER:
            row[f"pooled_{name}"] = cell.pooled.get(name)
        row["failure"] = cell.failure.value
        rows.append(row)
    return pd.DataFrame(rows)
