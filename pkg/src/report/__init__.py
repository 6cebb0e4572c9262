"""Results tables: report cells, markdown and CSV rendering, score files."""

from .cells import METRIC_ORDER, ReportCell, build_cell
from .render import (
    format_number, format_cell, sort_cells, render_markdown, render_segmentation_effect,
    render_report, cells_frame,
)
from .io import write_unit_scores, write_summary, read_summary, write_report

__all__ = [
    'METRIC_ORDER',
    'ReportCell',
    'build_cell',
    'format_number',
    'format_cell',
    'sort_cells',
    'render_markdown',
    'render_segmentation_effect',
    'render_report',
    'cells_frame',
    'write_unit_scores',
    'write_summary',
    'read_summary',
    'write_report',
]
