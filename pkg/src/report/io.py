"""
Score and report files.

Per cell directory:  scores.jsonl / scores.csv (one row per conversation),
                     segments.jsonl (one row per scored unit)
Output root:         summary.jsonl / summary.csv (one row per cell),
                     report.md / report.csv
"""

import json
import logging
from pathlib import Path
from typing import List, Sequence, Union

import pandas as pd

from scoring import UnitScore
from .cells import ReportCell
from .render import cells_frame, render_report

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def _write_jsonl(path: Path, records: Sequence[dict]) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for record in records:
            f.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n")


def write_unit_scores(directory: PathLike, conversations: Sequence[UnitScore],
                      segments: Sequence[UnitScore] = ()) -> None:
    directory = Path(directory)
    records = [score.to_record() for score in conversations]
    _write_jsonl(directory / "scores.jsonl", records)
    pd.DataFrame(records).to_csv(directory / "scores.csv", index=False)
    if segments:
        _write_jsonl(directory / "segments.jsonl", [score.to_record() for score in segments])


def write_summary(out_dir: PathLike, cells: Sequence[ReportCell]) -> Path:
    out_dir = Path(out_dir)
    path = out_dir / "summary.jsonl"
    _write_jsonl(path, [cell.to_record() for cell in sorted(cells, key=lambda c: c.sort_key)])
    cells_frame(cells).to_csv(out_dir / "summary.csv", index=False)
    return path


def read_summary(path: PathLike) -> List[ReportCell]:
    with open(path, encoding="utf-8") as f:
        return [ReportCell.from_record(json.loads(line)) for line in f if line.strip()]


def write_report(out_dir: PathLike, cells: Sequence[ReportCell]) -> Path:
    """Write report.md and report.csv; both render the same cells."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "report.md"
    path.write_text(render_report(cells), encoding="utf-8")
    cells_frame(cells).to_csv(out_dir / "report.csv", index=False)
    logger.info("Report with %d cells written to %s", len(cells), path)
    return path
