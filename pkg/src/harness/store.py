"""
Output store: one directory per grid cell.

    <out>/<model>/<condition>_k<shots>/outputs.jsonl
    <out>/<model>/<condition>_k<shots>/cell.json
"""

import json
import logging
import re
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterator, List, Sequence, Tuple, Union

from core import CorpusFormatError
from .config import Condition, EvalConfig
from .runner import ModelOutput

logger = logging.getLogger(__name__)

OUTPUTS_FILE = "outputs.jsonl"
CELL_FILE = "cell.json"


@dataclass(frozen=True)
class CellInfo:
    """Settings and outcome of one stored cell"""
    model_id: str
    condition: str
    shots: int
    segment_size: int
    exemplar_seed: int
    temperature: float
    units: int
    failures: int

    @property
    def cell_name(self) -> str:
        return f"{self.condition}_k{self.shots}"


def model_slug(model_id: str) -> str:
    """Directory-safe form of a model id"""
    return re.sub(r"[^A-Za-z0-9._-]+", "_", model_id)


def cell_dir(out_dir: Union[str, Path], model_id: str, condition: Condition, shots: int) -> Path:
    return Path(out_dir) / model_slug(model_id) / f"{condition.value}_k{shots}"


def save_cell(out_dir: Union[str, Path], config: EvalConfig, outputs: Sequence[ModelOutput]) -> Path:
    """Write the outputs of one cell; returns the cell directory."""
    directory = cell_dir(out_dir, config.model_id, config.condition, config.shots)
    directory.mkdir(parents=True, exist_ok=True)
    with open(directory / OUTPUTS_FILE, "w", encoding="utf-8") as f:
        for output in outputs:
            f.write(json.dumps(output.to_record(), ensure_ascii=False, sort_keys=True) + "\n")
    info = CellInfo(
        model_id=config.model_id,
        condition=config.condition.value,
        shots=config.shots,
        segment_size=config.segment_size,
        exemplar_seed=config.exemplar_seed,
        temperature=config.temperature,
        units=len(outputs),
        failures=sum(1 for output in outputs if not output.ok),
    )
    (directory / CELL_FILE).write_text(json.dumps(asdict(info), indent=2, sort_keys=True) + "\n",
                                       encoding="utf-8")
    logger.debug("Saved %d outputs to %s", len(outputs), directory)
    return directory


def read_outputs(path: Union[str, Path]) -> List[ModelOutput]:
    outputs = []
    with open(path, encoding="utf-8") as f:
        for number, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                outputs.append(ModelOutput.from_record(json.loads(line)))
            except (json.JSONDecodeError, TypeError) as error:
                raise CorpusFormatError(f"{path}:{number}: bad output record: {error}") from error
    return outputs


def load_cells(out_dir: Union[str, Path]) -> Iterator[Tuple[CellInfo, Path, List[ModelOutput]]]:
    """Yield (info, directory, outputs) for every stored cell, in path order."""
    for cell_file in sorted(Path(out_dir).glob(f"*/*/{CELL_FILE}")):
        info = CellInfo(**json.loads(cell_file.read_text(encoding="utf-8")))
        yield info, cell_file.parent, read_outputs(cell_file.parent / OUTPUTS_FILE)
