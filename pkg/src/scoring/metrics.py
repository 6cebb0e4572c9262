"""
Word-level E-scores, node-level Z-scores and failure modes.

E-scores treat disfluent gold tokens as the positive class and deletion
as the positive prediction. Z-scores count, per disfluent node class,
the share of nodes whose whole terminal span was deleted; nested nodes
are counted independently.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence, Union

from alignment import DeletionLabels, align, deletion_labels, is_punctuation_only
from core import DISFLUENT_CLASSES, LengthMismatch, NodeClass, ParseTree, Token
from extraction import TokenTag

METRIC_NAMES = ("e_p", "e_r", "e_f", "z_e", "z_i", "z_p")


class Scope(Enum):
    """Which gold tokens count towards E-scores"""
    WORDS = "words"     # Punctuation-only tokens excluded
    ALL = "all"


class FailureMode(Enum):
    NONE = "none"
    OVER_DELETION = "over-deletion"     # Fluent words removed along with disfluencies
    UNDER_DELETION = "under-deletion"   # Disfluencies left in place


@dataclass
class ScoringOptions:
    """
    Scoring settings.

    Attributes:
        scope: Token scope of E-scores
        z_include_punct: Require punctuation inside a node's span to be deleted too
        std_mode: "sample" (n-1) or "population" standard deviation
        gap_threshold: Minimum |P - R| gap of a failure mode, in percent
        high_threshold: Minimum value of the high side of a failure mode, in percent
    """
    scope: Scope = Scope.WORDS
    z_include_punct: bool = True
    std_mode: str = "sample"
    gap_threshold: float = 40.0
    high_threshold: float = 80.0

    def __post_init__(self):
        if self.std_mode not in ("sample", "population"):
            raise ValueError(f"std_mode must be 'sample' or 'population', got {self.std_mode!r}")
        _check_threshold("gap_threshold", self.gap_threshold)
        _check_threshold("high_threshold", self.high_threshold)


@dataclass(frozen=True)
class EScores:
    """
    Word-level precision, recall and F1 in percent.

    precision is None when nothing was deleted and nothing needed deleting;
    when disfluencies were present but nothing was deleted it is reported
    as 0 with undefined_precision set. recall is None without disfluent tokens.
    """
    tp: int = 0
    fp: int = 0
    fn: int = 0
    tn: int = 0
    precision: Optional[float] = field(init=False)
    recall: Optional[float] = field(init=False)
    f1: Optional[float] = field(init=False)
    undefined_precision: bool = field(init=False)

    def __post_init__(self):
        recall = 100.0 * self.tp / (self.tp + self.fn) if self.tp + self.fn else None
        if self.tp + self.fp:
            precision, undefined = 100.0 * self.tp / (self.tp + self.fp), False
        else:
            precision, undefined = (0.0 if recall is not None else None), True
        f1 = None
        if precision is not None and recall is not None:
            f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        object.__setattr__(self, "precision", precision)
        object.__setattr__(self, "recall", recall)
        object.__setattr__(self, "f1", f1)
        object.__setattr__(self, "undefined_precision", undefined)

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    def metrics(self) -> Dict[str, Optional[float]]:
        return {"e_p": self.precision, "e_r": self.recall, "e_f": self.f1}

    def __add__(self, other: "EScores") -> "EScores":
        return EScores(self.tp + other.tp, self.fp + other.fp, self.fn + other.fn, self.tn + other.tn)


@dataclass(frozen=True)
class ZScores:
    """Disfluent node counts per class: total nodes and fully removed nodes"""
    e_total: int = 0
    e_removed: int = 0
    i_total: int = 0
    i_removed: int = 0
    p_total: int = 0
    p_removed: int = 0

    @staticmethod
    def _ratio(removed: int, total: int) -> Optional[float]:
        return 100.0 * removed / total if total else None

    @property
    def z_e(self) -> Optional[float]:
        return self._ratio(self.e_removed, self.e_total)

    @property
    def z_i(self) -> Optional[float]:
        return self._ratio(self.i_removed, self.i_total)

    @property
    def z_p(self) -> Optional[float]:
        return self._ratio(self.p_removed, self.p_total)

    def metrics(self) -> Dict[str, Optional[float]]:
        return {"z_e": self.z_e, "z_i": self.z_i, "z_p": self.z_p}

    def __add__(self, other: "ZScores") -> "ZScores":
        return ZScores(*(a + b for a, b in zip(_counts(self), _counts(other))))


def _counts(z: ZScores):
    return (z.e_total, z.e_removed, z.i_total, z.i_removed, z.p_total, z.p_removed)


def _check_threshold(name: str, value: float) -> None:
    if not 0.0 < value <= 100.0:
        raise ValueError(f"{name} must be in (0, 100], got {value}")


def scope_mask(tokens: Sequence[Token], scope: Scope) -> List[bool]:
    if scope is Scope.ALL:
        return [True] * len(tokens)
    return [not is_punctuation_only(token) for token in tokens]


def e_scores(tags: Sequence[TokenTag], labels: DeletionLabels,
             include: Optional[Sequence[bool]] = None) -> EScores:
    """
    Confusion counts over gold tokens.

    Args:
        tags: Gold tag per token
        labels: Deletion decision per token
        include: Optional scope mask; tokens with False are not counted
    """
    if len(tags) != labels.gold_len:
        raise LengthMismatch(f"{len(tags)} tags for {labels.gold_len} aligned gold tokens")
    if include is not None and len(include) != len(tags):
        raise LengthMismatch(f"Scope mask has {len(include)} entries for {len(tags)} tokens")
    tp = fp = fn = tn = 0
    for i, (tag, deleted) in enumerate(zip(tags, labels.deleted)):
        if include is not None and not include[i]:
            continue
        if tag.is_disfluent and deleted:
            tp += 1
        elif tag.is_disfluent:
            fn += 1
        elif deleted:
            fp += 1
        else:
            tn += 1
    return EScores(tp=tp, fp=fp, fn=fn, tn=tn)


def z_scores(trees: Union[ParseTree, Sequence[ParseTree]], labels: DeletionLabels,
             punct_exempt: Optional[Sequence[bool]] = None) -> ZScores:
    """
    Count fully removed disfluent nodes.

    Args:
        trees: One tree, or several whose yields concatenate to the gold sequence
        labels: Deletion decision per gold token
        punct_exempt: Tokens that need not be deleted for a node to count as removed
    """
    if isinstance(trees, ParseTree):
        trees = [trees]
    width = sum(tree.width for tree in trees)
    if width != labels.gold_len:
        raise LengthMismatch(f"Trees yield {width} tokens, alignment covers {labels.gold_len}")

    counts = {cls: [0, 0] for cls in DISFLUENT_CLASSES}
    offset = 0
    for tree in trees:
        for node in tree.subtrees():
            node_class = node.node_class
            if node_class not in DISFLUENT_CLASSES:
                continue
            start, end = node.span[0] + offset, node.span[1] + offset
            removed = all(
                labels.deleted[i] or (punct_exempt is not None and punct_exempt[i])
                for i in range(start, end)
            )
            counts[node_class][0] += 1
            counts[node_class][1] += int(removed)
        offset += tree.width
    return ZScores(
        e_total=counts[NodeClass.EDITED][0], e_removed=counts[NodeClass.EDITED][1],
        i_total=counts[NodeClass.INTJ][0], i_removed=counts[NodeClass.INTJ][1],
        p_total=counts[NodeClass.PRN][0], p_removed=counts[NodeClass.PRN][1],
    )


def failure_mode(precision: Optional[float], recall: Optional[float],
                 gap_threshold: float = 40.0, high_threshold: float = 80.0) -> FailureMode:
    if precision is None or recall is None:
        return FailureMode.NONE
    if recall - precision >= gap_threshold and recall >= high_threshold:
        return FailureMode.OVER_DELETION
    if precision - recall >= gap_threshold and precision >= high_threshold:
        return FailureMode.UNDER_DELETION
    return FailureMode.NONE


def classify_failure(e: EScores, gap_threshold: float = 40.0, high_threshold: float = 80.0) -> FailureMode:
    """Over-deletion: high recall, precision far below it. Under-deletion: the reverse."""
    _check_threshold("gap_threshold", gap_threshold)
    _check_threshold("high_threshold", high_threshold)
    return failure_mode(e.precision, e.recall, gap_threshold, high_threshold)


@dataclass(frozen=True)
class UnitScore:
    """Scores of one evaluation unit (a segment, or a conversation after pooling)"""
    unit_id: str
    e: EScores
    z: ZScores
    insertions: int = 0
    failure: FailureMode = FailureMode.NONE

    def metrics(self) -> Dict[str, Optional[float]]:
        return {**self.e.metrics(), **self.z.metrics()}

    def to_record(self) -> dict:
        record = {"unit_id": self.unit_id}
        record.update(self.metrics())
        record.update(tp=self.e.tp, fp=self.e.fp, fn=self.e.fn, tn=self.e.tn,
                      undefined_precision=self.e.undefined_precision)
        record.update(zip(("e_total", "e_removed", "i_total", "i_removed", "p_total", "p_removed"),
                          _counts(self.z)))
        record.update(insertions=self.insertions, failure=self.failure.value)
        return record


def evaluate_unit(unit_id: str, tokens: Sequence[Token], tags: Sequence[TokenTag],
                  trees: Sequence[ParseTree], hypothesis: Sequence[str],
                  options: ScoringOptions = None) -> UnitScore:
    """Align one hypothesis against its gold tokens and score it."""
    options = options or ScoringOptions()
    labels = deletion_labels(align(tokens, hypothesis))
    e = e_scores(tags, labels, scope_mask(tokens, options.scope))
    exempt = None if options.z_include_punct else [is_punctuation_only(t) for t in tokens]
    z = z_scores(trees, labels, exempt)
    return UnitScore(unit_id=unit_id, e=e, z=z, insertions=labels.insertions,
                     failure=failure_mode(e.precision, e.recall, options.gap_threshold, options.high_threshold))


def pool_units(unit_id: str, units: Iterable[UnitScore], options: ScoringOptions = None) -> UnitScore:
    """Sum the confusion and node counts of several units into one."""
    options = options or ScoringOptions()
    e, z, insertions = EScores(), ZScores(), 0
    for unit in units:
        e, z, insertions = e + unit.e, z + unit.z, insertions + unit.insertions
    return UnitScore(unit_id=unit_id, e=e, z=z, insertions=insertions,
                     failure=failure_mode(e.precision, e.recall, options.gap_threshold, options.high_threshold))
