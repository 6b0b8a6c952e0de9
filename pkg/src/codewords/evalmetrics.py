"""Annotation agreement and classification metrics.

Ratings are ordinal on a 0..4 likert scale (very unlikely .. very likely).
"""

from __future__ import annotations

import csv
from collections import Counter, defaultdict
from dataclasses import dataclass, field

from .errors import DegenerateMatrix, InputError, ParameterError

SCALE = (0, 1, 2, 3, 4)
NEUTRAL = 2
HATE, NOT_HATE = "hate", "not_hate"


@dataclass
class AnnotationMatrix:
    """Item x annotator ratings; absent pairs are missing ratings."""

    ratings: dict[str, dict[str, int]] = field(default_factory=dict)
    scale: tuple = SCALE

    def __post_init__(self):
        allowed = set(self.scale)
        for item, row in self.ratings.items():
            for ann, r in row.items():
                if r not in allowed:
                    raise ParameterError(f"rating {r!r} for item {item!r} by {ann!r} is outside the scale {self.scale}")

    @property
    def items(self) -> list[str]:
        return list(self.ratings)

    @property
    def annotators(self) -> list[str]:
        seen = {}
        for row in self.ratings.values():
            for a in row:
                seen.setdefault(a, None)
        return list(seen)

    @classmethod
    def from_rows(cls, rows, scale=SCALE) -> "AnnotationMatrix":
        table: dict[str, dict[str, int]] = defaultdict(dict)
        for item, ann, rating in rows:
            table[str(item)][str(ann)] = int(rating)
        return cls(dict(table), scale)

    @classmethod
    def from_columns(cls, columns, scale=SCALE) -> "AnnotationMatrix":
        """One sequence per annotator, ``None`` for missing; items are positions."""
        rows = []
        for a, col in enumerate(columns):
            for i, r in enumerate(col):
                if r is not None:
                    rows.append((i, a, r))
        return cls.from_rows(rows, scale)

    def values_by_item(self) -> list[list[int]]:
        return [list(row.values()) for row in self.ratings.values()]


def read_annotations(path, scale=SCALE) -> AnnotationMatrix:
    """CSV with header ``item_id,annotator_id,rating``."""
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            need = {"item_id", "annotator_id", "rating"}
            if reader.fieldnames is None or not need <= set(reader.fieldnames):
                raise InputError(f"{path}: header must contain item_id,annotator_id,rating")
            rows = []
            for lineno, rec in enumerate(reader, start=2):
                try:
                    rows.append((rec["item_id"], rec["annotator_id"], int(rec["rating"])))
                except (TypeError, ValueError):
                    raise InputError(f"{path}: line {lineno} has a non-integer rating") from None
    except OSError as exc:
        raise InputError(f"cannot read annotations {path}: {exc}") from exc
    return AnnotationMatrix.from_rows(rows, scale)


def ordinal_delta(marginals: dict, scale, c, k) -> float:
    """Squared ordinal distance between ranks ``c`` and ``k``."""
    if c == k:
        return 0.0
    lo, hi = sorted((scale.index(c), scale.index(k)))
    between = sum(marginals.get(scale[g], 0) for g in range(lo, hi + 1))
    return (between - (marginals.get(c, 0) + marginals.get(k, 0)) / 2.0) ** 2


def coincidence_matrix(m: AnnotationMatrix) -> dict[tuple, float]:
    o: dict[tuple, float] = defaultdict(float)
    for vals in m.values_by_item():
        mu = len(vals)
        if mu < 2:
            continue
        for i, a in enumerate(vals):
            for j, b in enumerate(vals):
                if i != j:
                    o[(a, b)] += 1.0 / (mu - 1)
    return dict(o)


def krippendorff_alpha(m: AnnotationMatrix) -> float:
    """Ordinal Krippendorff's alpha from the coincidence matrix.

    Items with fewer than two ratings are not pairable and are ignored.
    """
    pairable = [v for v in m.values_by_item() if len(v) >= 2]
    if len(pairable) < 2:
        raise ParameterError("alpha needs at least 2 items with 2 or more ratings")
    o = coincidence_matrix(m)
    scale = list(m.scale)
    marg: Counter = Counter()
    for (c, _), v in o.items():
        marg[c] += v
    n = sum(marg.values())
    d_obs = sum(v * ordinal_delta(marg, scale, c, k) for (c, k), v in o.items())
    d_exp = 0.0
    for c in scale:
        for k in scale:
            if c != k:
                d_exp += marg[c] * marg[k] * ordinal_delta(marg, scale, c, k)
    if d_exp == 0:
        raise DegenerateMatrix("all pairable ratings are identical; expected disagreement is zero")
    return 1.0 - (n - 1) * d_obs / d_exp


def majority_label(ratings, prefer: str = "high") -> int:
    """Most common rating; ties go to the higher rating unless ``prefer='low'``."""
    counts = Counter(ratings)
    if not counts:
        raise ParameterError("majority of an empty rating set")
    top = max(counts.values())
    tied = [r for r, c in counts.items() if c == top]
    return max(tied) if prefer == "high" else min(tied)


def likert_to_binary(rating: int, neutral: str = NOT_HATE) -> str:
    if rating not in SCALE:
        raise ParameterError(f"rating {rating!r} is outside the 0..4 scale")
    if rating > NEUTRAL:
        return HATE
    if rating < NEUTRAL:
        return NOT_HATE
    return neutral


@dataclass
class BinaryEval:
    predicted: list[str]
    truth: list[str]

    def __post_init__(self):
        if len(self.predicted) != len(self.truth):
            raise ParameterError("predicted and truth labels differ in length")
        for lab in (*self.predicted, *self.truth):
            if lab not in (HATE, NOT_HATE):
                raise ParameterError(f"unknown label {lab!r}")

    def confusion(self, positive: str = HATE) -> dict[str, int]:
        c = Counter()
        for p, t in zip(self.predicted, self.truth):
            if p == positive:
                c["tp" if t == positive else "fp"] += 1
            else:
                c["fn" if t == positive else "tn"] += 1
        return {k: c[k] for k in ("tp", "fp", "fn", "tn")}


@dataclass
class Scores:
    precision: float | None
    recall: float | None
    f1: float | None
    undefined: dict[str, str] = field(default_factory=dict)


def precision_recall_f1(ev: BinaryEval, positive: str = HATE) -> Scores:
    """Per-class precision, recall and F1.

    A metric whose denominator is zero is ``None`` and explained in
    ``undefined`` rather than reported as 0.
    """
    c = ev.confusion(positive)
    tp, fp, fn = c["tp"], c["fp"], c["fn"]
    why = {}
    p = r = f = None
    if tp + fp:
        p = tp / (tp + fp)
    else:
        why["precision"] = f"no items predicted {positive}"
    if tp + fn:
        r = tp / (tp + fn)
    else:
        why["recall"] = f"no items labeled {positive} in the truth"
    if p is not None and r is not None:
        if p + r:
            f = 2 * p * r / (p + r)
        else:
            why["f1"] = "precision and recall are both zero"
    else:
        why["f1"] = "precision or recall undefined"
    return Scores(p, r, f, why)
