"""Precision/recall/F1 over the six dimensions.

Positive class is always label 1.  Zero denominators resolve to 0.0 by
convention and are flagged, so a system that never predicts a class is
penalized rather than excused.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from ..core.schema import DIMENSION_NAMES
from ..errors import ValidationError


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int = 0
    fp: int = 0
    fn: int = 0
    tn: int = 0

    def __post_init__(self):
        for name in ("tp", "fp", "fn", "tn"):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 0:
                raise ValidationError(f"{name} must be a non-negative integer, got {value!r}")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    def __add__(self, other: "ConfusionCounts") -> "ConfusionCounts":
        return ConfusionCounts(
            tp=self.tp + other.tp,
            fp=self.fp + other.fp,
            fn=self.fn + other.fn,
            tn=self.tn + other.tn,
        )


def score_dimension(pred: Sequence[int], gold: Sequence[int]) -> ConfusionCounts:
    """Tally one dimension's confusion counts from aligned label sequences."""
    if len(pred) != len(gold):
        raise ValidationError(f"pred has {len(pred)} labels but gold has {len(gold)}")
    tp = fp = fn = tn = 0
    for p, g in zip(pred, gold):
        if p not in (0, 1) or g not in (0, 1):
            raise ValidationError(f"labels must be 0 or 1, got pred={p!r} gold={g!r}")
        if p == 1 and g == 1:
            tp += 1
        elif p == 1:
            fp += 1
        elif g == 1:
            fn += 1
        else:
            tn += 1
    return ConfusionCounts(tp=tp, fp=fp, fn=fn, tn=tn)


def _safe_div(num: int, denom: int) -> tuple[float, bool]:
    # Returns (value, degenerate) where degenerate means the denominator
    # was zero and the 0.0 convention kicked in.
    if denom == 0:
        return 0.0, True
    return num / denom, False


@dataclass(frozen=True)
class DimensionMetrics:
    precision: float
    recall: float
    f1: float
    degenerate: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        out = {"precision": self.precision, "recall": self.recall, "f1": self.f1}
        if self.degenerate:
            out["degenerate"] = list(self.degenerate)
        return out


def _metrics_from(counts: ConfusionCounts) -> DimensionMetrics:
    precision, p_deg = _safe_div(counts.tp, counts.tp + counts.fp)
    recall, r_deg = _safe_div(counts.tp, counts.tp + counts.fn)
    # 2tp/(2tp+fp+fn) is the harmonic mean of P and R when both exist and
    # stays exact in float arithmetic for integer counts.
    f1, f_deg = _safe_div(2 * counts.tp, 2 * counts.tp + counts.fp + counts.fn)
    flags = tuple(
        name for name, deg in (("precision", p_deg), ("recall", r_deg), ("f1", f_deg)) if deg
    )
    return DimensionMetrics(precision=precision, recall=recall, f1=f1, degenerate=flags)


def _mean(values: Sequence[float]) -> float:
    return sum(values) / len(values)


@dataclass(frozen=True)
class MetricsReport:
    configuration: str
    system: str
    per_dimension: Mapping[str, DimensionMetrics]
    macro: DimensionMetrics
    micro: DimensionMetrics
    counts: Mapping[str, ConfusionCounts]
    coverage: float = 1.0
    notes: tuple[str, ...] = field(default_factory=tuple)

    def to_dict(self) -> dict:
        out = {
            "configuration": self.configuration,
            "system": self.system,
            "per_dimension": {k: v.to_dict() for k, v in self.per_dimension.items()},
            "macro": self.macro.to_dict(),
            "micro": self.micro.to_dict(),
            "counts": {
                k: {"tp": c.tp, "fp": c.fp, "fn": c.fn, "tn": c.tn}
                for k, c in self.counts.items()
            },
            "coverage": self.coverage,
        }
        if self.notes:
            out["notes"] = list(self.notes)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))


def compute_metrics(
    counts: Sequence[ConfusionCounts],
    configuration: str = "",
    system: str = "",
    dimension_names: Sequence[str] = DIMENSION_NAMES,
    coverage: float = 1.0,
    notes: Sequence[str] = (),
) -> MetricsReport:
    """Build a full report from per-dimension confusion counts.

    Macro numbers are unweighted means over dimensions; micro numbers come
    from the pooled counts.
    """
    if len(counts) != len(dimension_names):
        raise ValidationError(
            f"got {len(counts)} count blocks for {len(dimension_names)} dimensions"
        )
    per_dim = {name: _metrics_from(c) for name, c in zip(dimension_names, counts)}
    dims = list(per_dim.values())
    macro_flags = sorted({flag for m in dims for flag in m.degenerate})
    macro = DimensionMetrics(
        precision=_mean([m.precision for m in dims]),
        recall=_mean([m.recall for m in dims]),
        f1=_mean([m.f1 for m in dims]),
        degenerate=tuple(macro_flags),
    )
    pooled = ConfusionCounts()
    for c in counts:
        pooled = pooled + c
    micro = _metrics_from(pooled)
    all_notes = list(notes)
    if coverage < 1.0:
        all_notes.append(f"coverage {coverage:.4f} < 1.0: some posts were not scored")
    if macro_flags:
        all_notes.append("zero-denominator convention applied: " + ", ".join(macro_flags))
    return MetricsReport(
        configuration=configuration,
        system=system,
        per_dimension=per_dim,
        macro=macro,
        micro=micro,
        counts=dict(zip(dimension_names, counts)),
        coverage=coverage,
        notes=tuple(all_notes),
    )
