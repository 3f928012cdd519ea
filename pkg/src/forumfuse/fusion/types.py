"""Value types for score fusion.

A provider reports one :class:`ScoreVector` (a distribution over classes) per
dimension, bundled into a :class:`ScoreBlock`. Fusion combines the blocks of
several providers into a :class:`FusedVerdict`.

The engine's schema fixes six binary dimensions, but these types deliberately
allow any number of dimensions and any class count >= 2 so the combination
rules can be exercised (and property-tested) on wider class spaces.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

from forumfuse.errors import ValidationError

SUM_TOLERANCE = 1e-9


def check_distribution(probs: Sequence[float], what: str = "score vector") -> tuple[float, ...]:
    """Validate a probability vector: entries >= 0, summing to 1 within 1e-9."""
    probs = tuple(float(p) for p in probs)
    if len(probs) < 2:
        raise ValidationError(f"{what}: needs at least 2 classes, got {len(probs)}")
    for j, p in enumerate(probs):
        if not math.isfinite(p) or p < 0.0:
            raise ValidationError(f"{what}: entry {j} is {p!r}, must be finite and >= 0")
    total = math.fsum(probs)
    if abs(total - 1.0) > SUM_TOLERANCE:
        raise ValidationError(f"{what}: entries sum to {total!r}, expected 1 within {SUM_TOLERANCE}")
    return probs


@dataclass(frozen=True)
class ScoreVector:
    """Per-class probabilities for a single dimension."""

    probs: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "probs", check_distribution(self.probs))

    @classmethod
    def normalized(cls, values: Sequence[float]) -> "ScoreVector":
        """Build a ScoreVector from non-negative weights, rescaling to sum 1."""
        values = [float(v) for v in values]
        total = math.fsum(values)
        if total <= 0 or not math.isfinite(total):
            raise ValidationError(f"cannot normalize weights with sum {total!r}")
        return cls(tuple(v / total for v in values))

    @property
    def label(self) -> int:
        """Argmax class; ties resolve to the lowest index."""
        return max(range(len(self.probs)), key=lambda j: (self.probs[j], -j))

    def __len__(self) -> int:
        return len(self.probs)


@dataclass(frozen=True)
class PriorVector:
    """Per-class prior probabilities for one dimension."""

    probs: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "probs", check_distribution(self.probs, "prior vector"))

    @classmethod
    def uniform(cls, class_count: int) -> "PriorVector":
        return cls(tuple(1.0 / class_count for _ in range(class_count)))


@dataclass(frozen=True)
class ScoreBlock:
    """One provider's scores: one ScoreVector per dimension, in schema order."""

    provider_id: str
    per_dimension: tuple[ScoreVector, ...]

    def __post_init__(self):
        if not self.provider_id:
            raise ValidationError("provider_id must be non-empty")
        if not self.per_dimension:
            raise ValidationError(f"provider {self.provider_id!r}: block has no dimensions")
        object.__setattr__(self, "per_dimension", tuple(self.per_dimension))

    @classmethod
    def from_lists(cls, provider_id: str, scores: Sequence[Sequence[float]]) -> "ScoreBlock":
        vectors = []
        for d, row in enumerate(scores):
            try:
                vectors.append(ScoreVector(tuple(row)))
            except ValidationError as exc:
                raise ValidationError(f"provider {provider_id!r}, dimension {d}: {exc}") from None
        return cls(provider_id=provider_id, per_dimension=tuple(vectors))

    def to_lists(self) -> list[list[float]]:
        return [list(v.probs) for v in self.per_dimension]


class RuleKind(enum.Enum):
    """The supported combination rules, across all three fusion levels."""

    PRODUCT = "product"
    PRODUCT_PRIOR_CORRECTED = "product_prior_corrected"
    SUM = "sum"
    MAX = "max"
    MIN = "min"
    MEDIAN = "median"
    MAJORITY_VOTE = "majority_vote"
    BORDA_COUNT = "borda_count"


_RULE_ALIASES = {
    "product": RuleKind.PRODUCT,
    "product_prior_corrected": RuleKind.PRODUCT_PRIOR_CORRECTED,
    "product-prior-corrected": RuleKind.PRODUCT_PRIOR_CORRECTED,
    "product_prior": RuleKind.PRODUCT_PRIOR_CORRECTED,
    "sum": RuleKind.SUM,
    "max": RuleKind.MAX,
    "maximum": RuleKind.MAX,
    "min": RuleKind.MIN,
    "minimum": RuleKind.MIN,
    "median": RuleKind.MEDIAN,
    "majority_vote": RuleKind.MAJORITY_VOTE,
    "majority-vote": RuleKind.MAJORITY_VOTE,
    "majority": RuleKind.MAJORITY_VOTE,
    "borda_count": RuleKind.BORDA_COUNT,
    "borda-count": RuleKind.BORDA_COUNT,
    "borda": RuleKind.BORDA_COUNT,
}


@dataclass(frozen=True)
class FusionRule:
    """A rule kind plus the floor applied to scores before log-space products."""

    kind: RuleKind = RuleKind.PRODUCT
    epsilon_floor: float = 1e-6

    def __post_init__(self):
        if not (0.0 < self.epsilon_floor <= 1e-2):
            raise ValidationError(f"epsilon_floor must lie in (0, 1e-2], got {self.epsilon_floor}")

    @classmethod
    def parse(cls, name: str, epsilon_floor: float = 1e-6) -> "FusionRule":
        try:
            kind = _RULE_ALIASES[name.strip().lower()]
        except KeyError:
            raise ValidationError(
                f"unknown fusion rule {name!r}; expected one of {sorted(set(_RULE_ALIASES))}"
            ) from None
        return cls(kind=kind, epsilon_floor=epsilon_floor)


@dataclass(frozen=True)
class DimensionVerdict:
    """Fused distribution for one dimension, with the winning class and margin."""

    fused: ScoreVector
    label: int
    margin: float

    def __post_init__(self):
        if self.label != self.fused.label:
            raise ValidationError(f"label {self.label} is not the argmax of {self.fused.probs}")
        if self.margin < 0:
            raise ValidationError(f"margin must be >= 0, got {self.margin}")

    @classmethod
    def from_vector(cls, fused: ScoreVector) -> "DimensionVerdict":
        ordered = sorted(fused.probs, reverse=True)
        return cls(fused=fused, label=fused.label, margin=ordered[0] - ordered[1])


@dataclass(frozen=True)
class FusedVerdict:
    """Per-dimension fused distributions plus a scalar confidence in [0, 1]."""

    per_dimension: tuple[DimensionVerdict, ...]
    confidence: float

    def __post_init__(self):
        if not self.per_dimension:
            raise ValidationError("verdict has no dimensions")
        if not (0.0 <= self.confidence <= 1.0):
            raise ValidationError(f"confidence must lie in [0, 1], got {self.confidence}")

    @property
    def labels(self) -> tuple[int, ...]:
        return tuple(d.label for d in self.per_dimension)

    def to_dict(self) -> dict:
        return {
            "per_dimension": [
                {"probs": list(d.fused.probs), "label": d.label, "margin": d.margin}
                for d in self.per_dimension
            ],
            "confidence": self.confidence,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "FusedVerdict":
        dims = tuple(
            DimensionVerdict(fused=ScoreVector(tuple(d["probs"])), label=d["label"], margin=d["margin"])
            for d in data["per_dimension"]
        )
        return cls(per_dimension=dims, confidence=data["confidence"])


def validate_blocks(blocks: Sequence[ScoreBlock]) -> None:
    """Check a provider ensemble is non-empty and dimension-aligned.

    Raises :class:`EmptyEnsembleError` for an empty list and
    :class:`ValidationError` naming the provider and dimension otherwise.
    """
    from forumfuse.errors import EmptyEnsembleError

    if not blocks:
        raise EmptyEnsembleError("fusion requires at least one score block")
    reference = blocks[0]
    for block in blocks[1:]:
        if len(block.per_dimension) != len(reference.per_dimension):
            raise ValidationError(
                f"provider {block.provider_id!r} reports {len(block.per_dimension)} dimensions, "
                f"provider {reference.provider_id!r} reports {len(reference.per_dimension)}"
            )
        for d, (a, b) in enumerate(zip(reference.per_dimension, block.per_dimension)):
            if len(a) != len(b):
                raise ValidationError(
                    f"provider {block.provider_id!r}, dimension {d}: class count {len(b)} "
                    f"does not match provider {reference.provider_id!r} ({len(a)})"
                )
