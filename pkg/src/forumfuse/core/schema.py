"""The six classification dimensions and their class spaces.

Posts are judged along six semantic dimensions. Three of them carry binary
raw annotations, the other three are annotated on a 1..7 ordinal scale and
are binarized with a threshold before any classification or evaluation.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

from forumfuse.errors import ValidationError

SCHEMA_VERSION = "1"

DIMENSION_NAMES = ("opinion", "question", "answer", "sentiment", "confusion", "urgency")
BINARY_RAW = ("opinion", "question", "answer")
ORDINAL_RAW = ("sentiment", "confusion", "urgency")

ORDINAL_MIN = 1
ORDINAL_MAX = 7


class Area(enum.Enum):
    """Subject area a course belongs to."""

    EDUCATION = "Education"
    HUMANITIES_SCIENCE = "Humanities/Science"
    MEDICINE = "Medicine"


_AREA_ALIASES = {
    "education": Area.EDUCATION,
    "edu": Area.EDUCATION,
    "humanities/science": Area.HUMANITIES_SCIENCE,
    "humanities/sciences": Area.HUMANITIES_SCIENCE,
    "humanities_science": Area.HUMANITIES_SCIENCE,
    "humanitiesscience": Area.HUMANITIES_SCIENCE,
    "h&s": Area.HUMANITIES_SCIENCE,
    "humsci": Area.HUMANITIES_SCIENCE,
    "medicine": Area.MEDICINE,
    "med": Area.MEDICINE,
}


def parse_area(value: str) -> Area:
    """Map a spelling of an area name onto the canonical enum member."""
    key = value.strip().lower()
    try:
        return _AREA_ALIASES[key]
    except KeyError:
        raise ValidationError(f"unknown area {value!r}; expected one of "
                              f"{[a.value for a in Area]}") from None


@dataclass(frozen=True)
class DimensionSpec:
    """One classification dimension: its name, raw annotation scale, class count."""

    name: str
    raw_scale: str  # "binary" or "ordinal-1-7"
    class_count: int = 2


@dataclass(frozen=True)
class DimensionSchema:
    """The fixed, ordered set of six dimensions plus the binarization threshold.

    ``ordinal_threshold`` is the cut applied to 1..7 raw annotations: values
    at or above it binarize to 1. The same threshold is applied to all three
    ordinal dimensions.
    """

    dimensions: tuple[DimensionSpec, ...] = field(
        default_factory=lambda: tuple(
            DimensionSpec(name=n, raw_scale="binary" if n in BINARY_RAW else "ordinal-1-7")
            for n in DIMENSION_NAMES
        )
    )
    ordinal_threshold: int = 4

    def __post_init__(self):
        names = tuple(d.name for d in self.dimensions)
        if names != DIMENSION_NAMES:
            raise ValidationError(
                f"schema must contain exactly the dimensions {DIMENSION_NAMES} in order, got {names}"
            )
        for d in self.dimensions:
            expected = "binary" if d.name in BINARY_RAW else "ordinal-1-7"
            if d.raw_scale != expected:
                raise ValidationError(f"dimension {d.name!r} must have raw_scale {expected!r}")
            if d.class_count != 2:
                raise ValidationError(f"dimension {d.name!r} must have class_count 2 after binarization")
        if not (ORDINAL_MIN <= self.ordinal_threshold <= ORDINAL_MAX):
            raise ValidationError(
                f"ordinal_threshold must lie in {ORDINAL_MIN}..{ORDINAL_MAX}, got {self.ordinal_threshold}"
            )

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(d.name for d in self.dimensions)

    def index(self, name: str) -> int:
        try:
            return DIMENSION_NAMES.index(name)
        except ValueError:
            raise ValidationError(f"unknown dimension {name!r}") from None


DEFAULT_SCHEMA = DimensionSchema()
