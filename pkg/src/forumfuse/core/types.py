"""Core domain types: posts, label vectors, raw annotations, dataset splits."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from forumfuse.core.schema import (
    BINARY_RAW,
    DIMENSION_NAMES,
    ORDINAL_MAX,
    ORDINAL_MIN,
    ORDINAL_RAW,
    Area,
    DimensionSchema,
)
from forumfuse.errors import ValidationError


@dataclass(frozen=True)
class LabelVector:
    """Six binary labels, index-aligned with the schema's dimension order."""

    labels: tuple[int, ...]

    def __post_init__(self):
        if len(self.labels) != len(DIMENSION_NAMES):
            raise ValidationError(f"label vector needs {len(DIMENSION_NAMES)} entries, got {len(self.labels)}")
        for name, value in zip(DIMENSION_NAMES, self.labels):
            if value not in (0, 1):
                raise ValidationError(f"label for {name!r} must be 0 or 1, got {value!r}")

    def __getitem__(self, index: int) -> int:
        return self.labels[index]

    def __iter__(self):
        return iter(self.labels)

    def as_dict(self) -> dict[str, int]:
        return dict(zip(DIMENSION_NAMES, self.labels))


def _is_digits_only(text: str) -> bool:
    # Treats "123 456" as digits-only: whitespace is ignored, everything else must be 0-9.
    compact = "".join(text.split())
    return bool(compact) and all(c.isdigit() and c.isascii() for c in compact)


@dataclass(frozen=True)
class Post:
    """One forum message with course/area provenance and optional gold labels."""

    post_id: str
    course_id: str
    area: Area
    text: str
    gold: Optional[LabelVector] = None

    def __post_init__(self):
        if not self.post_id:
            raise ValidationError("post_id must be non-empty")
        stripped = self.text.strip()
        if not stripped:
            raise ValidationError(f"post {self.post_id!r}: text is empty after trimming")
        if _is_digits_only(stripped):
            raise ValidationError(f"post {self.post_id!r}: text contains only numeric characters")
        object.__setattr__(self, "text", stripped)


@dataclass(frozen=True)
class RawAnnotation:
    """Annotator output before binarization: three binary flags, three 1..7 ratings."""

    opinion: int
    question: int
    answer: int
    sentiment: int
    confusion: int
    urgency: int

    def __post_init__(self):
        for name in BINARY_RAW:
            value = getattr(self, name)
            if value not in (0, 1):
                raise ValidationError(f"{name} must be 0 or 1, got {value!r}")
        for name in ORDINAL_RAW:
            value = getattr(self, name)
            if not (isinstance(value, int) and ORDINAL_MIN <= value <= ORDINAL_MAX):
                raise ValidationError(
                    f"{name} must be an integer in {ORDINAL_MIN}..{ORDINAL_MAX}, got {value!r}"
                )


def binarize(raw: RawAnnotation, schema: DimensionSchema) -> LabelVector:
    """Collapse a raw annotation onto six binary labels.

    Binary fields pass through unchanged; ordinal fields map to 1 when the
    rating is at or above ``schema.ordinal_threshold`` (default 4), else 0.
    """
    labels = []
    for dim in schema.dimensions:
        value = getattr(raw, dim.name)
        if dim.raw_scale == "binary":
            labels.append(value)
        else:
            labels.append(1 if value >= schema.ordinal_threshold else 0)
    return LabelVector(tuple(labels))


@dataclass(frozen=True)
class DatasetSplit:
    """A named train/test partition of post ids."""

    name: str
    train: tuple[str, ...]
    test: tuple[str, ...]
    configuration: str  # "intracourse" | "intradomain" | "crossdomain"

    def __post_init__(self):
        if not self.train or not self.test:
            raise ValidationError(f"split {self.name!r}: train and test must both be non-empty")
        overlap = set(self.train) & set(self.test)
        if overlap:
            raise ValidationError(f"split {self.name!r}: train and test overlap on {sorted(overlap)[:5]}")
