"""Corpus ingestion from delimiter-separated files.

A format profile maps logical fields onto the columns of a concrete export.
Three profiles are built in:

* ``standard``        - raw annotations: binary opinion/question/answer plus
                        1..7 sentiment/confusion/urgency.
* ``standard-binary`` - all six label columns already binarized (the format
                        :func:`write_corpus` emits, so ingest/serialize round-trips).
* ``unlabeled``       - no label columns at all.

Custom profiles (e.g. for a vendor export with different headers) can be
registered programmatically or loaded from a JSON file, so no code change is
needed to ingest a differently-shaped file.
"""
from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

from forumfuse.core.schema import DIMENSION_NAMES, DimensionSchema, parse_area
from forumfuse.core.types import LabelVector, Post, RawAnnotation, binarize
from forumfuse.errors import SchemaError, ValidationError

logger = logging.getLogger(__name__)

CORE_FIELDS = ("post_id", "course", "area", "text")


@dataclass(frozen=True)
class FormatProfile:
    """Column mapping for one file layout.

    ``columns`` maps logical field names (post_id, course, area, text and the
    six dimension names) to header names in the file. ``label_mode`` is
    ``"raw"`` (binary + 1..7 ordinals), ``"binary"`` (all six already 0/1) or
    ``"none"`` (unlabeled).
    """

    name: str
    columns: dict[str, str]
    label_mode: str = "raw"
    delimiter: str = ","

    def __post_init__(self):
        if self.label_mode not in ("raw", "binary", "none"):
            raise ValidationError(f"profile {self.name!r}: bad label_mode {self.label_mode!r}")
        missing = [f for f in CORE_FIELDS if f not in self.columns]
        if missing:
            raise ValidationError(f"profile {self.name!r}: missing column mappings for {missing}")
        if self.label_mode != "none":
            missing = [d for d in DIMENSION_NAMES if d not in self.columns]
            if missing:
                raise ValidationError(f"profile {self.name!r}: missing label columns for {missing}")


def _identity_columns(with_labels: bool) -> dict[str, str]:
    cols = {f: f for f in CORE_FIELDS}
    if with_labels:
        cols.update({d: d for d in DIMENSION_NAMES})
    return cols


_PROFILES: dict[str, FormatProfile] = {}


def register_profile(profile: FormatProfile) -> None:
    _PROFILES[profile.name] = profile


def get_profile(name: str) -> FormatProfile:
    try:
        return _PROFILES[name]
    except KeyError:
        raise SchemaError(f"unknown format profile {name!r}; registered: {sorted(_PROFILES)}") from None


def load_profiles(path: str | Path) -> list[str]:
    """Register profiles from a JSON file: a list of profile objects."""
    with open(path, encoding="utf-8") as fh:
        entries = json.load(fh)
    names = []
    for entry in entries:
        profile = FormatProfile(
            name=entry["name"],
            columns=dict(entry["columns"]),
            label_mode=entry.get("label_mode", "raw"),
            delimiter=entry.get("delimiter", ","),
        )
        register_profile(profile)
        names.append(profile.name)
    return names


register_profile(FormatProfile(name="standard", columns=_identity_columns(True), label_mode="raw"))
register_profile(FormatProfile(name="standard-binary", columns=_identity_columns(True), label_mode="binary"))
register_profile(FormatProfile(name="unlabeled", columns=_identity_columns(False), label_mode="none"))


@dataclass
class IngestReport:
    """Per-group label tallies plus a record of every rejected row.

    ``counts`` is keyed by group name (``total``, ``course:<id>``,
    ``area:<name>``), then dimension name, then ``{"no": n, "yes": n}``.
    The course- and area-level groups are reported independently and are not
    reconciled against each other (a single-course area repeats its row).
    """

    counts: dict[str, dict[str, dict[str, int]]] = field(default_factory=dict)
    total_posts: int = 0
    labeled_posts: int = 0
    rejected_rows: int = 0
    rejection_reasons: dict[str, int] = field(default_factory=dict)
    rejections: list[dict] = field(default_factory=list)

    def _group(self, key: str) -> dict[str, dict[str, int]]:
        return self.counts.setdefault(
            key, {d: {"no": 0, "yes": 0} for d in DIMENSION_NAMES}
        )

    def record_post(self, post: Post) -> None:
        self.total_posts += 1
        if post.gold is None:
            return
        self.labeled_posts += 1
        for group in ("total", f"course:{post.course_id}", f"area:{post.area.value}"):
            tallies = self._group(group)
            for dim, label in zip(DIMENSION_NAMES, post.gold):
                tallies[dim]["yes" if label else "no"] += 1

    def record_rejection(self, line: int, reason: str, detail: str = "") -> None:
        self.rejected_rows += 1
        self.rejection_reasons[reason] = self.rejection_reasons.get(reason, 0) + 1
        self.rejections.append({"line": line, "reason": reason, "detail": detail})

    def to_dict(self) -> dict:
        return {
            "schema_version": "1",
            "total_posts": self.total_posts,
            "labeled_posts": self.labeled_posts,
            "counts": self.counts,
            "rejected_rows": self.rejected_rows,
            "rejection_reasons": self.rejection_reasons,
            "rejections": self.rejections,
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True)


def _parse_binary(value: str, name: str) -> int:
    value = value.strip()
    if value in ("0", "1"):
        return int(value)
    raise ValidationError(f"{name} must be 0 or 1, got {value!r}")


def _parse_ordinal(value: str, name: str) -> int:
    value = value.strip()
    try:
        number = int(value)
    except ValueError:
        raise ValidationError(f"{name} must be an integer 1..7, got {value!r}") from None
    return number  # range-checked by RawAnnotation


def _row_labels(row: dict[str, str], profile: FormatProfile, schema: DimensionSchema) -> Optional[LabelVector]:
    if profile.label_mode == "none":
        return None
    values = {}
    for dim in DIMENSION_NAMES:
        cell = row[profile.columns[dim]]
        if profile.label_mode == "binary":
            values[dim] = _parse_binary(cell, dim)
        else:
            if dim in ("opinion", "question", "answer"):
                values[dim] = _parse_binary(cell, dim)
            else:
                values[dim] = _parse_ordinal(cell, dim)
    if profile.label_mode == "binary":
        return LabelVector(tuple(values[d] for d in DIMENSION_NAMES))
    return binarize(RawAnnotation(**values), schema)


def ingest_corpus(
    path: str | Path,
    format_profile: str | FormatProfile = "standard",
    schema: DimensionSchema | None = None,
) -> tuple[list[Post], IngestReport]:
    """Read a delimited file into validated posts plus a tally report.

    Unparseable rows are recorded in the report and skipped; the ingest never
    aborts on a bad row. A header missing a mapped column is a
    :class:`SchemaError`, since the whole file would be unusable.
    """
    schema = schema or DimensionSchema()
    profile = get_profile(format_profile) if isinstance(format_profile, str) else format_profile
    path = Path(path)
    if not path.exists():
        raise SchemaError(f"corpus file not found: {path}")

    posts: list[Post] = []
    report = IngestReport()
    seen_ids: set[str] = set()

    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh, delimiter=profile.delimiter)
        if reader.fieldnames is None:
            raise SchemaError(f"{path}: file is empty, expected a header row")
        required = set(profile.columns.values())
        missing = sorted(required - set(reader.fieldnames))
        if missing:
            raise SchemaError(f"{path}: header is missing required columns {missing}")

        for row in reader:
            line = reader.line_num
            try:
                if any(row.get(col) is None for col in required):
                    raise ValidationError("row has fewer cells than the header")
                gold = _row_labels(row, profile, schema)
                post = Post(
                    post_id=row[profile.columns["post_id"]].strip(),
                    course_id=row[profile.columns["course"]].strip(),
                    area=parse_area(row[profile.columns["area"]]),
                    text=row[profile.columns["text"]],
                    gold=gold,
                )
                if post.post_id in seen_ids:
                    raise ValidationError(f"duplicate post_id {post.post_id!r}")
            except ValidationError as exc:
                report.record_rejection(line, _reason_of(exc), str(exc))
                logger.warning("%s line %d: skipping row (%s)", path.name, line, exc)
                continue
            seen_ids.add(post.post_id)
            posts.append(post)
            report.record_post(post)

    return posts, report


def _reason_of(exc: ValidationError) -> str:
    message = str(exc)
    if "numeric characters" in message:
        return "digits-only"
    if "empty after trimming" in message:
        return "empty-text"
    if "duplicate post_id" in message:
        return "duplicate-id"
    if "area" in message:
        return "bad-area"
    if "fewer cells" in message:
        return "short-row"
    return "bad-label"


def write_corpus(posts: Iterable[Post], path: str | Path, delimiter: str = ",") -> None:
    """Serialize posts in the ``standard-binary`` layout (labels already 0/1)."""
    posts = list(posts)
    fieldnames = list(CORE_FIELDS) + list(DIMENSION_NAMES)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fieldnames, delimiter=delimiter)
        writer.writeheader()
        for post in posts:
            row = {
                "post_id": post.post_id,
                "course": post.course_id,
                "area": post.area.value,
                "text": post.text,
            }
            if post.gold is None:
                raise ValidationError(
                    f"post {post.post_id!r} has no labels; unlabeled corpora cannot "
                    "be written in the standard-binary layout"
                )
            row.update({d: str(v) for d, v in zip(DIMENSION_NAMES, post.gold)})
            writer.writerow(row)
