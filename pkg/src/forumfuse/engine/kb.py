"""Knowledge base of canned responses keyed by (course, dimension, label).

Response text only ever comes from these templates or the registered
fallback, so every automated reply is auditable down to its entry id.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass
from typing import Iterable, Sequence

from ..core.schema import DIMENSION_NAMES
from ..errors import ValidationError

WILDCARD_COURSE = "*"

DEFAULT_FALLBACK_TEXT = (
    "Thanks for posting. A member of the course team will review this thread."
)


@dataclass(frozen=True)
class KbEntry:
    kb_id: str
    course_id: str
    dimension: str
    label: int
    template_text: str
    complement_text: str | None = None

    def __post_init__(self):
        if not self.kb_id:
            raise ValidationError("kb_id must be non-empty")
        if not self.course_id:
            raise ValidationError(f"entry {self.kb_id!r}: course_id must be non-empty (use '*' for any)")
        if self.dimension not in DIMENSION_NAMES:
            raise ValidationError(
                f"entry {self.kb_id!r}: unknown dimension {self.dimension!r}"
            )
        if self.label not in (0, 1):
            raise ValidationError(f"entry {self.kb_id!r}: label must be 0 or 1")
        if not self.template_text:
            raise ValidationError(f"entry {self.kb_id!r}: template_text must be non-empty")

    @property
    def specificity(self) -> int:
        """0 = exact course entry, 1 = wildcard; lower wins."""
        return 1 if self.course_id == WILDCARD_COURSE else 0

    def matches(self, course_id: str, labels: Sequence[int]) -> bool:
        if self.course_id not in (WILDCARD_COURSE, course_id):
            return False
        dim_index = DIMENSION_NAMES.index(self.dimension)
        return labels[dim_index] == self.label


@dataclass(frozen=True)
class ComposedResponse:
    text: str
    provenance: tuple[str, ...]

    @property
    def is_fallback(self) -> bool:
        return any(tag.startswith("fallback:") for tag in self.provenance)

    def to_dict(self) -> dict:
        return {"text": self.text, "provenance": list(self.provenance)}

    @classmethod
    def from_dict(cls, data: dict) -> "ComposedResponse":
        return cls(text=data["text"], provenance=tuple(data["provenance"]))


class KnowledgeBase:
    def __init__(self, entries: Iterable[KbEntry] = (), fallback_text: str = DEFAULT_FALLBACK_TEXT):
        self.entries: list[KbEntry] = []
        self._ids: set[str] = set()
        self.fallback_text = fallback_text
        for entry in entries:
            self.add(entry)

    def add(self, entry: KbEntry) -> None:
        if entry.kb_id in self._ids:
            raise ValidationError(f"duplicate kb_id {entry.kb_id!r}")
        self._ids.add(entry.kb_id)
        self.entries.append(entry)

    def __len__(self) -> int:
        return len(self.entries)

    @classmethod
    def from_file(cls, path: str | os.PathLike, fallback_text: str = DEFAULT_FALLBACK_TEXT) -> "KnowledgeBase":
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
        if not isinstance(data, list):
            raise ValidationError("knowledge base file must hold a JSON array of entries")
        entries = []
        for i, raw in enumerate(data):
            try:
                entries.append(KbEntry(
                    kb_id=raw["kb_id"],
                    course_id=raw["course_id"],
                    dimension=raw["dimension"],
                    label=raw["label"],
                    template_text=raw["template_text"],
                    complement_text=raw.get("complement_text"),
                ))
            except (KeyError, TypeError) as exc:
                raise ValidationError(f"knowledge base entry {i}: missing field {exc}") from None
        return cls(entries, fallback_text=fallback_text)

    def best_entry(
        self, course_id: str, labels: Sequence[int], weights: Sequence[float]
    ) -> KbEntry | None:
        """Most applicable entry: exact course first, then the matching
        dimension with the largest priority weight, then lowest kb_id."""
        candidates = [e for e in self.entries if e.matches(course_id, labels)]
        if not candidates:
            return None
        return min(
            candidates,
            key=lambda e: (
                e.specificity,
                -weights[DIMENSION_NAMES.index(e.dimension)],
                e.kb_id,
            ),
        )

    def compose(
        self, course_id: str, labels: Sequence[int], weights: Sequence[float]
    ) -> ComposedResponse:
        entry = self.best_entry(course_id, labels, weights)
        if entry is None:
            return ComposedResponse(
                text=self.fallback_text, provenance=("fallback:generic",)
            )
        parts = [entry.template_text]
        provenance = [f"kb:{entry.kb_id}"]
        if entry.complement_text:
            parts.append(entry.complement_text)
            provenance.append(f"kb:{entry.kb_id}:complement")
        return ComposedResponse(text="\n\n".join(parts), provenance=tuple(provenance))
