"""Engine state: post states, the referral queue, and the feedback log.

The store mutates only through :meth:`StateStore.apply`, which consumes
event records.  Live processing and log replay therefore run the exact
same code, and identical event sequences yield identical stores.
"""
from __future__ import annotations

import enum
import hashlib
import json
import os
from dataclasses import dataclass, field

from ..core.types import LabelVector
from ..errors import ConflictError, NotFoundError, ValidationError
from ..fusion.types import FusedVerdict
from .kb import ComposedResponse


class PostStatus(enum.Enum):
    NEW = "New"
    RESPONDED = "Responded"
    REFERRED = "Referred"
    RESOLVED = "Resolved"


@dataclass(frozen=True)
class Resolution:
    labels: LabelVector
    response: str
    resolved_at: float

    def to_dict(self) -> dict:
        return {
            "labels": list(self.labels),
            "response": self.response,
            "resolved_at": self.resolved_at,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Resolution":
        return cls(
            labels=LabelVector(labels=tuple(int(v) for v in data["labels"])),
            response=data["response"],
            resolved_at=data["resolved_at"],
        )


@dataclass(frozen=True)
class PostState:
    post_id: str
    status: PostStatus
    verdict: FusedVerdict | None
    priority: float
    confidence: float
    response: ComposedResponse | None = None
    reason: str | None = None
    referral_id: str | None = None
    created_at: float = 0.0
    updated_at: float = 0.0

    def to_dict(self) -> dict:
        return {
            "post_id": self.post_id,
            "status": self.status.value,
            "verdict": self.verdict.to_dict() if self.verdict else None,
            "priority": self.priority,
            "confidence": self.confidence,
            "response": self.response.to_dict() if self.response else None,
            "reason": self.reason,
            "referral_id": self.referral_id,
            "created_at": self.created_at,
            "updated_at": self.updated_at,
        }


@dataclass(frozen=True)
class ReferralItem:
    referral_id: str
    post_id: str
    verdict: FusedVerdict | None
    priority: float
    created_at: float
    seq: int
    reason: str | None = None
    resolution: Resolution | None = None

    @property
    def open(self) -> bool:
        return self.resolution is None

    def to_dict(self) -> dict:
        return {
            "referral_id": self.referral_id,
            "post_id": self.post_id,
            "verdict": self.verdict.to_dict() if self.verdict else None,
            "priority": self.priority,
            "created_at": self.created_at,
            "seq": self.seq,
            "reason": self.reason,
            "resolution": self.resolution.to_dict() if self.resolution else None,
        }


class StateStore:
    """In-memory projection of the event log."""

    def __init__(self):
        self.posts: dict[str, PostState] = {}
        self.referrals: dict[str, ReferralItem] = {}
        self.feedback: list[dict] = []

    # -- event application -------------------------------------------------

    def apply(self, event: dict) -> None:
        handler = {
            "process": self._apply_process,
            "refer": self._apply_refer,
            "resolve": self._apply_resolve,
        }.get(event["type"])
        if handler is None:
            raise ValidationError(f"unknown event type {event['type']!r}")
        handler(event)

    def _apply_process(self, event: dict) -> None:
        post_id = event["post_id"]
        existing = self.posts.get(post_id)
        verdict = FusedVerdict.from_dict(event["verdict"]) if event["verdict"] else None
        response = (
            ComposedResponse.from_dict(event["response"]) if event.get("response") else None
        )
        self.posts[post_id] = PostState(
            post_id=post_id,
            status=PostStatus(event["status"]),
            verdict=verdict,
            priority=event["priority"],
            confidence=event["confidence"],
            response=response,
            reason=event.get("reason"),
            referral_id=event.get("referral_id"),
            created_at=existing.created_at if existing else event["at"],
            updated_at=event["at"],
        )

    def _apply_refer(self, event: dict) -> None:
        post_id = event["post_id"]
        state = self.posts.get(post_id)
        if state is None:
            raise ValidationError(f"refer event for unprocessed post {post_id!r}")
        verdict = FusedVerdict.from_dict(event["verdict"]) if event["verdict"] else None
        self.referrals[event["referral_id"]] = ReferralItem(
            referral_id=event["referral_id"],
            post_id=post_id,
            verdict=verdict,
            priority=event["priority"],
            created_at=event["at"],
            seq=event["seq"],
            reason=event.get("reason"),
        )

    def _apply_resolve(self, event: dict) -> None:
        referral_id = event["referral_id"]
        item = self.referrals.get(referral_id)
        if item is None:
            raise NotFoundError(f"unknown referral {referral_id!r}")
        if item.resolution is not None:
            raise ConflictError(f"referral {referral_id!r} is already resolved")
        resolution = Resolution(
            labels=LabelVector(labels=tuple(int(v) for v in event["labels"])),
            response=event["response"],
            resolved_at=event["at"],
        )
        self.referrals[referral_id] = ReferralItem(
            referral_id=item.referral_id,
            post_id=item.post_id,
            verdict=item.verdict,
            priority=item.priority,
            created_at=item.created_at,
            seq=item.seq,
            reason=item.reason,
            resolution=resolution,
        )
        state = self.posts[item.post_id]
        self.posts[item.post_id] = PostState(
            post_id=state.post_id,
            status=PostStatus.RESOLVED,
            verdict=state.verdict,
            priority=state.priority,
            confidence=state.confidence,
            response=state.response,
            reason=state.reason,
            referral_id=referral_id,
            created_at=state.created_at,
            updated_at=event["at"],
        )
        self.feedback.append(
            {
                "post_id": item.post_id,
                "labels": list(resolution.labels),
                "response": resolution.response,
                "resolved_at": event["at"],
            }
        )

    # -- queries -------------------------------------------------------------

    def open_referrals(self) -> list[ReferralItem]:
        """Open items, highest priority first; older item wins ties."""
        items = [r for r in self.referrals.values() if r.open]
        return sorted(items, key=lambda r: (-r.priority, r.seq))

    def status_counts(self) -> dict[str, int]:
        counts = {status.value: 0 for status in PostStatus}
        for state in self.posts.values():
            counts[state.status.value] += 1
        return counts

    # -- serialization ---------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "posts": {pid: s.to_dict() for pid, s in sorted(self.posts.items())},
            "referrals": {rid: r.to_dict() for rid, r in sorted(self.referrals.items())},
            "feedback": self.feedback,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    def state_hash(self) -> str:
        return hashlib.sha256(self.to_json().encode("utf-8")).hexdigest()

    def save(self, path: str | os.PathLike) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json())
            fh.write("\n")
