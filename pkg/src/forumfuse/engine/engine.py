"""Curation engine: score, fuse, threshold, then respond or refer.

Each incoming post is scored by every configured provider, the blocks
are fused, and the verdict's confidence decides the path: strictly above
the threshold the engine answers from the knowledge base; otherwise the
post joins the tutor referral queue.  Every decision is appended to the
event log, so replaying the log reproduces the store bit for bit.
"""
from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass
from typing import Callable, Sequence

from ..core.types import LabelVector, Post
from ..errors import ConflictError, ProviderError, ValidationError
from ..fusion.rules import fuse_measurement
from ..fusion.types import FusedVerdict, ScoreBlock
from .config import CONFIDENCE_FLOOR, EngineConfig
from .events import EventLog, read_events
from .kb import ComposedResponse, KnowledgeBase
from .state import PostState, PostStatus, ReferralItem, StateStore


def compute_priority(verdict: FusedVerdict, weights: Sequence[float]) -> float:
    """Weighted sum of each dimension's fused probability of class 1."""
    if len(weights) != len(verdict.per_dimension):
        raise ValidationError(
            f"got {len(weights)} weights for {len(verdict.per_dimension)} dimensions"
        )
    return sum(w * d.fused.probs[1] for w, d in zip(weights, verdict.per_dimension))


@dataclass(frozen=True)
class CurationReport:
    processed: int
    status_counts: dict
    referred_ever: int
    referral_rate: float
    flagged_posts: int
    flagged_referral_rate: float
    referral_goal: float
    goal_met: bool
    fallback_responses: int
    elapsed_s: float
    posts_per_s: float

    def to_dict(self) -> dict:
        return {
            "processed": self.processed,
            "status_counts": self.status_counts,
            "referred_ever": self.referred_ever,
            "referral_rate": self.referral_rate,
            "flagged_posts": self.flagged_posts,
            "flagged_referral_rate": self.flagged_referral_rate,
            "referral_goal": self.referral_goal,
            "goal_met": self.goal_met,
            "fallback_responses": self.fallback_responses,
            "throughput": {
                "posts": self.processed,
                "elapsed_s": self.elapsed_s,
                "posts_per_s": self.posts_per_s,
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))


class CurationEngine:
    """Single-writer state machine over posts, providers, and the KB."""

    def __init__(
        self,
        config: EngineConfig,
        providers: Sequence,
        kb: KnowledgeBase | None = None,
        event_log: EventLog | None = None,
        store: StateStore | None = None,
        clock: Callable[[], float] = time.time,
    ):
        if config.response_mode != "kb-only":
            raise ValidationError(
                f"response_mode {config.response_mode!r} is reserved; only 'kb-only' is implemented"
            )
        self.config = config
        self.providers = list(providers)
        self.kb = kb if kb is not None else KnowledgeBase()
        self.log = event_log if event_log is not None else EventLog()
        self.store = store if store is not None else StateStore()
        self.clock = clock

    # -- processing --------------------------------------------------------

    def _gather_blocks(self, post: Post) -> list[ScoreBlock]:
        blocks = []
        for provider in self.providers:
            try:
                blocks.append(provider.score(post))
            except ProviderError:
                continue
        return blocks

    def process_post(self, post: Post) -> PostState:
        existing = self.store.posts.get(post.post_id)
        if existing is not None and existing.status is PostStatus.REFERRED:
            raise ConflictError(
                f"post {post.post_id!r} has an open referral; resolve it before reprocessing"
            )
        now = self.clock()
        blocks = self._gather_blocks(post)
        if not blocks:
            return self._refer(post, now, verdict=None, priority=0.0,
                               confidence=0.0, reason="no-scores")
        verdict = fuse_measurement(
            blocks, self.config.rule, confidence_policy=self.config.confidence_policy
        )
        confidence = max(verdict.confidence, CONFIDENCE_FLOOR)
        priority = compute_priority(verdict, self.config.priority_weights)
        if confidence > self.config.threshold:
            return self._respond(post, now, verdict, priority, confidence)
        return self._refer(post, now, verdict=verdict, priority=priority,
                           confidence=confidence, reason="low-confidence")

    def _respond(
        self, post: Post, now: float, verdict: FusedVerdict, priority: float, confidence: float
    ) -> PostState:
        response = self.kb.compose(
            post.course_id, verdict.labels, self.config.priority_weights
        )
        event = self.log.append(now, "process", {
            "post_id": post.post_id,
            "status": PostStatus.RESPONDED.value,
            "verdict": verdict.to_dict(),
            "priority": priority,
            "confidence": confidence,
            "response": response.to_dict(),
            "reason": "kb-fallback" if response.is_fallback else None,
            "referral_id": None,
        })
        self.store.apply(event)
        return self.store.posts[post.post_id]

    def _refer(
        self,
        post: Post,
        now: float,
        verdict: FusedVerdict | None,
        priority: float,
        confidence: float,
        reason: str,
    ) -> PostState:
        referral_id = f"ref-{self.log.last_seq + 1}"
        verdict_dict = verdict.to_dict() if verdict else None
        process_event = self.log.append(now, "process", {
            "post_id": post.post_id,
            "status": PostStatus.REFERRED.value,
            "verdict": verdict_dict,
            "priority": priority,
            "confidence": confidence,
            "response": None,
            "reason": reason,
            "referral_id": referral_id,
        })
        self.store.apply(process_event)
        refer_event = self.log.append(now, "refer", {
            "post_id": post.post_id,
            "referral_id": referral_id,
            "verdict": verdict_dict,
            "priority": priority,
            "reason": reason,
        })
        self.store.apply(refer_event)
        return self.store.posts[post.post_id]

    # -- referral resolution -------------------------------------------------

    def resolve_referral(
        self, referral_id: str, tutor_labels: LabelVector, tutor_response: str
    ) -> PostState:
        if not tutor_response or not tutor_response.strip():
            raise ValidationError("tutor response must be non-empty")
        # Validate before logging so the event log never holds a bad resolve.
        item = self.store.referrals.get(referral_id)
        if item is None:
            from ..errors import NotFoundError

            raise NotFoundError(f"unknown referral {referral_id!r}")
        if not item.open:
            raise ConflictError(f"referral {referral_id!r} is already resolved")
        event = self.log.append(self.clock(), "resolve", {
            "referral_id": referral_id,
            "labels": list(tutor_labels),
            "response": tutor_response,
        })
        self.store.apply(event)
        return self.store.posts[item.post_id]

    def open_referrals(self) -> list[ReferralItem]:
        return self.store.open_referrals()

    # -- reporting ----------------------------------------------------------

    def report(self) -> CurationReport:
        return build_report(self.store, self.config)


def build_report(store: StateStore, config: EngineConfig) -> CurationReport:
    states = list(store.posts.values())
    processed = len(states)
    counts = store.status_counts()
    referred_ever = sum(
        1 for s in states if s.status in (PostStatus.REFERRED, PostStatus.RESOLVED)
    )
    rate = referred_ever / processed if processed else 0.0
    # Alternative denominator: posts that actually flagged a condition
    # (any positive fused label, or no scores at all).
    flagged = [
        s for s in states
        if s.verdict is None or any(v == 1 for v in s.verdict.labels)
    ]
    flagged_referred = sum(
        1 for s in flagged if s.status in (PostStatus.REFERRED, PostStatus.RESOLVED)
    )
    flagged_rate = flagged_referred / len(flagged) if flagged else 0.0
    fallbacks = sum(1 for s in states if s.response is not None and s.response.is_fallback)
    if states:
        start = min(s.created_at for s in states)
        end = max(s.updated_at for s in states)
        elapsed = max(end - start, 0.0)
    else:
        elapsed = 0.0
    return CurationReport(
        processed=processed,
        status_counts=counts,
        referred_ever=referred_ever,
        referral_rate=rate,
        flagged_posts=len(flagged),
        flagged_referral_rate=flagged_rate,
        referral_goal=config.referral_goal,
        goal_met=rate < config.referral_goal,
        fallback_responses=fallbacks,
        elapsed_s=elapsed,
        posts_per_s=processed / elapsed if elapsed > 0 else 0.0,
    )


def replay_event_log(path: str | os.PathLike) -> StateStore:
    """Rebuild a state store purely from a persisted event log."""
    store = StateStore()
    for event in read_events(path):
        store.apply(event)
    return store
