"""Replay previously computed scores from a file.

Lets fusion experiments rerun offline: whatever a provider emitted once
(local model, LLM, mock) can be stored and served back without the
original provider.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

from ..core.types import Post
from ..errors import ForumFuseError, ProviderUnavailableError, ValidationError
from ..fusion.types import ScoreBlock
from .base import ProviderDescriptor
from .scorefile import iter_score_lines


@dataclass(frozen=True)
class ReplayIssue:
    line: int
    message: str


@dataclass
class ReplayResult:
    scores: dict[str, ScoreBlock] = field(default_factory=dict)
    rejections: list[ReplayIssue] = field(default_factory=list)
    replaced: list[ReplayIssue] = field(default_factory=list)


def replay_scores(path: str | os.PathLike) -> ReplayResult:
    """Load a score file into a post_id -> ScoreBlock map.

    Bad records are skipped and reported with their line number; a
    repeated (post_id, provider_id) pair keeps the last record seen and
    logs the replacement.  An empty file yields an empty map.
    """
    result = ReplayResult()
    origin: dict[str, tuple[int, str]] = {}
    for lineno, line in iter_score_lines(path):
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            result.rejections.append(ReplayIssue(lineno, f"invalid JSON: {exc}"))
            continue
        try:
            block = _parse_record(record)
            post_id = record["post_id"]
        except (ForumFuseError, KeyError, TypeError) as exc:
            result.rejections.append(ReplayIssue(lineno, f"bad record: {exc}"))
            continue
        if post_id in origin:
            prev_line, prev_provider = origin[post_id]
            kind = (
                "duplicate"
                if prev_provider == block.provider_id
                else f"provider {prev_provider!r} overridden by {block.provider_id!r}"
            )
            result.replaced.append(
                ReplayIssue(lineno, f"{kind} for post {post_id!r}; line {prev_line} discarded")
            )
        origin[post_id] = (lineno, block.provider_id)
        result.scores[post_id] = block
    return result


def _parse_record(record: dict) -> ScoreBlock:
    if not isinstance(record, dict):
        raise ValidationError("record is not an object")
    post_id = record["post_id"]
    provider_id = record["provider_id"]
    scores = record["scores"]
    if not isinstance(post_id, str) or not post_id:
        raise ValidationError("post_id must be a non-empty string")
    if not isinstance(provider_id, str) or not provider_id:
        raise ValidationError("provider_id must be a non-empty string")
    return ScoreBlock.from_lists(provider_id, scores)


class ReplayProvider:
    """Serves recorded ScoreBlocks by post id."""

    def __init__(self, scores: dict[str, ScoreBlock], provider_id: str = "replay"):
        self.provider_id = provider_id
        self._scores = dict(scores)

    @classmethod
    def from_file(cls, path: str | os.PathLike, provider_id: str = "replay") -> "ReplayProvider":
        return cls(replay_scores(path).scores, provider_id=provider_id)

    def __len__(self) -> int:
        return len(self._scores)

    def score(self, post: Post) -> ScoreBlock:
        try:
            block = self._scores[post.post_id]
        except KeyError:
            raise ProviderUnavailableError(
                f"no recorded scores for post {post.post_id!r}"
            ) from None
        # Reattach under this provider's id so ensembles stay addressable
        # even when the file was produced elsewhere.
        if block.provider_id == self.provider_id:
            return block
        return ScoreBlock(provider_id=self.provider_id, per_dimension=block.per_dimension)


def _build_replay(descriptor: ProviderDescriptor) -> ReplayProvider:
    cfg = dict(descriptor.config)
    path = cfg.pop("path", None)
    if not path:
        raise ValidationError("replay provider needs a path")
    if cfg:
        raise ValidationError(f"unknown replay provider options: {sorted(cfg)}")
    return ReplayProvider.from_file(path, provider_id=descriptor.provider_id)
