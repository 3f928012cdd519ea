"""Synthetic score providers for testing and calibration studies.

These providers fabricate per-dimension distributions from gold labels
(or from nothing at all), which makes them useful as ensemble stand-ins
when exercising fusion rules and the curation pipeline end to end.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field

from ..core.schema import DEFAULT_SCHEMA, DimensionSchema
from ..core.types import Post
from ..errors import ValidationError
from ..fusion.types import ScoreBlock, ScoreVector
from .base import ProviderDescriptor

_MODES = ("oracle", "noisy", "fixed", "uniform")


def _two_class(p_yes: float) -> ScoreVector:
    return ScoreVector(probs=(1.0 - p_yes, p_yes))


@dataclass
class MockProvider:
    """Deterministic fake scorer.

    Modes:
      oracle   - puts `confidence` mass on the gold class of every dimension.
      noisy    - flips the gold label with probability `flip_prob` per
                 (post, dimension), then reports a confidence drawn from
                 `conf_correct` when the emitted label matches gold and
                 from `conf_wrong` when it does not.  Miscalibrated on
                 purpose: wrong answers come with lower confidence, which
                 is what lets product fusion recover from them.
      fixed    - emits the same `scores` row for every post.
      uniform  - emits a flat distribution for every dimension.

    Randomness is keyed by (seed, provider_id, post_id, dimension), so
    scoring is reproducible and independent of call order.
    """

    provider_id: str
    mode: str = "oracle"
    confidence: float = 0.9
    flip_prob: float = 0.2
    conf_correct: tuple[float, float] = (0.7, 0.95)
    conf_wrong: tuple[float, float] = (0.5, 0.75)
    seed: int = 0
    scores: tuple[tuple[float, ...], ...] | None = None
    schema: DimensionSchema = field(default_factory=lambda: DEFAULT_SCHEMA)

    def __post_init__(self):
        if self.mode not in _MODES:
            raise ValidationError(f"unknown mock mode {self.mode!r}; expected one of {_MODES}")
        if not 0.5 < self.confidence <= 1.0:
            raise ValidationError("mock confidence must lie in (0.5, 1.0]")
        if not 0.0 <= self.flip_prob <= 1.0:
            raise ValidationError("flip_prob must lie in [0, 1]")
        for name, band in (("conf_correct", self.conf_correct), ("conf_wrong", self.conf_wrong)):
            lo, hi = band
            if not 0.5 <= lo <= hi <= 1.0:
                raise ValidationError(f"{name} must satisfy 0.5 <= lo <= hi <= 1.0, got {band}")
        if self.mode == "fixed":
            if self.scores is None or len(self.scores) != len(self.schema.dimensions):
                raise ValidationError(
                    "fixed mode needs one score row per dimension"
                )

    def _rng(self, post_id: str, dim: str) -> random.Random:
        return random.Random(f"{self.seed}:{self.provider_id}:{post_id}:{dim}")

    def _gold(self, post: Post) -> tuple[int, ...]:
        if post.gold is None:
            raise ValidationError(
                f"mock mode {self.mode!r} needs gold labels, post {post.post_id!r} has none"
            )
        return tuple(post.gold)

    def score(self, post: Post) -> ScoreBlock:
        dims = [d.name for d in self.schema.dimensions]
        if self.mode == "uniform":
            vecs = [ScoreVector(probs=(0.5, 0.5)) for _ in dims]
        elif self.mode == "fixed":
            assert self.scores is not None
            vecs = [ScoreVector(probs=tuple(row)) for row in self.scores]
        elif self.mode == "oracle":
            gold = self._gold(post)
            vecs = [
                _two_class(self.confidence if g == 1 else 1.0 - self.confidence)
                for g in gold
            ]
        else:  # noisy
            gold = self._gold(post)
            vecs = []
            for dim, g in zip(dims, gold):
                rng = self._rng(post.post_id, dim)
                flipped = rng.random() < self.flip_prob
                emitted = 1 - g if flipped else g
                band = self.conf_wrong if flipped else self.conf_correct
                conf = rng.uniform(*band)
                vecs.append(_two_class(conf if emitted == 1 else 1.0 - conf))
        return ScoreBlock(provider_id=self.provider_id, per_dimension=tuple(vecs))


def _build_mock(descriptor: ProviderDescriptor) -> MockProvider:
    cfg = dict(descriptor.config)
    scores = cfg.pop("scores", None)
    if scores is not None:
        scores = tuple(tuple(float(x) for x in row) for row in scores)
    for key in ("conf_correct", "conf_wrong"):
        if key in cfg:
            cfg[key] = tuple(float(x) for x in cfg[key])
    return MockProvider(provider_id=descriptor.provider_id, scores=scores, **cfg)
