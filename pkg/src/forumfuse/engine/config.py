"""Curation engine configuration."""
from __future__ import annotations

from dataclasses import dataclass, field

from ..core.schema import DIMENSION_NAMES
from ..errors import ValidationError
from ..fusion.rules import CONFIDENCE_POLICIES, DEFAULT_CONFIDENCE_POLICY
from ..fusion.types import FusionRule, RuleKind

# Dimension weights in schema order; urgency dominates, opinion barely counts.
DEFAULT_PRIORITY_WEIGHTS = (0.25, 2.0, 1.0, 0.5, 4.0, 8.0)

# Referrals may target at most this share of processed posts by default.
DEFAULT_REFERRAL_GOAL = 0.02

# Confidence never reads as exactly zero, so threshold 0 responds to
# everything while threshold 1 refers everything (comparison is strict >).
CONFIDENCE_FLOOR = 1e-9

_RESPONSE_MODES = ("kb-only", "llm-generate")


@dataclass(frozen=True)
class EngineConfig:
    threshold: float = 0.8
    confidence_policy: str = DEFAULT_CONFIDENCE_POLICY
    rule: FusionRule = field(default_factory=lambda: FusionRule(kind=RuleKind.PRODUCT))
    provider_ids: tuple[str, ...] = ()
    referral_goal: float = DEFAULT_REFERRAL_GOAL
    priority_weights: tuple[float, ...] = DEFAULT_PRIORITY_WEIGHTS
    response_mode: str = "kb-only"

    def __post_init__(self):
        if not 0.0 <= self.threshold <= 1.0:
            raise ValidationError(f"threshold must lie in [0, 1], got {self.threshold}")
        if not 0.0 < self.referral_goal < 1.0:
            raise ValidationError(f"referral_goal must lie in (0, 1), got {self.referral_goal}")
        if self.confidence_policy not in CONFIDENCE_POLICIES:
            raise ValidationError(
                f"unknown confidence policy {self.confidence_policy!r}; "
                f"expected one of {sorted(CONFIDENCE_POLICIES)}"
            )
        if len(self.priority_weights) != len(DIMENSION_NAMES):
            raise ValidationError(
                f"priority_weights needs {len(DIMENSION_NAMES)} entries, "
                f"got {len(self.priority_weights)}"
            )
        for name, w in zip(DIMENSION_NAMES, self.priority_weights):
            if not (isinstance(w, (int, float)) and w >= 0):
                raise ValidationError(f"priority weight for {name!r} must be >= 0, got {w!r}")
        if self.response_mode not in _RESPONSE_MODES:
            raise ValidationError(
                f"unknown response_mode {self.response_mode!r}; expected one of {_RESPONSE_MODES}"
            )

    def to_dict(self) -> dict:
        return {
            "threshold": self.threshold,
            "confidence_policy": self.confidence_policy,
            "rule": {"kind": self.rule.kind.value, "epsilon_floor": self.rule.epsilon_floor},
            "provider_ids": list(self.provider_ids),
            "referral_goal": self.referral_goal,
            "priority_weights": list(self.priority_weights),
            "response_mode": self.response_mode,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "EngineConfig":
        kwargs = dict(data)
        rule = kwargs.pop("rule", None)
        if isinstance(rule, str):
            kwargs["rule"] = FusionRule.parse(rule)
        elif isinstance(rule, dict):
            kwargs["rule"] = FusionRule(
                kind=FusionRule.parse(rule["kind"]).kind,
                epsilon_floor=rule.get("epsilon_floor", 1e-6),
            )
        elif rule is not None:
            kwargs["rule"] = rule
        for key in ("provider_ids", "priority_weights"):
            if key in kwargs:
                kwargs[key] = tuple(kwargs[key])
        return cls(**kwargs)
