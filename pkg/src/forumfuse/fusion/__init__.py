"""Score fusion: combination rules over per-provider class distributions."""

from forumfuse.fusion.types import (
    DimensionVerdict,
    FusedVerdict,
    FusionRule,
    PriorVector,
    RuleKind,
    ScoreBlock,
    ScoreVector,
    check_distribution,
    validate_blocks,
)
from forumfuse.fusion.rules import (
    CONFIDENCE_POLICIES,
    DEFAULT_CONFIDENCE_POLICY,
    combine_scores,
    fuse_abstract,
    fuse_measurement,
    fuse_rank,
    resolve_confidence_policy,
)

__all__ = [
    "CONFIDENCE_POLICIES",
    "DEFAULT_CONFIDENCE_POLICY",
    "DimensionVerdict",
    "FusedVerdict",
    "FusionRule",
    "PriorVector",
    "RuleKind",
    "ScoreBlock",
    "ScoreVector",
    "check_distribution",
    "combine_scores",
    "fuse_abstract",
    "fuse_measurement",
    "fuse_rank",
    "resolve_confidence_policy",
    "validate_blocks",
]
