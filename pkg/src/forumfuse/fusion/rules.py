"""Combination rules at the three fusion levels.

Measurement level
    ``product`` multiplies the per-class scores of all providers and
    renormalizes; with conditionally independent providers this is the
    Bayesian combination of their posteriors. The product is computed in log
    space after flooring each score at ``epsilon_floor``, so a single hard
    zero from one provider cannot veto a class irrecoverably.
    ``product_prior_corrected`` additionally divides by the class prior
    raised to (L - 1), the textbook correction for the repeated prior factor;
    with uniform priors it coincides with the plain product.
    ``sum``, ``max``, ``min`` and ``median`` are the usual componentwise
    aggregations, renormalized.

Abstract level
    ``majority_vote``: each provider votes its argmax class.

Rank level
    ``borda_count``: each provider ranks classes by descending score; rank r
    (0-based from best) earns (class_count - 1 - r) points, score ties earn
    the mean of the contested rank points.

With a single provider every measurement aggregation is the identity, and
the implementation returns the input scores unchanged (no flooring).
"""
from __future__ import annotations

import math
from collections import Counter
from typing import Callable, Optional, Sequence

from forumfuse.errors import ValidationError
from forumfuse.fusion.types import (
    DimensionVerdict,
    FusedVerdict,
    FusionRule,
    PriorVector,
    RuleKind,
    ScoreBlock,
    ScoreVector,
    validate_blocks,
)

# Rules for which an L=1 ensemble is exactly the identity.
_IDENTITY_AT_ONE = frozenset({
    RuleKind.PRODUCT,
    RuleKind.PRODUCT_PRIOR_CORRECTED,
    RuleKind.SUM,
    RuleKind.MAX,
    RuleKind.MIN,
    RuleKind.MEDIAN,
})


def _argmax(probs: Sequence[float]) -> int:
    # Ties resolve to the lowest class index (class 0 is "no" in the binary schema).
    best = 0
    for j in range(1, len(probs)):
        if probs[j] > probs[best]:
            best = j
    return best


def _normalized(weights: list[float], floor: float) -> list[float]:
    floored = [w if w > floor else floor for w in weights]
    total = math.fsum(floored)
    return [w / total for w in floored]


def _coerce_rule(rule: FusionRule | RuleKind | str) -> FusionRule:
    if isinstance(rule, FusionRule):
        return rule
    if isinstance(rule, RuleKind):
        return FusionRule(kind=rule)
    return FusionRule.parse(rule)


def combine_scores(
    vectors: Sequence[Sequence[float]],
    rule: FusionRule | RuleKind | str,
    prior: Optional[Sequence[float]] = None,
) -> list[float]:
    """Fuse one dimension: L probability vectors of equal length -> one.

    This is the per-dimension kernel underneath :func:`fuse_measurement`;
    inputs are assumed to be valid distributions (use the ScoreBlock layer
    for validated ensembles). ``prior`` is only consulted by the
    prior-corrected product and defaults to uniform.
    """
    L = len(vectors)
    if L == 0:
        from forumfuse.errors import EmptyEnsembleError

        raise EmptyEnsembleError("fusion requires at least one score vector")
    rule = _coerce_rule(rule)
    C = len(vectors[0])
    kind = rule.kind
    eps = rule.epsilon_floor

    if L == 1 and kind in _IDENTITY_AT_ONE:
        return [float(p) for p in vectors[0]]

    if kind in (RuleKind.PRODUCT, RuleKind.PRODUCT_PRIOR_CORRECTED):
        logs = [0.0] * C
        for vec in vectors:
            for j in range(C):
                p = vec[j]
                logs[j] += math.log(p if p > eps else eps)
        if kind is RuleKind.PRODUCT_PRIOR_CORRECTED:
            if prior is None:
                prior = [1.0 / C] * C
            for j in range(C):
                pj = prior[j]
                logs[j] -= (L - 1) * math.log(pj if pj > eps else eps)
        peak = max(logs)
        weights = [math.exp(v - peak) for v in logs]
        total = math.fsum(weights)
        return [w / total for w in weights]

    if kind is RuleKind.SUM:
        agg = [math.fsum(vec[j] for vec in vectors) for j in range(C)]
        return _normalized(agg, eps)

    if kind is RuleKind.MAX:
        agg = [max(vec[j] for vec in vectors) for j in range(C)]
        return _normalized(agg, eps)

    if kind is RuleKind.MIN:
        agg = [min(vec[j] for vec in vectors) for j in range(C)]
        return _normalized(agg, eps)

    if kind is RuleKind.MEDIAN:
        agg = []
        for j in range(C):
            column = sorted(vec[j] for vec in vectors)
            mid = L // 2
            agg.append(column[mid] if L % 2 else (column[mid - 1] + column[mid]) / 2.0)
        return _normalized(agg, eps)

    if kind is RuleKind.MAJORITY_VOTE:
        votes = [0] * C
        for vec in vectors:
            votes[_argmax(vec)] += 1
        return [v / L for v in votes]

    if kind is RuleKind.BORDA_COUNT:
        points = _borda_points(vectors, C)
        total = math.fsum(points)
        return [p / total for p in points]

    raise ValidationError(f"unhandled rule kind {kind!r}")


def _borda_points(vectors: Sequence[Sequence[float]], class_count: int) -> list[float]:
    points = [0.0] * class_count
    for vec in vectors:
        order = sorted(range(class_count), key=lambda j: (-vec[j], j))
        i = 0
        while i < class_count:
            k = i
            while k + 1 < class_count and vec[order[k + 1]] == vec[order[i]]:
                k += 1
            # Ranks i..k are contested; each tied class takes the mean points.
            shared = ((class_count - 1 - i) + (class_count - 1 - k)) / 2.0
            for idx in order[i:k + 1]:
                points[idx] += shared
            i = k + 1
    return points


# --- Confidence policies -------------------------------------------------
#
# The scalar confidence compared against the engine threshold. The policy
# set is small and deliberate:
#   min_dim_max_prob    the weakest dimension gates the post (default)
#   mean_margin         average top-versus-runner-up margin across dimensions
#   intervened_dim_only like the default, but restricted to dimensions whose
#                       fused label is 1 (falls back to all dimensions when
#                       no dimension fires)

ConfidenceFn = Callable[[Sequence[DimensionVerdict]], float]


def min_dim_max_prob(dims: Sequence[DimensionVerdict]) -> float:
    return min(max(d.fused.probs) for d in dims)


def mean_margin(dims: Sequence[DimensionVerdict]) -> float:
    return math.fsum(d.margin for d in dims) / len(dims)


def intervened_dim_only(dims: Sequence[DimensionVerdict]) -> float:
    fired = [d for d in dims if d.label == 1]
    pool = fired if fired else dims
    return min(max(d.fused.probs) for d in pool)


CONFIDENCE_POLICIES: dict[str, ConfidenceFn] = {
    "min_dim_max_prob": min_dim_max_prob,
    "mean_margin": mean_margin,
    "intervened_dim_only": intervened_dim_only,
}

DEFAULT_CONFIDENCE_POLICY = "min_dim_max_prob"


def resolve_confidence_policy(policy: str | ConfidenceFn) -> ConfidenceFn:
    if callable(policy):
        return policy
    try:
        return CONFIDENCE_POLICIES[policy]
    except KeyError:
        raise ValidationError(
            f"unknown confidence policy {policy!r}; expected one of {sorted(CONFIDENCE_POLICIES)}"
        ) from None


def _verdict(per_dim: list[ScoreVector], policy: str | ConfidenceFn) -> FusedVerdict:
    dims = tuple(DimensionVerdict.from_vector(v) for v in per_dim)
    confidence = resolve_confidence_policy(policy)(dims)
    return FusedVerdict(per_dimension=dims, confidence=min(max(confidence, 0.0), 1.0))


def fuse_measurement(
    blocks: Sequence[ScoreBlock],
    rule: FusionRule | RuleKind | str,
    priors: Optional[Sequence[PriorVector]] = None,
    confidence_policy: str | ConfidenceFn = DEFAULT_CONFIDENCE_POLICY,
) -> FusedVerdict:
    """Combine provider score blocks dimension by dimension under ``rule``."""
    validate_blocks(blocks)
    rule = _coerce_rule(rule)
    n_dims = len(blocks[0].per_dimension)
    if priors is not None and len(priors) != n_dims:
        raise ValidationError(
            f"got {len(priors)} priors for {n_dims} dimensions"
        )
    fused = []
    for d in range(n_dims):
        vectors = [b.per_dimension[d].probs for b in blocks]
        prior = priors[d].probs if priors is not None else None
        fused.append(ScoreVector(tuple(combine_scores(vectors, rule, prior))))
    return _verdict(fused, confidence_policy)


def fuse_abstract(blocks: Sequence[ScoreBlock]) -> tuple[int, ...]:
    """Majority vote over provider argmax labels, one winner per dimension.

    Vote ties resolve to the lowest class index, i.e. toward the "no" class
    of the binary schema, which is the conservative choice for interventions.
    """
    validate_blocks(blocks)
    labels = []
    for d in range(len(blocks[0].per_dimension)):
        votes: Counter[int] = Counter(_argmax(b.per_dimension[d].probs) for b in blocks)
        top = max(votes.values())
        labels.append(min(c for c, n in votes.items() if n == top))
    return tuple(labels)


def fuse_rank(
    blocks: Sequence[ScoreBlock],
    confidence_policy: str | ConfidenceFn = DEFAULT_CONFIDENCE_POLICY,
) -> FusedVerdict:
    """Borda-count rank aggregation, normalized to a distribution per dimension."""
    validate_blocks(blocks)
    rule = FusionRule(kind=RuleKind.BORDA_COUNT)
    fused = []
    for d in range(len(blocks[0].per_dimension)):
        vectors = [b.per_dimension[d].probs for b in blocks]
        fused.append(ScoreVector(tuple(combine_scores(vectors, rule))))
    return _verdict(fused, confidence_policy)
