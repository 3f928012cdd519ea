"""Experiment runner: systems x splits -> metrics reports and a table.

A system is a named provider ensemble plus an optional fusion rule.
Local providers are rebuilt per split (trained on that split's train
side); endpoint-backed and replay providers ignore the training posts.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

from ..core.schema import DEFAULT_SCHEMA, DimensionSchema
from ..core.types import DatasetSplit, Post
from ..errors import ProviderError, ValidationError
from ..fusion.rules import DEFAULT_CONFIDENCE_POLICY, fuse_measurement
from ..fusion.types import FusionRule, RuleKind, ScoreBlock
from .metrics import ConfusionCounts, MetricsReport, compute_metrics

ProviderBuilder = Callable[[Sequence[Post], int], object]

# Externally reported benchmark figures for this task, kept as context
# rows in reports.  They are metadata, not assertions: reproducing them
# would need the exact classifiers behind them.  None = no reported value.
REFERENCE_RESULTS: dict[str, dict[str, dict[str, float] | None]] = {
    "intracourse": {
        "local": {"precision": 0.81, "recall": 0.80, "f1": 0.78},
        "llm": {"precision": 0.80, "recall": 0.78, "f1": 0.77},
        "fused": {"precision": 0.81, "recall": 0.80, "f1": 0.78},
    },
    "intradomain": {
        "local": {"precision": 0.79, "recall": 0.79, "f1": 0.77},
        "llm": {"precision": 0.84, "recall": 0.78, "f1": 0.78},
        "fused": {"precision": 0.84, "recall": 0.79, "f1": 0.78},
    },
    "crossdomain": {
        "local": {"precision": 0.73, "recall": 0.68, "f1": 0.67},
        "llm": None,
        "fused": {"precision": 0.73, "recall": 0.68, "f1": 0.67},
    },
}


@dataclass(frozen=True)
class SystemSpec:
    """One column group of the comparison: providers plus a fusion rule."""

    name: str
    providers: tuple[str, ...]
    rule: FusionRule | RuleKind | str | None = None
    reference_key: str | None = None

    def __post_init__(self):
        if not self.name:
            raise ValidationError("system name must be non-empty")
        if not self.providers:
            raise ValidationError(f"system {self.name!r} lists no providers")
        if self.rule is None and len(self.providers) > 1:
            raise ValidationError(
                f"system {self.name!r} has {len(self.providers)} providers but no fusion rule"
            )


@dataclass
class ExperimentResult:
    reports: list[MetricsReport]
    table: str
    reference: Mapping[str, Mapping[str, dict | None]] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "reports": [r.to_dict() for r in self.reports],
            "table": self.table,
            "reference": {k: dict(v) for k, v in self.reference.items()},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    def to_csv(self, delimiter: str = ",") -> str:
        lines = [delimiter.join(
            ["configuration", "split", "system", "precision", "recall", "f1", "coverage"]
        )]
        for r in self.reports:
            lines.append(delimiter.join([
                r.configuration.split(":", 1)[0],
                r.configuration,
                r.system,
                f"{r.macro.precision:.6f}",
                f"{r.macro.recall:.6f}",
                f"{r.macro.f1:.6f}",
                f"{r.coverage:.6f}",
            ]))
        return "\n".join(lines) + "\n"


def _evaluate_system(
    system: SystemSpec,
    providers: Mapping[str, object],
    test_posts: Sequence[Post],
    split_name: str,
    configuration: str,
    schema: DimensionSchema,
    confidence_policy,
) -> MetricsReport:
    dims = tuple(d.name for d in schema.dimensions)
    rule = system.rule if system.rule is not None else RuleKind.PRODUCT
    preds: list[tuple[int, ...]] = []
    golds: list[tuple[int, ...]] = []
    skipped = 0
    for post in test_posts:
        if post.gold is None:
            raise ValidationError(f"test post {post.post_id!r} has no gold labels")
        blocks: list[ScoreBlock] = []
        try:
            for name in system.providers:
                blocks.append(providers[name].score(post))
        except ProviderError:
            skipped += 1
            continue
        verdict = fuse_measurement(blocks, rule, confidence_policy=confidence_policy)
        preds.append(verdict.labels)
        golds.append(tuple(post.gold))
    counts = []
    for d in range(len(dims)):
        tp = fp = fn = tn = 0
        for p, g in zip(preds, golds):
            if p[d] == 1 and g[d] == 1:
                tp += 1
            elif p[d] == 1:
                fp += 1
            elif g[d] == 1:
                fn += 1
            else:
                tn += 1
        counts.append(ConfusionCounts(tp=tp, fp=fp, fn=fn, tn=tn))
    coverage = (len(test_posts) - skipped) / len(test_posts)
    return compute_metrics(
        counts,
        configuration=split_name,
        system=system.name,
        dimension_names=dims,
        coverage=coverage,
    )


def run_experiment(
    corpus: Sequence[Post],
    splits: Sequence[DatasetSplit],
    systems: Sequence[SystemSpec],
    builders: Mapping[str, ProviderBuilder],
    schema: DimensionSchema | None = None,
    seed: int = 0,
    confidence_policy=DEFAULT_CONFIDENCE_POLICY,
) -> ExperimentResult:
    """Evaluate every system on every split.

    Each report's configuration field carries the full split name; the
    comparison table aggregates by split family.
    """
    schema = schema if schema is not None else DEFAULT_SCHEMA
    if not splits:
        raise ValidationError("no splits to evaluate")
    if not systems:
        raise ValidationError("no systems to evaluate")
    by_id = {p.post_id: p for p in corpus}
    needed = {name for s in systems for name in s.providers}
    missing = sorted(needed - set(builders))
    if missing:
        raise ValidationError(f"no builder registered for providers: {missing}")

    reports: list[MetricsReport] = []
    for split in splits:
        train_posts = [by_id[i] for i in split.train]
        test_posts = [by_id[i] for i in split.test]
        built = {name: builders[name](train_posts, seed) for name in sorted(needed)}
        for system in systems:
            reports.append(
                _evaluate_system(
                    system,
                    built,
                    test_posts,
                    split.name,
                    split.configuration,
                    schema,
                    confidence_policy,
                )
            )
    table = render_comparison_table(reports, systems)
    reference = {
        cfg: {
            s.name: REFERENCE_RESULTS.get(cfg, {}).get(s.reference_key)
            for s in systems
            if s.reference_key is not None
        }
        for cfg in sorted({r.configuration.split(":", 1)[0] for r in reports})
    }
    return ExperimentResult(reports=reports, table=table, reference=reference)


def aggregate_by_configuration(
    reports: Sequence[MetricsReport],
) -> dict[tuple[str, str], dict[str, float]]:
    """Mean macro P/R/F1 per (split family, system)."""
    groups: dict[tuple[str, str], list[MetricsReport]] = {}
    for r in reports:
        family = r.configuration.split(":", 1)[0]
        groups.setdefault((family, r.system), []).append(r)
    out = {}
    for key, rs in groups.items():
        out[key] = {
            "precision": sum(r.macro.precision for r in rs) / len(rs),
            "recall": sum(r.macro.recall for r in rs) / len(rs),
            "f1": sum(r.macro.f1 for r in rs) / len(rs),
            "n_splits": len(rs),
            "coverage": sum(r.coverage for r in rs) / len(rs),
        }
    return out


_FAMILY_ORDER = {"intracourse": 0, "intradomain": 1, "crossdomain": 2}


def render_comparison_table(
    reports: Sequence[MetricsReport], systems: Sequence[SystemSpec]
) -> str:
    """Plain-text grid: one row per split family, P/R/F1 per system."""
    agg = aggregate_by_configuration(reports)
    families = sorted(
        {family for family, _ in agg},
        key=lambda f: (_FAMILY_ORDER.get(f, len(_FAMILY_ORDER)), f),
    )
    names = [s.name for s in systems]
    label_width = max(13, *(len(f) for f in families)) if families else 13
    cell_width = max(17, *(len(n) for n in names)) if names else 17

    header = "configuration".ljust(label_width)
    subheader = " " * label_width
    for name in names:
        header += " | " + name.center(cell_width)
        subheader += " | " + "P     R     F1".center(cell_width)
    rule = "-" * len(header)
    lines = [header, subheader, rule]
    for family in families:
        row = family.ljust(label_width)
        for name in names:
            cell = agg.get((family, name))
            if cell is None:
                row += " | " + "-".center(cell_width)
            else:
                text = f"{cell['precision']:.2f}  {cell['recall']:.2f}  {cell['f1']:.2f}"
                row += " | " + text.center(cell_width)
        lines.append(row)
    return "\n".join(lines) + "\n"
