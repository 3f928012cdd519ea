"""Acceptance gate: one test per core guarantee, strictest stated tolerance.

Every test prints a single [PASS]/[FAIL] line naming the guarantee it
checks, then asserts, so a verbose run reads as a checklist.  Expected
values come from independent oracles: hand arithmetic, exact rationals,
brute-force recounts, or frozen tallies of the bundled fixture.
"""

from __future__ import annotations

import itertools
import json
import math
import os
import random
import time

import pytest

from forumfuse.core.ingest import ingest_corpus
from forumfuse.core.schema import DIMENSION_NAMES, DEFAULT_SCHEMA
from forumfuse.core.splits import SplitParams, make_splits
from forumfuse.core.types import LabelVector, RawAnnotation, binarize
from forumfuse.engine.config import EngineConfig
from forumfuse.engine.engine import CurationEngine, build_report, replay_event_log
from forumfuse.engine.events import EventLog
from forumfuse.engine.kb import KnowledgeBase
from forumfuse.evaluation.experiment import SystemSpec, run_experiment
from forumfuse.evaluation.metrics import compute_metrics, score_dimension
from forumfuse.fusion.rules import combine_scores
from forumfuse.fusion.types import FusionRule, RuleKind, ScoreVector
from forumfuse.providers.local import predict_local, train_local
from forumfuse.providers.mock import MockProvider
from forumfuse.providers.replay import ReplayProvider

from conftest import DATA_DIR, chain_benefit_corpus, make_post, synth_corpus

ALL_RULES = tuple(RuleKind)


def _criterion(name: str, ok: bool, detail: str) -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, f"{name}: {detail}"


def _random_ensemble(rng: random.Random) -> list[list[float]]:
    L = rng.randint(1, 8)
    C = rng.choice((2, 7))
    vectors = []
    for _ in range(L):
        raw = [rng.uniform(0.01, 1.0) for _ in range(C)]
        total = math.fsum(raw)
        vectors.append([v / total for v in raw])
    return vectors


def test_every_rule_returns_valid_permutation_invariant_distributions():
    rng = random.Random(20260816)
    started = time.perf_counter()
    worst_sum = 0.0
    worst_perm = 0.0
    for _ in range(10_000):
        vectors = _random_ensemble(rng)
        shuffled = vectors[:]
        rng.shuffle(shuffled)
        for rule in ALL_RULES:
            fused = combine_scores(vectors, rule)
            refused = combine_scores(shuffled, rule)
            assert all(p >= 0.0 for p in fused), f"{rule}: negative entry in {fused}"
            worst_sum = max(worst_sum, abs(math.fsum(fused) - 1.0))
            worst_perm = max(
                worst_perm, max(abs(a - b) for a, b in zip(fused, refused))
            )
            assert ScoreVector(tuple(fused)).label == ScoreVector(tuple(refused)).label
    elapsed = time.perf_counter() - started
    ok = worst_sum <= 1e-9 and worst_perm <= 1e-12 and elapsed < 10.0
    _criterion(
        "fusion rules emit valid, order-independent distributions",
        ok,
        f"10000 ensembles x {len(ALL_RULES)} rules, max |sum-1| {worst_sum:.2e}, "
        f"max permutation drift {worst_perm:.2e}, {elapsed:.2f}s",
    )


def test_product_rule_identities():
    single = [0.3, 0.7]
    identity = combine_scores([single], RuleKind.PRODUCT)
    identity_exact = identity == single
    hard_zero = combine_scores([[1.0, 0.0]], RuleKind.PRODUCT) == [1.0, 0.0]

    two = combine_scores([[0.8, 0.2], [0.8, 0.2]], RuleKind.PRODUCT)
    # 0.64/(0.64+0.04) = 16/17 and 0.04/0.68 = 1/17.
    pair_ok = abs(two[0] - 0.9412) <= 1e-4 and abs(two[1] - 0.0588) <= 1e-4
    pair_exact = abs(two[0] - 16 / 17) <= 1e-12 and abs(two[1] - 1 / 17) <= 1e-12

    rng = random.Random(7)
    worst = 0.0
    for _ in range(300):
        vectors = _random_ensemble(rng)
        plain = combine_scores(vectors, RuleKind.PRODUCT)
        corrected = combine_scores(vectors, RuleKind.PRODUCT_PRIOR_CORRECTED)
        worst = max(worst, max(abs(a - b) for a, b in zip(plain, corrected)))
    ok = identity_exact and hard_zero and pair_ok and pair_exact and worst <= 1e-12
    _criterion(
        "product rule: one-source identity, two-source hand value, uniform-prior equivalence",
        ok,
        f"L=1 exact {identity_exact}, two 0.8/0.2 -> ({two[0]:.4f}, {two[1]:.4f}), "
        f"uniform-prior max drift {worst:.2e} over 300 ensembles",
    )


def test_log_space_product_matches_linear_oracle():
    # Entries stay far above the epsilon floor, so log arithmetic and the
    # plain multiply-then-normalize oracle must agree to 1e-9.
    rng = random.Random(99)
    worst = 0.0
    for _ in range(1_000):
        vectors = _random_ensemble(rng)
        C = len(vectors[0])
        linear = [1.0] * C
        for vec in vectors:
            for j in range(C):
                linear[j] *= vec[j]
        total = math.fsum(linear)
        oracle = [v / total for v in linear]
        fused = combine_scores(vectors, RuleKind.PRODUCT)
        worst = max(worst, max(abs(a - b) for a, b in zip(fused, oracle)))
    ok = worst <= 1e-9
    _criterion(
        "log-space product agrees with the linear product oracle",
        ok,
        f"max drift {worst:.2e} over 1000 ensembles (tolerance 1e-9)",
    )


def test_majority_vote_matches_vote_count_oracle_exhaustively():
    one_hot = {0: [1.0, 0.0], 1: [0.0, 1.0]}
    checked = 0
    for L in range(1, 5):
        for combo in itertools.product((0, 1), repeat=L):
            vectors = [one_hot[v] for v in combo]
            fused = combine_scores(vectors, RuleKind.MAJORITY_VOTE)
            ones = sum(combo)
            oracle = [(L - ones) / L, ones / L]
            assert fused == oracle, f"votes {combo}: {fused} != {oracle}"
            # Ties resolve to class 0, the non-intervention side.
            expected_label = 1 if ones * 2 > L else 0
            assert ScoreVector(tuple(fused)).label == expected_label
            checked += 1
    _criterion(
        "majority vote equals the exhaustive vote-count oracle",
        checked == 30,
        f"{checked} deterministic ensembles (L in 1..4), ties resolve to class 0",
    )


def test_ordinal_binarization_threshold():
    neutral = dict(opinion=0, question=0, answer=0, sentiment=1, confusion=1, urgency=1)
    checked = 0
    for dim_index, dim in ((3, "sentiment"), (4, "confusion"), (5, "urgency")):
        for value in range(1, 8):
            raw = RawAnnotation(**{**neutral, dim: value})
            got = binarize(raw, DEFAULT_SCHEMA)[dim_index]
            expected = 1 if value >= 4 else 0
            assert got == expected, f"{dim}={value}: got {got}, expected {expected}"
            checked += 1
    passthrough = binarize(
        RawAnnotation(opinion=1, question=0, answer=1, sentiment=1, confusion=1, urgency=1),
        DEFAULT_SCHEMA,
    )
    pass_ok = tuple(passthrough)[:3] == (1, 0, 1)
    _criterion(
        "ordinal ratings binarize at >= 4 and binary flags pass through",
        checked == 21 and pass_ok,
        f"{checked} ordinal cases exact, binary passthrough {tuple(passthrough)[:3]}",
    )


def test_metrics_match_brute_force_recount():
    hand = compute_metrics(
        [
            score_dimension([1, 1, 1, 0], [1, 1, 0, 1])  # tp=2, fp=1, fn=1
            for _ in DIMENSION_NAMES
        ]
    )
    hand_ok = (
        hand.macro.precision == 2 / 3
        and hand.macro.recall == 2 / 3
        and hand.macro.f1 == 2 / 3
    )

    rng = random.Random(424242)
    exact = True
    for _ in range(200):
        n = rng.randint(1, 64)
        counts = []
        ratios = []
        for _ in DIMENSION_NAMES:
            pred = [rng.randint(0, 1) for _ in range(n)]
            gold = [rng.randint(0, 1) for _ in range(n)]
            tp = sum(1 for p, g in zip(pred, gold) if p == 1 and g == 1)
            fp = sum(1 for p, g in zip(pred, gold) if p == 1 and g == 0)
            fn = sum(1 for p, g in zip(pred, gold) if p == 0 and g == 1)
            counts.append(score_dimension(pred, gold))
            assert (counts[-1].tp, counts[-1].fp, counts[-1].fn) == (tp, fp, fn)
            p = tp / (tp + fp) if tp + fp else 0.0
            r = tp / (tp + fn) if tp + fn else 0.0
            f = 2 * tp / (2 * tp + fp + fn) if 2 * tp + fp + fn else 0.0
            ratios.append((p, r, f))
        report = compute_metrics(counts)
        for dim, (p, r, f) in zip(DIMENSION_NAMES, ratios):
            m = report.per_dimension[dim]
            exact = exact and (m.precision, m.recall, m.f1) == (p, r, f)
        exact = exact and report.macro.precision == sum(x[0] for x in ratios) / 6
        exact = exact and report.macro.recall == sum(x[1] for x in ratios) / 6
        exact = exact and report.macro.f1 == sum(x[2] for x in ratios) / 6
    _criterion(
        "precision/recall/F1 equal an independent recount exactly",
        hand_ok and exact,
        "hand case tp=2,fp=1,fn=1 -> 2/3 each; 200 seeded instances bit-exact",
    )


def test_corpus_ingest_tallies():
    external = os.environ.get("FORUMFUSE_STANFORD_CSV")
    if external and os.path.exists(external):
        posts, report = ingest_corpus(external, "standard", DEFAULT_SCHEMA)
        urgency = report.counts["total"]["urgency"]
        ds1 = report.counts.get("course:DS1", {}).get("urgency", {})
        ok = (
            report.total_posts == 29_604
            and urgency == {"no": 23_186, "yes": 6_418}
            and ds1 == {"no": 9_418, "yes": 461}
        )
        detail = (
            f"external corpus: {report.total_posts} posts, urgency {urgency}, "
            f"DS1 urgency {ds1}"
        )
    else:
        posts, report = ingest_corpus(
            DATA_DIR / "corpus_fixture.csv", "standard", DEFAULT_SCHEMA
        )
        totals = report.counts["total"]
        ok = (
            report.total_posts == 12
            and report.rejected_rows == 0
            and totals["opinion"] == {"no": 9, "yes": 3}
            and totals["question"] == {"no": 8, "yes": 4}
            and totals["answer"] == {"no": 8, "yes": 4}
            and totals["sentiment"] == {"no": 4, "yes": 8}
            and totals["confusion"] == {"no": 7, "yes": 5}
            and totals["urgency"] == {"no": 8, "yes": 4}
        )
        detail = (
            f"bundled fixture: {report.total_posts} posts match the frozen hand "
            f"tally (set FORUMFUSE_STANFORD_CSV to check the full corpus)"
        )
    _criterion("corpus ingest reproduces the frozen label tallies", ok, detail)


def test_referral_rate_is_monotone_in_the_threshold():
    posts = synth_corpus(1_000, seed=5)
    providers = [
        MockProvider("m1", mode="noisy", seed=42, flip_prob=0.2),
        MockProvider("m2", mode="noisy", seed=42, flip_prob=0.2),
    ]
    ladder = (0.0, 0.3, 0.6, 0.8, 0.9, 1.0)
    started = time.perf_counter()
    referred: dict[float, set[str]] = {}
    for th in ladder:
        engine = CurationEngine(EngineConfig(threshold=th), providers)
        for post in posts:
            engine.process_post(post)
        referred[th] = {r.post_id for r in engine.store.referrals.values()}
    elapsed = time.perf_counter() - started
    nested = all(
        referred[a] <= referred[b] for a, b in zip(ladder, ladder[1:])
    )
    sizes = [len(referred[th]) for th in ladder]
    ok = (
        nested
        and len(referred[0.0]) == 0
        and len(referred[1.0]) == len(posts)
        and elapsed < 5.0
    )
    _criterion(
        "raising the referral threshold only ever adds referrals",
        ok,
        f"sizes {sizes} over thresholds {list(ladder)}, nested {nested}, {elapsed:.2f}s",
    )


def test_fusing_two_noisy_scorers_beats_the_best_single_one():
    posts = synth_corpus(1_000, seed=5)
    splits = make_splits(posts, "intracourse", SplitParams(train_fraction=0.5, seed=42))

    def noisy(name: str):
        return lambda train, seed: MockProvider(name, mode="noisy", seed=42, flip_prob=0.2)

    systems = [
        SystemSpec(name="m1", providers=("m1",)),
        SystemSpec(name="m2", providers=("m2",)),
        SystemSpec(name="fused", providers=("m1", "m2"), rule=FusionRule(RuleKind.PRODUCT)),
    ]
    result = run_experiment(
        posts, splits, systems, builders={"m1": noisy("m1"), "m2": noisy("m2")}, seed=42
    )
    f1 = {r.system: r.macro.f1 for r in result.reports}
    best_single = max(f1["m1"], f1["m2"])
    ok = f1["fused"] >= best_single - 0.01
    _criterion(
        "product fusion matches or beats the best single noisy scorer",
        ok,
        f"fused macro-F1 {f1['fused']:.4f} vs best single {best_single:.4f} "
        f"(m1 {f1['m1']:.4f}, m2 {f1['m2']:.4f}), tolerance -0.01",
    )


def test_event_log_replay_is_byte_identical(tmp_path):
    log_path = tmp_path / "events.ldjson"
    ticks = itertools.count()
    clock = lambda: float(next(ticks))
    scorer = MockProvider("oracle", mode="oracle", confidence=0.9375)
    engine = CurationEngine(
        EngineConfig(threshold=0.8),
        [scorer],
        kb=KnowledgeBase(),
        event_log=EventLog(log_path),
        clock=clock,
    )
    engine.process_post(make_post("ok1", "a settled question", (0, 1, 0, 0, 0, 0)))
    engine.process_post(make_post("ok2", "calm feedback", (1, 0, 0, 1, 0, 0)))
    strict = CurationEngine(
        EngineConfig(threshold=0.99),
        [scorer],
        kb=KnowledgeBase(),
        event_log=engine.log,
        store=engine.store,
        clock=clock,
    )
    strict.process_post(make_post("ref1", "deadline panic", (0, 1, 0, 0, 1, 1)))
    strict.process_post(make_post("ref2", "quietly stuck", (0, 0, 0, 0, 1, 0)))
    rid = strict.open_referrals()[0].referral_id
    strict.resolve_referral(rid, LabelVector((0, 1, 0, 0, 1, 1)), "Deadline extended.")
    engine.log.close()

    live_state = engine.store.to_json()
    live_report = build_report(engine.store, engine.config).to_json()
    replays = [replay_event_log(log_path) for _ in range(2)]
    state_ok = all(r.to_json() == live_state for r in replays)
    report_ok = all(
        build_report(r, engine.config).to_json() == live_report for r in replays
    )
    hashes = {engine.store.state_hash(), *(r.state_hash() for r in replays)}
    ok = state_ok and report_ok and len(hashes) == 1
    _criterion(
        "replaying the event log rebuilds byte-identical state and report",
        ok,
        f"2 replays of a respond/refer/resolve run, state hash {hashes.copy().pop()[:12]}...",
    )


def test_label_chaining_recovers_the_dependent_dimension():
    train, test = chain_benefit_corpus()
    answer = DIMENSION_NAMES.index("answer")
    gold = [post.gold[answer] for post in test]
    f1 = {}
    for chained in (False, True):
        model = train_local(train, chain_mode=chained)
        preds = [row[answer] for row in predict_local(model, test)]
        c = score_dimension(preds, gold)
        f1[chained] = 2 * c.tp / (2 * c.tp + c.fp + c.fn)
    ok = f1[True] >= f1[False]
    _criterion(
        "chained heads beat independent heads on a label-coupled dimension",
        ok,
        f"answer F1: chained {f1[True]:.4f} vs independent {f1[False]:.4f} "
        f"(coupling: answer = NOT question, plus unseen-vocabulary posts)",
    )
