"""Command-line entry points.

Exit codes: 0 success, 1 usage error (bad flags, unknown subcommand),
2 runtime failure (bad input files, training errors, provider outages).
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Sequence

from .core.ingest import get_profile, ingest_corpus, load_profiles, write_corpus
from .core.schema import DimensionSchema
from .core.splits import SplitParams, make_splits
from .core.types import Post
from .engine import (
    CurationEngine,
    EngineConfig,
    EventLog,
    KnowledgeBase,
    build_report,
    replay_event_log,
)
from .errors import ForumFuseError, SplitInfeasibleError, ValidationError
from .evaluation import SystemSpec, run_experiment
from .fusion.rules import DEFAULT_CONFIDENCE_POLICY, fuse_measurement
from .fusion.types import FusionRule
from .providers import (
    LlmClient,
    LlmEndpointConfig,
    LocalMdcProvider,
    MockProvider,
    MultidimNaiveBayes,
    ReplayProvider,
    replay_scores,
    train_local,
    write_scores,
)

CONFIGURATIONS = ("intracourse", "intradomain", "crossdomain")


class _Parser(argparse.ArgumentParser):
    # argparse defaults to exit code 2 on usage errors; this surface
    # reserves 2 for runtime failures, so remap to 1.
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _coerce(value: str):
    lowered = value.lower()
    if lowered == "true":
        return True
    if lowered == "false":
        return False
    try:
        return int(value)
    except ValueError:
        pass
    try:
        return float(value)
    except ValueError:
        return value


def parse_provider_spec(token: str) -> tuple[str, str, dict]:
    """``id=kind[,key=value...]`` -> (id, kind, options)."""
    head, *rest = token.split(",")
    name, sep, kind = head.partition("=")
    if not sep or not name or not kind:
        raise ValidationError(f"provider spec {token!r} must start with id=kind")
    options = {}
    for part in rest:
        key, sep, value = part.partition("=")
        if not sep or not key:
            raise ValidationError(f"provider spec {token!r}: bad option {part!r}")
        options[key] = _coerce(value)
    return name, kind.lower(), options


def parse_system_spec(token: str) -> SystemSpec:
    """``name=prov1+prov2[:rule][:ref=key]`` -> SystemSpec."""
    head, *rest = token.split(":")
    name, sep, provs = head.partition("=")
    if not sep or not name or not provs:
        raise ValidationError(f"system spec {token!r} must start with name=providers")
    rule = None
    ref = None
    for part in rest:
        if part.startswith("ref="):
            ref = part[4:]
        else:
            rule = FusionRule.parse(part)
    return SystemSpec(
        name=name, providers=tuple(provs.split("+")), rule=rule, reference_key=ref
    )


def _load_json(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _load_schema(args) -> DimensionSchema:
    if getattr(args, "schema", None):
        data = _load_json(args.schema)
        return DimensionSchema(ordinal_threshold=data.get("ordinal_threshold", 4))
    return DimensionSchema()


def _load_config(args) -> dict:
    if getattr(args, "config", None):
        data = _load_json(args.config)
        if not isinstance(data, dict):
            raise ValidationError(f"config file {args.config} must hold a JSON object")
        return data
    return {}


def _setting(args, config: dict, key: str, default):
    value = getattr(args, key, None)
    if value is not None:
        return value
    if key in config:
        return config[key]
    return default


def _write_json(path: str, payload) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="JSON file with default option values")
    sub.add_argument("--seed", type=int, default=None, help="random seed")
    sub.add_argument("--schema", help="JSON file overriding schema settings")


# -- subcommand handlers ------------------------------------------------------


def _cmd_ingest(args) -> int:
    config = _load_config(args)
    schema = _load_schema(args)
    if args.profiles:
        load_profiles(args.profiles)
    profile = _setting(args, config, "profile", "standard")
    posts, report = ingest_corpus(args.input, profile, schema)
    if args.out:
        write_corpus(posts, args.out)
    if args.report:
        _write_json(args.report, report.to_dict())
    print(f"ingested {report.labeled_posts} labeled / {report.total_posts} total posts, "
          f"{report.rejected_rows} rejected")
    for group in sorted(report.counts):
        if group == "total":
            urg = report.counts[group].get("urgency", {})
            print(f"urgency split: no={urg.get('no', 0)} yes={urg.get('yes', 0)}")
    return 0


def _cmd_train(args) -> int:
    config = _load_config(args)
    schema = _load_schema(args)
    posts, _ = ingest_corpus(args.input, _setting(args, config, "profile", "standard"), schema)
    model = train_local(
        posts,
        chain_mode=bool(_setting(args, config, "chain_mode", False)),
        smoothing=float(_setting(args, config, "smoothing", 1.0)),
        min_token_freq=int(_setting(args, config, "min_token_freq", 1)),
        force_degenerate=bool(_setting(args, config, "force_degenerate", False)),
        seed=_setting(args, config, "seed", 0),
    )
    model.save_json(args.out)
    print(f"trained on {model.n_samples_} posts, vocabulary {len(model.vocab_)}, "
          f"saved to {args.out}")
    return 0


def _build_static_provider(name: str, kind: str, options: dict, seed: int | None):
    """Providers that do not need per-split training."""
    options = dict(options)
    if kind in ("localmdc", "local"):
        path = options.pop("model_path", None)
        if path is None:
            raise ValidationError(f"provider {name!r}: local kind needs model_path=...")
        if options:
            raise ValidationError(f"provider {name!r}: unknown options {sorted(options)}")
        return LocalMdcProvider(MultidimNaiveBayes.load_json(path), provider_id=name)
    if kind == "mock":
        if seed is not None:
            options.setdefault("seed", seed)
        return MockProvider(provider_id=name, **options)
    if kind == "replay":
        path = options.pop("path", None)
        if path is None:
            raise ValidationError(f"provider {name!r}: replay kind needs path=...")
        if options:
            raise ValidationError(f"provider {name!r}: unknown options {sorted(options)}")
        return ReplayProvider.from_file(path, provider_id=name)
    if kind in ("llmhttp", "llm"):
        endpoint = LlmEndpointConfig.from_env(**options)
        return LlmClient(endpoint, provider_id=name)
    raise ValidationError(f"provider {name!r}: unknown kind {kind!r}")


def _cmd_score(args) -> int:
    config = _load_config(args)
    schema = _load_schema(args)
    posts, _ = ingest_corpus(args.input, _setting(args, config, "profile", "standard"), schema)
    name, kind, options = parse_provider_spec(args.provider)
    provider = _build_static_provider(name, kind, options, args.seed)
    n = write_scores(args.out, ((p.post_id, provider.score(p)) for p in posts))
    print(f"scored {n} posts with {name} -> {args.out}")
    return 0


def _cmd_fuse(args) -> int:
    config = _load_config(args)
    rule = FusionRule.parse(_setting(args, config, "rule", "product"))
    policy = _setting(args, config, "policy", DEFAULT_CONFIDENCE_POLICY)
    maps = []
    for path in args.scores:
        result = replay_scores(path)
        for issue in result.rejections:
            print(f"warning: {path}:{issue.line}: {issue.message}", file=sys.stderr)
        maps.append(result.scores)
    shared = sorted(set.intersection(*(set(m) for m in maps))) if maps else []
    skipped = len(set.union(*(set(m) for m in maps))) - len(shared) if maps else 0
    lines = []
    for post_id in shared:
        verdict = fuse_measurement([m[post_id] for m in maps], rule, confidence_policy=policy)
        lines.append(json.dumps({
            "post_id": post_id,
            "labels": list(verdict.labels),
            "confidence": verdict.confidence,
            "probs": [list(d.fused.probs) for d in verdict.per_dimension],
        }, sort_keys=True, separators=(",", ":")))
    payload = "\n".join(lines) + ("\n" if lines else "")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload)
    if skipped:
        print(f"warning: {skipped} post(s) missing from some score files were skipped",
              file=sys.stderr)
    print(f"fused {len(shared)} posts under rule={rule.kind.value}", file=sys.stderr)
    return 0


def _make_builders(specs: Sequence[tuple[str, str, dict]], seed: int | None):
    builders = {}
    for name, kind, options in specs:
        if kind in ("localmdc", "local") and "model_path" not in options:
            def trainer(train_posts, run_seed, _opts=dict(options), _name=name):
                model = train_local(train_posts, seed=run_seed, **_opts)
                return LocalMdcProvider(model, provider_id=_name)
            builders[name] = trainer
        else:
            provider = _build_static_provider(name, kind, options, seed)
            builders[name] = lambda train_posts, run_seed, _p=provider: _p
    return builders


def _cmd_evaluate(args) -> int:
    config = _load_config(args)
    schema = _load_schema(args)
    posts, _ = ingest_corpus(args.input, _setting(args, config, "profile", "standard"), schema)
    seed = _setting(args, config, "seed", 0)
    params = SplitParams(
        train_fraction=float(_setting(args, config, "train_fraction", 0.8)), seed=seed
    )
    wanted = _setting(args, config, "configuration", "all")
    names = CONFIGURATIONS if wanted == "all" else (wanted,)
    splits = []
    for cfg_name in names:
        try:
            splits.extend(make_splits(posts, cfg_name, params))
        except SplitInfeasibleError as exc:
            if wanted != "all":
                raise
            print(f"note: skipping {cfg_name}: {exc}", file=sys.stderr)
    if not splits:
        raise SplitInfeasibleError("no feasible splits for this corpus")

    provider_tokens = args.providers or config.get("providers") or ["local=local"]
    specs = [parse_provider_spec(t) for t in provider_tokens]
    builders = _make_builders(specs, seed)
    system_tokens = args.systems or config.get("systems")
    if system_tokens:
        systems = [parse_system_spec(t) for t in system_tokens]
    else:
        systems = [SystemSpec(name=name, providers=(name,)) for name, _, _ in specs]

    result = run_experiment(posts, splits, systems, builders, schema=schema, seed=seed)
    print(result.table)
    if args.out:
        _write_json(args.out, result.to_dict())
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(result.to_csv())
    return 0


def _engine_from_args(args, config: dict) -> CurationEngine:
    engine_cfg = EngineConfig.from_dict({
        "threshold": float(_setting(args, config, "threshold", 0.8)),
        "confidence_policy": _setting(args, config, "policy", DEFAULT_CONFIDENCE_POLICY),
        "rule": _setting(args, config, "rule", "product"),
        "referral_goal": float(_setting(args, config, "referral_goal", 0.02)),
        "priority_weights": config.get("priority_weights", (0.25, 2.0, 1.0, 0.5, 4.0, 8.0)),
    })
    provider_tokens = args.providers or config.get("providers")
    if not provider_tokens:
        raise ValidationError("serve needs at least one --providers spec")
    providers = [
        _build_static_provider(*parse_provider_spec(t), seed=args.seed)
        for t in provider_tokens
    ]
    kb = KnowledgeBase.from_file(args.kb) if args.kb else KnowledgeBase()
    store = None
    if args.event_log and os.path.exists(args.event_log):
        store = replay_event_log(args.event_log)
        print(f"replayed {len(store.posts)} post states from {args.event_log}")
    log = EventLog(args.event_log) if args.event_log else EventLog()
    return CurationEngine(engine_cfg, providers, kb, event_log=log, store=store)


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    config = _load_config(args)
    engine = _engine_from_args(args, config)
    token = args.api_token or os.environ.get("FORUMFUSE_API_TOKEN")
    app = create_app(engine, api_token=token)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def _cmd_replay(args) -> int:
    store = replay_event_log(args.event_log)
    if args.out:
        store.save(args.out)
    counts = store.status_counts()
    print(f"replayed {len(store.posts)} posts "
          f"({counts['Responded']} responded, {counts['Referred']} referred, "
          f"{counts['Resolved']} resolved); state hash {store.state_hash()}")
    return 0


def _cmd_report(args) -> int:
    config = _load_config(args)
    store = replay_event_log(args.event_log)
    engine_cfg = EngineConfig.from_dict({
        "threshold": float(_setting(args, config, "threshold", 0.8)),
        "referral_goal": float(_setting(args, config, "referral_goal", 0.02)),
    })
    report = build_report(store, engine_cfg)
    print(json.dumps(report.to_dict(), sort_keys=True, indent=2))
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="forumfuse", description="Forum curation toolkit")
    commands = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = commands.add_parser("ingest", help="read and validate a corpus file")
    p.add_argument("--input", required=True)
    p.add_argument("--profile", default=None)
    p.add_argument("--profiles", help="JSON file registering extra format profiles")
    p.add_argument("--out", help="write the normalized corpus here")
    p.add_argument("--report", help="write the ingest report JSON here")
    _add_common(p)
    p.set_defaults(handler=_cmd_ingest)

    p = commands.add_parser("train", help="fit the local classifier")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--profile", default=None)
    p.add_argument("--chain-mode", dest="chain_mode", action="store_const", const=True, default=None)
    p.add_argument("--smoothing", type=float, default=None)
    p.add_argument("--min-token-freq", dest="min_token_freq", type=int, default=None)
    p.add_argument("--force-degenerate", dest="force_degenerate",
                   action="store_const", const=True, default=None)
    _add_common(p)
    p.set_defaults(handler=_cmd_train)

    p = commands.add_parser("score", help="run one provider over a corpus")
    p.add_argument("--input", required=True)
    p.add_argument("--provider", required=True, help="spec: id=kind[,key=value...]")
    p.add_argument("--out", required=True)
    p.add_argument("--profile", default=None)
    _add_common(p)
    p.set_defaults(handler=_cmd_score)

    p = commands.add_parser("fuse", help="fuse score files into verdicts")
    p.add_argument("--scores", action="append", required=True)
    p.add_argument("--rule", default=None)
    p.add_argument("--policy", default=None)
    p.add_argument("--out")
    _add_common(p)
    p.set_defaults(handler=_cmd_fuse)

    p = commands.add_parser("evaluate", help="run the system comparison")
    p.add_argument("--input", required=True)
    p.add_argument("--profile", default=None)
    p.add_argument("--configuration", choices=CONFIGURATIONS + ("all",), default=None)
    p.add_argument("--train-fraction", dest="train_fraction", type=float, default=None)
    p.add_argument("--providers", action="append", help="spec: id=kind[,key=value...]")
    p.add_argument("--systems", action="append",
                   help="spec: name=prov1+prov2[:rule][:ref=key]")
    p.add_argument("--out", help="write the full result JSON here")
    p.add_argument("--csv", help="write per-split rows here")
    _add_common(p)
    p.set_defaults(handler=_cmd_evaluate)

    p = commands.add_parser("serve", help="start the HTTP service")
    p.add_argument("--providers", action="append")
    p.add_argument("--kb", help="knowledge base JSON file")
    p.add_argument("--event-log", dest="event_log")
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--rule", default=None)
    p.add_argument("--policy", default=None)
    p.add_argument("--referral-goal", dest="referral_goal", type=float, default=None)
    p.add_argument("--api-token", dest="api_token")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    _add_common(p)
    p.set_defaults(handler=_cmd_serve)

    p = commands.add_parser("replay", help="rebuild state from an event log")
    p.add_argument("--event-log", dest="event_log", required=True)
    p.add_argument("--out", help="write the state store JSON here")
    _add_common(p)
    p.set_defaults(handler=_cmd_replay)

    p = commands.add_parser("report", help="curation report from an event log")
    p.add_argument("--event-log", dest="event_log", required=True)
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--referral-goal", dest="referral_goal", type=float, default=None)
    _add_common(p)
    p.set_defaults(handler=_cmd_report)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if not getattr(args, "handler", None):
        parser.print_usage(sys.stderr)
        return 1
    try:
        return args.handler(args)
    except ForumFuseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
