"""Score providers: local model, LLM endpoint, replay, and mocks."""
from .base import (
    ProviderDescriptor,
    ScoreProvider,
    build_provider,
    register_provider_kind,
)
from .llm import (
    DIMENSION_QUERIES,
    LlmClient,
    LlmEndpointConfig,
    ScoreCache,
    parse_discrete_reply,
    parse_probability_reply,
    prompt_hash,
    render_prompt,
)
from .local import (
    DEGENERATE_EPS,
    LocalMdcProvider,
    MultidimNaiveBayes,
    predict_local,
    train_local,
)
from .mock import MockProvider
from .replay import ReplayIssue, ReplayProvider, ReplayResult, replay_scores
from .scorefile import dump_score_line, iter_score_lines, score_record, write_scores

from .llm import _build_llm
from .local import _build_local
from .mock import _build_mock
from .replay import _build_replay

for _kind, _factory in (
    ("LocalMDC", _build_local),
    ("LlmHttp", _build_llm),
    ("Replay", _build_replay),
    ("Mock", _build_mock),
):
    register_provider_kind(_kind, _factory)
    register_provider_kind(_kind.lower(), _factory)
del _kind, _factory

__all__ = [
    "DEGENERATE_EPS",
    "DIMENSION_QUERIES",
    "LlmClient",
    "LlmEndpointConfig",
    "LocalMdcProvider",
    "MockProvider",
    "MultidimNaiveBayes",
    "ProviderDescriptor",
    "ReplayIssue",
    "ReplayProvider",
    "ReplayResult",
    "ScoreCache",
    "ScoreProvider",
    "build_provider",
    "dump_score_line",
    "iter_score_lines",
    "parse_discrete_reply",
    "parse_probability_reply",
    "predict_local",
    "prompt_hash",
    "register_provider_kind",
    "render_prompt",
    "replay_scores",
    "score_record",
    "train_local",
    "write_scores",
]
