"""HTTP client that asks a chat-completion endpoint to score posts.

The prompt poses one yes/no query per dimension and asks for a JSON
object of yes-probabilities.  Replies that ignore the format are
salvaged by a discrete-answer fallback (yes/no words or 1-7 ratings)
mapped to probabilities at a fixed calibration confidence.  Responses
are cached by (model, prompt hash, post id) so reruns never touch the
network.
"""
from __future__ import annotations

import hashlib
import json
import os
import re
import threading
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable

import httpx

from ..core.schema import DEFAULT_SCHEMA, DimensionSchema
from ..core.types import Post
from ..errors import (
    ProviderError,
    ProviderUnavailableError,
    ScoringError,
    ValidationError,
)
from ..fusion.types import ScoreBlock, ScoreVector
from .base import ProviderDescriptor
from .scorefile import write_scores

# One query per dimension, phrased so "yes" always means label 1.
DIMENSION_QUERIES = {
    "opinion": "Does the post express the writer's own opinion?",
    "question": "Does the post ask a question?",
    "answer": "Does the post answer a question from another post?",
    "sentiment": "Is the overall sentiment of the post positive?",
    "confusion": "Does the writer express confusion about the material?",
    "urgency": "Does the post need an urgent reply from course staff?",
}

PROMPT_TEMPLATE = """You are rating a forum post from an online course.

Post:
---
{text}
---

Answer each query with the probability (0.0 to 1.0) that the answer is yes:
{queries}

Reply with a single JSON object mapping each dimension name to its probability, e.g.
{{"opinion": 0.2, "question": 0.9, "answer": 0.1, "sentiment": 0.5, "confusion": 0.3, "urgency": 0.8}}
No prose, JSON only."""

_YES_WORDS = {"yes", "y", "true"}
_NO_WORDS = {"no", "n", "false"}


@dataclass(frozen=True)
class LlmEndpointConfig:
    base_url: str
    model: str
    path: str = "/v1/chat/completions"
    api_key: str | None = None
    auth_header: str = "Authorization"
    timeout_s: float = 30.0
    epsilon_cal: float = 0.9
    max_attempts: int = 3
    backoff_s: float = 0.25
    max_in_flight: int = 4

    def __post_init__(self):
        if not self.base_url:
            raise ValidationError("base_url must be set")
        if not self.model:
            raise ValidationError("model must be set")
        if not 0.5 < self.epsilon_cal < 1.0:
            raise ValidationError("epsilon_cal must lie in (0.5, 1.0)")
        if self.max_attempts < 1:
            raise ValidationError("max_attempts must be >= 1")
        if self.max_in_flight < 1:
            raise ValidationError("max_in_flight must be >= 1")

    @classmethod
    def from_env(cls, env=os.environ, **overrides) -> "LlmEndpointConfig":
        kwargs = {
            "base_url": env.get("FORUMFUSE_LLM_BASE_URL", ""),
            "model": env.get("FORUMFUSE_LLM_MODEL", ""),
            "api_key": env.get("FORUMFUSE_LLM_API_KEY"),
        }
        if "FORUMFUSE_LLM_PATH" in env:
            kwargs["path"] = env["FORUMFUSE_LLM_PATH"]
        if "FORUMFUSE_LLM_TIMEOUT_S" in env:
            kwargs["timeout_s"] = float(env["FORUMFUSE_LLM_TIMEOUT_S"])
        kwargs.update(overrides)
        return cls(**kwargs)


def render_prompt(text: str) -> str:
    queries = "\n".join(f"- {dim}: {q}" for dim, q in DIMENSION_QUERIES.items())
    return PROMPT_TEMPLATE.format(text=text, queries=queries)


def prompt_hash(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()


class ScoreCache:
    """Thread-safe map from (model, prompt hash, post id) to ScoreBlock."""

    def __init__(self):
        self._entries: dict[tuple[str, str, str], ScoreBlock] = {}
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self._entries)

    def get(self, key: tuple[str, str, str]) -> ScoreBlock | None:
        with self._lock:
            return self._entries.get(key)

    def put(self, key: tuple[str, str, str], block: ScoreBlock) -> None:
        with self._lock:
            self._entries[key] = block

    def save(self, path: str | os.PathLike) -> int:
        with self._lock:
            items = sorted(self._entries.items())
        with open(path, "w", encoding="utf-8") as fh:
            for (model, phash, post_id), block in items:
                record = {
                    "model": model,
                    "prompt_hash": phash,
                    "post_id": post_id,
                    "provider_id": block.provider_id,
                    "scores": block.to_lists(),
                }
                fh.write(json.dumps(record, sort_keys=True, separators=(",", ":")))
                fh.write("\n")
        return len(items)

    @classmethod
    def load(cls, path: str | os.PathLike) -> "ScoreCache":
        cache = cls()
        with open(path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                record = json.loads(line)
                key = (record["model"], record["prompt_hash"], record["post_id"])
                cache._entries[key] = ScoreBlock.from_lists(
                    record["provider_id"], record["scores"]
                )
        return cache

    def export_scores(self, path: str | os.PathLike) -> int:
        """Write cached entries in the plain score-file format."""
        with self._lock:
            items = sorted(self._entries.items())
        return write_scores(path, ((post_id, block) for (_, _, post_id), block in items))


def _strip_fences(content: str) -> str:
    content = content.strip()
    if content.startswith("```"):
        content = re.sub(r"^```[a-zA-Z]*\s*", "", content)
        content = re.sub(r"\s*```$", "", content)
    return content.strip()


def _extract_json(content: str) -> dict | None:
    content = _strip_fences(content)
    try:
        data = json.loads(content)
        return data if isinstance(data, dict) else None
    except json.JSONDecodeError:
        pass
    start, end = content.find("{"), content.rfind("}")
    if 0 <= start < end:
        try:
            data = json.loads(content[start : end + 1])
            return data if isinstance(data, dict) else None
        except json.JSONDecodeError:
            return None
    return None


def parse_probability_reply(content: str, dims: tuple[str, ...]) -> list[ScoreVector] | None:
    """First-tier parse: JSON object of per-dimension yes-probabilities."""
    data = _extract_json(content)
    if data is None:
        return None
    vecs = []
    for dim in dims:
        value = data.get(dim)
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            return None
        p = float(value)
        if not 0.0 <= p <= 1.0:
            return None
        vecs.append(ScoreVector(probs=(1.0 - p, p)))
    return vecs


_DISCRETE_LINE = re.compile(r"[\"']?(\w+)[\"']?\s*[:=]\s*[\"']?([A-Za-z0-9.]+)[\"']?")


def parse_discrete_reply(
    content: str, dims: tuple[str, ...], epsilon_cal: float, ordinal_threshold: int
) -> list[ScoreVector] | None:
    """Fallback parse: yes/no words or 1-7 ratings per dimension.

    A rating binarizes at the schema threshold; either way the named
    class gets epsilon_cal mass and the other class the remainder.
    """
    found: dict[str, int] = {}
    for raw_dim, raw_val in _DISCRETE_LINE.findall(content):
        dim = raw_dim.lower()
        if dim not in dims or dim in found:
            continue
        val = raw_val.strip().lower()
        if val in _YES_WORDS:
            found[dim] = 1
        elif val in _NO_WORDS:
            found[dim] = 0
        elif re.fullmatch(r"[1-7]", val):
            found[dim] = 1 if int(val) >= ordinal_threshold else 0
    if set(found) != set(dims):
        return None
    vecs = []
    for dim in dims:
        p_yes = epsilon_cal if found[dim] == 1 else 1.0 - epsilon_cal
        vecs.append(ScoreVector(probs=(1.0 - p_yes, p_yes)))
    return vecs


class LlmClient:
    """Score provider backed by a chat-completion HTTP endpoint."""

    def __init__(
        self,
        config: LlmEndpointConfig,
        provider_id: str = "llm",
        cache: ScoreCache | None = None,
        schema: DimensionSchema | None = None,
        transport: httpx.BaseTransport | None = None,
        sleeper: Callable[[float], None] = time.sleep,
    ):
        self.config = config
        self.provider_id = provider_id
        self.cache = cache if cache is not None else ScoreCache()
        self.schema = schema if schema is not None else DEFAULT_SCHEMA
        self._dims = tuple(d.name for d in self.schema.dimensions)
        self._sleep = sleeper
        self._gate = threading.Semaphore(config.max_in_flight)
        headers = {}
        if config.api_key:
            value = config.api_key
            if config.auth_header.lower() == "authorization":
                value = f"Bearer {config.api_key}"
            headers[config.auth_header] = value
        self._http = httpx.Client(
            base_url=config.base_url,
            headers=headers,
            timeout=config.timeout_s,
            transport=transport,
        )

    def close(self) -> None:
        self._http.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def score(self, post: Post) -> ScoreBlock:
        prompt = render_prompt(post.text)
        key = (self.config.model, prompt_hash(prompt), post.post_id)
        cached = self.cache.get(key)
        if cached is not None:
            return cached
        content = self._request(prompt)
        vecs = parse_probability_reply(content, self._dims)
        if vecs is None:
            vecs = parse_discrete_reply(
                content, self._dims, self.config.epsilon_cal, self.schema.ordinal_threshold
            )
        if vecs is None:
            raise ScoringError(
                f"unparseable reply for post {post.post_id!r}", raw_response=content
            )
        block = ScoreBlock(provider_id=self.provider_id, per_dimension=tuple(vecs))
        self.cache.put(key, block)
        return block

    def score_many(self, posts: Iterable[Post]) -> dict[str, ScoreBlock]:
        return {post.post_id: self.score(post) for post in posts}

    def _request(self, prompt: str) -> str:
        body = {
            "model": self.config.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": 0,
        }
        last_error: Exception | None = None
        for attempt in range(self.config.max_attempts):
            if attempt:
                self._sleep(self.config.backoff_s * (2 ** (attempt - 1)))
            try:
                with self._gate:
                    response = self._http.post(self.config.path, json=body)
            except (httpx.TimeoutException, httpx.TransportError) as exc:
                last_error = exc
                continue
            if response.status_code >= 500:
                last_error = ProviderError(f"server error {response.status_code}")
                continue
            if response.status_code != 200:
                raise ProviderError(
                    f"endpoint rejected request: {response.status_code} {response.text[:200]}"
                )
            return self._content_of(response)
        raise ProviderUnavailableError(
            f"endpoint unreachable after {self.config.max_attempts} attempts: {last_error}"
        )

    @staticmethod
    def _content_of(response: httpx.Response) -> str:
        try:
            data = response.json()
            content = data["choices"][0]["message"]["content"]
        except (json.JSONDecodeError, KeyError, IndexError, TypeError):
            raise ScoringError(
                "response is not chat-completion shaped", raw_response=response.text
            ) from None
        if not isinstance(content, str):
            raise ScoringError("message content is not text", raw_response=response.text)
        return content


def _build_llm(descriptor: ProviderDescriptor) -> LlmClient:
    cfg = dict(descriptor.config)
    cache_path = cfg.pop("cache_path", None)
    config = LlmEndpointConfig.from_env(**cfg)
    cache = ScoreCache.load(cache_path) if cache_path and os.path.exists(cache_path) else None
    return LlmClient(config, provider_id=descriptor.provider_id, cache=cache)
