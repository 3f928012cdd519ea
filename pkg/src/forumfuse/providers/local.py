"""Locally trained multidimensional text classifier.

A multinomial naive Bayes model fit per dimension over a shared
bag-of-words vocabulary.  Optionally runs as a classifier chain, where
each dimension additionally sees the labels of the dimensions before it
encoded as sentinel features.  Kept free of heavy dependencies so the
arithmetic stays hand-checkable: integer counts in, log-space scoring
out.
"""
from __future__ import annotations

import json
import math
import os
from collections import Counter
from typing import Iterable, Sequence

from sklearn.base import BaseEstimator

from ..core.schema import DEFAULT_SCHEMA, DimensionSchema
from ..core.text import tokenize
from ..core.types import Post
from ..errors import TrainingError, ValidationError
from ..fusion.types import ScoreBlock, ScoreVector
from .base import ProviderDescriptor

_SAVE_FORMAT = "forumfuse-nb"
_SAVE_VERSION = 1

# Probability floor for constant (single-class) dimension heads.
DEGENERATE_EPS = 1e-6


def _sentinel(dim: str, value: int) -> str:
    # '=' cannot appear in a text token, so sentinels never collide
    # with vocabulary words.
    return f"{dim}={value}"


class MultidimNaiveBayes(BaseEstimator):
    """Per-dimension multinomial naive Bayes with add-alpha smoothing.

    Parameters
    ----------
    alpha : float
        Additive smoothing mass per vocabulary entry.  Must be > 0.
    min_token_freq : int
        Tokens occurring fewer than this many times across the training
        corpus are dropped from the vocabulary.
    chain_mode : bool
        When true, dimension i also receives the labels of dimensions
        0..i-1 as sentinel features: gold labels during fit, the model's
        own predictions during inference.
    force_degenerate : bool
        A dimension whose training labels are all one class normally
        aborts the fit.  With this flag the dimension instead becomes a
        constant predictor emitting the smoothed class rate.
    schema : DimensionSchema | None
        Dimension layout; defaults to the standard six dimensions.
    """

    def __init__(
        self,
        alpha: float = 1.0,
        min_token_freq: int = 1,
        chain_mode: bool = False,
        force_degenerate: bool = False,
        schema: DimensionSchema | None = None,
    ):
        self.alpha = alpha
        self.min_token_freq = min_token_freq
        self.chain_mode = chain_mode
        self.force_degenerate = force_degenerate
        self.schema = schema

    # -- fitting ---------------------------------------------------------

    def fit(self, X: Sequence[str], y: Sequence[Sequence[int]]):
        if not (isinstance(self.alpha, (int, float)) and self.alpha > 0):
            raise ValidationError("alpha must be a positive number")
        if not (isinstance(self.min_token_freq, int) and self.min_token_freq >= 1):
            raise ValidationError("min_token_freq must be an integer >= 1")
        schema = self.schema if self.schema is not None else DEFAULT_SCHEMA
        dims = [d.name for d in schema.dimensions]

        texts = list(X)
        labels = [tuple(int(v) for v in row) for row in y]
        if len(texts) != len(labels):
            raise ValidationError(f"got {len(texts)} texts but {len(labels)} label rows")
        if not texts:
            raise TrainingError("training set is empty")
        for row in labels:
            if len(row) != len(dims):
                raise ValidationError(
                    f"label row has {len(row)} entries, expected {len(dims)}"
                )
            if any(v not in (0, 1) for v in row):
                raise ValidationError(f"labels must be 0 or 1, got {row}")

        token_rows = [tokenize(t) for t in texts]
        corpus_freq = Counter()
        for row in token_rows:
            corpus_freq.update(row)
        vocab = sorted(t for t, n in corpus_freq.items() if n >= self.min_token_freq)
        if not vocab:
            raise TrainingError(
                "vocabulary is empty after frequency filtering; "
                f"min_token_freq={self.min_token_freq}"
            )
        vocab_set = set(vocab)

        class_counts: dict[str, list[int]] = {}
        token_counts: dict[str, tuple[Counter, Counter]] = {}
        degenerate: dict[str, int | None] = {}
        for i, dim in enumerate(dims):
            seen = {row[i] for row in labels}
            if len(seen) < 2:
                only = seen.pop()
                if not self.force_degenerate:
                    raise TrainingError(
                        f"dimension {dim!r} has a single training class ({only}); "
                        "pass force_degenerate=True to train a constant predictor"
                    )
                degenerate[dim] = only
            else:
                degenerate[dim] = None
            counts = [0, 0]
            per_class = (Counter(), Counter())
            for row_tokens, row_labels in zip(token_rows, labels):
                c = row_labels[i]
                counts[c] += 1
                bag = per_class[c]
                for tok in row_tokens:
                    if tok in vocab_set:
                        bag[tok] += 1
                if self.chain_mode:
                    for j in range(i):
                        bag[_sentinel(dims[j], row_labels[j])] += 1
            class_counts[dim] = counts
            token_counts[dim] = per_class

        self.dimensions_ = tuple(dims)
        self.vocab_ = tuple(vocab)
        self.class_counts_ = class_counts
        self.token_counts_ = token_counts
        self.degenerate_ = degenerate
        self.n_samples_ = len(texts)
        return self

    # -- scoring ---------------------------------------------------------

    def _check_fitted(self):
        if not hasattr(self, "vocab_"):
            raise ValidationError("model is not fitted")

    def _feature_count(self, dim_index: int) -> int:
        # Smoothing denominator spans every feature the dimension could
        # see: the text vocabulary plus two sentinel values per earlier
        # dimension when chaining.
        n = len(self.vocab_)
        if self.chain_mode:
            n += 2 * dim_index
        return n

    def _dim_distribution(
        self, dim_index: int, bag: Counter, prefix: Sequence[int]
    ) -> tuple[float, float]:
        dim = self.dimensions_[dim_index]
        forced = self.degenerate_[dim]
        n0, n1 = self.class_counts_[dim]
        total = n0 + n1
        if forced is not None:
            # Constant predictor: all mass on the only observed class,
            # floored so the other class never reads exactly zero.
            p = 1.0 - DEGENERATE_EPS
            return (p, DEGENERATE_EPS) if forced == 0 else (DEGENERATE_EPS, p)

        features = dict(bag)
        if self.chain_mode:
            for j, v in enumerate(prefix):
                features[_sentinel(self.dimensions_[j], v)] = 1
        if not features:
            # Nothing in vocabulary: fall back to the class priors.
            return (n0 / total, n1 / total)

        v_size = self._feature_count(dim_index)
        logs = []
        for c in (0, 1):
            counts = self.token_counts_[dim][c]
            denom = sum(counts.values()) + self.alpha * v_size
            lp = math.log(self.class_counts_[dim][c] / total)
            for tok, n in features.items():
                lp += n * math.log((counts.get(tok, 0) + self.alpha) / denom)
            logs.append(lp)
        peak = max(logs)
        exps = [math.exp(lp - peak) for lp in logs]
        z = math.fsum(exps)
        return (exps[0] / z, exps[1] / z)

    def _distributions(self, text: str) -> tuple[tuple[float, float], ...]:
        self._check_fitted()
        tokens = tokenize(text)
        vocab_set = set(self.vocab_)
        bag = Counter(t for t in tokens if t in vocab_set)
        out: list[tuple[float, float]] = []
        prefix: list[int] = []
        for i in range(len(self.dimensions_)):
            dist = self._dim_distribution(i, bag, prefix)
            out.append(dist)
            prefix.append(0 if dist[0] >= dist[1] else 1)
        return tuple(out)

    def predict_proba(self, X: Sequence[str]) -> list[tuple[tuple[float, float], ...]]:
        """Per-sample tuple of per-dimension (p_no, p_yes) pairs."""
        return [self._distributions(text) for text in X]

    def predict(self, X: Sequence[str]) -> list[tuple[int, ...]]:
        rows = []
        for dists in self.predict_proba(X):
            rows.append(tuple(0 if p0 >= p1 else 1 for p0, p1 in dists))
        return rows

    def priors(self):
        """Trained per-dimension class priors, as prior vectors."""
        from ..fusion.types import PriorVector

        self._check_fitted()
        out = []
        for dim in self.dimensions_:
            n0, n1 = self.class_counts_[dim]
            total = n0 + n1
            out.append(PriorVector(probs=(n0 / total, n1 / total)))
        return tuple(out)

    # -- persistence -----------------------------------------------------

    def to_payload(self) -> dict:
        self._check_fitted()
        per_dim = {}
        for dim in self.dimensions_:
            per_class = self.token_counts_[dim]
            per_dim[dim] = {
                "class_counts": list(self.class_counts_[dim]),
                "degenerate": self.degenerate_[dim],
                "token_counts": [
                    {tok: per_class[c][tok] for tok in sorted(per_class[c])}
                    for c in (0, 1)
                ],
            }
        return {
            "format": _SAVE_FORMAT,
            "version": _SAVE_VERSION,
            "alpha": self.alpha,
            "min_token_freq": self.min_token_freq,
            "chain_mode": self.chain_mode,
            "dimensions": list(self.dimensions_),
            "n_samples": self.n_samples_,
            "vocab": list(self.vocab_),
            "per_dimension": per_dim,
        }

    def save_json(self, path: str | os.PathLike) -> None:
        payload = self.to_payload()
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, sort_keys=True, separators=(",", ":"))
            fh.write("\n")

    @classmethod
    def from_payload(cls, payload: dict) -> "MultidimNaiveBayes":
        if payload.get("format") != _SAVE_FORMAT:
            raise ValidationError(f"not a saved model: format={payload.get('format')!r}")
        if payload.get("version") != _SAVE_VERSION:
            raise ValidationError(f"unsupported model version {payload.get('version')!r}")
        model = cls(
            alpha=payload["alpha"],
            min_token_freq=payload["min_token_freq"],
            chain_mode=payload["chain_mode"],
        )
        dims = tuple(payload["dimensions"])
        model.dimensions_ = dims
        model.vocab_ = tuple(payload["vocab"])
        model.n_samples_ = payload["n_samples"]
        model.class_counts_ = {}
        model.token_counts_ = {}
        model.degenerate_ = {}
        for dim in dims:
            entry = payload["per_dimension"][dim]
            model.class_counts_[dim] = [int(n) for n in entry["class_counts"]]
            model.degenerate_[dim] = entry["degenerate"]
            model.token_counts_[dim] = (
                Counter({k: int(v) for k, v in entry["token_counts"][0].items()}),
                Counter({k: int(v) for k, v in entry["token_counts"][1].items()}),
            )
        return model

    @classmethod
    def load_json(cls, path: str | os.PathLike) -> "MultidimNaiveBayes":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_payload(json.load(fh))


def train_local(posts: Iterable[Post], **params) -> MultidimNaiveBayes:
    """Fit a local model from labeled posts.

    Accepts ``smoothing`` as an alias for ``alpha`` and swallows ``seed``
    (training is deterministic; the knob exists for interface uniformity).
    """
    params.pop("seed", None)
    if "smoothing" in params:
        params["alpha"] = params.pop("smoothing")
    texts, labels = [], []
    for post in posts:
        if post.gold is None:
            raise ValidationError(f"post {post.post_id!r} has no gold labels")
        texts.append(post.text)
        labels.append(tuple(post.gold))
    return MultidimNaiveBayes(**params).fit(texts, labels)


def predict_local(model: MultidimNaiveBayes, posts: Iterable[Post]) -> list[tuple[int, ...]]:
    return model.predict([post.text for post in posts])


class LocalMdcProvider:
    """Score provider backed by a fitted local model."""

    def __init__(self, model: MultidimNaiveBayes, provider_id: str = "local"):
        model._check_fitted()
        self.model = model
        self.provider_id = provider_id

    def score(self, post: Post) -> ScoreBlock:
        dists = self.model._distributions(post.text)
        return ScoreBlock(
            provider_id=self.provider_id,
            per_dimension=tuple(ScoreVector(probs=d) for d in dists),
        )


def _build_local(descriptor: ProviderDescriptor) -> LocalMdcProvider:
    cfg = dict(descriptor.config)
    path = cfg.pop("model_path", None)
    if not path:
        raise ValidationError("local provider needs a model_path")
    if cfg:
        raise ValidationError(f"unknown local provider options: {sorted(cfg)}")
    return LocalMdcProvider(
        MultidimNaiveBayes.load_json(path), provider_id=descriptor.provider_id
    )
