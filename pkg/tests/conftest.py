"""Shared fixtures: deterministic corpora and score-block builders."""

from __future__ import annotations

import random
from pathlib import Path

import pytest

from forumfuse.core.schema import DEFAULT_SCHEMA, Area
from forumfuse.core.types import Post
from forumfuse.fusion.types import ScoreBlock

DATA_DIR = Path(__file__).parent / "data"

# One signal token per dimension so a bag-of-words model can learn the label,
# plus neutral filler shared by both classes.
SIGNAL_TOKENS = {
    "opinion": "think",
    "question": "how",
    "answer": "because",
    "sentiment": "great",
    "confusion": "lost",
    "urgency": "deadline",
}
FILLER_TOKENS = ("course", "week", "module", "thread", "post", "thanks")

LABEL_RATES = {
    "opinion": 0.3,
    "question": 0.4,
    "answer": 0.35,
    "sentiment": 0.45,
    "confusion": 0.25,
    "urgency": 0.2,
}


def make_post(post_id="p1", text="hello world", gold=None, course="c1", area=Area.EDUCATION):
    return Post(post_id=post_id, course_id=course, area=area, text=text, gold=gold)


def synth_corpus(n, seed=0, courses=("c1",), area=Area.EDUCATION, noise=0.15):
    """Gold-labeled posts whose text carries the label signal with some noise.

    noise is the chance a signal token is dropped or spuriously added, so the
    corpus is learnable but not trivially separable.
    """
    rng = random.Random(f"synth:{seed}")
    posts = []
    for i in range(n):
        labels = []
        words = [rng.choice(FILLER_TOKENS), rng.choice(FILLER_TOKENS)]
        for dim in DEFAULT_SCHEMA.names:
            label = 1 if rng.random() < LABEL_RATES[dim] else 0
            labels.append(label)
            has_token = label == 1
            if rng.random() < noise:
                has_token = not has_token
            if has_token:
                words.append(SIGNAL_TOKENS[dim])
        rng.shuffle(words)
        posts.append(
            Post(
                post_id=f"s{i:04d}",
                course_id=courses[i % len(courses)],
                area=area,
                text=" ".join(words),
                gold=tuple(labels),
            )
        )
    return posts


def block(provider_id, rows):
    """ScoreBlock from one (p0, p1) pair per dimension; a single pair is broadcast."""
    if rows and isinstance(rows[0], (int, float)):
        rows = [rows] * len(DEFAULT_SCHEMA.names)
    return ScoreBlock.from_lists(provider_id, [list(r) for r in rows])


# Token pairs for the answer = NOT question corpus: the "yes" word marks
# label 1, the "no" word label 0, each written twice so the evidence is
# decisive. The corpus is fully deterministic; no RNG is involved.
CHAIN_PAIRS = (
    ("opinion", ("think", "note")),
    ("question", ("wondering", "update")),
    ("sentiment", ("great", "plain")),
    ("confusion", ("lost", "clear")),
    ("urgency", ("deadline", "later")),
)


def _chain_post(post_id, index):
    op = index % 2
    qu = (index // 2) % 2
    se = (index // 4) % 2
    co = (index // 8) % 2
    ur = (index // 16) % 2
    flags = {"opinion": op, "question": qu, "sentiment": se, "confusion": co, "urgency": ur}
    words = []
    for dim, (yes, no) in CHAIN_PAIRS:
        word = yes if flags[dim] else no
        words.extend([word, word])
    gold = (op, qu, 1 - qu, se, co, ur)
    return Post(post_id=post_id, course_id="cc", area=Area.EDUCATION,
                text=" ".join(words), gold=gold)


def chain_benefit_corpus():
    """Train/test sets where the answer label is the negation of question.

    Ten test posts contain only never-seen tokens; with no text evidence the
    answer label is only recoverable through the question dependency, which is
    exactly what chained heads exploit.
    """
    train = [_chain_post(f"t{i:03d}", i) for i in range(80)]
    test = [_chain_post(f"r{i:03d}", i) for i in range(30)]
    for i in range(10):
        test.append(Post(
            post_id=f"o{i:02d}", course_id="cc", area=Area.EDUCATION,
            text="zzz yyy xxx www vvv",
            gold=(0, 0, 1, 0, 0, 0),
        ))
    return train, test


@pytest.fixture
def data_dir():
    return DATA_DIR


@pytest.fixture
def schema():
    return DEFAULT_SCHEMA
