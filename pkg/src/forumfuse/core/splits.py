"""Train/test split construction for the three evaluation configurations.

* intracourse  - train and test drawn from the same course (seeded random
                 split, stratified by the urgency gold label).
* intradomain  - train on all but one course of an area, test on the held-out
                 course; every ordered hold-out assignment is enumerated.
* crossdomain  - train on all posts of one area, test on another; every
                 ordered area pair is enumerated.
"""
from __future__ import annotations

import random
from collections import defaultdict
from dataclasses import dataclass
from typing import Optional, Sequence

from forumfuse.core.schema import DIMENSION_NAMES
from forumfuse.core.types import DatasetSplit, Post
from forumfuse.errors import SplitInfeasibleError, ValidationError

INTRACOURSE = "intracourse"
INTRADOMAIN = "intradomain"
CROSSDOMAIN = "crossdomain"

_URGENCY_INDEX = DIMENSION_NAMES.index("urgency")


@dataclass(frozen=True)
class SplitParams:
    """Knobs for :func:`make_splits`.

    ``course``/``area``/``test_course`` narrow the enumeration to matching
    splits; ``train_fraction`` and ``seed`` only affect intracourse splits.
    """

    train_fraction: float = 0.8
    seed: int = 0
    course: Optional[str] = None
    area: Optional[str] = None
    test_course: Optional[str] = None

    def __post_init__(self):
        if not (0.0 < self.train_fraction < 1.0):
            raise ValidationError(f"train_fraction must be in (0, 1), got {self.train_fraction}")


def _stratified_holdout(posts: Sequence[Post], fraction: float, seed: int) -> tuple[list[str], list[str]]:
    """Seeded stratified split; train size is round(fraction * n) exactly.

    Strata are the urgency gold label (posts without gold form their own
    stratum). Per-stratum train quotas are floor(fraction * n_s), and the
    remainder is distributed by largest fractional part so the global train
    size is exact despite rounding.
    """
    strata: dict[str, list[Post]] = defaultdict(list)
    for post in posts:
        key = str(post.gold[_URGENCY_INDEX]) if post.gold is not None else "unlabeled"
        strata[key].append(post)

    target_train = round(fraction * len(posts))
    quotas = {key: int(fraction * len(members)) for key, members in strata.items()}
    # Largest fractional remainder first; stratum size then key for determinism.
    by_remainder = sorted(
        strata,
        key=lambda k: (-(fraction * len(strata[k]) - quotas[k]), -len(strata[k]), k),
    )
    shortfall = target_train - sum(quotas.values())
    while shortfall > 0:
        progressed = False
        for key in by_remainder:
            if shortfall == 0:
                break
            if quotas[key] < len(strata[key]):
                quotas[key] += 1
                shortfall -= 1
                progressed = True
        if not progressed:
            break

    train: list[str] = []
    test: list[str] = []
    for key in sorted(strata):
        members = sorted(strata[key], key=lambda p: p.post_id)
        rng = random.Random(f"{seed}:{key}")
        rng.shuffle(members)
        take = quotas[key]
        train.extend(p.post_id for p in members[:take])
        test.extend(p.post_id for p in members[take:])
    return sorted(train), sorted(test)


def _by_course(corpus: Sequence[Post]) -> dict[str, list[Post]]:
    courses: dict[str, list[Post]] = defaultdict(list)
    for post in corpus:
        courses[post.course_id].append(post)
    return courses


def _by_area(corpus: Sequence[Post]) -> dict[str, list[Post]]:
    areas: dict[str, list[Post]] = defaultdict(list)
    for post in corpus:
        areas[post.area.value].append(post)
    return areas


def make_splits(
    corpus: Sequence[Post],
    configuration: str,
    params: SplitParams | None = None,
) -> list[DatasetSplit]:
    """Build every split the configuration admits, alphabetically ordered.

    Raises :class:`SplitInfeasibleError` when the corpus cannot support the
    configuration (e.g. an intradomain split over a single-course corpus).
    """
    params = params or SplitParams()
    if not corpus:
        raise SplitInfeasibleError("cannot split an empty corpus")
    configuration = configuration.lower()

    if configuration == INTRACOURSE:
        return _intracourse(corpus, params)
    if configuration == INTRADOMAIN:
        return _intradomain(corpus, params)
    if configuration == CROSSDOMAIN:
        return _crossdomain(corpus, params)
    raise ValidationError(
        f"unknown configuration {configuration!r}; expected one of "
        f"({INTRACOURSE!r}, {INTRADOMAIN!r}, {CROSSDOMAIN!r})"
    )


def _intracourse(corpus: Sequence[Post], params: SplitParams) -> list[DatasetSplit]:
    courses = _by_course(corpus)
    wanted = [params.course] if params.course else sorted(courses)
    splits = []
    for course in wanted:
        posts = courses.get(course)
        if posts is None:
            raise SplitInfeasibleError(f"course {course!r} not present in corpus")
        if len(posts) < 2:
            raise SplitInfeasibleError(f"course {course!r} has {len(posts)} post(s); need at least 2")
        train, test = _stratified_holdout(posts, params.train_fraction, params.seed)
        if not train or not test:
            raise SplitInfeasibleError(
                f"course {course!r}: train_fraction {params.train_fraction} leaves an empty side"
            )
        splits.append(DatasetSplit(
            name=f"intracourse:{course}",
            train=tuple(train),
            test=tuple(test),
            configuration=INTRACOURSE,
        ))
    return splits


def _intradomain(corpus: Sequence[Post], params: SplitParams) -> list[DatasetSplit]:
    areas = _by_area(corpus)
    wanted_areas = [params.area] if params.area else sorted(areas)
    splits = []
    for area in wanted_areas:
        posts = areas.get(area)
        if posts is None:
            raise SplitInfeasibleError(f"area {area!r} not present in corpus")
        courses = _by_course(posts)
        if len(courses) < 2:
            continue
        test_courses = [params.test_course] if params.test_course else sorted(courses)
        for test_course in test_courses:
            if test_course not in courses:
                raise SplitInfeasibleError(f"course {test_course!r} not present in area {area!r}")
            train_ids = sorted(
                p.post_id for c, members in courses.items() if c != test_course for p in members
            )
            test_ids = sorted(p.post_id for p in courses[test_course])
            splits.append(DatasetSplit(
                name=f"intradomain:{area}:test={test_course}",
                train=tuple(train_ids),
                test=tuple(test_ids),
                configuration=INTRADOMAIN,
            ))
    if not splits:
        raise SplitInfeasibleError(
            "intradomain needs at least one area containing two or more courses"
        )
    return splits


def _crossdomain(corpus: Sequence[Post], params: SplitParams) -> list[DatasetSplit]:
    areas = _by_area(corpus)
    if len(areas) < 2:
        raise SplitInfeasibleError("crossdomain needs posts from at least two areas")
    names = sorted(areas)
    splits = []
    for train_area in names:
        if params.area and train_area != params.area:
            continue
        for test_area in names:
            if test_area == train_area:
                continue
            splits.append(DatasetSplit(
                name=f"crossdomain:{train_area}->{test_area}",
                train=tuple(sorted(p.post_id for p in areas[train_area])),
                test=tuple(sorted(p.post_id for p in areas[test_area])),
                configuration=CROSSDOMAIN,
            ))
    return splits
