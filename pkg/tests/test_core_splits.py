"""Split enumeration: seeded stratified holdouts and course/area partitions."""

import pytest

from forumfuse.core.schema import Area
from forumfuse.core.splits import SplitParams, make_splits
from forumfuse.core.types import Post
from forumfuse.errors import SplitInfeasibleError, ValidationError

from conftest import make_post, synth_corpus


def labeled(post_id, course, area, urgency):
    gold = (0, 0, 0, 0, 0, urgency)
    return Post(post_id=post_id, course_id=course, area=area, text=f"body of {post_id}", gold=gold)


class TestIntracourse:
    def test_eighty_twenty_holdout_sizes(self):
        corpus = synth_corpus(100, seed=3, courses=("c1",))
        [split] = make_splits(corpus, "intracourse", SplitParams(train_fraction=0.8, seed=7))
        assert split.name == "intracourse:c1"
        assert len(split.train) == 80
        assert len(split.test) == 20
        assert set(split.train).isdisjoint(split.test)
        assert sorted(split.train + split.test) == sorted(p.post_id for p in corpus)

    def test_urgency_stratification_is_exact(self):
        corpus = [
            labeled(f"u{i:03d}", "c1", Area.EDUCATION, 1 if i < 10 else 0) for i in range(100)
        ]
        [split] = make_splits(corpus, "intracourse", SplitParams(train_fraction=0.8, seed=0))
        urgent_train = [pid for pid in split.train if pid < "u010"]
        assert len(urgent_train) == 8
        assert len(split.train) == 80

    def test_same_seed_reproduces_split(self):
        corpus = synth_corpus(60, seed=5)
        first = make_splits(corpus, "intracourse", SplitParams(seed=11))
        second = make_splits(corpus, "intracourse", SplitParams(seed=11))
        assert first == second

    def test_different_seed_changes_membership(self):
        corpus = synth_corpus(60, seed=5)
        [a] = make_splits(corpus, "intracourse", SplitParams(seed=0))
        [b] = make_splits(corpus, "intracourse", SplitParams(seed=1))
        assert a.train != b.train

    def test_unlabeled_posts_form_their_own_stratum(self):
        corpus = [make_post(post_id=f"n{i}", text=f"note {i}", course="c1") for i in range(10)]
        [split] = make_splits(corpus, "intracourse", SplitParams(train_fraction=0.8))
        assert len(split.train) == 8 and len(split.test) == 2

    def test_one_split_per_course(self):
        corpus = synth_corpus(40, seed=2, courses=("alpha", "beta"))
        splits = make_splits(corpus, "intracourse", SplitParams())
        assert [s.name for s in splits] == ["intracourse:alpha", "intracourse:beta"]

    def test_course_filter(self):
        corpus = synth_corpus(40, seed=2, courses=("alpha", "beta"))
        splits = make_splits(corpus, "intracourse", SplitParams(course="beta"))
        assert [s.name for s in splits] == ["intracourse:beta"]

    def test_single_post_course_is_infeasible(self):
        corpus = [make_post(post_id="only", text="lone post")]
        with pytest.raises(SplitInfeasibleError, match="at least 2"):
            make_splits(corpus, "intracourse")


class TestIntradomain:
    def two_course_corpus(self):
        return [
            labeled("a1", "A", Area.EDUCATION, 0),
            labeled("a2", "A", Area.EDUCATION, 1),
            labeled("b1", "B", Area.EDUCATION, 0),
            labeled("b2", "B", Area.EDUCATION, 1),
        ]

    def test_two_courses_give_both_holdouts(self):
        splits = make_splits(self.two_course_corpus(), "intradomain")
        assert [s.name for s in splits] == [
            "intradomain:Education:test=A",
            "intradomain:Education:test=B",
        ]
        by_name = {s.name: s for s in splits}
        assert by_name["intradomain:Education:test=B"].train == ("a1", "a2")
        assert by_name["intradomain:Education:test=B"].test == ("b1", "b2")

    def test_test_course_narrowing(self):
        [split] = make_splits(
            self.two_course_corpus(), "intradomain", SplitParams(test_course="B")
        )
        assert split.train == ("a1", "a2")
        assert split.test == ("b1", "b2")

    def test_single_course_areas_are_skipped(self):
        corpus = self.two_course_corpus() + [labeled("m1", "M", Area.MEDICINE, 0)]
        splits = make_splits(corpus, "intradomain")
        assert all(s.name.startswith("intradomain:Education") for s in splits)

    def test_all_single_course_is_infeasible(self):
        corpus = [
            labeled("a1", "A", Area.EDUCATION, 0),
            labeled("m1", "M", Area.MEDICINE, 0),
        ]
        with pytest.raises(SplitInfeasibleError, match="two or more courses"):
            make_splits(corpus, "intradomain")


class TestCrossdomain:
    def three_area_corpus(self):
        posts = []
        for i, (course, area) in enumerate([
            ("e1", Area.EDUCATION), ("h1", Area.HUMANITIES_SCIENCE), ("m1", Area.MEDICINE),
        ]):
            posts.append(labeled(f"x{i}a", course, area, 0))
            posts.append(labeled(f"x{i}b", course, area, 1))
        return posts

    def test_three_areas_give_six_ordered_pairs(self):
        splits = make_splits(self.three_area_corpus(), "crossdomain")
        names = [s.name for s in splits]
        assert len(names) == 6
        assert "crossdomain:Education->Medicine" in names
        assert "crossdomain:Medicine->Education" in names
        for split in splits:
            assert set(split.train).isdisjoint(split.test)

    def test_area_param_fixes_training_area(self):
        splits = make_splits(
            self.three_area_corpus(), "crossdomain", SplitParams(area="Medicine")
        )
        assert [s.name for s in splits] == [
            "crossdomain:Medicine->Education",
            "crossdomain:Medicine->Humanities/Science",
        ]

    def test_single_area_is_infeasible(self):
        with pytest.raises(SplitInfeasibleError, match="two areas"):
            make_splits(synth_corpus(10), "crossdomain")


class TestMakeSplitsGuards:
    def test_empty_corpus(self):
        with pytest.raises(SplitInfeasibleError, match="empty corpus"):
            make_splits([], "intracourse")

    def test_unknown_configuration(self):
        with pytest.raises(ValidationError, match="unknown configuration"):
            make_splits(synth_corpus(4), "timetravel")

    def test_train_fraction_bounds(self):
        with pytest.raises(ValidationError, match="train_fraction"):
            SplitParams(train_fraction=1.0)
        with pytest.raises(ValidationError, match="train_fraction"):
            SplitParams(train_fraction=0.0)
