import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import dp_edit_distance, dp_similarity, prefix_similarity
from weft.structure.paths import HtmlPath, PathStep, PathStrategy
from weft.structure.similarity import (
    path_edit_similarity,
    path_prefix_similarity,
    string_similarity,
)


def make_path(tags):
    counters = {}
    steps = []
    for tag in tags:
        counters[tag] = counters.get(tag, 0) + 1
        steps.append(PathStep(tag, counters[tag]))
    return HtmlPath(tuple(steps))


class TestStringSimilarity:
    def test_identity(self):
        assert string_similarity("Name", "Name") == 1.0

    def test_both_empty(self):
        assert string_similarity("", "") == 1.0

    def test_one_edit(self):
        # oracle: lev("Name", "Names") = 1, max len 5
        assert dp_edit_distance("Name", "Names") == 1
        assert string_similarity("Name", "Names") == pytest.approx(0.8)

    def test_disjoint(self):
        assert dp_edit_distance("abc", "xyz") == 3
        assert string_similarity("abc", "xyz") == 0.0

    @given(st.text(max_size=24), st.text(max_size=24))
    def test_matches_oracle_and_axioms(self, a, b):
        value = string_similarity(a, b)
        assert value == dp_similarity(a, b)
        assert 0.0 <= value <= 1.0
        assert value == string_similarity(b, a)
        assert string_similarity(a, a) == 1.0


class TestPathSimilarities:
    def test_edit_identity(self):
        p = make_path(["html", "body", "div", "p"])
        assert path_edit_similarity(p, p) == 1.0
        assert path_prefix_similarity(p, p) == 1.0

    def test_edit_one_substitution(self):
        p = make_path(["html", "body", "div", "p"])
        q = make_path(["html", "body", "div", "span"])
        assert dp_edit_distance(p.tags(), q.tags()) == 1
        assert path_edit_similarity(p, q) == pytest.approx(0.75)

    def test_edit_disjoint(self):
        p = make_path(["a"])
        q = make_path(["b", "c", "d"])
        assert dp_edit_distance(p.tags(), q.tags()) == 3
        assert path_edit_similarity(p, q) == 0.0

    def test_prefix_half(self):
        p = make_path(["html", "body", "div", "p"])
        q = make_path(["html", "body", "span"])
        assert path_prefix_similarity(p, q) == pytest.approx(0.5)

    def test_prefix_disjoint_first_step(self):
        p = make_path(["div", "p"])
        q = make_path(["span", "p"])
        assert path_prefix_similarity(p, q) == 0.0

    def test_strategy_changes_tokens(self):
        # same tags, different ordinals: identical under TAG_ONLY only
        p = HtmlPath((PathStep("div", 1), PathStep("p", 1)))
        q = HtmlPath((PathStep("div", 2), PathStep("p", 2)))
        assert path_edit_similarity(p, q, PathStrategy.TAG_ONLY) == 1.0
        assert path_edit_similarity(p, q, PathStrategy.UNIQUE_TAG) == 0.0

    @given(
        st.lists(st.sampled_from("html body div span p td".split()), max_size=8),
        st.lists(st.sampled_from("html body div span p td".split()), max_size=8),
    )
    def test_matches_oracles(self, tags_a, tags_b):
        p, q = make_path(tags_a), make_path(tags_b)
        strategy = PathStrategy.UNIQUE_TAG
        assert path_edit_similarity(p, q, strategy) == dp_similarity(
            p.tokens(strategy), q.tokens(strategy)
        )
        assert path_prefix_similarity(p, q, strategy) == prefix_similarity(
            p.tokens(strategy), q.tokens(strategy)
        )
        for fn in (path_edit_similarity, path_prefix_similarity):
            value = fn(p, q, strategy)
            assert 0.0 <= value <= 1.0
            assert value == fn(q, p, strategy)


def test_random_pairs_agree_with_oracle():
    rng = random.Random(20240811)
    alphabet = "abcdefgh "
    for _ in range(500):
        a = "".join(rng.choice(alphabet) for _ in range(rng.randrange(0, 30)))
        b = "".join(rng.choice(alphabet) for _ in range(rng.randrange(0, 30)))
        assert string_similarity(a, b) == dp_similarity(a, b)
