import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_dict
from oracles import dp_similarity
from weft.dictionary import (
    Dictionary,
    Synset,
    group_synsets,
    propose_keys,
    term_frequencies,
)
from weft.errors import DictionaryError, InputError


def doc(*texts):
    return [(None, t) for t in texts]


class TestTermFrequencies:
    def test_term_in_every_doc(self):
        stats = term_frequencies([doc("Price"), doc("Price")])
        assert stats.occurrences["Price"] == 2
        assert stats.doc_counts["Price"] == 2

    def test_repeated_in_one_doc(self):
        # brute force: 2 occurrences, 1 containing document out of 3
        stats = term_frequencies([doc("x", "x"), doc("y"), doc("z")])
        assert (stats.occurrences["x"], stats.doc_counts["x"]) == (2, 1)

    def test_whitespace_variants_are_one_term(self):
        stats = term_frequencies([doc("Price "), doc("Price")])
        assert stats.doc_counts == {"Price": 2}

    def test_empty_sample_rejected(self):
        with pytest.raises(InputError):
            term_frequencies([])

    def test_docs_counted_against_sample_size(self):
        stats = term_frequencies([doc("a"), doc("b"), doc()])
        assert stats.sample_size == 3


class TestProposeKeys:
    def test_planted_key_recovered(self):
        docs = [doc("Key", f"value {i}") for i in range(9)] + [doc("other")]
        stats = term_frequencies(docs)
        assert "Key" in propose_keys(stats, 0.8)

    def test_rare_value_excluded(self):
        docs = [doc("Key", f"value {i}") for i in range(10)]
        stats = term_frequencies(docs)
        proposed = propose_keys(stats, 0.8)
        assert proposed == ["Key"]

    def test_zero_ratio_keeps_all(self):
        stats = term_frequencies([doc("a", "b"), doc("a")])
        assert set(propose_keys(stats, 0.0)) == {"a", "b"}

    def test_sorted_by_doc_count_then_term(self):
        stats = term_frequencies([doc("b", "a"), doc("a", "c"), doc("a", "b")])
        assert propose_keys(stats, 0.0) == ["a", "b", "c"]

    def test_invalid_ratio_rejected(self):
        stats = term_frequencies([doc("a")])
        with pytest.raises(InputError):
            propose_keys(stats, 1.5)


class TestGroupSynsets:
    def test_singular_plural_merge(self):
        # oracle: lev("Name","Names")=1, similarity 0.8
        assert dp_similarity("Name", "Names") == pytest.approx(0.8)
        dictionary = group_synsets(["Name", "Names"], 0.8)
        assert len(dictionary) == 1
        synset = dictionary.ordered()[0]
        assert synset.canonical == "Name"
        assert set(synset.variants) == {"Name", "Names"}

    def test_distant_terms_stay_apart(self):
        assert dp_similarity("Name", "Price") == pytest.approx(0.2)
        dictionary = group_synsets(["Name", "Price"], 0.8)
        assert len(dictionary) == 2

    def test_single_candidate(self):
        dictionary = group_synsets(["Name"], 0.8)
        assert len(dictionary) == 1
        assert dictionary.ordered()[0].id == "K1"

    def test_ids_assigned_in_canonical_order(self):
        dictionary = group_synsets(["Zebra", "Apple"], 0.9)
        ordered = dictionary.ordered()
        assert [s.id for s in ordered] == ["K1", "K2"]
        assert [s.canonical for s in ordered] == ["Apple", "Zebra"]

    def test_canonical_prefers_doc_count(self):
        docs = [doc("Names", "Name")] * 3 + [doc("Names")] * 2
        stats = term_frequencies(docs)
        dictionary = group_synsets(["Name", "Names"], 0.8, stats=stats)
        assert dictionary.ordered()[0].canonical == "Names"

    def test_empty_candidates_rejected(self):
        with pytest.raises(InputError):
            group_synsets([], 0.8)

    @given(st.lists(st.sampled_from(["Name", "Names", "Price", "Prices", "Title"]),
                    min_size=1, max_size=5, unique=True))
    @settings(max_examples=50)
    def test_permutation_invariant(self, terms):
        rng = random.Random(7)
        baseline = group_synsets(terms, 0.8).to_json()
        for _ in range(5):
            shuffled = terms[:]
            rng.shuffle(shuffled)
            assert group_synsets(shuffled, 0.8).to_json() == baseline

    @given(
        st.lists(st.text(alphabet="abcd", min_size=1, max_size=6), min_size=1,
                 max_size=8, unique=True),
        st.floats(min_value=0.1, max_value=0.9),
        st.floats(min_value=0.0, max_value=0.5),
    )
    @settings(max_examples=60)
    def test_tightening_threshold_refines_groups(self, terms, t1, delta):
        t2 = min(1.0, t1 + delta)
        loose = group_synsets(terms, t1)
        tight = group_synsets(terms, t2)
        member_of_loose = {}
        for synset in loose.synsets.values():
            for variant in synset.variants:
                member_of_loose[variant] = synset.id
        for synset in tight.synsets.values():
            owners = {member_of_loose[v] for v in synset.variants}
            assert len(owners) == 1  # every tight group sits inside one loose group


class TestEdits:
    def build(self):
        return make_dict(
            ("K1", "Name", ["Name"]),
            ("K2", "Names", ["Names", "The names"]),
            ("K3", "Price", ["Price"]),
        )

    def test_merge_absorbs_and_removes(self):
        d = self.build()
        d.merge_synsets("K1", "K2")
        assert "K2" not in d
        assert set(d.get("K1").variants) == {"Name", "Names", "The names"}

    def test_merge_bumps_version_once(self):
        d = self.build()
        before = d.version
        d.merge_synsets("K1", "K2")
        assert d.version == before + 1

    def test_parent_cycle_rejected(self):
        d = self.build()
        d.set_parent("K2", "K1")
        with pytest.raises(DictionaryError):
            d.set_parent("K1", "K2")
        assert d.get("K1").parent is None  # rejected edit left no trace

    def test_add_variant(self):
        d = self.build()
        before = d.version
        d.add_variant("K1", "Titre du marché")
        assert "Titre du marché" in d.get("K1").variants
        assert d.version == before + 1

    def test_add_variant_collision_rejected(self):
        d = self.build()
        with pytest.raises(DictionaryError):
            d.add_variant("K1", "Price")

    def test_add_existing_variant_is_noop(self):
        d = self.build()
        before = d.version
        d.add_variant("K1", "Name")
        assert d.version == before

    def test_split(self):
        d = self.build()
        new_id = d.split_synset("K2", ["The names"])
        assert set(d.get("K2").variants) == {"Names"}
        assert set(d.get(new_id).variants) == {"The names"}

    def test_remove_reparents_children(self):
        d = self.build()
        d.set_parent("K2", "K1")
        d.set_parent("K3", "K2")
        d.remove_synset("K2")
        assert d.get("K3").parent == "K1"

    def test_unknown_id_rejected(self):
        d = self.build()
        with pytest.raises(DictionaryError):
            d.merge_synsets("K1", "K99")


@st.composite
def edit_sequences(draw):
    ops = draw(st.lists(st.sampled_from(["add", "merge", "parent", "remove", "split"]),
                        max_size=12))
    return ops


@given(edit_sequences(), st.randoms(use_true_random=False))
@settings(max_examples=60)
def test_random_edits_preserve_invariants(ops, rng):
    d = make_dict(*[(f"K{i}", f"term{i}", [f"term{i}", f"term{i}s"]) for i in range(1, 6)])
    for op in ops:
        ids = sorted(d.synsets)
        if not ids:
            break
        try:
            if op == "add":
                d.add_variant(rng.choice(ids), f"v{rng.randrange(100)}")
            elif op == "merge" and len(ids) > 1:
                a, b = rng.sample(ids, 2)
                d.merge_synsets(a, b)
            elif op == "parent":
                a = rng.choice(ids)
                b = rng.choice(ids + [None])
                if b != a:
                    d.set_parent(a, b)
            elif op == "remove" and len(ids) > 1:
                d.remove_synset(rng.choice(ids))
            elif op == "split":
                sid = rng.choice(ids)
                variants = d.get(sid).variants
                if len(variants) > 1:
                    d.split_synset(sid, [variants[-1]])
        except DictionaryError:
            pass  # rejected edits are fine; invariants must still hold
        d.validate()


class TestJsonFormat:
    def test_round_trip(self):
        d = make_dict(
            ("K1", "Name", ["Name", "Names"]),
            ("K2", "Price", ["Price"], "en", "K1"),
        )
        restored = Dictionary.from_json(d.to_json())
        assert restored.to_json() == d.to_json()

    def test_contract_keys(self):
        d = make_dict(("K1", "Name", ["Name"]))
        raw = json.loads(d.to_json())
        assert set(raw) == {"language", "version", "synsets"}
        assert set(raw["synsets"][0]) == {"id", "canonical", "variants"}

    def test_parent_serialized_when_set(self):
        d = make_dict(("K1", "A", ["A"]), ("K2", "B", ["B"], "en", "K1"))
        raw = json.loads(d.to_json())
        by_id = {s["id"]: s for s in raw["synsets"]}
        assert by_id["K2"]["parent"] == "K1"
        assert "parent" not in by_id["K1"]

    def test_file_round_trip(self, tmp_path):
        d = make_dict(("K1", "Name", ["Name"]))
        path = tmp_path / "dict.json"
        d.save(path)
        assert Dictionary.load(path).to_json() == d.to_json()
