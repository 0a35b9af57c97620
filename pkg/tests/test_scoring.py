import logging
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from anchorscore.align import AnchorPair, OrthogonalMap, apply_map
from anchorscore.corpus import build_corpus
from anchorscore.errors import DimensionMismatchError, EmptyInputError
from anchorscore.merge import WordUnit
from anchorscore.scoring import (
    CorpusSide,
    IdfTable,
    ScoreMode,
    greedy_match_score,
    idf_weights,
    score_pair,
)
from corpus_helpers import make_seq, make_words
from oracles import brute_score


def vector_lists(dimension, count):
    # Dyadic-grid coordinates in [-5, 5]. Below about 1e-154 the squared
    # norm underflows into subnormals, where no sqrt-of-sum-of-squares
    # route (the library's or the oracle's) keeps full precision, so the
    # comparison domain stays at embedding-like magnitudes.
    coords = st.integers(-320, 320).map(lambda k: k / 64.0)
    one = st.lists(coords, min_size=dimension, max_size=dimension)
    return st.lists(one, min_size=count, max_size=count)


@st.composite
def score_instance(draw):
    dimension = draw(st.integers(1, 4))
    n_cand = draw(st.integers(1, 8))
    n_ref = draw(st.integers(1, 8))
    cand = draw(vector_lists(dimension, n_cand))
    ref = draw(vector_lists(dimension, n_ref))
    return cand, ref


def words_from(vectors, system_id="mt1"):
    return make_words(
        [(f"w{i}", v) for i, v in enumerate(vectors)], system_id=system_id
    )


class TestGreedyMatchOracle:
    @settings(max_examples=300, deadline=None)
    @given(instance=score_instance())
    def test_matches_brute_force(self, instance):
        cand, ref = instance
        triple = greedy_match_score(words_from(cand), words_from(ref, "source"))
        precision, recall, f1 = brute_score(cand, ref)
        assert abs(triple.precision - precision) <= 1e-12
        assert abs(triple.recall - recall) <= 1e-12
        assert abs(triple.f1 - f1) <= 1e-12

    @settings(max_examples=100, deadline=None)
    @given(instance=score_instance())
    def test_range_bounds(self, instance):
        cand, ref = instance
        triple = greedy_match_score(words_from(cand), words_from(ref, "source"))
        assert abs(triple.precision) <= 1.0
        assert abs(triple.recall) <= 1.0

    @settings(max_examples=100, deadline=None)
    @given(instance=score_instance())
    def test_nonnegative_inputs_give_unit_interval(self, instance):
        cand, ref = instance
        cand = [[abs(x) for x in v] for v in cand]
        ref = [[abs(x) for x in v] for v in ref]
        triple = greedy_match_score(words_from(cand), words_from(ref, "source"))
        for value in (triple.precision, triple.recall, triple.f1):
            assert 0.0 <= value <= 1.0

    @settings(max_examples=100, deadline=None)
    @given(instance=score_instance())
    def test_swap_symmetry(self, instance):
        cand, ref = instance
        forward = greedy_match_score(words_from(cand), words_from(ref, "source"))
        backward = greedy_match_score(words_from(ref, "source"), words_from(cand))
        assert forward.precision == backward.recall
        assert forward.recall == backward.precision
        assert forward.f1 == backward.f1

    @settings(max_examples=100, deadline=None)
    @given(instance=score_instance(), scale=st.floats(0.01, 100.0))
    def test_scale_invariance(self, instance, scale):
        cand, ref = instance
        scaled = [[x * scale for x in v] for v in cand]
        base = greedy_match_score(words_from(cand), words_from(ref, "source"))
        rescaled = greedy_match_score(words_from(scaled), words_from(ref, "source"))
        assert abs(base.precision - rescaled.precision) <= 1e-12
        assert abs(base.recall - rescaled.recall) <= 1e-12
        assert abs(base.f1 - rescaled.f1) <= 1e-12


class TestExactSelfScore:
    def test_self_score_is_exactly_one(self, rng):
        vectors = rng.normal(size=(7, 3)).tolist()
        left = words_from(vectors)
        right = words_from(vectors, "source")
        triple = greedy_match_score(left, right)
        assert triple.precision == 1.0
        assert triple.recall == 1.0
        assert triple.f1 == 1.0

    def test_self_score_survives_orthogonal_map(self, rng):
        q, r = np.linalg.qr(rng.normal(size=(5, 5)))
        mapping = OrthogonalMap(omega=q, dimension=5, anchor_count=6, residual=0.0)
        words = words_from(rng.normal(size=(4, 5)).tolist())
        mapped = apply_map(mapping, words)
        triple = greedy_match_score(mapped, mapped)
        assert triple.f1 == 1.0

    def test_awkward_magnitudes_still_exact(self):
        vectors = [[1e-30, 3e7], [7.1e-9, -2.3e11]]
        triple = greedy_match_score(words_from(vectors), words_from(vectors, "source"))
        assert triple.f1 == 1.0


class TestEdgeCases:
    def test_empty_candidate_rejected(self):
        empty = make_words([], system_id="mt1")
        ref = words_from([[1.0]], "source")
        with pytest.raises(EmptyInputError):
            greedy_match_score(empty, ref)
        with pytest.raises(EmptyInputError):
            greedy_match_score(ref, empty)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            greedy_match_score(
                words_from([[1.0, 2.0]]), words_from([[1.0]], "source")
            )

    def test_zero_vector_contributes_zero(self, caplog):
        cand = words_from([[0.0, 0.0]])
        ref = words_from([[1.0, 0.0]], "source")
        with caplog.at_level(logging.WARNING):
            triple = greedy_match_score(cand, ref)
        assert triple.precision == 0.0
        assert triple.recall == 0.0
        assert triple.f1 == 0.0
        assert any("zero-vector" in m for m in caplog.messages)

    def test_f1_zero_when_p_plus_r_zero(self):
        cand = words_from([[1.0, 0.0]])
        ref = words_from([[0.0, 1.0]], "source")
        triple = greedy_match_score(cand, ref)
        assert triple.precision == 0.0 and triple.recall == 0.0
        assert triple.f1 == 0.0

    def test_f1_formula(self):
        cand = words_from([[1.0, 0.0], [1.0, 1.0]])
        ref = words_from([[1.0, 0.0]], "source")
        triple = greedy_match_score(cand, ref)
        expected = 2 * triple.precision * triple.recall / (
            triple.precision + triple.recall
        )
        assert abs(triple.f1 - expected) <= 1e-15


class TestIdfWeighting:
    @settings(max_examples=150, deadline=None)
    @given(instance=score_instance(), data=st.data())
    def test_weighted_matches_brute_force(self, instance, data):
        cand, ref = instance
        weight = st.floats(0.0, 3.0, allow_nan=False)
        cand_w = data.draw(
            st.lists(weight, min_size=len(cand), max_size=len(cand))
        )
        ref_w = data.draw(st.lists(weight, min_size=len(ref), max_size=len(ref)))
        ref_table = IdfTable(
            weights={f"w{i}": w for i, w in enumerate(ref_w)}, default_weight=0.0
        )
        cand_table = IdfTable(
            weights={f"w{i}": w for i, w in enumerate(cand_w)}, default_weight=0.0
        )
        triple = greedy_match_score(
            words_from(cand),
            words_from(ref, "source"),
            weights=ref_table,
            candidate_weights=cand_table,
        )
        precision, recall, f1 = brute_score(
            cand, ref, cand_weights=cand_w, ref_weights=ref_w
        )
        assert abs(triple.precision - precision) <= 1e-12
        assert abs(triple.recall - recall) <= 1e-12
        assert abs(triple.f1 - f1) <= 1e-12

    def test_single_table_weights_both_sides(self):
        cand = [[1.0, 0.0], [0.0, 1.0]]
        ref = [[1.0, 1.0]]
        table = IdfTable(weights={"w0": 2.0, "w1": 1.0})
        triple = greedy_match_score(
            words_from(cand), words_from(ref, "source"), weights=table
        )
        precision, recall, _ = brute_score(
            cand, ref, cand_weights=[2.0, 1.0], ref_weights=[2.0]
        )
        assert abs(triple.precision - precision) <= 1e-12
        assert abs(triple.recall - recall) <= 1e-12

    def test_zero_sum_weights_fall_back_unweighted(self, caplog):
        table = IdfTable(weights={}, default_weight=0.0)
        cand = [[1.0, 0.0]]
        ref = [[1.0, 0.0], [0.0, 1.0]]
        with caplog.at_level(logging.WARNING):
            triple = greedy_match_score(
                words_from(cand), words_from(ref, "source"), weights=table
            )
        _, recall, _ = brute_score(cand, ref)
        assert abs(triple.recall - recall) <= 1e-12
        assert any("zero" in m for m in caplog.messages)

    def test_weight_lookup_casefolds(self):
        table = IdfTable(weights={"the": 0.5})
        assert table.weight_of("The") == 0.5
        assert table.weight_of("THE") == 0.5
        assert table.weight_of("unseen") == 1.0


class TestIdfTableConstruction:
    def build(self, sentences_by_system):
        """sentences_by_system: {system_id: {sentence_id: [word texts]}}"""
        sequences = []
        for system_id, sentences in sentences_by_system.items():
            for sentence_id, texts in sentences.items():
                sequences.append(
                    make_seq(
                        [(t, [1.0]) for t in texts],
                        sentence_id=sentence_id,
                        system_id=system_id,
                        lang="en" if system_id == "source" else "ru",
                    )
                )
        return build_corpus(1, sequences)

    def test_reference_side_formula(self):
        corpus = self.build(
            {
                "source": {
                    "s1": ["the", "cat"],
                    "s2": ["the", "dog"],
                    "s3": ["a", "fish"],
                },
            }
        )
        table = idf_weights(corpus, CorpusSide.REFERENCE)
        n = 3
        assert table.weight_of("the") == pytest.approx(math.log((n + 1) / (2 + 1)))
        assert table.weight_of("cat") == pytest.approx(math.log((n + 1) / (1 + 1)))
        assert table.weight_of("never-seen") == pytest.approx(math.log(n + 1))

    def test_df_counts_sentences_not_occurrences(self):
        corpus = self.build({"source": {"s1": ["the", "the", "the"], "s2": ["x"]}})
        table = idf_weights(corpus, CorpusSide.REFERENCE)
        assert table.weight_of("the") == pytest.approx(math.log(3 / 2))

    def test_candidate_side_uses_translations(self):
        corpus = self.build(
            {
                "source": {"s1": ["en1"]},
                "mt1": {"s1": ["ru1"]},
                "mt2": {"s1": ["ru1", "ru2"]},
            }
        )
        table = idf_weights(corpus, CorpusSide.CANDIDATE)
        # Two translation documents, both containing ru1.
        assert table.weight_of("ru1") == pytest.approx(math.log(3 / 3))
        assert table.weight_of("ru2") == pytest.approx(math.log(3 / 2))
        assert table.weight_of("en1") == pytest.approx(math.log(3))

    def test_df_counting_casefolds(self):
        corpus = self.build({"source": {"s1": ["The"], "s2": ["the"]}})
        table = idf_weights(corpus, CorpusSide.REFERENCE)
        assert table.weight_of("THE") == pytest.approx(math.log(3 / 3))

    def test_weights_nonnegative_and_monotone_in_df(self):
        # One word per df level: word k appears in sentences 0..k-1.
        n = 8
        sentences = {
            f"s{i}": [f"df{k}" for k in range(1, n + 1) if i < k] for i in range(n)
        }
        corpus = self.build({"source": sentences})
        table = idf_weights(corpus, CorpusSide.REFERENCE)
        weights = [table.weight_of(f"df{k}") for k in range(1, n + 1)]
        assert all(w >= 0.0 for w in weights)
        assert all(a >= b for a, b in zip(weights, weights[1:]))
        assert table.default_weight >= max(weights)

    def test_df_counts_merged_words_not_pieces(self):
        corpus = self.build({"source": {"s1": ["бу", "##ма", "##ги"], "s2": ["x"]}})
        table = idf_weights(corpus, CorpusSide.REFERENCE)
        assert table.weight_of("бумаги") == pytest.approx(math.log(3 / 2))
        # The raw pieces never make it into the table.
        assert table.weight_of("бу") == pytest.approx(math.log(3))


def anchor_for(source, translation, source_index, target_index):
    return AnchorPair(
        source_word=source.words[source_index],
        target_word=translation.words[target_index],
        sentence_id=source.sentence_id,
    )


class TestScorePair:
    def test_anchors_only_restricts_both_sides(self):
        source = make_words(
            [("good", [1.0, 0.0]), ("noise", [0.3, -0.7]), ("pair", [0.0, 1.0])]
        )
        translation = make_words(
            [("хорошо", [1.0, 0.0]), ("пара", [0.0, 1.0]), ("шум", [-0.5, 0.1])],
            system_id="mt1",
        )
        anchors = [
            anchor_for(source, translation, 0, 0),
            anchor_for(source, translation, 2, 1),
        ]
        triple = score_pair(
            source, translation, None, ScoreMode.ANCHORS_ONLY, anchors=anchors
        )
        assert triple.f1 == 1.0
        assert triple.mode is ScoreMode.ANCHORS_ONLY

    def test_all_tokens_sees_everything(self):
        source = make_words([("good", [1.0, 0.0]), ("noise", [0.0, -1.0])])
        translation = make_words([("хорошо", [1.0, 0.0])], system_id="mt1")
        triple = score_pair(source, translation, None, ScoreMode.ALL_TOKENS)
        assert triple.precision == 1.0
        assert triple.recall < 1.0

    def test_no_anchors_returns_none(self, caplog):
        source = make_words([("a", [1.0])])
        translation = make_words([("б", [1.0])], system_id="mt1")
        with caplog.at_level(logging.WARNING):
            result = score_pair(
                source, translation, None, ScoreMode.ANCHORS_ONLY, anchors=[]
            )
        assert result is None
        assert any("no anchors" in m for m in caplog.messages)

    def test_map_applies_to_translation_side(self, rng):
        q, r = np.linalg.qr(rng.normal(size=(4, 4)))
        source = words_from(rng.normal(size=(5, 4)).tolist(), "source")
        rotated = make_words(
            [(w.text, list(q @ w.vector)) for w in source.words], system_id="mt1"
        )
        mapping = OrthogonalMap(omega=q.T, dimension=4, anchor_count=5, residual=0.0)
        unmapped = score_pair(source, rotated, None, ScoreMode.ALL_TOKENS)
        mapped = score_pair(source, rotated, mapping, ScoreMode.ALL_TOKENS)
        assert mapped.f1 > unmapped.f1
        assert mapped.f1 >= 1.0 - 1e-10

    def test_swap_roles_swaps_p_and_r(self):
        source = make_words([("a", [1.0, 0.0]), ("b", [0.5, 0.5])])
        translation = make_words([("в", [1.0, 0.0])], system_id="mt1")
        plain = score_pair(source, translation, None, ScoreMode.ALL_TOKENS)
        swapped = score_pair(
            source, translation, None, ScoreMode.ALL_TOKENS, swap_roles=True
        )
        assert plain.precision == swapped.recall
        assert plain.recall == swapped.precision
        assert plain.f1 == swapped.f1
        assert swapped.candidate_id == "source"
        assert swapped.reference_id == "mt1"

    def test_duplicate_anchor_words_stay_separate(self):
        source = make_words([("dog", [1.0, 0.0]), ("dog", [0.0, 1.0])])
        translation = make_words(
            [("собака", [1.0, 0.0]), ("собака", [0.0, 1.0])], system_id="mt1"
        )
        anchors = [
            anchor_for(source, translation, 0, 0),
            anchor_for(source, translation, 1, 1),
        ]
        triple = score_pair(
            source, translation, None, ScoreMode.ANCHORS_ONLY, anchors=anchors
        )
        assert triple.f1 == 1.0
        source_bad = make_words([("dog", [1.0, 0.0]), ("dog", [0.0, 1.0])])
        translation_bad = make_words(
            [("собака", [1.0, 0.0]), ("собака", [1.0, 0.0])], system_id="mt1"
        )
        anchors_bad = [
            anchor_for(source_bad, translation_bad, 0, 0),
            anchor_for(source_bad, translation_bad, 1, 1),
        ]
        worse = score_pair(
            source_bad, translation_bad, None, ScoreMode.ANCHORS_ONLY, anchors=anchors_bad
        )
        assert worse.f1 < 1.0

    def test_restriction_survives_map_application(self, rng):
        # Anchor words are selected by their piece span, so the rotated
        # copies produced by the map still restrict correctly.
        q, r = np.linalg.qr(rng.normal(size=(3, 3)))
        source = make_words(
            [("a", [1.0, 0.0, 0.0]), ("b", [0.0, 1.0, 0.0]), ("c", [0.0, 0.0, 1.0])]
        )
        translation = make_words(
            [
                ("а2", list(q.T @ np.array([1.0, 0.0, 0.0]))),
                ("б2", list(q.T @ np.array([0.0, 1.0, 0.0]))),
                ("в2", [0.3, 0.3, 0.3]),
            ],
            system_id="mt1",
        )
        anchors = [
            anchor_for(source, translation, 0, 0),
            anchor_for(source, translation, 1, 1),
        ]
        mapping = OrthogonalMap(omega=q, dimension=3, anchor_count=3, residual=0.0)
        triple = score_pair(
            source, translation, mapping, ScoreMode.ANCHORS_ONLY, anchors=anchors
        )
        assert triple.f1 >= 1.0 - 1e-10
