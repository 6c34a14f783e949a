"""Subword splitting and pooling."""

import numpy as np
import pytest

from tcgat_exporter.align import (AlignmentPolicy, TokenizationError, pool,
                                  sentence_pieces)
from tcgat_exporter.encoder import MAX_PIECES, HashEncoder


class TestPolicy:
    def test_default_is_mean(self):
        assert AlignmentPolicy().strategy == "mean-subword"

    def test_flags(self):
        assert AlignmentPolicy.from_flag("mean").strategy == "mean-subword"
        assert AlignmentPolicy.from_flag("first").strategy == "first-subword"

    def test_unknown_strategy(self):
        with pytest.raises(ValueError, match="unknown strategy"):
            AlignmentPolicy("max-subword")

    def test_unknown_flag(self):
        with pytest.raises(ValueError, match="unknown policy flag"):
            AlignmentPolicy.from_flag("average")


class TestSplit:
    def test_short_word_is_one_piece(self):
        assert HashEncoder().split("rain") == ["rain"]

    def test_long_word_chunks_with_continuation_prefix(self):
        assert HashEncoder().split("floods") == ["floo", "##ds"]
        assert HashEncoder().split("inundation") == ["inun", "##dati", "##on"]

    def test_empty_token_fails(self):
        with pytest.raises(TokenizationError, match="empty token"):
            HashEncoder().split("")

    def test_overlong_token_fails(self):
        with pytest.raises(TokenizationError, match=f"exceeds {MAX_PIECES}"):
            HashEncoder().split("x" * 300)


class TestSentencePieces:
    def test_spans_partition_the_piece_list(self):
        pieces, spans = sentence_pieces(HashEncoder(), ["heavy", "rain"])
        assert pieces == ["heav", "##y", "rain"]
        assert spans == [(0, 2), (2, 3)]

    def test_spans_are_contiguous_for_random_words(self):
        rng = np.random.default_rng(0)
        words = ["w" * int(rng.integers(1, 20)) for _ in range(50)]
        pieces, spans = sentence_pieces(HashEncoder(), words)
        assert spans[0][0] == 0
        assert spans[-1][1] == len(pieces)
        for (_, prev_end), (start, _) in zip(spans, spans[1:]):
            assert prev_end == start

    def test_encoder_returning_no_pieces_is_an_error(self):
        class Hollow:
            def split(self, word):
                return []

        with pytest.raises(TokenizationError, match="produced no pieces"):
            sentence_pieces(Hollow(), ["rain"])


class TestPool:
    def setup_method(self):
        self.vectors = np.arange(12, dtype=np.float32).reshape(4, 3)
        self.spans = [(0, 1), (1, 4)]

    def test_first_subword_keeps_leading_piece(self):
        rows = pool(self.vectors, self.spans, AlignmentPolicy("first-subword"))
        assert np.array_equal(rows[0], self.vectors[0])
        assert np.array_equal(rows[1], self.vectors[1])

    def test_mean_subword_averages_pieces(self):
        rows = pool(self.vectors, self.spans, AlignmentPolicy("mean-subword"))
        expected = self.vectors[1:4].astype(np.float64).mean(axis=0)
        assert np.allclose(rows[1], expected, atol=1e-6)

    def test_single_piece_words_agree_under_both_policies(self):
        spans = [(0, 1), (1, 2), (2, 3), (3, 4)]
        first = pool(self.vectors, spans, AlignmentPolicy("first-subword"))
        mean = pool(self.vectors, spans, AlignmentPolicy("mean-subword"))
        assert np.array_equal(first, mean)

    def test_both_policies_yield_one_row_per_word(self):
        for strategy in ("first-subword", "mean-subword"):
            rows = pool(self.vectors, self.spans, AlignmentPolicy(strategy))
            assert rows.shape == (2, 3)
            assert rows.dtype == np.float32
