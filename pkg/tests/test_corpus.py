import pytest

from isotn.corpus import (
    build_vocab,
    detokenize,
    load_vocab,
    save_vocab,
    tokenize,
    windows,
)
from isotn.model import SymbolSet

from conftest import philox


class TestBuildVocab:
    def test_bytes_scheme_lists_distinct_bytes(self):
        vocab = build_vocab("abca", "bytes")
        assert vocab.scheme == "bytes"
        assert set(vocab.symbols) == {ord("a"), ord("b"), ord("c")}
        assert vocab.symbols[0] == ord("a")  # most frequent first

    def test_words_scheme(self):
        vocab = build_vocab("a b a", "words")
        assert vocab.symbols == ("a", "b")

    def test_zipf_truncation_appends_oov(self):
        gen = philox(0)
        ranks = (gen.zipf(1.5, size=20_000) - 1) % 500
        text = " ".join(f"w{r}" for r in ranks)
        vocab = build_vocab(text, "words", max_size=100)
        assert vocab.size == 101
        assert vocab.symbols[-1] == "<oov>"
        counts = {}
        for tok in text.split():
            counts[tok] = counts.get(tok, 0) + 1
        freqs = [counts[t] for t in vocab.symbols[:100]]
        assert freqs == sorted(freqs, reverse=True)

    def test_empty_input_rejected(self):
        for scheme in ("bytes", "chars", "words"):
            with pytest.raises(ValueError):
                build_vocab("", scheme)

    def test_frequency_then_lexicographic_order(self):
        vocab = build_vocab("bb aa aa bb cc", "words")
        assert vocab.symbols == ("aa", "bb", "cc")


class TestTokenizeRoundTrip:
    def test_chars_round_trip(self):
        text = "hello world"
        vocab = build_vocab(text, "chars")
        assert detokenize(tokenize(text, vocab), vocab) == text

    def test_words_round_trip(self):
        text = "the cat sat on the mat"
        vocab = build_vocab(text, "words")
        assert detokenize(tokenize(text, vocab), vocab) == text

    def test_bytes_round_trip(self):
        text = "héllo"
        vocab = build_vocab(text, "bytes")
        assert detokenize(tokenize(text, vocab), vocab) == text

    def test_unknown_token_without_oov_raises(self):
        vocab = build_vocab("aaa", "chars")
        with pytest.raises(ValueError):
            tokenize("b", vocab)

    def test_unknown_token_maps_to_oov(self):
        vocab = build_vocab("aab", "chars", max_size=1)
        ids = tokenize("az", vocab)
        assert ids[0] == 0
        assert ids[1] == vocab.size - 1

    def test_literal_oov_word_in_text_does_not_shadow_reserved_symbol(self):
        # the reserved symbol gets a collision-avoided name and stays last
        text = "<oov> <oov> x x y"
        vocab = build_vocab(text, "words", max_size=2)
        assert vocab.symbols[-1] == "<oov>_"
        unknown = tokenize("z", vocab)
        assert unknown == [vocab.size - 1]


class TestWindows:
    def test_stride_two_accumulates_multiplicity(self):
        sample = windows([0, 1, 0, 1], 2, 2)
        assert dict(sample.items()) == {(0, 1): 2}

    def test_stride_one_overlapping(self):
        sample = windows([0, 1, 0], 2, 1)
        assert dict(sample.items()) == {(0, 1): 1, (1, 0): 1}

    def test_window_count_formula(self):
        gen = philox(1)
        tokens = gen.integers(0, 2, size=10_000)
        sample = windows(tokens, 8, 1)
        assert sample.cardinality == 10_000 - 8 + 1

    def test_short_stream_rejected(self):
        with pytest.raises(ValueError):
            windows([0, 1], 3)

    def test_tail_dropped(self):
        sample = windows([0, 1, 2, 3, 4], 2, 2)
        assert sample.cardinality == 2  # (0,1) and (2,3); the 4 is dropped

    def test_window_detokenizes_to_original_span(self):
        text = "windowed round trip"
        vocab = build_vocab(text, "chars")
        tokens = tokenize(text, vocab)
        n, stride = 5, 3
        for start_index, window in enumerate(
            tokens[k:k + n] for k in range(0, len(tokens) - n + 1, stride)
        ):
            span = text[start_index * stride: start_index * stride + n]
            assert detokenize(window, vocab) == span


class TestVocabFile:
    def test_round_trip_words(self, tmp_path):
        vocab = build_vocab("alpha beta alpha gamma", "words")
        path = tmp_path / "vocab.txt"
        save_vocab(vocab, path)
        assert load_vocab(path, "words") == vocab
        raw = path.read_bytes()
        assert raw.decode("utf-8").split("\n")[:-1] == list(vocab.symbols)
        assert b"\r" not in raw

    def test_round_trip_bytes(self, tmp_path):
        vocab = build_vocab("abc", "bytes")
        path = tmp_path / "vocab.txt"
        save_vocab(vocab, path)
        assert load_vocab(path, "bytes") == vocab

    def test_line_index_is_symbol_index(self, tmp_path):
        vocab = build_vocab("x y z y z z", "words")
        path = tmp_path / "vocab.txt"
        save_vocab(vocab, path)
        lines = path.read_text().splitlines()
        for i, line in enumerate(lines):
            assert vocab.symbols[i] == line

    def test_newline_char_token_escaped(self, tmp_path):
        vocab = build_vocab("a\nb\na", "chars")
        path = tmp_path / "vocab.txt"
        save_vocab(vocab, path)
        loaded = load_vocab(path, "chars")
        assert loaded == vocab
        assert "\n" in loaded.symbols


def test_symbol_set_index():
    s = SymbolSet(("x", "y"))
    assert s.index() == {"x": 0, "y": 1}
