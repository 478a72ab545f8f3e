"""Corpus tokenization and the exploratory word-frequency estimator."""

import numpy as np
import pytest

from structdist import (
    RngStream,
    ValidationError,
    cells_from_generator,
    draw_multinomial,
    estimate_from_corpus,
    example_generator,
    limit_sdf,
    sup_distance_to_function,
    tokenize,
)


# ---------- tokenization ----------

def test_tokenize_counts_and_vocab():
    corpus = tokenize("a b a")
    assert corpus.n == 3 and corpus.M == 2
    counts = {tok: int(corpus.counts[idx]) for tok, idx in corpus.vocab.items()}
    assert counts == {"a": 2, "b": 1}
    assert corpus.tokens == ("a", "b", "a")


def test_tokenize_lowercases_and_strips_punctuation():
    assert tokenize("A b, a!!!").tokens == ("a", "b", "a")
    assert tokenize("A B", lowercase=False).tokens == ("A", "B")
    assert tokenize("e-mail e mail").tokens == ("e", "mail", "e", "mail")
    assert tokenize("__under__ under").M == 1  # underscores are separators


def test_tokenize_unicode_words():
    corpus = tokenize("café naïve café")
    assert corpus.M == 2 and corpus.n == 3


def test_tokenize_accepts_bytes():
    a = tokenize("héllo wörld".encode())
    b = tokenize("héllo wörld")
    assert a.tokens == b.tokens and a.vocab == b.vocab
    np.testing.assert_array_equal(a.counts, b.counts)


def test_tokenize_rejects_empty():
    with pytest.raises(ValidationError, match="empty corpus"):
        tokenize("!!! ??? ...")


def test_tokenize_reports_bad_byte_offset():
    with pytest.raises(ValidationError, match="byte offset 3"):
        tokenize(b"caf\xe9 bad")  # latin-1 bytes are not valid utf-8


def test_corpus_counts_read_only():
    corpus = tokenize("x y x")
    with pytest.raises(ValueError):
        corpus.counts[0] = 5


# ---------- corpus estimator ----------

def test_single_group_collapses_to_unit_jump():
    est, diag = estimate_from_corpus(tokenize("a b a"), 1)
    np.testing.assert_array_equal(est.cdf.locations, [1.0])
    np.testing.assert_array_equal(est.cdf.masses, [1.0])
    assert diag["phantom_cells"] == 0
    assert diag["lambda_hat"] == pytest.approx(1.5)


def test_equal_frequencies_single_jump():
    est, _ = estimate_from_corpus(tokenize("a b c d"), 2)
    # every group holds total 2, scaled location (m/n)*2 = 1
    np.testing.assert_array_equal(est.cdf.locations, [1.0])


def test_groups_sort_counts_ascending():
    est, diag = estimate_from_corpus(tokenize("a b a"), 2)
    # sorted counts (1, 2), k=1: locations (2/3)*count
    np.testing.assert_allclose(est.cdf.locations, [2 / 3, 4 / 3])
    np.testing.assert_array_equal(est.cdf.masses, [0.5, 0.5])
    assert diag["k"] == 1 and diag["phantom_cells"] == 0


def test_padding_adds_phantom_cells_in_front():
    est, diag = estimate_from_corpus(tokenize("a b c b c c"), 2)
    # M=3 pads to 4; padded sorted counts (0, 1, 2, 3) group to (1, 5)
    assert diag["phantom_cells"] == 1
    np.testing.assert_allclose(est.cdf.locations, np.array([1.0, 5.0]) * 2 / 6)
    assert diag["n"] == 6 and diag["M"] == 3  # n untouched by padding


def test_phantom_padding_never_reaches_m():
    for m in (2, 3, 4, 5):
        corpus = tokenize("q w e r t y u")  # 7 singleton words
        if m > corpus.M:
            continue
        _, diag = estimate_from_corpus(corpus, m)
        assert diag["phantom_cells"] <= m - 1


def test_estimator_rejects_bad_m():
    corpus = tokenize("a b a")
    with pytest.raises(ValidationError):
        estimate_from_corpus(corpus, 0)
    with pytest.raises(ValidationError):
        estimate_from_corpus(corpus, 3)  # vocabulary only has 2 words


def test_diagnostics_carry_regime_and_caveat():
    _, diag = estimate_from_corpus(tokenize("a a a b b c"), 3)
    assert diag["regime"]["lambda_hat"] == pytest.approx(2.0)
    assert "exploratory" in diag["caveat"]


def test_synthetic_corpus_recovers_limit_cdf():
    """Round trip: sample a known cell model, serialize counts as a shuffled
    text, re-ingest, and check the grouped estimate tracks the known limit.

    The residual gap (~0.11 at this size) is dominated by never-observed
    words stretching the observed-vocabulary scale, not by the grouping.
    """
    gen = example_generator()
    cells = cells_from_generator(gen, 1000)
    vec = draw_multinomial(cells, 3000, RngStream(3))
    words = [f"w{j}" for j in range(1000)]
    toks = np.repeat(np.arange(1000), vec.counts)
    RngStream(3, 999).generator().shuffle(toks)
    corpus = tokenize(" ".join(words[t] for t in toks))

    est, diag = estimate_from_corpus(corpus, 40)
    assert diag["M"] == 842          # zero-count words never reach the corpus
    assert diag["phantom_cells"] == 38
    d = sup_distance_to_function(est.cdf, limit_sdf(gen))
    assert d < 0.15
