"""Kick-sequence generation: generating function, words, reproducibility."""

import numpy as np
import pytest

from fibrotor.errors import DomainError, UsageError
from fibrotor.kickseq import (
    KickSequenceSpec,
    SequenceKind,
    fibonacci_instant,
    fibonacci_instants_upto,
    fibonacci_word_labels,
    floor_n_over_golden,
    floor_n_over_golden_sq,
    gamma,
    gamma_array,
    kick_amplitude,
    kick_amplitudes,
    kick_labels,
    sequence_checksum,
    sequence_prefix,
)

FIB_SPEC = KickSequenceSpec("fibonacci", 10.0, 12.0)

# gamma(N) - 1 for N = 1..13 (boolean row of the generating function)
GAMMA_TABLE = [1, 0, 1, 1, 0, 1, 0, 1, 1, 0, 1, 1, 0]


def test_gamma_table():
    assert [gamma(n) - 1 for n in range(1, 14)] == GAMMA_TABLE


@pytest.mark.parametrize("n,expected", [(1, 2), (2, 1), (13, 1)])
def test_gamma_pinned_values(n, expected):
    assert gamma(n) == expected


def test_gamma_rejects_zero():
    with pytest.raises(DomainError):
        gamma(0)


def test_gamma_range_vectorised_matches_scalar():
    ns = np.arange(1, 5001)
    vec = gamma_array(ns)
    assert vec.tolist() == [gamma(int(n)) for n in ns]


def test_gamma_in_alphabet_up_to_1e7():
    # full scan; exact integer arithmetic end to end
    vals = gamma_array(np.arange(1, 10_000_001, dtype=np.int64))
    assert vals.min() == 1 and vals.max() == 2


@pytest.mark.parametrize("m,expected", [(1, 1), (2, 2), (3, 3), (4, 5), (6, 13)])
def test_fibonacci_instants(m, expected):
    assert fibonacci_instant(m) == expected


def test_fibonacci_instants_upto():
    assert fibonacci_instants_upto(13) == [1, 2, 3, 5, 8, 13]


def test_word_prefixes():
    assert fibonacci_word_labels(1).tolist() == [1]
    assert fibonacci_word_labels(2).tolist() == [1, 2]
    assert fibonacci_word_labels(3).tolist() == [1, 2, 1]
    assert fibonacci_word_labels(5).tolist() == [1, 2, 1, 1, 2, 1, 2, 1]


def test_word_self_similarity():
    # S_m = S_{m-1} ++ S_{m-2}, elementwise, for 3 <= m <= 30
    words = {m: fibonacci_word_labels(m) for m in range(1, 31)}
    for m in range(3, 31):
        glued = np.concatenate([words[m - 1], words[m - 2]])
        assert np.array_equal(words[m], glued)


def test_word_letter_counts():
    for m in range(3, 26):
        w = fibonacci_word_labels(m)
        assert len(w) == fibonacci_instant(m)
        assert int((w == 1).sum()) == fibonacci_instant(m - 1)
        assert int((w == 2).sum()) == fibonacci_instant(m - 2)


def test_generating_function_equals_substitution():
    word = fibonacci_word_labels(25)
    labels = kick_labels(FIB_SPEC, len(word))
    assert np.array_equal(word, labels)


def test_floor_identity():
    # floor(nG/(1+G)) + floor(n/(1+G)) = n - 1
    for n in list(range(1, 100_000)) + [10**7, 10**9, 10**12 + 7]:
        assert floor_n_over_golden(n) + floor_n_over_golden_sq(n) == n - 1


def test_sequence_prefix_matches_substitution():
    amps = sequence_prefix(7, FIB_SPEC)
    word = fibonacci_word_labels(7)
    assert np.array_equal(amps, np.where(word == 1, 10.0, 12.0))


def test_sequence_prefix_wrong_kind():
    with pytest.raises(UsageError):
        sequence_prefix(3, KickSequenceSpec("constant", 10.0))


def test_amplitude_mapping():
    # gamma = 2 -> k1, gamma = 1 -> k2
    amps = kick_amplitudes(FIB_SPEC, 8)
    assert amps.tolist() == [10.0, 12.0, 10.0, 10.0, 12.0, 10.0, 12.0, 10.0]


def test_scalar_amplitude_consistent_with_bulk():
    for spec in (
        FIB_SPEC,
        KickSequenceSpec("biperiodic", 10.0, 12.0),
        KickSequenceSpec("random", 10.0, 12.0, seed=11),
        KickSequenceSpec("constant", 10.0),
    ):
        bulk = kick_amplitudes(spec, 40)
        scalars = [kick_amplitude(n, spec) for n in range(1, 41)]
        assert bulk.tolist() == scalars


def test_biperiodic_parity():
    amps = kick_amplitudes(KickSequenceSpec("biperiodic", 10.0, 12.0), 6)
    assert amps.tolist() == [12.0, 10.0, 12.0, 10.0, 12.0, 10.0]


def test_degenerate_amplitudes_reduce_to_constant():
    fib = kick_amplitudes(KickSequenceSpec("fibonacci", 9.5, 9.5), 500)
    const = kick_amplitudes(KickSequenceSpec("constant", 9.5), 500)
    assert np.array_equal(fib, const)


def test_random_reproducible_and_seed_sensitive():
    a = kick_labels(KickSequenceSpec("random", 10.0, 12.0, seed=42), 10_000)
    b = kick_labels(KickSequenceSpec("random", 10.0, 12.0, seed=42), 10_000)
    c = kick_labels(KickSequenceSpec("random", 10.0, 12.0, seed=43), 10_000)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert set(np.unique(a)) == {1, 2}
    assert sequence_checksum(a) == sequence_checksum(b)
    assert sequence_checksum(a) != sequence_checksum(c)


def test_random_requires_seed():
    with pytest.raises(UsageError):
        KickSequenceSpec("random", 10.0, 12.0)


def test_non_finite_amplitudes_rejected():
    with pytest.raises(DomainError):
        KickSequenceSpec("fibonacci", float("nan"), 12.0)
    with pytest.raises(DomainError):
        KickSequenceSpec("fibonacci", 10.0, float("inf"))
    # constant ignores k2 entirely
    KickSequenceSpec("constant", 10.0, float("inf"))


def test_kind_coercion():
    assert KickSequenceSpec("fibonacci", 1.0, 2.0).kind is SequenceKind.FIBONACCI
    with pytest.raises(ValueError):
        KickSequenceSpec("fib", 1.0, 2.0)
