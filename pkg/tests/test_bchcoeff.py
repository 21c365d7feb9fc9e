"""Exact coefficient algebra: recursions, closed forms, limits, estimates."""

import io
from fractions import Fraction as F

import numpy as np
import pytest
import scipy.linalg as sla

from fibrotor.bchcoeff import (
    CoefficientState,
    coefficients_along_word,
    coefficients_closed_form,
    closed_form_sweep,
    delocalization_time,
    fibonacci_coefficients,
    mu_normalized,
    recursion_step,
    saturated_necs,
    write_coefficient_csv,
)
from fibrotor.errors import DomainError, UsageError
from fibrotor.kickseq import GOLDEN_MEAN as G
from fibrotor.kickseq import fibonacci_instant, fibonacci_word_labels, kick_labels, KickSequenceSpec

# Coefficient tuples (alpha, beta, delta, eta1, eta2) after the first n kicks
# of the word 1,2,1,1,2 (exact rationals).
GOLDEN_TUPLES = {
    1: (1, 0, F(0), F(0), F(0)),
    2: (1, 1, F(1, 2), F(1, 12), F(1, 12)),
    3: (2, 1, F(0), F(-1, 6), F(1, 6)),
    4: (3, 1, F(-1, 2), F(-1, 4), F(1, 4)),
    5: (3, 2, F(1), F(1, 2), F(0)),
}


def as_tuple(s: CoefficientState):
    return (s.alpha, s.beta, s.delta, s.eta1, s.eta2)


def test_recursion_golden_tuples():
    state = CoefficientState.zero()
    for n, label in enumerate([1, 2, 1, 1, 2], start=1):
        state = recursion_step(state, label)
        assert state.n == n
        assert as_tuple(state) == GOLDEN_TUPLES[n]


def test_recursion_accepts_string_labels():
    s = recursion_step(CoefficientState.zero(), "K1")
    s = recursion_step(s, "K2")
    assert s.delta == F(1, 2) and s.eta1 == F(1, 12)


def test_recursion_rejects_bad_label():
    with pytest.raises(UsageError):
        recursion_step(CoefficientState.zero(), 3)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_closed_form_golden_values(n):
    assert as_tuple(coefficients_closed_form(n)) == GOLDEN_TUPLES[n]


def test_recursion_equals_closed_form_to_f15():
    n_max = fibonacci_instant(15)
    for a, b in zip(fibonacci_coefficients(n_max), closed_form_sweep(n_max)):
        assert as_tuple(a) == as_tuple(b)


def test_alpha_plus_beta_is_n_any_word():
    rng = np.random.default_rng(3)
    labels = rng.integers(1, 3, size=400)
    for s in coefficients_along_word(labels):
        assert s.alpha + s.beta == s.n


def test_kick_count_identity():
    states = {s.n: s for s in fibonacci_coefficients(fibonacci_instant(20))}
    for m in range(3, 21):
        s = states[fibonacci_instant(m)]
        assert s.alpha == fibonacci_instant(m - 1)
        assert s.beta == fibonacci_instant(m - 2)


def test_matrix_log_oracle():
    """The recursion must match coefficients extracted from raw matrix logs.

    Small random anti-Hermitian generators keep the principal logarithm
    valid and the four-letter contamination tiny; the extracted five
    coefficients then pin both values and sign conventions.
    """
    rng = np.random.default_rng(7)

    def rand_antiherm(d, scale):
        m = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        return scale * (m - m.conj().T) / 2

    d = 8
    a1 = rand_antiherm(d, 0.01)
    a2 = rand_antiherm(d, 0.01)
    c12 = a1 @ a2 - a2 @ a1
    basis = [
        a1,
        a2,
        -c12,                      # [A2, A1]
        a1 @ c12 - c12 @ a1,       # [A1, [A1, A2]]
        -(a2 @ c12 - c12 @ a2),    # [A2, [A2, A1]]
    ]
    u1, u2 = sla.expm(a1), sla.expm(a2)
    bmat = np.stack([b.ravel() for b in basis], axis=1)

    for n, tol in ((13, 1e-2), (34, 1e-1)):
        labels = kick_labels(KickSequenceSpec("fibonacci", 1.0, 0.0), n)
        u = np.eye(d, dtype=complex)
        for lab in labels:
            u = (u1 if lab == 1 else u2) @ u
        coef, *_ = np.linalg.lstsq(bmat, sla.logm(u).ravel(), rcond=None)
        exact = np.array([float(x) for x in as_tuple(list(fibonacci_coefficients(n))[-1])])
        assert np.abs(coef.real - exact).max() < tol
        assert np.abs(coef.imag).max() < 1e-6


def test_saturation_of_alpha_beta_delta():
    sat = saturated_necs()
    s = list(fibonacci_coefficients(fibonacci_instant(20)))[-1]
    f = fibonacci_instant(20)
    assert abs(float(s.alpha) / f - sat.alpha) < 1e-6
    assert abs(float(s.beta) / f - sat.beta) < 1e-6
    assert abs(float(s.delta) / f - sat.delta) < 1e-3
    assert sat.alpha + sat.beta == pytest.approx(1.0, abs=1e-15)
    assert sat.alpha == pytest.approx(1 / G, abs=1e-15)
    assert sat.beta == pytest.approx(1 / G**2, abs=1e-15)
    assert sat.delta == pytest.approx(0.5 / G**3, abs=1e-15)


def test_eta_parity_branches():
    sat = saturated_necs()
    states = {s.n: s for s in fibonacci_coefficients(fibonacci_instant(25))}
    for m in range(20, 26):
        f = fibonacci_instant(m)
        s = states[f]
        e1, e2 = float(s.eta1) / f, float(s.eta2) / f
        if m % 2 == 0:
            assert abs(e1 - sat.eta1_even) < 1e-2
            assert abs(e2 - sat.eta2_even) < 1e-2
        else:
            assert abs(e1 - sat.eta1_odd) < 1e-2
            assert abs(e2 - sat.eta2_odd) < 1e-2
    assert sat.eta1_mean == pytest.approx((sat.eta1_even + sat.eta1_odd) / 2, abs=1e-15)
    assert sat.eta2_mean == pytest.approx((sat.eta2_even + sat.eta2_odd) / 2, abs=1e-15)


def test_stroboscopic_eta_growth_unbounded():
    n20 = fibonacci_instant(20)
    peak = F(0)
    at_f10 = None
    for s in fibonacci_coefficients(n20):
        ratio = abs(s.eta1) / s.n
        peak = max(peak, ratio)
        if s.n == fibonacci_instant(10):
            at_f10 = abs(s.eta1) / s.n
    assert at_f10 is not None
    assert peak > 10 * at_f10


def test_mu_growth_ratio_and_signs():
    for m in range(20, 31):
        r = mu_normalized(m).mu1 / mu_normalized(m - 2).mu1
        assert r == pytest.approx(G**2, rel=0.01)
    for m in range(5, 41):
        assert mu_normalized(m).mu1 * mu_normalized(m + 1).mu1 < 0


def test_mu_magnitudes_overwhelm_saturated_delta():
    # all three grow without bound; at m=29 the smallest (mu2) is already
    # ~2.26e3 while mu1, mu3 exceed 1e4 * |delta| of the printed limits
    mu = mu_normalized(29)
    bar = abs(1 / G**3)
    assert abs(mu.mu1) > 1e4 * bar
    assert abs(mu.mu3) > 1e4 * bar
    assert min(abs(mu.mu1), abs(mu.mu2), abs(mu.mu3)) > 1e3 * bar
    assert abs(mu.mu2) == pytest.approx(2262.009, rel=1e-6)


def test_delocalization_time():
    assert delocalization_time(0.01) == (30, 1346269)
    assert delocalization_time(0.05) == (23, 46368)
    m_small, n_small = delocalization_time(0.01)
    m_tiny, n_tiny = delocalization_time(0.005)
    assert n_tiny > n_small
    with pytest.raises(DomainError):
        delocalization_time(1.0)
    with pytest.raises(DomainError):
        delocalization_time(0.0)


def test_coefficient_csv_golden_rows():
    buf = io.StringIO()
    rows = write_coefficient_csv(buf, 5, at="stroboscopic")
    lines = buf.getvalue().splitlines()
    assert rows == 5
    assert lines[0].startswith("n,alpha,alpha_decimal,beta")
    n2 = lines[2].split(",")
    assert n2[0] == "2" and n2[5] == "1/2" and n2[7] == "1/12" and n2[9] == "1/12"
    assert n2[-1] == "1"  # 2 = F(2)
    n4 = lines[4].split(",")
    assert n4[5] == "-1/2" and n4[7] == "-1/4" and n4[9] == "1/4"
    assert n4[-1] == "0"  # 4 is not a Fibonacci instant


def test_coefficient_csv_fibonacci_instants():
    buf = io.StringIO()
    rows = write_coefficient_csv(buf, 10, at="fibonacci")
    lines = buf.getvalue().splitlines()
    assert rows == 10
    ns = [int(line.split(",")[0]) for line in lines[1:]]
    assert ns == [fibonacci_instant(m) for m in range(1, 11)]
    assert all(line.split(",")[-1] == "1" for line in lines[1:])


def test_normalized_accessor():
    s = list(fibonacci_coefficients(5))[-1]
    assert s.normalized() == (F(3, 5), F(2, 5), F(1, 5), F(1, 10), F(0))
    with pytest.raises(DomainError):
        CoefficientState.zero().normalized()
