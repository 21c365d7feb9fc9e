"""Operator matrices, states and observables on the truncated basis."""

import math
from fractions import Fraction

import numpy as np
import pytest
from scipy.integrate import quad

from fibrotor.errors import DomainError, IntegrityError
from fibrotor.hilbert import (
    BasisWindow,
    OperatorMatrix,
    RotorState,
    SymmetryTag,
    build_cos_theta,
    build_l_squared,
    build_sin_sq,
    build_sin_theta,
    build_sym_lsin,
    gaussian_state,
    kick_matrix_bessel,
    kinetic_energy,
    momentum_eigenstate,
)


def bessel_series(order: int, x_num: int, x_den: int, terms: int = 80) -> float:
    """Independent J_n oracle: exact-rational ascending series, then one rounding."""
    n = abs(order)
    half = Fraction(x_num, 2 * x_den)
    total = Fraction(0)
    term = half ** n / math.factorial(n)
    for m in range(terms):
        total += term if m % 2 == 0 else -term
        term = term * half * half / ((m + 1) * (n + m + 1))
    val = float(total)
    return val if (order >= 0 or n % 2 == 0) else -val


def test_window_geometry():
    w = BasisWindow(0, 8)
    assert w.l_min == -4 and w.l_max == 3
    assert w.l_values().tolist() == [-4, -3, -2, -1, 0, 1, 2, 3]
    assert w.index_of(0) == 4
    w2 = BasisWindow(200, 1024)
    assert w2.l_min == 200 - 512 and w2.l_max == 200 + 511
    with pytest.raises(DomainError):
        BasisWindow(0, 7)
    with pytest.raises(DomainError):
        w.index_of(4)


def test_cos_theta_structure():
    w = BasisWindow(0, 4)
    m = build_cos_theta(w).matrix
    for i in range(4):
        nz = np.flatnonzero(np.abs(m[i]) > 0)
        expected = [j for j in (i - 1, i + 1) if 0 <= j < 4]
        assert nz.tolist() == expected
        assert np.allclose(m[i, nz], 0.5)


@pytest.mark.parametrize("builder", [build_cos_theta, build_sin_theta, build_l_squared,
                                     build_sym_lsin, build_sin_sq])
def test_builders_hermitian_tag(builder):
    op = builder(BasisWindow(3, 64))
    assert op.tag is SymmetryTag.HERMITIAN
    assert op.tag_residual() <= 1e-12


def test_quadrature_oracle_cos_sin():
    # matrix elements against direct integrals (1/2pi) int e^{-il'th} f e^{il th}
    w = BasisWindow(0, 64)
    lv = w.l_values()
    cos_m = build_cos_theta(w).matrix
    sin_m = build_sin_theta(w).matrix

    def element(f, lp, l):
        re = quad(lambda t: math.cos((l - lp) * t) * f(t), 0, 2 * math.pi, limit=200)[0]
        im = quad(lambda t: math.sin((l - lp) * t) * f(t), 0, 2 * math.pi, limit=200)[0]
        return (re + 1j * im) / (2 * math.pi)

    rng = np.random.default_rng(1)
    pairs = {(i, j) for i in range(64) for j in range(64) if abs(i - j) <= 2}
    pairs |= {tuple(rng.integers(0, 64, 2)) for _ in range(40)}
    for i, j in sorted(pairs):
        lp, l = int(lv[i]), int(lv[j])
        assert abs(cos_m[i, j] - element(math.cos, lp, l)) < 1e-10
        assert abs(sin_m[i, j] - element(math.sin, lp, l)) < 1e-10


def test_trig_identity_interior_rows():
    w = BasisWindow(-5, 32)
    c = build_cos_theta(w).matrix
    s = build_sin_theta(w).matrix
    ident = c @ c + s @ s
    interior = ident[2:-2]
    expect = np.eye(32)[2:-2]
    assert np.abs(interior - expect).max() < 1e-12


def test_sin_sq_matches_product_and_diagonal():
    w = BasisWindow(0, 32)
    s = build_sin_theta(w).matrix
    s2 = build_sin_sq(w).matrix
    assert np.allclose(np.diag(s2), 0.5)
    assert np.abs((s @ s - s2)[2:-2]).max() < 1e-12


def test_sym_lsin_matches_product_oracle():
    w = BasisWindow(2, 48)
    s = build_sin_theta(w).matrix
    ldiag = np.diag(w.l_values().astype(np.float64))
    direct = ldiag @ s + s @ ldiag
    assert np.abs(build_sym_lsin(w).matrix - direct).max() < 1e-12


def test_l_squared_diagonal():
    w = BasisWindow(0, 8)
    m = build_l_squared(w).matrix
    assert m[w.index_of(0), w.index_of(0)] == 0
    assert m[w.index_of(3), w.index_of(3)] == 9
    assert np.count_nonzero(m - np.diag(np.diag(m))) == 0


def test_kinetic_energy_examples():
    w = BasisWindow(0, 64)
    assert kinetic_energy(momentum_eigenstate(w, 3)) == pytest.approx(9.0)
    amps = np.zeros(64, dtype=complex)
    amps[w.index_of(-1)] = amps[w.index_of(1)] = 1 / math.sqrt(2)
    assert kinetic_energy(RotorState(w, amps)) == pytest.approx(1.0)


def test_kinetic_energy_gaussian_direct_sum_oracle():
    w = BasisWindow(0, 64)
    state = gaussian_state(w, 0)
    # plain-python direct summation
    expected = sum(
        float(l) ** 2 * abs(a) ** 2
        for l, a in zip(w.l_values(), state.amplitudes)
    )
    assert kinetic_energy(state) == pytest.approx(expected, rel=1e-13)


def test_kinetic_energy_rejects_unnormalized():
    w = BasisWindow(0, 64)
    s = momentum_eigenstate(w, 1)
    s.amplitudes *= 1.001
    with pytest.raises(IntegrityError):
        kinetic_energy(s)


def test_gaussian_state_shape():
    w = BasisWindow(0, 128)
    s = gaussian_state(w, 0)
    assert s.norm() == pytest.approx(1.0, abs=1e-12)
    p = np.abs(s.amplitudes) ** 2
    i0 = w.index_of(0)
    assert np.allclose(p[i0 - 10:i0], p[i0 + 1:i0 + 11][::-1], rtol=1e-12)
    with pytest.raises(DomainError):
        gaussian_state(w, 60)  # fewer than 20 states of margin


def test_kick_matrix_identity_at_zero():
    w = BasisWindow(0, 32)
    assert np.array_equal(kick_matrix_bessel(w, 0.0).matrix, np.eye(32))


@pytest.mark.parametrize("k_num,k_den", [(12, 1), (7, 10), (20, 1)])
def test_kick_matrix_diagonal_matches_series_oracle(k_num, k_den):
    w = BasisWindow(0, 64)
    m = kick_matrix_bessel(w, k_num / k_den).matrix
    j0 = bessel_series(0, k_num, k_den)
    assert np.abs(np.diag(m) - j0).max() < 1e-12


def test_kick_matrix_offdiagonal_series_oracle():
    w = BasisWindow(0, 32)
    m = kick_matrix_bessel(w, 1.5).matrix
    for d in (1, 2, 5):
        expected = (-1j) ** d * bessel_series(d, 3, 2)
        assert abs(m[w.index_of(d), w.index_of(0)] - expected) < 1e-12


def test_kick_matrix_interior_unitarity():
    w = BasisWindow(0, 1024)
    for k in (1.0, 12.0, 20.0):
        m = kick_matrix_bessel(w, k).matrix
        g = m.conj().T @ m
        margin = int(2 * k) + 8
        rows = np.abs(g - np.eye(1024))[margin:-margin]
        assert rows.max() < 1e-10


def test_unitary_tag_residual_interior_margin():
    w = BasisWindow(0, 256)
    op = kick_matrix_bessel(w, 10.0)
    assert op.tag_residual(interior_margin=40) < 1e-10
    # full-window residual is dominated by edge truncation and must be large
    assert op.tag_residual() > 1e-3


def test_operator_tag_enforcement():
    w = BasisWindow(0, 4)
    bad = OperatorMatrix(w, np.diag([1, 2, 3, 4j]), SymmetryTag.HERMITIAN)
    with pytest.raises(IntegrityError):
        bad.check_tag()


def test_edge_probability():
    w = BasisWindow(0, 100)
    amps = np.zeros(100, dtype=complex)
    amps[0] = 1.0
    assert RotorState(w, amps).edge_probability() == pytest.approx(1.0)
    assert momentum_eigenstate(w, 0).edge_probability() == 0.0
