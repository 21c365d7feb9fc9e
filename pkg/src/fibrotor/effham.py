"""Effective generators, the Fibonacci propagator and localization diagnostics.

The per-step generator of a kick of strength K followed by a free flight of
duration tau is, to first order in tau,

    L = K cos(theta) + (tau/2) [ l^2 + (K/2)(l sin + sin l) + (K^2/6) sin^2 ],

assembled from the hilbert builders.  Accumulating L1/L2 along a binary word
with the coefficient tuple (alpha, beta, delta, eta1, eta2) gives the
anti-Hermitian generator

    G = alpha A1 + beta A2 + delta [A2, A1]
        + eta1 [A1, [A1, A2]] + eta2 [A2, [A2, A1]],      A_i = -i L_i,

so U(n, 0) ~ exp(G) and H = iG is Hermitian.  With the saturated Fibonacci
coefficients this becomes the effective per-step propagator U_fi whose
localized eigenstates explain the quasi-localized plateau; the spectral
helpers below quantify that localization.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .bchcoeff import CoefficientState, saturated_necs
from .errors import DomainError, NumericError, UsageError
from .hilbert import (
    BasisWindow,
    OperatorMatrix,
    SymmetryTag,
    build_cos_theta,
    build_l_squared,
    build_sin_sq,
    build_sym_lsin,
)

#: Default sin^2 weight inside the (tau/2)[...] bracket is K^2 * SIN_SQ_FACTOR.
SIN_SQ_FACTOR = 1.0 / 6.0


def _build_L_variant(strength: float, tau: float, window: BasisWindow,
                     sin_sq_factor: float) -> OperatorMatrix:
    if tau < 0:
        raise DomainError(f"tau must be >= 0, got {tau}")
    k = float(strength)
    m = k * build_cos_theta(window).matrix
    if tau != 0.0:
        bracket = (
            build_l_squared(window).matrix
            + 0.5 * k * build_sym_lsin(window).matrix
            + sin_sq_factor * k * k * build_sin_sq(window).matrix
        )
        m = m + 0.5 * tau * bracket
    return OperatorMatrix(window, m, SymmetryTag.HERMITIAN)


def build_L(strength: float, tau: float, window: BasisWindow) -> OperatorMatrix:
    """Per-step Hermitian generator for one kick amplitude (first order in tau)."""
    return _build_L_variant(strength, tau, window, SIN_SQ_FACTOR)


@dataclass(frozen=True)
class EffectiveGenerator:
    """Anti-Hermitian accumulated generator G with its coefficient provenance."""

    window: BasisWindow
    matrix: np.ndarray
    provenance: str

    def as_operator(self) -> OperatorMatrix:
        return OperatorMatrix(self.window, self.matrix, SymmetryTag.ANTI_HERMITIAN)

    def hamiltonian(self) -> OperatorMatrix:
        """H = iG, Hermitian by construction."""
        return OperatorMatrix(self.window, 1j * self.matrix, SymmetryTag.HERMITIAN)


def _coefficients_of(c) -> tuple[float, float, float, float, float]:
    if isinstance(c, CoefficientState):
        return (float(c.alpha), float(c.beta), float(c.delta),
                float(c.eta1), float(c.eta2))
    vals = tuple(float(x) for x in c)
    if len(vals) != 5:
        raise UsageError("coefficients must be a CoefficientState or a 5-tuple")
    return vals


def accumulate_generator(c, L1: OperatorMatrix, L2: OperatorMatrix,
                         provenance: str | None = None) -> EffectiveGenerator:
    """G = alpha A1 + beta A2 + delta [A2,A1] + eta1 [A1,[A1,A2]] + eta2 [A2,[A2,A1]].

    ``c`` is a CoefficientState (raw, word-accumulated coefficients) or any
    5-sequence of floats (e.g. saturated per-step values).  The result is
    explicitly skew-symmetrized to pin matmul roundoff.
    """
    if L1.window != L2.window:
        raise UsageError("L1 and L2 live on different windows")
    alpha, beta, delta, eta1, eta2 = _coefficients_of(c)
    a1 = -1j * L1.matrix
    a2 = -1j * L2.matrix
    c12 = a1 @ a2 - a2 @ a1            # [A1, A2]
    g = alpha * a1 + beta * a2 - delta * c12
    if eta1 != 0.0:
        g = g + eta1 * (a1 @ c12 - c12 @ a1)
    if eta2 != 0.0:
        g = g - eta2 * (a2 @ c12 - c12 @ a2)
    g = 0.5 * (g - g.conj().T)
    if provenance is None:
        n = getattr(c, "n", None)
        provenance = f"word_accumulated(n={n})" if n is not None else "custom"
    return EffectiveGenerator(L1.window, g, provenance)


def unitary_from_generator(gen: EffectiveGenerator) -> OperatorMatrix:
    """exp(G) through the eigendecomposition of H = iG (exactly unitary columns)."""
    h = gen.hamiltonian()
    sd = diagonalize(h)
    u = (sd.vectors * np.exp(-1j * sd.energies)) @ sd.vectors.conj().T
    return OperatorMatrix(gen.window, u, SymmetryTag.UNITARY)


def fibonacci_propagator(k1: float, k2: float, tau: float, window: BasisWindow,
                         parity: str = "mean") -> tuple[OperatorMatrix, OperatorMatrix]:
    """Effective per-step propagator U_fi and Hamiltonian H_fi at Fibonacci instants.

    ``parity`` selects the eta branches: "mean" (default, the averaged
    values), "even" or "odd" for sensitivity studies.
    """
    sat = saturated_necs()
    if parity == "mean":
        etas = (sat.eta1_mean, sat.eta2_mean)
    elif parity == "even":
        etas = (sat.eta1_even, sat.eta2_even)
    elif parity == "odd":
        etas = (sat.eta1_odd, sat.eta2_odd)
    else:
        raise UsageError(f"parity must be mean/even/odd, got {parity!r}")
    coeffs = (sat.alpha, sat.beta, sat.delta, *etas)
    gen = accumulate_generator(
        coeffs,
        build_L(k1, tau, window),
        build_L(k2, tau, window),
        provenance=f"fibonacci_saturated(parity={parity})",
    )
    u_fi = unitary_from_generator(gen)
    return u_fi, gen.hamiltonian()


@dataclass(frozen=True)
class SpectralData:
    """Eigen-decomposition of an effective Hamiltonian H (and of exp(-iH)).

    ``energies`` are the eigenvalues of H; ``phases`` the corresponding
    quasi-energies of exp(-iH), wrapped to (-pi, pi]; ``vectors`` the
    orthonormal eigenvector columns.
    """

    window: BasisWindow
    energies: np.ndarray
    phases: np.ndarray
    vectors: np.ndarray

    def orthonormality_residual(self) -> float:
        v = self.vectors
        return float(np.abs(v.conj().T @ v - np.eye(v.shape[1])).max())


def _wrap_phase(x: np.ndarray) -> np.ndarray:
    """Wrap to the half-open interval (-pi, pi]."""
    return np.pi - np.mod(np.pi - x, 2.0 * np.pi)


def diagonalize(h: OperatorMatrix) -> SpectralData:
    """Eigen-decomposition of a Hermitian operator (LAPACK dense path)."""
    if h.tag is not SymmetryTag.HERMITIAN:
        raise UsageError("diagonalize expects a hermitian-tagged operator")
    h.check_tag(tol=1e-10 * max(1.0, float(np.abs(h.matrix).max())))
    try:
        w, v = sla.eigh(h.matrix)
    except sla.LinAlgError as exc:  # pragma: no cover - LAPACK failure is exotic
        scale = float(np.abs(h.matrix).max())
        raise NumericError(f"eigh failed to converge (matrix scale {scale:.3e})") from exc
    return SpectralData(h.window, w, _wrap_phase(-w), v)


def diagonalize_unitary(u: OperatorMatrix) -> SpectralData:
    """Eigen-decomposition of a unitary via its complex Schur form.

    A unitary is normal, so the Schur form is diagonal and the Schur basis
    is an orthonormal eigenbasis; ``energies`` holds -phases so that
    exp(-i energies) reproduces the eigenvalues.
    """
    t, z = sla.schur(u.matrix, output="complex")
    diag = np.diag(t)
    off = float(np.abs(t - np.diag(diag)).max())
    if off > 1e-8 * max(1.0, float(np.abs(diag).max())):
        raise NumericError(f"matrix is not normal enough for Schur diagonalization ({off:.3e})")
    phases = _wrap_phase(np.angle(diag))
    return SpectralData(u.window, -phases, phases, z)


def reconstruction_residual(h: OperatorMatrix, sd: SpectralData) -> float:
    """|| H - V diag(E) V^dagger || / || H || in the max-abs norm."""
    rebuilt = (sd.vectors * sd.energies) @ sd.vectors.conj().T
    scale = float(np.abs(h.matrix).max()) or 1.0
    return float(np.abs(h.matrix - rebuilt).max()) / scale


def plateau_estimate(sd: SpectralData, l0: int) -> float:
    """Dephasing-averaged <l^2> for a trajectory launched from |l0>.

    sum_{l,m} l^2 |V_{l0,m}|^2 |V_{l,m}|^2: every eigenstate m is weighted by
    its overlap with the initial momentum state, then contributes its own
    momentum spread.
    """
    i0 = sd.window.index_of(l0)
    p = np.abs(sd.vectors) ** 2
    lv2 = sd.window.l_values().astype(np.float64) ** 2
    return float(p[i0] @ (lv2 @ p))


@dataclass(frozen=True)
class LocalizationProfile:
    """Per-eigenvector localization metrics (tail_rate is NaN when the fit is degenerate)."""

    peak_l: np.ndarray
    ipr: np.ndarray
    tail_rate: np.ndarray

    def tail_defined(self) -> np.ndarray:
        return ~np.isnan(self.tail_rate)


def localization_profile(sd: SpectralData,
                         fit_floor: float = 1e-12,
                         fit_ceiling: float = 1e-2,
                         min_points: int = 10) -> LocalizationProfile:
    """Peak position, inverse participation ratio and exponential tail rate.

    The tail rate is the least-squares slope of log|V|^2 against |l - peak|
    over the probability band [fit_floor, fit_ceiling]; negative values mean
    exponential localization.  Columns with fewer than ``min_points`` usable
    entries get a NaN rate.
    """
    v2 = np.abs(sd.vectors) ** 2
    r = v2.shape[0]
    lv = sd.window.l_values().astype(np.float64)
    peak_idx = np.argmax(v2, axis=0)
    peaks = lv[peak_idx]
    ipr = np.sum(v2 * v2, axis=0)
    rates = np.full(v2.shape[1], np.nan)
    for m in range(v2.shape[1]):
        p = v2[:, m]
        mask = (p >= fit_floor) & (p <= fit_ceiling)
        if int(mask.sum()) < min_points:
            continue
        x = np.abs(lv[mask] - peaks[m])
        y = np.log(p[mask])
        x_c = x - x.mean()
        denom = float(np.dot(x_c, x_c))
        if denom == 0.0:
            continue
        rates[m] = float(np.dot(x_c, y - y.mean()) / denom)
    return LocalizationProfile(peak_l=peaks, ipr=ipr, tail_rate=rates)


def regular_qkr_scales(strength: float, tau: float) -> tuple[float, float]:
    """Order-of-magnitude localization length and Heisenberg time, (K tau)^2 each.

    The proportionality constants are set to 1 by convention and recorded as
    such wherever these numbers are emitted.
    """
    if strength <= 0 or tau <= 0:
        raise DomainError("strength and tau must be > 0")
    ls = (strength * tau) ** 2
    return ls, ls


def spectral_summary(sd: SpectralData, profile: LocalizationProfile,
                     plateau: float | None = None,
                     config_echo: dict | None = None) -> dict:
    """JSON-ready spectral report (eigenphases, per-eigenvector metrics, plateau)."""
    return {
        "basis": {"center": sd.window.center, "size": sd.window.size},
        "eigenphases": [float(x) for x in sd.phases],
        "eigenvector_metrics": {
            "peak_l": [float(x) for x in profile.peak_l],
            "ipr": [float(x) for x in profile.ipr],
            "tail_rate": [None if np.isnan(x) else float(x) for x in profile.tail_rate],
        },
        "plateau_estimate": None if plateau is None else float(plateau),
        "scale_convention": "l_s = (K tau)^2, N* = l_s, prefactors 1",
        "config": config_echo or {},
    }


def write_spectral_json(path, summary: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
