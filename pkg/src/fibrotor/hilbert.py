"""Truncated angular-momentum basis: states, operators, observables.

The basis spans the integer momenta l in [center - R/2, center + R/2 - 1]
(R even) with the wave-function convention psi(theta) = sum_l c_l
exp(i l theta) / sqrt(2 pi).  In that convention

    <l'| cos(theta) |l> = (delta_{l',l+1} + delta_{l',l-1}) / 2
    <l'| sin(theta) |l> = (delta_{l',l+1} - delta_{l',l-1}) / (2i)

which fixes every sign below; the quadrature oracle in the test suite pins
the convention down.  Operator matrices are dense complex and carry a
symmetry tag that can be verified against the entries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.linalg import toeplitz
from scipy.special import jv

from .errors import DomainError, IntegrityError

#: Fraction of the window (total, both sides) treated as the leakage guard zone.
EDGE_GUARD_FRACTION = 0.05

#: Symmetry-tag consistency tolerance (max-abs residual).
TAG_TOL = 1e-12


class SymmetryTag(str, Enum):
    HERMITIAN = "hermitian"
    ANTI_HERMITIAN = "anti_hermitian"
    UNITARY = "unitary"
    NONE = "none"


@dataclass(frozen=True)
class BasisWindow:
    """Truncated momentum window: R states centered on ``center``."""

    center: int
    size: int

    def __post_init__(self):
        if self.size <= 0 or self.size % 2 != 0:
            raise DomainError(f"window size must be even and positive, got {self.size}")

    @property
    def l_min(self) -> int:
        return self.center - self.size // 2

    @property
    def l_max(self) -> int:
        return self.center + self.size // 2 - 1

    def l_values(self) -> np.ndarray:
        return np.arange(self.l_min, self.l_min + self.size, dtype=np.int64)

    def index_of(self, l: int) -> int:
        if not (self.l_min <= l <= self.l_max):
            raise DomainError(f"l={l} outside window [{self.l_min}, {self.l_max}]")
        return int(l - self.l_min)

    def guard_cells(self, fraction: float = EDGE_GUARD_FRACTION) -> int:
        """Number of guard cells per side (total guard zone = ``fraction`` of R)."""
        return max(1, math.ceil(0.5 * fraction * self.size))


@dataclass
class RotorState:
    """Complex amplitude vector over a window; owned by a single trajectory."""

    window: BasisWindow
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.complex128)
        if self.amplitudes.shape != (self.window.size,):
            raise DomainError(
                f"amplitude vector has shape {self.amplitudes.shape}, "
                f"window needs ({self.window.size},)")

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def edge_probability(self, fraction: float = EDGE_GUARD_FRACTION) -> float:
        """Total probability in the outermost ``fraction`` of the window."""
        g = self.window.guard_cells(fraction)
        p = np.abs(self.amplitudes) ** 2
        return float(p[:g].sum() + p[-g:].sum())

    def copy(self) -> "RotorState":
        return RotorState(self.window, self.amplitudes.copy())


@dataclass(frozen=True)
class OperatorMatrix:
    """Dense operator on the window with a declared symmetry."""

    window: BasisWindow
    matrix: np.ndarray
    tag: SymmetryTag = SymmetryTag.NONE

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.complex128)
        object.__setattr__(self, "matrix", m)
        r = self.window.size
        if m.shape != (r, r):
            raise DomainError(f"matrix shape {m.shape} does not match window size {r}")

    def tag_residual(self, interior_margin: int = 0) -> float:
        """Max-abs violation of the declared symmetry.

        ``interior_margin`` restricts the check to rows at least that far
        from the window edges (used for operators that are unitary only up
        to truncation leakage).
        """
        m = self.matrix
        if self.tag is SymmetryTag.HERMITIAN:
            res = m - m.conj().T
        elif self.tag is SymmetryTag.ANTI_HERMITIAN:
            res = m + m.conj().T
        elif self.tag is SymmetryTag.UNITARY:
            res = m.conj().T @ m - np.eye(self.window.size)
        else:
            return 0.0
        if interior_margin > 0:
            res = res[interior_margin:-interior_margin]
        return float(np.abs(res).max()) if res.size else 0.0

    def check_tag(self, tol: float = TAG_TOL, interior_margin: int = 0) -> None:
        res = self.tag_residual(interior_margin)
        if res > tol:
            raise IntegrityError(
                f"{self.tag.value} tag violated: residual {res:.3e} > {tol:.1e}")


def build_cos_theta(window: BasisWindow) -> OperatorMatrix:
    """cos(theta): 1/2 on the two off-diagonals."""
    r = window.size
    m = np.zeros((r, r), dtype=np.complex128)
    idx = np.arange(r - 1)
    m[idx + 1, idx] = 0.5
    m[idx, idx + 1] = 0.5
    return OperatorMatrix(window, m, SymmetryTag.HERMITIAN)


def build_sin_theta(window: BasisWindow) -> OperatorMatrix:
    """sin(theta): +-1/(2i) on the off-diagonals (raising entry +1/(2i))."""
    r = window.size
    m = np.zeros((r, r), dtype=np.complex128)
    idx = np.arange(r - 1)
    m[idx + 1, idx] = 1.0 / 2j      # l' = l + 1
    m[idx, idx + 1] = -1.0 / 2j     # l' = l - 1
    return OperatorMatrix(window, m, SymmetryTag.HERMITIAN)


def build_l_squared(window: BasisWindow) -> OperatorMatrix:
    m = np.diag(window.l_values().astype(np.float64) ** 2).astype(np.complex128)
    return OperatorMatrix(window, m, SymmetryTag.HERMITIAN)


def build_sym_lsin(window: BasisWindow) -> OperatorMatrix:
    """Symmetrized l*sin(theta) + sin(theta)*l; entries (l + l') <l'|sin|l>."""
    r = window.size
    lv = window.l_values().astype(np.float64)
    m = np.zeros((r, r), dtype=np.complex128)
    idx = np.arange(r - 1)
    m[idx + 1, idx] = (lv[idx + 1] + lv[idx]) / 2j
    m[idx, idx + 1] = -(lv[idx] + lv[idx + 1]) / 2j
    return OperatorMatrix(window, m, SymmetryTag.HERMITIAN)


def build_sin_sq(window: BasisWindow) -> OperatorMatrix:
    """sin^2(theta) = 1/2 - (shift_{+2} + shift_{-2})/4."""
    r = window.size
    m = 0.5 * np.eye(r, dtype=np.complex128)
    idx = np.arange(r - 2)
    m[idx + 2, idx] = -0.25
    m[idx, idx + 2] = -0.25
    return OperatorMatrix(window, m, SymmetryTag.HERMITIAN)


def gaussian_state(window: BasisWindow, l0: int, margin: int = 20) -> RotorState:
    """Unit-norm Gaussian exp(-(l - l0)^2) on the window.

    Requires at least ``margin`` states on each side of l0 so the profile
    is numerically complete inside the window.
    """
    i0 = window.index_of(l0)
    if i0 < margin or i0 > window.size - 1 - margin:
        raise DomainError(
            f"l0={l0} needs >= {margin} states margin inside [{window.l_min}, {window.l_max}]")
    lv = window.l_values().astype(np.float64)
    amps = np.exp(-((lv - l0) ** 2)).astype(np.complex128)
    amps /= np.linalg.norm(amps)
    return RotorState(window, amps)


def momentum_eigenstate(window: BasisWindow, l0: int) -> RotorState:
    amps = np.zeros(window.size, dtype=np.complex128)
    amps[window.index_of(l0)] = 1.0
    return RotorState(window, amps)


def kinetic_energy(state: RotorState, norm_tol: float = 1e-6) -> float:
    """<l^2> in units hbar = 1; the reduction runs in extended precision."""
    nrm = state.norm()
    if abs(nrm - 1.0) > norm_tol:
        raise IntegrityError(f"state norm {nrm!r} deviates from 1 by more than {norm_tol}")
    lv2 = state.window.l_values().astype(np.longdouble) ** 2
    p = np.abs(state.amplitudes.astype(np.complex128)) ** 2
    return float(np.dot(lv2, p.astype(np.longdouble)))


_I_POWERS = np.array([1.0 + 0j, -1j, -1.0 + 0j, 1j])  # (-i)^d for d mod 4


def kick_matrix_bessel(window: BasisWindow, strength: float) -> OperatorMatrix:
    """Matrix of exp(-i K cos(theta)) from its exact Fourier coefficients.

    <l'| e^{-iK cos theta} |l> = (-i)^(l'-l) J_{l'-l}(K); this is the
    matrix-free oracle for the split-step kick factor.  Unitary up to
    truncation leakage in rows within ~K of the window edge.
    """
    if strength < 0:
        raise DomainError(f"kick strength must be >= 0, got {strength}")
    r = window.size
    d = np.arange(-(r - 1), r)
    vals = _I_POWERS[d % 4] * jv(d, strength)
    col = vals[r - 1:]        # d = l' - l = 0 .. r-1 down the first column
    row = vals[r - 1::-1]     # d = 0 .. -(r-1) along the first row
    return OperatorMatrix(window, toeplitz(col, row), SymmetryTag.UNITARY)
