"""Exact stroboscopic evolution of the kicked rotor.

One step applies the kick factor exp(-i K_N cos theta), diagonal on an
R-point angle grid reached by an FFT of the momentum amplitudes, followed by
the free-rotation factor exp(-i l^2 tau / 2), diagonal in momentum.  The
angle grid has exactly R points (unpadded), so the transform is a unitary
change of basis and each factor is applied exactly; the only approximation
in a trajectory is the truncation of the momentum window itself, watched by
the edge-leakage guard.

Kick n acts at the start of interval n; the energy sample recorded at index
N is taken after N complete steps, i.e. just before kick N+1 would act.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft

from . import kickseq
from .errors import DomainError, TruncationError, UsageError
from .hilbert import EDGE_GUARD_FRACTION, BasisWindow, RotorState

#: Edge-leakage abort threshold (total probability in the guard zone).
LEAKAGE_TOL = 1e-8

#: Norm-deviation abort threshold (unitarity means drift stays ~1e-13 even
#: over 1e6 steps; exceeding this signals a genuine defect, not roundoff).
NORM_TOL = 1e-6


@dataclass(frozen=True)
class LogPolicy:
    """Which stroboscopic indices of a trajectory get an energy sample."""

    kind: str = "log_spaced"  # every_step | fibonacci_instants | log_spaced
    points_per_decade: int = 24

    def __post_init__(self):
        if self.kind not in ("every_step", "fibonacci_instants", "log_spaced"):
            raise UsageError(f"unknown log policy {self.kind!r}")
        if self.kind == "log_spaced" and self.points_per_decade < 1:
            raise DomainError("points_per_decade must be >= 1")

    def instants(self, n_steps: int) -> np.ndarray:
        if n_steps < 1:
            raise DomainError("n_steps must be >= 1")
        if self.kind == "every_step":
            return np.arange(1, n_steps + 1, dtype=np.int64)
        if self.kind == "fibonacci_instants":
            return np.array(kickseq.fibonacci_instants_upto(n_steps), dtype=np.int64)
        decades = math.log10(n_steps) if n_steps > 1 else 0.0
        count = max(2, int(round(self.points_per_decade * decades)) + 1)
        grid = np.unique(np.rint(np.geomspace(1, n_steps, count)).astype(np.int64))
        if grid[-1] != n_steps:
            grid = np.append(grid, n_steps)
        return grid


@dataclass(frozen=True)
class EvolutionConfig:
    tau: float
    spec: kickseq.KickSequenceSpec
    window: BasisWindow
    n_steps: int
    log_policy: LogPolicy = LogPolicy()
    leakage_tol: float = LEAKAGE_TOL
    edge_fraction: float = EDGE_GUARD_FRACTION
    guard_interval: int = 1

    def __post_init__(self):
        if not (self.tau >= 0.0 and math.isfinite(self.tau)):
            raise DomainError(f"tau must be finite and >= 0, got {self.tau}")
        if self.n_steps < 1:
            raise DomainError(f"n_steps must be >= 1, got {self.n_steps}")
        if self.guard_interval < 1:
            raise DomainError("guard_interval must be >= 1")


@dataclass
class EnergyTrace:
    """Kinetic-energy samples of one trajectory plus provenance metadata."""

    ns: np.ndarray
    energies: np.ndarray
    config: EvolutionConfig
    sequence_checksum: str
    prng_name: str | None = None
    norm_drift: float = 0.0
    failure: dict | None = None

    def __post_init__(self):
        self.ns = np.asarray(self.ns, dtype=np.int64)
        self.energies = np.asarray(self.energies, dtype=np.float64)
        if self.ns.size != self.energies.size:
            raise DomainError("ns and energies must have equal length")
        if self.ns.size and np.any(np.diff(self.ns) <= 0):
            raise DomainError("sample indices must be strictly increasing")
        if self.ns.size and np.any(self.energies < 0):
            raise DomainError("energies must be non-negative")

    def fibonacci_mask(self) -> np.ndarray:
        return kickseq.fibonacci_flags(self.ns)

    @property
    def ok(self) -> bool:
        return self.failure is None


class SplitStepPropagator:
    """Reusable split-step kernel for one window and period.

    Kick phases are cached per distinct amplitude, so driving with a binary
    sequence costs two table lookups plus two FFTs per step.
    """

    def __init__(self, window: BasisWindow, tau: float):
        if tau < 0 or not math.isfinite(tau):
            raise DomainError(f"tau must be finite and >= 0, got {tau}")
        self.window = window
        self.tau = float(tau)
        r = window.size
        self._cos_grid = np.cos(2.0 * np.pi * np.arange(r) / r)
        lv = window.l_values().astype(np.float64)
        self._free_phase = np.exp(-0.5j * self.tau * lv * lv)
        self._l2 = lv.astype(np.longdouble) ** 2
        self._kick_phases: dict[float, np.ndarray] = {}

    def kick_phase(self, strength: float) -> np.ndarray:
        key = float(strength)
        phase = self._kick_phases.get(key)
        if phase is None:
            phase = np.exp(-1j * key * self._cos_grid)
            self._kick_phases[key] = phase
        return phase

    def step_amplitudes(self, amps: np.ndarray, strength: float) -> np.ndarray:
        """One stroboscopic step on a raw amplitude vector (kick, then free flight)."""
        u = sfft.ifft(amps)
        u *= self.kick_phase(strength)
        out = sfft.fft(u)
        out *= self._free_phase
        return out

    def inverse_step_amplitudes(self, amps: np.ndarray, strength: float) -> np.ndarray:
        """Inverse of :meth:`step_amplitudes`: conjugate phases, reversed order."""
        u = sfft.ifft(amps * self._free_phase.conj())
        u *= self.kick_phase(strength).conj()
        return sfft.fft(u)

    def energy(self, amps: np.ndarray) -> float:
        p = (amps.real.astype(np.longdouble)) ** 2 + (amps.imag.astype(np.longdouble)) ** 2
        return float(np.dot(self._l2, p))


def step(state: RotorState, strength: float, tau: float) -> RotorState:
    """Single-step convenience wrapper returning a new state."""
    prop = SplitStepPropagator(state.window, tau)
    return RotorState(state.window, prop.step_amplitudes(state.amplitudes, strength))


def run_trajectory(config: EvolutionConfig, initial: RotorState) -> EnergyTrace:
    """Drive ``initial`` with K_N = kick_amplitude(N, spec) for N = 1..n_steps.

    Samples <l^2> at the instants selected by the log policy.  On an
    edge-leakage guard violation the run aborts cleanly and the partial
    trace carries a failure marker with the offending step.
    """
    if initial.window != config.window:
        raise UsageError("initial state window does not match the configuration")
    nrm0 = initial.norm()
    if abs(nrm0 - 1.0) > 1e-10:
        raise DomainError(f"initial state must be unit norm, got {nrm0!r}")

    labels = kickseq.kick_labels(config.spec, config.n_steps)
    amplitudes = config.spec.amplitudes_of_labels(labels)
    checksum = kickseq.sequence_checksum(labels)
    prng = kickseq.PRNG_NAME if config.spec.kind is kickseq.SequenceKind.RANDOM else None

    prop = SplitStepPropagator(config.window, config.tau)
    sample_at = np.zeros(config.n_steps + 1, dtype=bool)
    sample_at[config.log_policy.instants(config.n_steps)] = True

    guard = config.window.guard_cells(config.edge_fraction)
    amps = initial.amplitudes.copy()
    ns: list[int] = []
    energies: list[float] = []
    drift = abs(nrm0 - 1.0)
    failure: dict | None = None

    try:
        for n in range(1, config.n_steps + 1):
            amps = prop.step_amplitudes(amps, amplitudes[n - 1])
            take = sample_at[n]
            if take or n % config.guard_interval == 0:
                p_edge = float(np.add.reduce(np.abs(amps[:guard]) ** 2)
                               + np.add.reduce(np.abs(amps[-guard:]) ** 2))
                if p_edge > config.leakage_tol:
                    raise TruncationError(
                        f"edge leakage {p_edge:.3e} > {config.leakage_tol:.1e} "
                        f"at step {n}; enlarge the window",
                        step=n, leakage=p_edge)
                nrm = float(np.linalg.norm(amps))
                drift = max(drift, abs(nrm - 1.0))
                if abs(nrm - 1.0) > NORM_TOL:
                    raise TruncationError(
                        f"norm deviated to {nrm!r} at step {n}", step=n, leakage=p_edge)
            if take:
                ns.append(n)
                energies.append(prop.energy(amps))
    except TruncationError as exc:
        failure = {
            "kind": "truncation",
            "step": exc.step,
            "leakage": exc.leakage,
            "message": str(exc),
        }

    return EnergyTrace(
        ns=np.array(ns, dtype=np.int64),
        energies=np.array(energies, dtype=np.float64),
        config=config,
        sequence_checksum=checksum,
        prng_name=prng,
        norm_drift=drift,
        failure=failure,
    )


def suggest_window_size(k_max: float, tau: float, n_steps: int,
                        pad_to_pow2: bool = False) -> int:
    """Heuristic lower bound on R from the classical diffusion estimate.

    Uses <l^2>_expected = (K tau)^2 N and returns R >= 4 sqrt(<l^2>) + 512.
    This is a floor, not a guarantee: diffusive profiles carry ~1e-6 of
    their mass beyond 4.9 sigma, so runs that must satisfy the strict
    edge-leakage guard want roughly three times the 4-sigma estimate.
    """
    if k_max < 0 or tau < 0 or n_steps < 1:
        raise DomainError("k_max, tau must be >= 0 and n_steps >= 1")
    expected = (k_max * tau) ** 2 * n_steps
    r = int(math.ceil(4.0 * math.sqrt(expected) + 512.0))
    r += r % 2
    if pad_to_pow2:
        r = 1 << (r - 1).bit_length()
    return r
