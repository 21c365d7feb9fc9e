"""Regime classification of kinetic-energy traces.

A trace is called diffusive when log<l^2> grows against log N with slope
near one, localized when the late-time slope is flat, and crossover when a
plateau visibly breaks into renewed growth.  The crossover detector flags
the first logged instant whose trailing-window median exceeds a multiple of
the plateau reference while the local slope is already diffusive-ish; all
thresholds are configuration, not constants baked into the math.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import FitError, UsageError


@dataclass(frozen=True)
class CrossoverCriteria:
    """Thresholds for the plateau-break detector."""

    factor: float = 3.0          # trailing median must exceed factor * plateau_ref
    slope_min: float = 0.5       # and the local log-log slope must exceed this
    window: int = 9              # trailing window length in logged points
    min_decades: float = 3.0     # required trace span in N


@dataclass(frozen=True)
class RegimeThresholds:
    localized_slope: float = 0.15
    diffusive_band: tuple[float, float] = (0.8, 1.2)
    crossover: CrossoverCriteria = field(default_factory=CrossoverCriteria)


@dataclass(frozen=True)
class RegimeReport:
    slope: float
    slope_stderr: float
    plateau_mean: float
    plateau_band: tuple[float, float]
    crossover_step: int | None
    verdict: str  # localized | diffusive | crossover | indeterminate

    def as_dict(self) -> dict:
        return {
            "slope": self.slope,
            "slope_stderr": self.slope_stderr,
            "plateau_mean": self.plateau_mean,
            "plateau_band": list(self.plateau_band),
            "crossover_step": self.crossover_step,
            "verdict": self.verdict,
        }


def _samples(trace, n_min: int | None = None, n_max: int | None = None):
    ns = np.asarray(trace.ns, dtype=np.float64)
    energies = np.asarray(trace.energies, dtype=np.float64)
    if n_min is not None or n_max is not None:
        lo = -np.inf if n_min is None else n_min
        hi = np.inf if n_max is None else n_max
        mask = (ns >= lo) & (ns <= hi)
        ns, energies = ns[mask], energies[mask]
    return ns, energies


def fit_growth(trace, n_min: int, n_max: int) -> tuple[float, float]:
    """Least-squares slope of log<l^2> against log N over [n_min, n_max].

    Returns (slope, stderr).  Requires at least 10 samples in the window,
    all with positive energy.
    """
    ns, energies = _samples(trace, n_min, n_max)
    if ns.size < 10:
        raise FitError(f"need >= 10 samples in [{n_min}, {n_max}], have {ns.size}")
    if np.any(energies <= 0):
        raise FitError("growth fit needs strictly positive energies")
    x = np.log(ns)
    y = np.log(energies)
    x_c = x - x.mean()
    sxx = float(np.dot(x_c, x_c))
    if sxx == 0.0:
        raise FitError("degenerate fit window (single N value)")
    slope = float(np.dot(x_c, y) / sxx)
    resid = y - y.mean() - slope * x_c
    dof = max(1, ns.size - 2)
    stderr = math.sqrt(float(np.dot(resid, resid)) / dof / sxx)
    return slope, stderr


def local_slope(ns: np.ndarray, energies: np.ndarray) -> float:
    x = np.log(ns.astype(np.float64))
    y = np.log(np.maximum(energies, 1e-300))
    x_c = x - x.mean()
    sxx = float(np.dot(x_c, x_c))
    if sxx == 0.0:
        return 0.0
    return float(np.dot(x_c, y) / sxx)


def detect_crossover(trace, plateau_ref: float,
                     criteria: CrossoverCriteria = CrossoverCriteria()) -> int | None:
    """First logged N whose trailing window leaves the plateau for growth.

    The trailing window (``criteria.window`` logged points ending at N) must
    have median energy above ``criteria.factor * plateau_ref`` and a local
    log-log slope above ``criteria.slope_min``.  Returns None when the trace
    never triggers; that is a valid outcome, not an error.
    """
    if plateau_ref <= 0:
        raise UsageError("plateau_ref must be positive")
    ns, energies = _samples(trace)
    if ns.size < criteria.window:
        return None
    span = ns.max() / max(ns.min(), 1)
    if span < 10 ** criteria.min_decades:
        raise UsageError(
            f"crossover detection needs >= {criteria.min_decades} decades of N, "
            f"trace spans {span:.1f}x")
    w = criteria.window
    for i in range(w - 1, ns.size):
        tail_n = ns[i - w + 1: i + 1]
        tail_e = energies[i - w + 1: i + 1]
        if float(np.median(tail_e)) <= criteria.factor * plateau_ref:
            continue
        if local_slope(tail_n, tail_e) > criteria.slope_min:
            return int(ns[i])
    return None


def plateau_stats(trace, n_min: int, n_max: int) -> tuple[float, tuple[float, float]]:
    """Mean and +-2 sigma band of the energy over a plateau window."""
    _, energies = _samples(trace, n_min, n_max)
    if energies.size == 0:
        raise FitError(f"no samples in plateau window [{n_min}, {n_max}]")
    mean = float(energies.mean())
    spread = 2.0 * float(energies.std())
    return mean, (mean - spread, mean + spread)


def classify_trace(trace,
                   thresholds: RegimeThresholds = RegimeThresholds(),
                   plateau_window: tuple[int, int] | None = None,
                   fit_window: tuple[int, int] | None = None) -> RegimeReport:
    """Full regime report for one trace.

    Windows default to the central decades of the trace: the plateau window
    is the second quarter of the log range and the fit window the final
    half.  Verdict rules: detected crossover wins; otherwise the late-time
    slope decides localized vs diffusive, anything else is indeterminate.
    """
    ns, _ = _samples(trace)
    if ns.size < 10:
        raise FitError("classification needs at least 10 samples")
    n_lo, n_hi = float(ns.min()), float(ns.max())
    q = (n_hi / max(n_lo, 1.0)) ** 0.25
    if fit_window is None:
        fit_window = (int(n_lo * q * q), int(n_hi))
    if plateau_window is None:
        plateau_window = (int(n_lo * q), int(n_lo * q * q))

    slope, stderr = fit_growth(trace, *fit_window)
    try:
        plateau_mean, band = plateau_stats(trace, *plateau_window)
    except FitError:
        plateau_mean, band = float("nan"), (float("nan"), float("nan"))

    crossover = None
    if plateau_mean > 0 and math.isfinite(plateau_mean):
        try:
            crossover = detect_crossover(trace, plateau_mean, thresholds.crossover)
        except UsageError:
            crossover = None

    if crossover is not None:
        verdict = "crossover"
    elif slope <= thresholds.localized_slope:
        verdict = "localized"
    elif thresholds.diffusive_band[0] <= slope <= thresholds.diffusive_band[1]:
        verdict = "diffusive"
    else:
        verdict = "indeterminate"
    return RegimeReport(slope, stderr, plateau_mean, band, crossover, verdict)


def sweep_summary_rows(reports: dict[str, RegimeReport]) -> list[list]:
    """CSV rows (one per parameter point) for a sweep of regime reports."""
    rows = [["run", "slope", "slope_stderr", "plateau_mean",
             "plateau_low", "plateau_high", "crossover_step", "verdict"]]
    for name in sorted(reports):
        r = reports[name]
        rows.append([
            name, repr(r.slope), repr(r.slope_stderr), repr(r.plateau_mean),
            repr(r.plateau_band[0]), repr(r.plateau_band[1]),
            "" if r.crossover_step is None else r.crossover_step,
            r.verdict,
        ])
    return rows
