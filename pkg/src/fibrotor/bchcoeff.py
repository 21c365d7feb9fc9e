"""Exact expansion-coefficient algebra along a binary kick word.

Composing the per-step generators of a binary drive produces, to first order
in the drive period, an accumulated generator

    alpha * A1 + beta * A2 + delta * [A2, A1]
        + eta1 * [A1, [A1, A2]] + eta2 * [A2, [A2, A1]],

with A_i = -i L_i.  The five coefficients obey simple recursions under each
kick type and, for the Fibonacci word, admit closed forms as floor-function
sums.  Every quantity here is an exact rational: alpha and beta are integers,
delta has denominator 2 and eta1/eta2 denominator 12, so the engine runs on
plain (arbitrary-precision) integers scaled by 2 and 12 and only converts to
`fractions.Fraction` at the API boundary.

The same module houses the saturated values of the normalized coefficients
at Fibonacci instants, the fourth-order mu asymptotics that grow without
bound, and the delocalization-time estimate derived from them.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, TextIO

from .errors import DomainError, ResourceError, UsageError
from .kickseq import (
    GOLDEN_MEAN,
    K1_LABEL,
    K2_LABEL,
    fibonacci_instant,
    floor_n_over_golden,
    floor_n_over_golden_sq,
    gamma,
    kick_labels,
    KickSequenceSpec,
    SequenceKind,
)

#: Guard for CSV emission and other O(n) sweeps (runtime, not correctness).
N_MAX_SWEEP = 20_000_000


@dataclass(frozen=True)
class CoefficientState:
    """Exact coefficients (alpha, beta, delta, eta1, eta2) after n kicks."""

    n: int
    alpha: Fraction
    beta: Fraction
    delta: Fraction
    eta1: Fraction
    eta2: Fraction

    @classmethod
    def zero(cls) -> "CoefficientState":
        z = Fraction(0)
        return cls(0, z, z, z, z, z)

    def normalized(self) -> tuple[Fraction, Fraction, Fraction, Fraction, Fraction]:
        """(alpha/n, beta/n, delta/n, eta1/n, eta2/n); n must be >= 1."""
        if self.n < 1:
            raise DomainError("normalized coefficients need n >= 1")
        n = self.n
        return (self.alpha / n, self.beta / n, self.delta / n,
                self.eta1 / n, self.eta2 / n)


def _check_label(kick) -> int:
    if kick in (K1_LABEL, "K1", "k1"):
        return K1_LABEL
    if kick in (K2_LABEL, "K2", "k2"):
        return K2_LABEL
    raise UsageError(f"kick must be K1/K2 (or labels 1/2), got {kick!r}")


def recursion_step(c: CoefficientState, kick) -> CoefficientState:
    """Advance the coefficient tuple by one kick of the given type.

    For a k1 kick:  alpha+1,  delta -= beta/2,
                    eta1 += -delta/2 + beta(1-alpha)/12,  eta2 += beta^2/12.
    For a k2 kick:  beta+1,   delta += alpha/2,
                    eta1 += alpha^2/12,  eta2 += delta/2 + alpha(1-beta)/12.
    All right-hand sides are evaluated at the incoming state; arithmetic is
    exact, no rounding ever.
    """
    label = _check_label(kick)
    a, b, d, e1, e2 = c.alpha, c.beta, c.delta, c.eta1, c.eta2
    if label == K1_LABEL:
        return CoefficientState(
            c.n + 1,
            a + 1,
            b,
            d - Fraction(b, 2),
            e1 - d / 2 + b * (1 - a) / 12,
            e2 + b * b / 12,
        )
    return CoefficientState(
        c.n + 1,
        a,
        b + 1,
        d + Fraction(a, 2),
        e1 + a * a / 12,
        e2 + d / 2 + a * (1 - b) / 12,
    )


class _IntAccumulator:
    """Recursion engine on scaled integers (alpha, beta, 2*delta, 12*eta1, 12*eta2)."""

    __slots__ = ("n", "a", "b", "d2", "e1", "e2")

    def __init__(self):
        self.n = 0
        self.a = 0
        self.b = 0
        self.d2 = 0
        self.e1 = 0
        self.e2 = 0

    def push(self, label: int) -> None:
        a, b, d2 = self.a, self.b, self.d2
        if label == K1_LABEL:
            self.a = a + 1
            self.d2 = d2 - b
            self.e1 += -3 * d2 + b * (1 - a)
            self.e2 += b * b
        else:
            self.b = b + 1
            self.d2 = d2 + a
            self.e1 += a * a
            self.e2 += 3 * d2 + a * (1 - b)
        self.n += 1

    def state(self) -> CoefficientState:
        return CoefficientState(
            self.n,
            Fraction(self.a),
            Fraction(self.b),
            Fraction(self.d2, 2),
            Fraction(self.e1, 12),
            Fraction(self.e2, 12),
        )

    def raw(self) -> tuple[int, int, int, int, int, int]:
        return (self.n, self.a, self.b, self.d2, self.e1, self.e2)


class _ClosedFormAccumulator:
    """Closed-form sweep: per-step increments built from golden-ratio floors.

    Maintains its own running 2*delta; the increments are functions of
    gamma(n) and of floor(n/G), floor(n/G^2) only, which is the independent
    route against the kick-count recursion above.
    """

    __slots__ = ("n", "a", "b", "d2", "e1", "e2")

    def __init__(self):
        self.n = 0
        self.a = 0
        self.b = 0
        self.d2 = 0
        self.e1 = 0
        self.e2 = 0

    def push(self) -> None:
        n = self.n + 1
        g = gamma(n)
        fg = floor_n_over_golden(n)       # floor(nG/(1+G))
        fg2 = floor_n_over_golden_sq(n)   # floor(n/(1+G))
        d2_prev = self.d2
        self.a += g - 1
        self.b += 2 - g
        self.d2 += -((g - 1) * (n - 1) - fg)
        self.e1 += (2 - g) * fg * fg + (1 - g) * (3 * d2_prev - (2 - n) * fg2 - fg2 * fg2)
        self.e2 += (g - 1) * fg2 * fg2 + (2 - g) * (3 * d2_prev + (2 - n) * fg + fg * fg)
        self.n = n

    def state(self) -> CoefficientState:
        return CoefficientState(
            self.n,
            Fraction(self.a),
            Fraction(self.b),
            Fraction(self.d2, 2),
            Fraction(self.e1, 12),
            Fraction(self.e2, 12),
        )

    def raw(self) -> tuple[int, int, int, int, int, int]:
        return (self.n, self.a, self.b, self.d2, self.e1, self.e2)


def coefficients_along_word(labels: Iterable[int]) -> Iterator[CoefficientState]:
    """States after each kick of an arbitrary binary word (labels in {1, 2})."""
    acc = _IntAccumulator()
    for label in labels:
        if label not in (K1_LABEL, K2_LABEL):
            raise UsageError(f"labels must be 1 or 2, got {label!r}")
        acc.push(int(label))
        yield acc.state()


def fibonacci_coefficients(n_max: int) -> Iterator[CoefficientState]:
    """States after each kick of the Fibonacci word, n = 1 .. n_max."""
    if n_max < 1:
        raise DomainError(f"n_max must be >= 1, got {n_max}")
    if n_max > N_MAX_SWEEP:
        raise ResourceError(f"n_max {n_max} exceeds sweep guard {N_MAX_SWEEP}")
    spec = KickSequenceSpec(SequenceKind.FIBONACCI, 1.0, 0.0)
    return coefficients_along_word(kick_labels(spec, n_max))


def closed_form_sweep(n_max: int) -> Iterator[CoefficientState]:
    """Closed-form states for n = 1 .. n_max (floor-sum route)."""
    if n_max < 1:
        raise DomainError(f"n_max must be >= 1, got {n_max}")
    if n_max > N_MAX_SWEEP:
        raise ResourceError(f"n_max {n_max} exceeds sweep guard {N_MAX_SWEEP}")
    acc = _ClosedFormAccumulator()
    for _ in range(n_max):
        acc.push()
        yield acc.state()


def coefficients_closed_form(n: int) -> CoefficientState:
    """Exact coefficients at index n from the floor-function sums."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    if n > N_MAX_SWEEP:
        raise ResourceError(f"n {n} exceeds sweep guard {N_MAX_SWEEP}")
    acc = _ClosedFormAccumulator()
    for _ in range(n):
        acc.push()
    return acc.state()


@dataclass(frozen=True)
class SaturatedCoefficients:
    """Limits of the normalized coefficients at Fibonacci instants.

    alpha, beta, delta converge to single values 1/G, 1/G^2, -1/G^3; eta1 and
    eta2 oscillate between an even-index and an odd-index branch, whose means
    are what the effective per-step generator consumes.
    """

    alpha: float
    beta: float
    delta: float
    eta1_even: float
    eta1_odd: float
    eta1_mean: float
    eta2_even: float
    eta2_odd: float
    eta2_mean: float


def saturated_necs() -> SaturatedCoefficients:
    """Saturation values of the normalized coefficients at Fibonacci instants.

    alpha/F -> 1/G and beta/F -> 1/G^2 follow from the letter counts of the
    word.  delta/F -> +1/(2 G^3): this is the exact limit of the recursion
    implemented here (cross-checked against matrix-logarithm fits in the
    test suite), delta has no parity oscillation.  eta1/F and eta2/F
    oscillate between an even- and an odd-index branch; the means feed the
    effective per-step generator.
    """
    g = GOLDEN_MEAN
    eta1_osc = 2.0 / g + 1.0 / g**2
    eta2_osc = 2.0 / g**2 + 1.0 / g**3
    return SaturatedCoefficients(
        alpha=1.0 / g,
        beta=1.0 / g**2,
        delta=0.5 / g**3,
        eta1_even=(1.0 / g**4 + eta1_osc) / 12.0,
        eta1_odd=(1.0 / g**4 - eta1_osc) / 12.0,
        eta1_mean=1.0 / (12.0 * g**4),
        eta2_even=(1.0 / g**5 - eta2_osc + 1.0 / g**2) / 12.0,
        eta2_odd=(1.0 / g**5 + eta2_osc + 1.0 / g**2) / 12.0,
        eta2_mean=(1.0 / g**5 + 1.0 / g**2) / 12.0,
    )


@dataclass(frozen=True)
class MuAsymptotics:
    """Normalized fourth-order coefficients mu_i(F(m))/F(m) at Fibonacci index m.

    These multiply the triple-nested commutators [L1,[L1,[L1,L2]]],
    [L2,[L2,[L1,L2]]] and [L1,[L2,[L1,L2]]]; unlike the five coefficients
    above they never saturate, growing like G^m/120 with alternating sign.
    """

    m: int
    mu1: float
    mu2: float
    mu3: float


def mu_normalized(m: int) -> MuAsymptotics:
    """Asymptotic normalized mu_1, mu_2, mu_3 at Fibonacci index m (m >= 1)."""
    if m < 1:
        raise DomainError(f"Fibonacci index must be >= 1, got {m}")
    g = GOLDEN_MEAN
    s = -1.0 if m % 2 else 1.0
    lead = g ** (m - 1)
    mu1 = s / 120.0 * (lead + (s * (3 * g - 4) - 1 - 3 * g) / g)
    mu2 = s / 120.0 * (lead * (2 - g) + (s * (4 * g - 7) - 2 - g) / g)
    mu3 = s / 120.0 * (2 * lead * (1 - g) + (s * (3 - g) + 3 + 4 * g) / g)
    return MuAsymptotics(m, mu1, mu2, mu3)


def delocalization_time(tau: float) -> tuple[int, int]:
    """Smallest Fibonacci index m with tau^2 G^m / 120 >= 1, and F(m).

    Estimates when the unbounded fourth-order terms overtake the first-order
    generator and the quasi-localized regime ends.  Only meaningful in the
    high-frequency regime, hence the 0 < tau < 1 domain.
    """
    if not (0.0 < tau < 1.0):
        raise DomainError(f"delocalization estimate requires 0 < tau < 1, got {tau}")
    bound = 120.0 / (tau * tau)
    m = max(1, math.ceil(math.log(bound) / math.log(GOLDEN_MEAN)))
    while m > 1 and GOLDEN_MEAN ** (m - 1) >= bound:
        m -= 1
    while GOLDEN_MEAN ** m < bound:
        m += 1
    return m, fibonacci_instant(m)


def write_coefficient_csv(out: TextIO, n_max: int, at: str = "stroboscopic") -> int:
    """Emit coefficient rows as CSV; returns the number of data rows.

    Columns: n, each coefficient as exact fraction string and as decimal,
    and an is_fibonacci_instant flag.  ``at`` selects every index
    ("stroboscopic", n_max is the last index) or only Fibonacci instants
    ("fibonacci", n_max is the last Fibonacci index m).
    """
    if at not in ("stroboscopic", "fibonacci"):
        raise UsageError(f"at must be 'stroboscopic' or 'fibonacci', got {at!r}")
    last_n = n_max if at == "stroboscopic" else fibonacci_instant(n_max)
    if last_n > N_MAX_SWEEP:
        raise ResourceError(f"requested sweep to n={last_n} exceeds guard {N_MAX_SWEEP}")

    from .kickseq import fibonacci_instants_upto

    fib_marks = set(fibonacci_instants_upto(last_n))
    keep = fib_marks if at == "fibonacci" else None

    writer = csv.writer(out, lineterminator="\n")
    writer.writerow([
        "n",
        "alpha", "alpha_decimal",
        "beta", "beta_decimal",
        "delta", "delta_decimal",
        "eta1", "eta1_decimal",
        "eta2", "eta2_decimal",
        "is_fibonacci_instant",
    ])
    rows = 0
    for state in fibonacci_coefficients(last_n):
        n = state.n
        if keep is not None and n not in keep:
            continue
        is_fib = n in fib_marks
        writer.writerow([
            n,
            str(state.alpha), repr(float(state.alpha)),
            str(state.beta), repr(float(state.beta)),
            str(state.delta), repr(float(state.delta)),
            str(state.eta1), repr(float(state.eta1)),
            str(state.eta2), repr(float(state.eta2)),
            int(is_fib),
        ])
        rows += 1
    return rows
