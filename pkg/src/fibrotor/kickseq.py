"""Binary kick sequences driving the rotor.

Four families of kick-strength sequences K_1, K_2, K_3, ... over the two
amplitudes {k1, k2} are supported:

* ``fibonacci``  -- the golden-mean Fibonacci word, produced by the Beatty
  generating function gamma(n) = floor((n+1)*G) - floor(n*G) with
  G = (sqrt(5)+1)/2; gamma = 2 selects k1 and gamma = 1 selects k2.
* ``biperiodic`` -- k1 at even steps, k2 at odd steps.
* ``random``     -- k1 or k2 with probability 1/2 each from a seeded PCG64
  stream (bit-reproducible for a fixed seed).
* ``constant``   -- k1 at every step.

Floors of n*G are evaluated with integer square roots (floor(n*G) =
(n + isqrt(5 n^2)) // 2), so no floating-point rounding can flip a floor
near an integer boundary, for any n.  The vectorised variants use the same
exact arithmetic in int64 and are valid for n up to ~1.3e9.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DomainError, UsageError

#: Golden mean G = (sqrt(5)+1)/2 as a float (exact integer paths below never use it).
GOLDEN_MEAN = (1.0 + math.sqrt(5.0)) / 2.0

#: Identity of the seeded generator behind the ``random`` kind, recorded in manifests.
PRNG_NAME = "numpy.random.PCG64/integers(1,3)"

#: Word labels: 1 selects amplitude k1, 2 selects amplitude k2.
K1_LABEL = 1
K2_LABEL = 2

# Largest n for which 5*n^2 fits into int64 in the vectorised floor routines.
_VECTOR_N_MAX = 1_300_000_000


class SequenceKind(str, Enum):
    FIBONACCI = "fibonacci"
    BIPERIODIC = "biperiodic"
    RANDOM = "random"
    CONSTANT = "constant"


@dataclass(frozen=True)
class KickSequenceSpec:
    """Rule producing the kick amplitude for every stroboscopic index n >= 1."""

    kind: SequenceKind
    k1: float
    k2: float = 0.0
    seed: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", SequenceKind(self.kind))
        if not math.isfinite(self.k1):
            raise DomainError(f"k1 must be finite, got {self.k1}")
        if self.kind is not SequenceKind.CONSTANT and not math.isfinite(self.k2):
            raise DomainError(f"k2 must be finite, got {self.k2}")
        if self.kind is SequenceKind.RANDOM:
            if self.seed is None:
                raise UsageError("random kick sequence requires a seed")
            if int(self.seed) < 0:
                raise DomainError("seed must be a non-negative integer")

    def amplitudes_of_labels(self, labels: np.ndarray) -> np.ndarray:
        k2 = self.k1 if self.kind is SequenceKind.CONSTANT else self.k2
        return np.where(labels == K1_LABEL, float(self.k1), float(k2))


def _floor_golden_mult(n: int) -> int:
    """floor(n*G), exact for any non-negative integer n."""
    return (n + math.isqrt(5 * n * n)) // 2


def floor_n_over_golden(n: int) -> int:
    """floor(n/G) = floor(n*G/(1+G)), exact for any non-negative integer n."""
    return (math.isqrt(5 * n * n) - n) // 2


def floor_n_over_golden_sq(n: int) -> int:
    """floor(n/G^2) = floor(n/(1+G)) for n >= 1.

    Complementary to :func:`floor_n_over_golden`: the two floors always sum
    to n - 1 because n/G is irrational.
    """
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    return n - 1 - floor_n_over_golden(n)


def gamma(n: int) -> int:
    """Generating symbol of the Fibonacci word: floor((n+1)G) - floor(nG), in {1, 2}."""
    if n < 1:
        raise DomainError(f"gamma is defined for n >= 1, got {n}")
    return _floor_golden_mult(n + 1) - _floor_golden_mult(n)


def _exact_isqrt_i64(x: np.ndarray) -> np.ndarray:
    """Exact integer sqrt of non-negative int64 values (float seed + fixup)."""
    s = np.sqrt(x.astype(np.float64)).astype(np.int64)
    # float seed is within 1 of the true root for x < 2^63; fix both directions
    s = np.where((s + 1) * (s + 1) <= x, s + 1, s)
    s = np.where(s * s > x, s - 1, s)
    return s


def gamma_array(n: np.ndarray) -> np.ndarray:
    """Vectorised :func:`gamma` over an int array (values 1 <= n <= ~1.3e9)."""
    n = np.asarray(n, dtype=np.int64)
    if n.size and int(n.min()) < 1:
        raise DomainError("gamma is defined for n >= 1")
    if n.size and int(n.max()) > _VECTOR_N_MAX:
        raise DomainError(f"vectorised gamma supports n <= {_VECTOR_N_MAX}")

    def beatty(m: np.ndarray) -> np.ndarray:
        return (m + _exact_isqrt_i64(5 * m * m)) // 2

    return (beatty(n + 1) - beatty(n)).astype(np.uint8)


def fibonacci_instant(m: int) -> int:
    """F(m) with F(1) = 1, F(2) = 2, F(m) = F(m-1) + F(m-2)."""
    if m < 1:
        raise DomainError(f"Fibonacci index must be >= 1, got {m}")
    a, b = 1, 2
    if m == 1:
        return a
    for _ in range(m - 2):
        a, b = b, a + b
    return b


def fibonacci_instants_upto(n: int) -> list[int]:
    """All Fibonacci instants F(1), F(2), ... that are <= n, ascending."""
    out: list[int] = []
    a, b = 1, 2
    while a <= n:
        out.append(a)
        a, b = b, a + b
    return out


def fibonacci_flags(ns: np.ndarray) -> np.ndarray:
    """Boolean mask marking which entries of ``ns`` are Fibonacci instants."""
    ns = np.asarray(ns)
    if ns.size == 0:
        return np.zeros(0, dtype=bool)
    instants = set(fibonacci_instants_upto(int(ns.max())))
    return np.array([int(n) in instants for n in ns], dtype=bool)


def fibonacci_word_labels(m: int) -> np.ndarray:
    """The word S_m over labels {1, 2}, built by the substitution S_m = S_{m-1} S_{m-2}.

    This is the independent construction used to cross-check the
    gamma-generated sequence; S_1 = [1], S_2 = [1, 2].
    """
    if m < 1:
        raise DomainError(f"word index must be >= 1, got {m}")
    a = np.array([K1_LABEL], dtype=np.uint8)
    b = np.array([K1_LABEL, K2_LABEL], dtype=np.uint8)
    if m == 1:
        return a
    for _ in range(m - 2):
        a, b = b, np.concatenate([b, a])
    return b


def _random_labels(seed: int, count: int) -> np.ndarray:
    rng = np.random.Generator(np.random.PCG64(seed))
    return rng.integers(K1_LABEL, K2_LABEL + 1, size=count, dtype=np.uint8)


def kick_labels(spec: KickSequenceSpec, n_steps: int) -> np.ndarray:
    """Labels (1 -> k1, 2 -> k2) for steps n = 1 .. n_steps."""
    if n_steps < 0:
        raise DomainError(f"n_steps must be >= 0, got {n_steps}")
    if n_steps == 0:
        return np.zeros(0, dtype=np.uint8)
    if spec.kind is SequenceKind.FIBONACCI:
        # gamma = 2 -> k1, gamma = 1 -> k2
        return (3 - gamma_array(np.arange(1, n_steps + 1, dtype=np.int64))).astype(np.uint8)
    if spec.kind is SequenceKind.BIPERIODIC:
        n = np.arange(1, n_steps + 1)
        return np.where(n % 2 == 0, K1_LABEL, K2_LABEL).astype(np.uint8)
    if spec.kind is SequenceKind.RANDOM:
        return _random_labels(int(spec.seed), n_steps)
    return np.full(n_steps, K1_LABEL, dtype=np.uint8)


def kick_amplitudes(spec: KickSequenceSpec, n_steps: int) -> np.ndarray:
    """Amplitudes K_1 .. K_{n_steps} as float64."""
    return spec.amplitudes_of_labels(kick_labels(spec, n_steps))


def kick_amplitude(n: int, spec: KickSequenceSpec) -> float:
    """Amplitude of the n-th kick (n >= 1).

    Pure in all cases; for the random kind the seeded stream is regenerated
    from the start, so the cost is O(n) but the value never depends on call
    order.
    """
    if n < 1:
        raise DomainError(f"kick index must be >= 1, got {n}")
    if spec.kind is SequenceKind.FIBONACCI:
        label = K1_LABEL if gamma(n) == 2 else K2_LABEL
    elif spec.kind is SequenceKind.BIPERIODIC:
        label = K1_LABEL if n % 2 == 0 else K2_LABEL
    elif spec.kind is SequenceKind.RANDOM:
        label = int(_random_labels(int(spec.seed), n)[n - 1])
    else:
        label = K1_LABEL
    return float(spec.k1 if label == K1_LABEL else spec.k2)


def sequence_prefix(m: int, spec: KickSequenceSpec) -> np.ndarray:
    """First F(m) amplitudes of a Fibonacci kick sequence."""
    if spec.kind is not SequenceKind.FIBONACCI:
        raise UsageError("sequence_prefix is defined for the fibonacci kind only")
    return kick_amplitudes(spec, fibonacci_instant(m))


def sequence_checksum(labels: np.ndarray, limit: int = 100_000) -> str:
    """sha256 over the first min(len, limit) kick labels; identifies a drive."""
    head = np.ascontiguousarray(labels[:limit], dtype=np.uint8)
    return hashlib.sha256(head.tobytes()).hexdigest()
