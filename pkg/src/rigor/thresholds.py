"""Closed-form threshold quantities for rigidity of G(n, c log n / n).

``phi(c, t) = 1 - c + t - t log(t/c)`` is the exponent governing the number of
vertices of degree ``t log n``; its root ``a(c)`` is the typical normalized
minimum degree. The minimum-degree bottleneck ``a(c)`` and the edge-count
bottleneck ``c/2`` cross at ``C_* = 2 / (1 - log 2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

# bisection tolerance for a(c)
ROOT_TOL = 1e-12


def phi(c: float, t: float) -> float:
    if c <= 0 or t <= 0:
        raise ValueError("phi needs c > 0 and t > 0")
    return 1.0 - c + t - t * math.log(t / c)


def a_of_c(c: float, tol: float = ROOT_TOL) -> float:
    """Unique root of phi(c, .) in (0, c), by bisection.

    phi(c, .) increases on (0, c) from 1 - c to 1, so the root exists only
    for c > 1.
    """
    if not c > 1:
        raise ValueError(f"a(c) is defined only for c > 1, got {c}")
    lo, hi = 0.0, float(c)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        # phi(c, 0+) = 1 - c < 0
        if mid > 0 and phi(c, mid) >= 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def c_star() -> float:
    return 2.0 / (1.0 - math.log(2.0))


@dataclass(frozen=True)
class ChernoffBounds:
    lower_sharp: float
    lower_simple: float
    upper: float | None


def chernoff_bounds(alpha: float, mean: float, t: float | None = None) -> ChernoffBounds:
    """Tail bounds for Y ~ Bin with E[Y] = ``mean``.

    ``lower_sharp`` and ``lower_simple`` bound P(Y <= alpha * mean);
    ``upper`` bounds P(Y >= t) and needs t > mean.
    """
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    if not mean > 0:
        raise ValueError("mean must be positive")
    sharp = math.exp(mean * (-(1.0 - alpha) - alpha * math.log(alpha)))
    simple = math.exp(-((1.0 - alpha) ** 2) * mean / 2.0)
    upper = None
    if t is not None:
        if not t > mean:
            raise ValueError("upper tail bound needs t > mean")
        upper = math.exp(t * math.log(math.e * mean / t))
    return ChernoffBounds(sharp, simple, upper)


class Regime(str, Enum):
    SPARSE = "Sparse"
    MIN_DEGREE = "MinDegree"
    EDGE_COUNT = "EdgeCount"


def regime_of(c: float) -> Regime:
    if c <= 1:
        return Regime.SPARSE
    return Regime.MIN_DEGREE if c < c_star() else Regime.EDGE_COUNT


@dataclass(frozen=True)
class RegimePrediction:
    n: int
    p: float
    c: float
    regime: Regime
    predicted_d: float

    @property
    def normalized(self) -> float:
        return self.predicted_d / math.log(self.n)

    def as_dict(self) -> dict:
        return {"c": self.c, "regime": self.regime.value, "predicted_d": self.predicted_d}


def c_of(n: int, p: float) -> float:
    return (n - 1) * p / math.log(n)


def p_of(n: int, c: float) -> float:
    return c * math.log(n) / (n - 1)


def predicted_dmax(n: int, p: float) -> RegimePrediction:
    """Leading-order prediction for the largest d with G(n, p) d-rigid.

    In the sparse regime (c <= 1) the minimum degree is 0 or 1; we predict 1
    at the connectivity boundary c = 1 and 0 below it.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    if not 0 < p < 1:
        raise ValueError("p must lie in (0, 1)")
    c = c_of(n, p)
    regime = regime_of(c)
    log_n = math.log(n)
    if regime is Regime.SPARSE:
        pred = 1.0 if c >= 1 else 0.0
    elif regime is Regime.MIN_DEGREE:
        pred = a_of_c(c) * log_n
    else:
        pred = c / 2.0 * log_n
    return RegimePrediction(n, p, c, regime, pred)


@dataclass(frozen=True)
class PhaseRow:
    c: float
    a_c: float
    half_c: float
    predicted: float
    regime: Regime


def phase_row(c: float) -> PhaseRow:
    a = a_of_c(c)
    return PhaseRow(c, a, c / 2.0, min(a, c / 2.0), regime_of(c))


def phase_diagram(c_min: float, c_max: float, steps: int) -> list[PhaseRow]:
    """Rows on an even grid of c, normalized by log n (the two bottlenecks and their min)."""
    if not 1 < c_min < c_max:
        raise ValueError("need 1 < c_min < c_max")
    if steps < 2:
        raise ValueError("need at least two grid points")
    h = (c_max - c_min) / (steps - 1)
    return [phase_row(c_min + i * h if i < steps - 1 else c_max) for i in range(steps)]
