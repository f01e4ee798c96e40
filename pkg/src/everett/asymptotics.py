"""Which count class carries the most weight, and how much is left over.

Maximising ln m(n_1..n_M) under Σ n_i = N with a Lagrange multiplier λ
(Stirling form of the log-factorials) gives n_i = e^λ |C_i|^2 and e^λ = N,
so the maximising frequencies are n_i/N = |C_i|^2. That closed form is
:func:`lagrange_fractions`. Everything else here works on exact log-gamma
class weights, never on the Stirling approximation.

Two readings of the "remaining weight vanishes" statement are computed:

* :func:`residual_measure` is the literal one, 1 − m(class nearest to
  N|C_i|^2). It does *not* go to zero: the single best class has weight of
  order N^{-(M-1)/2}, so the residual climbs towards 1.
* :func:`typicality_measure` totals every class whose frequencies are within
  ε of |C_i|^2. That one does go to 1, bounded below by Chebyshev.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .branching import Coefficients, CountClass, class_measure, class_table
from .measure import MeasureValue

TIE_RTOL = 1e-12
# float slack on |n_i/N - p_i| <= eps so that boundary classes are not lost to rounding
FREQ_SLACK = 1e-12


@dataclass(frozen=True)
class AsymptoticSolution:
    fractions: tuple[float, ...]
    lagrange_multiplier: float | None
    objective: float | None
    n: int | None = None


@dataclass(frozen=True)
class ModalClass:
    count_class: CountClass
    measure: MeasureValue
    tied_with: tuple[CountClass, ...] = ()

    @property
    def tie(self) -> bool:
        return bool(self.tied_with)


@dataclass(frozen=True)
class Residual:
    measure: MeasureValue
    count_class: CountClass
    class_weight: MeasureValue


def _xlogx(x: float) -> float:
    return x * math.log(x) if x > 0 else 0.0


def stirling_objective(counts, coeffs: Coefficients, lam: float, n: float | None = None) -> float:
    """F = N ln N − N − Σ(n_i ln n_i − n_i) + Σ n_i ln|C_i|^2 − λ(N − Σ n_i).

    ``counts`` may be real-valued. N defaults to their sum; pass it
    explicitly to treat it as fixed (e.g. for partial derivatives in n_i).
    """
    counts = [float(c) for c in counts]
    n = math.fsum(counts) if n is None else float(n)
    w = coeffs.weights
    val = _xlogx(n) - n - math.fsum(_xlogx(c) - c for c in counts)
    val += math.fsum(c * math.log(w[i]) for i, c in enumerate(counts) if c > 0)
    return val - lam * (n - math.fsum(counts))


def lagrange_fractions(coeffs: Coefficients, n: int | None = None) -> AsymptoticSolution:
    fractions = tuple(float(x) for x in coeffs.weights)
    if n is None:
        # per-system objective; λ is only defined through e^λ = N
        return AsymptoticSolution(fractions, None, stirling_objective(fractions, coeffs, 0.0))
    lam = math.log(n)
    return AsymptoticSolution(
        fractions, lam, stirling_objective([n * f for f in fractions], coeffs, lam), n
    )


def modal_class(coeffs: Coefficients, n: int) -> ModalClass:
    """Exhaustive argmax of the class weight at size ``n``.

    Ties (equal log weight up to ``TIE_RTOL``) go to the lexicographically
    smallest class; the others are listed in ``tied_with``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    counts, logm = class_table(coeffs, n)
    top = logm.max()
    near = np.flatnonzero(logm >= top - TIE_RTOL * max(1.0, abs(top)))
    best = int(near[0])
    top = logm[best]
    others = tuple(CountClass(tuple(counts[i])) for i in near[1:])
    return ModalClass(CountClass(tuple(counts[best])), MeasureValue.from_log(min(top, 0.0)), others)


def chebyshev_floor(coeffs: Coefficients, n: int, epsilon: float) -> float:
    """1 − Σ_i |C_i|^2 (1 − |C_i|^2) / (N ε^2); may be negative for small N."""
    w = coeffs.weights
    return 1.0 - float(np.sum(w * (1.0 - w))) / (n * epsilon**2)


def typicality_measure(coeffs: Coefficients, n: int, epsilon: float) -> MeasureValue:
    """Total weight of classes with max_i |n_i/N − |C_i|^2| <= ε."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    counts, logm = class_table(coeffs, n)
    dev = np.max(np.abs(counts / n - coeffs.weights), axis=1)
    keep = dev <= epsilon + FREQ_SLACK
    if not keep.any():
        return MeasureValue.zero()
    return MeasureValue.from_log(min(float(logsumexp(logm[keep])), 0.0))


def largest_remainder(coeffs: Coefficients, n: int) -> CountClass:
    """Round N|C_i|^2 to integers summing to N (Hamilton apportionment).

    Leftover units go to the largest fractional parts; equal parts go to the
    lower index. Zero-weight outcomes never receive a unit.
    """
    quotas = n * coeffs.weights
    base = np.floor(quotas).astype(np.int64)
    short = n - int(base.sum())
    rema = quotas - base
    order = sorted(
        (i for i in range(coeffs.m) if coeffs.weights[i] > 0), key=lambda i: (-rema[i], i)
    )
    for i in order[:short]:
        base[i] += 1
    return CountClass(tuple(int(b) for b in base))


def residual_measure(coeffs: Coefficients, n: int) -> Residual:
    """1 − weight of the class obtained by rounding N|C_i|^2."""
    cls = largest_remainder(coeffs, n)
    weight = class_measure(coeffs, cls)
    if weight.log == -math.inf:
        return Residual(MeasureValue.from_linear(1.0), cls, weight)
    rest = -math.expm1(weight.log)
    return Residual(MeasureValue.from_linear(max(rest, 0.0)), cls, weight)
