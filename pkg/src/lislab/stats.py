"""Moments of the limit laws, exact finite-size moments, and model fits.

Connects the exact integer tables to the limiting edge laws: moments of
the limit distributions by quadrature of the gap probability, exact
rational mean/variance of the finite-size statistic, the centered
"hat" quantities obtained by subtracting the leading asymptotics, the
smoothed continuum analogue of the discrete sums, and least-squares
fits of the form c + d * N^(-1/3).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Sequence, Tuple

import numpy as np
from gmpy2 import mpq

from .edgelaws import Route, gap_soft
from .enumerate import ExactCdfTable, SymmetryClass
from .fredholm import ConvergenceError

__all__ = [
    "MomentSet",
    "FitResult",
    "limit_moments",
    "exact_mean_var",
    "hat_quantities",
    "smoothed_limit_moments",
    "fit_inverse_cuberoot",
]

_T_LO, _T_HI = -10.0, 10.0  # beyond this the gap probability is 0/1 to 1e-12


@dataclass(frozen=True)
class MomentSet:
    """First and second moments of a limit law."""

    m1: float
    m2: float

    def __post_init__(self):
        if not self.variance > 0.0:
            raise ValueError("moment set has nonpositive variance")

    @property
    def variance(self) -> float:
        return self.m2 - self.m1 * self.m1


def _gl_integral(f, lo: float, hi: float, n: int) -> float:
    x, w = np.polynomial.legendre.leggauss(n)
    mid, half = 0.5 * (hi + lo), 0.5 * (hi - lo)
    return half * float(sum(wi * f(mid + half * xi) for xi, wi in zip(x, w)))


def limit_moments(beta: int, cut: float = 0.0, tol: float = 1e-9) -> MomentSet:
    """Moments of the limiting law with CDF F(t) = gap_soft(beta, t).

    Integration by parts: m1 = cut + int_cut^inf (1-F) - int_-inf^cut F,
    and m2 = 2 [ int_0^inf r (1-F) + int_-inf^0 (-r) F ].  The node
    count is doubled until two successive evaluations agree to ``tol``.
    """
    F = lambda t: gap_soft(beta, t, Route.PAINLEVE)

    def both(n):
        upper = _gl_integral(lambda t: 1.0 - F(t), cut, _T_HI, n)
        lower = _gl_integral(F, _T_LO, cut, n)
        m1 = cut + upper - lower
        s2a = _gl_integral(lambda t: t * (1.0 - F(t)), 0.0, _T_HI, n)
        s2b = _gl_integral(lambda t: -t * F(t), _T_LO, 0.0, n)
        return m1, 2.0 * (s2a + s2b)

    prev = both(40)
    for n in (80, 160, 320):
        cur = both(n)
        if abs(cur[0] - prev[0]) < tol and abs(cur[1] - prev[1]) < tol:
            return MomentSet(m1=cur[0], m2=cur[1])
        prev = cur
    raise ConvergenceError("limit-moment quadrature did not settle", value=prev[0])


@lru_cache(maxsize=None)
def _moments_default(beta: int) -> MomentSet:
    return limit_moments(beta)


def _complete_probs(table: ExactCdfTable) -> List[mpq]:
    """Pr(statistic <= k) for k = 0..N, requiring full threshold coverage."""
    N = table.N
    step = 2 if table.symmetry is SymmetryClass.INVOLUTION_DEC else 1
    needed = set(range(0, N + 1, step))
    if table.symmetry is SymmetryClass.INVOLUTION_DEC:
        needed.add(0)
    if not needed <= set(table.counts):
        missing = sorted(needed - set(table.counts))[:4]
        raise ValueError(f"table incomplete; missing thresholds {missing}...")
    return [table.prob_clamped(k) for k in range(N + 1)]


def exact_mean_var(table: ExactCdfTable) -> Tuple[mpq, mpq]:
    """Exact rational mean and variance of the tabulated statistic."""
    probs = _complete_probs(table)
    N = table.N
    mean = sum((1 - probs[k] for k in range(N + 1)), mpq(0))
    second = sum(((2 * k + 1) * (1 - probs[k]) for k in range(N + 1)), mpq(0))
    return mean, second - mean * mean


def hat_quantities(
    N: int, mean: float, variance: float, beta: int = 2
) -> Tuple[float, float]:
    """Finite-size moments minus their leading large-N asymptotics.

    mu_hat = mean - (2 sqrt(N) + m1 N^{1/6});
    sigma2_hat = variance - (m2 - m1^2) N^{1/3}.
    """
    m = _moments_default(beta)
    mu_hat = float(mean) - (2.0 * math.sqrt(N) + m.m1 * N ** (1.0 / 6.0))
    sigma2_hat = float(variance) - m.variance * N ** (1.0 / 3.0)
    return mu_hat, sigma2_hat


def smoothed_limit_moments(N: int) -> Tuple[float, float]:
    """Mean and variance of the discrete sums with the exact CDF replaced
    by the limiting law evaluated on the integer lattice.

    Substitutes F((k - 2 sqrt(N))/N^{1/6}) for Pr(statistic <= k) in the
    same summation-by-parts formulas, extending k past N since the limit
    law is not truncated there.
    """
    c, s = 2.0 * math.sqrt(N), N ** (1.0 / 6.0)
    k_hi = int(math.ceil(c + (_T_HI + 1.0) * s))
    mean = 0.0
    second = 0.0
    for k in range(0, k_hi + 1):
        t = (k - c) / s
        if t <= _T_LO:
            tail = 1.0
        elif t >= _T_HI:
            continue
        else:
            tail = 1.0 - gap_soft(2, t, Route.PAINLEVE)
        mean += tail
        second += (2 * k + 1) * tail
    return mean, second - mean * mean


@dataclass
class FitResult:
    """Least-squares fit y = c + d * N^{-1/3}."""

    c: float
    d: float
    residuals: List[float]
    model: str = "c + d*N^(-1/3)"


def fit_inverse_cuberoot(data: Sequence[Tuple[float, float]]) -> FitResult:
    """Fit y = c + d N^{-1/3} by least squares over (N, y) pairs."""
    if len(data) < 2 or len({n for n, _ in data}) < 2:
        raise ValueError("need at least two distinct N values")
    Ns = np.array([float(n) for n, _ in data])
    ys = np.array([float(y) for _, y in data])
    A = np.column_stack([np.ones_like(Ns), Ns ** (-1.0 / 3.0)])
    coef, *_ = np.linalg.lstsq(A, ys, rcond=None)
    resid = ys - A @ coef
    # normal equations: residuals orthogonal to the fit basis
    scale = max(1.0, float(np.abs(ys).max())) * len(ys)
    if np.abs(A.T @ resid).max() > 1e-12 * scale:
        raise ArithmeticError("normal equations violated; degenerate design")
    return FitResult(c=float(coef[0]), d=float(coef[1]), residuals=resid.tolist())
