"""Nystrom evaluation of Fredholm determinants and resolvent traces.

The six integral-operator kernels needed for the gap probabilities and
their leading finite-size corrections are evaluated here, together with
``det(I + sign*K)`` and ``Tr((I + sign*K)^{-1} L)`` on finite and
semi-infinite intervals.  Discretisation is Gauss-Legendre with the
symmetrised weighting ``K_ij = sqrt(w_i w_j) K(x_i, x_j)``.

Divided-difference kernels (Airy soft, Bessel hard) switch to a short
Taylor expansion of the numerator near the diagonal to avoid
cancellation.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss

from .specfun import DomainError, airy_ai, airy_ai_prime, bessel_j, bessel_j_prime

__all__ = [
    "Kind",
    "KernelSpec",
    "QuadratureRule",
    "DetResult",
    "ConvergenceError",
    "gauss_legendre",
    "eval_kernel",
    "kernel_matrix",
    "fredholm_det",
    "resolvent_trace",
    "truncation_point",
]

_CBRT2 = 2.0 ** (1.0 / 3.0)
_DIAG_EPS = 1e-4


class ConvergenceError(RuntimeError):
    """Determinant did not stabilise at the maximum node count."""

    def __init__(self, msg, value=None, value_refined=None):
        super().__init__(msg)
        self.value = value
        self.value_refined = value_refined


class Kind(enum.Enum):
    AIRY_SOFT = "airy_soft"
    BESSEL_HARD = "bessel_hard"
    V_SOFT = "v_soft"
    V_HARD = "v_hard"
    L_CORR = "l_corr"
    M_CORR = "m_corr"
    ZERO = "zero"


@dataclass(frozen=True)
class KernelSpec:
    """Identity of one of the integral-operator kernels.

    params: ``a`` Bessel order (BESSEL_HARD, V_HARD), ``s`` scale
    (V_HARD), ``t`` shift (V_SOFT, M_CORR).
    """

    kind: Kind
    a: float | None = None
    s: float | None = None
    t: float | None = None

    def __post_init__(self):
        if self.kind in (Kind.BESSEL_HARD, Kind.V_HARD):
            if self.a is None or self.a < 0:
                raise ValueError(f"{self.kind} requires order a >= 0")
        if self.kind is Kind.V_HARD:
            if self.s is None or self.s <= 0:
                raise ValueError("V_HARD requires scale s > 0")
        if self.kind in (Kind.V_SOFT, Kind.M_CORR) and self.t is None:
            raise ValueError(f"{self.kind} requires shift t")


@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray
    interval: tuple

    def __post_init__(self):
        if len(self.nodes) != len(self.weights):
            raise ValueError("node and weight counts differ")
        if np.any(self.weights <= 0):
            raise ValueError("weights must be positive")
        if np.any(np.diff(self.nodes) <= 0):
            raise ValueError("nodes must be strictly increasing")


@dataclass(frozen=True)
class DetResult:
    value: float
    order: int
    est_error: float


def gauss_legendre(n: int, lo: float, hi: float) -> QuadratureRule:
    """n-point Gauss-Legendre rule mapped affinely to (lo, hi)."""
    if n < 1:
        raise ValueError("need n >= 1 nodes")
    if not (lo < hi) or not (math.isfinite(lo) and math.isfinite(hi)):
        raise ValueError(f"invalid interval ({lo}, {hi})")
    x, w = leggauss(n)
    half = 0.5 * (hi - lo)
    return QuadratureRule(lo + half * (x + 1.0), half * w, (lo, hi))


# -- divided-difference kernels ------------------------------------------
#
# Both have the form (f(x) g(y) - g(x) f(y)) / (c (x - y)).  Near the
# diagonal the numerator is expanded about the midpoint: with
# m = (x+y)/2, h = (x-y)/2 and Taylor coefficients F_i, G_i of f, g at m,
#   K = (1/c) * sum_{s odd} h^{s-1} sum_{i+j=s} (-1)^j (F_i G_j - G_i F_j).


def _airy_fg_series(m, nterms=8):
    """Taylor coefficients of Ai and Ai' about m (vectorised over m)."""
    m = np.asarray(m, dtype=float)
    d = np.empty((nterms + 1,) + m.shape)
    d[0] = airy_ai(m)
    d[1] = airy_ai_prime(m)
    for n in range(nterms - 1):
        # Ai^{(n+2)} = m Ai^{(n)} + n Ai^{(n-1)}
        d[n + 2] = m * d[n] + (n * d[n - 1] if n >= 1 else 0.0)
    fact = np.cumprod([1.0] + list(range(1, nterms + 1)))
    F = d[:nterms] / fact[:nterms, None] if m.ndim else d[:nterms] / fact[:nterms]
    G = d[1 : nterms + 1] / fact[:nterms, None] if m.ndim else d[1:] / fact[:nterms]
    return F, G


def _bessel_fg_series(a, m, nterms=8):
    """Taylor coefficients about m of f(x)=J_a(sqrt x), g(x)=sqrt(x) J_a'(sqrt x)."""
    m = np.asarray(m, dtype=float)
    u = np.sqrt(m)
    p = np.zeros((nterms + 1,) + m.shape) if m.ndim else np.zeros(nterms + 1)
    p[0] = bessel_j(a, u)
    p[1] = np.where(u > 0, bessel_j_prime(a, u) / (2.0 * np.maximum(u, 1e-300)), 0.0)
    # 4 x^2 f'' + 4 x f' + (x - a^2) f = 0 about x = m + h
    for n in range(nterms - 1):
        acc = 8.0 * m * (n + 1) * n * p[n + 1] + 4.0 * n * (n - 1) * p[n]
        acc += 4.0 * m * (n + 1) * p[n + 1] + 4.0 * n * p[n]
        acc += (m - a * a) * p[n] + (p[n - 1] if n >= 1 else 0.0)
        p[n + 2] = -acc / (4.0 * m * m * (n + 2) * (n + 1))
    F = p[:nterms]
    G = np.empty_like(F)
    for k in range(nterms):
        G[k] = 2.0 * m * (k + 1) * p[k + 1] + 2.0 * k * p[k]
    return F, G


def _divided_difference(F, G, h, factor):
    """Evaluate the near-diagonal series given midpoint Taylor data."""
    nterms = F.shape[0]
    out = np.zeros_like(np.asarray(h, dtype=float))
    h2 = h * h
    pow_h = np.ones_like(out)
    for s in range(1, nterms, 2):
        coef = 0.0
        for i in range(s + 1):
            j = s - i
            coef = coef + (-1.0) ** j * (F[i] * G[j] - G[i] * F[j])
        out = out + coef * pow_h
        pow_h = pow_h * h2
    return out * factor


def _dd_kernel(kind: Kind, a, X, Y):
    """Divided-difference kernel on arrays X, Y (broadcastable)."""
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if kind is Kind.AIRY_SOFT:
        f = lambda v: airy_ai(v)
        g = lambda v: airy_ai_prime(v)
        series = _airy_fg_series
        c = 1.0
    else:
        f = lambda v: bessel_j(a, np.sqrt(v))
        g = lambda v: np.sqrt(v) * bessel_j_prime(a, np.sqrt(v))
        series = lambda m: _bessel_fg_series(a, m)
        c = 0.5
    X, Y = np.broadcast_arrays(np.atleast_1d(X), np.atleast_1d(Y))
    diff = X - Y
    near = np.abs(diff) < _DIAG_EPS
    fx, gx = f(X), g(X)
    fy, gy = f(Y), g(Y)
    with np.errstate(divide="ignore", invalid="ignore"):
        K = c * (fx * gy - gx * fy) / np.where(near, 1.0, diff)
    if np.any(near):
        m = 0.5 * (X[near] + Y[near])
        h = 0.5 * diff[near]
        F, G = series(np.atleast_1d(m))
        # with h = (x-y)/2 the divided-difference denominator is 2h
        K[near] = _divided_difference(F, G, np.atleast_1d(h), 0.5 * c)
    return K


def _plain_kernel(k: KernelSpec, X, Y):
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if k.kind is Kind.ZERO:
        return np.zeros(np.broadcast(X, Y).shape)
    if k.kind is Kind.V_SOFT:
        return airy_ai(X + Y + k.t)
    if k.kind is Kind.V_HARD:
        return 0.5 * math.sqrt(k.s) * bessel_j(k.a, np.sqrt(X * Y * k.s))
    if k.kind is Kind.L_CORR:
        ax, apx = airy_ai(X), airy_ai_prime(X)
        ay, apy = airy_ai(Y), airy_ai_prime(Y)
        return (1.0 / _CBRT2) * (
            (ax * apy + apx * ay) / 5.0
            + (X * X + X * Y + Y * Y) / 30.0 * ax * ay
            - (X + Y) / 30.0 * apx * apy
        )
    if k.kind is Kind.M_CORR:
        t = k.t
        arg = t + X + Y
        return (1.0 / (_CBRT2 * 10.0)) * (
            (2.0 * X + 2.0 * Y - 8.0 * t) * airy_ai(arg)
            + (24.0 * X * X + 24.0 * Y * Y - 12.0 * X * t - 12.0 * X * Y - 12.0 * Y * t - t * t)
            / 3.0
            * airy_ai_prime(arg)
        )
    raise ValueError(f"unknown kernel kind {k.kind}")


def _check_domain(k: KernelSpec, x, y):
    if k.kind in (Kind.BESSEL_HARD,) and (np.any(np.asarray(x) < 0) or np.any(np.asarray(y) < 0)):
        raise DomainError("Bessel hard kernel needs x, y >= 0")
    if k.kind in (Kind.V_SOFT, Kind.M_CORR) and (
        np.any(np.asarray(x) < 0) or np.any(np.asarray(y) < 0)
    ):
        raise DomainError("kernel lives on (0, inf); need x, y >= 0")
    if k.kind is Kind.V_HARD and (
        np.any((np.asarray(x) < 0) | (np.asarray(x) > 1))
        or np.any((np.asarray(y) < 0) | (np.asarray(y) > 1))
    ):
        raise DomainError("kernel lives on (0, 1)")


def eval_kernel(k: KernelSpec, x, y):
    """Kernel value at (x, y); the diagonal uses the analytic limit."""
    _check_domain(k, x, y)
    if k.kind in (Kind.AIRY_SOFT, Kind.BESSEL_HARD):
        out = _dd_kernel(k.kind, k.a, x, y)
    else:
        out = _plain_kernel(k, x, y)
    if np.isscalar(x) and np.isscalar(y):
        return float(np.asarray(out).reshape(()) if np.asarray(out).size == 1 else out)
    return out


def kernel_matrix(k: KernelSpec, xs, ys):
    """Matrix K(x_i, y_j) over node arrays."""
    X = np.asarray(xs)[:, None]
    Y = np.asarray(ys)[None, :]
    return eval_kernel(k, X, Y)


def truncation_point(t: float, tiny: float = 1e-16, t_min: float = 14.0) -> float:
    """Right endpoint t + T with |Ai(t+T)| below ``tiny`` (T >= t_min)."""
    T = t_min
    while abs(airy_ai(t + T)) >= tiny and T < 400.0:
        T += 1.0
    return t + T


def _discretise(k: KernelSpec, lo: float, hi: float, n: int):
    if math.isinf(hi):
        hi = truncation_point(lo if k.kind is Kind.AIRY_SOFT else lo + (k.t or 0.0))
    rule = gauss_legendre(n, lo, hi)
    sw = np.sqrt(rule.weights)
    Khat = kernel_matrix(k, rule.nodes, rule.nodes) * np.outer(sw, sw)
    return rule, Khat


def _det_once(k: KernelSpec, lo, hi, sign, n):
    _, Khat = _discretise(k, lo, hi, n)
    return float(np.linalg.det(np.eye(n) + sign * Khat))


def fredholm_det(
    k: KernelSpec,
    domain: tuple,
    sign: int = -1,
    n: int = 80,
    tol: float = 1e-10,
    max_n: int = 640,
) -> DetResult:
    """det(I + sign*K) on ``domain`` with node doubling until stable.

    est_error is the difference between the last two node counts.
    """
    if sign not in (-1, 1):
        raise ValueError("sign must be +-1")
    lo, hi = domain
    if k.kind is Kind.ZERO:
        return DetResult(1.0, n, 0.0)
    prev = _det_once(k, lo, hi, sign, n)
    while True:
        n2 = 2 * n
        cur = _det_once(k, lo, hi, sign, n2)
        err = abs(cur - prev)
        if err < tol:
            return DetResult(cur, n2, err)
        if n2 >= max_n:
            raise ConvergenceError(
                f"determinant not converged at n={n2}: {prev} vs {cur}",
                value=prev,
                value_refined=cur,
            )
        prev, n = cur, n2


def resolvent_trace(
    k: KernelSpec,
    l: KernelSpec,
    domain: tuple,
    n: int = 160,
    sign: int = -1,
) -> float:
    """Tr((I + sign*K)^{-1} L) with the same weighting as fredholm_det."""
    lo, hi = domain
    if math.isinf(hi):
        hi = truncation_point(lo if k.kind in (Kind.AIRY_SOFT, Kind.L_CORR) else lo + (k.t or 0.0))
    rule = gauss_legendre(n, lo, hi)
    sw = np.sqrt(rule.weights)
    W = np.outer(sw, sw)
    Lhat = kernel_matrix(l, rule.nodes, rule.nodes) * W
    if k.kind is Kind.ZERO:
        return float(np.trace(Lhat))
    Khat = kernel_matrix(k, rule.nodes, rule.nodes) * W
    A = np.eye(n) + sign * Khat
    try:
        sol = np.linalg.solve(A, Lhat)
    except np.linalg.LinAlgError as exc:
        raise ArithmeticError(
            f"singular discretised resolvent, cond={np.linalg.cond(A):.3g}"
        ) from exc
    return float(np.trace(sol))
