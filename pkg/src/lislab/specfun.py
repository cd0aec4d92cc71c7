"""Special functions used throughout the package.

Airy Ai and its derivative on the real line, and Bessel J of real
nonnegative order.  Double precision is backed by scipy's AMOS routines;
an optional extended-precision mode (``prec_bits``) evaluates through
mpmath for the few places where seeding error matters.

All functions are pure and safe to call concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath
import numpy as np
from scipy import special as _sp

__all__ = [
    "Accuracy",
    "DomainError",
    "airy_ai",
    "airy_ai_prime",
    "bessel_j",
    "bessel_j_prime",
]


class DomainError(ValueError):
    """Raised for arguments outside a function's documented domain."""


@dataclass(frozen=True)
class Accuracy:
    """Target accuracy of the double-precision evaluations."""

    abs_tol: float = 1e-13
    rel_tol: float = 1e-13

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("tolerances must be strictly positive")


def _check_finite(x, name: str) -> None:
    if not np.all(np.isfinite(x)):
        raise DomainError(f"{name} must be finite, got {x!r}")


def airy_ai(x, prec_bits: int | None = None):
    """Airy function Ai(x) for real x (scalar or array)."""
    x = np.asarray(x, dtype=float) if not np.isscalar(x) else x
    _check_finite(x, "x")
    if prec_bits is not None:
        with mpmath.workprec(prec_bits):
            return mpmath.airyai(mpmath.mpf(float(x)))
    ai, _, _, _ = _sp.airy(x)
    return ai


def airy_ai_prime(x, prec_bits: int | None = None):
    """Derivative Ai'(x) for real x (scalar or array)."""
    x = np.asarray(x, dtype=float) if not np.isscalar(x) else x
    _check_finite(x, "x")
    if prec_bits is not None:
        with mpmath.workprec(prec_bits):
            return mpmath.airyai(mpmath.mpf(float(x)), 1)
    _, aip, _, _ = _sp.airy(x)
    return aip


def bessel_j(nu, x, prec_bits: int | None = None):
    """Bessel function of the first kind J_nu(x), nu >= 0, x >= 0.

    Orders up to ~10^3 are supported, uniformly through the transition
    region x ~ nu (AMOS uses uniform asymptotics there).
    """
    _check_finite(nu, "nu")
    _check_finite(x, "x")
    if np.any(np.asarray(nu) < 0):
        raise DomainError(f"order must be nonnegative, got {nu!r}")
    if np.any(np.asarray(x) < 0):
        raise DomainError(f"argument must be nonnegative, got {x!r}")
    if prec_bits is not None:
        with mpmath.workprec(prec_bits):
            return mpmath.besselj(mpmath.mpf(float(nu)), mpmath.mpf(float(x)))
    return _sp.jv(nu, x)


def bessel_j_prime(nu, x):
    """Derivative d/dx J_nu(x), nu >= 0, x >= 0."""
    _check_finite(nu, "nu")
    _check_finite(x, "x")
    if np.any(np.asarray(nu) < 0) or np.any(np.asarray(x) < 0):
        raise DomainError("order and argument must be nonnegative")
    return _sp.jvp(nu, x)
