"""Painleve-type ODE solutions as chains of local Taylor polynomials.

Six problems are covered:

* ``U0``   -- sigma-PII: (u'')^2 + 4u'((u')^2 - r u' + u) = 0, right
  asymptotics Ai'(r)^2 - r Ai(r)^2.  Marched via the differentiated form
  u''' = -2u + 4r u' - 6(u')^2.
* ``U1``   -- inhomogeneous linear second-order equation with
  coefficients built from u0; right asymptotics given by the diagonal of
  the first-order correction kernel.
* ``Q0``   -- Painleve II, q'' = rq + 2q^3, Hastings-McLeod branch
  q ~ Ai(r).
* ``Q1``   -- linear second-order equation (1/2)q1'' - (r/2 + 3q0^2)q1 = D1.
* ``V_SIGMA_PIII(a)``  -- sigma-PIII': (rv'')^2 = (av')^2 +
  v'(4v'+1)(v - rv'), v ~ -r^{1+a}/(2^{2(1+a)} Gamma(1+a) Gamma(2+a)),
  marched rightward from an origin series seed.
* ``P_HARD(a)``        -- Painleve III': r(1-p^2)(rp')' + p(rp')^2 +
  (r-a^2)p/4 + r p^3(p^2-2)/4 = 0, p ~ r^{a/2}/(2^a Gamma(1+a)),
  solved in the variable s = sqrt(r).

Solutions of the right-asymptotic problems are marched right-to-left
from r0 = 14 (the asymptotic seeds are accurate to far below double
precision there, and the neglected tail integrals beyond r0 are below
1e-12).  The origin-seeded problems also come in an exact-rational mode
used by the enumeration layer.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction

import gmpy2
import numpy as np
from gmpy2 import mpq

from .specfun import DomainError, airy_ai, airy_ai_prime

__all__ = [
    "PiecewiseTaylor",
    "ProblemId",
    "OdeProblem",
    "StiffnessError",
    "AlgebraError",
    "solve",
    "eval_sol",
    "eval_deriv",
    "integrate",
    "v_series_exact",
    "p_hard_series_exact",
    "bj_u1_identity_residual",
    "u0_asymptotic",
    "u1_asymptotic",
    "q1_asymptotic",
]

CBRT2 = 2.0 ** (1.0 / 3.0)
R0_DEFAULT = 14.0
LO_DEFAULT = -10.0
STITCH_TOL = 1e-9


class StiffnessError(RuntimeError):
    """Required marching step fell below the workable minimum."""


class AlgebraError(RuntimeError):
    """An order-by-order coefficient solve degenerated."""

    def __init__(self, msg, order=None):
        super().__init__(msg)
        self.order = order


class ProblemId(enum.Enum):
    U0 = "u0"
    U1 = "u1"
    Q0 = "q0"
    Q1 = "q1"
    V_SIGMA_PIII = "v_sigma_piii"
    P_HARD = "p_hard"


@dataclass(frozen=True)
class OdeProblem:
    id: ProblemId
    a: float | None = None

    def __post_init__(self):
        if self.id in (ProblemId.V_SIGMA_PIII, ProblemId.P_HARD):
            if self.a is None or self.a < 0:
                raise ValueError(f"{self.id} requires parameter a >= 0")


@dataclass
class PiecewiseTaylor:
    """Chain of local Taylor polynomials covering ``domain``.

    Each segment is (center, coeffs, step): the polynomial
    sum_k coeffs[k] (w - center)^k is used on the interval between
    ``center`` and ``center + step`` (step may be negative for
    right-to-left chains).  ``w`` is the working variable: the argument
    itself for var_power = 1, its square root for var_power = 1/2.
    """

    segments: list
    domain: tuple
    var_power: float = 1.0
    exact: bool = False
    problem: str = ""
    _lows: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if not self.segments:
            raise ValueError("need at least one segment")
        segs = sorted(
            self.segments, key=lambda s: min(s[0], s[0] + s[2])
        )
        self.segments = segs
        self._lows = np.array([min(c, c + st) for c, _, st in segs])

    # -- evaluation in the working variable ------------------------------

    def _segment_for(self, w):
        i = int(np.searchsorted(self._lows, w, side="right")) - 1
        if i < 0:
            i = 0
        return self.segments[min(i, len(self.segments) - 1)]

    def _eval_w(self, w, order=0):
        center, coeffs, _ = self._segment_for(w)
        h = w - center
        acc = 0.0
        for k in range(len(coeffs) - 1, order - 1, -1):
            fact = 1.0
            for j in range(order):
                fact *= k - j
            acc = acc * h + fact * float(coeffs[k])
        return acc

    def _to_w(self, r):
        if self.var_power == 1.0:
            return r
        if r < 0:
            raise DomainError("negative argument for square-root series")
        return math.sqrt(r)

    def eval(self, r):
        lo, hi = self.domain
        if not (lo - 1e-12 <= r <= hi + 1e-12):
            raise DomainError(f"{r} outside solved domain {self.domain}")
        return self._eval_w(self._to_w(r))

    def eval_deriv(self, r, order=1):
        """Derivative with respect to the argument r."""
        lo, hi = self.domain
        if not (lo - 1e-12 <= r <= hi + 1e-12):
            raise DomainError(f"{r} outside solved domain {self.domain}")
        if self.var_power == 1.0:
            return self._eval_w(r, order=order)
        # d/dr = (1/(2s)) d/ds
        s = math.sqrt(r)
        if order == 1:
            return self._eval_w(s, order=1) / (2.0 * s)
        if order == 2:
            ds1 = self._eval_w(s, order=1)
            ds2 = self._eval_w(s, order=2)
            return (ds2 - ds1 / s) / (4.0 * r)
        raise ValueError("derivative order > 2 unsupported for sqrt series")

    # -- integration ------------------------------------------------------

    def _integrate_segment_w(self, seg, wa, wb):
        center, coeffs, _ = seg
        acc = 0.0
        for k in range(len(coeffs) - 1, -1, -1):
            acc = acc * (wb - center) + float(coeffs[k]) / (k + 1)
        hi = acc * (wb - center)
        acc = 0.0
        for k in range(len(coeffs) - 1, -1, -1):
            acc = acc * (wa - center) + float(coeffs[k]) / (k + 1)
        lo = acc * (wa - center)
        return hi - lo

    def integrate_var(self, wa, wb):
        """Integral of the chain in its own working variable."""
        if wb < wa:
            return -self.integrate_var(wb, wa)
        total = 0.0
        for seg in self.segments:
            c, _, st = seg
            s_lo, s_hi = min(c, c + st), max(c, c + st)
            a = max(wa, s_lo)
            b = min(wb, s_hi)
            if b > a:
                total += self._integrate_segment_w(seg, a, b)
        return total

    def integrate(self, a, b):
        """Integral of the solution over the argument interval (a, b)."""
        if self.var_power == 1.0:
            return self.integrate_var(a, b)
        # r = s^2: int f dr = int f(s) 2s ds, done per segment exactly
        sa, sb = math.sqrt(max(a, 0.0)), math.sqrt(max(b, 0.0))
        if sb < sa:
            return -self.integrate(b, a)
        total = 0.0
        for seg in self.segments:
            c, coeffs, st = seg
            s_lo, s_hi = min(c, c + st), max(c, c + st)
            lo = max(sa, s_lo)
            hi = min(sb, s_hi)
            if hi <= lo:
                continue
            # expand 2s * poly(s - c) as a polynomial in (s - c)
            g = [0.0] * (len(coeffs) + 1)
            for k, ck in enumerate(coeffs):
                ck = float(ck)
                g[k + 1] += 2.0 * ck
                g[k] += 2.0 * c * ck
            total += self._integrate_segment_w((c, g, st), lo, hi)
        return total

    # -- serialization ----------------------------------------------------

    def to_text(self):
        lines = [
            "piecewise-taylor 1",
            f"problem {self.problem or '-'}",
            f"domain {self.domain[0]!r} {self.domain[1]!r}",
            f"var_power {self.var_power!r}",
            f"exact {int(self.exact)}",
        ]
        for center, coeffs, step in self.segments:
            if self.exact:
                cs = " ".join(f"{c.numerator}/{c.denominator}" for c in coeffs)
            else:
                cs = " ".join(repr(float(c)) for c in coeffs)
            lines.append(f"{float(center)!r} {float(step)!r} {cs}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text):
        lines = text.strip().splitlines()
        if lines[0] != "piecewise-taylor 1":
            raise ValueError("unknown serialization version")
        problem = lines[1].split(" ", 1)[1]
        lo, hi = (float(v) for v in lines[2].split()[1:])
        var_power = float(lines[3].split()[1])
        exact = bool(int(lines[4].split()[1]))
        segs = []
        for ln in lines[5:]:
            parts = ln.split()
            center, step = float(parts[0]), float(parts[1])
            if exact:
                coeffs = [mpq(p) for p in parts[2:]]
            else:
                coeffs = [float(p) for p in parts[2:]]
            segs.append((center, coeffs, step))
        return cls(
            segments=segs,
            domain=(lo, hi),
            var_power=var_power,
            exact=exact,
            problem="" if problem == "-" else problem,
        )


# -- module-level wrappers matching the operation names -------------------


def eval_sol(sol: PiecewiseTaylor, r: float) -> float:
    return sol.eval(r)


def eval_deriv(sol: PiecewiseTaylor, r: float, order: int = 1) -> float:
    return sol.eval_deriv(r, order)


def integrate(sol: PiecewiseTaylor, a: float, b: float) -> float:
    return sol.integrate(a, b)


# -- asymptotic seeds -----------------------------------------------------


def u0_asymptotic(r):
    return airy_ai_prime(r) ** 2 - r * airy_ai(r) ** 2


def u1_asymptotic(r):
    ai, aip = airy_ai(r), airy_ai_prime(r)
    return (1.0 / (CBRT2 * 30.0)) * (12.0 * ai * aip + 3.0 * r**2 * ai**2 - 2.0 * r * aip**2)


def _u1_asymptotic_deriv(r):
    ai, aip = airy_ai(r), airy_ai_prime(r)
    return (1.0 / (CBRT2 * 30.0)) * (
        10.0 * aip**2 + 18.0 * r * ai**2 + 2.0 * r**2 * ai * aip
    )


def q1_asymptotic(r):
    ai, aip = airy_ai(r), airy_ai_prime(r)
    return -(1.0 / (30.0 * CBRT2)) * (14.0 * r * ai + r**2 * aip)


def _q1_asymptotic_deriv(r):
    ai, aip = airy_ai(r), airy_ai_prime(r)
    return -(1.0 / (30.0 * CBRT2)) * (14.0 * ai + 16.0 * r * aip + r**3 * ai)


# -- truncated-series helpers (float) -------------------------------------


def _mul(p, q, deg):
    out = np.zeros(deg + 1)
    for i, pi in enumerate(p[: deg + 1]):
        if pi == 0.0:
            continue
        top = min(len(q), deg + 1 - i)
        out[i : i + top] += pi * np.asarray(q[:top])
    return out


def _deriv_series(p):
    return np.array([k * p[k] for k in range(1, len(p))])


# -- Taylor coefficient generators per problem ----------------------------


def _coeffs_u0(c, state, deg):
    a = np.zeros(deg + 1)
    a[0], a[1] = state[0], state[1]
    a[2] = state[2] / 2.0
    for k in range(deg - 2):
        # u''' = -2u + 4 r u' - 6 (u')^2 at order k, r = c + h
        rhs = -2.0 * a[k] + 4.0 * (c * (k + 1) * a[k + 1] + k * a[k])
        s = 0.0
        for i in range(k + 1):
            s += (i + 1) * a[i + 1] * (k - i + 1) * a[k - i + 1]
        rhs -= 6.0 * s
        a[k + 3] = rhs / ((k + 1) * (k + 2) * (k + 3))
    return a


def _coeffs_q0(c, state, deg):
    q = np.zeros(deg + 1)
    q[0], q[1] = state
    for k in range(deg - 1):
        # q'' = r q + 2 q^3, r = c + h
        cube = 0.0
        for i in range(k + 1):
            inner = 0.0
            for j in range(k - i + 1):
                inner += q[j] * q[k - i - j]
            cube += q[i] * inner
        rhs = c * q[k] + (q[k - 1] if k >= 1 else 0.0) + 2.0 * cube
        q[k + 2] = rhs / ((k + 1) * (k + 2))
    return q


def _coeffs_u1(c, u0c, state, deg):
    """u1 Taylor coefficients given the u0 series u0c at the same center."""
    n = deg + 1
    u0 = u0c[:n]
    u0p = np.zeros(n)
    u0p[: len(u0c) - 1] = _deriv_series(u0c)[:n]
    u0pp = np.zeros(n)
    d2 = _deriv_series(_deriv_series(u0c))
    u0pp[: len(d2)] = d2[:n]
    r = np.zeros(n)
    r[0] = c
    if n > 1:
        r[1] = 1.0
    A2 = u0pp
    B2 = 2.0 * u0 - 4.0 * _mul(r, u0p, deg) + 6.0 * _mul(u0p, u0p, deg)
    C2 = 2.0 * u0p
    bracket = (
        _mul(_mul(r, r, deg), u0p, deg)
        + 6.0 * _mul(u0, u0p, deg)
        - 2.0 * _mul(r, u0, deg)
        + 3.0 * u0pp
    )
    D2 = -(1.0 / (3.0 * CBRT2)) * (_mul(u0p, bracket, deg) - 2.0 * _mul(u0, u0, deg))
    b = np.zeros(deg + 1)
    b[0], b[1] = state
    if A2[0] == 0.0:
        raise AlgebraError("u1 leading coefficient u0'' vanished", order=0)
    for k in range(deg - 1):
        # order-k equation: sum_i A2_i (u1'')_{k-i} + (B2 u1')_k + (C2 u1)_k = D2_k
        acc = D2[k]
        for i in range(1, k + 1):
            acc -= A2[i] * (k - i + 2) * (k - i + 1) * b[k - i + 2]
        for i in range(k + 1):
            acc -= B2[i] * (k - i + 1) * b[k - i + 1]
            acc -= C2[i] * b[k - i]
        b[k + 2] = acc / (A2[0] * (k + 2) * (k + 1))
    return b


def _coeffs_q1(c, q0c, state, deg):
    n = deg + 1
    q0 = q0c[:n]
    q0p = np.zeros(n)
    q0p[: len(q0c) - 1] = _deriv_series(q0c)[:n]
    r = np.zeros(n)
    r[0] = c
    if n > 1:
        r[1] = 1.0
    q0sq = _mul(q0, q0, deg)
    C1 = -0.5 * r - 3.0 * q0sq
    q0cu = _mul(q0sq, q0, deg)
    D1 = (1.0 / CBRT2) * (
        -_mul(_mul(r, r, deg), q0, deg) / 12.0
        + _mul(r, q0cu, deg)
        + _mul(q0cu, q0sq, deg)
        - 0.5 * q0p
        - _mul(q0, _mul(q0p, q0p, deg), deg)
    )
    b = np.zeros(deg + 1)
    b[0], b[1] = state
    for k in range(deg - 1):
        # (1/2)(q1'')_k + (C1 q1)_k = D1_k
        acc = D1[k]
        for i in range(k + 1):
            acc -= C1[i] * b[k - i]
        b[k + 2] = 2.0 * acc / ((k + 2) * (k + 1))
    return b


def _coeffs_v(c, state, deg, a):
    v = np.zeros(deg + 1)
    v[0], v[1] = state[0], state[1]
    v[2] = state[2] / 2.0
    if c <= 0:
        raise ValueError("v marching requires a positive center")
    for k in range(deg - 2):
        # 2r^2 v''' = -2r v'' + 2a^2 v' + v - 2r v' + 8 v v' - 12 r (v')^2
        # expand r = c + h and collect order k
        def d3(m):  # (v''')_m
            return (m + 1) * (m + 2) * (m + 3) * v[m + 3] if m + 3 <= deg else 0.0

        def d2f(m):
            return (m + 1) * (m + 2) * v[m + 2] if m + 2 <= deg else 0.0

        def d1f(m):
            return (m + 1) * v[m + 1] if m + 1 <= deg else 0.0

        rhs = (
            -2.0 * (c * d2f(k) + (d2f(k - 1) if k >= 1 else 0.0))
            + 2.0 * a * a * d1f(k)
            + v[k]
            - 2.0 * (c * d1f(k) + (d1f(k - 1) if k >= 1 else 0.0))
        )
        conv = 0.0
        for i in range(k + 1):
            conv += v[i] * d1f(k - i)
        rhs += 8.0 * conv
        sq = 0.0
        for i in range(k + 1):
            sq += d1f(i) * d1f(k - i)
        sq1 = 0.0
        for i in range(k):
            sq1 += d1f(i) * d1f(k - 1 - i)
        rhs -= 12.0 * (c * sq + sq1)
        # LHS: 2 (c+h)^2 v''' -> 2[c^2 (v''')_k + 2c (v''')_{k-1} + (v''')_{k-2}]
        known = 2.0 * (
            2.0 * c * (d3(k - 1) if k >= 1 else 0.0) + (d3(k - 2) if k >= 2 else 0.0)
        )
        v[k + 3] = (rhs - known) / (2.0 * c * c * (k + 1) * (k + 2) * (k + 3))
    return v


def _coeffs_p_hard(c, state, deg, a):
    """Taylor coefficients of P(s) = p_hard(s^2; a) about s = c > 0.

    s(1-P^2)(P' + sP'') + s^2 P P'^2 + (s^2 - a^2) P + s^2 P^3 (P^2-2) = 0
    solved for P'' order by order.
    """
    if c <= 0:
        raise ValueError("p_hard marching requires a positive center")
    P = np.zeros(deg + 1)
    P[0], P[1] = state
    s = np.zeros(deg + 1)
    s[0] = c
    if deg >= 1:
        s[1] = 1.0
    s2 = _mul(s, s, deg)
    for k in range(deg - 1):
        d = deg

        def d1f(m):
            return (m + 1) * P[m + 1] if m + 1 <= d else 0.0

        def d2f(m):
            return (m + 1) * (m + 2) * P[m + 2] if m + 2 <= d else 0.0

        # unknown P[k+2] enters only through s(1-P^2) s P'' at lag 0:
        # coefficient c^2 (1 - P0^2) (k+2)(k+1)
        P2 = _mul(P, P, d)
        P3 = _mul(P2, P, d)
        P5 = _mul(P3, P2, d)
        Pp = np.array([d1f(m) for m in range(d + 1)])
        Ppp = np.array([d2f(m) for m in range(d + 1)])
        one_m_P2 = -P2.copy()
        one_m_P2[0] += 1.0
        t1 = _mul(_mul(s, one_m_P2, d), Pp + _mul(s, Ppp, d), d)
        t2 = _mul(s2, _mul(P, _mul(Pp, Pp, d), d), d)
        t3 = _mul(s2, P, d) - a * a * P
        t4 = _mul(s2, P5 - 2.0 * P3, d)
        resid_k = t1[k] + t2[k] + t3[k] + t4[k]
        lead = c * c * one_m_P2[0] * (k + 2) * (k + 1)
        if lead == 0.0:
            raise AlgebraError("degenerate leading factor in p_hard march", order=k)
        # resid_k currently includes lead * P[k+2] with P[k+2] = 0
        P[k + 2] = -resid_k / lead
    return P


# -- the marching driver --------------------------------------------------


def _march(centers, *, state, coeff_fn, nderiv, min_step=1e-8):
    """March a Taylor chain along ``centers`` (uniform grid, any direction)."""
    segs = []
    for i in range(len(centers) - 1):
        c = centers[i]
        h = centers[i + 1] - c
        if abs(h) < min_step:
            raise StiffnessError(f"step {h} below minimum at r={c}")
        coeffs = coeff_fn(c, state)
        segs.append((c, list(coeffs), h))
        new_state = []
        for order in range(nderiv):
            acc = 0.0
            for k in range(len(coeffs) - 1, order - 1, -1):
                fact = 1.0
                for j in range(order):
                    fact *= k - j
                acc = acc * h + fact * coeffs[k]
            new_state.append(acc)
        state = tuple(new_state)
    return segs, state


def solve(problem: OdeProblem, domain=None, opts=None) -> PiecewiseTaylor:
    """Solve one of the six ODE problems on ``domain``.

    opts: dict with optional keys ``degree``, ``n_segments``, ``u0`` /
    ``q0`` (a previously solved leading-order chain is not needed — the
    leading order is re-marched on the same grid), ``seed_terms``.
    """
    opts = dict(opts or {})
    pid = problem.id
    if pid in (ProblemId.U0, ProblemId.U1, ProblemId.Q0, ProblemId.Q1):
        lo, hi = domain or (LO_DEFAULT, R0_DEFAULT)
        if hi < 6.0:
            raise ValueError("right endpoint must sit in the asymptotic region (>= 6)")
        return _solve_soft(pid, lo, hi, opts)
    lo, hi = domain or (0.0, 8.0)
    if lo != 0.0:
        raise ValueError("origin-seeded problems require lo = 0")
    if pid is ProblemId.V_SIGMA_PIII:
        return _solve_v_march(problem.a, hi, opts)
    return _solve_p_march(problem.a, hi, opts)


def _grid(lo, hi, n):
    return np.linspace(hi, lo, n + 1)


def _solve_soft(pid, lo, hi, opts):
    if pid is ProblemId.U0:
        deg = opts.get("degree", 11)
        n = opts.get("n_segments", 1200)
        state = (
            u0_asymptotic(hi),
            -airy_ai(hi) ** 2,
            -2.0 * airy_ai(hi) * airy_ai_prime(hi),
        )
        segs, _ = _march(
            _grid(lo, hi, n),
            state=state,
            coeff_fn=lambda c, st: _coeffs_u0(c, st, deg),
            nderiv=3,
        )
        return PiecewiseTaylor(segs, (lo, hi), problem="u0")
    if pid is ProblemId.Q0:
        deg = opts.get("degree", 10)
        n = opts.get("n_segments", 1000)
        state = (airy_ai(hi), airy_ai_prime(hi))
        segs, _ = _march(
            _grid(lo, hi, n),
            state=state,
            coeff_fn=lambda c, st: _coeffs_q0(c, st, deg),
            nderiv=2,
        )
        return PiecewiseTaylor(segs, (lo, hi), problem="q0")
    if pid is ProblemId.U1:
        deg = opts.get("degree", 11)
        n = opts.get("n_segments", 1200)
        deg0 = deg + 4
        u0_state = (
            u0_asymptotic(hi),
            -airy_ai(hi) ** 2,
            -2.0 * airy_ai(hi) * airy_ai_prime(hi),
        )
        u1_state = (u1_asymptotic(hi), _u1_asymptotic_deriv(hi))
        segs = []
        centers = _grid(lo, hi, n)
        for i in range(len(centers) - 1):
            c = centers[i]
            h = centers[i + 1] - c
            u0c = _coeffs_u0(c, u0_state, deg0)
            u1c = _coeffs_u1(c, u0c, u1_state, deg)
            segs.append((c, list(u1c), h))
            u0_state = tuple(_taylor_shift(u0c, h, m) for m in range(3))
            u1_state = tuple(_taylor_shift(u1c, h, m) for m in range(2))
        return PiecewiseTaylor(segs, (lo, hi), problem="u1")
    # Q1
    deg = opts.get("degree", 11)
    n = opts.get("n_segments", 1200)
    deg0 = deg + 2
    hi_ = hi
    q0_state = (airy_ai(hi_), airy_ai_prime(hi_))
    q1_state = (q1_asymptotic(hi_), _q1_asymptotic_deriv(hi_))
    segs = []
    centers = _grid(lo, hi_, n)
    for i in range(len(centers) - 1):
        c = centers[i]
        h = centers[i + 1] - c
        q0c = _coeffs_q0(c, q0_state, deg0)
        q1c = _coeffs_q1(c, q0c, q1_state, deg)
        segs.append((c, list(q1c), h))
        q0_state = tuple(_taylor_shift(q0c, h, m) for m in range(2))
        q1_state = tuple(_taylor_shift(q1c, h, m) for m in range(2))
    return PiecewiseTaylor(segs, (lo, hi_), problem="q1")


def _taylor_shift(coeffs, h, order):
    acc = 0.0
    for k in range(len(coeffs) - 1, order - 1, -1):
        fact = 1.0
        for j in range(order):
            fact *= k - j
        acc = acc * h + fact * coeffs[k]
    return acc


def _series_eval_derivs(coeffs, x, nderiv, lead_power=0):
    """Evaluate sum c_k x^{k+lead_power} and derivatives at x (floats)."""
    out = []
    for order in range(nderiv):
        acc = 0.0
        for k, ck in enumerate(coeffs):
            p = k + lead_power
            if order > p and float(ck) != 0.0 and p >= 0:
                continue
            fact = 1.0
            for j in range(order):
                fact *= p - j
            if p - order >= 0:
                acc += fact * float(ck) * x ** (p - order)
        out.append(acc)
    return out


def _solve_v_march(a, hi, opts):
    deg = opts.get("degree", 10)
    seed_r = opts.get("seed_r", 0.5)
    seed_terms = opts.get("seed_terms", 60)
    step = opts.get("step", 0.025)
    series = v_series_exact(int(round(a)), seed_terms) if float(a).is_integer() else None
    if series is None:
        raise ValueError("v marching currently requires integer order a")
    coeffs = [c for _, c, _ in series.segments][0]
    vals = _series_eval_derivs(coeffs, seed_r, 3)
    state = tuple(vals)
    n = max(4, int(math.ceil((hi - seed_r) / step)))
    centers = np.linspace(seed_r, hi, n + 1)
    segs, _ = _march(
        centers,
        state=state,
        coeff_fn=lambda c, st: _coeffs_v(c, st, deg, a),
        nderiv=3,
    )
    out = PiecewiseTaylor(segs, (seed_r, hi), problem=f"v_sigma_piii a={a}")
    out.seed_series = series
    out.seed_r = seed_r
    return out


def p_hard_tail_coeffs(a: int, nterms: int = 26) -> np.ndarray:
    """Large-argument coefficients of P(s) = p_hard(s^2; a).

    P(s) ~ 1 + sum_{k >= 1} d_k s^{-k} on the branch that connects to the
    origin series (P -> 1 from below for a > 0).  Substituting P = 1 + u,
    u = sum d_k x^k with x = 1/s, turns the s-variable equation into the
    regular series identity

        (-2u - u^2) W + (1 + u) V^2 + (1 + u)(2 + u)^2 ut^2 - a^2 (1 + u) = 0

    with W = sum k^2 d_k x^k, V = sum k d_k x^k, ut = u/x.  Order x^0
    fixes 4 d_1^2 = a^2 (branch d_1 = -a/2); each higher coefficient
    enters the residual linearly with factor 8 d_1.
    """
    d = np.zeros(nterms + 1)
    if a == 0:
        return d  # P = 1 exactly
    d[1] = -0.5 * a

    def mulx(p, q, top):
        return np.convolve(p[: top + 1], q[: top + 1])[: top + 1]

    for m in range(1, nterms):
        top = m
        u = d[: top + 1].copy()
        kk = np.arange(top + 1, dtype=float)
        W = kk * kk * u
        V = kk * u
        ut = d[1 : top + 2].copy()  # ut_k = d_{k+1}; d_{m+1} still zero
        up1 = u.copy()
        up1[0] += 1.0
        up2 = u.copy()
        up2[0] += 2.0
        R = (
            mulx(-2.0 * u - mulx(u, u, top), W, top)
            + mulx(up1, mulx(V, V, top), top)
            + mulx(up1, mulx(mulx(up2, up2, top), mulx(ut, ut, top), top), top)
            - a * a * up1
        )
        d[m + 1] = -R[m] / (8.0 * d[1])
    return d


def _p_tail_eval(d, s):
    """Value, s-derivative and error estimate of 1 + sum d_k s^{-k}.

    The series is asymptotic: terms shrink, pass a minimum, then grow.
    It is summed to the smallest term; the first omitted term estimates
    the truncation error.
    """
    x = 1.0 / s
    terms = [d[k] * x**k for k in range(1, len(d))]
    stop = len(terms)
    for k in range(1, len(terms)):
        if abs(terms[k]) > abs(terms[k - 1]):
            stop = k
            break
    val = 1.0 + sum(terms[:stop])
    der = -sum((k + 1) * terms[k] for k in range(stop)) / s
    est = abs(terms[stop]) if stop < len(terms) else abs(terms[-1])
    return val, der, est


def _solve_p_march(a, hi, opts):
    """Two-point solve for P(s) = p_hard(s^2; a) on [seed_s, s_hi].

    P -> 1 is a degenerate fixed point with linearized modes e^{+-2s}, so
    initial-value marching is exponentially unstable in *both* directions
    once s is large.  The connecting trajectory is instead computed as a
    boundary-value problem -- exact origin series on the left, algebraic
    large-s tail on the right -- where boundary and collocation errors
    decay exponentially into the interior.  The collocation states are
    then re-expanded into an ODE-consistent Taylor chain.
    """
    deg = opts.get("degree", 8)
    seed_s = opts.get("seed_s", 0.5)
    seed_terms = opts.get("seed_terms", 80)
    tail_terms = opts.get("tail_terms", 26)
    tol = opts.get("bvp_tol", 1e-10)
    if not float(a).is_integer():
        raise ValueError("p_hard marching currently requires integer order a")
    a_int = int(round(a))
    series = p_hard_series_exact(a_int, seed_terms)
    s_hi = math.sqrt(hi)
    if a_int == 0:
        # P = 1 identically; one constant segment covers the whole range
        segs = [(seed_s, [1.0], s_hi - seed_s)]
        out = PiecewiseTaylor(
            segs, (seed_s**2, hi), var_power=0.5, problem="p_hard a=0"
        )
        out.seed_series = series
        out.seed_s = seed_s
        return out

    d = p_hard_tail_coeffs(a_int, tail_terms)
    # right endpoint: past the requested range and far enough out that
    # the optimally truncated tail is at the 1e-9 level
    s_anchor = max(1.05 * s_hi, 2.2 * a_int, 8.0)
    p_right, _, est = _p_tail_eval(d, s_anchor)
    while est > 1e-9:
        s_anchor *= 1.2
        p_right, _, est = _p_tail_eval(d, s_anchor)
    coeffs = [c for _, c, _ in series.segments][0]
    p_left = _series_eval_derivs(coeffs, seed_s, 1)[0]

    aa = float(a_int)

    def rhs(sig, y):
        P, Pp = y
        one = 1.0 - P * P
        num = (
            sig * one * Pp
            + sig**2 * P * Pp**2
            + (sig**2 - aa * aa) * P
            + sig**2 * P**3 * (P * P - 2.0)
        )
        return np.vstack((Pp, -num / (sig**2 * one)))

    def bc(ya, yb):
        return np.array([ya[0] - p_left, yb[0] - p_right])

    from scipy.integrate import solve_bvp

    x0 = np.linspace(seed_s, s_anchor, max(200, int(20 * (s_anchor - seed_s))))
    guess = np.clip(1.0 - 0.5 * aa / x0, 1e-3, None)
    y0 = np.vstack((guess, np.gradient(guess, x0)))
    sol = solve_bvp(rhs, bc, x0, y0, tol=tol, max_nodes=400000)
    if sol.status != 0 or not np.all(np.isfinite(sol.y)):
        raise StiffnessError(
            f"p_hard boundary-value solve failed for a={a_int} on "
            f"[{seed_s}, {s_anchor:.1f}]: {sol.message}"
        )
    segs = []
    xs, ys = sol.x, sol.y
    for i in range(len(xs) - 1):
        c = float(xs[i])
        state = (float(ys[0, i]), float(ys[1, i]))
        segs.append((c, list(_coeffs_p_hard(c, state, deg, a)), float(xs[i + 1] - c)))
    out = PiecewiseTaylor(segs, (seed_s**2, hi), var_power=0.5, problem=f"p_hard a={a}")
    out.seed_series = series
    out.seed_s = seed_s
    return out


# -- exact-rational origin series -----------------------------------------


def v_series_exact(a: int, M: int) -> PiecewiseTaylor:
    """Exact series v(r; a) = sum_{m >= a+1} c_m r^m through degree a+M.

    Coefficients satisfy, order by order in the once-differentiated
    sigma-PIII' equation,
        2(n+1)(n-a)(n+a) c_{n+1}
            = -[(2n-1) c_n + sum_{i+j=n+1} (12ij - 8j) c_i c_j],
    seeded by c_{a+1} = -1 / (2^{2(1+a)} a! (a+1)!).
    """
    if a < 0 or M < 1:
        raise ValueError("need a >= 0 and M >= 1")
    top = a + M  # highest retained power of r
    c = [mpq(0)] * (top + 2)
    c[a + 1] = mpq(-1, gmpy2.mul(2 ** (2 * (1 + a)), gmpy2.fac(a) * gmpy2.fac(a + 1)))
    for n in range(a + 1, top + 1):
        lead = 2 * (n + 1) * (n - a) * (n + a)
        if lead == 0:
            raise AlgebraError("vanishing linear factor in v series", order=n)
        quad = mpq(0)
        for i in range(a + 1, n + 1 - a):
            j = n + 1 - i
            if j < a + 1 or c[i] == 0 or c[j] == 0:
                continue
            quad += (12 * i * j - 8 * j) * c[i] * c[j]
        c[n + 1] = -((2 * n - 1) * c[n] + quad) / lead
    sol = PiecewiseTaylor(
        [(0.0, c[: top + 1], 1.0)],
        domain=(0.0, math.inf),
        exact=True,
        problem=f"v_series a={a}",
    )
    sol.order_a = a
    return sol


def p_hard_series_exact(a: int, M: int) -> PiecewiseTaylor:
    """Exact series P(s) = p_hard(s^2; a) = s^a sum_k b_k s^k, degree a+M.

    b_0 = 1/(2^a a!); odd k vanish.  Each new coefficient enters the
    s-variable ODE residual linearly; it is found from the residual at
    the two probe values 0 and 1.
    """
    if a < 0 or M < 1:
        raise ValueError("need a >= 0 and M >= 1")
    top = a + M  # highest retained power of s
    b = [mpq(0)] * (top + 1)
    b[a] = mpq(1, 2**a * gmpy2.fac(a))
    if a == 0:
        # P = 1 solves the equation exactly: s(1-1)(...) + (s^2)1 - s^2 = 0
        sol = PiecewiseTaylor(
            [(0.0, b, 1.0)],
            domain=(0.0, math.inf),
            var_power=0.5,
            exact=True,
            problem="p_series a=0",
        )
        sol.order_a = 0
        return sol

    # Incrementally cached truncated products; entry n of each array only
    # involves coefficients b_j with j <= n (< m at the time it is built),
    # which are already final, so entries never need recomputation.
    P2: list = []  # P^2
    P3: list = []  # P^3
    P5: list = []  # P^5
    PpPp: list = []  # (P')^2

    def _extend(upto):
        while len(P2) <= upto:
            n = len(P2)
            acc = mpq(0)
            for i in range(n + 1):
                if b[i] != 0 and b[n - i] != 0:
                    acc += b[i] * b[n - i]
            P2.append(acc)
            acc = mpq(0)
            for i in range(n + 1):
                if P2[i] != 0 and b[n - i] != 0:
                    acc += P2[i] * b[n - i]
            P3.append(acc)
            acc = mpq(0)
            for i in range(n + 1):
                if P3[i] != 0 and P2[n - i] != 0:
                    acc += P3[i] * P2[n - i]
            P5.append(acc)

    def _extend_pp(upto):
        # (P')^2 entry n involves b up to index n + 2 - a, so it is only
        # extended as far as the current step's final coefficients allow
        while len(PpPp) <= upto:
            n = len(PpPp)
            acc = mpq(0)
            for i in range(n + 1):
                j = n - i
                if i + 1 >= len(b) or j + 1 >= len(b):
                    continue
                if b[i + 1] != 0 and b[j + 1] != 0:
                    acc += (i + 1) * (j + 1) * b[i + 1] * b[j + 1]
            PpPp.append(acc)

    # parity: the equation couples b_m only to coefficients of matching
    # parity; odd offsets stay zero.  b_m enters the residual at order m
    # linearly with factor m^2 - a^2, so one evaluation at b_m = 0 suffices.
    for m in range(a + 1, top + 1):
        if (m - a) % 2 == 1:
            continue
        d = m
        _extend(d - 1)
        if d >= 2:
            _extend_pp(d - 2)
        # term1 = s(1-P^2)(P' + sP'') at order d, with inner(n) = (n+1)^2 b_{n+1};
        # the i = 0 slot would contribute m^2 b_m, dropped here (b_m = 0 so far).
        t1 = mpq(0)
        for i in range(1, d):
            coef = -P2[i]
            if coef == 0:
                continue
            n = d - 1 - i
            if n + 1 < len(b) and b[n + 1] != 0:
                t1 += coef * (n + 1) * (n + 1) * b[n + 1]
        # term2 = s^2 P (P')^2 at order d
        t2 = mpq(0)
        if d >= 2:
            for i in range(d - 1):
                if b[i] != 0 and PpPp[d - 2 - i] != 0:
                    t2 += b[i] * PpPp[d - 2 - i]
        # term3 = (s^2 - a^2) P, with the -a^2 b_m part folded into the
        # linear factor below
        t3 = b[d - 2] if d >= 2 else mpq(0)
        # term4 = s^2 P^3 (P^2 - 2)
        t4 = (P5[d - 2] - 2 * P3[d - 2]) if d >= 2 else mpq(0)
        resid = t1 + t2 + t3 + t4
        lead = m * m - a * a
        if lead == 0:
            raise AlgebraError("degenerate linear solve in p_hard series", order=m)
        b[m] = -resid / lead
    sol = PiecewiseTaylor(
        [(0.0, b, 1.0)],
        domain=(0.0, math.inf),
        var_power=0.5,
        exact=True,
        problem=f"p_series a={a}",
    )
    sol.order_a = a
    return sol


# -- identities -----------------------------------------------------------

_bj_cache = {}


def bj_u1_identity_residual(r: float, u0: PiecewiseTaylor = None, u1: PiecewiseTaylor = None):
    """u1(r) + (2^{2/3}/10)[u0'' + (2u0 + r^2/6)u0' + (r/3)u0], exactly
    zero for the true solutions."""
    if u0 is None or u1 is None:
        if "u0" not in _bj_cache:
            _bj_cache["u0"] = solve(OdeProblem(ProblemId.U0))
            _bj_cache["u1"] = solve(OdeProblem(ProblemId.U1))
        u0 = u0 or _bj_cache["u0"]
        u1 = u1 or _bj_cache["u1"]
    val = u0.eval(r)
    d1 = u0.eval_deriv(r, 1)
    d2 = u0.eval_deriv(r, 2)
    return u1.eval(r) + (2.0 ** (2.0 / 3.0) / 10.0) * (
        d2 + (2.0 * val + r * r / 6.0) * d1 + (r / 3.0) * val
    )
