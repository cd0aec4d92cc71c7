"""Exact finite-size distribution tables for constrained subsequence lengths.

Three combinatorial families are covered: all permutations of N letters
(longest increasing subsequence), and fixed-point-free involutions of N
letters with either the longest increasing or the longest decreasing
subsequence.  The cumulative counts #{objects with statistic <= l} are
computed exactly, by expanding product formulas built from the exact
origin series of the two hard-edge ODE solutions, and are cross-checked
against two independent oracles (exhaustive listing and a square-sum
over standard tableaux).
"""

from __future__ import annotations

import bisect
import itertools
import math
import os
import tempfile
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence

import gmpy2
from gmpy2 import mpq

from .painleve import AlgebraError, PiecewiseTaylor, p_hard_series_exact, v_series_exact

__all__ = [
    "SymmetryClass",
    "ExactCdfTable",
    "enumerate_plain",
    "enumerate_involution",
    "oracle_bruteforce",
    "oracle_hook_length",
    "poissonized_cdf",
    "build_table",
    "cache_path",
    "longest_increasing",
    "default_cache_dir",
]


class SymmetryClass(Enum):
    """Object family and which subsequence statistic is thresholded."""

    PLAIN = "PLAIN"  # all permutations, longest increasing subsequence
    INVOLUTION_INC = "INVOLUTION_INC"  # fixed-point-free involutions, LIS
    INVOLUTION_DEC = "INVOLUTION_DEC"  # fixed-point-free involutions, LDS


def total_objects(symmetry: SymmetryClass, N: int):
    """Number of objects of size N in the family (exact integer)."""
    if N < 0:
        raise ValueError("N must be nonnegative")
    if symmetry is SymmetryClass.PLAIN:
        return int(gmpy2.fac(N))
    if N % 2 == 1:
        return 0
    return 1 if N == 0 else int(gmpy2.double_fac(N - 1))


@dataclass
class ExactCdfTable:
    """Cumulative counts #{objects with statistic <= l}, exact integers.

    ``counts`` maps threshold l to the count; the map may cover only a
    window of thresholds for large N.  Invariants checked on the stored
    keys: counts are nondecreasing in l, counts[0] == 0, and any key
    >= N carries the full object total.
    """

    symmetry: SymmetryClass
    N: int
    counts: Dict[int, int] = field(default_factory=dict)

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("N must be positive")
        if self.symmetry is not SymmetryClass.PLAIN and self.N % 2 == 1:
            raise ValueError("involution families require N even")
        tot = self.total()
        prev = -1
        for l in sorted(self.counts):
            c = int(self.counts[l])
            if c < prev:
                raise ValueError(f"counts not nondecreasing at l={l}")
            if l == 0 and c != 0:
                raise ValueError("counts[0] must be 0")
            if l >= self.N and c != tot:
                raise ValueError(f"counts[{l}] must equal the object total {tot}")
            prev = c

    def total(self) -> int:
        return total_objects(self.symmetry, self.N)

    def prob(self, l: int) -> mpq:
        """Exact Pr(statistic <= l); raises KeyError outside the stored window."""
        return mpq(self.counts[l], self.total())

    def prob_clamped(self, l: int) -> mpq:
        """Pr(statistic <= l), clamped to 0/1 outside the stored window.

        Window tables are built wide enough that the clamped tails carry
        probability far below any tolerance used downstream.
        """
        if l in self.counts:
            return self.prob(l)
        keys = sorted(self.counts)
        if l < keys[0]:
            return mpq(0)
        if l > keys[-1]:
            return mpq(1)
        # interior gap (e.g. odd thresholds of the decreasing family):
        # the cumulative count is that of the nearest stored key below
        below = keys[bisect.bisect_right(keys, l) - 1]
        return self.prob(below)

    # -- persistence -------------------------------------------------------

    def to_text(self) -> str:
        lines = [f"{self.symmetry.value} {self.N}"]
        for l in sorted(self.counts):
            lines.append(f"{l} {int(self.counts[l])}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "ExactCdfTable":
        lines = [ln for ln in text.strip().splitlines() if ln.strip()]
        name, n_str = lines[0].split()
        counts = {}
        for ln in lines[1:]:
            l_str, c_str = ln.split()
            counts[int(l_str)] = int(c_str)
        return cls(SymmetryClass(name), int(n_str), counts)


# -- series plumbing (truncated power series over exact rationals) ---------


def _series_exp(f: Sequence[mpq], deg: int) -> List[mpq]:
    """exp of a series with f[0] == 0, through degree deg."""
    if f[0] != 0:
        raise ValueError("exponent series must vanish at the origin")
    g = [mpq(0)] * (deg + 1)
    g[0] = mpq(1)
    for n in range(1, deg + 1):
        acc = mpq(0)
        for k in range(1, n + 1):
            if f[k] and g[n - k]:
                acc += k * f[k] * g[n - k]
        g[n] = acc / n
    return g


def _series_mul(u: Sequence[mpq], v: Sequence[mpq], deg: int) -> List[mpq]:
    out = [mpq(0)] * (deg + 1)
    for i in range(min(len(u) - 1, deg) + 1):
        if not u[i]:
            continue
        for j in range(min(len(v) - 1, deg - i) + 1):
            if v[j]:
                out[i + j] += u[i] * v[j]
    return out


def _log_gap_series_y(a: int, deg_y: int, v_series: Optional[PiecewiseTaylor] = None):
    """Series in y = z^2 of the integral of v(r; a)/r from 0 to 4y."""
    if v_series is None:
        v_series = v_series_exact(a, max(1, deg_y - a))
    c = v_series.segments[0][1]
    top = len(c) - 1
    if getattr(v_series, "order_a", a) != a:
        raise ValueError("supplied series is for a different parameter")
    if top < min(deg_y, a + 1) or (deg_y > a and top < deg_y):
        raise ValueError(
            f"series truncated at degree {top}; need degree {deg_y} "
            f"(call v_series_exact({a}, {deg_y - a}))"
        )
    f = [mpq(0)] * (deg_y + 1)
    for m in range(a + 1, min(len(c) - 1, deg_y) + 1):
        if c[m]:
            f[m] = c[m] * mpq(4) ** m / m
    return f


def _half_b_series_z(a: int, deg_z: int) -> List[mpq]:
    """Series in z of one quarter of the integral of p(r; a)/sqrt(r) to 4z^2.

    Equals half the antiderivative of the square-root-variable solution
    evaluated at 2z: (1/2) sum_k b_k (2z)^{k+1} / (k+1).
    """
    f = [mpq(0)] * (deg_z + 1)
    if a == 0:
        # the solution is identically 1; the integral is just 2z
        if deg_z >= 1:
            f[1] = mpq(1)
        return f
    b = p_hard_series_exact(a, max(1, deg_z - 1 - a)).segments[0][1]
    for k in range(a, min(len(b) - 1, deg_z - 1) + 1):
        if b[k]:
            f[k + 1] = b[k] * mpq(2) ** (k + 1) / (2 * (k + 1))
    return f


def _to_int_checked(x: mpq, what: str) -> int:
    if x.denominator != 1:
        raise AlgebraError(f"non-integer {what}: {x}")
    n = int(x)
    if n < 0:
        raise AlgebraError(f"negative {what}: {n}")
    return n


# -- generating-function enumeration ---------------------------------------


def enumerate_plain(
    N_max: int, l: int, v_series: Optional[PiecewiseTaylor] = None
) -> List[int]:
    """Counts of permutations of N letters with LIS <= l, for N = 0..N_max.

    Expands exp(y + A(y)) in y = z^2, where A is the exactly-known
    integral series of the hard-edge sigma-function of parameter l; the
    coefficient of y^N times (N!)^2 is the count.  Integrality and
    monotonicity in N of the probabilities are asserted exactly.
    """
    if l < 1 or N_max < 0:
        raise ValueError("need l >= 1 and N_max >= 0")
    f = _log_gap_series_y(l, N_max, v_series)
    if N_max >= 1:
        f[1] += mpq(1)
    g = _series_exp(f, N_max)
    out = []
    prev_pr = None
    for N in range(N_max + 1):
        fN = gmpy2.fac(N)
        cnt = _to_int_checked(g[N] * fN * fN, f"count (PLAIN, N={N}, l={l})")
        pr = mpq(cnt, fN)
        if cnt > fN:
            raise AlgebraError(f"count exceeds N! at N={N}, l={l}")
        if prev_pr is not None and pr > prev_pr:
            raise AlgebraError(f"probability not monotone in N at N={N}, l={l}")
        prev_pr = pr
        out.append(cnt)
    return out


def enumerate_involution(N_max: int, l: int, symmetry: SymmetryClass) -> List[int]:
    """Counts of fixed-point-free involutions with statistic <= l, N = 0..N_max.

    Increasing statistic: parameter l-1, even-part (cosh) combination of
    the square-root-variable antiderivative.  Decreasing statistic:
    thresholds are even, parameter l+1, pure exponential with negative
    sign.  Odd powers of z must cancel identically; a surviving odd
    coefficient signals a series bug and raises.  Counts are read off as
    N! times the coefficient of z^N.
    """
    if N_max < 0 or l < 1:
        raise ValueError("need l >= 1 and N_max >= 0")
    if symmetry is SymmetryClass.INVOLUTION_INC:
        a = l - 1
    elif symmetry is SymmetryClass.INVOLUTION_DEC:
        if l % 2 == 1:
            raise ValueError("decreasing-statistic thresholds are even")
        a = l + 1
    else:
        raise ValueError("symmetry must be one of the involution classes")
    deg = N_max
    # z-series of z^2/2 + (1/2) * integral of v(r; a)/r
    fy = _log_gap_series_y(a, deg // 2)
    expo = [mpq(0)] * (deg + 1)
    for m, val in enumerate(fy):
        if val:
            expo[2 * m] = val / 2
    if deg >= 2:
        expo[2] += mpq(1, 2)
    B = _half_b_series_z(a, deg)
    if symmetry is SymmetryClass.INVOLUTION_INC:
        even = _series_exp(expo, deg)
        ep = _series_exp(B, deg)
        em = _series_exp([-x for x in B], deg)
        cosh = [(ep[n] + em[n]) / 2 for n in range(deg + 1)]
        G = _series_mul(even, cosh, deg)
    else:
        G = _series_exp([expo[n] - B[n] for n in range(deg + 1)], deg)
    out = []
    prev_pr = None
    for N in range(N_max + 1):
        if N % 2 == 1:
            if G[N] != 0:
                raise AlgebraError(f"odd coefficient survives at z^{N} (a={a})")
            out.append(0)
            continue
        tot = total_objects(symmetry, N)
        cnt = _to_int_checked(
            G[N] * gmpy2.fac(N), f"count ({symmetry.value}, N={N}, l={l})"
        )
        if cnt > tot:
            raise AlgebraError(f"count exceeds object total at N={N}, l={l}")
        pr = mpq(cnt, tot) if tot else mpq(1)
        if prev_pr is not None and pr > prev_pr:
            raise AlgebraError(f"probability not monotone in N at N={N}, l={l}")
        prev_pr = pr
        out.append(cnt)
    return out


# -- oracles ---------------------------------------------------------------


def longest_increasing(seq: Sequence[int]) -> int:
    """Length of the longest strictly increasing subsequence (patience method)."""
    tails: List[int] = []
    for x in seq:
        i = bisect.bisect_left(tails, x)
        if i == len(tails):
            tails.append(x)
        else:
            tails[i] = x
    return len(tails)


def _fpf_involutions(N: int):
    """Yield all fixed-point-free involutions of 1..N as one-line sequences."""

    def rec(free):
        if not free:
            yield {}
            return
        a = free[0]
        for i in range(1, len(free)):
            b = free[i]
            rest = free[1:i] + free[i + 1 :]
            for m in rec(rest):
                m[a] = b
                m[b] = a
                yield m
                del m[a], m[b]

    for m in rec(list(range(1, N + 1))):
        yield [m[i] for i in range(1, N + 1)]


def oracle_bruteforce(N: int, symmetry: SymmetryClass) -> ExactCdfTable:
    """Exact table by direct evaluation over every object (small N only)."""
    if symmetry is SymmetryClass.PLAIN:
        if not 1 <= N <= 8:
            raise ValueError("exhaustive permutation listing limited to N <= 8")
        stats = [
            longest_increasing(p) for p in itertools.permutations(range(1, N + 1))
        ]
    else:
        if not 2 <= N <= 12 or N % 2 == 1:
            raise ValueError("exhaustive involution listing limited to even N <= 12")
        if symmetry is SymmetryClass.INVOLUTION_INC:
            stats = [longest_increasing(p) for p in _fpf_involutions(N)]
        else:
            stats = [longest_increasing(p[::-1]) for p in _fpf_involutions(N)]
    counts = {l: sum(1 for s in stats if s <= l) for l in range(N + 1)}
    return ExactCdfTable(symmetry, N, counts)


def _partitions_max_part(n: int, maxp: int):
    """Yield partitions of n with largest part <= maxp, parts descending."""
    if n == 0:
        yield []
        return
    for first in range(min(n, maxp), 0, -1):
        for rest in _partitions_max_part(n - first, first):
            yield [first] + rest


def oracle_hook_length(N: int, l: int) -> int:
    """Count of permutations of N letters with LIS <= l via tableau pairs.

    Sums the squared number of standard fillings over all shapes of size
    N with at most l columns; the filling count comes from the product-
    of-hooks formula, evaluated exactly.
    """
    if not 1 <= N <= 40:
        raise ValueError("shape enumeration limited to N <= 40")
    if l < 1:
        raise ValueError("need l >= 1")
    total = 0
    facN = gmpy2.fac(N)
    for shape in _partitions_max_part(N, l):
        # hook product over cells
        cols = [0] * shape[0]
        for row_len in shape:
            for j in range(row_len):
                cols[j] += 1
        hooks = 1
        for i, row_len in enumerate(shape):
            for j in range(row_len):
                hooks *= (row_len - j) + (cols[j] - i) - 1
        f = facN // hooks
        if f * hooks != facN:
            raise AlgebraError(f"hook product does not divide N! for shape {shape}")
        total += f * f
    return int(total)


# -- Poissonized check helper ----------------------------------------------


def poissonized_cdf(z: float, counts: Sequence[int]) -> float:
    """exp(-z^2) * sum_N z^(2N)/N! * Pr_N from a PLAIN count column.

    ``counts[N]`` is the count out of N!; the sum runs over the supplied
    range, so the caller chooses the truncation point.
    """
    zq = mpq(z)
    y = zq * zq
    acc = mpq(0)
    ypow = mpq(1)
    for N, cnt in enumerate(counts):
        fN = gmpy2.fac(N)
        acc += ypow * mpq(cnt, fN * fN)
        ypow *= y
    return math.exp(-float(y)) * float(acc)


# -- cached table construction ---------------------------------------------


def default_cache_dir() -> str:
    env = os.environ.get("LISLAB_CACHE")
    if env:
        return env
    return os.path.join(os.path.dirname(__file__), "data")


def cache_path(symmetry: SymmetryClass, N: int, directory: Optional[str] = None) -> str:
    d = directory or default_cache_dir()
    return os.path.join(d, f"cdf_{symmetry.value.lower()}_{N}.txt")


def _atomic_write(path: str, text: str) -> None:
    os.makedirs(os.path.dirname(path), exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(path), suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.unlink(tmp)


def build_table(
    symmetry: SymmetryClass,
    N: int,
    l_values: Optional[Iterable[int]] = None,
    cache_dir: Optional[str] = None,
    use_cache: bool = True,
) -> ExactCdfTable:
    """Exact table for one size, computed per threshold and cached on disk.

    ``l_values`` defaults to every threshold 0..N (even thresholds only
    for the decreasing family).  A cached file is reused when it covers
    all requested thresholds; otherwise the missing ones are computed
    and the union is rewritten atomically.
    """
    if l_values is None:
        if symmetry is SymmetryClass.INVOLUTION_DEC:
            l_values = list(range(0, N + 1, 2))
        else:
            l_values = list(range(0, N + 1))
    wanted = sorted(set(int(l) for l in l_values))
    path = cache_path(symmetry, N, cache_dir)
    counts: Dict[int, int] = {}
    if use_cache and os.path.exists(path):
        cached = ExactCdfTable.from_text(open(path).read())
        if cached.symmetry is symmetry and cached.N == N:
            counts.update(cached.counts)
    missing = [l for l in wanted if l not in counts]
    tot = total_objects(symmetry, N)
    for l in missing:
        if l == 0:
            counts[0] = 0
        elif l >= N:
            counts[l] = tot
        elif symmetry is SymmetryClass.PLAIN:
            counts[l] = enumerate_plain(N, l)[N]
        else:
            counts[l] = enumerate_involution(N, l, symmetry)[N]
    table = ExactCdfTable(symmetry, N, {l: counts[l] for l in sorted(counts)})
    if use_cache and missing:
        _atomic_write(path, table.to_text())
    return ExactCdfTable(symmetry, N, {l: counts[l] for l in wanted})
