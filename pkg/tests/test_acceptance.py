"""Acceptance gate: the nine headline criteria, one pass/fail line each.

Each test prints ``CRITERION n: PASS/FAIL`` with a short detail string
and then asserts, so the -v test listing and the captured output both
record the verdict.
"""

import math

import numpy as np
import pytest
from gmpy2 import mpq

import lislab.enumerate as enum
from lislab.edgelaws import (
    Route,
    correction,
    gap_hard,
    gap_soft,
    residual_curve,
)
from lislab.enumerate import (
    ExactCdfTable,
    SymmetryClass,
    cache_path,
    enumerate_involution,
    enumerate_plain,
    oracle_bruteforce,
    poissonized_cdf,
    total_objects,
)
from lislab.painleve import OdeProblem, ProblemId, bj_u1_identity_residual, solve
from lislab.simulate import SimConfig, delta_curve, run as run_sim
from lislab.stats import (
    exact_mean_var,
    fit_inverse_cuberoot,
    hat_quantities,
    limit_moments,
    smoothed_limit_moments,
)


def _report(num: int, ok: bool, detail: str) -> None:
    print(f"CRITERION {num}: {'PASS' if ok else 'FAIL'} — {detail}")
    assert ok, f"criterion {num}: {detail}"


def _load_table(symmetry: SymmetryClass, N: int) -> ExactCdfTable:
    with open(cache_path(symmetry, N)) as fh:
        return ExactCdfTable.from_text(fh.read())


def _hook_counts_by_threshold(N: int):
    """counts[l] = sum of squared standard-filling numbers over shapes
    of size N with at most l columns, all shapes generated once."""
    facN = math.factorial(N)
    per_shape = []
    for shape in enum._partitions_max_part(N, N):
        cols = [0] * shape[0]
        for row_len in shape:
            for j in range(row_len):
                cols[j] += 1
        hooks = 1
        for i, row_len in enumerate(shape):
            for j in range(row_len):
                hooks *= (row_len - j) + (cols[j] - i) - 1
        f = facN // hooks
        per_shape.append((shape[0], f * f))
    counts = [0] * (N + 1)
    for width, fsq in per_shape:
        counts[width] += fsq
    # cumulative over the number of columns
    for l in range(1, N + 1):
        counts[l] += counts[l - 1]
    return counts


def test_criterion_1_enumeration_oracles():
    ok, detail = True, ""
    # generating function vs exhaustive listing, every N <= 8, every l
    for N in range(1, 9):
        bf = oracle_bruteforce(N, SymmetryClass.PLAIN)
        for l in range(1, N + 1):
            if enumerate_plain(N, l)[N] != bf.counts[l]:
                ok, detail = False, f"plain brute-force mismatch N={N} l={l}"
    # generating function vs tableau square-sum, every N <= 30, every l
    cols = {l: enumerate_plain(30, l) for l in range(1, 30)}
    for N in range(1, 31):
        hook = _hook_counts_by_threshold(N)
        for l in range(1, N + 1):
            got = total_objects(SymmetryClass.PLAIN, N) if l >= N else cols[l][N]
            if got != hook[l]:
                ok, detail = False, f"hook mismatch N={N} l={l}"
    # involution sectors vs exhaustive listing, every even N <= 10
    for sym in (SymmetryClass.INVOLUTION_INC, SymmetryClass.INVOLUTION_DEC):
        step = 2 if sym is SymmetryClass.INVOLUTION_DEC else 1
        for N in range(2, 11, 2):
            bf = oracle_bruteforce(N, sym)
            for l in range(step, N + 1, step):
                if enumerate_involution(N, l, sym)[N] != bf.counts[l]:
                    ok, detail = False, f"{sym.value} mismatch N={N} l={l}"
    _report(1, ok, detail or "exact equality against both oracles")


def test_criterion_2_gap_soft_dual_route():
    worst = 0.0
    for beta in (1, 2, 4):
        for t in (-6.0, -4.0, -2.0, 0.0, 2.0, 4.0):
            d = abs(gap_soft(beta, t, Route.FREDHOLM) - gap_soft(beta, t, Route.PAINLEVE))
            worst = max(worst, d)
    _report(2, worst < 1e-8, f"max |det - ODE| = {worst:.3e} (tol 1e-8)")


def test_criterion_3_linear_correction_identities():
    u0 = solve(OdeProblem(ProblemId.U0))
    u1 = solve(OdeProblem(ProblemId.U1))
    res = max(
        abs(bj_u1_identity_residual(float(t), u0, u1))
        for t in np.linspace(-6.0, 6.0, 25)
    )
    ok = res < 1e-6
    worst2 = worst1 = 0.0
    for t in np.linspace(-6.0, 3.0, 10):
        v2 = [correction(2, float(t), r) for r in Route]
        worst2 = max(
            worst2, max(abs(a - b) for a in v2 for b in v2)
        )
        v1 = [correction(1, float(t), r) for r in Route]
        worst1 = max(
            worst1, max(abs(a - b) for a in v1 for b in v1)
        )
    ok = ok and worst2 < 1e-6 and worst1 < 1e-5
    _report(
        3,
        ok,
        f"identity residual {res:.2e} (1e-6); route spread "
        f"beta2 {worst2:.2e} (1e-6), beta1 {worst1:.2e} (1e-5)",
    )


def test_criterion_4_published_constants():
    m = limit_moments(2)
    ok1 = abs(m.m1 - (-1.771086807)) < 1e-6
    ok2 = abs(m.variance - 0.81319) < 1e-4
    e_inf, v_inf = smoothed_limit_moments(10000)
    mu_off, s2_off = hat_quantities(10000, e_inf, v_inf)
    ok3 = abs(mu_off - 0.5) < 5e-3
    ok4 = abs(s2_off - 1.0 / 12.0) < 5e-3
    _report(
        4,
        ok1 and ok2 and ok3 and ok4,
        f"m1={m.m1:.9f}, var={m.variance:.5f}, "
        f"offsets {mu_off:.6f} / {s2_off:.6f}",
    )


def test_criterion_5_fit_reproduction():
    # CI window N = 10..120 with widened tolerance; the published window
    # N = 10..700 at (0.01, 0.05)/(0.02, 0.1) is the documented offline run
    NMAX = 120
    cols = {l: enumerate_plain(NMAX, l) for l in range(1, NMAX)}
    mu_rows, s2_rows = [], []
    for N in range(10, NMAX + 1):
        counts = {0: 0, N: total_objects(SymmetryClass.PLAIN, N)}
        for l in range(1, N):
            counts[l] = cols[l][N]
        mean, var = exact_mean_var(ExactCdfTable(SymmetryClass.PLAIN, N, counts))
        mu, s2 = hat_quantities(N, float(mean), float(var))
        mu_rows.append((N, mu))
        s2_rows.append((N, s2))
    fm = fit_inverse_cuberoot(mu_rows)
    fs = fit_inverse_cuberoot(s2_rows)
    ok = (
        abs(fm.c - 0.5065) < 0.05
        and abs(fm.d - 0.222) < 0.15
        and abs(fs.c - (-1.206)) < 0.05
        and abs(fs.d - 0.545) < 0.15
    )
    _report(
        5,
        ok,
        f"mean fit ({fm.c:.4f}, {fm.d:.4f}) vs (0.5065, 0.222); "
        f"variance fit ({fs.c:.4f}, {fs.d:.4f}) vs (-1.206, 0.545)",
    )


def test_criterion_6_correction_order():
    grid = [float(t) for t in np.linspace(-6.0, 3.0, 19)]
    ok, details = True, []
    lo_f, hi_f = 2.0 ** (4.0 / 3.0) * 0.7, 2.0 ** (4.0 / 3.0) * 1.3
    for beta in (1, 2, 4):
        m20 = max(abs(v) for _, v, _ in residual_curve(beta, 20, grid).rows)
        m40 = max(abs(v) for _, v, _ in residual_curve(beta, 40, grid).rows)
        ratio = m20 / m40
        if not lo_f <= ratio <= hi_f:
            ok = False
        details.append(f"beta={beta} ratio {ratio:.3f}")
    _report(6, ok, "; ".join(details) + f" (window [{lo_f:.3f}, {hi_f:.3f}])")


def test_criterion_7_monte_carlo_vs_exact():
    # CI variant: 1e5 trials against the DKW 99% bound for that size
    trials = 100000
    bound = math.sqrt(math.log(2.0 / 0.01) / (2.0 * trials))
    ok, details = True, []
    for sym, N in (
        (SymmetryClass.PLAIN, 700),
        (SymmetryClass.INVOLUTION_INC, 400),
        (SymmetryClass.INVOLUTION_DEC, 400),
    ):
        table = _load_table(sym, N)
        emp = run_sim(SimConfig(trials=trials, master_seed=20260823, symmetry=sym, N=N))
        lo, hi = min(emp.counts), max(emp.counts)
        sup = max(
            abs(emp.prob(l) - float(table.prob_clamped(l))) for l in range(lo, hi + 1)
        )
        if sup >= bound:
            ok = False
        details.append(f"{sym.value} N={N} sup {sup:.2e}")
    _report(7, ok, "; ".join(details) + f" (bound {bound:.2e})")


def test_criterion_8_poissonization_identity():
    worst = 0.0
    for z in (1.0, 2.0, 4.0):
        n_max = int(4 * z * z + 40)
        for l in range(4, 13):
            lhs = poissonized_cdf(z, enumerate_plain(n_max, l))
            rhs = gap_hard(2, 4.0 * z * z, l, Route.PAINLEVE)
            worst = max(worst, abs(lhs - rhs))
    _report(8, worst < 1e-10, f"max |Poisson sum - hard gap| = {worst:.3e} (tol 1e-10)")


def test_criterion_9_scaled_difference_overlays():
    # the published N = 1e5 overlays are an offline target; CI checks the
    # N^{-1/3} collapse on the cached exact tables
    ok, details = True, []
    for sym, Ns, tol in (
        (SymmetryClass.PLAIN, (400, 700), 0.08),
        (SymmetryClass.INVOLUTION_DEC, (200, 400), 0.12),
        (SymmetryClass.INVOLUTION_INC, (200, 400), 0.12),
    ):
        curves = [delta_curve(sym, N, _load_table(sym, N)) for N in Ns]
        (tA, vA), (tB, vB) = [
            (np.array([r[0] for r in c.rows]), np.array([r[1] for r in c.rows]))
            for c in curves
        ]
        lo, hi = max(tA.min(), tB.min()), min(tA.max(), tB.max())
        mask = (tA >= lo) & (tA <= hi)
        sup = float(np.max(np.abs(vA[mask] - np.interp(tA[mask], tB, vB))))
        if sup >= tol:
            ok = False
        details.append(f"{sym.value} sup {sup:.3f} (tol {tol})")
    _report(9, ok, "; ".join(details))
