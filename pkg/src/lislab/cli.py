"""Command-line front end: every computation as a subcommand with CSV output.

Shared flags: ``--out`` (output path; stdout when omitted), ``--grid
lo:hi:n``, ``--route``, ``--precision``, ``--config`` (JSON file of
flag defaults), ``--no-cache``, ``--threads``.  Every file written gets
a sibling ``<file>.manifest.json`` recording the command, parameters,
seeds, library version, wall time, and a content hash.

Exit codes: 0 success, 2 usage error, 3 numerical non-convergence,
4 invariant failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import time
from typing import List, Optional

import numpy as np

from . import __version__
from .edgelaws import (
    CORR_T_RANGE,
    Route,
    correction,
    correction_curve,
    delta_hard,
    gap_hard,
    gap_soft,
    residual_curve,
)
from .enumerate import (
    SymmetryClass,
    build_table,
    enumerate_involution,
    enumerate_plain,
    oracle_bruteforce,
    oracle_hook_length,
)
from .fredholm import ConvergenceError
from .painleve import AlgebraError, OdeProblem, ProblemId, bj_u1_identity_residual, solve
from .simulate import SimConfig, delta_curve, run as run_sim
from .specfun import DomainError
from .stats import exact_mean_var, fit_inverse_cuberoot, hat_quantities, limit_moments

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NONCONVERGENCE = 3
EXIT_INVARIANT = 4

_ROUTES = {
    "fredholm": Route.FREDHOLM,
    "painleve": Route.PAINLEVE,
    "bj": Route.BAIK_JENKINS,
}


def _fmt(x: float) -> str:
    return "%.17g" % float(x)


def _parse_grid(spec: str) -> List[float]:
    try:
        lo_s, hi_s, n_s = spec.split(":")
        lo, hi, n = float(lo_s), float(hi_s), int(n_s)
    except ValueError:
        raise argparse.ArgumentTypeError("grid must be lo:hi:n")
    if n < 1 or hi < lo:
        raise argparse.ArgumentTypeError("grid needs n >= 1 and hi >= lo")
    if n == 1:
        return [lo]
    return [lo + (hi - lo) * i / (n - 1) for i in range(n)]


def _emit(text: str, out: Optional[str], manifest: dict) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    with open(out, "w") as fh:
        fh.write(text)
    manifest["outputs"] = {
        out: hashlib.sha256(text.encode()).hexdigest()
    }
    with open(out + ".manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _manifest(args: argparse.Namespace) -> dict:
    params = {
        k: (v.value if isinstance(v, (Route, SymmetryClass)) else v)
        for k, v in sorted(vars(args).items())
        if k not in ("func",) and not callable(v)
    }
    return {
        "command": args.command,
        "params": params,
        "seeds": [args.seed] if "seed" in params and params["seed"] is not None else [],
        "version": __version__,
    }


# -- subcommand bodies -----------------------------------------------------


def _cmd_gap(args) -> str:
    if args.edge == "hard" and args.a is None:
        raise ValueError("--edge hard requires --a")
    rows = ["x,value,route,beta,edge"]
    route = _ROUTES[args.route]
    for x in args.grid:
        if args.edge == "soft":
            v = gap_soft(args.beta, x, route)
        else:
            v = gap_hard(args.beta, x, args.a, route)
        rows.append(
            f"{_fmt(x)},{_fmt(v)},{args.route},{args.beta},{args.edge}"
        )
    return "\n".join(rows) + "\n"


def _cmd_correction(args) -> str:
    curve = correction_curve(args.beta, args.grid, _ROUTES[args.route])
    return curve.to_csv()


def _cmd_delta_hard(args) -> str:
    route = _ROUTES[args.route]
    rows = ["t,delta,correction,residual,beta,l"]
    for t in args.grid:
        d = delta_hard(args.beta, args.l, t, route)
        c = correction(args.beta, t, route)
        r = (d - c) / args.l ** (2.0 / 3.0)
        rows.append(f"{_fmt(t)},{_fmt(d)},{_fmt(c)},{_fmt(r)},{args.beta},{args.l}")
    return "\n".join(rows) + "\n"


def _cmd_enumerate(args) -> str:
    sym = SymmetryClass(args.symmetry)
    if args.l is not None:
        if sym is SymmetryClass.PLAIN:
            col = enumerate_plain(args.nmax, args.l)
        else:
            col = enumerate_involution(args.nmax, args.l, sym)
        rows = ["N,count,class,l"]
        for N, cnt in enumerate(col):
            rows.append(f"{N},{cnt},{sym.value},{args.l}")
        return "\n".join(rows) + "\n"
    table = build_table(sym, args.nmax, use_cache=not args.no_cache)
    return table.to_text()


def _cmd_simulate(args) -> str:
    if args.z is not None:
        cfg = SimConfig(trials=args.trials, master_seed=args.seed, z=args.z)
    else:
        cfg = SimConfig(
            trials=args.trials,
            master_seed=args.seed,
            symmetry=SymmetryClass(args.symmetry),
            N=args.n,
        )
    return run_sim(cfg).to_csv()


def _cmd_delta_n(args) -> str:
    sym = SymmetryClass(args.symmetry)
    if args.trials is not None:
        cfg = SimConfig(
            trials=args.trials, master_seed=args.seed, symmetry=sym, N=args.n
        )
        source = run_sim(cfg)
    else:
        source = build_table(sym, args.n, use_cache=not args.no_cache)
    curve = delta_curve(sym, args.n, source)
    return curve.to_csv()


def _cmd_moments(args) -> str:
    m = limit_moments(args.beta)
    rows = ["beta,m1,m2,variance"]
    rows.append(f"{args.beta},{_fmt(m.m1)},{_fmt(m.m2)},{_fmt(m.variance)}")
    return "\n".join(rows) + "\n"


def _cmd_fit(args) -> str:
    sym = SymmetryClass(args.symmetry)
    step = 2 if sym is not SymmetryClass.PLAIN else 1
    Ns = list(range(args.nmin + args.nmin % step, args.nmax + 1, step))
    mu_rows, s2_rows = [], []
    beta = {SymmetryClass.PLAIN: 2, SymmetryClass.INVOLUTION_DEC: 1,
            SymmetryClass.INVOLUTION_INC: 4}[sym]
    for N in Ns:
        table = build_table(sym, N, use_cache=not args.no_cache)
        mean, var = exact_mean_var(table)
        mu, s2 = hat_quantities(N, float(mean), float(var), beta=beta)
        mu_rows.append((N, mu))
        s2_rows.append((N, s2))
    fit_mu = fit_inverse_cuberoot(mu_rows)
    fit_s2 = fit_inverse_cuberoot(s2_rows)
    rows = ["N,mu_hat,sigma2_hat,fit_residual"]
    for (N, mu), (_, s2), r in zip(mu_rows, s2_rows, fit_mu.residuals):
        rows.append(f"{N},{_fmt(mu)},{_fmt(s2)},{_fmt(r)}")
    rows.append(f"# fit mu_hat: c={_fmt(fit_mu.c)} d={_fmt(fit_mu.d)} model={fit_mu.model}")
    rows.append(f"# fit sigma2_hat: c={_fmt(fit_s2.c)} d={_fmt(fit_s2.d)} model={fit_s2.model}")
    return "\n".join(rows) + "\n"


def _cmd_verify(args) -> str:
    checks = []

    def check(name, fn):
        try:
            ok = bool(fn())
            detail = ""
        except Exception as exc:  # noqa: BLE001 - report, do not crash the suite
            ok, detail = False, f" ({type(exc).__name__}: {exc})"
        checks.append((name, ok, detail))

    check(
        "gap_soft dual route (beta=2, t=0)",
        lambda: abs(gap_soft(2, 0.0, Route.FREDHOLM) - gap_soft(2, 0.0, Route.PAINLEVE))
        < 1e-8,
    )
    check(
        "gap_hard dual route (beta=2, s=4, a=6)",
        lambda: abs(
            gap_hard(2, 4.0, 6, Route.FREDHOLM) - gap_hard(2, 4.0, 6, Route.PAINLEVE)
        )
        < 1e-8,
    )
    check(
        "correction triple route (beta=2, t=0)",
        lambda: max(
            abs(correction(2, 0.0, a) - correction(2, 0.0, b))
            for a in Route
            for b in Route
        )
        < 1e-6,
    )

    def _bj():
        u0 = solve(OdeProblem(ProblemId.U0))
        u1 = solve(OdeProblem(ProblemId.U1))
        return max(abs(bj_u1_identity_residual(t, u0, u1)) for t in (-4.0, 0.0, 4.0)) < 1e-6

    check("linear-correction identity residual", _bj)
    check(
        "enumeration vs exhaustive listing (N=6)",
        lambda: all(
            enumerate_plain(6, l)[6] == oracle_bruteforce(6, SymmetryClass.PLAIN).counts[l]
            for l in range(1, 7)
        ),
    )
    check(
        "enumeration vs tableau oracle (N=20, l=5)",
        lambda: enumerate_plain(20, 5)[20] == oracle_hook_length(20, 5),
    )

    def _sim_det():
        cfg = SimConfig(trials=32, master_seed=11, symmetry=SymmetryClass.PLAIN, N=40)
        return run_sim(cfg).counts == run_sim(cfg).counts

    check("simulation determinism", _sim_det)
    check(
        "limit variance positive (all beta)",
        lambda: all(limit_moments(b).variance > 0 for b in (1, 2, 4)),
    )

    def _fit_exact():
        fit = fit_inverse_cuberoot(
            [(n, 3.0 + 5.0 * n ** (-1.0 / 3.0)) for n in (10, 40, 160)]
        )
        return abs(fit.c - 3.0) < 1e-12 and abs(fit.d - 5.0) < 1e-12

    check("fit recovers exact model", _fit_exact)

    lines = []
    for name, ok, detail in checks:
        lines.append(f"{'PASS' if ok else 'FAIL'} {name}{detail}")
    n_fail = sum(1 for _, ok, _ in checks if not ok)
    lines.append(f"{len(checks) - n_fail}/{len(checks)} checks passed")
    text = "\n".join(lines) + "\n"
    if n_fail:
        raise _VerifyFailure(text)
    return text


class _VerifyFailure(AssertionError):
    pass


# -- parser ----------------------------------------------------------------


def _add_shared(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", default=None, help="output file (stdout if omitted)")
    p.add_argument("--config", default=None, help="JSON file of flag defaults")
    p.add_argument("--precision", type=int, default=53,
                   help="working precision in bits (53 = double)")
    p.add_argument("--threads", type=int, default=1,
                   help="worker cap; results do not depend on it")
    p.add_argument("--no-cache", action="store_true", help="bypass the table cache")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="lislab",
        description="Longest-increasing-subsequence limit laws and corrections",
    )
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gap", help="limiting or hard-wall gap probability curve")
    p.add_argument("--beta", type=int, choices=(1, 2, 4), default=None)
    p.add_argument("--edge", choices=("soft", "hard"), default=None)
    p.add_argument("--grid", type=_parse_grid, default=_parse_grid("-6:4:101"))
    p.add_argument("--route", choices=("fredholm", "painleve"), default="painleve")
    p.add_argument("--a", type=int, default=None, help="hard-edge parameter")
    p.set_defaults(func=_cmd_gap)

    p = sub.add_parser("correction", help="first finite-size correction curve")
    p.add_argument("--beta", type=int, choices=(1, 2, 4), default=None)
    p.add_argument("--route", choices=("fredholm", "painleve", "bj"),
                   default="painleve")
    p.add_argument("--grid", type=_parse_grid,
                   default=_parse_grid(f"{CORR_T_RANGE[0]}:{CORR_T_RANGE[1]}:101"))
    p.set_defaults(func=_cmd_correction)

    p = sub.add_parser("delta-hard",
                       help="finite-threshold difference curve and residual")
    p.add_argument("--beta", type=int, choices=(1, 2, 4), default=None)
    p.add_argument("--l", type=int, default=None)
    p.add_argument("--grid", type=_parse_grid, default=_parse_grid("-6:3:46"))
    p.add_argument("--route", choices=("fredholm", "painleve"), default="painleve")
    p.set_defaults(func=_cmd_delta_hard)

    p = sub.add_parser("enumerate", help="exact count tables (cached)")
    p.add_argument("--class", dest="symmetry", default=None,
                   choices=[s.value for s in SymmetryClass])
    p.add_argument("--nmax", type=int, default=None)
    p.add_argument("--l", type=int, default=None,
                   help="single threshold: emit the count column over N")
    p.set_defaults(func=_cmd_enumerate)

    p = sub.add_parser("simulate", help="Monte Carlo empirical CDF")
    p.add_argument("--class", dest="symmetry", default=None,
                   choices=[s.value for s in SymmetryClass])
    p.add_argument("--n", type=int, default=0)
    p.add_argument("--z", type=float, default=None,
                   help="random-size model intensity (replaces --class/--n)")
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("delta-n", help="scaled finite-N difference curves")
    p.add_argument("--class", dest="symmetry", default=None,
                   choices=[s.value for s in SymmetryClass])
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--trials", type=int, default=None,
                   help="use an empirical CDF with this many trials")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_delta_n)

    p = sub.add_parser("moments", help="moments of the limiting law")
    p.add_argument("--beta", type=int, choices=(1, 2, 4), default=2)
    p.set_defaults(func=_cmd_moments)

    p = sub.add_parser("fit", help="hat-quantity tabulation and model fit")
    p.add_argument("--class", dest="symmetry", default=SymmetryClass.PLAIN.value,
                   choices=[s.value for s in SymmetryClass])
    p.add_argument("--nmin", type=int, default=10)
    p.add_argument("--nmax", type=int, default=120)
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("verify", help="cross-route and oracle invariant suite")
    p.set_defaults(func=_cmd_verify)

    for p in sub.choices.values():
        _add_shared(p)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    ap = build_parser()
    args, remaining = ap.parse_known_args(argv)
    if getattr(args, "config", None):
        with open(args.config) as fh:
            defaults = json.load(fh)
        for sp in ap._subparsers._group_actions[0].choices.values():  # noqa: SLF001
            sp.set_defaults(**{k: v for k, v in defaults.items()})
        args = ap.parse_args(argv)
    elif remaining:
        ap.error(f"unrecognized arguments: {' '.join(remaining)}")
    if getattr(args, "precision", 53) < 53:
        ap.error("precision must be at least 53 bits")
    t0 = time.time()
    manifest = _manifest(args)
    try:
        text = args.func(args)
    except (ConvergenceError, ArithmeticError) as exc:
        print(f"error: numerical non-convergence: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except _VerifyFailure as exc:
        sys.stdout.write(str(exc))
        return EXIT_INVARIANT
    except (AlgebraError, AssertionError) as exc:
        print(f"error: invariant failure: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (DomainError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    manifest["wall_time_s"] = round(time.time() - t0, 3)
    _emit(text, args.out, manifest)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
