"""Samplers, subsequence lengths, empirical CDFs, scaled differences."""

import math

import numpy as np
import pytest

from lislab.edgelaws import Route, gap_hard
from lislab.enumerate import SymmetryClass, build_table, oracle_bruteforce
from lislab.simulate import (
    EmpiricalCdf,
    SimConfig,
    delta_curve,
    histogram_window,
    lds,
    lis,
    lis_dp_oracle,
    run,
    sample_fpf_involution,
    sample_hammersley,
    sample_permutation,
    trial_stream,
)


# -- subsequence lengths ---------------------------------------------------


def test_lis_worked_example():
    assert lis((2, 5, 6, 8, 7, 3, 4, 1)) == 4
    assert lds((2, 5, 6, 8, 7, 3, 4, 1)) == 4


def test_lis_extremes():
    assert lis(range(1, 21)) == 20
    assert lis(range(20, 0, -1)) == 1


def test_lis_rejects_non_permutation():
    with pytest.raises(ValueError):
        lis((1, 2, 2))
    with pytest.raises(ValueError):
        lis((0, 1, 2))


def test_lis_matches_dp_oracle():
    rng = np.random.default_rng(11)
    for _ in range(300):
        n = int(rng.integers(1, 51))
        p = rng.permutation(n) + 1
        assert lis(p) == lis_dp_oracle(p)


# -- samplers --------------------------------------------------------------


def test_sample_permutation_trivial_and_deterministic():
    assert list(sample_permutation(1, trial_stream(7, 0))) == [1]
    a = sample_permutation(50, trial_stream(123, 4))
    b = sample_permutation(50, trial_stream(123, 4))
    assert np.array_equal(a, b)
    c = sample_permutation(50, trial_stream(123, 5))
    assert not np.array_equal(a, c)


def test_sample_permutation_uniform_chi2():
    # 24 cells over S_4; chi-square with 23 dof
    import itertools

    cells = {p: 0 for p in itertools.permutations((1, 2, 3, 4))}
    trials = 24000
    for i in range(trials):
        cells[tuple(sample_permutation(4, trial_stream(99, i)))] += 1
    e = trials / 24
    chi2 = sum((c - e) ** 2 / e for c in cells.values())
    # 0.001 upper quantile for 23 dof is ~ 49.7
    assert chi2 < 49.7


def test_sample_fpf_involution_properties():
    for i in range(50):
        p = sample_fpf_involution(40, trial_stream(5, i))
        seq = list(p)
        assert all(seq[seq[k] - 1] == k + 1 for k in range(40))
        assert all(seq[k] != k + 1 for k in range(40))


def test_sample_fpf_involution_n2():
    assert list(sample_fpf_involution(2, trial_stream(1, 0))) == [2, 1]


def test_sample_fpf_involution_uniform_support():
    counts = {}
    trials = 3000
    for i in range(trials):
        key = tuple(sample_fpf_involution(4, trial_stream(77, i)))
        counts[key] = counts.get(key, 0) + 1
    assert len(counts) == 3
    e = trials / 3
    sigma = math.sqrt(e * (2 / 3))
    assert all(abs(c - e) < 4 * sigma for c in counts.values())


def test_sample_fpf_involution_odd_rejected():
    with pytest.raises(ValueError):
        sample_fpf_involution(5, trial_stream(0, 0))


def test_sample_hammersley_poisson_mean():
    z, trials = 3.0, 4000
    tot = 0
    for i in range(trials):
        n, v = sample_hammersley(z, trial_stream(13, i))
        assert 0 <= v <= n
        tot += n
    mean = tot / trials
    assert abs(mean - z * z) < 4 * z / math.sqrt(trials)


# -- runs and empirical CDFs -----------------------------------------------


def test_run_single_trial_step_cdf():
    cfg = SimConfig(trials=1, master_seed=3, symmetry=SymmetryClass.PLAIN, N=30)
    emp = run(cfg)
    vals = sorted(set(emp.counts.values()))
    assert vals == [0, 1] or vals == [1]


def test_run_deterministic_and_order_independent():
    cfg = SimConfig(trials=64, master_seed=21, symmetry=SymmetryClass.PLAIN, N=50)
    a = run(cfg)
    b = run(cfg)
    assert a.counts == b.counts
    # order independence: accumulate trials in reverse by hand
    from lislab.simulate import _lis_values

    lo, hi = histogram_window(50)
    vals = []
    for trial in reversed(range(64)):
        vals.append(_lis_values(sample_permutation(50, trial_stream(21, trial))))
    counts = {
        l: sum(1 for v in vals if v <= l or l == hi + 1) for l in range(lo - 1, hi + 2)
    }
    assert counts == a.counts


def test_run_empirical_close_to_exact_small():
    # N small enough for the brute-force table; DKW 99% bound
    table = oracle_bruteforce(8, SymmetryClass.PLAIN)
    trials = 4000
    cfg = SimConfig(trials=trials, master_seed=8, symmetry=SymmetryClass.PLAIN, N=8)
    emp = run(cfg)
    bound = math.sqrt(math.log(2.0 / 0.01) / (2.0 * trials))
    sup = max(
        abs(emp.prob(l) - float(table.prob(l))) for l in range(0, 9)
    )
    assert sup < bound


def test_run_involution_classes_differ():
    cfg_i = SimConfig(
        trials=200, master_seed=5, symmetry=SymmetryClass.INVOLUTION_INC, N=40
    )
    cfg_d = SimConfig(
        trials=200, master_seed=5, symmetry=SymmetryClass.INVOLUTION_DEC, N=40
    )
    a, b = run(cfg_i), run(cfg_d)
    assert a.counts != b.counts


def test_hammersley_matches_hard_gap():
    z, trials = 2.0, 3000
    cfg = SimConfig(trials=trials, master_seed=40, z=z)
    emp = run(cfg)
    for l in (6, 8):
        p = gap_hard(2, 4.0 * z * z, l, Route.PAINLEVE)
        tol = 4.0 * math.sqrt(p * (1 - p) / trials) + 1e-9
        assert abs(emp.prob(l) - p) < tol


def test_csv_roundtrip():
    cfg = SimConfig(trials=32, master_seed=17, symmetry=SymmetryClass.PLAIN, N=25)
    emp = run(cfg)
    text = emp.to_csv()
    assert text.splitlines()[0] == "l,count,cumulative,trials,seed,class,N"
    back = EmpiricalCdf.from_csv(text)
    assert back.counts == emp.counts
    assert back.config.master_seed == 17 and back.config.N == 25


def test_config_validation():
    with pytest.raises(ValueError):
        SimConfig(trials=0, master_seed=1, symmetry=SymmetryClass.PLAIN, N=5)
    with pytest.raises(ValueError):
        SimConfig(trials=1, master_seed=1)
    with pytest.raises(ValueError):
        SimConfig(trials=1, master_seed=1, symmetry=SymmetryClass.PLAIN, N=5, z=2.0)
    with pytest.raises(ValueError):
        SimConfig(trials=1, master_seed=1, symmetry=SymmetryClass.INVOLUTION_INC, N=5)


# -- scaled differences ----------------------------------------------------


def test_delta_curve_far_tails_vanish(tmp_path):
    table = build_table(SymmetryClass.PLAIN, 36, cache_dir=str(tmp_path))
    curve = delta_curve(SymmetryClass.PLAIN, 36, table)
    assert curve.beta == 2 and curve.l == 36
    # both CDFs saturate at the window ends
    assert abs(curve.rows[0][1]) < 1e-3
    assert abs(curve.rows[-1][1]) < 1e-3


def test_delta_curve_has_two_lobes(tmp_path):
    table = build_table(SymmetryClass.PLAIN, 36, cache_dir=str(tmp_path))
    curve = delta_curve(SymmetryClass.PLAIN, 36, table)
    vals = [v for _, v, _ in curve.rows]
    assert min(vals) < -0.01 and max(vals) > 0.01


def test_delta_curve_involution_shifts(tmp_path):
    t_inc = build_table(SymmetryClass.INVOLUTION_INC, 20, cache_dir=str(tmp_path))
    c = delta_curve(SymmetryClass.INVOLUTION_INC, 20, t_inc)
    assert c.beta == 4
    t_dec = build_table(SymmetryClass.INVOLUTION_DEC, 20, cache_dir=str(tmp_path))
    d = delta_curve(SymmetryClass.INVOLUTION_DEC, 20, t_dec)
    assert d.beta == 1
    # decreasing thresholds are even only
    ls = [round(t * 20 ** (1 / 6.0) + 2 * math.sqrt(20) - 1) for t, _, _ in d.rows]
    assert all(l % 2 == 0 for l in ls)


def test_delta_curve_empirical_source():
    cfg = SimConfig(trials=500, master_seed=9, symmetry=SymmetryClass.PLAIN, N=36)
    emp = run(cfg)
    curve = delta_curve(SymmetryClass.PLAIN, 36, emp)
    assert len(curve.rows) > 10
