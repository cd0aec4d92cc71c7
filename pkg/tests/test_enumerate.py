"""Exact tables: oracle equality, integrality, Poissonization, caching."""

import math

import pytest
from gmpy2 import mpq

from lislab.edgelaws import Route, gap_hard
from lislab.enumerate import (
    ExactCdfTable,
    SymmetryClass,
    build_table,
    enumerate_involution,
    enumerate_plain,
    longest_increasing,
    oracle_bruteforce,
    oracle_hook_length,
    poissonized_cdf,
    total_objects,
)


# -- plain sector ----------------------------------------------------------


def test_single_letter():
    assert enumerate_plain(1, 1) == [1, 1]


def test_three_letters_threshold_two():
    # all of S_3 except the identity avoids an increasing run of 3
    assert enumerate_plain(3, 2)[3] == 5


def test_worked_eight_letter_example():
    perm = (2, 5, 6, 8, 7, 3, 4, 1)
    assert longest_increasing(perm) == 4
    # the permutation therefore sits inside the threshold-4 count
    assert enumerate_plain(8, 4)[8] >= 1
    assert enumerate_plain(8, 3)[8] < enumerate_plain(8, 4)[8]


@pytest.mark.parametrize("N", [4, 6, 8])
def test_plain_matches_bruteforce(N):
    bf = oracle_bruteforce(N, SymmetryClass.PLAIN)
    for l in range(1, N + 1):
        assert enumerate_plain(N, l)[N] == bf.counts[l], (N, l)


def test_plain_matches_hook_length_oracle():
    for N, l in [(3, 2), (12, 3), (20, 5), (30, 11)]:
        assert enumerate_plain(N, l)[N] == oracle_hook_length(N, l), (N, l)


def test_hook_length_unrestricted_is_factorial():
    for N in (5, 9):
        assert oracle_hook_length(N, N) == total_objects(SymmetryClass.PLAIN, N)


def test_plain_monotone_in_l():
    vals = [enumerate_plain(10, l)[10] for l in range(1, 11)]
    assert all(b >= a for a, b in zip(vals, vals[1:]))
    assert vals[-1] == total_objects(SymmetryClass.PLAIN, 10)


# -- involution sectors ----------------------------------------------------


def test_two_letter_involution():
    # the single fixed-point-free involution (2,1) has LIS 1
    for l in (1, 2):
        assert enumerate_involution(2, l, SymmetryClass.INVOLUTION_INC)[2] == 1


@pytest.mark.parametrize(
    "symmetry", [SymmetryClass.INVOLUTION_INC, SymmetryClass.INVOLUTION_DEC]
)
@pytest.mark.parametrize("N", [4, 6, 8, 10])
def test_involutions_match_bruteforce(symmetry, N):
    bf = oracle_bruteforce(N, symmetry)
    step = 2 if symmetry is SymmetryClass.INVOLUTION_DEC else 1
    for l in range(step, N + 1, step):
        assert enumerate_involution(N, l, symmetry)[N] == bf.counts[l], (N, l)


def test_involution_odd_sizes_empty():
    col = enumerate_involution(9, 4, SymmetryClass.INVOLUTION_INC)
    assert col[1] == col[3] == col[5] == col[7] == col[9] == 0


def test_decreasing_requires_even_threshold():
    with pytest.raises(ValueError):
        enumerate_involution(6, 3, SymmetryClass.INVOLUTION_DEC)


def test_decreasing_statistic_is_even():
    # a fixed-point-free involution always has even LDS, so consecutive
    # even thresholds already exhaust the distribution
    bf = oracle_bruteforce(8, SymmetryClass.INVOLUTION_DEC)
    for l in range(1, 8, 2):
        assert bf.counts[l] == bf.counts[l - 1]


# -- Poissonization --------------------------------------------------------


@pytest.mark.parametrize("z,l", [(1.0, 4), (2.0, 6), (2.0, 10)])
def test_poissonized_cdf_matches_hard_gap(z, l):
    n_max = int(4 * z * z + 40)
    counts = enumerate_plain(n_max, l)
    lhs = poissonized_cdf(z, counts)
    rhs = gap_hard(2, 4.0 * z * z, l, Route.PAINLEVE)
    assert abs(lhs - rhs) < 1e-10


# -- tables and caching ----------------------------------------------------


def test_table_invariants_enforced():
    with pytest.raises(ValueError):
        ExactCdfTable(SymmetryClass.PLAIN, 3, {0: 1})
    with pytest.raises(ValueError):
        ExactCdfTable(SymmetryClass.PLAIN, 3, {1: 5, 2: 4})
    with pytest.raises(ValueError):
        ExactCdfTable(SymmetryClass.PLAIN, 3, {3: 5})
    with pytest.raises(ValueError):
        ExactCdfTable(SymmetryClass.INVOLUTION_INC, 5, {})


def test_table_text_roundtrip():
    t = oracle_bruteforce(6, SymmetryClass.INVOLUTION_INC)
    back = ExactCdfTable.from_text(t.to_text())
    assert back.symmetry is t.symmetry and back.N == t.N and back.counts == t.counts


def test_prob_clamped_window():
    t = ExactCdfTable(SymmetryClass.PLAIN, 6, {0: 0, 3: 513, 4: 675})
    assert t.prob_clamped(1) == 0
    assert t.prob_clamped(10) == 1
    assert t.prob_clamped(3) == mpq(513, 720)


def test_build_table_cache_roundtrip(tmp_path):
    d = str(tmp_path)
    t1 = build_table(SymmetryClass.PLAIN, 6, cache_dir=d)
    t2 = build_table(SymmetryClass.PLAIN, 6, cache_dir=d)  # cache hit
    assert t1.counts == t2.counts
    bf = oracle_bruteforce(6, SymmetryClass.PLAIN)
    assert {l: t1.counts[l] for l in bf.counts} == bf.counts


def test_build_table_window_extension(tmp_path):
    d = str(tmp_path)
    t1 = build_table(SymmetryClass.INVOLUTION_DEC, 8, l_values=[0, 4], cache_dir=d)
    t2 = build_table(
        SymmetryClass.INVOLUTION_DEC, 8, l_values=[0, 4, 6], cache_dir=d
    )
    assert t1.counts[4] == t2.counts[4]
    assert set(t2.counts) == {0, 4, 6}


def test_total_objects():
    assert total_objects(SymmetryClass.PLAIN, 5) == 120
    assert total_objects(SymmetryClass.INVOLUTION_INC, 6) == 15
    assert total_objects(SymmetryClass.INVOLUTION_DEC, 5) == 0
