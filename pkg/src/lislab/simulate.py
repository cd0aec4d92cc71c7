"""Monte Carlo engine for constrained subsequence statistics.

Uniform samplers for permutations, fixed-point-free involutions, and the
Poissonized (random-size) model; an O(N log N) longest-increasing-
subsequence routine with an O(N^2) dynamic-programming oracle; empirical
CDF accumulation over a fixed histogram window; and the N^{1/3}-scaled
difference curves against the limiting edge laws.

Randomness is counter-based and splittable: every trial draws from its
own generator keyed by (master_seed, trial index), so results are
bit-identical regardless of how trials are scheduled.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Union

import numpy as np

from .edgelaws import SOFT_T_RANGE, CorrectionCurve, Route, gap_soft
from .enumerate import ExactCdfTable, SymmetryClass

__all__ = [
    "SimConfig",
    "EmpiricalCdf",
    "trial_stream",
    "sample_permutation",
    "sample_fpf_involution",
    "sample_hammersley",
    "lis",
    "lds",
    "lis_dp_oracle",
    "run",
    "delta_curve",
    "histogram_window",
]


def trial_stream(master_seed: int, trial: int) -> np.random.Generator:
    """Independent generator for one trial, keyed by (master_seed, trial)."""
    bg = np.random.Philox(key=[np.uint64(master_seed & (2**64 - 1)), np.uint64(trial)])
    return np.random.Generator(bg)


# -- samplers --------------------------------------------------------------


def sample_permutation(N: int, stream: np.random.Generator) -> np.ndarray:
    """Uniform permutation of 1..N (shuffle with unbiased bounded draws)."""
    if N < 1:
        raise ValueError("N must be positive")
    return stream.permutation(N).astype(np.int64) + 1


def sample_fpf_involution(N: int, stream: np.random.Generator) -> np.ndarray:
    """Uniform fixed-point-free involution of 1..N, N even, rejection-free.

    Builds a uniform perfect matching: walk the elements pairing each
    next unpaired one with a uniform choice among the rest.  The pairing
    order does not affect the law (the partner choice is exchangeable),
    so the walk runs over array positions for O(N) cost.
    """
    if N < 2 or N % 2 == 1:
        raise ValueError("N must be even and >= 2")
    arr = np.arange(1, N + 1, dtype=np.int64)
    # partner offsets drawn in one vectorized call: at step i (0,2,4,...)
    # the partner is uniform among the N-1-i entries after position i
    highs = np.arange(N - 1, 0, -2, dtype=np.int64)
    draws = stream.integers(0, highs)
    out = np.empty(N, dtype=np.int64)
    for step, i in enumerate(range(0, N, 2)):
        j = i + 1 + int(draws[step])
        arr[i + 1], arr[j] = arr[j], arr[i + 1]
        a, b = int(arr[i]), int(arr[i + 1])
        out[a - 1] = b
        out[b - 1] = a
    # defining properties, checked on every sample
    idx = np.arange(1, N + 1, dtype=np.int64)
    if np.any(out == idx) or np.any(out[out - 1] != idx):
        raise AssertionError("sampler produced a non-involution or a fixed point")
    return out


def sample_hammersley(z: float, stream: np.random.Generator):
    """Random-size draw: N ~ Poisson(z^2), then the LIS of a uniform
    permutation of that size.  Returns (N, lis)."""
    if not z > 0.0:
        raise ValueError("z must be positive")
    N = int(stream.poisson(z * z))
    if N == 0:
        return 0, 0
    return N, _lis_values(sample_permutation(N, stream))


# -- subsequence lengths ---------------------------------------------------


def _check_permutation(perm: Sequence[int]) -> List[int]:
    seq = [int(x) for x in perm]
    n = len(seq)
    if n == 0 or min(seq) != 1 or max(seq) != n or len(set(seq)) != n:
        raise ValueError("input is not a permutation of 1..N")
    return seq


def _lis_values(seq) -> int:
    tails: List[int] = []
    for x in seq:
        i = bisect.bisect_left(tails, x)
        if i == len(tails):
            tails.append(x)
        else:
            tails[i] = x
    return len(tails)


def lis(perm: Sequence[int]) -> int:
    """Longest strictly increasing subsequence length, O(N log N)."""
    return _lis_values(_check_permutation(perm))


def lds(perm: Sequence[int]) -> int:
    """Longest strictly decreasing subsequence length."""
    return _lis_values(_check_permutation(perm)[::-1])


def lis_dp_oracle(perm: Sequence[int]) -> int:
    """Quadratic dynamic-programming evaluation, kept as an oracle."""
    seq = _check_permutation(perm)
    n = len(seq)
    best = [1] * n
    for i in range(n):
        si = seq[i]
        for j in range(i):
            if seq[j] < si and best[j] + 1 > best[i]:
                best[i] = best[j] + 1
    return max(best)


# -- configuration and empirical CDFs --------------------------------------


@dataclass(frozen=True)
class SimConfig:
    """One Monte Carlo run: either a fixed-size symmetry class or the
    random-size model (z set, symmetry None)."""

    trials: int
    master_seed: int
    symmetry: Optional[SymmetryClass] = None
    N: int = 0
    z: Optional[float] = None

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if (self.symmetry is None) == (self.z is None):
            raise ValueError("set exactly one of symmetry or z")
        if self.symmetry is not None:
            if self.N < 1:
                raise ValueError("N must be positive")
            if self.symmetry is not SymmetryClass.PLAIN and self.N % 2 == 1:
                raise ValueError("involution classes require even N")
        elif not self.z > 0.0:
            raise ValueError("z must be positive")

    @property
    def label(self) -> str:
        return "HAMMERSLEY" if self.z is not None else self.symmetry.value


def histogram_window(N: int):
    """Tracked threshold range [floor(2√N - 8N^{1/6}), ceil(2√N + 6N^{1/6})]."""
    c, s = 2.0 * math.sqrt(N), N ** (1.0 / 6.0)
    lo = max(0, int(math.floor(c - 8.0 * s)))
    hi = int(math.ceil(c + 6.0 * s))
    return lo, hi


@dataclass
class EmpiricalCdf:
    """Cumulative trial counts per threshold, plus the generating config.

    ``counts[l]`` is the number of trials whose statistic was <= l.
    Values outside the tracked window land in the two overflow bins at
    the window edges minus/plus one.
    """

    config: SimConfig
    counts: Dict[int, int]
    trials: int

    def __post_init__(self):
        keys = sorted(self.counts)
        vals = [self.counts[k] for k in keys]
        if any(b < a for a, b in zip(vals, vals[1:])):
            raise ValueError("cumulative counts must be nondecreasing")
        if keys and vals[-1] != self.trials:
            raise ValueError("top cumulative count must equal trials")

    def prob(self, l: int) -> float:
        keys = sorted(self.counts)
        if l < keys[0]:
            return 0.0
        if l > keys[-1]:
            return 1.0
        below = keys[bisect.bisect_right(keys, l) - 1]
        return self.counts[below] / self.trials

    def to_csv(self) -> str:
        cfg = self.config
        n_field = cfg.N if cfg.symmetry is not None else ""
        lines = ["l,count,cumulative,trials,seed,class,N"]
        prev = 0
        for l in sorted(self.counts):
            cum = self.counts[l]
            lines.append(
                f"{l},{cum - prev},{cum},{self.trials},"
                f"{cfg.master_seed},{cfg.label},{n_field}"
            )
            prev = cum
        return "\n".join(lines) + "\n"

    @classmethod
    def from_csv(cls, text: str) -> "EmpiricalCdf":
        lines = [ln for ln in text.strip().splitlines() if ln.strip()]
        counts: Dict[int, int] = {}
        trials = seed = 0
        label = ""
        n_val = 0
        for ln in lines[1:]:
            l_s, _, cum_s, tr_s, seed_s, label, n_s = ln.split(",")
            counts[int(l_s)] = int(cum_s)
            trials, seed = int(tr_s), int(seed_s)
            n_val = int(n_s) if n_s else 0
        if label == "HAMMERSLEY":
            cfg = SimConfig(trials=trials, master_seed=seed, z=1.0)
        else:
            cfg = SimConfig(
                trials=trials,
                master_seed=seed,
                symmetry=SymmetryClass(label),
                N=n_val,
            )
        return cls(cfg, counts, trials)


def run(config: SimConfig) -> EmpiricalCdf:
    """Execute all trials and return the empirical CDF.

    Deterministic for a given master seed: each trial's randomness comes
    only from its own (seed, index)-keyed stream and the histogram is a
    commutative reduction, so any scheduling yields identical output.
    """
    if config.z is not None:
        # window wide enough for the Poisson-size model around 2z
        n_eff = max(1, int(round(config.z**2)))
        lo, hi = histogram_window(4 * n_eff)
        lo = 0
    else:
        lo, hi = histogram_window(config.N)
    size = hi - lo + 3  # two overflow bins
    hist = np.zeros(size, dtype=np.int64)
    involution = config.symmetry in (
        SymmetryClass.INVOLUTION_INC,
        SymmetryClass.INVOLUTION_DEC,
    )
    for trial in range(config.trials):
        stream = trial_stream(config.master_seed, trial)
        if config.z is not None:
            _, value = sample_hammersley(config.z, stream)
        elif config.symmetry is SymmetryClass.PLAIN:
            value = _lis_values(sample_permutation(config.N, stream))
        else:
            p = sample_fpf_involution(config.N, stream)
            up = _lis_values(p)
            down = _lis_values(p[::-1])
            # defining property and the classical length floor, per sample
            if up * down < config.N:
                raise AssertionError("subsequence length floor violated")
            value = up if config.symmetry is SymmetryClass.INVOLUTION_INC else down
        idx = min(max(value - lo + 1, 0), size - 1)
        hist[idx] += 1
    cum = np.cumsum(hist)
    counts = {lo - 1 + k: int(cum[k]) for k in range(size)}
    return EmpiricalCdf(config, counts, config.trials)


# -- scaled difference curves ----------------------------------------------

_BETA_SHIFT = {
    SymmetryClass.PLAIN: (2, 0),
    SymmetryClass.INVOLUTION_DEC: (1, +1),
    SymmetryClass.INVOLUTION_INC: (4, -1),
}


def delta_curve(
    symmetry: SymmetryClass,
    N: int,
    source: Union[ExactCdfTable, EmpiricalCdf],
) -> CorrectionCurve:
    """N^{1/3}-scaled difference between the finite-N CDF and its limit.

    delta(l) = N^{1/3} [ Pr(statistic <= l) - E_beta^soft(t(l)) ] with
    t(l) = (l + shift - 2 sqrt(N)) / N^{1/6}; the shift is +1 for the
    decreasing-statistic family, -1 for the increasing one, 0 otherwise.
    Rows carry t as abscissa.  The curve's ``l`` field echoes N.
    """
    beta, shift = _BETA_SHIFT[symmetry]
    lo, hi = histogram_window(N)
    if isinstance(source, ExactCdfTable):
        prob = lambda l: float(source.prob_clamped(l))
    else:
        prob = source.prob
    step = 2 if symmetry is SymmetryClass.INVOLUTION_DEC else 1
    start = lo if (lo % 2 == 0 or step == 1) else lo + 1
    rows = []
    for l in range(start, hi + 1, step):
        t = (l + shift - 2.0 * math.sqrt(N)) / N ** (1.0 / 6.0)
        if t <= SOFT_T_RANGE[0]:
            limit = 0.0
        elif t >= SOFT_T_RANGE[1]:
            limit = 1.0
        else:
            limit = gap_soft(beta, t, Route.PAINLEVE)
        rows.append((t, N ** (1.0 / 3.0) * (prob(l) - limit), Route.PAINLEVE))
    return CorrectionCurve(beta=beta, l=N, rows=rows)
