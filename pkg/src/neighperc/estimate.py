"""Monte Carlo estimates: survival, dual tails, critical-point brackets,
crossings, annulus cycles and model comparisons.

Every trial is a pure function of (inputs, master seed, trial index), so
results do not depend on how trials are split between threads.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._backend import kernels
from .constrained import constrained_connect, sample_bond
from .explore import first_cluster_sizes
from .lattice import Window
from .models import (AllOrNone, Corner, IidDirected, IsotropicDegreeTwo, NsEw, TwoDpNeighbor,
                     as_fraction, fraction_str, kernel_params)
from .stats import Estimate, wilson

CHUNK = 512


def run_trials(fn, trials, threads=1, trial0=0, chunk=CHUNK):
    """Evaluate ``fn(first_trial, count) -> array`` over ``trials`` trials in
    fixed chunks and concatenate in trial order."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    starts = list(range(trial0, trial0 + trials, chunk))
    sizes = [min(chunk, trial0 + trials - s) for s in starts]
    if threads <= 1 or len(starts) == 1:
        parts = [fn(s, c) for s, c in zip(starts, sizes)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(fn, starts, sizes))
    return np.concatenate(parts)


def survival_flags(spec, n, trials, seed, threads=1, trial0=0):
    params = kernel_params(spec)
    return run_trials(lambda s, c: kernels.escape_flags(*params, seed, s, c, n),
                      trials, threads, trial0)


def survival(spec, n, trials, seed, threads=1):
    """Fraction of trials whose forward set from the origin reaches the
    boundary of the radius-n box."""
    flags = survival_flags(spec, n, trials, seed, threads)
    return wilson(int(flags.sum()), trials, seed)


@dataclass(frozen=True)
class TailCurve:
    ns: tuple
    estimates: tuple

    def values(self):
        return np.array([e.mean for e in self.estimates])

    def non_increasing(self):
        v = self.values()
        return bool(np.all(np.diff(v) <= 0))

    def at(self, n):
        return self.estimates[self.ns.index(n)]

    def to_json(self):
        return [{"n": n, **e.to_json()} for n, e in zip(self.ns, self.estimates)]


def dual_sizes(spec, cap, trials, seed, threads=1):
    """Size of the dual forward set of the dual origin, capped at ``cap``."""
    if spec.d != 2:
        raise ValueError("dual forward sets are planar")
    code, _, k, eps, p, cum = kernel_params(spec)
    return run_trials(lambda s, c: kernels.dual_sizes(code, k, eps, p, cum, seed, s, c, cap, cap),
                      trials, threads)


def dual_tail(spec, n_max, trials, seed, threads=1):
    """Empirical P(|For(o*)| >= n) for n = 1..n_max."""
    sizes = dual_sizes(spec, n_max, trials, seed, threads)
    ns = tuple(range(1, n_max + 1))
    return TailCurve(ns, tuple(wilson(int(np.sum(sizes >= n)), trials, seed) for n in ns))


@dataclass(frozen=True)
class PcResult:
    lo: float
    hi: float
    n: int
    criterion: float
    trials: int
    seed: int
    probes: tuple          # (p, survival estimate) in probe order

    def contains(self, x, tol=0.0):
        return self.lo - tol <= x <= self.hi + tol

    def to_json(self):
        return {"bracket": [self.lo, self.hi], "n": self.n, "criterion": self.criterion,
                "trials": self.trials, "seed": self.seed,
                "probes": [{"p": p, **e.to_json()} for p, e in self.probes]}


def estimate_pc(family, n, trials, tol, seed, lo=0.0, hi=1.0, criterion=0.5, threads=1):
    """Bracket the p at which survival to the radius-n boundary crosses
    ``criterion``.  ``family`` is a ModelSpec whose p is varied.  All probes
    share the same trials, which makes survival monotone in p for the
    2dp and iid families."""
    lo, hi = float(lo), float(hi)
    if not lo < hi:
        raise ValueError("need lo < hi")
    probes = []

    def frac(p):
        est = survival(family.with_p(Fraction(repr(p))), n, trials, seed, threads)
        probes.append((p, est))
        return est.mean

    if frac(lo) >= criterion or frac(hi) < criterion:
        raise ValueError("initial interval does not bracket the survival criterion")
    while hi - lo > tol:
        mid = round((lo + hi) / 2, 12)
        if frac(mid) < criterion:
            lo = mid
        else:
            hi = mid
    return PcResult(lo, hi, n, criterion, trials, seed, tuple(probes))


def crossing(spec, L, trials, seed, threads=1):
    """Directed open left-right crossing of [0, 3L] x [0, L]."""
    if L < 2:
        raise ValueError("L must be at least 2")
    code, _, k, eps, p, cum = kernel_params(spec)
    flags = run_trials(lambda s, c: kernels.crossing_flags(code, k, eps, p, cum, seed, s, c, L),
                       trials, threads)
    return wilson(int(flags.sum()), trials, seed)


@dataclass(frozen=True)
class AnnulusResult:
    exact: Estimate
    glue: Estimate
    glue_without_cycle: int      # pathwise violations of glue <= exact

    def to_json(self):
        return {"exact": self.exact.to_json(), "glue": self.glue.to_json(),
                "glue_without_cycle": self.glue_without_cycle}


def annulus_flags(spec, L, trials, seed, threads=1):
    if L < 2:
        raise ValueError("L must be at least 2")
    code, _, k, eps, p, cum = kernel_params(spec)
    return run_trials(lambda s, c: kernels.annulus_flags(code, k, eps, p, cum, seed, s, c, L),
                      trials, threads)


def annulus_cycle(spec, L, trials, seed, threads=1):
    """Open directed cycle around the origin inside the annulus
    L/2 < |v| <= 3L/2, exactly, plus the four-rectangle glue event."""
    f = annulus_flags(spec, L, trials, seed, threads)
    return AnnulusResult(wilson(int(f[:, 0].sum()), trials, seed),
                         wilson(int(f[:, 1].sum()), trials, seed),
                         int(np.sum((f[:, 1] == 1) & (f[:, 0] == 0))))


def comparison_specs(p=Fraction(1, 2)):
    p = as_fraction(p)
    return (("nsew", NsEw(p)), ("2dp", TwoDpNeighbor(2, p)), ("corner", Corner(p)),
            ("iid", IidDirected(p)), ("aon", AllOrNone(p)))


def theta_comparison(n, trials, seed, p=Fraction(1, 2), threads=1):
    """Survival estimates of the degree-two-level models, in the order
    ns-ew, 2-neighbour, corner, iid, all-or-none."""
    return [(name, survival(spec, n, trials, seed, threads))
            for name, spec in comparison_specs(p)]


def theta_vs_rho(rhos, n, trials, seed, threads=1):
    out = []
    for rho in rhos:
        rho = as_fraction(rho)
        out.append((rho, survival(IsotropicDegreeTwo(rho), n, trials, seed, threads)))
    return out


def constrained_survival_flags(q, n, trials, seed, trial0=0):
    """Pattern-avoiding connection of the origin to the boundary of the
    radius-n box in Bernoulli(q) bond percolation, per trial."""
    win = Window((0, 0), n)
    return np.array([constrained_connect(sample_bond(q, win, seed, t), (0, 0), n) is not None
                     for t in range(trial0, trial0 + trials)], dtype=np.uint8)


@dataclass(frozen=True)
class DominationRow:
    n: int
    cluster: Estimate      # P(|Cl_1| >= n) in the (2, 0) model
    bond: Estimate         # P(o* -> boundary without pattern) at q = 1/2

    @property
    def holds(self):
        return self.cluster.mean <= self.bond.mean + self.cluster.half_width + self.bond.half_width

    def to_json(self):
        return {"n": self.n, "cluster": self.cluster.to_json(), "bond": self.bond.to_json(),
                "holds": self.holds}


def domination_check(ns, trials, seed):
    from .models import TwoEps
    rows = []
    for n in ns:
        sizes = first_cluster_sizes(TwoEps(0), n, trials, seed)
        bond = constrained_survival_flags(Fraction(1, 2), n, trials, seed)
        rows.append(DominationRow(n, wilson(int(np.sum(sizes >= n)), trials, seed),
                                  wilson(int(bond.sum()), trials, seed)))
    return rows


__all__ = [
    "survival", "survival_flags", "dual_tail", "dual_sizes", "TailCurve", "PcResult",
    "estimate_pc", "crossing", "annulus_cycle", "AnnulusResult", "theta_comparison",
    "theta_vs_rho", "comparison_specs", "run_trials", "constrained_survival_flags",
    "domination_check", "DominationRow", "Estimate", "fraction_str",
]
