"""Point estimates with 95% confidence intervals."""

from dataclasses import dataclass, replace
from math import sqrt

import numpy as np

Z95 = 1.959963984540054


@dataclass(frozen=True)
class Estimate:
    mean: float
    stderr: float
    lo: float
    hi: float
    trials: int
    seed: int = None
    method: str = "wilson"

    @property
    def half_width(self):
        return (self.hi - self.lo) / 2

    def overlaps(self, other):
        return self.lo <= other.hi and other.lo <= self.hi

    def with_seed(self, seed):
        return replace(self, seed=seed)

    def to_json(self):
        return {"mean": self.mean, "stderr": self.stderr, "ci95": [self.lo, self.hi],
                "trials": self.trials, "seed": self.seed, "method": self.method}


def wilson(successes, trials, seed=None, z=Z95):
    """Proportion estimate with the Wilson score interval."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    successes = int(successes)
    phat = successes / trials
    denom = 1 + z * z / trials
    mid = (phat + z * z / (2 * trials)) / denom
    half = z * sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    se = sqrt(phat * (1 - phat) / trials)
    lo, hi = max(0.0, mid - half), min(1.0, mid + half)
    # the score interval always contains phat; guard against rounding at 0 and 1
    return Estimate(phat, se, min(lo, phat), max(hi, phat), trials, seed, "wilson")


def mean_ci(samples, scale=1.0, seed=None, z=Z95):
    """Normal-approximation interval for the mean of ``samples`` times ``scale``."""
    x = np.asarray(samples, dtype=float) * scale
    n = len(x)
    if n < 1:
        raise ValueError("need at least one sample")
    m = float(x.mean())
    se = float(x.std(ddof=1) / sqrt(n)) if n > 1 else 0.0
    return Estimate(m, se, m - z * se, m + z * se, n, seed, "normal")
