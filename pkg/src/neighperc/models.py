"""Percolation laws: exact per-vertex distributions, samplers and the
appendix couplings.

A vertex outcome is a bitmask over the 2d out-directions (bit i set means
the edge in direction i is open); see :mod:`neighperc.lattice` for the
direction order.
"""

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from math import comb, floor

import numpy as np

from . import rng
from ._backend import kernels
from ._tables import AON, CORNER, IID, ISO, ISO_MASKS, NSEW, TWODP
from .lattice import DIR_NAMES, STEP, Edge, Window, dual_to_primal, unit


def as_fraction(x):
    """Exact rational from int, Fraction, decimal string or float (via its repr)."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


KINDS = ("2dp", "iid", "aon", "nsew", "corner", "iso")


@dataclass(frozen=True)
class ModelSpec:
    kind: str
    p: Fraction
    d: int = 2
    rho: Fraction = field(default=None)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown model kind {self.kind!r}")
        object.__setattr__(self, "p", as_fraction(self.p))
        if self.rho is not None:
            object.__setattr__(self, "rho", as_fraction(self.rho))
        if not 0 <= self.p <= 1:
            raise ValueError("p must lie in [0, 1]")
        if self.d < 1:
            raise ValueError("dimension must be at least 1")
        if self.kind in ("nsew", "corner", "iso") and self.d != 2:
            raise ValueError(f"{self.kind} is defined only for d = 2")
        if self.kind == "iso" and not 0 <= self.rho <= Fraction(1, 4):
            raise ValueError("rho must lie in [0, 1/4]")

    @property
    def k(self):
        deg = 2 * self.d if self.kind == "2dp" else 4
        return floor(deg * self.p)

    @property
    def eps(self):
        deg = 2 * self.d if self.kind == "2dp" else 4
        return deg * self.p - self.k

    def with_p(self, p):
        return ModelSpec(self.kind, p, self.d, self.rho)

    def label(self):
        if self.kind == "iso":
            return f"iso(rho={self.rho})"
        if self.kind == "2dp":
            return f"2dp(d={self.d}, p={self.p})"
        return f"{self.kind}(p={self.p})"

    def to_json(self):
        out = {"kind": self.kind, "p": fraction_str(self.p), "d": self.d}
        if self.rho is not None:
            out["rho"] = fraction_str(self.rho)
        return out


def fraction_str(q):
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def TwoDpNeighbor(d, p):
    return ModelSpec("2dp", p, d)


def TwoEps(eps):
    eps = as_fraction(eps)
    if eps < 0:
        raise ValueError("eps must be non-negative")
    return ModelSpec("2dp", Fraction(1, 2) + eps / 4, 2)


def IidDirected(p, d=2):
    return ModelSpec("iid", p, d)


def AllOrNone(p, d=2):
    return ModelSpec("aon", p, d)


def NsEw(p):
    return ModelSpec("nsew", p)


def Corner(p):
    return ModelSpec("corner", p)


def IsotropicDegreeTwo(rho):
    return ModelSpec("iso", Fraction(1, 2), 2, rho)


def mask_str(mask, d=2):
    """4-character debug form, e.g. ``EN--`` (d = 2 only)."""
    if d != 2:
        return format(mask, f"0{2 * d}b")[::-1]
    return "".join(DIR_NAMES[i] if mask >> i & 1 else "-" for i in range(4))


def _iso_masses(rho):
    psi = (1 - 4 * rho) / 2
    return (rho, rho, rho, rho, psi, psi)


def vertex_outcome_distribution(spec):
    """List of (mask, exact probability) over outcomes of positive mass."""
    m = 2 * spec.d
    dist = {}

    def add(mask, q):
        if q:
            dist[mask] = dist.get(mask, 0) + q

    if spec.kind == "2dp":
        k, eps = spec.k, spec.eps
        for size, mass in ((k, 1 - eps), (k + 1, eps)):
            if size > m:
                continue
            for sub in combinations(range(m), size):
                add(sum(1 << i for i in sub), mass / comb(m, size))
    elif spec.kind == "iid":
        for bits in product((0, 1), repeat=m):
            q = Fraction(1)
            for b in bits:
                q *= spec.p if b else 1 - spec.p
            add(sum(b << i for i, b in enumerate(bits)), q)
    elif spec.kind == "aon":
        add((1 << m) - 1, spec.p)
        add(0, 1 - spec.p)
    elif spec.kind in ("nsew", "corner"):
        # enumerate the staged sampler exactly
        k, eps = spec.k, spec.eps
        for first, side, coin, t in product(range(4), range(2), (0, 1), range(2)):
            q = Fraction(1, 16) * (eps if coin else 1 - eps)
            partner = (first + 2) % 4 if spec.kind == "nsew" else (first + 1 + 2 * side) % 4
            rest = [x for x in range(4) if x not in (first, partner)]
            chain = (first, partner, rest[t], rest[1 - t])
            mask = sum(1 << chain[i] for i in range(k))
            if k < 4 and coin:
                mask |= 1 << chain[k]
            add(mask, q)
    else:
        for mask, q in zip(ISO_MASKS, _iso_masses(spec.rho)):
            add(mask, q)
    out = sorted(dist.items())
    assert sum(q for _, q in out) == 1
    return out


def edge_marginal(spec, direction=0):
    return sum(q for mask, q in vertex_outcome_distribution(spec) if mask >> direction & 1)


def kernel_params(spec):
    """(code, d, k, eps, p, cum) tuple understood by the kernels."""
    code = {"2dp": TWODP, "iid": IID, "aon": AON, "nsew": NSEW,
            "corner": CORNER, "iso": ISO}[spec.kind]
    cum = (1.0,) * 6
    if spec.kind == "iso":
        acc, vals = Fraction(0), []
        for q in _iso_masses(spec.rho):
            acc += q
            vals.append(float(acc))
        cum = tuple(vals)
    k = spec.k if spec.kind in ("2dp", "nsew", "corner") else 0
    eps = float(spec.eps) if spec.kind in ("2dp", "nsew", "corner") else 0.0
    return code, spec.d, k, eps, float(spec.p), cum


@dataclass(frozen=True, eq=False)
class Configuration:
    """Outcomes of every vertex of ``window`` for one (seed, trial)."""

    spec: ModelSpec
    window: Window
    seed: int
    trial: int
    outcomes: np.ndarray

    def outcome(self, v):
        if v not in self.window:
            raise KeyError(f"{v} outside the window")
        return int(self.outcomes[self.window.rank(v)])

    def is_open(self, e):
        """Primal directed edge state."""
        return bool(self.outcome(e.tail) >> e.direction & 1)

    def dual_open(self, e):
        return not self.is_open(dual_to_primal(e))

    def open_edges(self):
        d = self.window.dim
        out = set()
        for v in self.window.vertices():
            m = self.outcome(v)
            for i in range(2 * d):
                if m >> i & 1:
                    out.add((v, i))
        return out

    def text(self):
        """One line per row (top row first), one 4-character mask per vertex."""
        if self.window.dim != 2:
            raise ValueError("text form is defined for d = 2")
        cx, cy = self.window.center
        n = self.window.radius
        rows = []
        for y in range(cy + n, cy - n - 1, -1):
            rows.append(" ".join(mask_str(self.outcome((x, y)))
                                 for x in range(cx - n, cx + n + 1)))
        return "\n".join(rows) + "\n"

    def __eq__(self, other):
        return (isinstance(other, Configuration) and self.spec == other.spec
                and self.window == other.window
                and np.array_equal(self.outcomes, other.outcomes))

    __hash__ = None


def sample_configuration(spec, window, seed, trial=0):
    if window.radius < 1:
        raise ValueError("window radius must be at least 1")
    if window.dim != spec.d:
        raise ValueError("window dimension does not match the model")
    lo = [c - window.radius for c in window.center]
    out = kernels.sample_box(*kernel_params(spec), seed, trial, lo, window.width)
    return Configuration(spec, window, seed, trial, out)


def sample_coupled_monotone(spec_lo, spec_hi, window, seed, trial=0):
    """Two configurations built from the same per-vertex permutation and coin."""
    if spec_lo.kind != "2dp" or spec_hi.kind != "2dp" or spec_lo.d != spec_hi.d:
        raise ValueError("monotone coupling needs two TwoDpNeighbor specs of equal d")
    if spec_lo.p > spec_hi.p:
        raise ValueError("p_lo must not exceed p_hi")
    return (sample_configuration(spec_lo, window, seed, trial),
            sample_configuration(spec_hi, window, seed, trial))


def aon_to_site(config):
    """Site field: a vertex is open iff all of its out-edges are open."""
    if config.spec.kind != "aon":
        raise ValueError("site correspondence needs an AllOrNone configuration")
    full = (1 << (2 * config.spec.d)) - 1
    return config.outcomes == full


@dataclass
class IidCoupling:
    directed: dict        # (vertex, direction) -> bool, every directed edge of the window
    bond: dict            # frozenset({x, y}) -> bool
    consulted: dict       # frozenset({x, y}) -> (vertex, direction) whose uniform was used
    forward_set: set      # directed forward set of o
    cluster: set          # undirected open cluster of o


def couple_iid_directed_undirected(p, window, seed, trial=0):
    """Build an undirected Bernoulli(p) field from the directed uniforms by
    exploring from the centre, reading each undirected edge's state from the
    directed edge it was first reached through."""
    p = float(as_fraction(p))
    key = rng.stream_key(seed, rng.DOMAIN_VERTEX, trial)
    uniforms = {}
    for v in window.vertices():
        site = rng.site_key(key, v)
        for i in range(4):
            uniforms[(v, i)] = rng.uniform(rng.draw(site, i))
    directed = {e: u < p for e, u in uniforms.items()}
    o = window.center
    cx, cy = o
    r = window.radius

    def inside(v):
        return abs(v[0] - cx) <= r and abs(v[1] - cy) <= r

    def interior(v):
        return abs(v[0] - cx) < r and abs(v[1] - cy) < r

    def step(v, i):
        return (v[0] + STEP[i][0], v[1] + STEP[i][1])

    bond, consulted = {}, {}
    seen = {o}
    todo = deque((o, i) for i in range(4))
    while todo:
        x, i = todo.popleft()
        y = step(x, i)
        if not inside(y) or not interior(x):
            continue
        key_e = frozenset((x, y))
        if key_e in bond:
            continue
        bond[key_e] = directed[(x, i)]
        consulted[key_e] = (x, i)
        if bond[key_e] and y not in seen:
            seen.add(y)
            # the new vertex's edges go first, counter-clockwise from east
            todo.extendleft((y, j) for j in (3, 2, 1, 0))
    # unexplored undirected edges take the uniform of their lower/left endpoint
    for v in window.vertices():
        for i in (0, 1):
            u = step(v, i)
            if inside(u):
                bond.setdefault(frozenset((v, u)), directed[(v, i)])

    def closure(nbrs):
        found, queue = {o}, deque([o])
        while queue:
            x = queue.popleft()
            if not interior(x):
                continue
            for y in nbrs(x):
                if y not in found:
                    found.add(y)
                    queue.append(y)
        return found

    fwd = closure(lambda x: [step(x, i) for i in range(4) if directed[(x, i)]])
    clu = closure(lambda x: [step(x, i) for i in range(4)
                             if bond.get(frozenset((x, step(x, i))), False)])
    return IidCoupling(directed, bond, consulted, fwd, clu)


__all__ = [
    "ModelSpec", "TwoDpNeighbor", "TwoEps", "IidDirected", "AllOrNone", "NsEw",
    "Corner", "IsotropicDegreeTwo", "Configuration", "vertex_outcome_distribution",
    "edge_marginal", "sample_configuration", "sample_coupled_monotone", "aon_to_site",
    "couple_iid_directed_undirected", "mask_str", "as_fraction", "kernel_params", "unit",
    "Edge",
]
