"""Forward sets and the dual exploration with its pivotal-edge structure."""

from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

import numpy as np

from ._backend import kernels
from .lattice import (STEP, Edge, Window, Winding, dual_to_primal, fill, primal_to_dual,
                      rot_ccw, square_siblings, winding_class)


class Termination(Enum):
    STOPPED = "Stopped"
    ESCAPED = "WindowEscaped"


def forward_set(config, x, window, dual=False):
    """Vertices reachable from ``x`` by open directed edges, not expanding
    past the boundary of ``window``.  With ``dual=True`` the walk uses dual
    edges (open iff their primal edge is closed).  Returns (set, escaped)."""
    x = tuple(x)
    if x not in window:
        raise ValueError(f"{x} is outside the window")
    d = window.dim
    seen = {x}
    queue = deque([x])
    escaped = False
    while queue:
        v = queue.popleft()
        if window.on_boundary(v):
            escaped = True
            continue
        if dual:
            nbrs = [Edge(v, i).head for i in range(4) if config.dual_open(Edge(v, i))]
        else:
            m = config.outcome(v)
            nbrs = []
            for i in range(2 * d):
                if m >> i & 1:
                    u = list(v)
                    u[i % d] += 1 if i < d else -1
                    nbrs.append(tuple(u))
        for u in nbrs:
            if u not in seen:
                seen.add(u)
                queue.append(u)
    return seen, escaped


@dataclass(frozen=True)
class Step:
    index: int
    edge: Edge
    open: bool


@dataclass(frozen=True)
class PivotalEvent:
    step: int
    edge: Edge
    open: bool
    auto_open: bool
    list_length: int


@dataclass
class ExplorationRecord:
    start: tuple
    window: Window
    steps: list
    revealed: dict            # dual Edge -> open?
    visited: set
    pivotal_events: list
    clusters: list            # Cl_1, Cl_2, ... as sets of dual vertices
    termination: Termination
    discovered_by: dict = field(default_factory=dict)   # vertex -> step index of its open edge
    list_lengths: list = field(default_factory=list)     # list length before each pop

    @property
    def pivotal_times(self):
        return [ev.step for ev in self.pivotal_events]

    @property
    def t_piv(self):
        """Number of open pivotal edges."""
        return sum(ev.open for ev in self.pivotal_events)

    def open_triples(self):
        """Consecutive open-edge triples along the exploration tree."""
        for v, n in self.discovered_by.items():
            e3 = self.steps[n].edge
            n2 = self.discovered_by.get(e3.tail)
            if n2 is None:
                continue
            e2 = self.steps[n2].edge
            n1 = self.discovered_by.get(e2.tail)
            if n1 is None:
                continue
            yield self.steps[n1].edge, e2, e3

    def to_json(self):
        def ej(e):
            return {"tail": list(e.tail), "dir": "ENWS"[e.direction]}
        return {
            "start": list(self.start),
            "radius": self.window.radius,
            "termination": self.termination.value,
            "steps": [{"n": s.index, **ej(s.edge), "open": s.open} for s in self.steps],
            "pivotal_events": [{"step": ev.step, **ej(ev.edge), "open": ev.open,
                                "auto_open": ev.auto_open, "list_length": ev.list_length}
                               for ev in self.pivotal_events],
            "clusters": [sorted(map(list, c)) for c in self.clusters],
        }


def primal_block(config, center, radius):
    """Outcome array of the primal box of ``radius`` around ``center``."""
    cw = config.window
    lo = (center[0] - radius - cw.center[0] + cw.radius,
          center[1] - radius - cw.center[1] + cw.radius)
    w = 2 * radius + 1
    if min(lo) < 0 or lo[0] + w > cw.width or lo[1] + w > cw.width:
        raise ValueError("configuration does not cover the exploration window")
    grid = config.outcomes.reshape(cw.width, cw.width)
    return np.ascontiguousarray(grid[lo[1]:lo[1] + w, lo[0]:lo[0] + w]).reshape(-1)


def _is_corner_half(spec):
    return spec.kind == "corner" and spec.p == Fraction(1, 2)


def explore_dual_forward(config, xstar, window):
    """Run the dual exploration from ``xstar`` inside the dual ``window``.

    ``config`` must cover the primal box of radius ``window.radius + 1``
    around ``window.center``.
    """
    c = window.center
    xstar = tuple(xstar)
    if window.norm(xstar) >= window.radius:
        raise ValueError("start vertex must be an interior vertex of the window")
    block = primal_block(config, c, window.radius + 1)
    steps_a, visits_a, escaped = kernels.explore(
        block, window.radius, xstar[0] - c[0], xstar[1] - c[1], _is_corner_half(config.spec))
    return _record(steps_a, visits_a, escaped, xstar, window)


def _record(steps_a, visits_a, escaped, xstar, window):
    cx, cy = window.center
    steps, revealed, events, lengths = [], {}, [], []
    for n, (a, b, dd, op, piv, auto, length) in enumerate(steps_a.tolist()):
        e = Edge((a + cx, b + cy), dd)
        steps.append(Step(n, e, bool(op)))
        revealed[e] = bool(op)
        lengths.append(length)
        if piv:
            events.append(PivotalEvent(n, e, bool(op), bool(auto), length))
    visited, discovered, clusters = set(), {}, {}
    for a, b, cl, n in visits_a.tolist():
        v = (a + cx, b + cy)
        visited.add(v)
        clusters.setdefault(cl, set()).add(v)
        if n >= 0:
            discovered[v] = n
    return ExplorationRecord(
        start=xstar, window=window, steps=steps, revealed=revealed, visited=visited,
        pivotal_events=events, clusters=[clusters[k] for k in sorted(clusters)],
        termination=Termination.ESCAPED if escaped else Termination.STOPPED,
        discovered_by=discovered, list_lengths=lengths)


def is_pivotal(history, e):
    """``history`` maps revealed dual edges to their state (True = open)."""
    if e in history:
        raise ValueError("edge already revealed")
    return any(history.get(s) is False for s in square_siblings(e))


def classify_auto_open(history, e, spec):
    if not _is_corner_half(spec):
        raise ValueError("auto-open classification applies to Corner{1/2}")
    if not is_pivotal(history, e):
        return False
    west = square_siblings(e)[1]
    return history.get(west) is False


def decompose(record):
    return [set(c) for c in record.clusters]


def left_windings(record):
    return sum(winding_class(*t) is Winding.LEFT for t in record.open_triples())


def sandwich_holds(record, forward):
    """ExFor within For within Fill(ExFor)."""
    ex = record.visited
    return ex <= forward and forward <= fill(ex)


def _left_winding_count(steps_a, visits_a, radius):
    """Open triples e1, e2, e3 along the exploration tree turning left twice."""
    w = 2 * radius + 1
    disc = np.full(w * w, -1, dtype=np.int64)
    ranks = (visits_a[:, 1] + radius) * w + visits_a[:, 0] + radius
    disc[ranks] = visits_a[:, 3]
    s3 = visits_a[visits_a[:, 3] >= 0, 3]
    if len(s3) == 0:
        return 0
    tail = lambda s: disc[(steps_a[s, 1] + radius) * w + steps_a[s, 0] + radius]
    s2 = tail(s3)
    keep = s2 >= 0
    s3, s2 = s3[keep], s2[keep]
    s1 = tail(s2)
    keep = s1 >= 0
    s3, s2, s1 = s3[keep], s2[keep], s1[keep]
    d1, d2, d3 = steps_a[s1, 2], steps_a[s2, 2], steps_a[s3, 2]
    return int(np.sum(((d2 - d1) % 4 == 1) & ((d3 - d2) % 4 == 1)))


def invariant_suite(runs, radius, seed, spec=None, trial0=0, max_n=8):
    """Check the exploration invariants over ``runs`` independent runs from
    the dual origin.  Returns a dict of counts; ``tpiv_tail[n-1]`` is the
    number of runs with at least n open pivotal edges before termination."""
    from .models import TwoEps, kernel_params
    spec = TwoEps(0) if spec is None else spec
    params = kernel_params(spec)
    pr = radius + 1
    w = 2 * radius + 1
    out = {"runs": runs, "radius": radius, "stopped": 0, "escaped": 0,
           "sandwich_violations": 0, "pivotal_reveals": 0, "list_length_violations": 0,
           "left_windings": 0, "tpiv_tail": [0] * max_n, "tpiv_tail_escaped": [0] * max_n}
    auto = _is_corner_half(spec)
    for t in range(trial0, trial0 + runs):
        block = kernels.sample_box(*params, seed, t, [-pr, -pr], 2 * pr + 1)
        steps_a, visits_a, escaped = kernels.explore(block, radius, 0, 0, auto)
        piv = steps_a[:, 4] == 1
        out["pivotal_reveals"] += int(piv.sum())
        out["list_length_violations"] += int(np.sum(steps_a[piv, 6] != 1))
        out["left_windings"] += _left_winding_count(steps_a, visits_a, radius)
        tp = int(np.sum(piv & (steps_a[:, 3] == 1)))
        for n in range(1, max_n + 1):
            if tp >= n:
                out["tpiv_tail"][n - 1] += 1
            if tp >= n or escaped:
                out["tpiv_tail_escaped"][n - 1] += 1
        if escaped:
            out["escaped"] += 1
            continue
        out["stopped"] += 1
        fwd, _ = kernels.dual_forward(block, radius, 0, 0)
        ex = np.unique((visits_a[:, 1] + radius) * w + visits_a[:, 0] + radius)
        if not np.all(np.isin(ex, fwd)):
            out["sandwich_violations"] += 1
            continue
        extra = np.setdiff1d(fwd, ex)
        if len(extra):
            filled = fill({(int(r % w) - radius, int(r // w) - radius) for r in ex})
            if any((int(r % w) - radius, int(r // w) - radius) not in filled for r in extra):
                out["sandwich_violations"] += 1
    return out


def first_cluster_sizes(spec, n, trials, seed, trial0=0):
    """|Cl_1| of the dual exploration from the origin, capped at ``n``.

    Cl_1 is the set of tails of the edges revealed up to and including the
    first pivotal step.  The window has radius n + 1, so a run that escapes
    before any pivotal step has at least n tails and counts as n.
    """
    from .models import kernel_params
    params = kernel_params(spec)
    radius = n + 1
    pr = radius + 1
    out = np.zeros(trials, dtype=np.int64)
    for i in range(trials):
        block = kernels.sample_box(*params, seed, trial0 + i, [-pr, -pr], 2 * pr + 1)
        steps_a, visits_a, escaped = kernels.explore(block, radius, 0, 0, False)
        piv = np.flatnonzero(steps_a[:, 4])
        stop = piv[0] + 1 if len(piv) else len(steps_a)
        if escaped and not len(piv):
            out[i] = n
            continue
        tails = np.unique(steps_a[:stop, 1] * (4 * radius + 3) + steps_a[:stop, 0])
        out[i] = min(len(tails), n)
    return out


__all__ = [
    "Termination", "forward_set", "ExplorationRecord", "Step", "PivotalEvent",
    "explore_dual_forward", "is_pivotal", "classify_auto_open", "decompose",
    "left_windings", "sandwich_holds", "primal_block", "primal_to_dual", "dual_to_primal",
    "rot_ccw", "STEP", "invariant_suite", "first_cluster_sizes",
]
