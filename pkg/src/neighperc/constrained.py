"""Undirected Bernoulli bond percolation with the two forbidden patterns, and
pattern-avoiding connectivity.

Edges are named ``(x, y, o)``: orientation 0 is the edge from (x, y) to
(x+1, y), orientation 1 the edge from (x, y) to (x, y+1).
"""

from collections import deque
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import rng
from ._backend import kernels
from .lattice import Window
from .models import as_fraction

HORIZONTAL_TRAIL = ((0, 0), (0, 1), (1, 1), (1, 0), (2, 0), (2, 1))
HORIZONTAL_CLOSED = ((0, 0, 0), (1, 1, 0))
VERTICAL_TRAIL = ((0, 0), (-1, 0), (-1, 1), (0, 1), (0, 2), (-1, 2))
VERTICAL_CLOSED = ((0, 0, 1), (-1, 1, 1))


class Shape(Enum):
    HORIZONTAL = "Horizontal"
    VERTICAL = "Vertical"


def edge_id(u, v):
    """Canonical ``(x, y, o)`` name of the undirected edge {u, v}."""
    (x1, y1), (x2, y2) = sorted((tuple(u), tuple(v)))
    if (x2 - x1, y2 - y1) == (1, 0):
        return (x1, y1, 0)
    if (x2 - x1, y2 - y1) == (0, 1):
        return (x1, y1, 1)
    raise ValueError(f"{u} and {v} are not nearest neighbours")


def edge_ends(e):
    x, y, o = e
    return (x, y), ((x + 1, y) if o == 0 else (x, y + 1))


@dataclass(frozen=True)
class PatternInstance:
    shape: Shape
    anchor: tuple

    def __post_init__(self):
        object.__setattr__(self, "shape", Shape(self.shape))
        object.__setattr__(self, "anchor", tuple(self.anchor))

    def trail(self):
        base = HORIZONTAL_TRAIL if self.shape is Shape.HORIZONTAL else VERTICAL_TRAIL
        a, b = self.anchor
        return tuple((a + x, b + y) for x, y in base)

    def trail_edges(self):
        t = self.trail()
        return tuple(edge_id(t[i], t[i + 1]) for i in range(5))

    def closed_pair(self):
        base = HORIZONTAL_CLOSED if self.shape is Shape.HORIZONTAL else VERTICAL_CLOSED
        a, b = self.anchor
        return tuple((a + x, b + y, o) for x, y, o in base)

    def diagonal(self):
        """Endpoints of the associated diagonal edge (trail start, trail end)."""
        t = self.trail()
        return t[0], t[-1]


@dataclass(frozen=True, eq=False)
class BondConfig:
    """Open/closed state of every undirected edge with both ends in ``window``.

    ``h[r]`` and ``v[r]`` hold the edges east and north of the vertex of rank r
    (zero where that edge leaves the window).
    """

    window: Window
    h: np.ndarray
    v: np.ndarray
    q: object = None
    seed: int = None
    trial: int = 0

    def __contains__(self, e):
        a, b = edge_ends(e)
        return a in self.window and b in self.window

    def is_open(self, e):
        if e not in self:
            raise KeyError(f"edge {e} is not inside the window")
        x, y, o = e
        return bool((self.h if o == 0 else self.v)[self.window.rank((x, y))])

    def open_between(self, u, v):
        return self.is_open(edge_id(u, v))

    def edges(self):
        for x, y in self.window.vertices():
            for o in (0, 1):
                e = (x, y, o)
                if e in self:
                    yield e

    def with_edges(self, states):
        """Copy with the given ``{edge: bool}`` states applied."""
        h, v = self.h.copy(), self.v.copy()
        for e, s in states.items():
            if e not in self:
                raise KeyError(f"edge {e} is not inside the window")
            x, y, o = e
            (h if o == 0 else v)[self.window.rank((x, y))] = bool(s)
        return BondConfig(self.window, h, v, self.q, self.seed, self.trial)

    def __eq__(self, other):
        return (isinstance(other, BondConfig) and self.window == other.window
                and np.array_equal(self.h, other.h) and np.array_equal(self.v, other.v))

    __hash__ = None


def _edge_mask(window):
    w = window.width
    col = np.arange(w * w) % w
    row = np.arange(w * w) // w
    return col < w - 1, row < w - 1


def bond_uniforms(window, seed, trial=0):
    """Per-edge uniforms (east, north) keyed by absolute coordinates."""
    if window.dim != 2:
        raise ValueError("bond percolation is planar")
    lo_x, lo_y = (c - window.radius for c in window.center)
    return kernels.edge_uniforms(seed, rng.DOMAIN_BOND, trial, lo_x, lo_y, window.width)


def bond_from_uniforms(window, uh, uv, q, seed=None, trial=0):
    qf = float(as_fraction(q))
    mh, mv = _edge_mask(window)
    h = ((uh < qf) & mh).astype(np.uint8)
    v = ((uv < qf) & mv).astype(np.uint8)
    return BondConfig(window, h, v, as_fraction(q), seed, trial)


def sample_bond(q, window, seed, trial=0):
    q = as_fraction(q)
    if not 0 <= q <= 1:
        raise ValueError("q must lie in [0, 1]")
    uh, uv = bond_uniforms(window, seed, trial)
    return bond_from_uniforms(window, uh, uv, q, seed, trial)


def bond_from_edges(window, open_edges):
    """Configuration whose open edges are exactly ``open_edges``."""
    w = window.width
    h = np.zeros(w * w, dtype=np.uint8)
    v = np.zeros(w * w, dtype=np.uint8)
    cfg = BondConfig(window, h, v)
    return cfg.with_edges({e: True for e in open_edges})


def _check_inside(config, inst):
    for e in inst.trail_edges() + inst.closed_pair():
        if e not in config:
            raise ValueError(f"pattern instance {inst} is not inside the window")


def pattern_occurs(config, inst):
    _check_inside(config, inst)
    return (all(config.is_open(e) for e in inst.trail_edges())
            and not any(config.is_open(e) for e in inst.closed_pair()))


def _instances_at(start, end):
    """Instances whose trail runs between ``start`` and ``end`` in some direction."""
    out = []
    for shape, base in ((Shape.HORIZONTAL, HORIZONTAL_TRAIL), (Shape.VERTICAL, VERTICAL_TRAIL)):
        ex, ey = base[-1]
        out.append(PatternInstance(shape, start))
        out.append(PatternInstance(shape, (start[0] - ex, start[1] - ey)))
    return out


def path_uses_pattern(path, config):
    path = [tuple(p) for p in path]
    edges = [edge_id(path[i], path[i + 1]) for i in range(len(path) - 1)]
    for e in edges:
        if not config.is_open(e):
            raise ValueError(f"path edge {e} is closed")
    for i in range(len(edges) - 4):
        window = set(edges[i:i + 5])
        for inst in _instances_at(path[i], path[i + 5]):
            if set(inst.trail_edges()) != window:
                continue
            if all(e in config for e in inst.closed_pair()) and \
                    not any(config.is_open(e) for e in inst.closed_pair()):
                return True
    return False


def sub_arrays(config, center, n):
    """(h, v) arrays of the box of radius ``n`` around ``center``, with edges
    leaving that box removed."""
    cw = config.window
    if Window(center, n).norm(cw.center) + n > cw.radius:
        raise ValueError("configuration does not cover the requested box")
    w = cw.width
    x0 = center[0] - n - cw.center[0] + cw.radius
    y0 = center[1] - n - cw.center[1] + cw.radius
    s = 2 * n + 1
    h = config.h.reshape(w, w)[y0:y0 + s, x0:x0 + s].copy()
    v = config.v.reshape(w, w)[y0:y0 + s, x0:x0 + s].copy()
    h[:, -1] = 0
    v[-1, :] = 0
    return np.ascontiguousarray(h).reshape(-1), np.ascontiguousarray(v).reshape(-1)


_SEARCHERS = {}


def searcher(n):
    s = _SEARCHERS.get(n)
    if s is None:
        s = _SEARCHERS[n] = kernels.Searcher(n)
    return s


def constrained_connect(config, source, n):
    """Open pattern-avoiding path from ``source`` to the boundary of the box
    of radius ``n`` around it, as a list of vertices, or None."""
    source = tuple(source)
    if not config.window.interior(source):
        raise ValueError("source must be an interior vertex")
    if n < 1:
        raise ValueError("n must be at least 1")
    h, v = sub_arrays(config, source, n)
    found, ranks, _ = searcher(n).run(h, v)
    if not found:
        return None
    box = Window(source, n)
    return [box.vertex(int(r)) for r in ranks]


def bond_connect(config, source, n):
    """Plain (unconstrained) connectivity from ``source`` to the boundary of
    the box of radius ``n`` around it."""
    source = tuple(source)
    box = Window(source, n)
    seen, queue = {source}, deque([source])
    while queue:
        x = queue.popleft()
        if box.on_boundary(x):
            return True
        for y in ((x[0] + 1, x[1]), (x[0], x[1] + 1), (x[0] - 1, x[1]), (x[0], x[1] - 1)):
            if y not in seen and config.open_between(x, y):
                seen.add(y)
                queue.append(y)
    return False


__all__ = [
    "Shape", "PatternInstance", "BondConfig", "sample_bond", "bond_from_edges",
    "pattern_occurs", "path_uses_pattern", "constrained_connect", "bond_connect",
    "edge_id", "edge_ends", "bond_uniforms", "bond_from_uniforms",
]
