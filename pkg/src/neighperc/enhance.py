"""The enhanced two-parameter model: diagonal q-edges that bypass forbidden
patterns, pivotality, and Russo-formula derivative estimates.

Edges are referenced as ``("p", (x, y, o))`` for lattice edges (see
:mod:`neighperc.constrained`) and ``("q", (x, y, s))`` for diagonals, where
s = 0 is the diagonal from (x, y) to (x+2, y+1) and s = 1 the diagonal from
(x, y) to (x-1, y+2).  The anchor (x, y) is the start of the associated
forbidden trail.
"""

from dataclasses import dataclass

import numpy as np

from . import rng
from ._backend import kernels
from ._tables import WORD_INDEX, WORDS, word_code
from .constrained import (BondConfig, PatternInstance, Shape, bond_connect, bond_uniforms,
                          edge_ends, edge_id, searcher)
from .lattice import STEP, Window
from .models import as_fraction
from .stats import Estimate, mean_ci, wilson

DIAG_STEP = ((2, 1), (-1, 2))
MAX_RUSSO_RADIUS = 16

# lattice edges at the origin whose pattern contains o away from its ends
I_BAD = frozenset(edge_id(u, v) for u, v in (
    ((0, -1), (0, 0)), ((-1, -1), (-1, 0)), ((-1, 0), (-1, 1)), ((-2, 0), (-2, 1)),
    ((0, 0), (1, 0)), ((0, -1), (1, -1)), ((-1, -1), (-1, 0)), ((-2, -1), (-2, 0)),
))


def _shift(a, dx, dy):
    """``out[y, x] = a[y + dy, x + dx]``, zero outside."""
    h, w = a.shape
    out = np.zeros_like(a)
    ys, yd = (slice(dy, h), slice(0, h - dy)) if dy >= 0 else (slice(0, h + dy), slice(-dy, h))
    xs, xd = (slice(dx, w), slice(0, w - dx)) if dx >= 0 else (slice(0, w + dx), slice(-dx, w))
    out[yd, xd] = a[ys, xs]
    return out


def pattern_activity(h, v, w):
    """Boolean arrays (by anchor rank) of occurring Horizontal / Vertical patterns."""
    H = h.reshape(w, w).astype(bool)
    V = v.reshape(w, w).astype(bool)
    hz = (V & _shift(H, 0, 1) & _shift(V, 1, 0) & _shift(H, 1, 0) & _shift(V, 2, 0)
          & ~H & ~_shift(H, 1, 1))
    vt = (_shift(H, -1, 0) & _shift(V, -1, 0) & _shift(H, -1, 1) & _shift(V, 0, 1)
          & _shift(H, -1, 2) & ~V & ~_shift(V, -1, 1))
    return hz.reshape(-1), vt.reshape(-1)


def _interior_diagonals(w):
    """Masks of diagonals with both endpoints off the window boundary."""
    x = np.arange(w * w) % w
    y = np.arange(w * w) // w

    def inner(a, b):
        return (a > 0) & (a < w - 1) & (b > 0) & (b < w - 1)
    return inner(x, y) & inner(x + 2, y + 1), inner(x, y) & inner(x - 1, y + 2)


@dataclass(frozen=True, eq=False)
class EnhancedConfig:
    """Uniform fields of one sample on the box of radius ``window.radius``.

    ``up_h``/``up_v`` drive the lattice edges east/north of each vertex,
    ``uq_h``/``uq_v`` the two diagonals anchored there.
    """

    window: Window
    up_h: np.ndarray
    up_v: np.ndarray
    uq_h: np.ndarray
    uq_v: np.ndarray
    p: float
    q: float
    seed: int = None
    trial: int = 0

    def with_params(self, p=None, q=None):
        return EnhancedConfig(self.window, self.up_h, self.up_v, self.uq_h, self.uq_v,
                              self.p if p is None else float(as_fraction(p)),
                              self.q if q is None else float(as_fraction(q)),
                              self.seed, self.trial)

    def p_layer(self, force=None):
        w = self.window.width
        col = np.arange(w * w) % w
        row = np.arange(w * w) // w
        h = ((self.up_h < self.p) & (col < w - 1)).astype(np.uint8)
        v = ((self.up_v < self.p) & (row < w - 1)).astype(np.uint8)
        if force:
            for e, s in force.items():
                x, y, o = e
                (h if o == 0 else v)[self.window.rank((x, y))] = bool(s)
        return h, v

    def bond(self):
        h, v = self.p_layer()
        return BondConfig(self.window, h, v, self.p, self.seed, self.trial)

    def layers(self, force_p=None, force_q=None):
        """(h, v, qh, qv) uint8 arrays after optional forcing of edge states."""
        w = self.window.width
        h, v = self.p_layer(force_p)
        act_h, act_v = pattern_activity(h, v, w)
        in_h, in_v = _interior_diagonals(w)
        qh = act_h & in_h & (self.uq_h < self.q)
        qv = act_v & in_v & (self.uq_v < self.q)
        if force_q:
            for (x, y, s), state in force_q.items():
                r = self.window.rank((x, y))
                arr, act, inn = (qh, act_h, in_h) if s == 0 else (qv, act_v, in_v)
                arr[r] = bool(state) and act[r] and inn[r]
        return h, v, qh.astype(np.uint8), qv.astype(np.uint8)

    def active(self):
        """Set of q-edge ids whose pattern occurs."""
        w = self.window.width
        h, v = self.p_layer()
        ah, av = pattern_activity(h, v, w)
        out = {(*self.window.vertex(int(r)), 0) for r in np.flatnonzero(ah)}
        out |= {(*self.window.vertex(int(r)), 1) for r in np.flatnonzero(av)}
        return out

    def open_q_edges(self):
        _, _, qh, qv = self.layers()
        out = {(*self.window.vertex(int(r)), 0) for r in np.flatnonzero(qh)}
        out |= {(*self.window.vertex(int(r)), 1) for r in np.flatnonzero(qv)}
        return out


def enhanced_uniforms(window, seed, trial=0):
    if window.dim != 2:
        raise ValueError("the enhanced model is planar")
    uh, uv = bond_uniforms(window, seed, trial)
    lo_x, lo_y = (c - window.radius for c in window.center)
    qh, qv = kernels.edge_uniforms(seed, rng.DOMAIN_DIAG, trial, lo_x, lo_y, window.width)
    return uh, uv, qh, qv


def enhanced_sample(p, q, window, seed, trial=0):
    p, q = as_fraction(p), as_fraction(q)
    if not (0 <= p <= 1 and 0 <= q <= 1):
        raise ValueError("p and q must lie in [0, 1]")
    return EnhancedConfig(window, *enhanced_uniforms(window, seed, trial),
                          float(p), float(q), seed, trial)


def _check_n(config, n):
    if n is None:
        return config.window.radius
    if n != config.window.radius:
        raise ValueError("n must equal the radius of the sampled window")
    return n


def _run(config, layers):
    h, v, qh, qv = layers
    s = searcher(config.window.radius)
    return s.run(h, v, qh, qv, True), s


def enhanced_connect(config, n=None):
    """Pattern-avoiding connection from the centre to the boundary using
    lattice edges and open diagonals."""
    _check_n(config, n)
    (found, _, _), _ = _run(config, config.layers())
    return bool(found)


def enhanced_path(config):
    """(vertices, kinds) of a shortest admissible path, or None."""
    (found, ranks, kinds), _ = _run(config, config.layers())
    if not found:
        return None
    return [config.window.vertex(int(r)) for r in ranks], [int(k) for k in kinds]


@dataclass(frozen=True)
class PivotalReport:
    edge: tuple
    pivotal: bool
    with_open: bool
    with_closed: bool


def _in_sets(config, edge):
    layer, e = edge
    win = config.window if isinstance(config, EnhancedConfig) else config
    if layer == "p":
        a, b = edge_ends(e)
        return a in win and b in win and (win.interior(a) or win.interior(b))
    if layer == "q":
        x, y, s = e
        dx, dy = DIAG_STEP[s]
        return win.interior((x, y)) and win.interior((x + dx, y + dy))
    raise ValueError(f"unknown edge layer {layer!r}")


def forced_outcomes(config, edge):
    """(connected with the edge forced open, connected with it forced closed)."""
    layer, e = edge
    out = []
    for state in (True, False):
        if layer == "p":
            if e not in config.bond():
                out.append(enhanced_connect(config))
                continue
            lay = config.layers(force_p={e: state})
        else:
            win = config.window
            if (e[0], e[1]) not in win:
                out.append(enhanced_connect(config))
                continue
            lay = config.layers(force_q={e: state})
        (found, _, _), _ = _run(config, lay)
        out.append(bool(found))
    return tuple(out)


def is_pivotal_enhanced(config, edge, n=None):
    _check_n(config, n)
    if not _in_sets(config, edge):
        raise ValueError(f"edge {edge} is outside the in-sets of the window")
    a, b = forced_outcomes(config, edge)
    return PivotalReport(edge, a and not b, a, b)


def q_of(e):
    """Diagonal associated with the lattice edge ``e``."""
    x, y, o = e
    return (x, y, 0) if o == 1 else (x + 1, y, 1)


def is_good(e, window):
    """Good lattice edge: associated diagonal interior and e not in the bad list."""
    rel = (e[0] - window.center[0], e[1] - window.center[1], e[2])
    return _in_sets(window, ("q", q_of(e))) and rel not in I_BAD


def diagonal_trail(q):
    x, y, s = q
    return PatternInstance(Shape.HORIZONTAL if s == 0 else Shape.VERTICAL, (x, y))


def all_in_edges(config):
    win = config.window
    p_edges = [("p", e) for e in config.bond().edges() if _in_sets(config, ("p", e))]
    q_edges = [("q", (x, y, s)) for x, y in win.vertices() for s in (0, 1)
               if _in_sets(config, ("q", (x, y, s)))]
    return p_edges, q_edges


def _word_closed_pairs(verts, start, stop, out):
    """Closed-pair edges of every forbidden word traced by verts[start..stop]."""
    dirs = [STEP.index((verts[i + 1][0] - verts[i][0], verts[i + 1][1] - verts[i][1]))
            for i in range(start, stop)]
    for i in range(len(dirs) - 4):
        k = WORD_INDEX[word_code(dirs[i:i + 5])]
        if k >= 0:
            sx, sy = verts[start + i]
            for dx, dy, o in WORDS[k][1]:
                out.add((sx + dx, sy + dy, o))


def _diag_from_step(u, v):
    dx, dy = v[0] - u[0], v[1] - u[1]
    if (dx, dy) == (2, 1):
        return (*u, 0)
    if (dx, dy) == (-2, -1):
        return (*v, 0)
    if (dx, dy) == (-1, 2):
        return (*u, 1)
    if (dx, dy) == (1, -2):
        return (*v, 1)
    raise ValueError("not a diagonal step")


def _candidates(config):
    """Edges that can possibly be pivotal in this sample, plus whether A holds."""
    win = config.window
    w = win.width
    lay = config.layers()
    (found, ranks, kinds), s = _run(config, lay)
    h, v, qh, qv = lay
    if found:
        verts = [win.vertex(int(r)) for r in ranks]
        p_c, q_c = set(), set()
        run_start = 0
        for i, k in enumerate(kinds):
            if k == 0:
                p_c.add(edge_id(verts[i], verts[i + 1]))
            else:
                _word_closed_pairs(verts, run_start, i, p_c)
                run_start = i + 1
                d = _diag_from_step(verts[i], verts[i + 1])
                q_c.add(d)
                p_c.update(diagonal_trail(d).trail_edges())
        _word_closed_pairs(verts, run_start, len(kinds), p_c)
        bond = BondConfig(win, h, v)
        p_c = {e for e in p_c if e in bond and bond.is_open(e)}
        return True, p_c, q_c
    reached = s.reached()
    near = np.zeros((w, w), dtype=bool)
    near.reshape(-1)[reached] = True
    grow = near.copy()
    for dx in range(-2, 3):
        for dy in range(-2, 3):
            grow |= _shift(near, dx, dy)
    grow = grow.reshape(-1)
    col = np.arange(w * w) % w
    row = np.arange(w * w) // w
    east = np.zeros(w * w, dtype=bool)
    east[:-1] = grow[1:]
    north = np.zeros(w * w, dtype=bool)
    north[:-w] = grow[w:]
    ph = (h == 0) & (col < w - 1) & (grow | east)
    pv = (v == 0) & (row < w - 1) & (grow | north)
    p_c = {(*win.vertex(int(r)), 0) for r in np.flatnonzero(ph)}
    p_c |= {(*win.vertex(int(r)), 1) for r in np.flatnonzero(pv)}
    act_h, act_v = pattern_activity(h, v, w)
    in_h, in_v = _interior_diagonals(w)
    q_c = set()
    for s_, act, inn, arr in ((0, act_h, in_h, qh), (1, act_v, in_v, qv)):
        dx, dy = DIAG_STEP[s_]
        for r in np.flatnonzero(act & inn & (arr == 0)):
            a = win.vertex(int(r))
            b = (a[0] + dx, a[1] + dy)
            if near.reshape(-1)[r] or near.reshape(-1)[win.rank(b)]:
                q_c.add((*a, s_))
    p_c = {e for e in p_c if _in_sets(config, ("p", e))}
    return False, p_c, q_c


def pivotal_edges(config, prune=True):
    """Sets of pivotal lattice edges and pivotal diagonals of one sample."""
    if prune:
        holds, p_c, q_c = _candidates(config)
        p_c = [("p", e) for e in p_c]
        q_c = [("q", e) for e in q_c]
    else:
        holds = enhanced_connect(config)
        p_c, q_c = all_in_edges(config)
    piv_p, piv_q = set(), set()
    for edge in p_c + q_c:
        a, b = forced_outcomes(config, edge)
        if a and not b:
            (piv_p if edge[0] == "p" else piv_q).add(edge[1])
    return piv_p, piv_q


def theta_n(p, q, n, trials, seed, center=(0, 0)):
    if trials < 1:
        raise ValueError("trials must be at least 1")
    win = Window(center, n)
    hits = sum(enhanced_connect(enhanced_sample(p, q, win, seed, t)) for t in range(trials))
    return wilson(hits, trials, seed)


def russo_samples(p, q, n, trials, seed, center=(0, 0), prune=True):
    """Per-sample pivotal counts: array (trials, 4) of
    [p-pivotal, q-pivotal, good p-pivotal, bad p-pivotal]."""
    if n > MAX_RUSSO_RADIUS:
        raise ValueError(f"full pivotal sweeps are limited to n <= {MAX_RUSSO_RADIUS}")
    if trials < 1:
        raise ValueError("trials must be at least 1")
    win = Window(center, n)
    out = np.zeros((trials, 4), dtype=np.int64)
    for t in range(trials):
        cfg = enhanced_sample(p, q, win, seed, t)
        pp, pq = pivotal_edges(cfg, prune)
        good = sum(is_good(e, win) for e in pp)
        out[t] = (len(pp), len(pq), good, len(pp) - good)
    return out


def russo_estimates(p, q, n, trials, seed, center=(0, 0)):
    """(dp, dq) estimates of the partial derivatives of Theta_n."""
    counts = russo_samples(p, q, n, trials, seed, center)
    return mean_ci(counts[:, 0], seed=seed), mean_ci(counts[:, 1], seed=seed)


def finite_difference(p, q, n, trials, seed, h=0.02, param="p", center=(0, 0)):
    """Central difference of Theta_n under common uniforms: per sample the
    indicator difference A(+h) - A(-h), scaled by 1/(2h).

    The differences are 0 or 1 under the coupling, so the interval is a
    scaled Wilson interval; the normal interval is the fallback otherwise.
    """
    p, q = float(as_fraction(p)), float(as_fraction(q))
    win = Window(center, n)
    diffs = np.zeros(trials)
    for t in range(trials):
        cfg = enhanced_sample(p, q, win, seed, t)
        if param == "p":
            hi, lo = cfg.with_params(p=min(1.0, p + h)), cfg.with_params(p=max(0.0, p - h))
        elif param == "q":
            hi, lo = cfg.with_params(q=min(1.0, q + h)), cfg.with_params(q=max(0.0, q - h))
        else:
            raise ValueError("param must be 'p' or 'q'")
        diffs[t] = int(enhanced_connect(hi)) - int(enhanced_connect(lo))
    scale = 1.0 / (2 * h)
    if np.all(diffs >= 0):
        # a scaled proportion of flips; the normal interval collapses at zero
        w = wilson(int(diffs.sum()), trials, seed)
        return Estimate(w.mean * scale, w.stderr * scale, w.lo * scale, w.hi * scale,
                        trials, seed, "wilson")
    return mean_ci(diffs, scale, seed)


def monotone_event_check(window, seed, grid, trials=1):
    """Pathwise violations of monotonicity of A in p and q over ``grid``.

    One uniform field per trial is shared by every grid point; a violation is
    an ordered pair (a <= b componentwise) with A at a but not at b.
    """
    grid = [(float(as_fraction(a)), float(as_fraction(b))) for a, b in grid]
    if grid != sorted(grid):
        raise ValueError("grid must be sorted")
    violations = 0
    for t in range(trials):
        base = enhanced_sample(0, 0, window, seed, t)
        hold = [enhanced_connect(base.with_params(p, q)) for p, q in grid]
        for i, (pi, qi) in enumerate(grid):
            for j, (pj, qj) in enumerate(grid):
                if pi <= pj and qi <= qj and hold[i] and not hold[j]:
                    violations += 1
    return violations


def plain_connect(config):
    """Unconstrained connectivity of the p-layer from the centre."""
    return bond_connect(config.bond(), config.window.center, config.window.radius)


__all__ = [
    "EnhancedConfig", "PivotalReport", "enhanced_sample", "enhanced_connect",
    "enhanced_path", "is_pivotal_enhanced", "forced_outcomes", "pivotal_edges",
    "theta_n", "russo_estimates", "russo_samples", "finite_difference",
    "monotone_event_check", "q_of", "is_good", "I_BAD", "pattern_activity",
    "plain_connect", "Estimate",
]
