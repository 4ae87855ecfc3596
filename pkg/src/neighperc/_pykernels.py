"""Pure-Python kernels.

Reference implementation of every hot loop.  The compiled core in
``_core.pyx`` exposes the same functions with the same signatures and must
return identical results; ``neighperc._backend`` picks one at import.
"""

from collections import deque

import numpy as np

from . import rng
from ._tables import (AON, CORNER, IID, ISO, ISO_MASKS, MEM_OFFSET, MEM_STATES,
                      NSEW, STEP, TWODP, WORD_INDEX, WORDS)

NAME = "python"


# -- per-vertex outcomes -------------------------------------------------------

def outcome_mask(code, d, k, eps, p, cum, site):
    m = 2 * d
    if code == TWODP:
        perm = list(range(m))
        for i in range(m - 1):
            j = i + rng.below(m - i, rng.draw(site, i))
            perm[i], perm[j] = perm[j], perm[i]
        mask = 0
        for i in range(k):
            mask |= 1 << perm[i]
        if k < m and rng.uniform(rng.draw(site, m - 1)) < eps:
            mask |= 1 << perm[k]
        return mask
    if code == IID:
        mask = 0
        for i in range(m):
            if rng.uniform(rng.draw(site, i)) < p:
                mask |= 1 << i
        return mask
    if code == AON:
        return (1 << m) - 1 if rng.uniform(rng.draw(site, 0)) < p else 0
    if code == NSEW or code == CORNER:
        first = rng.below(4, rng.draw(site, 0))
        side = rng.below(2, rng.draw(site, 1))
        coin = rng.uniform(rng.draw(site, 2)) < eps
        t = rng.below(2, rng.draw(site, 3))
        if code == NSEW:
            partner = (first + 2) % 4
        else:
            partner = (first + 1 + 2 * side) % 4
        rest = [x for x in range(4) if x != first and x != partner]
        chain = (first, partner, rest[t], rest[1 - t])
        mask = 0
        for i in range(k):
            mask |= 1 << chain[i]
        if k < 4 and coin:
            mask |= 1 << chain[k]
        return mask
    if code == ISO:
        u = rng.uniform(rng.draw(site, 0))
        for i in range(5):
            if u < cum[i]:
                return ISO_MASKS[i]
        return ISO_MASKS[5]
    raise ValueError(f"unknown model code {code}")


def sample_box(code, d, k, eps, p, cum, seed, trial, lo, w):
    """Outcomes of the box ``lo + [0, w)^d``, first coordinate fastest."""
    key = rng.stream_key(seed, rng.DOMAIN_VERTEX, trial)
    out = np.zeros(w ** d, dtype=np.uint8)
    for r in range(w ** d):
        c, q = [], r
        for i in range(d):
            q, m = divmod(q, w)
            c.append(lo[i] + m)
        out[r] = outcome_mask(code, d, k, eps, p, cum, rng.site_key(key, c))
    return out


def edge_uniforms(seed, domain, trial, lo_x, lo_y, w):
    """Uniforms of the two edges (orientation 0 and 1) attached to each vertex."""
    key = rng.stream_key(seed, domain, trial)
    u0 = np.empty(w * w)
    u1 = np.empty(w * w)
    for r in range(w * w):
        x, y = lo_x + r % w, lo_y + r // w
        u0[r] = rng.uniform(rng.draw(rng.site_key(key, (x, y, 0)), 0))
        u1[r] = rng.uniform(rng.draw(rng.site_key(key, (x, y, 1)), 0))
    return u0, u1


# -- primal forward sets with lazy sampling ------------------------------------

def _lazy(code, d, k, eps, p, cum, key):
    cache = {}

    def get(v):
        m = cache.get(v)
        if m is None:
            m = outcome_mask(code, d, k, eps, p, cum, rng.site_key(key, v))
            cache[v] = m
        return m
    return get


def _unit(i, d):
    v = [0] * d
    v[i % d] = 1 if i < d else -1
    return v


def escape_flags(code, d, k, eps, p, cum, seed, trial0, ntrials, n):
    units = [_unit(i, d) for i in range(2 * d)]
    out = np.zeros(ntrials, dtype=np.uint8)
    for t in range(ntrials):
        get = _lazy(code, d, k, eps, p, cum,
                    rng.stream_key(seed, rng.DOMAIN_VERTEX, trial0 + t))
        o = (0,) * d
        seen = {o}
        queue = deque([o])
        hit = n == 0
        while queue and not hit:
            v = queue.popleft()
            m = get(v)
            for i in range(2 * d):
                if m >> i & 1:
                    u = tuple(a + b for a, b in zip(v, units[i]))
                    if u not in seen:
                        seen.add(u)
                        if max(map(abs, u)) >= n:
                            hit = True
                            break
                        queue.append(u)
        out[t] = hit
    return out


# dual direction -> (owner offset from dual tail, primal direction)
D2P = (((1, 1), 3), ((0, 1), 0), ((0, 0), 1), ((1, 0), 2))
# primal direction -> (dual tail offset from owner, dual direction)
P2D = (((0, -1), 1), ((0, 0), 2), ((-1, 0), 3), ((-1, -1), 0))


def dual_sizes(code, k, eps, p, cum, seed, trial0, ntrials, radius, cap):
    """Size of the dual forward set of (0,0), capped at ``cap``; counts
    escape through the boundary of the radius-``radius`` dual window as ``cap``."""
    out = np.zeros(ntrials, dtype=np.int64)
    for t in range(ntrials):
        get = _lazy(code, 2, k, eps, p, cum,
                    rng.stream_key(seed, rng.DOMAIN_VERTEX, trial0 + t))
        seen = {(0, 0)}
        queue = deque([(0, 0)])
        size = 1
        while queue and size < cap:
            a, b = queue.popleft()
            if max(abs(a), abs(b)) >= radius:
                size = cap
                break
            for dd in range(4):
                (ox, oy), pd = D2P[dd]
                if get((a + ox, b + oy)) >> pd & 1:
                    continue
                u = (a + STEP[dd][0], b + STEP[dd][1])
                if u not in seen:
                    seen.add(u)
                    size += 1
                    queue.append(u)
        out[t] = min(size, cap)
    return out


# -- dual structures on a pre-sampled window -----------------------------------

def dual_forward(outcomes, radius, sa, sb):
    """Dual forward set of (sa, sb) inside the dual window of radius
    ``radius``; ``outcomes`` covers the primal window of radius+1.
    Returns (sorted dual ranks, escaped)."""
    pr = radius + 1
    pw = 2 * pr + 1
    w = 2 * radius + 1
    seen = {(sa, sb)}
    queue = deque([(sa, sb)])
    escaped = False
    while queue:
        a, b = queue.popleft()
        if max(abs(a), abs(b)) >= radius:
            escaped = True
            continue
        for dd in range(4):
            (ox, oy), pd = D2P[dd]
            z = (b + oy + pr) * pw + (a + ox + pr)
            if outcomes[z] >> pd & 1:
                continue
            u = (a + STEP[dd][0], b + STEP[dd][1])
            if u not in seen:
                seen.add(u)
                queue.append(u)
    ranks = sorted((b + radius) * w + (a + radius) for a, b in seen)
    return np.array(ranks, dtype=np.int64), escaped


def explore(outcomes, radius, sa, sb, track_auto):
    """Run the dual exploration.  Returns ``(steps, visits, escaped)`` where
    steps is an (m, 7) int array of (a, b, dual dir, open, pivotal, auto,
    list length before the pop) and visits an (v, 4) array of (a, b,
    cluster, discovering step or -1)."""
    pr = radius + 1
    pw = 2 * pr + 1
    w = 2 * radius + 1
    revealed = np.zeros((pw * pw, 4), dtype=np.int8)   # 0 unknown, 1 open, 2 closed (dual)
    visited = np.zeros(w * w, dtype=np.int8)
    hole = np.zeros(w * w, dtype=np.int8)
    steps = []
    visits = [(sa, sb, 1, -1)]
    visited[(sb + radius) * w + sa + radius] = 1
    box = [sa, sa, sb, sb]
    stack = [(sa, sb, 3), (sa, sb, 2), (sa, sb, 1), (sa, sb, 0)]
    cluster = 1
    escaped = False
    while stack:
        length = len(stack)
        a, b, dd = stack.pop()
        (ox, oy), pd = D2P[dd]
        z = (b + oy + pr) * pw + (a + ox + pr)
        piv = auto = 0
        for j in (1, 2, 3):
            if revealed[z, (pd + j) % 4] == 2:
                piv = 1
        if track_auto and revealed[z, (pd + 2) % 4] == 2:
            auto = 1
        is_open = 0 if outcomes[z] >> pd & 1 else 1
        revealed[z, pd] = 1 if is_open else 2
        steps.append((a, b, dd, is_open, piv, auto, length))
        if not is_open:
            continue
        if piv:
            cluster += 1
        ha, hb = a + STEP[dd][0], b + STEP[dd][1]
        visited[(hb + radius) * w + ha + radius] = 1
        visits.append((ha, hb, cluster, len(steps) - 1))
        if max(abs(ha), abs(hb)) >= radius:
            escaped = True
            break
        right, left = (dd + 3) % 4, (dd + 1) % 4
        stack.extend(((ha, hb, left), (ha, hb, dd), (ha, hb, right)))
        box = [min(box[0], ha), max(box[1], ha), min(box[2], hb), max(box[3], hb)]
        _mark_holes(visited, hole, box, radius)
        kept = []
        for a2, b2, d2 in stack:
            r = (b2 + STEP[d2][1] + radius) * w + a2 + STEP[d2][0] + radius
            if not visited[r] and not hole[r]:
                kept.append((a2, b2, d2))
        stack = kept
    return (np.array(steps, dtype=np.int64).reshape(-1, 7),
            np.array(visits, dtype=np.int64).reshape(-1, 4), escaped)


def _mark_holes(visited, hole, box, radius):
    w = 2 * radius + 1
    x0, x1, y0, y1 = box[0] - 1, box[1] + 1, box[2] - 1, box[3] + 1
    bw = x1 - x0 + 1
    outside = np.zeros((y1 - y0 + 1) * bw, dtype=np.int8)
    outside[0] = 1
    stack = [(x0, y0)]
    while stack:
        x, y = stack.pop()
        for dx, dy in STEP:
            u, v = x + dx, y + dy
            if x0 <= u <= x1 and y0 <= v <= y1:
                i = (v - y0) * bw + (u - x0)
                if not outside[i] and not visited[(v + radius) * w + u + radius]:
                    outside[i] = 1
                    stack.append((u, v))
    for y in range(y0 + 1, y1):
        for x in range(x0 + 1, x1):
            r = (y + radius) * w + x + radius
            if not visited[r] and not outside[(y - y0) * bw + (x - x0)]:
                hole[r] = 1


# -- pattern-avoiding connectivity ---------------------------------------------

def _closed_pair_hit(h, v, w, radius, tx, ty, word):
    """Closed pair of ``word`` closed, given the walk that traced it ends at (tx, ty)."""
    dirs, closed = WORDS[word]
    sx, sy = tx, ty
    for d in dirs:
        sx -= STEP[d][0]
        sy -= STEP[d][1]
    for dx, dy, o in closed:
        r = (sy + dy + radius) * w + sx + dx + radius
        if (h if o == 0 else v)[r]:
            return False
    return True


class Searcher:
    """Reusable pattern-avoiding search on a fixed window radius."""

    def __init__(self, radius):
        self.radius = radius
        self._seen = ()

    def run(self, h, v, qh=None, qv=None, q_interior=False):
        seen = []
        out = connect(self.radius, h, v, qh, qv, q_interior, seen)
        self._seen = seen
        return out

    def reached(self):
        """Sorted vertex ranks touched by the last run."""
        return np.array(sorted({s // MEM_STATES for s in self._seen}), dtype=np.int64)


def connect(radius, h, v, qh=None, qv=None, q_interior=False, seen_out=None):
    """Breadth-first search over (vertex, last four steps) from the window
    centre to the boundary, refusing any step that completes a forbidden
    trail whose closed pair is closed, and any lattice step that reverses
    the previous one.  ``h[r]``/``v[r]`` give the edge to the
    east/north of rank r; ``qh``/``qv`` (or None) the diagonals from an anchor
    to +(2,1) / +(-1,2).  Returns (found, vertex ranks, step kinds) with
    kind 0 for a lattice step and 1 for a diagonal."""
    w = 2 * radius + 1
    src = radius * w + radius
    start = src * MEM_STATES
    parent = {start: (-1, 0)}
    queue = deque([(radius, radius, 0, 0)])   # x, y (window coords), mem length, mem code
    goal = -1
    while queue:
        x, y, ml, mc = queue.popleft()
        here = ((y * w + x) * MEM_STATES) + MEM_OFFSET[ml] + mc
        moves = []
        for d in range(4):
            dx, dy = STEP[d]
            if d == 0:
                ok = h[y * w + x]
            elif d == 1:
                ok = v[y * w + x]
            elif d == 2:
                ok = h[y * w + x - 1]
            else:
                ok = v[(y - 1) * w + x]
            if not ok:
                continue
            if ml > 0 and (mc & 3) == (d + 2) % 4:
                continue    # no immediate reversal
            tx, ty = x + dx, y + dy
            if ml == 4:
                word = WORD_INDEX[(mc << 2) | d]
                if word >= 0 and _closed_pair_hit(h, v, w, radius, tx - radius, ty - radius, word):
                    continue
                nl, nc = 4, ((mc << 2) | d) & 255
            else:
                nl, nc = ml + 1, (mc << 2) | d
            moves.append((tx, ty, nl, nc, 0))
        if qh is not None:
            for dx, dy, arr, ax, ay in ((2, 1, qh, x, y), (-1, 2, qv, x, y),
                                        (-2, -1, qh, x - 2, y - 1), (1, -2, qv, x + 1, y - 2)):
                tx, ty = x + dx, y + dy
                if not (0 <= tx < w and 0 <= ty < w):
                    continue
                if q_interior and (tx in (0, w - 1) or ty in (0, w - 1)):
                    continue
                if arr[ay * w + ax]:
                    moves.append((tx, ty, 0, 0, 1))
        for tx, ty, nl, nc, kind in moves:
            s = ((ty * w + tx) * MEM_STATES) + MEM_OFFSET[nl] + nc
            if s in parent:
                continue
            parent[s] = (here, kind)
            if tx in (0, w - 1) or ty in (0, w - 1):
                goal = s
                break
            queue.append((tx, ty, nl, nc))
        if goal >= 0:
            break
    if seen_out is not None:
        seen_out.extend(parent)
    if goal < 0:
        return False, np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    verts, kinds = [], []
    s = goal
    while s >= 0:
        verts.append(s // MEM_STATES)
        prev, kind = parent[s]
        if prev >= 0:
            kinds.append(kind)
        s = prev
    return (True, np.array(verts[::-1], dtype=np.int64),
            np.array(kinds[::-1], dtype=np.int64))


# -- rectangle crossings and annuli (lazy sampling, d = 2) ----------------------

def _cross(get, x0, x1, y0, y1, axis, forward):
    """Directed open crossing of [x0,x1]x[y0,y1] along ``axis`` (0 = x)."""
    if axis == 0:
        lo, hi = (x0, x1) if forward else (x1, x0)
        sources = [(lo, y) for y in range(y0, y1 + 1)]
    else:
        lo, hi = (y0, y1) if forward else (y1, y0)
        sources = [(x, lo) for x in range(x0, x1 + 1)]
    seen = set(sources)
    queue = deque(sources)
    while queue:
        vtx = queue.popleft()
        if vtx[axis] == hi:
            return True
        m = get(vtx)
        for i in range(4):
            if m >> i & 1:
                u = (vtx[0] + STEP[i][0], vtx[1] + STEP[i][1])
                if x0 <= u[0] <= x1 and y0 <= u[1] <= y1 and u not in seen:
                    seen.add(u)
                    queue.append(u)
    return False


def crossing_flags(code, k, eps, p, cum, seed, trial0, ntrials, length):
    out = np.zeros(ntrials, dtype=np.uint8)
    for t in range(ntrials):
        get = _lazy(code, 2, k, eps, p, cum,
                    rng.stream_key(seed, rng.DOMAIN_VERTEX, trial0 + t))
        out[t] = _cross(get, 0, 3 * length, 0, length, 0, True)
    return out


def annulus_bounds(length):
    """(a, b): annulus vertices satisfy a <= |v|_inf <= b."""
    return length // 2 + 1, (3 * length) // 2


def _annulus_cycle(get, a, b):
    verts = [(x, y) for y in range(-b, b + 1) for x in range(-b, b + 1)
             if max(abs(x), abs(y)) >= a]
    inside = set(verts)
    adj = {}
    for vtx in verts:
        m = get(vtx)
        lst = []
        for i in range(4):
            if m >> i & 1:
                u = (vtx[0] + STEP[i][0], vtx[1] + STEP[i][1])
                if u in inside:
                    # crossing the cut {y = -1/2, x > 0}: up is +1, down is -1
                    wgt = 0
                    if vtx[0] > 0 and i == 1 and vtx[1] == -1:
                        wgt = 1
                    elif vtx[0] > 0 and i == 3 and vtx[1] == 0:
                        wgt = -1
                    lst.append((u, wgt))
        adj[vtx] = lst
    comp = _scc(verts, adj)
    level = {}
    for root in verts:
        if root in level:
            continue
        level[root] = 0
        stack = [root]
        while stack:
            x = stack.pop()
            for u, wgt in adj[x]:
                if comp[u] != comp[x]:
                    continue
                if u not in level:
                    level[u] = level[x] + wgt
                    stack.append(u)
                elif level[u] != level[x] + wgt:
                    return True
    return False


def _scc(verts, adj):
    """Kosaraju; returns vertex -> component id."""
    order, seen = [], set()
    for s in verts:
        if s in seen:
            continue
        seen.add(s)
        stack = [(s, iter(adj[s]))]
        while stack:
            x, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                stack.pop()
                order.append(x)
            elif nxt[0] not in seen:
                seen.add(nxt[0])
                stack.append((nxt[0], iter(adj[nxt[0]])))
    radj = {x: [] for x in verts}
    for x in verts:
        for u, _ in adj[x]:
            radj[u].append(x)
    comp = {}
    for s in reversed(order):
        if s in comp:
            continue
        comp[s] = s
        stack = [s]
        while stack:
            x = stack.pop()
            for u in radj[x]:
                if u not in comp:
                    comp[u] = s
                    stack.append(u)
    return comp


def annulus_flags(code, k, eps, p, cum, seed, trial0, ntrials, length):
    """Columns: exact cycle event, four-rectangle glue event."""
    a, b = annulus_bounds(length)
    out = np.zeros((ntrials, 2), dtype=np.uint8)
    for t in range(ntrials):
        get = _lazy(code, 2, k, eps, p, cum,
                    rng.stream_key(seed, rng.DOMAIN_VERTEX, trial0 + t))
        out[t, 0] = _annulus_cycle(get, a, b)
        out[t, 1] = (_cross(get, -b, b, -b, -a, 0, True)
                     and _cross(get, a, b, -b, b, 1, True)
                     and _cross(get, -b, b, a, b, 0, False)
                     and _cross(get, -b, -a, -b, b, 1, False))
    return out


# -- self-avoiding walks -------------------------------------------------------

def saw_count(n):
    if n == 0:
        return 1
    seen = {(0, 0)}

    def rec(x, y, left):
        if left == 0:
            return 1
        total = 0
        for dx, dy in STEP:
            u = (x + dx, y + dy)
            if u not in seen:
                seen.add(u)
                total += rec(u[0], u[1], left - 1)
                seen.discard(u)
        return total
    return rec(0, 0, n)
