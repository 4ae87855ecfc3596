# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels; mirrors ``_pykernels`` function for function."""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t, int64_t, int32_t, uint8_t, int8_t
from libc.stdlib cimport malloc, calloc, free

cnp.import_array()

NAME = "cython"

cdef uint64_t GAMMA = 0x9E3779B97F4A7C15ULL
cdef double INV53 = 1.0 / 9007199254740992.0
cdef int STEPX[4]
cdef int STEPY[4]
STEPX[:] = [1, 0, -1, 0]
STEPY[:] = [0, 1, 0, -1]
# dual direction -> owner offset / primal direction
cdef int D2PX[4]
cdef int D2PY[4]
cdef int D2PD[4]
D2PX[:] = [1, 0, 0, 1]
D2PY[:] = [1, 1, 0, 0]
D2PD[:] = [3, 0, 1, 2]
cdef int ISOM[6]
ISOM[:] = [0b0011, 0b0110, 0b1100, 0b1001, 0b1010, 0b0101]

# forbidden words: 5-step code -> word id; closed pairs relative to the start
cdef int WORDIDX[1024]
cdef int WSUMX[4]
cdef int WSUMY[4]
cdef int WCL[4][6]

from ._tables import WORDS, WORD_INDEX, STEP as _STEP

for _i in range(1024):
    WORDIDX[_i] = WORD_INDEX[_i]
for _i, (_w, _cl) in enumerate(WORDS):
    WSUMX[_i] = sum(_STEP[_d][0] for _d in _w)
    WSUMY[_i] = sum(_STEP[_d][1] for _d in _w)
    for _j in range(2):
        WCL[_i][3 * _j] = _cl[_j][0]
        WCL[_i][3 * _j + 1] = _cl[_j][1]
        WCL[_i][3 * _j + 2] = _cl[_j][2]

cdef int MEMOFF[5]
MEMOFF[:] = [0, 1, 5, 21, 85]
DEF NMEM = 341

DEF TWODP = 0
DEF IID = 1
DEF AON = 2
DEF NSEW = 3
DEF CORNER = 4
DEF ISO = 5


# -- counter-based randomness --------------------------------------------------

cdef inline uint64_t mix64(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)

cdef inline uint64_t zz(int64_t c) noexcept nogil:
    return (<uint64_t>c << 1) ^ <uint64_t>(c >> 63)

cdef inline uint64_t mixc(uint64_t h, int64_t c) noexcept nogil:
    return mix64(h ^ (zz(c) + GAMMA))

cdef inline uint64_t draw(uint64_t site, int j) noexcept nogil:
    return mix64(site + <uint64_t>(j + 1) * GAMMA)

cdef inline double unif(uint64_t u) noexcept nogil:
    return <double>(u >> 11) * INV53

cdef inline int below(int m, uint64_t u) noexcept nogil:
    return <int>(((u >> 11) * <uint64_t>m) >> 53)

cdef uint64_t stream_key(object seed, int domain, int64_t trial):
    cdef uint64_t s = <uint64_t>(int(seed) & 0xFFFFFFFFFFFFFFFF)
    cdef uint64_t k = mix64(mix64(s) ^ (<uint64_t>domain * GAMMA))
    return mix64(k + <uint64_t>(trial + 1) * GAMMA)


ctypedef struct Model:
    int code
    int d
    int k
    double eps
    double p
    double cum[6]

cdef Model make_model(int code, int d, int k, double eps, double p, cum):
    cdef Model m
    m.code = code
    m.d = d
    m.k = k
    m.eps = eps
    m.p = p
    for i in range(6):
        m.cum[i] = cum[i]
    return m

cdef int outcome(Model* m, uint64_t site) noexcept nogil:
    cdef int nd = 2 * m.d
    cdef int perm[16]
    cdef int i, j, t, mask = 0, first, partner, side, coin, r0, r1
    cdef int chain[4]
    if m.code == TWODP:
        for i in range(nd):
            perm[i] = i
        for i in range(nd - 1):
            j = i + below(nd - i, draw(site, i))
            t = perm[i]; perm[i] = perm[j]; perm[j] = t
        for i in range(m.k):
            mask |= 1 << perm[i]
        if m.k < nd and unif(draw(site, nd - 1)) < m.eps:
            mask |= 1 << perm[m.k]
        return mask
    if m.code == IID:
        for i in range(nd):
            if unif(draw(site, i)) < m.p:
                mask |= 1 << i
        return mask
    if m.code == AON:
        return ((1 << nd) - 1) if unif(draw(site, 0)) < m.p else 0
    if m.code == NSEW or m.code == CORNER:
        first = below(4, draw(site, 0))
        side = below(2, draw(site, 1))
        coin = unif(draw(site, 2)) < m.eps
        t = below(2, draw(site, 3))
        if m.code == NSEW:
            partner = (first + 2) % 4
        else:
            partner = (first + 1 + 2 * side) % 4
        r0 = -1
        for i in range(4):
            if i != first and i != partner:
                if r0 < 0:
                    r0 = i
                else:
                    r1 = i
        chain[0] = first
        chain[1] = partner
        chain[2] = r0 if t == 0 else r1
        chain[3] = r1 if t == 0 else r0
        for i in range(m.k):
            mask |= 1 << chain[i]
        if m.k < 4 and coin:
            mask |= 1 << chain[m.k]
        return mask
    # ISO
    cdef double u = unif(draw(site, 0))
    for i in range(5):
        if u < m.cum[i]:
            return ISOM[i]
    return ISOM[5]


def outcome_mask(int code, int d, int k, double eps, double p, cum, site):
    cdef Model m = make_model(code, d, k, eps, p, cum)
    return outcome(&m, <uint64_t>site)


def sample_box(int code, int d, int k, double eps, double p, cum, seed, int64_t trial, lo, int w):
    cdef Model m = make_model(code, d, k, eps, p, cum)
    cdef uint64_t key = stream_key(seed, 1, trial)
    cdef int64_t total = 1, r, q
    cdef int i
    cdef int64_t clo[8]
    for i in range(d):
        total *= w
        clo[i] = lo[i]
    out = np.zeros(total, dtype=np.uint8)
    cdef uint8_t[::1] o = out
    cdef uint64_t h
    with nogil:
        for r in range(total):
            q = r
            h = key
            for i in range(d):
                h = mixc(h, clo[i] + q % w)
                q = q // w
            o[r] = <uint8_t>outcome(&m, h)
    return out


def edge_uniforms(seed, int domain, int64_t trial, int64_t lo_x, int64_t lo_y, int w):
    cdef uint64_t key = stream_key(seed, domain, trial)
    u0 = np.empty(w * w)
    u1 = np.empty(w * w)
    cdef double[::1] a0 = u0
    cdef double[::1] a1 = u1
    cdef int64_t r, x, y
    cdef uint64_t h
    with nogil:
        for r in range(w * w):
            x = lo_x + r % w
            y = lo_y + r // w
            h = mixc(mixc(key, x), y)
            a0[r] = unif(draw(mixc(h, 0), 0))
            a1[r] = unif(draw(mixc(h, 1), 0))
    return u0, u1


# -- primal forward sets with lazy sampling ------------------------------------

def escape_flags(int code, int d, int k, double eps, double p, cum, seed,
                 int64_t trial0, int64_t ntrials, int n):
    cdef Model m = make_model(code, d, k, eps, p, cum)
    cdef int w = 2 * n + 1
    cdef int64_t total = 1, stride[8]
    cdef int i
    for i in range(d):
        stride[i] = total
        total *= w
    out = np.zeros(ntrials, dtype=np.uint8)
    if n == 0:
        out[:] = 1
        return out
    cdef uint8_t[::1] o = out
    cdef int32_t* stamp = <int32_t*>calloc(total, sizeof(int32_t))
    cdef int32_t* queue = <int32_t*>malloc(total * sizeof(int32_t))
    cdef uint64_t[::1] keys = np.array([stream_key(seed, 1, trial0 + t) for t in range(ntrials)],
                                       dtype=np.uint64)
    cdef int64_t t, head, tail, v, u, origin = 0, q
    cdef int64_t c[8]
    cdef uint64_t h
    cdef int mask, axis, hit, nc
    for i in range(d):
        origin += n * stride[i]
    with nogil:
        for t in range(ntrials):
            head = 0
            tail = 1
            queue[0] = origin
            stamp[origin] = t + 1
            hit = 0
            while head < tail and not hit:
                v = queue[head]
                head += 1
                q = v
                h = keys[t]
                for i in range(d):
                    c[i] = q % w - n
                    q = q // w
                    h = mixc(h, c[i])
                mask = outcome(&m, h)
                for i in range(2 * d):
                    if not (mask >> i) & 1:
                        continue
                    axis = i % d
                    if i < d:
                        u = v + stride[axis]
                        nc = c[axis] + 1
                    else:
                        u = v - stride[axis]
                        nc = c[axis] - 1
                    if stamp[u] == t + 1:
                        continue
                    stamp[u] = t + 1
                    if nc == n or nc == -n:
                        hit = 1
                        break
                    queue[tail] = u
                    tail += 1
            o[t] = hit
    free(stamp)
    free(queue)
    return out


def dual_sizes(int code, int k, double eps, double p, cum, seed,
               int64_t trial0, int64_t ntrials, int radius, int64_t cap):
    cdef Model m = make_model(code, 2, k, eps, p, cum)
    cdef int w = 2 * radius + 1
    cdef int pr = radius + 1
    cdef int pw = 2 * pr + 1
    out = np.zeros(ntrials, dtype=np.int64)
    cdef int64_t[::1] o = out
    cdef int32_t* stamp = <int32_t*>calloc(w * w, sizeof(int32_t))
    cdef int32_t* pstamp = <int32_t*>calloc(pw * pw, sizeof(int32_t))
    cdef uint8_t* pmask = <uint8_t*>malloc(pw * pw)
    cdef int32_t* queue = <int32_t*>malloc(w * w * sizeof(int32_t))
    cdef uint64_t[::1] keys = np.array([stream_key(seed, 1, trial0 + t) for t in range(ntrials)],
                                       dtype=np.uint64)
    cdef int64_t t, size, head, tail
    cdef int v, a, b, dd, zx, zy, z, ua, ub, u
    with nogil:
        for t in range(ntrials):
            head = 0
            tail = 1
            v = radius * w + radius
            queue[0] = v
            stamp[v] = t + 1
            size = 1
            while head < tail and size < cap:
                v = queue[head]
                head += 1
                a = v % w - radius
                b = v // w - radius
                if a == radius or a == -radius or b == radius or b == -radius:
                    size = cap
                    break
                for dd in range(4):
                    zx = a + D2PX[dd]
                    zy = b + D2PY[dd]
                    z = (zy + pr) * pw + zx + pr
                    if pstamp[z] != t + 1:
                        pstamp[z] = t + 1
                        pmask[z] = <uint8_t>outcome(&m, mixc(mixc(keys[t], zx), zy))
                    if (pmask[z] >> D2PD[dd]) & 1:
                        continue
                    ua = a + STEPX[dd]
                    ub = b + STEPY[dd]
                    u = (ub + radius) * w + ua + radius
                    if stamp[u] != t + 1:
                        stamp[u] = t + 1
                        size += 1
                        queue[tail] = u
                        tail += 1
            o[t] = size if size < cap else cap
    free(stamp)
    free(pstamp)
    free(pmask)
    free(queue)
    return out


# -- dual structures on a pre-sampled window -----------------------------------

def dual_forward(const uint8_t[::1] outcomes, int radius, int sa, int sb):
    cdef int w = 2 * radius + 1
    cdef int pr = radius + 1
    cdef int pw = 2 * pr + 1
    seen = np.zeros(w * w, dtype=np.uint8)
    cdef uint8_t[::1] sn = seen
    cdef int32_t* queue = <int32_t*>malloc(w * w * sizeof(int32_t))
    cdef int head = 0, tail = 1, v, a, b, dd, z, ua, ub, u, escaped = 0
    v = (sb + radius) * w + sa + radius
    queue[0] = v
    sn[v] = 1
    with nogil:
        while head < tail:
            v = queue[head]
            head += 1
            a = v % w - radius
            b = v // w - radius
            if a == radius or a == -radius or b == radius or b == -radius:
                escaped = 1
                continue
            for dd in range(4):
                z = (b + D2PY[dd] + pr) * pw + a + D2PX[dd] + pr
                if (outcomes[z] >> D2PD[dd]) & 1:
                    continue
                ua = a + STEPX[dd]
                ub = b + STEPY[dd]
                u = (ub + radius) * w + ua + radius
                if not sn[u]:
                    sn[u] = 1
                    queue[tail] = u
                    tail += 1
    free(queue)
    return np.flatnonzero(seen).astype(np.int64), bool(escaped)


cdef void mark_holes(uint8_t* visited, uint8_t* hole, int* box, int radius,
                     uint8_t* outside, int32_t* stack) noexcept nogil:
    cdef int w = 2 * radius + 1
    cdef int x0 = box[0] - 1, x1 = box[1] + 1, y0 = box[2] - 1, y1 = box[3] + 1
    cdef int bw = x1 - x0 + 1, bh = y1 - y0 + 1
    cdef int i, top = 0, x, y, u, v, dd, j
    for i in range(bw * bh):
        outside[i] = 0
    outside[0] = 1
    stack[top] = 0
    top += 1
    while top > 0:
        top -= 1
        i = stack[top]
        x = x0 + i % bw
        y = y0 + i // bw
        for dd in range(4):
            u = x + STEPX[dd]
            v = y + STEPY[dd]
            if u < x0 or u > x1 or v < y0 or v > y1:
                continue
            j = (v - y0) * bw + (u - x0)
            if outside[j] or visited[(v + radius) * w + u + radius]:
                continue
            outside[j] = 1
            stack[top] = j
            top += 1
    for y in range(y0 + 1, y1):
        for x in range(x0 + 1, x1):
            j = (y + radius) * w + x + radius
            if not visited[j] and not outside[(y - y0) * bw + (x - x0)]:
                hole[j] = 1


def explore(const uint8_t[::1] outcomes, int radius, int sa, int sb, bint track_auto):
    cdef int w = 2 * radius + 1
    cdef int pr = radius + 1
    cdef int pw = 2 * pr + 1
    cdef int maxe = 4 * w * w + 8
    steps_arr = np.zeros((maxe, 7), dtype=np.int64)
    visits_arr = np.zeros((w * w, 4), dtype=np.int64)
    cdef int64_t[:, ::1] steps = steps_arr
    cdef int64_t[:, ::1] visits = visits_arr
    cdef int8_t* revealed = <int8_t*>calloc(pw * pw * 4, 1)
    cdef uint8_t* visited = <uint8_t*>calloc(w * w, 1)
    cdef uint8_t* hole = <uint8_t*>calloc(w * w, 1)
    cdef uint8_t* outside = <uint8_t*>malloc((w + 2) * (w + 2))
    cdef int32_t* fstack = <int32_t*>malloc((w + 2) * (w + 2) * sizeof(int32_t))
    cdef int32_t* stack = <int32_t*>malloc(maxe * 3 * sizeof(int32_t))
    cdef int box[4]
    cdef int top = 0, nsteps = 0, nvis = 1, cluster = 1, escaped = 0
    cdef int length, a, b, dd, pd, z, piv, auto, is_open, j, ha, hb, r, i, keep
    visits[0, 0] = sa
    visits[0, 1] = sb
    visits[0, 2] = 1
    visits[0, 3] = -1
    visited[(sb + radius) * w + sa + radius] = 1
    box[0] = sa; box[1] = sa; box[2] = sb; box[3] = sb
    for dd in (3, 2, 1, 0):
        stack[3 * top] = sa
        stack[3 * top + 1] = sb
        stack[3 * top + 2] = dd
        top += 1
    with nogil:
        while top > 0:
            length = top
            top -= 1
            a = stack[3 * top]
            b = stack[3 * top + 1]
            dd = stack[3 * top + 2]
            pd = D2PD[dd]
            z = (b + D2PY[dd] + pr) * pw + a + D2PX[dd] + pr
            piv = 0
            auto = 0
            for j in range(1, 4):
                if revealed[4 * z + (pd + j) % 4] == 2:
                    piv = 1
            if track_auto and revealed[4 * z + (pd + 2) % 4] == 2:
                auto = 1
            is_open = 0 if (outcomes[z] >> pd) & 1 else 1
            revealed[4 * z + pd] = 1 if is_open else 2
            steps[nsteps, 0] = a
            steps[nsteps, 1] = b
            steps[nsteps, 2] = dd
            steps[nsteps, 3] = is_open
            steps[nsteps, 4] = piv
            steps[nsteps, 5] = auto
            steps[nsteps, 6] = length
            nsteps += 1
            if not is_open:
                continue
            if piv:
                cluster += 1
            ha = a + STEPX[dd]
            hb = b + STEPY[dd]
            visited[(hb + radius) * w + ha + radius] = 1
            visits[nvis, 0] = ha
            visits[nvis, 1] = hb
            visits[nvis, 2] = cluster
            visits[nvis, 3] = nsteps - 1
            nvis += 1
            if ha == radius or ha == -radius or hb == radius or hb == -radius:
                escaped = 1
                break
            # push left, straight, right so the right turn is on top
            for j in range(3):
                stack[3 * top] = ha
                stack[3 * top + 1] = hb
                stack[3 * top + 2] = (dd + 1 - j + 4) % 4
                top += 1
            if ha < box[0]: box[0] = ha
            if ha > box[1]: box[1] = ha
            if hb < box[2]: box[2] = hb
            if hb > box[3]: box[3] = hb
            mark_holes(visited, hole, box, radius, outside, fstack)
            keep = 0
            for i in range(top):
                a = stack[3 * i]
                b = stack[3 * i + 1]
                dd = stack[3 * i + 2]
                r = (b + STEPY[dd] + radius) * w + a + STEPX[dd] + radius
                if visited[r] or hole[r]:
                    continue
                stack[3 * keep] = a
                stack[3 * keep + 1] = b
                stack[3 * keep + 2] = dd
                keep += 1
            top = keep
    free(revealed)
    free(visited)
    free(hole)
    free(outside)
    free(fstack)
    free(stack)
    return steps_arr[:nsteps].copy(), visits_arr[:nvis].copy(), bool(escaped)


# -- pattern-avoiding connectivity ---------------------------------------------

cdef class Searcher:
    """Reusable pattern-avoiding search on a fixed window radius."""
    cdef readonly int radius
    cdef int w
    cdef int32_t* stamp
    cdef int32_t* parent
    cdef int8_t* kind
    cdef int32_t* queue
    cdef int32_t gen

    def __cinit__(self, int radius):
        self.radius = radius
        self.w = 2 * radius + 1
        cdef int64_t n = <int64_t>self.w * self.w * NMEM
        self.stamp = <int32_t*>calloc(n, sizeof(int32_t))
        self.parent = <int32_t*>malloc(n * sizeof(int32_t))
        self.kind = <int8_t*>malloc(n)
        self.queue = <int32_t*>malloc(n * sizeof(int32_t))
        self.gen = 0

    def __dealloc__(self):
        free(self.stamp)
        free(self.parent)
        free(self.kind)
        free(self.queue)

    cdef bint blocked(self, const uint8_t[::1] h, const uint8_t[::1] v, int tx, int ty, int word) noexcept nogil:
        cdef int sx = tx - WSUMX[word], sy = ty - WSUMY[word], j, r
        for j in range(2):
            r = (sy + WCL[word][3 * j + 1]) * self.w + sx + WCL[word][3 * j]
            if WCL[word][3 * j + 2] == 0:
                if h[r]:
                    return False
            else:
                if v[r]:
                    return False
        return True

    def run(self, const uint8_t[::1] h, const uint8_t[::1] v, qh=None, qv=None, bint q_interior=False):
        cdef const uint8_t[::1] aqh
        cdef const uint8_t[::1] aqv
        cdef bint useq = qh is not None
        if useq:
            aqh = qh
            aqv = qv
        else:
            aqh = h
            aqv = v
        cdef int w = self.w
        cdef int32_t gen
        self.gen += 1
        cdef int64_t i
        if self.gen == 2147483647:
            for i in range(<int64_t>w * w * NMEM):
                self.stamp[i] = 0
            self.gen = 1
        gen = self.gen
        cdef int src = self.radius * w + self.radius
        cdef int s0 = src * NMEM
        cdef int head = 0, tail = 1, goal = -1
        cdef int s, vx, x, y, ml, mc, d, ok, tx, ty, nl, nc, word, ns, j, ax, ay
        cdef int qdx[4]
        cdef int qdy[4]
        cdef int qax[4]
        cdef int qay[4]
        qdx[:] = [2, -1, -2, 1]
        qdy[:] = [1, 2, -1, -2]
        qax[:] = [0, 0, -2, 1]
        qay[:] = [0, 0, -1, -2]
        self.stamp[s0] = gen
        self.parent[s0] = -1
        self.kind[s0] = 0
        self.queue[0] = s0
        with nogil:
            while head < tail and goal < 0:
                s = self.queue[head]
                head += 1
                vx = s // NMEM
                x = vx % w
                y = vx // w
                j = s % NMEM
                if j == 0:
                    ml = 0
                elif j < 5:
                    ml = 1
                elif j < 21:
                    ml = 2
                elif j < 85:
                    ml = 3
                else:
                    ml = 4
                mc = j - MEMOFF[ml]
                for d in range(4):
                    if d == 0:
                        ok = h[vx]
                    elif d == 1:
                        ok = v[vx]
                    elif d == 2:
                        ok = h[vx - 1]
                    else:
                        ok = v[vx - w]
                    if not ok:
                        continue
                    if ml > 0 and (mc & 3) == ((d + 2) & 3):
                        continue    # no immediate reversal
                    tx = x + STEPX[d]
                    ty = y + STEPY[d]
                    if ml == 4:
                        word = WORDIDX[(mc << 2) | d]
                        if word >= 0 and self.blocked(h, v, tx, ty, word):
                            continue
                        nl = 4
                        nc = ((mc << 2) | d) & 255
                    else:
                        nl = ml + 1
                        nc = (mc << 2) | d
                    ns = (ty * w + tx) * NMEM + MEMOFF[nl] + nc
                    if self.stamp[ns] == gen:
                        continue
                    self.stamp[ns] = gen
                    self.parent[ns] = s
                    self.kind[ns] = 0
                    if tx == 0 or ty == 0 or tx == w - 1 or ty == w - 1:
                        goal = ns
                        break
                    self.queue[tail] = ns
                    tail += 1
                if goal >= 0 or not useq:
                    continue
                for j in range(4):
                    tx = x + qdx[j]
                    ty = y + qdy[j]
                    if tx < 0 or ty < 0 or tx >= w or ty >= w:
                        continue
                    if q_interior and (tx == 0 or ty == 0 or tx == w - 1 or ty == w - 1):
                        continue
                    ax = x + qax[j]
                    ay = y + qay[j]
                    if j == 0 or j == 2:
                        ok = aqh[ay * w + ax]
                    else:
                        ok = aqv[ay * w + ax]
                    if not ok:
                        continue
                    ns = (ty * w + tx) * NMEM
                    if self.stamp[ns] == gen:
                        continue
                    self.stamp[ns] = gen
                    self.parent[ns] = s
                    self.kind[ns] = 1
                    if tx == 0 or ty == 0 or tx == w - 1 or ty == w - 1:
                        goal = ns
                        break
                    self.queue[tail] = ns
                    tail += 1
        if goal < 0:
            return False, np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
        verts = []
        kinds = []
        s = goal
        while s >= 0:
            verts.append(s // NMEM)
            if self.parent[s] >= 0:
                kinds.append(self.kind[s])
            s = self.parent[s]
        return (True, np.array(verts[::-1], dtype=np.int64),
                np.array(kinds[::-1], dtype=np.int64))


    def reached(self):
        """Sorted vertex ranks touched by the last run."""
        cdef int64_t n = <int64_t>self.w * self.w * NMEM, i
        cdef int32_t gen = self.gen
        mark = np.zeros(self.w * self.w, dtype=np.uint8)
        cdef uint8_t[::1] mk = mark
        with nogil:
            for i in range(n):
                if self.stamp[i] == gen:
                    mk[i // NMEM] = 1
        return np.flatnonzero(mark).astype(np.int64)


def connect(int radius, h, v, qh=None, qv=None, bint q_interior=False):
    return Searcher(radius).run(h, v, qh, qv, q_interior)


# -- rectangle crossings and annuli --------------------------------------------

cdef int cross_box(const uint8_t* mask, int bx, int by, int bw,
                   int x0, int x1, int y0, int y1, int axis, int forward,
                   int32_t* stamp, int32_t gen, int32_t* queue) noexcept nogil:
    """Directed crossing of [x0,x1]x[y0,y1] inside a sampled box with lower
    corner (bx, by) and width bw."""
    cdef int head = 0, tail = 0, x, y, i, u, vv, r, r2, lo, hi
    if axis == 0:
        lo = x0 if forward else x1
        hi = x1 if forward else x0
        for y in range(y0, y1 + 1):
            r = (y - by) * bw + lo - bx
            stamp[r] = gen
            queue[tail] = r
            tail += 1
    else:
        lo = y0 if forward else y1
        hi = y1 if forward else y0
        for x in range(x0, x1 + 1):
            r = (lo - by) * bw + x - bx
            stamp[r] = gen
            queue[tail] = r
            tail += 1
    while head < tail:
        r = queue[head]
        head += 1
        x = bx + r % bw
        y = by + r // bw
        if (x if axis == 0 else y) == hi:
            return 1
        for i in range(4):
            if not (mask[r] >> i) & 1:
                continue
            u = x + STEPX[i]
            vv = y + STEPY[i]
            if u < x0 or u > x1 or vv < y0 or vv > y1:
                continue
            r2 = (vv - by) * bw + u - bx
            if stamp[r2] == gen:
                continue
            stamp[r2] = gen
            queue[tail] = r2
            tail += 1
    return 0


def crossing_flags(int code, int k, double eps, double p, cum, seed,
                   int64_t trial0, int64_t ntrials, int length):
    cdef Model m = make_model(code, 2, k, eps, p, cum)
    cdef int bw = 3 * length + 1, bh = length + 1
    out = np.zeros(ntrials, dtype=np.uint8)
    cdef uint8_t[::1] o = out
    cdef uint8_t* mask = <uint8_t*>malloc(bw * bh)
    cdef int32_t* stamp = <int32_t*>calloc(bw * bh, sizeof(int32_t))
    cdef int32_t* queue = <int32_t*>malloc(bw * bh * sizeof(int32_t))
    cdef uint64_t[::1] keys = np.array([stream_key(seed, 1, trial0 + t) for t in range(ntrials)],
                                       dtype=np.uint64)
    cdef int64_t t
    cdef int r
    with nogil:
        for t in range(ntrials):
            for r in range(bw * bh):
                mask[r] = <uint8_t>outcome(&m, mixc(mixc(keys[t], r % bw), r // bw))
            o[t] = cross_box(mask, 0, 0, bw, 0, 3 * length, 0, length, 0, 1, stamp, t + 1, queue)
    free(mask)
    free(stamp)
    free(queue)
    return out


cdef int annulus_cycle(const uint8_t* mask, int b, int a, int32_t* comp, int32_t* order,
                       int32_t* it, int32_t* stack, int32_t* level, uint8_t* seen) noexcept nogil:
    cdef int bw = 2 * b + 1, n = bw * bw
    cdef int r, x, y, i, top, norder = 0, s, u, ux, uy, c, wgt
    cdef int lx, ly
    # membership helper inline: a <= max(|x|,|y|)
    for r in range(n):
        seen[r] = 0
        comp[r] = -1
    # pass 1: finishing order on the forward graph
    for s in range(n):
        x = s % bw - b
        y = s // bw - b
        if seen[s] or (x < a and x > -a and y < a and y > -a):
            continue
        seen[s] = 1
        top = 0
        stack[0] = s
        it[0] = 0
        while top >= 0:
            r = stack[top]
            i = it[top]
            if i == 4:
                order[norder] = r
                norder += 1
                top -= 1
                continue
            it[top] = i + 1
            if not (mask[r] >> i) & 1:
                continue
            ux = r % bw - b + STEPX[i]
            uy = r // bw - b + STEPY[i]
            if ux < -b or ux > b or uy < -b or uy > b:
                continue
            if ux < a and ux > -a and uy < a and uy > -a:
                continue
            u = (uy + b) * bw + ux + b
            if seen[u]:
                continue
            seen[u] = 1
            top += 1
            stack[top] = u
            it[top] = 0
    # pass 2: components on the reversed graph
    for c in range(norder - 1, -1, -1):
        s = order[c]
        if comp[s] >= 0:
            continue
        comp[s] = s
        top = 0
        stack[0] = s
        while top >= 0:
            r = stack[top]
            top -= 1
            x = r % bw - b
            y = r // bw - b
            for i in range(4):
                ux = x - STEPX[i]
                uy = y - STEPY[i]
                if ux < -b or ux > b or uy < -b or uy > b:
                    continue
                if ux < a and ux > -a and uy < a and uy > -a:
                    continue
                u = (uy + b) * bw + ux + b
                if comp[u] >= 0 or not (mask[u] >> i) & 1:
                    continue
                comp[u] = s
                top += 1
                stack[top] = u
    # potentials within each component; the cut is {y = -1/2, x > 0}
    for r in range(n):
        seen[r] = 0
    for s in range(n):
        if comp[s] < 0 or seen[s]:
            continue
        seen[s] = 1
        level[s] = 0
        top = 0
        stack[0] = s
        while top >= 0:
            r = stack[top]
            top -= 1
            x = r % bw - b
            y = r // bw - b
            for i in range(4):
                if not (mask[r] >> i) & 1:
                    continue
                ux = x + STEPX[i]
                uy = y + STEPY[i]
                if ux < -b or ux > b or uy < -b or uy > b:
                    continue
                u = (uy + b) * bw + ux + b
                if comp[u] != comp[r]:
                    continue
                wgt = 0
                if x > 0 and i == 1 and y == -1:
                    wgt = 1
                elif x > 0 and i == 3 and y == 0:
                    wgt = -1
                if not seen[u]:
                    seen[u] = 1
                    level[u] = level[r] + wgt
                    top += 1
                    stack[top] = u
                elif level[u] != level[r] + wgt:
                    return 1
    return 0


def annulus_bounds(int length):
    return length // 2 + 1, (3 * length) // 2


def annulus_flags(int code, int k, double eps, double p, cum, seed,
                  int64_t trial0, int64_t ntrials, int length):
    cdef Model m = make_model(code, 2, k, eps, p, cum)
    cdef int a = length // 2 + 1, b = (3 * length) // 2
    cdef int bw = 2 * b + 1, n = bw * bw
    out = np.zeros((ntrials, 2), dtype=np.uint8)
    cdef uint8_t[:, ::1] o = out
    cdef uint8_t* mask = <uint8_t*>malloc(n)
    cdef int32_t* comp = <int32_t*>malloc(n * sizeof(int32_t))
    cdef int32_t* order = <int32_t*>malloc(n * sizeof(int32_t))
    cdef int32_t* it = <int32_t*>malloc(n * sizeof(int32_t))
    cdef int32_t* stack = <int32_t*>malloc(n * sizeof(int32_t))
    cdef int32_t* level = <int32_t*>malloc(n * sizeof(int32_t))
    cdef uint8_t* seen = <uint8_t*>malloc(n)
    cdef int32_t* stamp = <int32_t*>calloc(n, sizeof(int32_t))
    cdef uint64_t[::1] keys = np.array([stream_key(seed, 1, trial0 + t) for t in range(ntrials)],
                                       dtype=np.uint64)
    cdef int64_t t
    cdef int r, g
    cdef int32_t gen = 0
    with nogil:
        for t in range(ntrials):
            for r in range(n):
                mask[r] = <uint8_t>outcome(&m, mixc(mixc(keys[t], r % bw - b), r // bw - b))
            o[t, 0] = annulus_cycle(mask, b, a, comp, order, it, stack, level, seen)
            g = 1
            gen += 1
            g = g and cross_box(mask, -b, -b, bw, -b, b, -b, -a, 0, 1, stamp, gen, stack)
            gen += 1
            g = g and cross_box(mask, -b, -b, bw, a, b, -b, b, 1, 1, stamp, gen, stack)
            gen += 1
            g = g and cross_box(mask, -b, -b, bw, -b, b, a, b, 0, 0, stamp, gen, stack)
            gen += 1
            g = g and cross_box(mask, -b, -b, bw, -b, -a, -b, b, 1, 0, stamp, gen, stack)
            o[t, 1] = g
    free(mask)
    free(comp)
    free(order)
    free(it)
    free(stack)
    free(level)
    free(seen)
    free(stamp)
    return out


# -- self-avoiding walks -------------------------------------------------------

cdef int64_t saw_rec(uint8_t* grid, int w, int x, int y, int left, int turned) noexcept nogil:
    if left == 0:
        return 1
    cdef int64_t total = 0
    cdef int d, u, v
    for d in range(4):
        if not turned and d != 0 and d != 1:
            continue
        u = x + STEPX[d]
        v = y + STEPY[d]
        if grid[v * w + u]:
            continue
        grid[v * w + u] = 1
        total += saw_rec(grid, w, u, v, left - 1, turned or d == 1)
        grid[v * w + u] = 0
    return total


def saw_count(int n):
    """Walks that go east until a first turn north, times the 8 symmetries."""
    if n == 0:
        return 1
    cdef int w = 2 * n + 3
    cdef uint8_t* grid = <uint8_t*>calloc(w * w, 1)
    cdef int c = n + 1
    cdef int64_t part
    grid[c * w + c] = 1
    grid[c * w + c + 1] = 1
    with nogil:
        part = saw_rec(grid, w, c + 1, c, n - 1, 0)
    free(grid)
    # part = 1 (straight) + T (first turn north); total = 4 * (1 + 2T)
    return 4 * (1 + 2 * (part - 1))
