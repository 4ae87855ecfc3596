"""Square-lattice geometry: directions, the primal/dual edge bijection,
windows, Fill and winding classification.

Dual vertices use integer coordinates: the dual vertex ``(a, b)`` stands for
the point ``(a + 1/2, b + 1/2)``.  Directed edges are ``(tail, direction)``
pairs with directions indexed counter-clockwise: 0=E, 1=N, 2=W, 3=S.  For
general dimension d the 2d directions are ``+e_1..+e_d, -e_1..-e_d``, which
reduces to the same order when d = 2.
"""

from dataclasses import dataclass
from enum import Enum
from itertools import product

E, N, W, S = 0, 1, 2, 3
DIR_NAMES = "ENWS"
STEP = ((1, 0), (0, 1), (-1, 0), (0, -1))


def opposite(d):
    return (d + 2) % 4


def rot_ccw(d, k=1):
    return (d + k) % 4


def unit(d, dim):
    """Unit step of direction index ``d`` in dimension ``dim``."""
    v = [0] * dim
    v[d % dim] = 1 if d < dim else -1
    return tuple(v)


def det(d1, d2):
    (x1, y1), (x2, y2) = STEP[d1], STEP[d2]
    return x1 * y2 - y1 * x2


# incoming direction -> out-directions ordered by increasing det: right, straight, left
TURNS = tuple((rot_ccw(d, 3), d, rot_ccw(d, 1)) for d in range(4))


@dataclass(frozen=True, order=True)
class Edge:
    """Directed edge on Z^2 (primal or dual, depending on context)."""

    tail: tuple
    direction: int

    @property
    def head(self):
        dx, dy = STEP[self.direction]
        return (self.tail[0] + dx, self.tail[1] + dy)

    def __repr__(self):
        return f"Edge({self.tail}->{self.head})"


def edge_between(u, v):
    dx, dy = v[0] - u[0], v[1] - u[1]
    try:
        return Edge(tuple(u), STEP.index((dx, dy)))
    except ValueError:
        raise ValueError(f"{u} and {v} are not nearest neighbours") from None


# primal direction at z -> (dual tail offset from z, dual direction)
_P2D = {
    E: ((0, -1), N),
    N: ((0, 0), W),
    W: ((-1, 0), S),
    S: ((-1, -1), E),
}
# dual direction -> (owner offset from dual tail, primal direction)
_D2P = {dd: ((-off[0], -off[1]), pd) for pd, (off, dd) in _P2D.items()}


def primal_to_dual(e):
    off, dd = _P2D[e.direction]
    return Edge((e.tail[0] + off[0], e.tail[1] + off[1]), dd)


def dual_to_primal(e):
    off, pd = _D2P[e.direction]
    return Edge((e.tail[0] + off[0], e.tail[1] + off[1]), pd)


def owner(e):
    """Primal vertex whose out-edge is dual to ``e``."""
    return dual_to_primal(e).tail


def square_siblings(e):
    """(north, west, south) siblings of dual edge ``e`` taken in the east role."""
    p = dual_to_primal(e)
    return tuple(primal_to_dual(Edge(p.tail, rot_ccw(p.direction, k))) for k in (1, 2, 3))


@dataclass(frozen=True)
class Window:
    """L-infinity ball of radius ``radius`` around ``center``."""

    center: tuple
    radius: int

    def __post_init__(self):
        if self.radius < 0:
            raise ValueError("radius must be non-negative")
        object.__setattr__(self, "center", tuple(int(c) for c in self.center))

    @property
    def dim(self):
        return len(self.center)

    @property
    def width(self):
        return 2 * self.radius + 1

    def norm(self, v):
        return max(abs(a - c) for a, c in zip(v, self.center))

    def __contains__(self, v):
        return self.norm(v) <= self.radius

    def on_boundary(self, v):
        return self.norm(v) == self.radius

    def interior(self, v):
        return self.norm(v) < self.radius

    def rank(self, v):
        """Row-major rank, first coordinate fastest."""
        r, w = 0, 1
        for a, c in zip(v, self.center):
            r += (a - c + self.radius) * w
            w *= self.width
        return r

    def vertex(self, rank):
        out = []
        for c in self.center:
            rank, q = divmod(rank, self.width)
            out.append(q - self.radius + c)
        return tuple(out)

    def vertices(self):
        """All vertices in rank order."""
        rng = [range(c - self.radius, c + self.radius + 1) for c in reversed(self.center)]
        for t in product(*rng):
            yield tuple(reversed(t))

    def __len__(self):
        return self.width ** self.dim


def _neighbours(v):
    x, y = v
    return ((x + 1, y), (x, y + 1), (x - 1, y), (x, y - 1))


def fill(cells):
    """``cells`` together with every finite hole of its complement."""
    a = set(map(tuple, cells))
    if not a:
        raise ValueError("fill of an empty set")
    xs = [v[0] for v in a]
    ys = [v[1] for v in a]
    x0, x1, y0, y1 = min(xs) - 1, max(xs) + 1, min(ys) - 1, max(ys) + 1
    outside = {(x0, y0)}
    stack = [(x0, y0)]
    while stack:
        v = stack.pop()
        for u in _neighbours(v):
            if x0 <= u[0] <= x1 and y0 <= u[1] <= y1 and u not in a and u not in outside:
                outside.add(u)
                stack.append(u)
    return {
        (x, y)
        for x in range(x0 + 1, x1)
        for y in range(y0 + 1, y1)
        if (x, y) not in outside
    }


class Winding(Enum):
    LEFT = "LeftWinding"
    RIGHT = "RightWinding"
    NEITHER = "Neither"


def winding_class(e1, e2, e3):
    if e1.head != e2.tail or e2.head != e3.tail:
        raise ValueError("edges are not consecutive")
    t1, t2 = det(e1.direction, e2.direction), det(e2.direction, e3.direction)
    if t1 == t2 == 1:
        # a left winding, e.g. (down, right, up), turns ccw twice
        return Winding.LEFT
    if t1 == t2 == -1:
        return Winding.RIGHT
    return Winding.NEITHER
