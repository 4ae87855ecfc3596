"""Exact ground truth: conditional probabilities of dual edges, exhaustive
window probabilities, self-avoiding walk counts and brute-force pattern
avoiding connectivity.  Everything here is rational arithmetic."""

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from itertools import product

from ._backend import kernels
from .constrained import path_uses_pattern
from .lattice import STEP, Window
from .models import as_fraction, vertex_outcome_distribution

GUARD = 10 ** 8
SAW_MAX = 20
CONNECTIVE_CONSTANT_UPPER = Fraction("2.679192495")


class GuardError(ValueError):
    """Raised when an exhaustive computation would exceed its size guard."""


class Status(Enum):
    UNKNOWN = "UnexploredOpenUnknown"
    OPEN = "RevealedOpen"
    CLOSED = "RevealedClosed"


ROLES = ("N", "W", "S")


@dataclass(frozen=True)
class ConditionalScenario:
    """Statuses of the three sibling dual edges of the target's unit square.

    Roles are relative to the target: N, W and S are the duals of the owning
    primal vertex's out-edges rotated by 1, 2 and 3 quarter turns from the
    target's primal edge.
    """

    spec: object
    conditioning: dict = field(default_factory=dict)

    def __post_init__(self):
        cond = {}
        for role, st in self.conditioning.items():
            if role not in ROLES:
                raise ValueError(f"unknown sibling role {role!r}")
            cond[role] = Status(st)
        object.__setattr__(self, "conditioning", cond)


def conditional_dual_probability(sc, target_direction=0):
    """P(target dual edge open | sibling statuses), exactly.

    A dual edge is open iff its primal edge is closed, so a revealed-open
    sibling means the owner's primal out-edge in that role is closed.
    """
    num = den = Fraction(0)
    for mask, q in vertex_outcome_distribution(sc.spec):
        ok = True
        for k, role in enumerate(ROLES, start=1):
            st = sc.conditioning.get(role, Status.UNKNOWN)
            primal_open = bool(mask >> ((target_direction + k) % 4) & 1)
            if st is Status.OPEN and primal_open or st is Status.CLOSED and not primal_open:
                ok = False
                break
        if not ok:
            continue
        den += q
        if not mask >> target_direction & 1:
            num += q
    if den == 0:
        raise ValueError("conditioning event has probability zero")
    return num / den


# named scenarios exposed on the command line
SCENARIOS = {
    "w-closed": {"W": Status.CLOSED},
    "s-open": {"S": Status.OPEN},
    "w-open": {"W": Status.OPEN},
    "ws-open": {"W": Status.OPEN, "S": Status.OPEN},
    "none": {},
}


class _Need(Exception):
    def __init__(self, vertex):
        self.vertex = vertex


def exhaustive_window_probability(spec, radius, predicate, support=None, guard=GUARD):
    """Exact probability that ``predicate(get, window)`` holds, where
    ``get(v)`` returns the outcome mask of vertex v of the centred window.

    Only vertices in ``support`` (default: the interior of the window) are
    random; the predicate may not ask for any other vertex.  Configurations
    are enumerated lazily, branching only on vertices the predicate reads.
    """
    if radius > 2:
        raise GuardError("exhaustive enumeration is limited to radius <= 2")
    win = Window((0,) * spec.d, radius)
    if support is None:
        support = [v for v in win.vertices() if win.interior(v)]
    support = set(map(tuple, support))
    dist = vertex_outcome_distribution(spec)
    if len(dist) ** len(support) > guard:
        raise GuardError(f"{len(dist)}^{len(support)} configurations exceed the guard")

    total = Fraction(0)
    stack = [({}, Fraction(1))]
    while stack:
        assigned, mass = stack.pop()

        def get(v):
            v = tuple(v)
            if v not in support:
                raise KeyError(f"predicate read {v}, outside the support")
            if v not in assigned:
                raise _Need(v)
            return assigned[v]
        try:
            ok = predicate(get, win)
        except _Need as need:
            for mask, q in dist:
                stack.append(({**assigned, need.vertex: mask}, mass * q))
            continue
        if ok:
            total += mass
    return total


def escapes(get, win):
    """Forward set of the window centre reaches the window boundary."""
    d = win.dim
    o = win.center
    seen, todo = {o}, [o]
    while todo:
        v = todo.pop()
        if win.on_boundary(v):
            return True
        m = get(v)
        for i in range(2 * d):
            if m >> i & 1:
                u = list(v)
                u[i % d] += 1 if i < d else -1
                u = tuple(u)
                if u not in seen:
                    seen.add(u)
                    todo.append(u)
    return False


def always(get, win):
    return True


def saw_count(n):
    """Number of n-step self-avoiding walks on Z^2 from the origin."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if n > SAW_MAX:
        raise GuardError(f"self-avoiding walk enumeration is limited to n <= {SAW_MAX}")
    return int(kernels.saw_count(n))


def union_bound_curve(p, n):
    """[(k, c_k p^k) for k = 1..n] as exact rationals."""
    p = as_fraction(p)
    return [(k, saw_count(k) * p ** k) for k in range(1, n + 1)]


def simple_path_connect(config, source, n):
    """Brute force: does some simple open path from ``source`` to the
    boundary of the radius-n box avoid every forbidden pattern?"""
    source = tuple(source)
    box = Window(source, n)
    path, seen = [source], {source}

    def rec():
        x = path[-1]
        if box.on_boundary(x):
            return not path_uses_pattern(path, config)
        for dx, dy in STEP:
            y = (x[0] + dx, x[1] + dy)
            if y in seen or y not in box or not config.open_between(x, y):
                continue
            path.append(y)
            seen.add(y)
            if (len(path) < 6 or not path_uses_pattern(path[-6:], config)) and rec():
                return True
            path.pop()
            seen.discard(y)
        return False
    return rec()


__all__ = [
    "Status", "ConditionalScenario", "conditional_dual_probability", "SCENARIOS",
    "exhaustive_window_probability", "escapes", "always", "saw_count",
    "union_bound_curve", "simple_path_connect", "GuardError", "CONNECTIVE_CONSTANT_UPPER",
]
