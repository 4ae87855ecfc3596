import itertools
import random

import pytest

from neighperc.lattice import (Edge, Window, Winding, dual_to_primal, edge_between, fill,
                               owner, primal_to_dual, square_siblings, winding_class)


def test_primal_to_dual_examples():
    assert primal_to_dual(edge_between((0, 1), (1, 1))) == edge_between((0, 0), (0, 1))
    assert primal_to_dual(edge_between((0, 0), (1, 0))) == edge_between((0, -1), (0, 0))


def test_dual_to_primal_examples():
    assert dual_to_primal(edge_between((0, 0), (0, 1))) == edge_between((0, 1), (1, 1))
    assert dual_to_primal(edge_between((5, 2), (5, 3))) == edge_between((5, 3), (6, 3))


def test_table_rows():
    z = (3, -2)
    exp = {0: ((3, -3), (3, -2)), 1: ((3, -2), (2, -2)),
           2: ((2, -2), (2, -3)), 3: ((2, -3), (3, -3))}
    for d, (t, h) in exp.items():
        e = primal_to_dual(Edge(z, d))
        assert (e.tail, e.head) == (t, h)


def test_round_trip_exhaustive_on_10x10():
    for x, y in itertools.product(range(-5, 5), repeat=2):
        for d in range(4):
            e = Edge((x, y), d)
            assert dual_to_primal(primal_to_dual(e)) == e
            assert primal_to_dual(dual_to_primal(e)) == e


def test_square_siblings_share_owner_and_cycle():
    for d in range(4):
        e = primal_to_dual(Edge((0, 0), d))
        quad = (e,) + square_siblings(e)
        assert {owner(s) for s in quad} == {(0, 0)}
        assert {dual_to_primal(s).direction for s in quad} == {0, 1, 2, 3}
        # ccw cycle: each head is the next tail
        for a, b in zip(quad, quad[1:] + quad[:1]):
            assert a.head == b.tail
        n, w, s = square_siblings(e)
        assert square_siblings(n) == (w, s, e)


def test_east_side_siblings():
    east = primal_to_dual(Edge((0, 0), 0))
    n, w, s = square_siblings(east)
    assert (n.tail, n.head) == ((0, 0), (-1, 0))
    assert (w.tail, w.head) == ((-1, 0), (-1, -1))
    assert (s.tail, s.head) == ((-1, -1), (0, -1))


def test_window_geometry():
    w = Window((1, 2), 3)
    assert len(list(w.vertices())) == 49 == len(w)
    assert all(w.vertex(w.rank(v)) == v for v in w.vertices())
    assert [w.rank(v) for v in w.vertices()] == list(range(49))
    assert sum(w.on_boundary(v) for v in w.vertices()) == 49 - 25
    w3 = Window((0, 0, 0), 1)
    assert len(list(w3.vertices())) == 27


def test_fill_examples():
    assert fill({(0, 0)}) == {(0, 0)}
    ring = {(x, y) for x in range(3) for y in range(3)} - {(1, 1)}
    assert fill(ring) == ring | {(1, 1)}
    tromino = {(0, 0), (1, 0), (0, 1)}
    assert fill(tromino) == tromino
    with pytest.raises(ValueError):
        fill(set())


def _brute_fill(a):
    """Holes are complement cells that cannot reach far away."""
    a = set(a)
    xs = [v[0] for v in a]
    ys = [v[1] for v in a]
    lo, hi = min(xs + ys) - 2, max(xs + ys) + 2
    out = set(a)
    for x in range(lo, hi + 1):
        for y in range(lo, hi + 1):
            if (x, y) in a:
                continue
            seen, stack, free = {(x, y)}, [(x, y)], False
            while stack and not free:
                u = stack.pop()
                if not (lo < u[0] < hi and lo < u[1] < hi):
                    free = True
                    break
                for v in ((u[0] + 1, u[1]), (u[0] - 1, u[1]), (u[0], u[1] + 1), (u[0], u[1] - 1)):
                    if v not in a and v not in seen:
                        seen.add(v)
                        stack.append(v)
            if not free:
                out.add((x, y))
    return out


def test_fill_against_brute_force_on_random_connected_sets():
    r = random.Random(5)
    for _ in range(200):
        a = {(0, 0)}
        for _ in range(r.randrange(1, 25)):
            x, y = r.choice(sorted(a))
            dx, dy = r.choice(((1, 0), (-1, 0), (0, 1), (0, -1)))
            a.add((x + dx, y + dy))
        f = fill(a)
        assert a <= f
        assert fill(f) == f
        assert f == _brute_fill(a)


def test_winding_examples():
    e = edge_between
    left = (e((0, 1), (0, 0)), e((0, 0), (1, 0)), e((1, 0), (1, 1)))
    right = (e((1, 1), (1, 0)), e((1, 0), (0, 0)), e((0, 0), (0, 1)))
    straight = (e((0, 0), (1, 0)), e((1, 0), (2, 0)), e((2, 0), (3, 0)))
    assert winding_class(*left) is Winding.LEFT
    assert winding_class(*right) is Winding.RIGHT
    assert winding_class(*straight) is Winding.NEITHER
    assert len({owner(x) for x in left}) == 1
    assert len({owner(x) for x in right}) == 3
    with pytest.raises(ValueError):
        winding_class(left[0], left[2], left[1])


def test_winding_owner_property_on_all_turn_triples():
    for d0 in range(4):
        for t1 in (-1, 0, 1):
            for t2 in (-1, 0, 1):
                d1, d2 = (d0 + t1) % 4, (d0 + t1 + t2) % 4
                e1 = Edge((0, 0), d0)
                e2 = Edge(e1.head, d1)
                e3 = Edge(e2.head, d2)
                c = winding_class(e1, e2, e3)
                owners = {owner(x) for x in (e1, e2, e3)}
                if c is Winding.LEFT:
                    assert len(owners) == 1
                if c is Winding.RIGHT:
                    assert len(owners) == 3
