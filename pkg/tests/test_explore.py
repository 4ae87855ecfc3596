from fractions import Fraction as F

import numpy as np
import pytest

from neighperc.explore import (Termination, classify_auto_open, decompose,
                               explore_dual_forward, first_cluster_sizes, forward_set,
                               invariant_suite, is_pivotal, left_windings, sandwich_holds)
from neighperc.lattice import Edge, Window, Winding, fill, primal_to_dual, square_siblings, winding_class
from neighperc.models import Corner, IidDirected, TwoEps, sample_configuration


def _explore(spec, radius, seed, trial=0):
    cfg = sample_configuration(spec, Window((0, 0), radius + 1), seed, trial)
    return cfg, explore_dual_forward(cfg, (0, 0), Window((0, 0), radius))


def _closure(cfg, x, win):
    """Recursive forward closure, independent of forward_set."""
    out = set()

    def rec(v):
        if v in out:
            return
        out.add(v)
        if win.on_boundary(v):
            return
        m = cfg.outcome(v)
        for i, (dx, dy) in enumerate(((1, 0), (0, 1), (-1, 0), (0, -1))):
            if m >> i & 1:
                rec((v[0] + dx, v[1] + dy))
    rec(x)
    return out


def test_forward_set_examples():
    win = Window((0, 0), 2)
    assert forward_set(sample_configuration(IidDirected(0), win, 1), (0, 0), win) == ({(0, 0)}, False)
    fs, esc = forward_set(sample_configuration(IidDirected(1), win, 1), (0, 0), win)
    assert esc and fs == set(win.vertices()) - {(a, b) for a in (-2, 2) for b in (-2, 2)}
    with pytest.raises(ValueError):
        forward_set(sample_configuration(IidDirected(1), win, 1), (3, 0), win)


def test_forward_set_matches_hand_closure_on_5x5():
    win = Window((0, 0), 2)
    for t in range(50):
        cfg = sample_configuration(TwoEps(0), win, 21, t)
        fs, esc = forward_set(cfg, (0, 0), win)
        assert fs == _closure(cfg, (0, 0), win)
        assert esc == any(win.on_boundary(v) for v in fs)


def test_immediate_stop():
    cfg = sample_configuration(IidDirected(1), Window((0, 0), 4), 0)
    rec = explore_dual_forward(cfg, (0, 0), Window((0, 0), 3))
    assert len(rec.steps) == 4 and not any(s.open for s in rec.steps)
    assert rec.visited == {(0, 0)}
    assert rec.termination is Termination.STOPPED
    assert decompose(rec) == [{(0, 0)}]
    assert [s.edge.direction for s in rec.steps] == [0, 1, 2, 3]


def test_start_too_close_to_boundary():
    cfg = sample_configuration(TwoEps(0), Window((0, 0), 4), 0)
    with pytest.raises(ValueError):
        explore_dual_forward(cfg, (3, 0), Window((0, 0), 3))


def test_is_pivotal_examples():
    e = primal_to_dual(Edge((0, 0), 0))
    n, w, s = square_siblings(e)
    assert not is_pivotal({}, e)
    assert is_pivotal({w: False}, e)
    assert not is_pivotal({w: True}, e)
    with pytest.raises(ValueError):
        is_pivotal({e: True}, e)


def test_classify_auto_open_examples():
    spec = Corner(F(1, 2))
    e = primal_to_dual(Edge((0, 0), 0))
    n, w, s = square_siblings(e)
    assert classify_auto_open({w: False}, e, spec)
    assert not classify_auto_open({s: False}, e, spec)
    assert not classify_auto_open({w: True}, e, spec)
    with pytest.raises(ValueError):
        classify_auto_open({w: False}, e, TwoEps(0))


def _replay(rec):
    """Replay the record, checking Rules 1 and 2 and the pivotal flags."""
    visited = {rec.start}
    history = {}
    pivotal_steps = set(rec.pivotal_times)
    filled = fill(visited)
    for s in rec.steps:
        head = s.edge.head
        assert head not in visited, "rule 1"
        assert head not in filled - visited, "rule 2"
        assert is_pivotal(history, s.edge) == (s.index in pivotal_steps)
        history[s.edge] = s.open
        if s.open:
            visited.add(head)
            filled = fill(visited)
    assert visited == rec.visited
    assert history == rec.revealed


@pytest.mark.parametrize("spec", [TwoEps(0), TwoEps(F(1, 2)), Corner(F(1, 2))],
                         ids=lambda s: s.label())
def test_rules_pivotals_and_list_collapse(spec):
    for t in range(150):
        cfg, rec = _explore(spec, 10, 8, t)
        _replay(rec)
        assert all(ev.list_length == 1 for ev in rec.pivotal_events)
        clusters = decompose(rec)
        assert set().union(*clusters) == rec.visited
        assert sum(map(len, clusters)) == len(rec.visited)
        assert len(clusters) == len(rec.pivotal_events) + 1 - (
            len(rec.pivotal_events) and not rec.pivotal_events[-1].open)
        if rec.termination is Termination.STOPPED:
            fwd, _ = forward_set(cfg, (0, 0), rec.window, dual=True)
            assert sandwich_holds(rec, fwd)
        if spec.kind == "2dp":
            assert left_windings(rec) == 0
        else:
            for ev in rec.pivotal_events:
                if ev.auto_open:
                    assert ev.open


def test_no_pivotals_gives_single_cluster():
    for t in range(200):
        _, rec = _explore(TwoEps(0), 8, 31, t)
        if not rec.pivotal_events:
            assert decompose(rec) == [rec.visited]
            return
    pytest.fail("no pivotal-free run found")


def test_one_open_pivotal_then_stop_gives_two_clusters():
    for t in range(500):
        _, rec = _explore(TwoEps(0), 8, 32, t)
        # a stopped run ends on a closed pivotal reveal, which opens no new cluster
        if rec.termination is Termination.STOPPED and rec.t_piv == 1:
            cl = decompose(rec)
            assert len(cl) == 2 and not cl[0] & cl[1]
            return
    pytest.fail("no run with exactly one open pivotal")


def test_determinism_and_json():
    a = _explore(TwoEps(0), 12, 5, 9)[1]
    b = _explore(TwoEps(0), 12, 5, 9)[1]
    assert a == b
    assert a.to_json() == b.to_json()
    assert a.to_json()["steps"][0]["n"] == 0


def test_left_winding_exists_without_rigidity():
    # iid edges allow all three dual edges around one vertex to be open
    total = 0
    for t in range(100):
        _, rec = _explore(IidDirected(F(1, 2)), 10, 3, t)
        for e1, e2, e3 in rec.open_triples():
            if winding_class(e1, e2, e3) is Winding.LEFT:
                total += 1
    assert total > 0


def test_invariant_suite_small():
    r = invariant_suite(400, 16, 99)
    assert r["sandwich_violations"] == 0
    assert r["list_length_violations"] == 0
    assert r["left_windings"] == 0
    assert r["stopped"] + r["escaped"] == 400
    tail = r["tpiv_tail"]
    assert all(a >= b for a, b in zip(tail, tail[1:]))


def test_corner_auto_open_tail_decays():
    r = invariant_suite(3000, 16, 5, spec=Corner(F(1, 2)))
    tail = np.array(r["tpiv_tail"][:6], dtype=float)
    assert r["list_length_violations"] == 0
    ratios = tail[1:] / tail[:-1]
    # log-linear fit of the tail with a bootstrap-free normal CI on the slope
    ns = np.arange(1, len(tail) + 1)
    slope, icept = np.polyfit(ns, np.log(tail), 1)
    resid = np.log(tail) - (slope * ns + icept)
    se = np.sqrt(resid.var(ddof=2) / ((ns - ns.mean()) ** 2).sum())
    assert slope + 1.96 * se < 0
    assert np.all(ratios < 1)


def test_first_cluster_sizes_bounds():
    sizes = first_cluster_sizes(TwoEps(0), 6, 200, 1)
    assert sizes.min() >= 1 and sizes.max() <= 6
    assert np.array_equal(sizes, first_cluster_sizes(TwoEps(0), 6, 200, 1))
