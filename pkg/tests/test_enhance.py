from fractions import Fraction as F

import numpy as np
import pytest

from neighperc.constrained import PatternInstance, Shape, constrained_connect, pattern_occurs
from neighperc.enhance import (I_BAD, MAX_RUSSO_RADIUS, EnhancedConfig, enhanced_connect,
                               enhanced_path, enhanced_sample, finite_difference,
                               forced_outcomes, is_good, is_pivotal_enhanced,
                               monotone_event_check, pivotal_edges, plain_connect, q_of,
                               russo_samples, theta_n)
from neighperc.lattice import Window


def fixture(n, open_p=(), open_q=(), p=0.5, q=0.5):
    """Uniform field with the listed lattice edges and diagonals forced open."""
    win = Window((0, 0), n)
    size = len(win)
    up = [np.ones(size), np.ones(size)]
    uq = [np.ones(size), np.ones(size)]
    for x, y, o in open_p:
        up[o][win.rank((x, y))] = 0.0
    for x, y, s in open_q:
        uq[s][win.rank((x, y))] = 0.0
    return EnhancedConfig(win, up[0], up[1], uq[0], uq[1], p, q)


TRAIL = PatternInstance(Shape.HORIZONTAL, (0, 0)).trail_edges()


def test_q_edge_bypass_fixture():
    cfg = fixture(3, TRAIL + ((2, 1, 0),), [(0, 0, 0)])
    assert cfg.active() == {(0, 0, 0)}
    assert cfg.open_q_edges() == {(0, 0, 0)}
    assert enhanced_connect(cfg, 3)
    verts, kinds = enhanced_path(cfg)
    assert verts == [(0, 0), (2, 1), (3, 1)] and kinds == [1, 0]
    closed = fixture(3, TRAIL + ((2, 1, 0),))
    assert not enhanced_connect(closed)
    rep = is_pivotal_enhanced(cfg, ("q", (0, 0, 0)), 3)
    assert rep.pivotal and rep.with_open and not rep.with_closed


def test_q_edge_needs_its_pattern():
    # trail broken: the diagonal cannot open even with a zero uniform
    cfg = fixture(3, TRAIL[:4] + ((2, 1, 0),), [(0, 0, 0)])
    assert cfg.open_q_edges() == set()
    assert not enhanced_connect(cfg)
    assert not is_pivotal_enhanced(cfg, ("q", (0, 0, 0))).pivotal


def test_association_check_on_random_samples():
    win = Window((0, 0), 6)
    for t in range(40):
        cfg = enhanced_sample(F(1, 2), 1, win, 3, t)
        bond = cfg.bond()
        for x, y, s in cfg.open_q_edges():
            inst = PatternInstance(Shape.HORIZONTAL if s == 0 else Shape.VERTICAL, (x, y))
            assert pattern_occurs(bond, inst)


def test_q_zero_and_p_one():
    win = Window((0, 0), 5)
    for t in range(30):
        cfg = enhanced_sample(F(1, 2), 0, win, 2, t)
        assert cfg.open_q_edges() == set()
        assert enhanced_connect(cfg) == (constrained_connect(cfg.bond(), (0, 0), 5) is not None)
        assert not enhanced_sample(1, 1, win, 2, t).active()


def test_corridor_edges_all_pivotal():
    n = 5
    corridor = [(x, 0, 0) for x in range(n)]
    cfg = fixture(n, corridor)
    piv_p, piv_q = pivotal_edges(cfg)
    assert piv_p == set(corridor) and piv_q == set()
    assert pivotal_edges(cfg, prune=False) == (piv_p, piv_q)


def test_all_open_nothing_pivotal():
    cfg = enhanced_sample(1, F(1, 2), Window((0, 0), 3), 0)
    assert pivotal_edges(cfg, prune=False) == (set(), set())


def test_pruned_sweep_matches_full_sweep():
    win = Window((0, 0), 4)
    for t in range(40):
        p = (0.45, 0.5, 0.55)[t % 3]
        cfg = enhanced_sample(p, F(1, 2), win, 17, t)
        assert pivotal_edges(cfg) == pivotal_edges(cfg, prune=False)


def test_pivotality_ignores_own_uniform():
    rng = np.random.default_rng(0)
    win = Window((0, 0), 4)
    for t in range(8):
        cfg = enhanced_sample(F(1, 2), F(1, 2), win, 5, t)
        for x, y, o in list(cfg.bond().edges())[::7]:
            if not (win.interior((x, y)) or win.interior((x + (o == 0), y + (o == 1)))):
                continue
            arrs = [cfg.up_h.copy(), cfg.up_v.copy()]
            arrs[o][win.rank((x, y))] = rng.random()
            other = EnhancedConfig(win, arrs[0], arrs[1], cfg.uq_h, cfg.uq_v, cfg.p, cfg.q)
            e = ("p", (x, y, o))
            assert is_pivotal_enhanced(cfg, e).pivotal == is_pivotal_enhanced(other, e).pivotal


def test_edges_outside_in_sets_are_never_pivotal():
    win = Window((0, 0), 3)
    for t in range(30):
        cfg = enhanced_sample(F(1, 2), F(1, 2), win, 8, t)
        for x, y, o in cfg.bond().edges():
            b = (x + (o == 0), y + (o == 1))
            if win.on_boundary((x, y)) and win.on_boundary(b):
                a1, a2 = forced_outcomes(cfg, ("p", (x, y, o)))
                assert a1 == a2
                with pytest.raises(ValueError):
                    is_pivotal_enhanced(cfg, ("p", (x, y, o)))
        for x, y in win.vertices():
            for s, (dx, dy) in enumerate(((2, 1), (-1, 2))):
                if win.interior((x, y)) and win.interior((x + dx, y + dy)):
                    continue
                a1, a2 = forced_outcomes(cfg, ("q", (x, y, s)))
                assert a1 == a2


def test_q_of_and_good_edges():
    # vertical edges map to the horizontal diagonal at the same anchor,
    # horizontal edges to the vertical diagonal one step east
    assert q_of((0, 0, 1)) == (0, 0, 0)
    assert q_of((0, 0, 0)) == (1, 0, 1)
    win = Window((0, 0), 6)
    assert len(I_BAD) == 7
    assert not any(is_good((e[0], e[1], e[2]), win) for e in I_BAD)
    assert is_good((3, 0, 1), win)
    assert not is_good((5, 4, 1), win)        # its diagonal leaves the interior


def test_theta_trivial_values():
    assert theta_n(1, F(1, 2), 4, 20, 1).mean == 1.0
    assert theta_n(0, F(1, 2), 4, 20, 1).mean == 0.0


def test_enhanced_below_plain_and_nested_windows():
    for t in range(60):
        big = enhanced_sample(F(1, 2), F(1, 2), Window((0, 0), 8), 4, t)
        assert enhanced_connect(big) <= plain_connect(big)
        small = enhanced_sample(F(1, 2), F(1, 2), Window((0, 0), 5), 4, t)
        # shared uniforms on the nested window
        assert enhanced_connect(big) <= enhanced_connect(small)


def test_monotone_event_check_examples():
    win = Window((0, 0), 6)
    assert monotone_event_check(win, 1, [(0.5, 0.5), (0.5, 0.5)], trials=20) == 0
    assert monotone_event_check(win, 1, [(0.4, 0.2), (0.5, 0.2)], trials=100) == 0
    assert monotone_event_check(win, 1, [(0.5, 0.1), (0.5, 0.4)], trials=100) == 0
    with pytest.raises(ValueError):
        monotone_event_check(win, 1, [(0.5, 0.4), (0.5, 0.1)])


def test_russo_guards_and_p_one():
    with pytest.raises(ValueError):
        russo_samples(0.5, 0.3, MAX_RUSSO_RADIUS + 1, 1, 0)
    counts = russo_samples(1, 0.5, 4, 10, 0)
    assert np.all(counts[:, 1] == 0) and np.all(counts[:, 0] == 0)
    counts = russo_samples(0.5, 0.3, 4, 30, 0)
    assert np.all(counts[:, 2] + counts[:, 3] == counts[:, 0])


def test_finite_difference_is_nonnegative_pathwise():
    est = finite_difference(0.5, 0.3, 4, 200, 3)
    assert est.mean >= 0
    with pytest.raises(ValueError):
        finite_difference(0.5, 0.3, 4, 2, 3, param="r")


def test_finite_difference_interval_has_width_without_flips():
    # q-flips are rare at this size; a zero count must not give a point interval
    est = finite_difference(0.5, 0.3, 2, 50, 3, param="q")
    assert est.method == "wilson" and est.lo <= est.mean < est.hi


def test_connect_rejects_wrong_radius():
    cfg = enhanced_sample(0.5, 0.5, Window((0, 0), 4), 0)
    with pytest.raises(ValueError):
        enhanced_connect(cfg, 5)
