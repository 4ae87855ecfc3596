from fractions import Fraction
from math import sqrt

import numpy as np
import pytest

from neighperc.lattice import Window
from neighperc.models import (AllOrNone, Corner, IidDirected, IsotropicDegreeTwo, ModelSpec,
                              NsEw, TwoDpNeighbor, TwoEps, aon_to_site,
                              couple_iid_directed_undirected, edge_marginal, mask_str,
                              sample_configuration, sample_coupled_monotone,
                              vertex_outcome_distribution)

E, N, W, S = 1, 2, 4, 8
F = Fraction
ALL_SPECS = [TwoEps(0), TwoEps(F(1, 5)), TwoDpNeighbor(3, F(1, 4)), TwoDpNeighbor(2, F(7, 8)),
             IidDirected(F(1, 3)), AllOrNone(F(3, 5)), NsEw(F(1, 2)), NsEw(F(2, 3)),
             Corner(F(1, 2)), Corner(F(3, 10)), Corner(F(4, 5)), IsotropicDegreeTwo(F(1, 12))]


def dist(spec):
    return dict(vertex_outcome_distribution(spec))


@pytest.mark.parametrize("spec", ALL_SPECS, ids=lambda s: s.label())
def test_masses_are_rational_and_sum_to_one(spec):
    d = vertex_outcome_distribution(spec)
    assert all(isinstance(q, Fraction) and q > 0 for _, q in d)
    assert sum(q for _, q in d) == 1


def test_twoeps_masses():
    for eps in (F(0), F(1, 10), F(1, 2), F(9, 10)):
        d = dist(TwoEps(eps))
        pairs = [m for m in range(16) if bin(m).count("1") == 2]
        triples = [m for m in range(16) if bin(m).count("1") == 3]
        assert all(d[m] == (1 - eps) / 6 for m in pairs)
        if eps:
            assert all(d[m] == eps / 4 for m in triples)
        assert set(d) <= set(pairs) | set(triples)


def test_corner_and_iso_examples():
    assert dist(Corner(F(1, 2))) == {E | N: F(1, 4), N | W: F(1, 4), W | S: F(1, 4), S | E: F(1, 4)}
    six = dist(IsotropicDegreeTwo(F(1, 6)))
    assert len(six) == 6 and set(six.values()) == {F(1, 6)}
    iso = dist(IsotropicDegreeTwo(F(1, 12)))
    assert iso[E | N] == F(1, 12) and iso[N | S] == F(1, 3)
    assert dist(NsEw(F(1, 2))) == {N | S: F(1, 2), E | W: F(1, 2)}
    assert dist(IsotropicDegreeTwo(0)) == dist(NsEw(F(1, 2)))
    assert dist(IsotropicDegreeTwo(F(1, 4))) == dist(Corner(F(1, 2)))


def test_edge_marginal_examples():
    assert edge_marginal(TwoEps(0)) == F(1, 2)
    assert edge_marginal(TwoEps(F(1, 5))) == F(11, 20)
    for p in (F(0), F(1, 3), F(1)):
        assert edge_marginal(AllOrNone(p)) == p


def test_edge_marginal_equals_p_on_grid():
    for d in (1, 2, 3):
        for i in range(21):
            p = F(i, 20)
            spec = TwoDpNeighbor(d, p)
            for direction in range(2 * d):
                assert edge_marginal(spec, direction) == p


@pytest.mark.parametrize("spec", [TwoEps(F(3, 10)), NsEw(F(3, 5)), Corner(F(1, 3)),
                                  IidDirected(F(2, 7))], ids=lambda s: s.label())
def test_isotropy(spec):
    assert len({edge_marginal(spec, i) for i in range(4)}) == 1


def test_invalid_specs():
    with pytest.raises(ValueError):
        TwoEps(-1)
    with pytest.raises(ValueError):
        IidDirected(F(3, 2))
    with pytest.raises(ValueError):
        ModelSpec("corner", F(1, 2), 3)
    with pytest.raises(ValueError):
        IsotropicDegreeTwo(F(1, 3))
    with pytest.raises(ValueError):
        ModelSpec("bogus", F(1, 2))


def test_sample_degree_and_extremes():
    win = Window((0, 0), 10)
    cfg = sample_configuration(TwoEps(0), win, 4)
    assert all(bin(int(m)).count("1") == 2 for m in cfg.outcomes)
    assert np.all(sample_configuration(IidDirected(1), win, 4).outcomes == 15)
    assert np.all(sample_configuration(IidDirected(0), win, 4).outcomes == 0)
    assert set(sample_configuration(AllOrNone(F(1, 2)), win, 4).outcomes.tolist()) <= {0, 15}
    assert set(sample_configuration(NsEw(F(1, 2)), win, 4).outcomes.tolist()) <= {N | S, E | W}
    with pytest.raises(ValueError):
        sample_configuration(TwoEps(0), Window((0, 0), 0), 1)


def test_sampling_is_reproducible_and_window_independent():
    a = sample_configuration(TwoEps(F(1, 3)), Window((0, 0), 6), 11, trial=3)
    b = sample_configuration(TwoEps(F(1, 3)), Window((0, 0), 6), 11, trial=3)
    assert a == b
    sub = sample_configuration(TwoEps(F(1, 3)), Window((2, -1), 2), 11, trial=3)
    assert all(sub.outcome(v) == a.outcome(v) for v in sub.window.vertices())
    c = sample_configuration(TwoEps(F(1, 3)), Window((0, 0), 6), 11, trial=4)
    assert not a == c


def test_corner_frequency_of_north_east():
    win = Window((0, 0), 500)
    cfg = sample_configuration(Corner(F(1, 2)), win, 2024)
    n = len(win)
    hits = int(np.sum(cfg.outcomes == (E | N)))
    assert abs(hits - n / 4) <= 4 * sqrt(n * 0.25 * 0.75)


def test_text_format():
    cfg = sample_configuration(IidDirected(1), Window((0, 0), 1), 0)
    assert cfg.text() == "ENWS ENWS ENWS\n" * 3
    assert mask_str(E | N) == "EN--"
    assert mask_str(S) == "---S"


def test_monotone_coupling():
    win = Window((0, 0), 8)
    for t in range(200):
        lo, hi = sample_coupled_monotone(TwoEps(0).with_p(F(9, 20)), TwoEps(0).with_p(F(11, 20)),
                                         win, 1, t)
        assert np.all(lo.outcomes & ~hi.outcomes == 0)
    a, b = sample_coupled_monotone(TwoEps(0), TwoEps(0), win, 1)
    assert a == b
    a, b = sample_coupled_monotone(TwoDpNeighbor(2, 0), TwoDpNeighbor(2, 1), win, 1)
    assert np.all(a.outcomes == 0) and np.all(b.outcomes == 15)
    with pytest.raises(ValueError):
        sample_coupled_monotone(TwoEps(F(1, 2)), TwoEps(0), win, 1)
    with pytest.raises(ValueError):
        sample_coupled_monotone(Corner(F(1, 2)), TwoEps(0), win, 1)


def test_monotone_coupling_in_three_dimensions():
    win = Window((0, 0, 0), 3)
    for t in range(20):
        lo, hi = sample_coupled_monotone(TwoDpNeighbor(3, F(1, 5)), TwoDpNeighbor(3, F(2, 5)),
                                         win, 8, t)
        assert np.all(lo.outcomes & ~hi.outcomes == 0)


def test_aon_to_site():
    win = Window((0, 0), 500)
    cfg = sample_configuration(AllOrNone(F(3, 5)), win, 3)
    site = aon_to_site(cfg)
    assert np.array_equal(site, cfg.outcomes == 15)
    n = len(win)
    assert abs(int(site.sum()) - 0.6 * n) <= 4 * sqrt(n * 0.24)
    with pytest.raises(ValueError):
        aon_to_site(sample_configuration(TwoEps(0), Window((0, 0), 2), 3))


def test_iid_coupling_extremes():
    win = Window((0, 0), 4)
    c0 = couple_iid_directed_undirected(0, win, 1)
    assert c0.forward_set == c0.cluster == {(0, 0)}
    c1 = couple_iid_directed_undirected(1, win, 1)
    # boundary vertices are not expanded, so the four corners stay out of reach
    corners = {(a, b) for a in (-4, 4) for b in (-4, 4)}
    assert c1.forward_set == c1.cluster == set(win.vertices()) - corners


def test_iid_coupling_set_equality_and_single_consultation():
    win = Window((0, 0), 16)
    for t in range(100):
        c = couple_iid_directed_undirected(F(1, 2), win, 6, t)
        assert c.forward_set == c.cluster
        for key, (x, i) in c.consulted.items():
            assert c.bond[key] == c.directed[(x, i)]
        assert len(c.consulted) == len(set(c.consulted))


def test_iid_coupling_consulted_edges_are_fair_coins():
    win = Window((0, 0), 12)
    ones = total = 0
    for t in range(400):
        c = couple_iid_directed_undirected(F(1, 2), win, 77, t)
        vals = [c.bond[k] for k in c.consulted]
        ones += sum(vals)
        total += len(vals)
    # chi-square with one degree of freedom at level 1e-3
    chi2 = (ones - total / 2) ** 2 / (total / 2) + (total - ones - total / 2) ** 2 / (total / 2)
    assert chi2 < 10.83
