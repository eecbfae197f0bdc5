import random
from fractions import Fraction

import pytest

from zhatfk import zhat
from zhatfk.lie import su
from zhatfk.plumbing import (LabelSpace, NotWeaklyNegativeDefinite, SingularMatrixError, brieskorn_graph,
                             parse_plumbing, seifert_graph, twist_knot_zero_surgery_graph)
from zhatfk.qlaurent import equal_cong, normalize_cong, parse_series


def test_single_vertex_by_hand():
    # three lattice points l = -alpha, 0, alpha; prefactor q^{-1/2}
    r = zhat.compute_zhat(parse_plumbing("vertex a -1"), su(2), 0, 5)
    assert r.series.terms == {Fraction(-1, 2): -2, Fraction(1, 2): 2}


def test_sigma_237_su2_normal_form():
    r = zhat.compute_zhat(brieskorn_graph(2, 3, 7), su(2), 0, 31)
    n, _, _ = normalize_cong(r.series)
    want = parse_series("1 -q -q^5 +q^10 -q^11 +q^18 +q^30")
    assert n.truncate(31).terms == want.terms


def test_five_two_su3_row():
    r = zhat.compute_zhat(twist_knot_zero_surgery_graph(2), su(3), 0, 13)
    want = parse_series("1 -2q +2q^3 +q^4 -4q^6 +2q^9 +2q^10 +q^12 - ...") * Fraction(1, 6)
    assert equal_cong(r.series, want).equal


@pytest.mark.parametrize("graph,n", [(twist_knot_zero_surgery_graph(2), 2), (brieskorn_graph(2, 3, 7), 2),
                                     (twist_knot_zero_surgery_graph(3), 3)])
def test_engine_matches_box_enumeration(graph, n):
    rs = su(n)
    order = 8
    rows = list(zhat.enumerate_support(graph, rs, 0, order, height=12))
    box = zhat.series_from_support(graph, rs, rows)
    eng = zhat.compute_zhat(graph, rs, 0, order).series
    t = box.min_exp() + order
    assert eng.truncate(t) == box.truncate(t)


def test_stabilization_under_deeper_horizon():
    g = brieskorn_graph(2, 3, 7)
    a = zhat.compute_zhat(g, su(3), 0, 20).series
    b = zhat.compute_zhat(g, su(3), 0, 21).series
    assert a == b.truncate(a.trunc)


def test_unimodular_single_label():
    res = zhat.zhat_all_labels(brieskorn_graph(2, 3, 5), su(3), 10)
    assert len(res) == 1


def test_seifert_su2_block():
    g = seifert_graph(-1, [Fraction(1, 3), Fraction(1, 5), Fraction(3, 7)])
    res = zhat.zhat_all_labels(g, su(2), 20, fold=True)
    got = [r.series for r in res.values()]
    assert any(equal_cong(s, parse_series("1 +q^4 +q^16 + ...")).equal for s in got)


def test_labels_constant_on_weyl_orbits():
    g = seifert_graph(-1, [Fraction(1, 3), Fraction(1, 5), Fraction(3, 7)])
    rs = su(3)
    space = LabelSpace(g, rs)
    full = zhat.zhat_all_labels(g, rs, 8, fold=False)
    for lab in space.labels():
        for w in rs.weyl:
            img = space.act(w, lab).index
            assert full[img].series == full[lab.index].series


def test_orbit_sum_scales_by_orbit_size():
    g = seifert_graph(-1, [Fraction(1, 3), Fraction(1, 5), Fraction(3, 7)])
    plain = zhat.zhat_all_labels(g, su(2), 10)
    summed = zhat.zhat_all_labels(g, su(2), 10, orbit_sum=True)
    for k, r in plain.items():
        assert summed[k].series == r.series * r.info["orbit_size"]


def test_errors():
    with pytest.raises(SingularMatrixError):
        zhat.compute_zhat(parse_plumbing("vertex a 0"), su(2), 0, 5)
    bad = parse_plumbing("vertex c 1\nvertex a -2\nvertex b -2\nvertex d -2\nedge c a\nedge c b\nedge c d")
    with pytest.raises(NotWeaklyNegativeDefinite):
        zhat.compute_zhat(bad, su(2), 0, 5)


def test_budget_exhaustion():
    with pytest.raises(zhat.BudgetExceeded):
        zhat.compute_zhat(brieskorn_graph(2, 3, 7), su(3), 0, 30, budget=zhat.Budget(max_pairs=10))


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_neumann_trials(seed):
    from zhatfk.plumbing import random_wnd_tree
    rng = random.Random(seed)
    g = random_wnd_tree(rng, 5, max_det=8, min_vertices=3)
    for move in ("blowdown-edge", "blowdown-leaf", "zero-chain"):
        t = zhat.neumann_trial(g, su(2), move, rng, 12)
        assert t.ok, (move, t.site, g.to_dsl())


def test_fingerprint_matching_is_not_vacuous():
    a = zhat.label_fingerprints(brieskorn_graph(2, 3, 7), su(2), 10)
    b = zhat.label_fingerprints(brieskorn_graph(2, 3, 5), su(2), 10)
    assert zhat.match_fingerprints(a, a)
    assert not zhat.match_fingerprints(a, b)
