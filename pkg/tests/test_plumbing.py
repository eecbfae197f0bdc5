import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from zhatfk.lie import su
from zhatfk.plumbing import (LabelSpace, MovePatternError, PlumbingParseError, b_labels, graph_from_json,
                             graphs_isomorphic, inertia, is_negative_definite, is_weakly_negative_definite,
                             linking_matrix, matrix_data, neumann_move, parse_plumbing, random_wnd_tree,
                             theta_exponent, torus_knot_complement_graph, twist_knot_zero_surgery_graph,
                             weyl_fold_labels)


def test_single_vertex():
    g = parse_plumbing("vertex a -1")
    assert g.ids == ["a"] and g.framings["a"] == -1
    lm = linking_matrix(g)
    assert (lm.sigma, lm.pi) == (-1, 0)


def test_twist_knot_graph_matrix():
    lm = linking_matrix(twist_knot_zero_surgery_graph(2))
    assert lm.B == ((-1, 0, 0), (0, 0, 1), (0, 1, 2))
    assert (lm.sigma, lm.pi) == (-1, 1)
    # B^{-1} entry at the degree-3 vertex is -p
    assert lm.inverse()[1][1] == -2


def test_twist_knot_graph_is_weakly_negative_definite():
    for p in (1, 2, 3, 5):
        g = twist_knot_zero_surgery_graph(p)
        lm = linking_matrix(g)
        assert is_weakly_negative_definite(lm, g.degrees())
        assert not is_negative_definite(lm)


def test_positive_matrix_rejected():
    lm = matrix_data([[1]])
    assert lm.pi == 1
    assert not is_weakly_negative_definite(lm, [0])


def test_torus_knot_graph_corners():
    B = linking_matrix(torus_knot_complement_graph(2, 3)).B
    assert B[0][0] == -6 and B[1][1] == -1


@pytest.mark.parametrize("text,line", [
    ("vertex a -1\nedge a", 2),
    ("vertex a -1\nvertex a -2", 2),
    ("vertex a x", 1),
    ("vertex a -1\nvertex b -1\nedge a c +", 3),
    ("# nothing\nbogus a", 2),
])
def test_parse_errors_report_line(text, line):
    with pytest.raises(PlumbingParseError) as ei:
        parse_plumbing(text)
    assert ei.value.line == line


def test_inertia_matches_eigenvalues():
    import numpy as np
    rng = np.random.default_rng(3)
    for _ in range(30):
        m = rng.integers(-4, 5, (4, 4))
        m = m + m.T
        ev = np.linalg.eigvalsh(m.astype(float))
        want = (int((ev > 1e-9).sum()), int((ev < -1e-9).sum()), int((abs(ev) <= 1e-9).sum()))
        assert inertia([[Fraction(int(x)) for x in row] for row in m]) == want


def test_label_counts():
    g = parse_plumbing("vertex a -4")
    assert len(b_labels(g, su(2))) == 4
    assert len(b_labels(g, su(3))) == 16
    sigma237 = parse_plumbing(
        "vertex c -1\nvertex a -2\nvertex b -3\nvertex d -7\nedge c a\nedge c b\nedge c d")
    assert len(b_labels(sigma237, su(3))) == 1


@pytest.mark.parametrize("n,dsl", [
    (2, "vertex a -4"),
    (3, "vertex a -4"),
    (2, "vertex c -2\nvertex x -3\nvertex y -3\nvertex z -2\nedge c x\nedge c y\nedge c z"),
])
def test_fold_matches_pairwise_orbits(n, dsl):
    g = parse_plumbing(dsl)
    rs = su(n)
    space = LabelSpace(g, rs)
    labels = space.labels()
    # brute force: union labels related by any Weyl element
    parent = list(range(len(labels)))

    def find(i):
        while parent[i] != i:
            i = parent[i]
        return i

    for lab in labels:
        for w in rs.weyl:
            j = space.act(w, lab).index
            parent[find(j)] = find(lab.index)
    classes = {find(i) for i in range(len(labels))}
    reps = weyl_fold_labels(labels, rs, g)
    assert len(reps) == len(classes)
    # unfolding the representatives recovers every label exactly once
    seen = sorted(i for r in reps for i in space.orbit(r))
    assert seen == list(range(len(labels)))


def test_theta_exponent_examples():
    rs = su(2)
    lm = linking_matrix(parse_plumbing("vertex a -1"))
    for n in range(-3, 4):
        assert theta_exponent(lm, [(2 * n,)], rs) == n * n
    assert theta_exponent(lm, [(0,)], rs) == 0


def test_theta_exponent_twist_knot_formula():
    rs = su(3)
    p = 2
    lm = linking_matrix(twist_knot_zero_surgery_graph(p))
    l0, lp = (1, 3), (4, -1)
    diff = tuple(p * a - b for a, b in zip(l0, lp))
    want = rs.norm2(diff) / (2 * p) - rs.norm2(lp) / (2 * p)
    assert theta_exponent(lm, [(0, 0), l0, lp], rs) == want


def test_zero_chain_merge():
    g = parse_plumbing("vertex a -2\nvertex z 0\nvertex b -3\nedge a z\nedge z b")
    h = neumann_move(g, "zero-chain", "z")
    assert h.ids == ["a"] and h.framings["a"] == -5


def test_leaf_blowdown():
    g = parse_plumbing("vertex a -3\nvertex e -1\nedge a e")
    h = neumann_move(g, "blowdown-leaf", "e")
    assert h.framings == {"a": -2}


def test_bad_site():
    g = parse_plumbing("vertex a -3\nvertex b -2\nedge a b")
    with pytest.raises(MovePatternError):
        neumann_move(g, "blowdown-leaf", "a")


def wnd_trees():
    return st.integers(0, 10 ** 6).map(lambda s: random_wnd_tree(random.Random(s), 5, max_det=12))


def up_site(g, move, rng):
    if move == "blowdown-edge":
        return (rng.randrange(len(g.edges)), rng.choice((1, -1))) if g.edges else None
    if move == "blowdown-leaf":
        return (rng.choice(g.ids), rng.choice((1, -1)))
    u = rng.choice(g.ids)
    moved = tuple(w for w, _, _ in g.neighbours(u) if rng.random() < 0.5)
    return (u, moved, rng.randint(-4, 2))


@settings(max_examples=60)
@given(wnd_trees(), st.sampled_from(["blowdown-edge", "blowdown-leaf", "zero-chain"]), st.integers(0, 999))
def test_move_round_trip_and_det(g, move, seed):
    rng = random.Random(seed)
    site = up_site(g, move, rng)
    if site is None:
        return
    h = neumann_move(g, move, site, "up")
    new = [v for v in h.ids if v not in g.framings][0]
    assert graphs_isomorphic(neumann_move(h, move, new, "down"), g)
    a, b = linking_matrix(g), linking_matrix(h)
    assert abs(a.det) == abs(b.det)
    # sigma changes by the sign of the blown-up vertex, zero-chain keeps it
    if move == "zero-chain":
        assert b.sigma == a.sigma
    else:
        assert b.sigma - a.sigma == site[1]


@given(wnd_trees())
def test_serialization_round_trips(g):
    assert parse_plumbing(g.to_dsl()) == g
    assert graph_from_json(g.to_json()) == g
    assert is_weakly_negative_definite(linking_matrix(g), g.degrees())
