from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, strategies as st

from zhatfk.lie import (build_root_system, denominator_power_expansion, kostant_partition, n_ell,
                        parse_group, su, weyl_group)

GROUPS = [("A", 1), ("A", 2), ("A", 3), ("B", 2), ("C", 3), ("G", 2), ("D", 4)]


@pytest.mark.parametrize("n,npos,rho2,nw", [(2, 1, Fraction(1, 2), 2), (3, 3, 2, 6), (4, 6, 5, 24)])
def test_type_a_data(n, npos, rho2, nw):
    rs = build_root_system("A", n - 1)
    assert len(rs.positive_roots) == npos
    assert rs.norm2(rs.rho) == rho2 == Fraction(n ** 3 - n, 12)
    assert len(weyl_group(rs)) == nw


@pytest.mark.parametrize("letter,rank", GROUPS)
def test_root_system_invariants(letter, rank):
    rs = build_root_system(letter, rank)
    norms = {rs.norm2(a) for a in rs.positive_roots}
    assert min(norms) == 2
    half = tuple(sum(Fraction(a[i]) for a in rs.positive_roots) / 2 for i in range(rank))
    assert half == tuple(rs.rho) == tuple([1] * rank)
    for a in rs.positive_roots_rc:
        assert all(c >= 0 and Fraction(c).denominator == 1 for c in a)


@pytest.mark.parametrize("letter,rank", GROUPS[:6])
def test_weyl_elements_are_isometries(letter, rank):
    rs = build_root_system(letter, rank)
    basis = [tuple(int(i == j) for j in range(rank)) for i in range(rank)]
    for w in rs.weyl:
        for a, b in product(basis, repeat=2):
            assert rs.inner(w.act(a), w.act(b)) == rs.inner(a, b)


def test_weyl_group_small_cases():
    a1 = weyl_group(su(2))
    assert sorted(w.sign for w in a1) == [-1, 1]
    a2 = weyl_group(su(3))
    assert len(a2) == 6
    assert sum(w.sign for w in a2) == 0
    assert max(w.length for w in a2) == 3
    assert sum(1 for w in a2 if w.length == 0) == 1


def test_parse_group():
    assert parse_group("A2") == su(3)
    with pytest.raises(ValueError):
        parse_group("Z3")


def brute_kostant(rs, target_rc):
    """Count multisets of positive roots summing to target (simple-root coords)."""
    roots = [tuple(int(x) for x in a) for a in rs.positive_roots_rc]

    def rec(i, rem):
        if all(x == 0 for x in rem):
            return 1
        if i == len(roots) or any(x < 0 for x in rem):
            return 0
        total = 0
        cur = rem
        while all(x >= 0 for x in cur):
            total += rec(i + 1, cur)
            cur = tuple(x - y for x, y in zip(cur, roots[i]))
        return total

    return rec(0, tuple(target_rc))


def test_kostant_examples():
    rs = su(3)
    assert kostant_partition(rs, (0, 0)) == 1
    assert kostant_partition(rs, rs.from_root_coords((1, 1))) == 2
    assert kostant_partition(rs, rs.from_root_coords((-1, 0))) == 0


@pytest.mark.parametrize("n", [3, 4])
def test_kostant_matches_enumeration(n):
    rs = su(n)
    for c in product(range(4), repeat=n - 1):
        assert kostant_partition(rs, rs.from_root_coords(c)) == brute_kostant(rs, c)


def test_n_ell_examples():
    a1 = su(2)
    for m in range(-7, 8, 2):       # m rho lies in Q + rho only for odd m
        assert n_ell(a1, (m,)) == (m > 0) - (m < 0)
    assert n_ell(a1, (4,)) == 0
    assert n_ell(su(3), su(3).rho) == 1


@given(st.integers(1, 9), st.integers(1, 9))
def test_n_ell_su3_min_formula(a, b):
    rs = su(3)
    ell = (a, b)
    if not rs.in_Q_plus_rho(ell):
        return
    assert n_ell(rs, ell) == min(a, b)


@given(st.integers(-6, 6), st.integers(-6, 6), st.integers(0, 5))
def test_n_ell_alternating(a, b, k):
    rs = su(3)
    ell = (a, b)
    w = rs.weyl[k]
    assert n_ell(rs, w.act(ell)) == w.sign * n_ell(rs, ell)
    if a == 0 or b == 0 or a + b == 0:
        assert n_ell(rs, ell) == 0


def test_denominator_power_one():
    s = denominator_power_expansion(su(2), 1, 0)
    assert s.terms == {(1,): 1, (-1,): -1}


def test_denominator_inverse_powers_a1():
    # long division of (x^{1/2} - x^{-1/2})^{-k} in |x| < 1 and |x| > 1,
    # then the average of the two chambers; x = x^alpha = weight (2,)
    rs = su(2)
    cut = 6
    inv1 = denominator_power_expansion(rs, -1, cut).terms
    for n in range(cut + 1):
        assert inv1[(2 * n + 1,)] == Fraction(-1, 2)
        assert inv1[(-2 * n - 1,)] == Fraction(1, 2)
    inv2 = denominator_power_expansion(rs, -2, cut).terms
    for n in range(cut + 1):
        assert inv2[(2 * n + 2,)] == Fraction(n + 1, 2)
        assert inv2[(-2 * n - 2,)] == Fraction(n + 1, 2)
    assert all(abs(k[0]) % 2 == 0 for k in inv2)


def test_denominator_inverse_is_n_ell_series():
    rs = su(3)
    series = denominator_power_expansion(rs, -1, 6).terms
    nw = len(rs.weyl)
    for mu, c in series.items():
        dom, _ = rs.dominant_representative(mu)
        if sum(rs.to_root_coords(tuple(d - r for d, r in zip(dom, rs.rho)))) <= 4:
            # the dominant-chamber term is x^{-ell}, weighted by N_ell
            assert c == Fraction(n_ell(rs, tuple(-x for x in mu)), nw)
