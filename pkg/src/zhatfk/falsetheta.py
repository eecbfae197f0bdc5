"""Higher rank false theta functions and closed forms built from them."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Dict, List, Sequence

from .lie import RootSystem, n_ell_many
from .plumbing import LabelSpace, seifert_euler, seifert_graph
from .qlaurent import QSeries


class PreconditionError(ValueError):
    pass


class OrbifoldSignError(PreconditionError):
    pass


class CentralMeridianError(PreconditionError):
    pass


@dataclass(frozen=True)
class ChiSpec:
    p: Fraction
    beta: tuple
    rs: RootSystem

    def __post_init__(self):
        if Fraction(self.p) <= 0:
            raise ValueError("p must be positive")
        if not self.rs.in_P(self.beta):
            raise ValueError("beta must be an integral weight")


def _dominant_regular(rs: RootSystem, radius2: Fraction):
    """Regular dominant weights in Q + rho with (l, l) < radius2."""
    r = rs.rank
    g = rs.gram
    out = []

    def rec(i, coords, partial):
        if i == r:
            if rs.in_Q_plus_rho(coords):
                out.append(tuple(coords))
            return
        c = 1
        while True:
            trial = coords + [c]
            # all pairings of fundamental weights are >= 0, so the partial
            # norm is a lower bound for any completion
            val = partial + g[i][i] * c * c + 2 * sum(g[i][j] * c * trial[j] for j in range(i))
            if val >= radius2:
                break
            rec(i + 1, trial, val)
            c += 1

    rec(0, [], Fraction(0))
    return out


def _chi_terms_below(rs: RootSystem, p: Fraction, beta, bound: Fraction) -> Dict[Fraction, int]:
    """All terms of chi_{p,beta} with exponent < bound (exponents are >= 0)."""
    p = Fraction(p)
    bnorm = rs.norm2(beta)
    # exponent = (sqrt(p)|l| - |beta|/sqrt(p))^2 / 2  < bound
    # => |l| < (sqrt(2 bound) + |beta|/sqrt(p)) / sqrt(p)
    if bound <= 0:
        return {}
    R = (math.sqrt(2 * float(bound)) + math.sqrt(float(bnorm) / float(p))) / math.sqrt(float(p))
    radius2 = Fraction(R * R * (1 + 1e-9)).limit_denominator(10**6) + 1
    ells = _dominant_regular(rs, radius2)
    ns = n_ell_many(rs, ells)
    wbetas = [(w.act(beta), w.sign) for w in rs.weyl]
    const = bnorm / (2 * p)
    terms: Dict[Fraction, int] = {}
    for ell, n in zip(ells, ns):
        if not n:
            continue
        half = p * rs.norm2(ell) / 2 + const
        for wb, s in wbetas:
            e = half - rs.inner(ell, wb)
            if e < bound:
                terms[e] = terms.get(e, 0) + s * n
    return {e: c for e, c in terms.items() if c}


def _two_phase(fn, max_order) -> QSeries:
    """fn(bound) -> {exp: coef} exact below bound, exponents >= 0."""
    max_order = Fraction(max_order)
    bound = max_order
    for _ in range(8):
        terms = fn(bound)
        if terms:
            e0 = min(terms)
            if e0 + max_order > bound:
                bound = e0 + max_order
                terms = fn(bound)
            return QSeries(terms, bound)
        bound += max_order
    return QSeries({}, bound)


def chi(spec: ChiSpec, max_order=20) -> QSeries:
    """chi_{p,beta}, complete below its lowest exponent + ``max_order``."""
    return _two_phase(lambda T: _chi_terms_below(spec.rs, spec.p, spec.beta, T), max_order)


def chi_rho(rs: RootSystem, p, max_order=20) -> QSeries:
    return chi(ChiSpec(Fraction(p), rs.rho, rs), max_order)


def psi(p: int, r: int, max_order=20) -> QSeries:
    """Rank-one false theta  sum_{l = r mod 2p} sgn(l) q^{l^2/4p}."""
    max_order = Fraction(max_order)
    terms: Dict[Fraction, int] = {}
    lim = math.isqrt(int(4 * p * max_order)) + 2 * p + 2
    for l in range(-lim - 2 * p, lim + 2 * p + 1):
        if (l - r) % (2 * p) or l == 0:
            continue
        e = Fraction(l * l, 4 * p)
        terms[e] = terms.get(e, 0) + (1 if l > 0 else -1)
    terms = {e: c for e, c in terms.items() if c}
    e0 = min(terms) if terms else Fraction(0)
    return QSeries(terms, e0 + max_order)


def zhat_twist_knot(rs: RootSystem, p: int, max_order=20) -> QSeries:
    """(1/|W|) chi_{p, rho}: 0-surgery on the twist knot K_p."""
    if p < 1:
        raise PreconditionError("p must be a positive integer")
    return chi_rho(rs, p, max_order) * Fraction(1, len(rs.weyl))


def zhat_double_twist(rs: RootSystem, m: int, n: int, max_order=20) -> QSeries:
    """(1/|W|) chi_{m,rho} chi_{n,rho}: 0-surgery on the double twist knot K_{m,n}."""
    if m < 1 or n < 1:
        raise PreconditionError("m and n must be positive integers")
    a = chi_rho(rs, m, max_order)
    b = chi_rho(rs, n, max_order)
    return (a * b) * Fraction(1, len(rs.weyl))


def _signed_chi_sum(rs: RootSystem, p: Fraction, items: List[tuple], max_order) -> QSeries:
    """sum of sign * chi_{p, beta} over (beta, sign) items, merged by beta.

    beta may be a rational weight (Seifert case); only pairings enter.
    """
    merged: Dict[tuple, int] = {}
    for beta, s in items:
        merged[beta] = merged.get(beta, 0) + s
    merged = {b: s for b, s in merged.items() if s}

    def fn(T):
        total: Dict[Fraction, int] = {}
        for beta, s in merged.items():
            for e, c in _chi_terms_below(rs, p, beta, T).items():
                total[e] = total.get(e, 0) + s * c
        return {e: c for e, c in total.items() if c}

    return _two_phase(fn, max_order)


def brieskorn_betas(rs: RootSystem, p1: int, p2: int, p3: int) -> List[tuple]:
    out = []
    rho = rs.rho
    for w1 in rs.weyl:
        a = w1.act(rho)
        for w2 in rs.weyl:
            b = w2.act(rho)
            beta = tuple(p2 * p3 * x + p1 * p3 * y + p1 * p2 * z for x, y, z in zip(rho, a, b))
            out.append((beta, w1.sign * w2.sign))
    return out


def zhat_brieskorn(rs: RootSystem, p1: int, p2: int, p3: int, max_order=20) -> QSeries:
    """Signed sum of |W|^2 false theta functions for Sigma(p1, p2, p3)."""
    ps = (p1, p2, p3)
    if any(gcd(a, b) != 1 for a, b in ((p1, p2), (p1, p3), (p2, p3))):
        raise PreconditionError(f"{ps} are not pairwise coprime")
    if not 0 < p1 < p2 < p3:
        raise PreconditionError("need 0 < p1 < p2 < p3")
    return _signed_chi_sum(rs, Fraction(p1 * p2 * p3), brieskorn_betas(rs, p1, p2, p3), max_order)


def seifert_h1(a0: int, fibers: Sequence) -> int:
    fr = [Fraction(f) for f in fibers]
    e = seifert_euler(a0, fr)
    prod = 1
    for f in fr:
        prod *= f.denominator
    return abs(e * prod)


def zhat_seifert3(rs: RootSystem, a0: int, fibers: Sequence, b=0, max_order=20) -> QSeries:
    """Label-filtered signed false theta sum for M(a0; a1/b1, a2/b2, a3/b3).

    Requires negative orbifold number and e * lcm(b1, b2, b3) = -1.  The
    overall q-power is only meaningful up to an unknown constant shift.
    """
    fr = [Fraction(f) for f in fibers]
    if len(fr) != 3:
        raise PreconditionError("exactly three fibers are required")
    e = seifert_euler(a0, fr)
    if e >= 0:
        raise OrbifoldSignError(f"orbifold number e = {e} is not negative")
    bs = [f.denominator for f in fr]
    L = math.lcm(*bs)
    if e * L != -1:
        raise CentralMeridianError(f"e * lcm(b) = {e * L}, the central meridian is not null-homologous")
    h1 = seifert_h1(a0, fr)
    b1, b2, b3 = bs
    p = Fraction(b1 * b2 * b3, h1)
    g = seifert_graph(a0, fr)
    space = LabelSpace(g, rs)
    target = space.label(b).index if isinstance(b, int) else space.canonical(b.rep if hasattr(b, "rep") else b).index
    # vertex positions: centre, then the terminal vertex of each leg
    legs = _terminal_vertices(g)
    rho = rs.rho
    zero = tuple(0 for _ in rho)
    items = []
    for w1 in rs.weyl:
        for w2 in rs.weyl:
            ell = [zero] * g.n
            ell[0] = rho
            ell[legs[0]] = rho
            ell[legs[1]] = w1.act(rho)
            ell[legs[2]] = w2.act(rho)
            try:
                idx = space.index_of(ell)
            except ValueError:
                continue
            if idx != target:
                continue
            beta = tuple(Fraction(b2 * b3 * x + b1 * b3 * y + b1 * b2 * z, h1)
                         for x, y, z in zip(rho, w1.act(rho), w2.act(rho)))
            items.append((beta, w1.sign * w2.sign))
    if not items:
        return QSeries({}, Fraction(max_order))
    return _signed_chi_sum(rs, p, items, max_order)


def _terminal_vertices(g) -> List[int]:
    degs = g.degrees()
    term = [i for i, d in enumerate(degs) if d == 1]
    # order by leg: vertex names l{j}_{k}
    def leg_of(i):
        return int(g.ids[i].split("_")[0][1:])
    return sorted(term, key=leg_of)
