"""F_K for torus knots, the -1/r surgery transform, and the symmetric specialization."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import gcd
from typing import Dict, List, Optional, Tuple

import numpy as np

from .falsetheta import PreconditionError, _dominant_regular
from .lie import RootSystem, n_ell_many
from .qlaurent import QSeries


class InsufficientDepth(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# FK series
# ---------------------------------------------------------------------------

@dataclass
class FKSeries:
    rs: RootSystem
    coeffs: Dict[tuple, QSeries]
    norm_bound: Fraction             # complete for every beta with (beta,beta)/2st <= norm_bound
    st: int = 1

    def keys(self):
        return sorted(self.coeffs, key=lambda b: (self.rs.norm2(b), b))

    def to_json(self) -> list:
        return [{"beta": [int(x) for x in b], "terms": self.coeffs[b].to_json()} for b in self.keys()]

    @classmethod
    def from_json(cls, rs: RootSystem, data, norm_bound, st: int = 1) -> "FKSeries":
        coeffs = {tuple(d["beta"]): QSeries.from_json(d["terms"]) for d in data}
        return cls(rs, coeffs, Fraction(norm_bound), st)

    def at_q1(self) -> Dict[tuple, Fraction]:
        """Coefficient sums of each f_beta (exact q -> 1 limit of a polynomial)."""
        return {b: sum(s.terms.values(), Fraction(0)) for b, s in self.coeffs.items()}

    def reconstruct(self) -> Dict[tuple, QSeries]:
        """(1/|W|) sum_beta f_beta sum_w (-1)^l(w) x^{w beta}, as weight -> series."""
        nw = len(self.rs.weyl)
        out: Dict[tuple, QSeries] = {}
        for b, f in self.coeffs.items():
            for w in self.rs.weyl:
                k = w.act(b)
                term = f * Fraction(w.sign, nw)
                out[k] = out[k] + term if k in out else term
        return {k: v for k, v in out.items() if v}


def fk_torus_knot(rs: RootSystem, s: int, t: int, max_order=20, indicator: str = "lattice") -> FKSeries:
    """f_beta for T(s,t): one signed monomial of degree (beta,beta)/2st per beta.

    ``indicator="lattice"`` keeps every central value gamma in Q + rho and uses
    the Weyl-alternating extension N_{w gamma} = (-1)^l(w) N_gamma; this is what
    the constant-term extraction on the plumbing produces.  ``"dominant"``
    keeps only gamma in P_+ (the literal indicator).
    """
    if indicator not in ("lattice", "dominant"):
        raise ValueError(f"unknown indicator {indicator!r}")
    if gcd(s, t) != 1 or not 2 <= s < t:
        raise PreconditionError("need coprime 2 <= s < t")
    max_order = Fraction(max_order)
    st = s * t
    betas = _dominant_regular(rs, 2 * st * max_order + Fraction(1, 10**9))
    rho = rs.rho
    wr = [(w.act(rho), w.sign) for w in rs.weyl]
    in_lat: Dict[tuple, bool] = {}
    cand: List[tuple] = []
    meta: List[Tuple[tuple, int]] = []
    for beta in betas:
        for (a, s1), (b, s2) in product(wr, wr):
            num = [x + t * y + s * z for x, y, z in zip(beta, a, b)]
            if any(v % st for v in num):
                continue
            gamma = tuple(v // st for v in num)
            ok = in_lat.get(gamma)
            if ok is None:
                ok = in_lat[gamma] = rs.in_Q_plus_rho(gamma)
            if not ok:
                continue
            if indicator == "dominant" and not all(g > 0 for g in gamma):
                continue
            cand.append(gamma)
            meta.append((beta, s1 * s2))
    ns = n_ell_many(rs, cand)
    coefs: Dict[tuple, int] = {}
    for (beta, sg), n in zip(meta, ns):
        coefs[beta] = coefs.get(beta, 0) + sg * n
    out = {}
    for beta, c in coefs.items():
        if c:
            out[beta] = QSeries({rs.norm2(beta) / (2 * st): c})
    return FKSeries(rs, out, max_order, st)


def zero_surgery(fk: FKSeries) -> QSeries:
    """(1/|W|) f_rho."""
    rho = fk.rs.rho
    if rho not in fk.coeffs:
        if fk.rs.norm2(rho) / (2 * fk.st) > fk.norm_bound:
            raise InsufficientDepth("rho is beyond the computed norm bound")
        return QSeries({})
    return fk.coeffs[rho] * Fraction(1, len(fk.rs.weyl))


def f_rho_double_twist_guess(rs: RootSystem, m: int, n: int, max_order=20) -> QSeries:
    """chi_{m,rho} chi_{n,rho}, the conjectured f_rho of K_{m,n} (comparison only)."""
    from .falsetheta import chi_rho
    return chi_rho(rs, m, max_order) * chi_rho(rs, n, max_order)


def _surgery_floor(rs: RootSystem, st: int, r: int, nb: Fraction) -> float:
    """Lower bound on surgery exponents from betas with (beta,beta)/2st > nb."""
    a = r / 2 + 1 / (2 * st)
    rn = math.sqrt(float(rs.norm2(rs.rho)))
    R0 = math.sqrt(2 * st * float(nb))
    # a R^2 - R |rho| + |rho|^2/2r, increasing for R >= |rho|/2a
    R = max(R0, rn / (2 * a))
    return a * R * R - R * rn + float(rs.norm2(rs.rho)) / (2 * r)


def required_norm_bound(rs: RootSystem, st: int, r: int, max_order) -> Fraction:
    """A norm bound that makes surgery_minus_one_over_r complete to ``max_order``."""
    a = r / 2 + 1 / (2 * st)
    rn2 = float(rs.norm2(rs.rho))
    lowest = -rn2 / (4 * a) + rn2 / (2 * r)      # min over all beta of the exponent
    target = lowest + float(max_order) + 1
    nb = Fraction(1)
    while _surgery_floor(rs, st, r, nb) < target:
        nb *= 2
    return nb


def surgery_minus_one_over_r(fk: FKSeries, r: int, max_order=20) -> QSeries:
    """L_{-1/r}[ prod_alpha (x^{alpha/2r} - x^{-alpha/2r}) F_K ] with x^mu -> q^{r(mu,mu)/2}."""
    if r < 1:
        raise PreconditionError("r must be a positive integer")
    rs = fk.rs
    max_order = Fraction(max_order)
    rho = rs.rho
    floor = Fraction(_surgery_floor(rs, fk.st, r, fk.norm_bound)).limit_denominator(10**6) - Fraction(1, 10**6)
    terms: Dict[Fraction, Fraction] = {}
    rho2 = rs.norm2(rho) / (2 * r)
    for beta, f in fk.coeffs.items():
        b2 = Fraction(r) * rs.norm2(beta) / 2 + rho2
        # the w-sum collapses: (w beta, w' rho) depends on w^{-1} w' only
        for w in rs.weyl:
            e0 = b2 + rs.inner(beta, w.act(rho))
            for e, c in f.terms.items():
                ee = e + e0
                if ee < floor:
                    terms[ee] = terms.get(ee, Fraction(0)) + c * w.sign
    terms = {e: c for e, c in terms.items() if c}
    if not terms:
        raise InsufficientDepth("no terms below the completeness floor; compute F_K deeper")
    e_min = min(terms)
    trunc = e_min + max_order
    if trunc > floor:
        raise InsufficientDepth(
            f"F_K norm bound {fk.norm_bound} gives exact terms only below {floor}; need {trunc}")
    return QSeries(terms, trunc)


# ---------------------------------------------------------------------------
# Two-variable series and the symmetric specialization
# ---------------------------------------------------------------------------

@dataclass
class XQSeries:
    """x-exponent -> QSeries, plus the x-range on which slots are present."""

    slots: Dict[Fraction, QSeries]
    x_min: Fraction
    x_max: Fraction

    def slot(self, k) -> QSeries:
        k = Fraction(k)
        if k < self.x_min or k > self.x_max:
            raise KeyError(f"x^{k} is outside the computed range")
        return self.slots.get(k, QSeries({}, self._trunc_for(k)))

    def _trunc_for(self, k):
        ts = [s.trunc for s in self.slots.values() if s.trunc is not None]
        return min(ts) if ts else None

    def scale(self, c) -> "XQSeries":
        return XQSeries({k: v * c for k, v in self.slots.items()}, self.x_min, self.x_max)

    def shift_q(self, e) -> "XQSeries":
        return XQSeries({k: v.shift(e) for k, v in self.slots.items()}, self.x_min, self.x_max)

    def min_q(self) -> Optional[Fraction]:
        es = [s.min_exp() for s in self.slots.values() if s]
        return min(es) if es else None

    def to_json(self) -> list:
        return [{"xexp_num": k.numerator, "xexp_den": k.denominator, "series": self.slots[k].to_json()}
                for k in sorted(self.slots)]

    @classmethod
    def from_json(cls, data, x_min=None, x_max=None) -> "XQSeries":
        slots = {Fraction(d["xexp_num"], d["xexp_den"]): QSeries.from_json(d["series"]) for d in data}
        ks = sorted(slots)
        return cls(slots, ks[0] if x_min is None else Fraction(x_min),
                   ks[-1] if x_max is None else Fraction(x_max))

    def render(self, max_terms: int = 10) -> str:
        lines = []
        for k in sorted(self.slots):
            lines.append(f"x^{k}: {self.slots[k].render(max_terms=max_terms)}")
        return "\n".join(lines)


def _principal_schur(mu: Tuple[int, ...], n: int) -> Dict[int, int]:
    """s_mu(1, q, ..., q^{n-1}) as {exponent: coefficient}."""
    arr = _principal_schur_array(tuple(x for x in mu if x > 0), n)
    return {i: int(c) for i, c in enumerate(arr) if c}


@lru_cache(maxsize=None)
def _principal_schur_array(mu: Tuple[int, ...], n: int) -> np.ndarray:
    # branching on the variable q^{n-1}:  s_mu = sum_nu q^{(n-1)(|mu|-|nu|)} s_nu(1..q^{n-2})
    if len(mu) > n:
        return np.zeros(1, dtype=np.int64)
    if not mu:
        return np.ones(1, dtype=np.int64)
    if n == 1:
        return np.zeros(1, dtype=np.int64) if len(mu) > 1 else _unit(0)
    size = sum(mu)
    out = np.zeros(size * (n - 1) + 1, dtype=np.int64)
    ext = mu + (0,) * (n - len(mu))
    for nu in _interlacing(ext):
        sub = _principal_schur_array(tuple(x for x in nu if x > 0), n - 1)
        off = (n - 1) * (size - sum(nu))
        out[off:off + len(sub)] += sub
    return np.trim_zeros(out, "b") if out.any() else np.zeros(1, dtype=np.int64)


def _unit(k: int) -> np.ndarray:
    out = np.zeros(k + 1, dtype=np.int64)
    out[k] = 1
    return out


def _interlacing(lam: Tuple[int, ...], lo=None, hi=None):
    """Partitions mu with lam_{i+1} <= mu_i <= lam_i (length len(lam) - 1),
    optionally with lo <= |mu| <= hi."""
    n = len(lam) - 1
    lo = -math.inf if lo is None else lo
    hi = math.inf if hi is None else hi
    # suffix bounds of the remaining parts
    min_rest = [sum(lam[i + 1:n + 1]) for i in range(n + 1)]
    max_rest = [sum(lam[i:n]) for i in range(n + 1)]

    def rec(i, acc, pref):
        if i == n:
            if lo <= acc <= hi:
                yield tuple(pref)
            return
        for m in range(lam[i + 1], lam[i] + 1):
            a = acc + m
            if a + min_rest[i + 1] > hi or a + max_rest[i + 1] < lo:
                continue
            pref.append(m)
            yield from rec(i + 1, a, pref)
            pref.pop()

    yield from rec(0, 0, [])


def _partition_of(rs: RootSystem, lam) -> Tuple[int, ...]:
    """Dominant weight of A_{N-1} (fundamental coords) -> partition with N parts (last 0)."""
    n = rs.rank + 1
    parts = [0] * n
    acc = 0
    for j in range(n - 2, -1, -1):
        acc += int(lam[j])
        parts[j] = acc
    return tuple(parts)


def _character_blocks(rs: RootSystem, lam, x_order=None, q_cap=None):
    """Yield (x-exp, q-offset, coefficient array) blocks of the specialized character."""
    N = rs.rank + 1
    part = _partition_of(rs, lam)
    size = sum(part)
    shift_q = Fraction(size, N) * sum(range(2, N))
    lo = hi = None
    if x_order is not None:
        # xe = size - |mu| - size/N
        hi = math.floor(size - Fraction(size, N) + x_order)
        lo = math.ceil(size - Fraction(size, N) - x_order)
    for mu in _interlacing(part, lo, hi):
        m1 = size - sum(mu)
        xe = Fraction(m1) - Fraction(size, N)
        base = (N - 2) * m1 - shift_q
        if q_cap is not None:
            # lowest exponent of s_mu(1, q, ..., q^{N-2}) is n(mu)
            if base + sum(i * x for i, x in enumerate(mu)) >= q_cap:
                continue
        arr = _principal_schur_array(tuple(x for x in mu if x > 0), N - 1)
        if q_cap is not None:
            keep = math.ceil(q_cap - base)
            arr = arr[:max(keep, 0)]
        if arr.any():
            yield xe, base, arr


def specialized_character(rs: RootSystem, lam, x_order=None, q_cap=None) -> Dict[Tuple[Fraction, Fraction], int]:
    """chi_lam at x_1 = x, x_j = q (j >= 2), as {(x-exp, q-exp): coefficient}.

    Weights are graded by their simple-root coordinates c_j = (mu, omega_j):
    the monomial x^mu becomes x^{c_1} q^{c_2 + ... + c_{N-1}}.  With
    ``x_order`` only |x-exp| <= x_order is kept, with ``q_cap`` only q-exp < q_cap.
    """
    out: Dict[Tuple[Fraction, Fraction], int] = {}
    for xe, base, arr in _character_blocks(rs, lam, x_order, q_cap):
        for e in np.nonzero(arr)[0]:
            key = (xe, base + int(e))
            out[key] = out.get(key, 0) + int(arr[e])
    return {k: v for k, v in out.items() if v}


def reduce_and_specialize_symmetric(fk: FKSeries, N: int, x_order: int, q_order) -> XQSeries:
    """(1/|W|) sum_beta f_beta chi_{beta-rho}(x, q, ..., q), truncated.

    The result holds exact slots for |x-exponent| <= x_order and q-exponents
    below the floor forced by the norm bound, capped at min + q_order.
    """
    rs = fk.rs
    if rs.cartan_type != "A" or rs.rank != N - 1:
        raise PreconditionError("symmetric specialization needs type A_{N-1}")
    nw = len(rs.weyl)
    rho = rs.rho
    # exactness floor: beta outside the bound has |beta|^2 > 2 st nb, and the
    # q-grading is the pairing with v = omega_2 + ... + omega_{N-1}
    v = tuple(0 if j == 0 else 1 for j in range(rs.rank))
    vn = math.sqrt(float(rs.norm2(v))) if N > 2 else 0.0
    rn = math.sqrt(float(rs.norm2(rho)))
    R0 = math.sqrt(2 * fk.st * float(fk.norm_bound))
    R = max(R0, fk.st * vn)
    floor = R * R / (2 * fk.st) - (R + rn) * vn
    fl = Fraction(floor).limit_denominator(10**6) - Fraction(1, 10**6)
    # accumulate integer arrays per (x-exp, fractional part of q-exp)
    acc: Dict[Tuple[Fraction, Fraction], Dict[int, np.ndarray]] = {}
    for beta, f in fk.coeffs.items():
        lam = tuple(b - r for b, r in zip(beta, rho))
        # every f_beta is a finite polynomial; terms at or above the floor are dropped
        for xe, base, arr in _character_blocks(rs, lam, x_order, fl - f.min_exp()):
            for e, fc in f.terms.items():
                start = e + base
                whole = math.floor(start)
                key = (xe, start - whole)
                rows = acc.setdefault(key, {})
                rows[whole] = _add_at(rows.get(whole), arr * int(fc))
    cells: Dict[Fraction, Dict[Fraction, Fraction]] = {}
    for (xe, frac), rows in acc.items():
        slot = cells.setdefault(xe, {})
        for whole, arr in rows.items():
            for i in np.nonzero(arr)[0]:
                ex = frac + whole + int(i)
                slot[ex] = slot.get(ex, Fraction(0)) + Fraction(int(arr[i]), nw)
    q_all = [e for sl in cells.values() for e, c in sl.items() if c and e < fl]
    if not q_all:
        raise InsufficientDepth("F_K too shallow for any specialized term")
    qmin = min(q_all)
    trunc = qmin + Fraction(q_order)
    if trunc > fl:
        raise InsufficientDepth(f"norm bound {fk.norm_bound} is exact only below q^{float(fl):.3f}; need {trunc}")
    slots = {k: QSeries(sl, trunc) for k, sl in cells.items()}
    slots = {k: sl for k, sl in slots.items() if sl}
    return XQSeries(slots, Fraction(-x_order), Fraction(x_order))


def _add_at(cur: Optional[np.ndarray], arr: np.ndarray) -> np.ndarray:
    if cur is None:
        return arr.copy()
    if len(cur) < len(arr):
        cur, arr = arr.copy(), cur
    cur[:len(arr)] += arr
    return cur


def norm_bound_for_symmetric(rs: RootSystem, st: int, q_order, margin: float = 2.0) -> Fraction:
    """Norm bound so that reduce_and_specialize_symmetric reaches ``q_order`` above the minimum."""
    N = rs.rank + 1
    v = tuple(0 if j == 0 else 1 for j in range(rs.rank))
    vn = math.sqrt(float(rs.norm2(v))) if N > 2 else 0.0
    rn = math.sqrt(float(rs.norm2(rs.rho)))
    # the lowest exponent is bounded below by min_R R^2/2st - (R + rn) vn
    low = -(st * vn * vn) / 2 - rn * vn
    target = low + float(q_order) + margin + 2 * rn * vn
    nb = 1.0
    while True:
        R = max(math.sqrt(2 * st * nb), st * vn)
        if R * R / (2 * st) - (R + rn) * vn >= target + abs(low):
            return Fraction(int(math.ceil(nb)))
        nb *= 1.5


# ---------------------------------------------------------------------------
# q-difference operators
# ---------------------------------------------------------------------------

@dataclass
class QDiffOperator:
    """sum of coef * x^i q^e a^k y^j.  (x F)(x) = x F(x), (y F)(x) = F(q^shift x)."""

    terms: List[Tuple[int, int, int, Fraction, Fraction]]    # (x, y, a, q, coef)
    convention: dict = field(default_factory=lambda: {"x": "multiply", "y": "F(qx)", "y_shift": 1})

    def specialize_a(self, power) -> "QDiffOperator":
        """a -> q^power."""
        acc: Dict[Tuple[int, int, Fraction], Fraction] = {}
        for x, y, a, q, c in self.terms:
            key = (x, y, Fraction(q) + a * Fraction(power))
            acc[key] = acc.get(key, Fraction(0)) + c
        return QDiffOperator([(x, y, 0, q, c) for (x, y, q), c in sorted(acc.items()) if c], dict(self.convention))

    def with_shift(self, s: int) -> "QDiffOperator":
        conv = dict(self.convention)
        conv["y_shift"] = s
        conv["y"] = "F(qx)" if s == 1 else f"F(q^{s} x)"
        return QDiffOperator(list(self.terms), conv)

    def to_json(self) -> dict:
        return {"terms": [{"x": x, "y": y, "a": a, "q": [Fraction(q).numerator, Fraction(q).denominator],
                           "coef": [Fraction(c).numerator, Fraction(c).denominator]} for x, y, a, q, c in self.terms],
                "convention": self.convention}


def _poly_mul(p1: Dict[tuple, int], p2: Dict[tuple, int]) -> Dict[tuple, int]:
    out: Dict[tuple, int] = {}
    for k1, c1 in p1.items():
        for k2, c2 in p2.items():
            k = tuple(a + b for a, b in zip(k1, k2))
            out[k] = out.get(k, 0) + c1 * c2
    return {k: v for k, v in out.items() if v}


def _poly(*terms) -> Dict[tuple, int]:
    """Polynomial in (x, a, q) from (coef, x, a, q) tuples."""
    out: Dict[tuple, int] = {}
    for c, x, a, q in terms:
        out[(x, a, q)] = out.get((x, a, q), 0) + c
    return {k: v for k, v in out.items() if v}


def trefoil_ahat_polys():
    """Denominator-cleared coefficients P0, P1, P2 as polynomials in (x, a, q)."""
    # common denominator a^2 q x^3 (-1 + a x)(-q + a x^2)
    P0 = _poly_mul(_poly_mul(_poly((-1, 0, 1, 1)), _poly((-1, 0, 0, 0), (1, 1, 0, 0))),
                   _poly((-1, 0, 0, 0), (1, 2, 1, 1)))
    inner = _poly((-1, 2, 2, 0), (1, 2, 1, 3),
                  (1, 1, 1, 1), (1, 2, 1, 1), (-1, 2, 2, 1), (1, 3, 2, 1),
                  (-1, 0, 0, 2), (-1, 4, 2, 2))
    P1 = _poly_mul(_poly((-1, 0, 0, 0), (1, 2, 1, 0)), inner)
    P2 = _poly_mul(_poly_mul(_poly((1, 3, 2, 1)), _poly((-1, 0, 0, 0), (1, 1, 1, 0))),
                   _poly((-1, 0, 0, 1), (1, 2, 1, 0)))
    return P0, P1, P2


def build_trefoil_ahat(N: Optional[int] = None) -> QDiffOperator:
    """a-deformed quantum A-polynomial of the right-handed trefoil, cleared of denominators.

    With ``N`` given, a is specialized to q^N.
    """
    terms = []
    for j, P in enumerate(trefoil_ahat_polys()):
        for (x, a, q), c in sorted(P.items()):
            terms.append((x, j, a, Fraction(q), Fraction(c)))
    op = QDiffOperator(terms)
    if N is not None:
        if N < 2:
            raise PreconditionError("N must be at least 2")
        op = op.specialize_a(N)
    return op


@dataclass
class RecurrenceReport:
    residuals: Dict[Tuple[Fraction, Fraction], Fraction]
    window: List[Tuple[Fraction, Fraction]]       # (x-exponent, q bound) per checked row
    rows: int

    @property
    def passed(self) -> bool:
        return self.rows > 0 and not any(self.residuals.values())

    def nonzero(self):
        return {k: v for k, v in self.residuals.items() if v}


def recurrence_check(op: QDiffOperator, f: XQSeries, q_order=None, x_window=None) -> RecurrenceReport:
    """Apply ``op`` to ``f`` on every exactly computable (x, q) cell.

    Row x^n needs slots n - i for every x-power i of the operator; the row is
    exact below min over terms of (trunc of that slot + q-shift).
    """
    if any(a for _, _, a, _, _ in op.terms):
        raise PreconditionError("specialize a before checking")
    shift = op.convention.get("y_shift", 1)
    xs = sorted({x for x, *_ in op.terms})
    lo = f.x_min + max(xs)
    hi = f.x_max + min(xs)
    if x_window is not None:
        lo, hi = max(lo, Fraction(x_window[0])), min(hi, Fraction(x_window[1]))
    qmin = f.min_q() or Fraction(0)
    residuals: Dict[Tuple[Fraction, Fraction], Fraction] = {}
    window = []
    rows = 0
    n = lo
    while n <= hi:
        acc: Dict[Fraction, Fraction] = {}
        bound = None
        for x, y, _, q, c in op.terms:
            k = n - x
            s = f.slot(k)
            off = q + shift * y * k
            t = None if s.trunc is None else s.trunc + off
            if t is not None:
                bound = t if bound is None else min(bound, t)
            for e, v in s.terms.items():
                acc[e + off] = acc.get(e + off, Fraction(0)) + c * v
        if q_order is not None:
            cap = qmin + Fraction(q_order) + 1
            bound = cap if bound is None else min(bound, cap)
        if bound is not None:
            window.append((n, bound))
            for e, v in acc.items():
                if e < bound:
                    residuals[(n, e)] = v
            rows += 1
        n += 1
    if not window:
        raise InsufficientDepth("empty safe window: compute F^sym to more x- or q-orders")
    return RecurrenceReport(residuals, window, rows)


# ---------------------------------------------------------------------------
# Classical limit
# ---------------------------------------------------------------------------

def _series_inverse_factor(rs: RootSystem, max_height: int) -> Dict[tuple, int]:
    """Coefficients of prod_alpha (1 - y_alpha^2)/(1 + y_alpha^3), y_alpha = x^{-alpha},
    as {simple-root-coordinate gamma: coef} (monomial x^{-gamma}), by long division."""
    r = rs.rank
    series = {tuple([0] * r): 1}
    for alpha in rs.positive_roots_rc:
        ht = sum(alpha)
        fac: Dict[tuple, int] = {}
        # (1 - y^2) * sum_n (-1)^n y^{3n}
        for n in range(max_height // ht + 1):
            for k, c in ((3 * n, (-1) ** n), (3 * n + 2, -((-1) ** n))):
                if k * ht <= max_height:
                    key = tuple(k * a for a in alpha)
                    fac[key] = fac.get(key, 0) + c
        new: Dict[tuple, int] = {}
        for g1, c1 in series.items():
            for g2, c2 in fac.items():
                g = tuple(a + b for a, b in zip(g1, g2))
                if sum(g) <= max_height:
                    new[g] = new.get(g, 0) + c1 * c2
        series = {k: v for k, v in new.items() if v}
    return series


def classical_limit_check(fk: FKSeries, max_height: int = 8):
    """Compare f_beta(1) with the Weyl-alternated expansion of
    prod_alpha (x^{alpha/2} - x^{-alpha/2}) / Delta(x^alpha), Delta(x) = x - 1 + 1/x.

    Returns (ok, sign, mismatches) over all regular dominant beta in Q + rho
    with height(beta - rho) <= max_height.
    """
    rs = fk.rs
    rho = rs.rho
    rho_rc = rs.to_root_coords(rho)
    htr = sum(rho_rc)
    dser = _series_inverse_factor(rs, max_height + 2 * int(math.ceil(htr)) + 2)
    # dominant-chamber expansion: x^{-rho} * sum_gamma d_gamma x^{-gamma}
    def d_at(mu):
        c = rs.to_root_coords(mu)
        gamma = tuple(-(a + b) for a, b in zip(c, rho_rc))
        if any(Fraction(x).denominator != 1 or x < 0 for x in gamma):
            return 0
        return dser.get(tuple(int(x) for x in gamma), 0)

    at1 = fk.at_q1()
    betas = _betas_by_height(rs, max_height)
    deep = max(rs.norm2(b) / (2 * fk.st) for b in betas)
    if deep > fk.norm_bound:
        raise InsufficientDepth(f"need f_beta up to (beta,beta)/2st = {deep}, have {fk.norm_bound}")
    expect = {}
    for beta in betas:
        expect[beta] = sum(w.sign * d_at(w.act(beta)) for w in rs.weyl)
    sign = None
    bad = []
    for beta in betas:
        got = at1.get(beta, Fraction(0))
        want = expect[beta]
        if sign is None and want:
            sign = 1 if got == want else -1
        if got != (sign or 1) * want:
            bad.append((beta, got, want))
    return not bad, sign or 1, bad


def _betas_by_height(rs: RootSystem, max_height: int):
    rho_rc = rs.to_root_coords(rs.rho)
    out = []
    for m in product(range(max_height + 1), repeat=rs.rank):
        if sum(m) > max_height:
            continue
        beta = rs.from_root_coords([Fraction(a) + b for a, b in zip(m, rho_rc)])
        if all(Fraction(x).denominator == 1 and x > 0 for x in beta):
            out.append(tuple(int(x) for x in beta))
    return out


def parse_xq_display(slots: Dict[int, str], N: int, scale=1, slot_shift: Optional[Dict[int, str]] = None,
                     x_symmetric: bool = True) -> XQSeries:
    """Build an XQSeries from printed slot series (x^k -> text).

    Slot k is ``scale * q^{slot_shift[k]} * text``; with ``x_symmetric`` it is
    mirrored to x^{-k} with the factor q^{(2-N)k} of the residual Z2 symmetry.
    """
    from .qlaurent import parse_series
    slot_shift = slot_shift or {}
    out: Dict[Fraction, QSeries] = {}
    for k, text in slots.items():
        k = int(k)
        sh = Fraction(slot_shift.get(k, slot_shift.get(str(k), 0)))
        ser = parse_series(text).shift(sh) * Fraction(scale)
        out[Fraction(k)] = ser
        if x_symmetric and k:
            out[Fraction(-k)] = ser.shift((2 - N) * k)
    ks = list(out)
    return XQSeries(out, min(ks), max(ks))


def equal_cong_xq(a: XQSeries, b: XQSeries, slots=None):
    """Compare two XQSeries up to one global sign and q-power (fixed on slot x^0).

    Only slots in ``slots`` (default: x-exponents present in both ranges)
    are compared, each on its common known range.  Returns a CongResult
    whose horizon is the smallest per-slot horizon.
    """
    from .qlaurent import CongResult, _min_trunc
    s0a, s0b = a.slot(0), b.slot(0)
    if not s0a or not s0b:
        return CongResult(None, Fraction(0))
    sh = s0b.min_exp() - s0a.min_exp()
    sg = 1 if (s0a.terms[s0a.min_exp()] > 0) == (s0b.terms[s0b.min_exp()] > 0) else -1
    if slots is None:
        lo, hi = max(a.x_min, b.x_min), min(a.x_max, b.x_max)
        slots = sorted(k for k in set(a.slots) | set(b.slots) if lo <= k <= hi)
    ok = True
    horizon = None
    base = s0b.min_exp()
    for k in slots:
        x = a.slot(k).shift(sh) * sg
        y = b.slot(k)
        t = _min_trunc(x.trunc, y.trunc)
        if t is not None:
            horizon = _min_trunc(horizon, t - base)
        keys = {e for e in set(x.terms) | set(y.terms) if t is None or e < t}
        if any(x.terms.get(e, 0) != y.terms.get(e, 0) for e in keys):
            ok = False
    return CongResult(ok, horizon)
