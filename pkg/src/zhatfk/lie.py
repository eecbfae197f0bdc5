"""Root systems, Weyl groups and Kostant partition functions in exact arithmetic.

Weights are stored as tuples of integers (or Fractions) in the basis of
fundamental weights.  The inner product is normalised so that short roots
have squared length 2.  Simple-root coordinates of a weight ``mu`` are
``(mu, omega_j)`` up to the root-length factors, which for simply-laced
types are exactly the exponents of the monomial ``x^mu``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Dict, List, Sequence, Tuple

import numpy as np

from . import _kernels

MAX_RANK = 4

Weight = Tuple[int, ...]

def _cartan_data(letter: str, rank: int):
    n = rank
    a = [[0] * n for _ in range(n)]
    for i in range(n):
        a[i][i] = 2
    lengths = [2] * n
    if letter == "A":
        for i in range(n - 1):
            a[i][i + 1] = a[i + 1][i] = -1
    elif letter == "B":
        # alpha_n short
        for i in range(n - 1):
            a[i][i + 1] = a[i + 1][i] = -1
        lengths = [4] * (n - 1) + [2]
    elif letter == "C":
        # alpha_n long
        for i in range(n - 1):
            a[i][i + 1] = a[i + 1][i] = -1
        lengths = [2] * (n - 1) + [4]
    elif letter == "D":
        for i in range(n - 2):
            a[i][i + 1] = a[i + 1][i] = -1
        a[n - 3][n - 1] = a[n - 1][n - 3] = -1
    elif letter == "E":
        # Bourbaki labelling: 1-3-4-5-6(-7-8), 2 attached to 4
        edges = [(0, 2), (2, 3), (3, 4), (1, 3)] + [(k, k + 1) for k in range(4, n - 1)]
        for i, j in edges:
            a[i][j] = a[j][i] = -1
    elif letter == "F":
        a[0][1] = a[1][0] = -1
        a[2][3] = a[3][2] = -1
        a[1][2] = a[2][1] = -1
        lengths = [4, 4, 2, 2]
    elif letter == "G":
        a[0][1] = a[1][0] = -1
        lengths = [2, 6]
    # bonded simple roots: (a_i, a_j) = -max(|a_i|^2, |a_j|^2) / 2
    sym = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i == j:
                sym[i][j] = lengths[i]
            elif a[i][j]:
                sym[i][j] = -max(lengths[i], lengths[j]) // 2
    cartan = [[Fraction(2 * sym[i][j], sym[j][j]) for j in range(n)] for i in range(n)]
    return cartan, sym


_VALID = {"A": 1, "B": 2, "C": 2, "D": 4, "E": 6, "F": 4, "G": 2}


def _check_type(letter: str, rank: int, max_rank: int) -> None:
    if letter not in _VALID:
        raise ValueError(f"invalid Cartan type ({letter!r}, {rank}): unknown letter")
    if rank < _VALID[letter]:
        raise ValueError(f"invalid Cartan type ({letter!r}, {rank}): rank too small")
    if letter == "E" and rank > 8:
        raise ValueError(f"invalid Cartan type ({letter!r}, {rank}): E has rank 6, 7 or 8")
    if letter == "F" and rank != 4 or letter == "G" and rank != 2:
        raise ValueError(f"invalid Cartan type ({letter!r}, {rank})")
    if rank > max_rank:
        raise ValueError(f"invalid Cartan type ({letter!r}, {rank}): rank exceeds cap {max_rank}")


def _mat_inv(m):
    """Exact inverse of a square Fraction matrix (Gauss-Jordan)."""
    n = len(m)
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for c in range(n):
        p = next(r for r in range(c, n) if aug[r][c] != 0)
        aug[c], aug[p] = aug[p], aug[c]
        pv = aug[c][c]
        aug[c] = [x / pv for x in aug[c]]
        for r in range(n):
            if r != c and aug[r][c] != 0:
                f = aug[r][c]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[c])]
    return [row[n:] for row in aug]


@dataclass(frozen=True)
class WeylElement:
    """Integer matrix acting on fundamental-weight coordinates (column vectors)."""

    matrix: Tuple[Tuple[int, ...], ...]
    length: int

    @property
    def sign(self) -> int:
        return -1 if self.length % 2 else 1

    def act(self, mu: Sequence) -> tuple:
        return tuple(sum(r * m for r, m in zip(row, mu)) for row in self.matrix)


@dataclass
class RootSystem:
    cartan_type: str
    rank: int
    cartan: List[List[Fraction]]          # a_ij, alpha_i = sum_j a_ij omega_j
    sym: List[List[int]]                  # (alpha_i, alpha_j)
    gram: List[List[Fraction]]            # (omega_i, omega_j)
    simple_roots: List[Weight]            # fundamental coords
    positive_roots: List[Weight]          # fundamental coords
    positive_roots_rc: List[Weight]       # simple-root coords
    rho: Weight
    _weyl: List[WeylElement] = field(default_factory=list, repr=False)

    # -- basic linear algebra -------------------------------------------------
    @property
    def name(self) -> str:
        return f"{self.cartan_type}{self.rank}"

    def inner(self, a: Sequence, b: Sequence) -> Fraction:
        g = self.gram
        r = self.rank
        return sum((Fraction(a[i]) * g[i][j] * b[j] for i in range(r) for j in range(r)), Fraction(0))

    def norm2(self, a: Sequence) -> Fraction:
        return self.inner(a, a)

    def to_root_coords(self, mu: Sequence) -> tuple:
        """Simple-root coordinates (Fractions) of a weight given in fundamental coordinates."""
        inv = self._cartan_inv_t
        return tuple(sum((inv[i][j] * mu[j] for j in range(self.rank)), Fraction(0)) for i in range(self.rank))

    def from_root_coords(self, c: Sequence) -> tuple:
        a = self.cartan
        out = []
        for j in range(self.rank):
            s = sum((Fraction(c[i]) * a[i][j] for i in range(self.rank)), Fraction(0))
            out.append(int(s) if s.denominator == 1 else s)
        return tuple(out)

    # -- lattice membership ---------------------------------------------------
    def in_P(self, mu) -> bool:
        return all(Fraction(x).denominator == 1 for x in mu)

    def in_Q(self, mu) -> bool:
        return self.in_P(mu) and all(x.denominator == 1 for x in self.to_root_coords(mu))

    def in_Q_plus_rho(self, mu) -> bool:
        return self.in_P(mu) and self.in_Q(tuple(Fraction(m) - r for m, r in zip(mu, self.rho)))

    def is_dominant(self, mu) -> bool:
        return all(x >= 0 for x in mu)

    def is_regular_dominant(self, mu) -> bool:
        return all(x > 0 for x in mu)

    def height(self, mu) -> Fraction:
        return sum(self.to_root_coords(mu), Fraction(0))

    # -- Weyl group -------------------------------------------------------------
    def simple_reflection(self, i: int) -> Tuple[Tuple[int, ...], ...]:
        # s_i(mu) = mu - mu_i alpha_i  (mu_i = (mu, alpha_i^vee))
        r = self.rank
        rows = []
        for j in range(r):
            rows.append(tuple(int(j == k) - (int(self.cartan[i][j]) if k == i else 0) for k in range(r)))
        return tuple(rows)

    @property
    def weyl(self) -> List[WeylElement]:
        if not self._weyl:
            self._weyl = _enumerate_weyl(self)
        return self._weyl

    def weyl_orbit(self, mu) -> set:
        return {w.act(mu) for w in self.weyl}

    def dominant_representative(self, mu) -> Tuple[tuple, int]:
        """Reflect ``mu`` into the dominant chamber; return (dominant, parity of reflections)."""
        mu = list(mu)
        parity = 0
        while True:
            for i in range(self.rank):
                if mu[i] < 0:
                    c = mu[i]
                    mu = [m - c * int(self.cartan[i][j]) for j, m in enumerate(mu)]
                    parity ^= 1
                    break
            else:
                return tuple(mu), parity

    def __hash__(self):
        return hash((self.cartan_type, self.rank))

    def __eq__(self, other):
        return isinstance(other, RootSystem) and (self.cartan_type, self.rank) == (other.cartan_type, other.rank)


def _mat_mul(a, b):
    return tuple(tuple(sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(len(b[0]))) for i in range(len(a)))


def _enumerate_weyl(rs: RootSystem) -> List[WeylElement]:
    r = rs.rank
    ident = tuple(tuple(int(i == j) for j in range(r)) for i in range(r))
    gens = [rs.simple_reflection(i) for i in range(r)]
    seen = {ident: 0}
    frontier = [ident]
    depth = 0
    while frontier:
        depth += 1
        nxt = []
        for m in frontier:
            for g in gens:
                p = _mat_mul(g, m)
                if p not in seen:
                    seen[p] = depth
                    nxt.append(p)
        frontier = nxt
    return [WeylElement(m, l) for m, l in sorted(seen.items(), key=lambda kv: (kv[1], kv[0]))]


def build_root_system(letter: str, rank: int, max_rank: int = MAX_RANK) -> RootSystem:
    """Return the root system of Cartan type ``letter``\\ ``rank``.

    >>> build_root_system("A", 2).norm2(build_root_system("A", 2).rho)
    Fraction(2, 1)
    """
    letter = letter.upper()
    _check_type(letter, rank, max_rank)
    return _build(letter, rank)


@lru_cache(maxsize=None)
def _build(letter: str, rank: int) -> RootSystem:
    cartan, sym = _cartan_data(letter, rank)
    n = rank
    a_inv = _mat_inv(cartan)
    # (omega_i, omega_j) = (A^-1 S A^-T)_ij
    s = [[Fraction(x) for x in row] for row in sym]
    tmp = [[sum(a_inv[i][k] * s[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
    gram = [[sum(tmp[i][k] * a_inv[j][k] for k in range(n)) for j in range(n)] for i in range(n)]
    simple = [tuple(int(x) for x in row) for row in cartan]
    # positive roots via closure of simple roots in root coordinates
    pos_rc = set()
    stack = [tuple(int(i == j) for j in range(n)) for i in range(n)]
    while stack:
        c = stack.pop()
        if c in pos_rc:
            continue
        pos_rc.add(c)
        for i in range(n):
            # s_i(beta) = beta - <beta, alpha_i^vee> alpha_i
            pair = sum(c[k] * int(cartan[k][i]) for k in range(n))
            img = tuple(c[k] - (pair if k == i else 0) for k in range(n))
            if any(img) and all(x >= 0 for x in img) and img not in pos_rc:
                stack.append(img)
    pos_rc = sorted(pos_rc, key=lambda c: (sum(c), c))
    pos_fw = [tuple(int(sum(c[i] * cartan[i][j] for i in range(n))) for j in range(n)) for c in pos_rc]
    rs = RootSystem(
        cartan_type=letter,
        rank=rank,
        cartan=cartan,
        sym=sym,
        gram=gram,
        simple_roots=simple,
        positive_roots=pos_fw,
        positive_roots_rc=pos_rc,
        rho=tuple([1] * n),
    )
    rs._cartan_inv_t = [[a_inv[j][i] for j in range(n)] for i in range(n)]
    return rs


def su(n: int) -> RootSystem:
    """Root system of SU(n), i.e. type A_{n-1}."""
    return build_root_system("A", n - 1)


def parse_group(spec: str, max_rank: int = MAX_RANK) -> RootSystem:
    """Parse ``"A2"``, ``"su3"`` or ``"SU(3)"`` into a root system."""
    s = spec.strip().upper().replace("(", "").replace(")", "")
    if s.startswith("SU"):
        return build_root_system("A", int(s[2:]) - 1, max_rank)
    return build_root_system(s[0], int(s[1:]), max_rank)


def weyl_group(rs: RootSystem) -> List[WeylElement]:
    return rs.weyl


# ---------------------------------------------------------------------------
# Kostant partition functions
# ---------------------------------------------------------------------------

def _rc_int(rs: RootSystem, beta) -> tuple | None:
    c = rs.to_root_coords(beta)
    if any(x.denominator != 1 for x in c):
        return None
    return tuple(int(x) for x in c)


@lru_cache(maxsize=None)
def _kostant_rc(rs: RootSystem, c: tuple, mult: int = 1) -> int:
    if any(x < 0 for x in c):
        return 0
    if not any(c):
        return 1
    table = kostant_table(rs, tuple(c), mult)
    return int(table[c])


def kostant_partition(rs: RootSystem, beta, mult: int = 1) -> int:
    """Number of ways to write ``beta`` as a sum of positive roots.

    With ``mult > 1`` each positive root is available in ``mult`` colours,
    i.e. the coefficients of prod_alpha (1 - x^alpha)^(-mult).
    """
    c = _rc_int(rs, beta)
    if c is None:
        return 0
    return _kostant_rc(rs, c, mult)


def kostant_table(rs: RootSystem, top: tuple, mult: int = 1) -> np.ndarray:
    """Dense table of K_mult over the box 0 <= c <= top in simple-root coordinates."""
    shape = tuple(int(t) + 1 for t in top)
    roots = np.array(rs.positive_roots_rc, dtype=np.int64)
    return _kernels.kostant_table(roots, mult, shape)


def n_ell(rs: RootSystem, ell) -> int:
    """Alternating Kostant sum  N_ell = sum_w (-1)^{l(w)} K(w(ell) - rho).

    Normalised so that N_{m rho} = sgn(m) for SU(2).
    """
    total = 0
    rho = rs.rho
    for w in rs.weyl:
        img = w.act(ell)
        total += w.sign * kostant_partition(rs, tuple(a - b for a, b in zip(img, rho)))
    return total


# ---------------------------------------------------------------------------
# Chamber-averaged expansions of powers of the Weyl denominator
# ---------------------------------------------------------------------------

@dataclass
class WeightSeries:
    """Finite map weight -> exact rational coefficient, complete up to ``cutoff`` height."""

    terms: Dict[tuple, Fraction]
    cutoff: int | None = None   # None means exact (polynomial)

    def __mul__(self, other: "WeightSeries") -> "WeightSeries":
        out: Dict[tuple, Fraction] = {}
        for a, ca in self.terms.items():
            for b, cb in other.terms.items():
                k = tuple(x + y for x, y in zip(a, b))
                out[k] = out.get(k, 0) + ca * cb
        return WeightSeries({k: v for k, v in out.items() if v}, None)


def denominator_polynomial(rs: RootSystem, power: int) -> Dict[tuple, int]:
    """(sum_w (-1)^{l(w)} x^{w(rho)})^power for power >= 0, exact."""
    base = {w.act(rs.rho): w.sign for w in rs.weyl}
    out = {tuple([0] * rs.rank): 1}
    for _ in range(power):
        nxt: Dict[tuple, int] = {}
        for a, ca in out.items():
            for b, cb in base.items():
                k = tuple(x + y for x, y in zip(a, b))
                nxt[k] = nxt.get(k, 0) + ca * cb
        out = {k: v for k, v in nxt.items() if v}
    return out


def chamber_coefficient(rs: RootSystem, power: int, mu) -> Fraction:
    """Coefficient of x^mu in the chamber average of D^power, D the Weyl denominator.

    For power = -k < 0 this is (1/|W|) sum_w (-1)^{k l(w)} K_k(-w(mu) - k rho).
    """
    if power >= 0:
        return Fraction(denominator_polynomial(rs, power).get(tuple(mu), 0))
    k = -power
    total = 0
    for w in rs.weyl:
        img = w.act(mu)
        gamma = tuple(-a - k * b for a, b in zip(img, rs.rho))
        s = w.sign if k % 2 else 1
        total += s * kostant_partition(rs, gamma, k)
    return Fraction(total, len(rs.weyl))


def denominator_power_expansion(rs: RootSystem, power: int, cutoff: int) -> WeightSeries:
    """Chamber-averaged expansion of (sum_w (-1)^{l(w)} x^{w(rho)})^power.

    Non-negative powers give the exact polynomial.  Negative powers give the
    average over the |W| Weyl chambers of the geometric-series expansions,
    truncated to weights ``w(-k rho - gamma)`` with ``height(gamma) <= cutoff``.
    """
    if cutoff < 0:
        raise ValueError("cutoff must be nonnegative")
    if power >= 0:
        return WeightSeries({k: Fraction(v) for k, v in denominator_polynomial(rs, power).items()}, None)
    k = -power
    r = rs.rank
    nw = len(rs.weyl)
    table = kostant_table(rs, tuple([cutoff] * r), k)
    terms: Dict[tuple, Fraction] = {}
    for gamma in product(range(cutoff + 1), repeat=r):
        if sum(gamma) > cutoff:
            continue
        val = int(table[gamma])
        if not val:
            continue
        mu0 = tuple(-k * rr - g for rr, g in zip(rs.rho, rs.from_root_coords(gamma)))
        for w in rs.weyl:
            img = w.act(mu0)
            s = w.sign if k % 2 else 1
            terms[img] = terms.get(img, Fraction(0)) + Fraction(s * val, nw)
    return WeightSeries({kk: v for kk, v in terms.items() if v}, cutoff)


def weyl_root_matrices(rs: RootSystem) -> np.ndarray:
    """Each Weyl element as an integer matrix on simple-root coordinates."""
    mats = []
    for w in rs.weyl:
        cols = [rs.to_root_coords(w.act(a)) for a in rs.simple_roots]
        mats.append([[int(cols[j][i]) for j in range(rs.rank)] for i in range(rs.rank)])
    return np.array(mats, dtype=np.int64)


def n_ell_many(rs: RootSystem, ells) -> List[int]:
    """Batched ``n_ell`` for weights in Q + rho (other weights give 0)."""
    ells = [tuple(e) for e in ells]
    out = [0] * len(ells)
    idx, pts = [], []
    rho_rc = rs.to_root_coords(rs.rho)
    for k, e in enumerate(ells):
        if not rs.in_Q_plus_rho(e):
            continue
        idx.append(k)
        pts.append([int(a - b) for a, b in zip(rs.to_root_coords(e), rho_rc)])
    if not pts:
        return out
    pts = np.array(pts, dtype=np.int64)
    W = weyl_root_matrices(rs)
    # rc(w(rho + m) - rho) = rc(w rho - rho) + W m
    consts = np.array([[int(x) for x in rs.to_root_coords(tuple(a - b for a, b in zip(w.act(rs.rho), rs.rho)))]
                       for w in rs.weyl], dtype=np.int64)
    top = np.zeros(rs.rank, dtype=np.int64)
    for Wm, c in zip(W, consts):
        top = np.maximum(top, (c[None, :] + pts @ Wm.T).max(axis=0))
    top = np.maximum(top, 0)
    table = kostant_table(rs, tuple(int(t) for t in top))
    signs = np.array([w.sign for w in rs.weyl], dtype=np.int64)
    vals = _kernels.weyl_grid(pts, -W, consts, signs, table)
    for k, v in zip(idx, vals):
        out[k] = int(v)
    return out
