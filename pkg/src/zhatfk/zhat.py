"""Homological blocks of weakly negative definite plumbings.

The contour integral is evaluated as a constant term: every vertex factor
is expanded as a finite or chamber-averaged series in x_v, and the theta
function contributes q^{-(l, B^{-1} l)/2} for l in B Q^V + b.  Vertices of
degree <= 2 have finite support.  The remaining (high-valency) vertices are
enumerated exactly inside the ellipsoid cut out by the exponent bound;
weak negative definiteness makes that ellipsoid bounded.
"""
from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

import numpy as np

from . import _kernels
from .lie import RootSystem, chamber_coefficient, denominator_polynomial, weyl_root_matrices
from .plumbing import (
    BLabel,
    LabelSpace,
    LinkingMatrix,
    NotWeaklyNegativeDefinite,
    PlumbingGraph,
    is_weakly_negative_definite,
    linking_matrix,
    theta_exponent,
)
from .qlaurent import QSeries

MAX_ROUNDS = 6
DEFAULT_MAX_PAIRS = 5 * 10**8


class BudgetExceeded(RuntimeError):
    pass


@dataclass
class Budget:
    max_pairs: int = DEFAULT_MAX_PAIRS     # (H point, L combination) pairs per pass
    max_rounds: int = MAX_ROUNDS

    @classmethod
    def from_env(cls) -> "Budget":
        b = cls()
        if os.environ.get("ZHATFK_MAX_PAIRS"):
            b.max_pairs = int(os.environ["ZHATFK_MAX_PAIRS"])
        if os.environ.get("ZHATFK_MAX_ROUNDS"):
            b.max_rounds = int(os.environ["ZHATFK_MAX_ROUNDS"])
        return b


@dataclass
class ZhatResult:
    series: QSeries
    label: BLabel
    delta_b: Optional[Fraction]
    stabilized: bool
    info: dict = field(default_factory=dict)


def vertex_tables(g: PlumbingGraph, rs: RootSystem) -> List[dict]:
    """Finite vertex factors; high-valency vertices get ``None``.

    deg 2 -> {0: 1}; deg 1 -> {w(rho): (-1)^l(w)}; deg 0 -> D^2.
    """
    out = []
    for d in g.degrees():
        if d >= 3:
            out.append(None)
        else:
            out.append({k: Fraction(v) for k, v in denominator_polynomial(rs, 2 - d).items()})
    return out


def prefactor(lm: LinkingMatrix, rs: RootSystem):
    """(sign, q-power) of (-1)^{|Delta+| pi} q^{(3 sigma - Tr B)(rho, rho)/2}."""
    sign = -1 if (len(rs.positive_roots) * lm.pi) % 2 else 1
    power = Fraction(3 * lm.sigma - lm.trace) * rs.norm2(rs.rho) / 2
    return sign, power


class _Problem:
    """Integer data for one (graph, root system) pair, shared by all labels."""

    def __init__(self, g: PlumbingGraph, rs: RootSystem, lm: Optional[LinkingMatrix] = None):
        self.g, self.rs = g, rs
        self.lm = lm or linking_matrix(g)
        degs = g.degrees()
        if not is_weakly_negative_definite(self.lm, degs):
            raise NotWeaklyNegativeDefinite("B^{-1} is not negative definite on the high-valency vertices")
        self.space = LabelSpace(g, rs, self.lm)
        n, r = g.n, rs.rank
        self.n, self.r = n, r
        self.degs = degs
        self.H = [v for v in range(n) if degs[v] >= 3]
        self.L = [v for v in range(n) if degs[v] < 3]
        detB = abs(self.lm.det)
        inv = self.lm.inverse()
        self.adj = np.array([[int(x * detB) for x in row] for row in inv], dtype=np.int64)  # |det| B^{-1}
        S = np.array(rs.sym, dtype=np.int64)
        self.S = S
        # rank-r lattice P -> root coordinates scaled by dA
        self.dA = self._cartan_den()
        self.Den = 2 * detB * self.dA * self.dA
        self.nW = len(rs.weyl)
        self.tables = vertex_tables(g, rs)
        self.sign, self.pref_power = prefactor(self.lm, rs)
        self.loops = g.first_betti()
        rho_rc = rs.to_root_coords(rs.rho)
        self.rho_rc = rho_rc
        # scaled base root coordinates for H vertices (delta_v = -(deg-2) rho)
        self.base_H = [[int((2 - degs[v]) * x * self.dA) for x in rho_rc] for v in self.H]
        self.Wrc = weyl_root_matrices(rs)
        self.signs = np.array([w.sign for w in rs.weyl], dtype=np.int64)
        self._build_L()

    def _cartan_den(self) -> int:
        d = 1
        for i in range(self.rs.rank):
            om = tuple(int(i == j) for j in range(self.rs.rank))
            for x in self.rs.to_root_coords(om):
                d = math.lcm(d, x.denominator)
        return d

    # -- finite vertices ------------------------------------------------------------
    def _build_L(self):
        rs, n, r, dA = self.rs, self.n, self.r, self.dA
        H, L = self.H, self.L
        sp = self.space
        # scaled root coordinates of every allowed weight at each L vertex
        choices = []
        for v in L:
            opts = []
            for mu, c in self.tables[v].items():
                rc = rs.to_root_coords(mu)
                opts.append(([int(x * dA) for x in rc], c))
            choices.append(opts)
        combos_rc = []
        combos_c = []
        for pick in itertools.product(*choices):
            combos_rc.append([p[0] for p in pick])
            coef = Fraction(1)
            for p in pick:
                coef *= p[1]
            combos_c.append(coef)
        Y = np.zeros((len(combos_rc), n, r), dtype=np.int64)   # scaled root coords, all vertices
        for k, rcs in enumerate(combos_rc):
            for j, v in enumerate(L):
                Y[k, v] = rcs[j]
            for j, v in enumerate(H):
                Y[k, v] = self.base_H[j]
        # every coefficient on L is an integer here (finite Weyl polynomials)
        lcoef = np.array([int(c) for c in combos_c], dtype=np.int64)
        adj, S = self.adj, self.S
        # Den * g_L  (g_L = -(B^{-1}_{H,.} (x) S) Y)  ->  -2 dA (adj_{H,.} (x) S)(dA Y)
        SY = np.einsum("ij,kvj->kvi", S, Y)                         # (k, v, r)
        if H:
            G = -2 * self.dA * np.einsum("hv,kvi->khi", adj[H, :], SY)   # (k, |H|, r)
            G = G.reshape(len(Y), len(H) * r)
        else:
            G = np.zeros((len(Y), 0), dtype=np.int64)
        # Den * c_L = -(dA Y)^T (adj (x) S) (dA Y)
        C = -np.einsum("kui,uv,kvi->k", Y, adj, SY)
        # label residues contributed by L vertices
        res = np.zeros((len(Y), len(sp.slots)), dtype=np.int64)
        if sp.slots:
            U = np.array(sp.U, dtype=np.int64)
            dl = []
            for v in L:
                drc = [int((x) * dA) for x in sp.delta_rc[v]]
                dl.append(drc)
            for s, (vp, i) in enumerate(sp.slots):
                acc = np.zeros(len(Y), dtype=np.int64)
                for j, v in enumerate(L):
                    acc += U[vp, v] * ((Y[:, v, i] - dl[j][i]) // dA)
                res[:, s] = acc % sp.diag[vp]
        # merge identical (G, C, res) rows
        keys = np.concatenate([G, C[:, None], res], axis=1)
        if len(keys):
            uniq, inv = np.unique(keys, axis=0, return_inverse=True)
            inv = inv.reshape(-1)
            summed = np.zeros(len(uniq), dtype=np.int64)
            np.add.at(summed, inv, lcoef)
            keep = summed != 0
            uniq, summed = uniq[keep], summed[keep]
        else:
            uniq, summed = keys, lcoef
        h = len(H) * r
        self.lg = np.ascontiguousarray(uniq[:, :h])
        self.lc = np.ascontiguousarray(uniq[:, h])
        self.lres = np.ascontiguousarray(uniq[:, h + 1:])
        self.lcoef = summed
        self.n_combos = len(combos_rc)
        # quadratic part: Den * M with M = -B^{-1}_{HH} (x) S
        if H:
            self.Q2 = np.kron(-2 * self.dA * self.dA * adj[np.ix_(H, H)], S)
        else:
            self.Q2 = np.zeros((0, 0), dtype=np.int64)

    # -- continuous bounds ----------------------------------------------------------
    def lower_bounds(self) -> np.ndarray:
        """Real minimum of Den * E over the H coordinates, per L row."""
        if not len(self.H):
            return self.lc.astype(float)
        M = self.Q2.astype(float)
        Minv = np.linalg.inv(M)
        g = self.lg.astype(float)
        return self.lc - 0.5 * np.einsum("ki,ij,kj->k", g, Minv, g)

    def h_box(self, bound: float, rows: np.ndarray):
        M = self.Q2.astype(float)
        Minv = np.linalg.inv(M)
        g = self.lg[rows].astype(float)
        centre = -g @ Minv.T
        emin = self.lc[rows] - 0.5 * np.einsum("ki,ij,kj->k", g, Minv, g)
        slack = np.maximum(bound - emin, 0.0)
        rad = np.sqrt(2.0 * slack[:, None] * np.diag(Minv)[None, :])
        lo = np.floor((centre - rad).min(axis=0)).astype(np.int64) - 1
        hi = np.ceil((centre + rad).max(axis=0)).astype(np.int64) + 1
        return lo, hi

    # -- high-valency vertices ----------------------------------------------------------
    def vertex_coefficients(self, j: int, lo, hi):
        """(points m, |W| n_v) on the box for the j-th high-valency vertex."""
        r = self.r
        v = self.H[j]
        k = self.degs[v] - 2
        axes = [np.arange(lo[i], hi[i] + 1, dtype=np.int64) for i in range(r)]
        pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, r)
        rho = np.array([int(x * 2) for x in self.rho_rc], dtype=np.int64)
        # consts_w = k (W rho - rho) in root coordinates (integral)
        consts = np.array([k * ((W @ rho) - rho) // 2 for W in self.Wrc], dtype=np.int64)
        signs = self.signs if k % 2 else np.ones_like(self.signs)
        top = np.zeros(r, dtype=np.int64)
        for W, c in zip(self.Wrc, consts):
            gmax = (c[None, :] - pts @ W.T).max(axis=0)
            top = np.maximum(top, gmax)
        top = np.maximum(top, 0)
        roots = np.array(self.rs.positive_roots_rc, dtype=np.int64)
        table = _kernels.kostant_table(roots, k, tuple(int(t) + 1 for t in top))
        coef = _kernels.weyl_grid(pts, self.Wrc, consts, signs, table)
        keep = coef != 0
        return pts[keep], coef[keep]

    def h_points(self, lo, hi):
        r = self.r
        per = [self.vertex_coefficients(j, lo[j * r:(j + 1) * r], hi[j * r:(j + 1) * r]) for j in range(len(self.H))]
        if not per:
            return np.zeros((1, 0), np.int64), np.ones(1, np.int64)
        pts, coef = per[0]
        for p2, c2 in per[1:]:
            pts = np.concatenate([np.repeat(pts, len(p2), axis=0), np.tile(p2, (len(pts), 1))], axis=1)
            coef = np.repeat(coef, len(c2)) * np.tile(c2, len(coef))
        return pts, coef

    def h_residues(self, pts):
        sp = self.space
        res = np.zeros((len(pts), len(sp.slots)), dtype=np.int64)
        if not sp.slots or not self.H:
            return res
        U = np.array(sp.U, dtype=np.int64)
        r = self.r
        for s, (vp, i) in enumerate(sp.slots):
            acc = np.zeros(len(pts), dtype=np.int64)
            for j, v in enumerate(self.H):
                acc += U[vp, v] * pts[:, j * r + i]
            res[:, s] = acc % sp.diag[vp]
        return res

    # -- one enumeration pass ------------------------------------------------------------
    def run(self, bound: int, target: int, budget: Budget):
        """{class: {scaled exponent: integer coefficient}} for all terms with Den*E < bound."""
        lbs = self.lower_bounds()
        rows = np.flatnonzero(lbs < bound)
        if len(rows) == 0:
            return {}, 0
        if self.H:
            lo, hi = self.h_box(float(bound), rows)
            pts, hcoef = self.h_points(lo, hi)
        else:
            pts, hcoef = np.zeros((1, 0), np.int64), np.ones(1, np.int64)
        npairs = len(pts) * len(rows)
        if npairs > budget.max_pairs:
            raise BudgetExceeded(f"{npairs} lattice pairs exceed the budget of {budget.max_pairs}")
        if self.H:
            hq = np.einsum("pi,ij,pj->p", pts, self.Q2, pts) // 2
        else:
            hq = np.zeros(1, np.int64)
        hres = self.h_residues(pts)
        sp = self.space
        moduli = np.array(sp.moduli, dtype=np.int64)
        radix = np.array(sp.radix, dtype=np.int64)
        e, c, k = _kernels.accumulate_support(hq, pts, hcoef, hres, self.lg[rows], self.lc[rows], self.lcoef[rows],
                                              self.lres[rows], moduli, radix, target, bound)
        return _kernels.collect_terms(e, c, k), npairs

    def to_series(self, terms: Dict[int, int], trunc: Fraction) -> QSeries:
        scale = Fraction(self.sign, self.nW ** (len(self.H) + self.loops))
        out = {Fraction(e, self.Den) + self.pref_power: scale * c for e, c in terms.items()}
        return QSeries(out, trunc + self.pref_power)


def _problem(g, rs, lm=None) -> _Problem:
    return _Problem(g, rs, lm)


def _solve(prob: _Problem, targets: Sequence[int], max_order, budget: Budget):
    """Adaptive bound: start at the global lower bound, then extend per class."""
    max_order = Fraction(max_order)
    Den = prob.Den
    lbs = prob.lower_bounds()
    if len(lbs) == 0:
        return {t: (QSeries({}, None), None, False, 0) for t in targets}
    e_lb = Fraction(math.floor(lbs.min() - 1))
    target = targets[0] if len(targets) == 1 else -1
    bound = e_lb + max_order * Den
    found: Dict[int, tuple] = {}
    pending = set(targets)
    rounds = 0
    total_pairs = 0
    last = {}
    while pending and rounds < budget.max_rounds:
        rounds += 1
        b_int = math.ceil(bound)
        terms, npairs = prob.run(b_int, target, budget)
        total_pairs += npairs
        last = terms
        need = Fraction(b_int)
        for t in list(pending):
            tt = terms.get(t)
            if not tt:
                continue
            e0 = min(tt)
            want = e0 + max_order * Den
            if want <= b_int:
                found[t] = (tt, e0, want)
                pending.discard(t)
            else:
                need = max(need, want)
        if not pending:
            break
        if need > b_int:
            bound = need
        else:
            bound = b_int + max_order * Den
    out = {}
    for t in targets:
        if t in found:
            tt, e0, want = found[t]
            kept = {e: c for e, c in tt.items() if e < want}
            series = prob.to_series(kept, Fraction(want, Den))
            out[t] = (series, series.min_exp(), True, total_pairs)
        else:
            tt = last.get(t, {})
            series = prob.to_series(tt, Fraction(math.ceil(bound), Den))
            out[t] = (series, series.min_exp(), False, total_pairs)
    return out


def compute_zhat(g: PlumbingGraph, rs: RootSystem, b=0, max_order=10,
                 budget: Optional[Budget] = None, lm: Optional[LinkingMatrix] = None) -> ZhatResult:
    """Ẑ_b for a weakly negative definite plumbing.

    ``b`` is a label index, a BLabel, or a raw per-vertex weight tuple; the
    series is complete for every exponent below ``delta_b + max_order``.
    Graphs with cycles carry an extra 1/|W| per independent cycle.
    """
    budget = budget or Budget.from_env()
    prob = _problem(g, rs, lm)
    lab = _resolve_label(prob.space, b)
    series, d, ok, pairs = _solve(prob, [lab.index], max_order, budget)[lab.index]
    return ZhatResult(series, lab, d, ok, {"pairs": pairs, "den": prob.Den})


def _resolve_label(space: LabelSpace, b) -> BLabel:
    if isinstance(b, BLabel):
        return space.canonical(b.rep)
    if isinstance(b, int):
        return space.label(b)
    return space.canonical(b)


def zhat_all_labels(g: PlumbingGraph, rs: RootSystem, max_order=10, fold: bool = True,
                    budget: Optional[Budget] = None, orbit_sum: bool = False) -> Dict[int, ZhatResult]:
    """Ẑ for every label (or every Weyl orbit when ``fold``), keyed by label index.

    With ``orbit_sum`` each series is summed over the Weyl orbit of its label.
    Since Ẑ is constant on orbits this is the orbit size times Ẑ_b, which is
    the normalization of tables that list one entry per orbit.
    """
    budget = budget or Budget.from_env()
    prob = _problem(g, rs)
    labels = prob.space.fold() if fold else prob.space.labels()
    solved = _solve(prob, [b.index for b in labels], max_order, budget)
    out = {}
    for lab in labels:
        series, d, ok, pairs = solved[lab.index]
        size = len(prob.space.orbit(lab))
        if orbit_sum:
            series = series * size
        out[lab.index] = ZhatResult(series, lab, d, ok,
                                    {"pairs": pairs, "den": prob.Den, "orbit_size": size})
    return out


def enumerate_support(g: PlumbingGraph, rs: RootSystem, b=0, max_order=10, height: int = 6):
    """Reference enumeration over an explicit box (slow; for cross-checks).

    Yields (ell, coefficient, exponent) for every ell in B Q^V + b whose
    high-valency entries have simple-root coordinates within ``height`` of
    the base point, whose vertex-factor product is nonzero and whose theta
    exponent is below the smallest such exponent plus ``max_order``.
    """
    lm = linking_matrix(g)
    space = LabelSpace(g, rs, lm)
    lab = _resolve_label(space, b)
    tables = vertex_tables(g, rs)
    degs = g.degrees()
    finite = [list(t.items()) if t is not None else None for t in tables]
    hv = [v for v, t in enumerate(tables) if t is None]
    rng = range(-height, height + 1)
    rows = []
    for pick_h in itertools.product(*[itertools.product(rng, repeat=rs.rank) for _ in hv]):
        hw = {}
        coef_h = Fraction(1)
        for v, m in zip(hv, pick_h):
            base = rs.to_root_coords(tuple((2 - degs[v]) * x for x in rs.rho))
            mu = rs.from_root_coords([Fraction(a) + m_ for a, m_ in zip(base, m)])
            c = chamber_coefficient(rs, 2 - degs[v], mu)
            if not c:
                break
            hw[v] = tuple(mu)
            coef_h *= c
        else:
            for pick in itertools.product(*[f for f in finite if f is not None]):
                ell = []
                it = iter(pick)
                coef = coef_h
                for v in range(g.n):
                    if v in hw:
                        ell.append(hw[v])
                    else:
                        w, c = next(it)
                        ell.append(tuple(w))
                        coef *= c
                if space.index_of(ell) != lab.index:
                    continue
                rows.append((tuple(ell), coef, theta_exponent(lm, ell, rs)))
    if not rows:
        return
    e0 = min(r[2] for r in rows)
    for row in sorted(rows, key=lambda r: (r[2], r[0])):
        if row[2] < e0 + Fraction(max_order):
            yield row


def series_from_support(g: PlumbingGraph, rs: RootSystem, rows, trunc=None) -> QSeries:
    """Assemble Ẑ from enumerate_support rows (same normalization as compute_zhat)."""
    lm = linking_matrix(g)
    sign, power = prefactor(lm, rs)
    scale = Fraction(sign, len(rs.weyl) ** g.first_betti())
    terms: Dict[Fraction, Fraction] = {}
    for _, c, e in rows:
        terms[e + power] = terms.get(e + power, Fraction(0)) + scale * c
    return QSeries(terms, None if trunc is None else Fraction(trunc) + power)


# ---------------------------------------------------------------------------
# Neumann-move invariance
# ---------------------------------------------------------------------------

@dataclass
class NeumannTrial:
    move: str
    site: object
    before: PlumbingGraph
    after: PlumbingGraph
    matched: bool
    round_trip: bool
    labels: int
    note: str = ""

    @property
    def ok(self) -> bool:
        return self.matched and self.round_trip


def label_fingerprints(g: PlumbingGraph, rs: RootSystem, max_order=15, budget: Optional[Budget] = None):
    """(series, orbit size) for every Weyl orbit of labels."""
    res = zhat_all_labels(g, rs, max_order, fold=True, budget=budget)
    return [(r.series, r.info["orbit_size"]) for _, r in sorted(res.items())]


def match_fingerprints(a, b) -> bool:
    """Is there a bijection between orbit lists pairing equal sizes and ≅-equal series?"""
    from .qlaurent import equal_cong

    if len(a) != len(b):
        return False
    used = [False] * len(b)
    for sa, na in a:
        for j, (sb, nb) in enumerate(b):
            if used[j] or na != nb:
                continue
            if equal_cong(sa, sb).equal:
                used[j] = True
                break
        else:
            return False
    return True


def _up_site(g: PlumbingGraph, move: str, rng) -> object:
    if move == "blowdown-edge":
        return (rng.randrange(len(g.edges)), -1)
    if move == "blowdown-leaf":
        return (rng.choice(g.ids), -1)
    u = rng.choice(g.ids)
    nbrs = [w for w, _, _ in g.neighbours(u)]
    moved = tuple(w for w in nbrs if rng.random() < 0.5)
    return (u, moved, rng.randint(-3, -1))


def neumann_trial(g: PlumbingGraph, rs: RootSystem, move: str, rng, max_order=15,
                  attempts: int = 40, budget: Optional[Budget] = None) -> NeumannTrial:
    """Blow ``g`` up by ``move`` at a random site keeping weak negative
    definiteness, compare all labelled blocks, then blow back down."""
    from .plumbing import MovePatternError, graphs_isomorphic, neumann_move

    for _ in range(attempts):
        if move == "blowdown-edge" and not g.edges:
            break
        site = _up_site(g, move, rng)
        try:
            h = neumann_move(g, move, site, "up")
        except MovePatternError:
            continue
        lm = linking_matrix(h)
        if lm.det == 0 or not is_weakly_negative_definite(lm, h.degrees()):
            continue
        new = [v for v in h.ids if v not in g.framings]
        back_site = new[0]
        down = neumann_move(h, move, back_site, "down")
        fa = label_fingerprints(g, rs, max_order, budget)
        fb = label_fingerprints(h, rs, max_order, budget)
        return NeumannTrial(move, site, g, h, match_fingerprints(fa, fb),
                            graphs_isomorphic(down, g), len(fa))
    # moves that cannot be applied keep the graph: trivially invariant
    return NeumannTrial(move, None, g, g, True, True, 0, "no admissible site")


def neumann_suite(rs: RootSystem, seed: int = 0, trials: int = 20, max_order=15,
                  max_vertices: int = 5, max_det: int = 8, budget: Optional[Budget] = None) -> List[NeumannTrial]:
    """Seeded random trees, every move in the up direction and back down."""
    import random

    from .plumbing import MOVES, random_wnd_tree

    rng = random.Random(seed)
    out = []
    for _ in range(trials):
        g = random_wnd_tree(rng, max_vertices, max_det=max_det, min_vertices=3)
        for mv in MOVES:
            out.append(neumann_trial(g, rs, mv, rng, max_order, budget=budget))
    return out
