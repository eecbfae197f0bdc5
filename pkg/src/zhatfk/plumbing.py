"""Plumbing graphs, their linking matrices, label sets and Neumann moves."""
from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Dict, List, Optional, Sequence, Tuple

from .lie import RootSystem


class PlumbingParseError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class SingularMatrixError(ValueError):
    """Raised when a computation needs B to be invertible."""


class InfiniteLabelSetError(SingularMatrixError):
    pass


class NotWeaklyNegativeDefinite(ValueError):
    pass


class MovePatternError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Graph
# ---------------------------------------------------------------------------

@dataclass
class PlumbingGraph:
    """Vertices in declaration order with integer framings, plus signed edges.

    Parallel edges between the same pair are allowed; they realize the
    looped diagrams (a +/- doubled edge contributes 0 to the linking matrix
    but 2 to each endpoint's degree).
    """

    ids: List[str]
    framings: Dict[str, int]
    edges: List[Tuple[str, str, int]] = field(default_factory=list)

    def __post_init__(self):
        for a, b, s in self.edges:
            if a == b:
                raise ValueError(f"self-loop at {a!r} is not supported")
            if s not in (1, -1):
                raise ValueError("edge signs must be +1 or -1")

    @property
    def n(self) -> int:
        return len(self.ids)

    def index(self, v: str) -> int:
        return self.ids.index(v)

    def degree(self, v: str) -> int:
        return sum((a == v) + (b == v) for a, b, _ in self.edges)

    def degrees(self) -> List[int]:
        return [self.degree(v) for v in self.ids]

    def neighbours(self, v: str) -> List[Tuple[str, int, int]]:
        """(neighbour, sign, edge index) for every edge at v."""
        out = []
        for k, (a, b, s) in enumerate(self.edges):
            if a == v:
                out.append((b, s, k))
            elif b == v:
                out.append((a, s, k))
        return out

    def is_connected(self) -> bool:
        if not self.ids:
            return False
        seen = {self.ids[0]}
        stack = [self.ids[0]]
        while stack:
            v = stack.pop()
            for u, _, _ in self.neighbours(v):
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
        return len(seen) == len(self.ids)

    def is_tree(self) -> bool:
        return self.is_connected() and len(self.edges) == self.n - 1

    def first_betti(self) -> int:
        return len(self.edges) - self.n + 1

    def linking_matrix(self) -> "LinkingMatrix":
        return linking_matrix(self)

    def flip_edge_signs(self) -> "PlumbingGraph":
        return PlumbingGraph(list(self.ids), dict(self.framings), [(a, b, -s) for a, b, s in self.edges])

    def copy(self) -> "PlumbingGraph":
        return PlumbingGraph(list(self.ids), dict(self.framings), list(self.edges))

    # -- serialization ------------------------------------------------------
    def to_dsl(self) -> str:
        lines = [f"vertex {v} {self.framings[v]}" for v in self.ids]
        lines += [f"edge {a} {b} {'+' if s > 0 else '-'}" for a, b, s in self.edges]
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {
            "vertices": [{"id": v, "framing": self.framings[v]} for v in self.ids],
            "edges": [{"a": a, "b": b, "sign": s} for a, b, s in self.edges],
        }

    def __eq__(self, other):
        if not isinstance(other, PlumbingGraph):
            return NotImplemented
        return self.ids == other.ids and self.framings == other.framings and self.edges == other.edges


def parse_plumbing(text: str) -> PlumbingGraph:
    """Parse the line-oriented DSL (``vertex``, ``edge``, ``#`` comments)."""
    ids: List[str] = []
    framings: Dict[str, int] = {}
    edges: List[Tuple[str, str, int]] = []
    edge_lines: List[int] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kind = parts[0]
        if kind == "vertex":
            if len(parts) != 3:
                raise PlumbingParseError("expected 'vertex <id> <framing>'", lineno)
            vid, fr = parts[1], parts[2]
            try:
                a = int(fr)
            except ValueError:
                raise PlumbingParseError(f"framing {fr!r} is not an integer", lineno) from None
            if vid in framings:
                raise PlumbingParseError(f"vertex {vid!r} declared twice", lineno)
            ids.append(vid)
            framings[vid] = a
        elif kind == "edge":
            if len(parts) not in (3, 4):
                raise PlumbingParseError("expected 'edge <id> <id> [+|-]'", lineno)
            sign = 1
            if len(parts) == 4:
                if parts[3] not in ("+", "-"):
                    raise PlumbingParseError(f"edge sign must be + or -, got {parts[3]!r}", lineno)
                sign = 1 if parts[3] == "+" else -1
            if parts[1] == parts[2]:
                raise PlumbingParseError("self-loops are not supported", lineno)
            edges.append((parts[1], parts[2], sign))
            edge_lines.append(lineno)
        else:
            raise PlumbingParseError(f"unknown directive {kind!r}", lineno)
    for (a, b, _), ln in zip(edges, edge_lines):
        for v in (a, b):
            if v not in framings:
                raise PlumbingParseError(f"edge endpoint {v!r} is not a declared vertex", ln)
    if not ids:
        raise PlumbingParseError("no vertices declared")
    g = PlumbingGraph(ids, framings, edges)
    if not g.is_connected():
        raise PlumbingParseError("graph is disconnected", edge_lines[-1] if edge_lines else 1)
    return g


def graph_from_json(data) -> PlumbingGraph:
    if isinstance(data, str):
        data = json.loads(data)
    try:
        ids = [str(v["id"]) for v in data["vertices"]]
        framings = {}
        for v in data["vertices"]:
            if not isinstance(v["framing"], int) or isinstance(v["framing"], bool):
                raise PlumbingParseError(f"framing of {v['id']!r} is not an integer")
            framings[str(v["id"])] = v["framing"]
        edges = [(str(e["a"]), str(e["b"]), int(e.get("sign", 1))) for e in data.get("edges", [])]
    except (KeyError, TypeError) as exc:
        raise PlumbingParseError(f"malformed graph JSON: {exc}") from None
    for a, b, _ in edges:
        for v in (a, b):
            if v not in framings:
                raise PlumbingParseError(f"edge endpoint {v!r} is not a declared vertex")
    g = PlumbingGraph(ids, framings, edges)
    if not g.is_connected():
        raise PlumbingParseError("graph is disconnected")
    return g


def load_graph(text: str) -> PlumbingGraph:
    """Accept either the DSL or its JSON mirror."""
    if text.lstrip().startswith("{"):
        return graph_from_json(text)
    return parse_plumbing(text)


# ---------------------------------------------------------------------------
# Linking matrix
# ---------------------------------------------------------------------------

def _det(m: List[List[Fraction]]) -> Fraction:
    n = len(m)
    a = [list(map(Fraction, row)) for row in m]
    det = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if a[r][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            a[c], a[p] = a[p], a[c]
            det = -det
        det *= a[c][c]
        for r in range(c + 1, n):
            f = a[r][c] / a[c][c]
            if f:
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return det


def _inverse(m) -> List[List[Fraction]]:
    n = len(m)
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for c in range(n):
        p = next((r for r in range(c, n) if aug[r][c] != 0), None)
        if p is None:
            raise SingularMatrixError("linking matrix is singular")
        aug[c], aug[p] = aug[p], aug[c]
        piv = aug[c][c]
        aug[c] = [x / piv for x in aug[c]]
        for r in range(n):
            if r != c and aug[r][c] != 0:
                f = aug[r][c]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[c])]
    return [row[n:] for row in aug]


def inertia(m) -> Tuple[int, int, int]:
    """(n_plus, n_minus, n_zero) of a symmetric matrix by exact congruence.

    Diagonal pivots are taken at the smallest index with a nonzero entry; if
    the remaining diagonal vanishes but an off-diagonal entry does not, the
    basis vector e_i is replaced by e_i + e_j to create a pivot.
    """
    a = [[Fraction(x) for x in row] for row in m]
    n = len(a)
    active = list(range(n))
    pos = neg = 0
    while active:
        piv = next((i for i in active if a[i][i] != 0), None)
        if piv is None:
            pair = next(((i, j) for i in active for j in active if i < j and a[i][j] != 0), None)
            if pair is None:
                break
            i, j = pair
            # e_i <- e_i + e_j (congruence)
            for k in range(n):
                a[i][k] += a[j][k]
            for k in range(n):
                a[k][i] += a[k][j]
            piv = i
        d = a[piv][piv]
        if d > 0:
            pos += 1
        else:
            neg += 1
        rest = [i for i in active if i != piv]
        for i in rest:
            f = a[i][piv] / d
            if f:
                for k in rest:
                    a[i][k] -= f * a[piv][k]
        for i in rest:
            a[i][piv] = a[piv][i] = Fraction(0)
        active = rest
    return pos, neg, n - pos - neg


@dataclass
class LinkingMatrix:
    B: Tuple[Tuple[int, ...], ...]
    sigma: int
    pi: int
    det: int
    nullity: int = 0

    @property
    def n(self) -> int:
        return len(self.B)

    @property
    def trace(self) -> int:
        return sum(self.B[i][i] for i in range(self.n))

    def inverse(self) -> List[List[Fraction]]:
        if self.det == 0:
            raise SingularMatrixError("linking matrix is singular")
        return _inverse(self.B)


def linking_matrix(g: PlumbingGraph) -> LinkingMatrix:
    n = g.n
    idx = {v: i for i, v in enumerate(g.ids)}
    B = [[0] * n for _ in range(n)]
    for v in g.ids:
        B[idx[v]][idx[v]] = g.framings[v]
    for a, b, s in g.edges:
        B[idx[a]][idx[b]] += s
        B[idx[b]][idx[a]] += s
    return matrix_data(B)


def matrix_data(B) -> LinkingMatrix:
    B = tuple(tuple(int(x) for x in row) for row in B)
    p, m, z = inertia(B)
    det = _det([list(r) for r in B])
    return LinkingMatrix(B, p - m, p, int(det), z)


def _pos_def(m: List[List[Fraction]]) -> bool:
    """Sylvester's criterion with exact leading minors."""
    for k in range(1, len(m) + 1):
        if _det([row[:k] for row in m[:k]]) <= 0:
            return False
    return True


def high_valency(g: PlumbingGraph) -> List[int]:
    return [i for i, d in enumerate(g.degrees()) if d >= 3]


def is_weakly_negative_definite(lm: LinkingMatrix, degrees: Sequence[int]) -> bool:
    """B^{-1} negative definite on the span of the degree >= 3 vertices.

    With no such vertex the condition is empty; we then ask for B itself to
    be negative definite, so that e.g. B = (1) is rejected.
    """
    if lm.det == 0:
        raise SingularMatrixError("weak negative definiteness needs an invertible B")
    hv = [i for i, d in enumerate(degrees) if d >= 3]
    if not hv:
        return is_negative_definite(lm)
    inv = lm.inverse()
    sub = [[-inv[i][j] for j in hv] for i in hv]
    return _pos_def(sub)


def is_negative_definite(lm: LinkingMatrix) -> bool:
    return lm.pi == 0 and lm.nullity == 0


# ---------------------------------------------------------------------------
# Labels  (Q^V + delta) / B Q^V
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BLabel:
    rep: Tuple[tuple, ...]      # per-vertex weight, fundamental coordinates
    index: int

    def __str__(self):
        return f"#{self.index} " + " ".join("(" + ",".join(str(x) for x in w) + ")" for w in self.rep)


def _smith(B):
    from sympy import Matrix, ZZ
    from sympy.matrices.normalforms import smith_normal_decomp

    S, U, V = smith_normal_decomp(Matrix(B), domain=ZZ)
    diag = [abs(int(S[i, i])) for i in range(S.shape[0])]
    Uinv = U.inv()
    to_int = lambda M: [[int(M[i, j]) for j in range(M.shape[1])] for i in range(M.shape[0])]
    return diag, to_int(U), to_int(Uinv)


class LabelSpace:
    """Exact model of (Q^V + delta)/B Q^V for a graph and root system.

    A label is reduced through the Smith form U B V = D: if d is the integer
    matrix (vertex x simple root) of root coordinates of ell - delta, the
    class is U d with row v taken modulo D_v.
    """

    def __init__(self, g: PlumbingGraph, rs: RootSystem, lm: Optional[LinkingMatrix] = None):
        self.graph = g
        self.rs = rs
        self.lm = lm or linking_matrix(g)
        if self.lm.det == 0:
            raise InfiniteLabelSetError("det B = 0: the label set is infinite")
        self.diag, self.U, self.Uinv = _smith(self.lm.B)
        rho_rc = rs.to_root_coords(rs.rho)
        self.delta = [tuple((2 - d) * x for x in rs.rho) for d in g.degrees()]
        self.delta_rc = [tuple((2 - d) * x for x in rho_rc) for d in g.degrees()]
        # positions (v, i) that carry a nontrivial residue, v-major
        self.slots = [(v, i) for v in range(g.n) if self.diag[v] > 1 for i in range(rs.rank)]
        self.moduli = [self.diag[v] for v, _ in self.slots]
        self.radix = []
        acc = 1
        for m in reversed(self.moduli):
            self.radix.append(acc)
            acc *= m
        self.radix.reverse()
        self.count = acc

    # -- coordinates -------------------------------------------------------------
    def residue_of_rc(self, d: Sequence[Sequence[int]]) -> Tuple[int, ...]:
        n = self.graph.n
        z = []
        for v, i in self.slots:
            s = sum(self.U[v][u] * d[u][i] for u in range(n))
            z.append(s % self.diag[v])
        return tuple(z)

    def offset_rc(self, ell) -> List[List[int]]:
        """Integer root coordinates of ell - delta; raises if ell is not in Q^V + delta."""
        out = []
        for v, w in enumerate(ell):
            c = self.rs.to_root_coords(w)
            d = [x - y for x, y in zip(c, self.delta_rc[v])]
            if any(Fraction(x).denominator != 1 for x in d):
                raise ValueError(f"weight {tuple(w)} at vertex {self.graph.ids[v]!r} is not in Q + (2-deg)rho")
            out.append([int(x) for x in d])
        return out

    def index_of(self, ell) -> int:
        z = self.residue_of_rc(self.offset_rc(ell))
        return sum(a * b for a, b in zip(z, self.radix))

    def residues_of_index(self, idx: int) -> Tuple[int, ...]:
        if not 0 <= idx < self.count:
            raise ValueError(f"label index {idx} out of range 0..{self.count - 1}")
        return tuple((idx // r) % m for r, m in zip(self.radix, self.moduli))

    def label(self, idx: int) -> BLabel:
        z = self.residues_of_index(idx)
        n, r = self.graph.n, self.rs.rank
        zm = [[0] * r for _ in range(n)]
        for (v, i), val in zip(self.slots, z):
            zm[v][i] = val
        d = [[sum(self.Uinv[v][u] * zm[u][i] for u in range(n)) for i in range(r)] for v in range(n)]
        rep = []
        for v in range(n):
            c = [Fraction(x) + y for x, y in zip(d[v], self.delta_rc[v])]
            rep.append(tuple(self.rs.from_root_coords(c)))
        return BLabel(tuple(rep), idx)

    def canonical(self, ell) -> BLabel:
        return self.label(self.index_of(ell))

    def labels(self) -> List[BLabel]:
        return [self.label(i) for i in range(self.count)]

    def act(self, w, lab: BLabel) -> BLabel:
        return self.canonical(tuple(w.act(x) for x in lab.rep))

    def fold(self, labels: Optional[Sequence[BLabel]] = None) -> List[BLabel]:
        """Weyl-orbit representatives (minimal index in each orbit)."""
        labels = self.labels() if labels is None else list(labels)
        seen = set()
        reps = []
        for lab in sorted(labels, key=lambda b: b.index):
            if lab.index in seen:
                continue
            orbit = {self.act(w, lab).index for w in self.rs.weyl}
            seen |= orbit
            reps.append(lab)
        return reps

    def orbit(self, lab: BLabel) -> List[int]:
        return sorted({self.act(w, lab).index for w in self.rs.weyl})


def b_labels(g: PlumbingGraph, rs: RootSystem) -> List[BLabel]:
    return LabelSpace(g, rs).labels()


def weyl_fold_labels(labels: Sequence[BLabel], rs: RootSystem, g: PlumbingGraph) -> List[BLabel]:
    return LabelSpace(g, rs).fold(labels)


def theta_exponent(lm: LinkingMatrix, ell, rs: RootSystem) -> Fraction:
    """-1/2 (ell, B^{-1} ell): B^{-1} on the vertex index, (.,.) on weights."""
    inv = lm.inverse()
    n = lm.n
    total = Fraction(0)
    for u in range(n):
        for v in range(n):
            if inv[u][v]:
                total += inv[u][v] * rs.inner(ell[u], ell[v])
    return -total / 2


# ---------------------------------------------------------------------------
# Neumann moves
# ---------------------------------------------------------------------------

MOVES = ("blowdown-edge", "blowdown-leaf", "zero-chain")


def _fresh(g: PlumbingGraph, stem: str = "n") -> str:
    k = 1
    while f"{stem}{k}" in g.framings:
        k += 1
    return f"{stem}{k}"


def _without(g: PlumbingGraph, vs) -> PlumbingGraph:
    vs = set(vs)
    return PlumbingGraph([v for v in g.ids if v not in vs],
                         {v: a for v, a in g.framings.items() if v not in vs},
                         [e for e in g.edges if e[0] not in vs and e[1] not in vs])


def move_sites(g: PlumbingGraph, move: str, direction: str = "down") -> list:
    """All sites where a move applies.  Up-direction sites carry their parameters."""
    sites = []
    if direction == "down":
        for v in g.ids:
            nb = g.neighbours(v)
            a = g.framings[v]
            if move == "blowdown-edge" and a in (1, -1) and len(nb) == 2 and nb[0][0] != nb[1][0]:
                sites.append(v)
            elif move == "blowdown-leaf" and a in (1, -1) and len(nb) == 1:
                sites.append(v)
            elif move == "zero-chain" and a == 0 and len(nb) == 2 and nb[0][0] != nb[1][0]:
                u1, u2 = nb[0][0], nb[1][0]
                if not any({x, y} == {u1, u2} for x, y, _ in g.edges):
                    sites.append(v)
    else:
        for eps in (1, -1):
            if move == "blowdown-edge":
                sites += [(k, eps) for k in range(len(g.edges))]
            elif move == "blowdown-leaf":
                sites += [(v, eps) for v in g.ids]
        if move == "zero-chain":
            sites += [(v, (), 0) for v in g.ids]
    return sites


def neumann_move(g: PlumbingGraph, move: str, site, direction: str = "down") -> PlumbingGraph:
    """Apply one Neumann move.

    down: ``site`` is the vertex to remove (a +-1 vertex of degree 2 or 1, or
    a 0-framed vertex of degree 2).  up: ``site`` is
    ``(edge_index, eps)`` for blowdown-edge, ``(vertex, eps)`` for
    blowdown-leaf and ``(vertex, moved_neighbours, framing)`` for
    zero-chain, which splits ``vertex`` into two vertices joined through a
    new 0-framed vertex; ``moved_neighbours`` go to the new vertex, which
    receives ``framing``.
    """
    if move not in MOVES:
        raise MovePatternError(f"unknown move {move!r}")
    if direction not in ("down", "up"):
        raise MovePatternError(f"unknown direction {direction!r}")
    if direction == "down":
        return _move_down(g, move, site)
    return _move_up(g, move, site)


def _move_down(g: PlumbingGraph, move: str, v) -> PlumbingGraph:
    if v not in g.framings:
        raise MovePatternError(f"no vertex {v!r}")
    nb = g.neighbours(v)
    a = g.framings[v]
    if move == "blowdown-edge":
        if a not in (1, -1) or len(nb) != 2 or nb[0][0] == nb[1][0]:
            raise MovePatternError(f"{v!r} is not a +-1 vertex joining two distinct neighbours")
        (u1, s1, _), (u2, s2, _) = nb
        h = _without(g, [v])
        h.framings[u1] -= a
        h.framings[u2] -= a
        h.edges.append((u1, u2, -a * s1 * s2))
        return h
    if move == "blowdown-leaf":
        if a not in (1, -1) or len(nb) != 1:
            raise MovePatternError(f"{v!r} is not a +-1 leaf")
        u = nb[0][0]
        h = _without(g, [v])
        h.framings[u] -= a
        return h
    # zero-chain
    if a != 0 or len(nb) != 2 or nb[0][0] == nb[1][0]:
        raise MovePatternError(f"{v!r} is not a 0-framed vertex joining two distinct neighbours")
    (u1, s1, _), (u2, s2, _) = nb
    if any({x, y} == {u1, u2} for x, y, _ in g.edges):
        raise MovePatternError("the two neighbours are already adjacent")
    h = _without(g, [v, u2])
    h.framings[u1] = g.framings[u1] + g.framings[u2]
    flip = -s1 * s2
    for w, s, _ in g.neighbours(u2):
        if w != v:
            h.edges.append((u1, w, s * flip))
    return h


def _move_up(g: PlumbingGraph, move: str, site) -> PlumbingGraph:
    h = g.copy()
    if move == "blowdown-edge":
        k, eps = site
        if eps not in (1, -1) or not 0 <= k < len(g.edges):
            raise MovePatternError("blow-up needs an edge index and eps = +-1")
        u1, u2, s = g.edges[k]
        v = _fresh(g)
        del h.edges[k]
        h.ids.append(v)
        h.framings[v] = eps
        h.framings[u1] += eps
        h.framings[u2] += eps
        # -eps * 1 * s2 must reproduce s
        h.edges += [(u1, v, 1), (v, u2, -eps * s)]
        return h
    if move == "blowdown-leaf":
        u, eps = site
        if eps not in (1, -1) or u not in g.framings:
            raise MovePatternError("leaf blow-up needs a vertex and eps = +-1")
        v = _fresh(g)
        h.ids.append(v)
        h.framings[v] = eps
        h.framings[u] += eps
        h.edges.append((u, v, 1))
        return h
    u, moved, a2 = site
    if u not in g.framings:
        raise MovePatternError(f"no vertex {u!r}")
    moved = list(moved)
    nbrs = {w for w, _, _ in g.neighbours(u)}
    if any(w not in nbrs for w in moved):
        raise MovePatternError("moved neighbours must be adjacent to the split vertex")
    v = _fresh(g)
    h.ids.append(v)
    h.framings[v] = 0
    w2 = _fresh(h)
    h.ids.append(w2)
    h.framings[w2] = a2
    h.framings[u] = g.framings[u] - a2
    new_edges = []
    for a, b, s in g.edges:
        if a == u and b in moved:
            new_edges.append((w2, b, -s))
        elif b == u and a in moved:
            new_edges.append((a, w2, -s))
        else:
            new_edges.append((a, b, s))
    # with s1 = s2 = +1 the down move multiplies w2's edges by -1
    new_edges += [(u, v, 1), (v, w2, 1)]
    h.edges = new_edges
    return h


def random_tree(rng: random.Random, max_vertices: int = 5, framing_range=(-6, -1),
                min_vertices: int = 1) -> PlumbingGraph:
    """Random tree with framings in ``framing_range`` and all edges +."""
    n = rng.randint(min_vertices, max_vertices)
    ids = [f"v{i}" for i in range(n)]
    framings = {v: rng.randint(*framing_range) for v in ids}
    edges = [(ids[rng.randrange(i)], ids[i], 1) for i in range(1, n)]
    return PlumbingGraph(ids, framings, edges)


def random_wnd_tree(rng: random.Random, max_vertices: int = 5, attempts: int = 1000,
                    max_det: Optional[int] = None, framing_range=(-6, -1),
                    min_vertices: int = 1) -> PlumbingGraph:
    """Random weakly negative definite tree, optionally with |det B| <= max_det."""
    for _ in range(attempts):
        g = random_tree(rng, max_vertices, framing_range, min_vertices)
        lm = linking_matrix(g)
        if lm.det == 0 or (max_det is not None and abs(lm.det) > max_det):
            continue
        if is_weakly_negative_definite(lm, g.degrees()):
            return g
    raise RuntimeError("could not draw a weakly negative definite tree")


def graphs_isomorphic(g: PlumbingGraph, h: PlumbingGraph) -> bool:
    """Same framed, signed multigraph up to renaming vertices (brute force, small graphs)."""
    if g.n != h.n or len(g.edges) != len(h.edges):
        return False
    if sorted(g.framings.values()) != sorted(h.framings.values()):
        return False

    def edge_bag(gr, name):
        bag = {}
        for a, b, sg in gr.edges:
            key = (frozenset((name[a], name[b])), sg)
            bag[key] = bag.get(key, 0) + 1
        return bag

    target = edge_bag(h, {v: v for v in h.ids})
    for perm in itertools.permutations(h.ids):
        name = dict(zip(g.ids, perm))
        if any(g.framings[v] != h.framings[name[v]] for v in g.ids):
            continue
        if edge_bag(g, name) == target:
            return True
    return False


def negative_continued_fraction(p: int, q: int) -> List[int]:
    """[k1, k2, ...] with p/q = k1 - 1/(k2 - 1/(...)), each k_i >= 2 when p > q > 0."""
    if q <= 0 or p <= 0:
        raise ValueError("need p, q > 0")
    out = []
    while q:
        k = -((-p) // q)   # ceil
        out.append(k)
        p, q = q, k * q - p
    return out


def seifert_graph(a0: int, fibers: Sequence) -> PlumbingGraph:
    """Star plumbing for M(a0; a1/b1, ...).  Leg j is the chain -[k...] of b_j/a_j."""
    fibs = []
    for f in fibers:
        f = Fraction(f)
        k = f.numerator // f.denominator
        a0 += k
        f -= k
        if f:
            fibs.append(f)
    ids = ["c"]
    framings = {"c": int(a0)}
    edges = []
    for j, f in enumerate(fibs, start=1):
        prev = "c"
        for k, kk in enumerate(negative_continued_fraction(f.denominator, f.numerator), start=1):
            v = f"l{j}_{k}"
            ids.append(v)
            framings[v] = -kk
            edges.append((prev, v, 1))
            prev = v
    return PlumbingGraph(ids, framings, edges)


def seifert_euler(a0: int, fibers: Sequence) -> Fraction:
    return Fraction(a0) + sum((Fraction(f) for f in fibers), Fraction(0))


def brieskorn_data(p1: int, p2: int, p3: int) -> Tuple[int, List[Fraction]]:
    """(a0, [a_j/p_j]) with a0 + sum a_j/p_j = -1/(p1 p2 p3)."""
    ps = (p1, p2, p3)
    if any(gcd(a, b) != 1 for a, b in ((p1, p2), (p1, p3), (p2, p3))):
        raise ValueError(f"{ps} are not pairwise coprime")
    if min(ps) < 2:
        raise ValueError("Brieskorn exponents must be >= 2")
    P = p1 * p2 * p3
    fibs = []
    total = 0
    for p in ps:
        c = P // p
        a = (-pow(c, -1, p)) % p
        fibs.append(Fraction(a, p))
        total += a * c
    a0 = (-1 - total) // P
    assert a0 * P + total == -1
    return a0, fibs


def brieskorn_graph(p1: int, p2: int, p3: int) -> PlumbingGraph:
    a0, fibs = brieskorn_data(p1, p2, p3)
    return seifert_graph(a0, fibs)


def twist_knot_zero_surgery_graph(p: int) -> PlumbingGraph:
    """-1 ==(+,-)== 0 --(+)-- p."""
    return PlumbingGraph(["u", "z", "p"], {"u": -1, "z": 0, "p": p},
                         [("u", "z", 1), ("u", "z", -1), ("z", "p", 1)])


def double_twist_zero_surgery_graph(m: int, n: int) -> PlumbingGraph:
    """m --(+)-- 0 ==(+,-)== 0 --(+)-- n."""
    return PlumbingGraph(["m", "z1", "z2", "n"], {"m": m, "z1": 0, "z2": 0, "n": n},
                         [("m", "z1", 1), ("z1", "z2", 1), ("z1", "z2", -1), ("z2", "n", 1)])


def torus_knot_data(s: int, t: int) -> Tuple[List[int], List[int]]:
    """Legs -t/t' and -s/s' of the complement graph, st' = -1 mod t, ts' = -1 mod s."""
    if gcd(s, t) != 1 or not 2 <= s < t:
        raise ValueError("need coprime 2 <= s < t")
    tp = (-pow(s, -1, t)) % t
    sp = (-pow(t, -1, s)) % s
    return negative_continued_fraction(t, tp), negative_continued_fraction(s, sp)


def torus_knot_complement_graph(s: int, t: int) -> PlumbingGraph:
    """-st vertex on a -1 centre with legs -t/t' and -s/s'; the -st vertex is ``k``."""
    leg_t, leg_s = torus_knot_data(s, t)
    ids = ["k", "c"]
    framings = {"k": -s * t, "c": -1}
    edges = [("k", "c", 1)]
    for name, leg in (("t", leg_t), ("s", leg_s)):
        prev = "c"
        for i, kk in enumerate(leg, start=1):
            v = f"{name}{i}"
            ids.append(v)
            framings[v] = -kk
            edges.append((prev, v, 1))
            prev = v
    return PlumbingGraph(ids, framings, edges)
