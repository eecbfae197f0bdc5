"""Integer hot loops, with a numba path and a pure-numpy path.

The numba kernels are used when numba imports and ``ZHATFK_NUMBA`` is not
set to ``0``.  Both paths operate on ``int64`` arrays and must produce
identical results; ``tests/test_kernels.py`` runs them side by side.
"""
from __future__ import annotations

import os

import numpy as np

INT64_SAFE = 2**62

try:  # pragma: no cover - import guard
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f


def _env_backend() -> str:
    flag = os.environ.get("ZHATFK_NUMBA", "1").strip().lower()
    if flag in ("0", "false", "no", "off") or not HAVE_NUMBA:
        return "numpy"
    return "numba"


BACKEND = _env_backend()


def set_backend(name: str) -> None:
    """Select ``"numba"`` or ``"numpy"`` for subsequent kernel calls."""
    global BACKEND
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not installed")
    BACKEND = name


# ---------------------------------------------------------------------------
# Kostant partition table: coefficients of prod_alpha (1 - y^alpha)^(-mult)
# ---------------------------------------------------------------------------

@njit(cache=True)
def _kostant_table_nb(roots, mult, shape):
    r = shape.shape[0]
    size = 1
    for k in range(r):
        size *= shape[k]
    strides = np.empty(r, np.int64)
    s = 1
    for k in range(r - 1, -1, -1):
        strides[k] = s
        s *= shape[k]
    table = np.zeros(size, np.int64)
    table[0] = 1
    coords = np.empty(r, np.int64)
    for a in range(roots.shape[0]):
        off = 0
        for k in range(r):
            off += roots[a, k] * strides[k]
        for _ in range(mult):
            for idx in range(size):
                rem = idx
                ok = True
                for k in range(r):
                    coords[k] = rem // strides[k]
                    rem -= coords[k] * strides[k]
                    if coords[k] < roots[a, k]:
                        ok = False
                if ok:
                    table[idx] += table[idx - off]
    return table


def _kostant_table_np(roots, mult, shape):
    shape = tuple(int(x) for x in shape)
    table = np.zeros(shape, np.int64)
    table[(0,) * len(shape)] = 1
    for a in roots:
        for _ in range(mult):
            acc = table.copy()
            m = 1
            while all(m * int(x) < n for x, n in zip(a, shape)):
                dst = tuple(slice(m * int(x), None) for x in a)
                src = tuple(slice(0, n - m * int(x)) for x, n in zip(a, shape))
                acc[dst] += table[src]
                m += 1
            table = acc
    return table


def kostant_table(roots: np.ndarray, mult: int, shape: tuple) -> np.ndarray:
    roots = np.ascontiguousarray(roots, dtype=np.int64)
    if BACKEND == "numba":
        flat = _kostant_table_nb(roots, int(mult), np.array(shape, dtype=np.int64))
        table = flat.reshape(shape)
    else:
        table = _kostant_table_np(roots, int(mult), shape)
    if table.size and np.abs(table).max() >= INT64_SAFE:
        raise OverflowError("Kostant table exceeds int64 range")
    return table


# ---------------------------------------------------------------------------
# Chamber-averaged coefficients on a grid of weights
#   coef(m) = sum_w sign_w * K[c_w - W_w m]   (zero outside the table box)
# ---------------------------------------------------------------------------

@njit(cache=True)
def _weyl_grid_nb(points, wmats, consts, signs, table_flat, shape):
    n = points.shape[0]
    r = points.shape[1]
    nw = wmats.shape[0]
    strides = np.empty(r, np.int64)
    s = 1
    for k in range(r - 1, -1, -1):
        strides[k] = s
        s *= shape[k]
    out = np.zeros(n, np.int64)
    for p in range(n):
        acc = 0
        for w in range(nw):
            idx = 0
            inside = True
            for i in range(r):
                g = consts[w, i]
                for j in range(r):
                    g -= wmats[w, i, j] * points[p, j]
                if g < 0 or g >= shape[i]:
                    inside = False
                    break
                idx += g * strides[i]
            if inside:
                acc += signs[w] * table_flat[idx]
        out[p] = acc
    return out


def _weyl_grid_np(points, wmats, consts, signs, table):
    shape = np.array(table.shape)
    out = np.zeros(points.shape[0], np.int64)
    for w in range(wmats.shape[0]):
        g = consts[w][None, :] - points @ wmats[w].T
        inside = np.all((g >= 0) & (g < shape[None, :]), axis=1)
        if not inside.any():
            continue
        vals = table[tuple(g[inside].T)]
        out[inside] += signs[w] * vals
    return out


def weyl_grid(points, wmats, consts, signs, table) -> np.ndarray:
    points = np.ascontiguousarray(points, dtype=np.int64)
    wmats = np.ascontiguousarray(wmats, dtype=np.int64)
    consts = np.ascontiguousarray(consts, dtype=np.int64)
    signs = np.ascontiguousarray(signs, dtype=np.int64)
    if points.shape[0] == 0:
        return np.zeros(0, np.int64)
    if BACKEND == "numba":
        return _weyl_grid_nb(points, wmats, consts, signs, np.ascontiguousarray(table).ravel(),
                             np.array(table.shape, dtype=np.int64))
    return _weyl_grid_np(points, wmats, consts, signs, table)


# ---------------------------------------------------------------------------
# Lattice-support accumulation
#   E(l, p) = hq[p] + hm[p] . lg[l] + lc[l]        (scaled integer exponent)
#   class(l, p) = sum_i ((hres[p, i] + lres[l, i]) mod moduli[i]) * radix[i]
# Emit (E, hcoef[p] * lcoef[l], class) for every pair with E < bound and,
# if target >= 0, class == target.
# ---------------------------------------------------------------------------

@njit(cache=True)
def _support_count_nb(hq, hm, hres, lg, lc, lres, moduli, radix, target, bound):
    nh = hq.shape[0]
    nl = lc.shape[0]
    d = hm.shape[1]
    s = moduli.shape[0]
    count = 0
    for l in range(nl):
        for p in range(nh):
            e = hq[p] + lc[l]
            for j in range(d):
                e += hm[p, j] * lg[l, j]
            if e >= bound:
                continue
            if target >= 0:
                cls = 0
                for i in range(s):
                    cls += ((hres[p, i] + lres[l, i]) % moduli[i]) * radix[i]
                if cls != target:
                    continue
            count += 1
    return count


@njit(cache=True)
def _support_fill_nb(hq, hm, hcoef, hres, lg, lc, lcoef, lres, moduli, radix, target, bound, count):
    nh = hq.shape[0]
    nl = lc.shape[0]
    d = hm.shape[1]
    s = moduli.shape[0]
    exps = np.empty(count, np.int64)
    coefs = np.empty(count, np.int64)
    classes = np.empty(count, np.int64)
    k = 0
    for l in range(nl):
        for p in range(nh):
            e = hq[p] + lc[l]
            for j in range(d):
                e += hm[p, j] * lg[l, j]
            if e >= bound:
                continue
            cls = 0
            for i in range(s):
                cls += ((hres[p, i] + lres[l, i]) % moduli[i]) * radix[i]
            if target >= 0 and cls != target:
                continue
            exps[k] = e
            coefs[k] = hcoef[p] * lcoef[l]
            classes[k] = cls
            k += 1
    return exps, coefs, classes


def _support_np(hq, hm, hcoef, hres, lg, lc, lcoef, lres, moduli, radix, target, bound):
    out_e, out_c, out_k = [], [], []
    for l in range(lc.shape[0]):
        e = hq + hm @ lg[l] + lc[l]
        mask = e < bound
        if not mask.any():
            continue
        cls = ((hres[mask] + lres[l][None, :]) % moduli[None, :]) @ radix
        e = e[mask]
        c = hcoef[mask] * lcoef[l]
        if target >= 0:
            sel = cls == target
            e, c, cls = e[sel], c[sel], cls[sel]
        out_e.append(e)
        out_c.append(c)
        out_k.append(cls)
    if not out_e:
        z = np.zeros(0, np.int64)
        return z, z.copy(), z.copy()
    return np.concatenate(out_e), np.concatenate(out_c), np.concatenate(out_k)


def accumulate_support(hq, hm, hcoef, hres, lg, lc, lcoef, lres, moduli, radix, target, bound):
    """Return (exponents, coefficients, classes) for all (L, H) pairs below ``bound``."""
    args = [np.ascontiguousarray(a, dtype=np.int64) for a in (hq, hm, hcoef, hres, lg, lc, lcoef, lres, moduli, radix)]
    hq, hm, hcoef, hres, lg, lc, lcoef, lres, moduli, radix = args
    target = int(target)
    bound = int(bound)
    if hq.shape[0] == 0 or lc.shape[0] == 0:
        z = np.zeros(0, np.int64)
        return z, z.copy(), z.copy()
    if BACKEND == "numba":
        n = _support_count_nb(hq, hm, hres, lg, lc, lres, moduli, radix, target, bound)
        return _support_fill_nb(hq, hm, hcoef, hres, lg, lc, lcoef, lres, moduli, radix, target, bound, n)
    return _support_np(hq, hm, hcoef, hres, lg, lc, lcoef, lres, moduli, radix, target, bound)


def collect_terms(exps: np.ndarray, coefs: np.ndarray, classes: np.ndarray):
    """Sum coefficients over equal (class, exponent) keys; drop zeros."""
    if exps.size == 0:
        return {}
    order = np.lexsort((exps, classes))
    e = exps[order]
    c = coefs[order]
    k = classes[order]
    brk = np.ones(e.size, bool)
    brk[1:] = (e[1:] != e[:-1]) | (k[1:] != k[:-1])
    starts = np.flatnonzero(brk)
    sums = np.add.reduceat(c, starts)
    out: dict = {}
    for s, tot in zip(starts, sums):
        if tot:
            out.setdefault(int(k[s]), {})[int(e[s])] = int(tot)
    return out
