"""The numba and numpy backends must agree bit for bit."""
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from zhatfk import _kernels
from zhatfk.lie import su
from zhatfk.plumbing import brieskorn_graph, seifert_graph
from zhatfk.zhat import compute_zhat, zhat_all_labels

needs_numba = pytest.mark.skipif(not _kernels.HAVE_NUMBA, reason="numba not installed")


def both(fn):
    out = {}
    prev = _kernels.BACKEND
    try:
        for b in ("numpy", "numba"):
            _kernels.set_backend(b)
            out[b] = fn()
    finally:
        _kernels.set_backend(prev)
    return out["numpy"], out["numba"]


def test_env_flag(monkeypatch):
    monkeypatch.setenv("ZHATFK_NUMBA", "0")
    assert _kernels._env_backend() == "numpy"
    with pytest.raises(ValueError):
        _kernels.set_backend("cuda")


@needs_numba
@settings(max_examples=25)
@given(st.integers(1, 3), st.integers(1, 3), st.integers(0, 2 ** 32 - 1))
def test_kostant_table(rank, mult, seed):
    rng = np.random.default_rng(seed)
    roots = np.vstack([np.eye(rank, dtype=np.int64), rng.integers(0, 2, (2, rank))])
    roots = roots[roots.sum(axis=1) > 0]
    shape = tuple(int(x) for x in rng.integers(2, 9, rank))
    a, b = both(lambda: _kernels.kostant_table(roots, mult, shape))
    assert np.array_equal(a, b)


@needs_numba
@settings(max_examples=25)
@given(st.integers(0, 2 ** 32 - 1))
def test_weyl_grid(seed):
    rng = np.random.default_rng(seed)
    rs = su(3)
    from zhatfk.lie import weyl_root_matrices
    W = weyl_root_matrices(rs)
    table = _kernels.kostant_table(np.array([[1, 0], [0, 1], [1, 1]]), 2, (30, 30))
    pts = rng.integers(-20, 5, (500, 2))
    consts = rng.integers(0, 20, (len(W), 2))
    signs = np.array([w.sign for w in rs.weyl])
    a, b = both(lambda: _kernels.weyl_grid(pts, -W, consts, signs, table))
    assert np.array_equal(a, b)


@needs_numba
@settings(max_examples=25)
@given(st.integers(0, 2 ** 32 - 1), st.integers(-1, 20))
def test_support_accumulation(seed, target):
    rng = np.random.default_rng(seed)
    nh, nl, d = 60, 30, 2
    args = (rng.integers(0, 20, nh), rng.integers(-3, 4, (nh, d)), rng.integers(-2, 3, nh),
            rng.integers(0, 5, (nh, 2)), rng.integers(-4, 5, (nl, d)), rng.integers(0, 20, nl),
            rng.integers(-2, 3, nl), rng.integers(0, 5, (nl, 2)), np.array([5, 5]), np.array([1, 5]))
    a, b = both(lambda: _kernels.collect_terms(*_kernels.accumulate_support(*args, target, 30)))
    assert a == b


@needs_numba
def test_engine_identical_across_backends():
    a, b = both(lambda: compute_zhat(brieskorn_graph(2, 3, 7), su(3), 0, 15).series)
    assert a == b
    g = seifert_graph(-1, [Fraction(1, 3), Fraction(1, 5), Fraction(3, 7)])
    a, b = both(lambda: {k: r.series for k, r in zhat_all_labels(g, su(3), 10).items()})
    assert a == b
