"""Time the numba and numpy kernel backends on the same inputs.

Run with ``python3 benchmarks/bench_kernels.py``.  Each kernel is timed on
random but seeded data, then one end-to-end engine computation is timed per
backend.  Outputs are compared so a speedup never hides a wrong answer.
"""
import argparse
import time
from fractions import Fraction

import numpy as np

from zhatfk import _kernels
from zhatfk.lie import su
from zhatfk.plumbing import brieskorn_graph
from zhatfk.zhat import compute_zhat


def best_of(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def kostant_case():
    roots = np.array([[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 0], [0, 1, 1], [1, 1, 1]])
    return lambda: _kernels.kostant_table(roots, 3, (24, 24, 24))


def weyl_case(rng):
    rs = su(3)
    from zhatfk.lie import weyl_root_matrices
    W = weyl_root_matrices(rs)
    roots = np.array([[1, 0], [0, 1], [1, 1]])
    table = _kernels.kostant_table(roots, 2, (200, 200))
    pts = rng.integers(-90, 0, size=(200_000, 2))
    consts = np.full((W.shape[0], 2), 100)
    signs = np.array([w.sign for w in rs.weyl])
    return lambda: _kernels.weyl_grid(pts, -W, consts, signs, table)


def support_case(rng):
    nh, nl, d, s = 4000, 400, 3, 2
    hq = rng.integers(0, 50, nh)
    hm = rng.integers(-3, 4, (nh, d))
    hcoef = rng.integers(-2, 3, nh)
    hres = rng.integers(0, 7, (nh, s))
    lg = rng.integers(-5, 6, (nl, d))
    lc = rng.integers(0, 40, nl)
    lcoef = rng.integers(-2, 3, nl)
    lres = rng.integers(0, 7, (nl, s))
    moduli = np.array([7, 7])
    radix = np.array([1, 7])
    return lambda: _kernels.collect_terms(*_kernels.accumulate_support(
        hq, hm, hcoef, hres, lg, lc, lcoef, lres, moduli, radix, -1, 80))


def engine_case():
    g = brieskorn_graph(2, 3, 7)
    rs = su(3)
    return lambda: compute_zhat(g, rs, 0, Fraction(20)).series


def same(a, b):
    if isinstance(a, np.ndarray):
        return np.array_equal(a, b)
    return a == b


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    backends = ["numpy"] + (["numba"] if _kernels.HAVE_NUMBA else [])
    cases = {
        "kostant_table A3 mult 3": lambda rng: kostant_case(),
        "weyl_grid A2 200k points": weyl_case,
        "accumulate_support 1.6M pairs": support_case,
        "engine Sigma(2,3,7) SU(3) h=20": lambda rng: engine_case(),
    }
    print(f"{'case':34s} " + " ".join(f"{b:>10s}" for b in backends) + "   speedup  agree")
    for name, make in cases.items():
        times, outs = [], []
        for b in backends:
            _kernels.set_backend(b)
            fn = make(np.random.default_rng(0))
            fn()  # warm up (numba compiles on first call)
            t, out = best_of(fn, args.repeat)
            times.append(t)
            outs.append(out)
        speed = times[0] / times[-1] if len(times) > 1 else 1.0
        agree = all(same(outs[0], o) for o in outs[1:])
        print(f"{name:34s} " + " ".join(f"{t:9.4f}s" for t in times) + f"   {speed:6.1f}x  {agree}")
    _kernels.set_backend(_kernels._env_backend())


if __name__ == "__main__":
    main()
