"""The ten acceptance criteria, one test each.

Every test prints a single ``PASS``/``FAIL`` line and records it for the
terminal summary, so ``pytest -v`` shows the verdicts in one block.
"""
import json
import time
from fractions import Fraction

import pytest

from conftest import ACCEPTANCE
from zhatfk import fk, zhat
from zhatfk.cli import FIXTURES, run_fixture
from zhatfk.falsetheta import zhat_brieskorn, zhat_twist_knot
from zhatfk.lie import su
from zhatfk.plumbing import brieskorn_graph, load_graph, twist_knot_zero_surgery_graph
from zhatfk.qlaurent import equal_cong, parse_series


def fixture(name):
    return json.loads((FIXTURES / f"{name}.json").read_text())


def report(key, fails, t0, limit=None, detail=""):
    secs = time.perf_counter() - t0
    if limit is not None and secs > limit:
        fails = list(fails) + [f"took {secs:.1f} s, target {limit} s"]
    ok = not fails
    msg = detail if ok else "; ".join(fails)
    ACCEPTANCE[key] = (ok, msg, secs)
    print(f"{'PASS' if ok else 'FAIL'} criterion {key}: {msg}")
    assert ok, msg


def test_criterion_01_five_two_zero_surgery():
    t0 = time.perf_counter()
    fails = []
    slowest = 0.0
    for grp in ("A1", "A2", "A3"):
        t1 = time.perf_counter()
        fx = fixture(f"twist_5_2_zero_surgery_{grp}")
        g = load_graph((FIXTURES / fx["graph"]).read_text())
        rs = su(int(grp[1:]) + 1)
        # raw mode: the printed 1/|W| must come out exactly, so compare the
        # scaled printed series with sign and q-shift only
        got = zhat.compute_zhat(g, rs, 0, 20).series
        want = parse_series(fx["rows"][0]["series"]) * Fraction(fx["scale"])
        if len(want) < 12:
            fails.append(f"{grp}: only {len(want)} printed terms")
        if not equal_cong(got, want).equal:
            fails.append(f"{grp}: series differs")
        slowest = max(slowest, time.perf_counter() - t1)
    if slowest > 60:
        fails.append(f"slowest group took {slowest:.1f} s")
    report(1, fails, t0, detail=f"SU(2), SU(3), SU(4) with 1/|W|, slowest {slowest:.1f} s")


def test_criterion_02_twist_knot_oracle():
    t0 = time.perf_counter()
    fails = []
    for n in (2, 3):
        rs = su(n)
        for p in (1, 2, 3):
            eng = zhat.compute_zhat(twist_knot_zero_surgery_graph(p), rs, 0, 25).series
            ora = zhat_twist_knot(rs, p, 25)
            r = equal_cong(eng, ora)
            if not r.equal or r.horizon < 25:
                fails.append(f"SU({n}) p={p}: {r}")
    report(2, fails, t0, limit=120, detail="p = 1, 2, 3 on A1 and A2 to q^25")


def test_criterion_03_brieskorn():
    t0 = time.perf_counter()
    fails = run_fixture(fixture("seifert_2_3_7_A1"))
    row = fixture("trefoil_surgery_A2")["rows"][0]["series"]
    want = parse_series(row)
    eng = zhat.compute_zhat(brieskorn_graph(2, 3, 7), su(3), 0, want.max_exp() + 2).series
    if len(want) != 11 or not equal_cong(eng, want).equal:
        fails.append("SU(3) Sigma(2,3,7) row differs")
    for ps in ((2, 3, 5), (2, 3, 7)):
        for n in (2, 3):
            rs = su(n)
            eng = zhat.compute_zhat(brieskorn_graph(*ps), rs, 0, 30).series
            cf = zhat_brieskorn(rs, *ps, max_order=30)
            r = equal_cong(eng, cf)
            if not r.equal or r.horizon < 30:
                fails.append(f"closed form {ps} SU({n}): {r}")
    report(3, fails, t0, limit=120, detail="Sigma(2,3,7) rows and closed form to q^30")


def test_criterion_04_seifert_labels():
    t0 = time.perf_counter()
    fails = []
    for grp in ("A1", "A2", "A3"):
        fails += [f"{grp}: {m}" for m in run_fixture(fixture(f"seifert_3_5_7_{grp}"))]
    a3 = fixture("seifert_3_5_7_A3")
    n_rows = len(a3["rows"])
    report(4, fails, t0, limit=600,
           detail=f"SU(2), SU(3) blocks; SU(4) {n_rows} printed series and {len(a3['refinement_pairs'])} refined pairs")


def test_criterion_05_torus_knot_monomials():
    t0 = time.perf_counter()
    fails = run_fixture(fixture("trefoil_fk_A2"))
    rs = su(3)
    f = fk.fk_torus_knot(rs, 2, 3, 30)
    shifts = set()
    for b, ser in f.coeffs.items():
        if len(ser) != 1:
            fails.append(f"f_{b} has {len(ser)} terms")
            continue
        shifts.add(ser.min_exp() - rs.norm2(b) / 12)
    if len(shifts) > 1:
        fails.append(f"degree offsets {sorted(shifts)}")
    n12 = len(fixture("trefoil_fk_A2")["monomials"])
    report(5, fails, t0, detail=f"{n12} printed monomials, {len(f.coeffs)} computed, one global offset")


def test_criterion_06_surgery():
    t0 = time.perf_counter()
    fails = run_fixture(fixture("trefoil_surgery_A2"))
    rs = su(3)
    for r in (1, 2):
        f = fk.fk_torus_knot(rs, 2, 3, fk.required_norm_bound(rs, 6, r, 25))
        got = fk.surgery_minus_one_over_r(f, r, 25)
        eng = zhat.compute_zhat(brieskorn_graph(2, 3, 6 * r + 1), rs, 0, 25).series
        res = equal_cong(got, eng)
        if not res.equal or res.horizon < 25:
            fails.append(f"r={r} vs engine: {res}")
    report(6, fails, t0, limit=300, detail="table rows r = 1..5, engine r = 1, 2 to q^25")


def test_criterion_07_symmetric_specialization():
    t0 = time.perf_counter()
    fails = []
    for n in (2, 3, 4):
        fails += [f"SU({n}): {m}" for m in run_fixture(fixture(f"trefoil_symmetric_SU{n}"))]
    report(7, fails, t0, detail="SU(2), SU(3), SU(4) displays with the 1/2 factor")


@pytest.mark.parametrize("N", [2, 3, 4])
def test_criterion_08_recurrence(N):
    t0 = time.perf_counter()
    rs = su(N)
    q_order = 15
    # the operator reaches 7 x-steps below the row; the q-slack covers the
    # growth of q-shifts across the window
    x_order = 11 if N == 4 else 10
    slack = {2: 6, 3: 6, 4: 7}[N]
    nb = fk.norm_bound_for_symmetric(rs, 6, q_order + slack)
    f = fk.fk_torus_knot(rs, 2, 3, nb)
    xq = fk.reduce_and_specialize_symmetric(f, N, x_order, q_order + slack)
    rep = fk.recurrence_check(fk.build_trefoil_ahat(N), xq, q_order=q_order, x_window=(-3, 3))
    fails = []
    if not rep.passed:
        fails.append(f"{len(rep.nonzero())} nonzero residuals")
    cells = len(rep.residuals)
    prev = ACCEPTANCE.get(8)
    fails_all = fails + ([] if prev is None or prev[0] else [prev[1]])
    secs = time.perf_counter() - t0
    if secs > 60:
        fails.append(f"N={N} took {secs:.1f} s")
    ok = not fails
    line = f"N={N}: {rep.rows} rows, {cells} cells zero, {secs:.1f} s"
    # aggregate the three N into one criterion line
    if prev is None:
        ACCEPTANCE[8] = (ok, line if ok else "; ".join(fails), secs)
    else:
        ACCEPTANCE[8] = (prev[0] and ok, prev[1] + "; " + (line if ok else "; ".join(fails)), prev[2] + secs)
    print(f"{'PASS' if ok else 'FAIL'} criterion 8 ({line})")
    assert ok, fails_all


def test_criterion_09_neumann_suite():
    t0 = time.perf_counter()
    fails = []
    total = 0
    for n in (2, 3):
        res = zhat.neumann_suite(su(n), seed=7, trials=20, max_order=15)
        total += len(res)
        bad = [t for t in res if not t.ok]
        if bad:
            fails.append(f"SU({n}): {len(bad)} of {len(res)} trials failed")
        idle = [t for t in res if t.note]
        if idle:
            fails.append(f"SU({n}): {len(idle)} trials found no admissible blow-up")
    report(9, fails, t0, limit=600, detail=f"{total} trials, 3 moves x 20 trees x 2 groups")


def test_criterion_10_classical_limit():
    t0 = time.perf_counter()
    fails = []
    for n in (2, 3):
        rs = su(n)
        f = fk.fk_torus_knot(rs, 2, 3, 24)
        ok, sign, bad = fk.classical_limit_check(f, max_height=8)
        if not ok:
            fails.append(f"SU({n}): {len(bad)} mismatches, first {bad[0]}")
    report(10, fails, t0, detail="A1 and A2 to x-order 8")
