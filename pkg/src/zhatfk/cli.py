"""Command line front end.

Exit codes: 0 ok, 2 parse error, 3 failed precondition, 4 budget or depth
exhausted, 5 regression mismatch (also a nonzero recurrence residual).
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import List, Optional

from . import falsetheta, fk as fkmod, plumbing, zhat
from .lie import RootSystem, parse_group, su
from .qlaurent import QSeries, equal_cong, normalize_cong, parse_series

SCHEMA = 1
EXIT_OK, EXIT_PARSE, EXIT_PRECONDITION, EXIT_BUDGET, EXIT_MISMATCH = 0, 2, 3, 4, 5

FIXTURES = Path(__file__).resolve().parent / "fixtures" / "paper"


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


# -- shared options ---------------------------------------------------------------

def _group(args) -> RootSystem:
    if args.su is not None and args.group is not None:
        raise CliError("give either --su or --group, not both", EXIT_PARSE)
    try:
        if args.su is not None:
            if args.su < 2:
                raise ValueError("--su needs N >= 2")
            return su(args.su)
        return parse_group(args.group or "A1")
    except ValueError as e:
        raise CliError(str(e), EXIT_PARSE) from None


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"{text!r} is not a rational number") from None


def _budget() -> zhat.Budget:
    b = zhat.Budget.from_env()
    if b.max_pairs <= 0 or b.max_rounds <= 0:
        raise CliError("budgets must be positive", EXIT_PARSE)
    return b


def _add_common(p: argparse.ArgumentParser, order_default="20"):
    p.add_argument("--su", type=int, help="SU(N), same as --group A{N-1}")
    p.add_argument("--group", help="Cartan type and rank, e.g. A2, B2, G2")
    p.add_argument("--max-order", type=_rational, default=Fraction(order_default),
                   help="q-depth above the leading exponent")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--normalize", choices=("raw", "cong"), default="raw",
                   help="cong divides out sign and the leading q-power")


def _render(series: QSeries, normalize: str):
    """(text, json-record) for one series under the chosen normalization."""
    if normalize == "cong":
        n, shift, sign = normalize_cong(series)
        if not n.terms:
            return "0", {"series": QSeries({}, series.trunc).to_json(), "shift": None, "sign": 0}
        return n.render(), {"series": n.to_json(), "shift": [shift.numerator, shift.denominator], "sign": sign}
    return series.render(), {"series": series.to_json()}


def _emit(args, command: str, group: RootSystem, rows: List[dict], out=None):
    """rows: dicts with 'title' (text label) and 'series' (QSeries) plus extra json fields."""
    out = out or sys.stdout
    if args.format == "json":
        recs = []
        for r in rows:
            _, rec = _render(r["series"], args.normalize)
            rec.update({k: v for k, v in r.items() if k not in ("series", "title")})
            recs.append(rec)
        json.dump({"schema": SCHEMA, "command": command, "group": group.name, "results": recs},
                  out, sort_keys=True)
        out.write("\n")
        return
    for r in rows:
        text, _ = _render(r["series"], args.normalize)
        out.write(f"{r['title']}: {text}\n" if r.get("title") else text + "\n")


# -- subcommands -------------------------------------------------------------------

def _parse_label(text: Optional[str]):
    if text is None:
        return 0
    if text in ("all", "folded"):
        return text
    try:
        return int(text)
    except ValueError:
        pass
    # raw per-vertex weights: "1,1;0,0;..." in fundamental coordinates
    try:
        return tuple(tuple(int(x) for x in part.split(",")) for part in text.split(";"))
    except ValueError:
        raise CliError(f"bad --label {text!r}: use an index, all, folded or v1;v2;...", EXIT_PARSE) from None


def _zhat_rows(g, rs, label, max_order, orbit_sum=False):
    budget = _budget()
    if label in ("all", "folded"):
        res = zhat.zhat_all_labels(g, rs, max_order, fold=(label == "folded"), budget=budget,
                                   orbit_sum=orbit_sum)
        rows = []
        for idx, r in sorted(res.items()):
            rows.append({"title": f"b[{idx}]", "series": r.series, "label": idx,
                         "orbit_size": r.info["orbit_size"], "stabilized": r.stabilized})
        return rows
    r = zhat.compute_zhat(g, rs, label, max_order, budget=budget)
    return [{"title": f"b[{r.label.index}]", "series": r.series, "label": r.label.index,
             "stabilized": r.stabilized}]


def cmd_zhat(args) -> int:
    rs = _group(args)
    try:
        text = Path(args.graph).read_text()
    except OSError as e:
        raise CliError(f"cannot read {args.graph}: {e}", EXIT_PARSE) from None
    g = plumbing.load_graph(text)
    rows = _zhat_rows(g, rs, _parse_label(args.label), args.max_order, args.orbit_sum)
    _emit(args, "zhat", rs, rows)
    return EXIT_OK


def cmd_chi(args) -> int:
    rs = _group(args)
    if args.beta == "rho":
        beta = rs.rho
    else:
        try:
            beta = tuple(int(x) for x in args.beta.split(","))
        except ValueError:
            raise CliError(f"bad --beta {args.beta!r}", EXIT_PARSE) from None
        if len(beta) != rs.rank:
            raise CliError(f"--beta needs {rs.rank} coordinates", EXIT_PARSE)
    try:
        spec = falsetheta.ChiSpec(args.p, beta, rs)
    except ValueError as e:
        raise CliError(str(e), EXIT_PRECONDITION) from None
    _emit(args, "chi", rs, [{"series": falsetheta.chi(spec, args.max_order)}])
    return EXIT_OK


def cmd_brieskorn(args) -> int:
    rs = _group(args)
    s = falsetheta.zhat_brieskorn(rs, args.p1, args.p2, args.p3, args.max_order)
    _emit(args, "brieskorn", rs, [{"series": s}])
    return EXIT_OK


def cmd_seifert(args) -> int:
    rs = _group(args)
    fibers = args.fibers
    if len(fibers) != 3:
        raise CliError("seifert needs exactly three fibers", EXIT_PARSE)
    label = _parse_label(args.label)
    if args.engine or label in ("all", "folded"):
        g = plumbing.seifert_graph(args.a0, fibers)
        rows = _zhat_rows(g, rs, label, args.max_order, args.orbit_sum)
    else:
        s = falsetheta.zhat_seifert3(rs, args.a0, fibers, label, args.max_order)
        rows = [{"series": s}]
    _emit(args, "seifert", rs, rows)
    return EXIT_OK


def cmd_fk(args) -> int:
    rs = _group(args)
    f = fkmod.fk_torus_knot(rs, args.s, args.t, args.max_order)
    if args.format == "json":
        json.dump({"schema": SCHEMA, "command": "fk", "group": rs.name, "s": args.s, "t": args.t,
                   "norm_bound": [f.norm_bound.numerator, f.norm_bound.denominator],
                   "coeffs": f.to_json()}, sys.stdout, sort_keys=True)
        sys.stdout.write("\n")
    else:
        for b in f.keys():
            sys.stdout.write(f"{b}: {f.coeffs[b].render()}\n")
    return EXIT_OK


def _fk_for_surgery(rs, s, t, r, max_order):
    nb = fkmod.required_norm_bound(rs, s * t, r, max_order)
    return fkmod.fk_torus_knot(rs, s, t, nb)


def cmd_surgery(args) -> int:
    rs = _group(args)
    if args.r == 0:
        f = fkmod.fk_torus_knot(rs, args.s, args.t, 2)
        s = fkmod.zero_surgery(f)
    else:
        f = _fk_for_surgery(rs, args.s, args.t, args.r, args.max_order)
        s = fkmod.surgery_minus_one_over_r(f, args.r, args.max_order)
    _emit(args, "surgery", rs, [{"series": s, "r": args.r}])
    return EXIT_OK


def _fksym(rs, s, t, x_order, q_order):
    N = rs.rank + 1
    nb = fkmod.norm_bound_for_symmetric(rs, s * t, q_order)
    f = fkmod.fk_torus_knot(rs, s, t, nb)
    return fkmod.reduce_and_specialize_symmetric(f, N, x_order, q_order)


def cmd_fksym(args) -> int:
    rs = _group(args)
    xq = _fksym(rs, args.s, args.t, args.xmax, args.max_order)
    if args.format == "json":
        json.dump({"schema": SCHEMA, "command": "fksym", "group": rs.name, "slots": xq.to_json()},
                  sys.stdout, sort_keys=True)
        sys.stdout.write("\n")
    else:
        rows = [{"title": f"x^{k}", "series": xq.slots[k]} for k in sorted(xq.slots)]
        _emit(args, "fksym", rs, rows)
    return EXIT_OK


def cmd_check_recurrence(args) -> int:
    rs = _group(args)
    N = rs.rank + 1
    if (args.s, args.t) != (2, 3):
        raise CliError("only the trefoil operator is built in (s, t = 2, 3)", EXIT_PRECONDITION)
    lo, hi = args.xwin
    # the operator reaches 7 x-steps down, so compute enough slots on both sides
    xq = _fksym(rs, args.s, args.t, max(abs(lo), abs(hi)) + 8, args.qmax + 8)
    op = fkmod.build_trefoil_ahat(N)
    rep = fkmod.recurrence_check(op, xq, q_order=args.qmax, x_window=(lo, hi))
    bad = rep.nonzero()
    if args.format == "json":
        json.dump({"schema": SCHEMA, "command": "check-recurrence", "group": rs.name, "passed": rep.passed,
                   "rows": rep.rows, "window": [[str(n), str(b)] for n, b in rep.window],
                   "nonzero": [[str(n), str(e), str(c)] for (n, e), c in sorted(bad.items())]},
                  sys.stdout, sort_keys=True)
        sys.stdout.write("\n")
    else:
        for n, b in rep.window:
            sys.stdout.write(f"x^{n}: exact below q^{b}\n")
        for (n, e), c in sorted(bad.items()):
            sys.stdout.write(f"residual x^{n} q^{e}: {c}\n")
        sys.stdout.write("PASS\n" if rep.passed else "FAIL\n")
    return EXIT_OK if rep.passed else EXIT_MISMATCH


def cmd_neumann_suite(args) -> int:
    rs = _group(args)
    if args.trials < 1:
        raise CliError("--trials must be at least 1", EXIT_PARSE)
    res = zhat.neumann_suite(rs, args.seed, args.trials, args.max_order, budget=_budget())
    ok = all(t.ok for t in res)
    if args.format == "json":
        json.dump({"schema": SCHEMA, "command": "neumann-suite", "group": rs.name, "passed": ok,
                   "trials": [{"move": t.move, "site": repr(t.site), "labels": t.labels, "matched": t.matched,
                               "round_trip": t.round_trip, "graph": t.before.to_json()} for t in res]},
                  sys.stdout, sort_keys=True)
        sys.stdout.write("\n")
    else:
        for i, t in enumerate(res):
            verdict = "ok" if t.ok else "FAIL"
            sys.stdout.write(f"{i:3d} {t.move:14s} labels={t.labels:3d} {verdict}\n")
        sys.stdout.write(f"{sum(t.ok for t in res)}/{len(res)} passed\n")
    return EXIT_OK if ok else EXIT_MISMATCH


# -- regression against the bundled tables ----------------------------------------------

def match_rows(computed: List[QSeries], expected: List[tuple]):
    """Assign printed rows (series, count) to distinct computed series by ≅.

    A row with count k needs k distinct computed series.  Returns a list of
    index lists (one per row) or None when no assignment exists.
    """
    options = []
    for ser, count in expected:
        options.append([i for i, c in enumerate(computed) if equal_cong(c, ser).equal])
    order = sorted(range(len(expected)), key=lambda k: len(options[k]))
    taken: set = set()
    picks: dict = {}

    def rec(pos):
        if pos == len(order):
            return True
        k = order[pos]
        need = expected[k][1]
        free = [i for i in options[k] if i not in taken]
        from itertools import combinations
        for combo in combinations(free, need):
            taken.update(combo)
            picks[k] = list(combo)
            if rec(pos + 1):
                return True
            taken.difference_update(combo)
        return False

    return [picks[k] for k in range(len(expected))] if rec(0) else None


def _check_pairs(fx, computed, expected, picks) -> List[str]:
    """A coarser decomposition that groups q-powers by integer differences
    merges each listed pair of rows: check that both blocks sit in one
    Z-coset of exponents and that their sum matches the printed sum."""
    fails = []
    for i, j in fx.get("refinement_pairs", []):
        a, b = computed[picks[i][0]], computed[picks[j][0]]
        fr = {e - (e.numerator // e.denominator) for e in list(a.terms) + list(b.terms)}
        if len(fr) != 1:
            fails.append(f"rows {i + 1} and {j + 1} lie in different exponent cosets")
        ri, rj = fx["rows"][i], fx["rows"][j]
        want = (expected[i][0].shift(Fraction(ri["prefactor"])) * ri["sign"]
                + expected[j][0].shift(Fraction(rj["prefactor"])) * rj["sign"])
        if not equal_cong(a + b, want).equal:
            fails.append(f"rows {i + 1} + {j + 1} do not add up to the printed sum")
    return fails


def _depth(texts) -> Fraction:
    return max(parse_series(t).max_exp() for t in texts) + 2


def run_fixture(fx: dict, base: Path = FIXTURES) -> List[str]:
    """Check one fixture; returns a list of failure messages (empty on success)."""
    kind = fx["kind"]
    fails: List[str] = []
    if kind == "zhat":
        rs = parse_group(fx["group"])
        g = plumbing.load_graph((base / fx["graph"]).read_text())
        texts = [r["series"] for r in fx["rows"]]
        depth = _depth(texts)
        label = fx["label"]
        if label in ("all", "folded"):
            res = zhat.zhat_all_labels(g, rs, depth, fold=(label == "folded"),
                                       orbit_sum=fx.get("orbit_sum", False))
            computed = [r.series for _, r in sorted(res.items())]
        else:
            computed = [zhat.compute_zhat(g, rs, label, depth).series]
        scale = Fraction(fx.get("scale", 1))
        expected = [(parse_series(r["series"]) * scale, r.get("count", 1)) for r in fx["rows"]]
        picks = match_rows(computed, expected)
        if picks is None:
            fails.append("printed rows do not match the computed blocks")
        else:
            fails += _check_pairs(fx, computed, expected, picks)
    elif kind == "surgery":
        rs = parse_group(fx["group"])
        for row in fx["rows"]:
            want = parse_series(row["series"])
            depth = want.max_exp() + 2
            f = _fk_for_surgery(rs, fx["s"], fx["t"], row["r"], depth)
            got = fkmod.surgery_minus_one_over_r(f, row["r"], depth)
            if not equal_cong(got, want).equal:
                fails.append(f"r = {row['r']} differs")
    elif kind == "fk":
        rs = parse_group(fx["group"])
        mons = [(tuple(m["beta"]), parse_series(m["series"])) for m in fx["monomials"]]
        f = fkmod.fk_torus_knot(rs, fx["s"], fx["t"], 20)
        ref_b, ref_s = mons[0]
        got0 = f.coeffs.get(ref_b)
        if not got0:
            return [f"f_{ref_b} missing"]
        shift = ref_s.min_exp() - got0.min_exp()
        sign = 1 if (ref_s.terms[ref_s.min_exp()] > 0) == (got0.terms[got0.min_exp()] > 0) else -1
        for b, want in mons:
            got = f.coeffs.get(b, QSeries({}))
            if got.shift(shift) * sign != want:
                fails.append(f"f_{b}: got {got.render()}")
    elif kind == "fksym":
        N = fx["N"]
        rs = su(N)
        want = fkmod.parse_xq_display(fx["slots"], N, Fraction(fx["scale"]),
                                      {int(k): v for k, v in fx.get("slot_shift", {}).items()})
        depth = max(_depth(fx["slots"].values()), 14)
        xmax = max(int(k) for k in fx["slots"])
        got = _fksym(rs, fx["s"], fx["t"], xmax, depth)
        if not fkmod.equal_cong_xq(got, want).equal:
            fails.append("symmetric slots differ")
    else:
        fails.append(f"unknown fixture kind {kind!r}")
    return fails


def load_fixtures(base: Path = FIXTURES):
    for p in sorted(base.glob("*.json")):
        yield p.stem, json.loads(p.read_text())


def cmd_regress(args) -> int:
    base = Path(args.fixtures) if args.fixtures else FIXTURES
    failed = 0
    ran = 0
    for name, fx in load_fixtures(base):
        if args.only and args.only not in name:
            continue
        if fx.get("slow") and not args.include_slow:
            sys.stdout.write(f"SKIP {name} (slow; use --include-slow)\n")
            continue
        ran += 1
        fails = run_fixture(fx, base)
        if fails:
            failed += 1
            sys.stdout.write(f"FAIL {name} [{fx['table']}]: {'; '.join(fails)}\n")
        else:
            sys.stdout.write(f"PASS {name} [{fx['table']}]\n")
    sys.stdout.write(f"{ran - failed}/{ran} fixtures passed\n")
    return EXIT_MISMATCH if failed else EXIT_OK


# -- entry point -----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="zhatfk", description="Higher rank Ẑ and F_K computations.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("zhat", help="homological blocks of a plumbing graph file (DSL or JSON)")
    p.add_argument("graph")
    p.add_argument("--label", help="index, all, folded, or raw weights v1;v2;... (default 0)")
    p.add_argument("--orbit-sum", action="store_true", help="sum each block over its Weyl orbit")
    _add_common(p)
    p.set_defaults(func=cmd_zhat)

    p = sub.add_parser("chi", help="higher rank false theta function chi_{p,beta}")
    p.add_argument("-p", type=_rational, required=True)
    p.add_argument("--beta", default="rho", help="rho or comma separated fundamental coordinates")
    _add_common(p)
    p.set_defaults(func=cmd_chi)

    p = sub.add_parser("brieskorn", help="closed form for Sigma(p1, p2, p3)")
    for name in ("p1", "p2", "p3"):
        p.add_argument(name, type=int)
    _add_common(p)
    p.set_defaults(func=cmd_brieskorn)

    p = sub.add_parser("seifert", help="M(a0; f1, f2, f3)")
    p.add_argument("a0", type=int)
    p.add_argument("fibers", type=_rational, nargs="+")
    p.add_argument("--label", help="index, all or folded (the last two use the plumbing engine)")
    p.add_argument("--engine", action="store_true", help="use the plumbing engine for a single label too")
    p.add_argument("--orbit-sum", action="store_true")
    _add_common(p)
    p.set_defaults(func=cmd_seifert)

    p = sub.add_parser("fk", help="coefficients f_beta of F_K for the torus knot T(s,t)")
    p.add_argument("s", type=int)
    p.add_argument("t", type=int)
    _add_common(p, "12")
    p.set_defaults(func=cmd_fk)

    p = sub.add_parser("surgery", help="-1/r surgery on T(s,t) (r = 0 gives the 0-surgery formula)")
    p.add_argument("s", type=int)
    p.add_argument("t", type=int)
    p.add_argument("-r", type=int, default=1)
    _add_common(p)
    p.set_defaults(func=cmd_surgery)

    p = sub.add_parser("fksym", help="symmetric specialization of F_K for T(s,t), SU(N)")
    p.add_argument("s", type=int)
    p.add_argument("t", type=int)
    p.add_argument("--xmax", type=int, default=4)
    _add_common(p, "12")
    p.set_defaults(func=cmd_fksym)

    p = sub.add_parser("check-recurrence", help="apply the trefoil q-difference operator to the SU(N) series")
    p.add_argument("s", type=int)
    p.add_argument("t", type=int)
    p.add_argument("--qmax", type=int, default=15)
    p.add_argument("--xwin", type=int, nargs=2, default=(-3, 3), metavar=("LO", "HI"))
    _add_common(p)
    p.set_defaults(func=cmd_check_recurrence)

    p = sub.add_parser("neumann-suite", help="random Neumann-move invariance checks")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=20)
    _add_common(p, "15")
    p.set_defaults(func=cmd_neumann_suite)

    p = sub.add_parser("regress", help="recompute the bundled paper tables")
    p.add_argument("--fixtures", help="fixture directory (default: the bundled one)")
    p.add_argument("--only", help="substring filter on fixture names")
    p.add_argument("--include-slow", action="store_true")
    p.set_defaults(func=cmd_regress)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_PARSE if e.code else EXIT_OK
    try:
        return args.func(args)
    except CliError as e:
        sys.stderr.write(f"error: {e}\n")
        return e.code
    except plumbing.PlumbingParseError as e:
        sys.stderr.write(f"parse error: {e}\n")
        return EXIT_PARSE
    except (plumbing.NotWeaklyNegativeDefinite, plumbing.SingularMatrixError,
            falsetheta.PreconditionError, plumbing.MovePatternError) as e:
        sys.stderr.write(f"precondition failed: {e}\n")
        return EXIT_PRECONDITION
    except (zhat.BudgetExceeded, fkmod.InsufficientDepth) as e:
        sys.stderr.write(f"budget exhausted: {e}\n")
        return EXIT_BUDGET


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
