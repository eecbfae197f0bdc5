import json


from zhatfk.cli import FIXTURES, main
from zhatfk.qlaurent import QSeries, equal_cong, parse_series
from zhatfk.zhat import compute_zhat
from zhatfk.lie import su
from zhatfk.plumbing import load_graph

SIGMA = str(FIXTURES / "seifert_2_3_7.dsl")


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_zhat_cong(capsys):
    code, out, _ = run(capsys, "zhat", SIGMA, "--su", "2", "--normalize", "cong")
    assert code == 0
    assert "1 -q -q^5 +q^10 -q^11 +q^18" in out


def test_zhat_json_round_trip(capsys):
    code, out, _ = run(capsys, "zhat", SIGMA, "--su", "3", "--max-order", "12", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["schema"] == 1 and data["group"] == "A2"
    got = QSeries.from_json(data["results"][0]["series"])
    g = load_graph((FIXTURES / "seifert_2_3_7.dsl").read_text())
    assert got == compute_zhat(g, su(3), 0, 12).series


def test_deterministic_output(capsys):
    argv = ("seifert", "-1", "1/3", "1/5", "3/7", "--su", "3", "--label", "all", "--max-order", "8", "--format", "json")
    first = run(capsys, *argv)[1]
    assert run(capsys, *argv)[1] == first


def test_parse_error_exit(tmp_path, capsys):
    p = tmp_path / "bad.dsl"
    p.write_text("vertex a -1\nedge a\n")
    code, _, err = run(capsys, "zhat", str(p), "--su", "2")
    assert code == 2 and "line 2" in err


def test_precondition_exit(tmp_path, capsys):
    p = tmp_path / "pos.dsl"
    p.write_text("vertex c 1\nvertex a -2\nvertex b -2\nvertex d -2\nedge c a\nedge c b\nedge c d\n")
    assert run(capsys, "zhat", str(p), "--su", "2")[0] == 3
    p.write_text("vertex a 0\n")
    assert run(capsys, "zhat", str(p), "--su", "2")[0] == 3
    assert run(capsys, "brieskorn", "2", "4", "7")[0] == 3


def test_budget_exit(monkeypatch, capsys):
    monkeypatch.setenv("ZHATFK_MAX_PAIRS", "10")
    assert run(capsys, "zhat", SIGMA, "--su", "3", "--max-order", "30")[0] == 4


def test_bad_group(capsys):
    assert run(capsys, "zhat", SIGMA, "--group", "Q7")[0] == 2


def test_chi(capsys):
    code, out, _ = run(capsys, "chi", "--su", "2", "-p", "2", "--beta", "rho", "--normalize", "cong",
                       "--max-order", "12")
    assert code == 0
    assert equal_cong(parse_series(out.split(":")[-1].split("+ O")[0]),
                      parse_series("1 -q +q^3 -q^6 +q^10")).equal


def test_brieskorn_row(capsys):
    code, out, _ = run(capsys, "brieskorn", "2", "3", "7", "--su", "3", "--normalize", "cong", "--max-order", "6")
    assert code == 0 and out.strip().startswith("1 -2*q +2*q^3 +q^4 -2*q^5")


def test_seifert_all_labels(capsys):
    code, out, _ = run(capsys, "seifert", "-1", "1/3", "1/5", "3/7", "--su", "2", "--label", "folded",
                       "--orbit-sum", "--normalize", "cong")
    assert code == 0 and "1 +q^4 +q^16" in out


def test_fk_table(capsys):
    code, out, _ = run(capsys, "fk", "2", "3", "--su", "3", "--max-order", "3")
    assert code == 0
    assert out.splitlines()[0].startswith("(1, 1):")


def test_surgery_row(capsys):
    code, out, _ = run(capsys, "surgery", "2", "3", "-r", "2", "--su", "3", "--normalize", "cong",
                       "--max-order", "11")
    assert code == 0 and out.strip().startswith("1 -2*q +2*q^3 -q^4 +2*q^10")


def test_check_recurrence(capsys):
    code, out, _ = run(capsys, "check-recurrence", "2", "3", "--su", "2", "--qmax", "15")
    assert code == 0 and out.strip().endswith("PASS")


def test_neumann_suite_command(capsys):
    code, out, _ = run(capsys, "neumann-suite", "--su", "2", "--seed", "3", "--trials", "3", "--max-order", "10")
    assert code == 0 and out.strip().endswith("9/9 passed")


def test_regress_subset(capsys):
    code, out, _ = run(capsys, "regress", "--only", "seifert_2_3_7")
    assert code == 0 and "3/3 fixtures passed" in out


def test_regress_mismatch(tmp_path, capsys):
    fx = json.loads((FIXTURES / "seifert_2_3_7_A1.json").read_text())
    fx["rows"][0]["series"] = "1 -q -q^4 + ..."
    (tmp_path / "broken.json").write_text(json.dumps(fx))
    (tmp_path / fx["graph"]).write_text((FIXTURES / fx["graph"]).read_text())
    assert run(capsys, "regress", "--fixtures", str(tmp_path))[0] == 5
