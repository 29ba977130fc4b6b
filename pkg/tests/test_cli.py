import csv
import io
import json

import pytest

from r2kit import checks
from r2kit.cli import EXIT_CHECK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_OK, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_gen_p2(capsys):
    code, out, _ = run(capsys, "gen", "--family", "gcrr", "--zeta", "1", "--theta", "0", "--omega", "1", "--n", "2")
    assert code == EXIT_OK
    p2 = [float(r["re"]) for r in rows(out) if r["k"] == "2"]
    assert p2 == [-0.25, 0.0, 0.75]


def test_gen_n0(capsys):
    code, out, _ = run(capsys, "gen", "--n", "0", "--format", "json")
    assert code == EXIT_OK
    polys = json.loads(out)["polys"]
    assert len(polys) == 1 and polys[0]["re"] == [1.0]


def test_gen_constant_closed_form_deltas(capsys):
    code, out, _ = run(capsys, "gen", "--family", "constant", "--n", "8")
    assert code == EXIT_OK
    assert max(float(r["delta"]) for r in rows(out)) < 1e-12


def test_perturb_kappa(capsys):
    code, out, _ = run(capsys, "perturb", "--family", "constant", "--rule", "kappa", "--n", "2", "--format", "json")
    data = json.loads(out)
    assert code == EXIT_OK
    assert data["polys"][2]["re"] == [-0.25, -0.5, 0.75]
    assert data["reduction"]["admissible"]


def test_zeros_both(capsys):
    code, out, _ = run(capsys, "zeros", "--rule", "alpha-gcrr", "--n", "8", "--method", "both", "--format", "csv")
    assert code == EXIT_OK
    r = rows(out)
    assert len(r) == 8
    assert all(float(x["im"]) == 0 for x in r)
    assert max(float(x["delta"]) for x in r) < 1e-9


def test_zeros_json_rule(capsys):
    rule = json.dumps({"variant": "explicit-list", "values": [0.5, 0.5, 0.5]})
    code, out, _ = run(capsys, "zeros", "--family", "constant", "--rule", rule, "--n", "3", "--format", "json")
    assert code == EXIT_OK and json.loads(out)["cross_check_delta"] < 1e-12


@pytest.mark.parametrize("mode, extra", [("triple", ["--sign", "+"]), ("triple", ["--sign", "-"]),
                                         ("cross", []), ("consecutive", [])])
def test_interlace(capsys, mode, extra):
    code, out, _ = run(capsys, "interlace", "--mode", mode, "--n", "8", "--format", "json", *extra)
    assert code == EXIT_OK
    assert json.loads(out)["status"] == "pass"


def test_biortho_ldu(capsys):
    code, out, _ = run(capsys, "biortho", "--n", "4", "--decomp", "ldu")
    assert code == EXIT_OK
    assert json.loads(out)["reports"][0]["max_offdiag"] < 1e-8


def test_biortho_all_full(capsys):
    code, out, _ = run(capsys, "biortho", "--n", "3", "--decomp", "all", "--full", "--family", "constant",
                       "--rule", "kappa")
    reps = json.loads(out)["reports"]
    assert code == EXIT_OK and len(reps) == 3 and all("gram" in r for r in reps)


def test_factor(capsys):
    code, out, _ = run(capsys, "factor", "--family", "constant", "--n", "3", "--format", "json")
    f = json.loads(out)["factors"]
    assert code == EXIT_OK
    assert f["ldu_e"] == pytest.approx([1, 0.75, 2 / 3], abs=1e-15)


@pytest.mark.parametrize("figure, tags", [(1, {"P_7", "P_8", "L_8"}), (2, {"P_7", "P_8", "T_8"}), (3, {"L_8", "T_8"})])
def test_plot_data(capsys, figure, tags):
    code, out, _ = run(capsys, "plot-data", "--figure", str(figure), "--format", "csv")
    r = rows(out)
    assert code == EXIT_OK
    assert {x["source_tag"] for x in r} == tags
    assert len(r) == 8 * len(tags) - (1 if "P_7" in tags else 0)


def test_verify_subset(capsys):
    code, out, _ = run(capsys, "verify", "--checks", "perturbation.ledger", "recurrence")
    assert code == EXIT_OK
    assert out.strip().splitlines()[-1] == "7/7 checks passed"


def test_verify_failure_exit(capsys, monkeypatch):
    monkeypatch.setitem(checks.CHECKS, "zz.always_fails", lambda: (1.0, 1e-3))
    code, out, _ = run(capsys, "verify", "--checks", "zz")
    assert code == EXIT_CHECK and "FAIL" in out


def test_config_errors(capsys):
    assert run(capsys, "gen", "--n", "-1")[0] == EXIT_CONFIG
    assert run(capsys, "gen", "--zeta", "-1", "--n", "2")[0] == EXIT_CONFIG
    assert run(capsys, "verify", "--checks", "nothing")[0] == EXIT_CONFIG
    assert run(capsys, "zeros", "--rule", "not-a-rule", "--n", "3")[0] == EXIT_CONFIG
    assert run(capsys, "bogus")[0] == EXIT_CONFIG


def test_numeric_error(capsys):
    code, _, err = run(capsys, "gen", "--family", "constant", "--d", "1", "--n", "3")
    assert code == EXIT_NUMERIC and "DegreeCollapseError" in err


def test_config_file_and_override(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"family": "constant", "n": 5, "format": "json"}))
    _, out, _ = run(capsys, "gen", "--config", str(cfg))
    assert len(json.loads(out)["polys"]) == 6
    _, out, _ = run(capsys, "gen", "--config", str(cfg), "--n", "2")
    assert len(json.loads(out)["polys"]) == 3


def test_bad_config_file(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "gen", "--config", str(bad))[0] == EXIT_CONFIG
    assert run(capsys, "gen", "--config", str(tmp_path / "missing.json"))[0] == EXIT_CONFIG


@pytest.mark.parametrize("argv", [
    ["gen", "--n", "12", "--zeta", "2.5", "--theta", "0.7"],
    ["zeros", "--rule", "beta-gcrr", "--n", "10", "--method", "both", "--format", "csv"],
    ["biortho", "--n", "5", "--decomp", "all"],
])
def test_output_file_deterministic(capsys, tmp_path, argv):
    a, b = tmp_path / "a.out", tmp_path / "b.out"
    assert main(argv + ["-o", str(a)]) == EXIT_OK
    assert main(argv + ["-o", str(b)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes() and a.stat().st_size > 0
