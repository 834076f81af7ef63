import json
import os
import subprocess
import sys

import pytest
from hypothesis import given, strategies as st

from wald_lab import tables
from wald_lab.cli import parse_grid, run
from wald_lab.errors import ValidationError

SYMMETRIC = ["--c", "0.4597276"]


def run_cli(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestSolve:
    def test_symmetric_candidate(self, capsys):
        code, out, _ = run_cli(capsys, "solve", *SYMMETRIC)
        assert code == 0
        meta, rows = tables.read_csv(out)
        assert meta["schema_version"] == 1 and meta["table"] == "solve"
        row = rows[0]
        assert row["ell_lo"] == pytest.approx(-1.0, abs=1e-7)
        assert row["ell_hi"] == pytest.approx(1.0, abs=1e-7)
        assert row["accuracy"] == pytest.approx(0.7310586, abs=1e-7)
        assert row["expected_time"] == pytest.approx(0.2310586, abs=1e-7)
        assert row["immediate_stop"] is False

    def test_stakes_form_equals_payoff_form(self, capsys):
        _, a, _ = run_cli(capsys, "solve", "--payoffs", "0.6,0,0,0.4", "--c", "0.1")
        _, b, _ = run_cli(capsys, "solve", "--delta", "1", "--p-tilde", "0.4", "--c", "0.1")
        ra, rb = tables.read_csv(a)[1][0], tables.read_csv(b)[1][0]
        assert ra["ell_lo"] == pytest.approx(rb["ell_lo"], rel=1e-12)

    def test_json_output(self, capsys):
        code, out, _ = run_cli(capsys, "solve", *SYMMETRIC, "--format", "json")
        doc = json.loads(out)
        assert code == 0 and doc["schema_version"] == 1 and doc["table"] == "solve"
        assert doc["rows"][0]["accuracy"] == pytest.approx(0.7310586, abs=1e-7)

    def test_invalid_payoffs(self, capsys):
        code, out, err = run_cli(capsys, "solve", "--payoffs", "0,1,1,0")
        assert code == 2 and out == ""
        assert json.loads(err)["error"] == "INVALID_PAYOFFS"

    def test_mixed_problem_forms(self, capsys):
        code, _, err = run_cli(capsys, "solve", "--payoffs", "1,0,0,1", "--delta", "2")
        assert code == 2 and json.loads(err)["error"] == "VALIDATION"

    def test_numerical_failure_exit_code(self, capsys):
        code, _, err = run_cli(capsys, "solve", "--mu", "1e200")
        assert code == 3
        assert json.loads(err)["error"] == "CONVERGENCE_FAILURE"


class TestSweep:
    def test_fixed_header(self, capsys):
        code, out, _ = run_cli(capsys, "sweep", *SYMMETRIC, "--grid", "0.5:2:4:lin")
        assert code == 0
        header = [ln for ln in out.splitlines() if not ln.startswith("#")][0]
        assert header == "k,ell_lo,ell_hi,p_lo,p_hi,accuracy,expected_time"
        _, rows = tables.read_csv(out)
        assert [r["k"] for r in rows] == [0.5, 1.0, 1.5, 2.0]

    def test_empty_grid(self, capsys):
        code, out, err = run_cli(capsys, "sweep", "--grid", "1:2:0:log")
        assert code == 2 and out == ""
        assert "empty" in json.loads(err)["message"]

    def test_default_grid(self, capsys):
        _, out, _ = run_cli(capsys, "sweep", *SYMMETRIC)
        assert len(tables.read_csv(out)[1]) == 200

    def test_argument_errors_exit_2(self, capsys):
        with pytest.raises(SystemExit) as info:
            run(["sweep", "--grid"])
        assert info.value.code == 2


class TestGrid:
    def test_spacings(self):
        assert parse_grid("1:3:3:lin") == [1.0, 2.0, 3.0]
        assert parse_grid("1:100:3:log") == pytest.approx([1.0, 10.0, 100.0])
        assert parse_grid("2:2:1:lin") == [2.0]

    @pytest.mark.parametrize("text", ["1:2:3", "1:2:x:lin", "0:1:3:log", "2:1:3:lin", "1:2:3:cubic"])
    def test_invalid(self, text):
        with pytest.raises(ValidationError):
            parse_grid(text)


class TestConfig:
    def test_file_values_and_flag_override(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("# symmetric problem\nc = 0.4597276\nmu = 2.0\nformat = json\n")
        _, out, _ = run_cli(capsys, "solve", "--config", str(cfg), "--mu", "1.0")
        doc = json.loads(out)
        assert doc["meta"]["k"] == 1.0
        assert doc["rows"][0]["ell_hi"] == pytest.approx(1.0, abs=1e-7)

    def test_unknown_key_rejected(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("c = 0.4\ncolour = blue\n")
        code, _, err = run_cli(capsys, "solve", "--config", str(cfg))
        assert code == 2 and "colour" in json.loads(err)["message"]

    def test_key_from_other_subcommand_rejected(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("r = 0.5\n")
        code, _, _ = run_cli(capsys, "solve", "--config", str(cfg))
        assert code == 2

    def test_malformed_line(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("just words\n")
        assert run_cli(capsys, "solve", "--config", str(cfg))[0] == 2


class TestSimulate:
    ARGS = ["simulate", *SYMMETRIC, "--paths", "4000", "--dt", "1e-3", "--seed", "42"]

    def test_byte_identical_runs_and_workers(self, tmp_path, capsys):
        paths = []
        for i, workers in enumerate(("1", "1", "4")):
            out = tmp_path / f"sim{i}.csv"
            assert run([*self.ARGS, "--workers", workers, "--out", str(out), "--quiet"]) == 0
            paths.append(out.read_bytes())
        assert paths[0] == paths[1] == paths[2]
        assert capsys.readouterr().err == ""

    def test_report(self, capsys):
        _, out, _ = run_cli(capsys, *self.ARGS)
        meta, rows = tables.read_csv(out)
        assert meta["seed"] == 42 and meta["n_paths"] == 4000
        assert "workers" not in meta
        assert [r["quantity"] for r in rows] == ["accuracy", "expected_time", "prob_choose_a"]
        assert all(abs(r["z_score"]) < 6 for r in rows)

    def test_path_cap(self, capsys):
        code, _, err = run_cli(capsys, "simulate", "--paths", "0")
        assert code == 2


class TestOtherCommands:
    def test_cost_quadratic(self, capsys):
        _, out, _ = run_cli(capsys, "cost", "--cost", "quadratic", "--grid", "1:4:4:lin")
        _, rows = tables.read_csv(out)
        assert [r["t_star"] for r in rows] == pytest.approx([0.25, 0.5, 1 / 3, 0.25])
        assert out.splitlines()[3] == "kappa,p_star,c_star,t_star"

    def test_discount_reference(self, capsys):
        _, out, _ = run_cli(capsys, "discount", "--r", "0.5", "--mu", "1", "--sigma", "1")
        row = tables.read_csv(out)[1][0]
        assert row["ell_star"] == pytest.approx(1.2464504802804610, rel=1e-14)

    def test_discount_grid(self, capsys):
        _, out, _ = run_cli(capsys, "discount", "--grid", "0.5:5:10:log")
        assert len(tables.read_csv(out)[1]) == 10

    def test_effort_thresholds(self, capsys):
        _, out, _ = run_cli(capsys, "effort", "--grid", "0.5:2:3:lin", "--cost", "quadratic_fixed:1,1")
        meta, rows = tables.read_csv(out)
        assert meta["e_star"] == 1 and meta["k_under"] < meta["k_over"]
        assert all(r["accuracy_hi"] >= r["accuracy_lo"] for r in rows)

    def test_effort_without_fixed_cost(self, capsys):
        code, _, err = run_cli(capsys, "effort", "--cost", "quadratic_fixed:0,1")
        assert code == 2 and json.loads(err)["error"] == "NO_INTERIOR_OPTIMUM"

    def test_probe_from_problems(self, tmp_path, capsys):
        problems_file = tmp_path / "problems.json"
        problems_file.write_text(json.dumps([
            {"id": "simple", "mu": 1.5, "c": 0.08},
            {"id": "complex", "mu": 0.5, "c": 0.08, "payoffs": [1, 0, 0, 1]},
        ]))
        _, out, _ = run_cli(capsys, "probe", "--problems", str(problems_file))
        rows = tables.read_csv(out)[1]
        assert [r["problem_id"] for r in rows] == ["complex", "simple"]
        assert out.splitlines()[-3] == "problem_id,delta,se,rank"

    def test_probe_from_shares(self, tmp_path, capsys):
        shares = tmp_path / "shares.csv"
        shares.write_text("problem_id,baseline_share_b,shifted_share_b,n_obs\n"
                          "a,0.5,0.52,20000\nb,0.5,0.58,20000\n")
        _, out, _ = run_cli(capsys, "probe", "--shares", str(shares))
        meta, rows = tables.read_csv(out)
        assert [r["problem_id"] for r in rows] == ["b", "a"]
        assert meta["separated"] == 1

    def test_probe_needs_one_source(self, capsys):
        assert run_cli(capsys, "probe")[0] == 2

    def test_probe_bad_share(self, tmp_path, capsys):
        shares = tmp_path / "shares.csv"
        shares.write_text("problem_id,baseline_share_b,shifted_share_b,n_obs\na,0.5,1.5,10\n")
        code, _, err = run_cli(capsys, "probe", "--shares", str(shares))
        assert code == 2 and json.loads(err)["error"] == "INVALID_SHARE"

    def test_writes_file(self, tmp_path, capsys):
        out = tmp_path / "o.json"
        assert run(["cost", "--grid", "1:2:2:lin", "--format", "json", "--out", str(out)]) == 0
        assert json.loads(out.read_text())["table"] == "cost"
        assert "wrote 2 rows" in capsys.readouterr().err


finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


class TestTables:
    @given(st.lists(st.tuples(finite, finite, finite, finite), min_size=0, max_size=20))
    def test_csv_round_trip(self, rows):
        recs = [dict(zip(tables.SCHEMAS["cost"], map(float, r))) for r in rows]
        meta, back = tables.read_csv(tables.to_csv("cost", recs, {"cost": "entropy"}))
        assert meta["table"] == "cost" and meta["cost"] == "entropy"
        assert back == recs

    def test_special_values(self):
        text = tables.to_csv("cost", [{"kappa": float("inf"), "p_star": float("nan"),
                                       "c_star": -0.0, "t_star": True}])
        row = tables.read_csv(text)[1][0]
        assert row["kappa"] == float("inf") and row["p_star"] != row["p_star"]
        assert row["t_star"] is True

    def test_locale_independent(self, tmp_path):
        env = {**os.environ, "LC_ALL": "de_DE.UTF-8", "LANG": "de_DE.UTF-8"}
        proc = subprocess.run(
            [sys.executable, "-m", "wald_lab.cli", "solve", *SYMMETRIC],
            capture_output=True, text=True, env=env, check=True,
        )
        row = tables.read_csv(proc.stdout)[1][0]
        assert row["accuracy"] == pytest.approx(0.7310586, abs=1e-7)
