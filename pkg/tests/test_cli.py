import json
import re
from pathlib import Path

import pytest

from dualconv.cli import VERBS, demo_divergence, main
from dualconv.lp import CSV_HEADER


def run_main(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verbs_are_registered():
    assert len(VERBS) == 9
    assert "dc-commute" in VERBS and "demo-divergence" in VERBS


def test_lp_table_json_passes(capsys):
    code, out, _ = run_main(capsys, "--verb", "lp-table", "--p", "4")
    assert code == 0
    d = json.loads(out)
    assert d["pass"] is True
    assert d["check_name"] == "lp-table"
    assert d["max_residual"] <= d["tolerance"]


def test_lp_table_csv_table(capsys):
    code, out, _ = run_main(capsys, "--verb", "lp-table", "--format", "csv")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == CSV_HEADER
    assert len(lines) == 6  # header + five n values
    assert "\r" not in out
    assert out.endswith("\n")


def test_exit_code_1_on_failing_tolerance(capsys):
    code, _, _ = run_main(capsys, "--verb", "lp-table", "--tol", "1e-30")
    assert code == 1


def test_exit_code_2_on_config_errors(capsys):
    assert run_main(capsys, "--verb", "lp-table", "--p", "2")[0] == 2
    assert run_main(capsys, "--verb", "lp-table", "--samples", "0")[0] == 2
    assert run_main(capsys)[0] == 2  # no verb
    assert run_main(capsys, "--verb", "lp-table", "--n", "0,2")[0] == 2
    assert run_main(capsys, "--verb", "lp-table", "--rel-tol", "-1")[0] == 2
    assert run_main(capsys, "--verb", "lp-table", "--config", "/nonexistent")[0] == 2


def test_config_file_and_flag_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        "# comment line\nverb=lp-table\nseed=5\np=4\nformat=json\n", encoding="utf-8"
    )
    code, out, _ = run_main(capsys, "--config", str(cfg))
    assert code == 0
    assert json.loads(out)["seed"] == 5
    code, out, _ = run_main(capsys, "--config", str(cfg), "--seed", "9")
    assert code == 0
    assert json.loads(out)["seed"] == 9
    bad = tmp_path / "bad.cfg"
    bad.write_text("this is not key value\n", encoding="utf-8")
    assert run_main(capsys, "--config", str(bad))[0] == 2


def test_output_file_deterministic_modulo_wall_time(tmp_path, capsys):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    assert main(["--verb", "lp-table", "--out", str(a)]) == 0
    assert main(["--verb", "lp-table", "--out", str(b)]) == 0
    strip = lambda p: re.sub(rb'"wall_time_ms": \d+', b"", p.read_bytes())
    assert strip(a) == strip(b)


def test_demo_divergence_growth(capsys):
    code, out, _ = run_main(capsys, "--verb", "demo-divergence")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "eps,norm_sq,predicted_order"
    rows = [list(map(float, ln.split(","))) for ln in lines[1:]]
    assert len(rows) == 3
    norms = [r[1] for r in rows]
    preds = [r[2] for r in rows]
    assert norms[0] < norms[1] < norms[2]
    # the blow-up tracks the predicted eps^(-1/3) order
    for nv, pv in zip(norms, preds):
        assert 0.5 < nv / pv < 1.5
    assert demo_divergence().startswith("eps,")


def test_w_isometry_with_explicit_family(capsys):
    code, out, _ = run_main(
        capsys,
        "--verb", "w-isometry",
        "--family", "ind:1,2",
        "--family", "ind:1,3",
        "--cases", "1",
    )
    assert code == 0
    assert json.loads(out)["pass"] is True


def test_w_isometry_family_underflow_is_config_error(capsys):
    code, _, _ = run_main(
        capsys, "--verb", "w-isometry", "--family", "ind:1,2", "--cases", "1"
    )
    assert code == 2


def test_plot_writes_png(tmp_path, capsys):
    out = tmp_path / "table.csv"
    code = main(
        ["--verb", "lp-table", "--format", "csv", "--out", str(out), "--plot"]
    )
    assert code == 0
    png = out.with_suffix(".png")
    assert png.exists()
    assert png.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_parity_check_runs(capsys):
    code, out, _ = run_main(
        capsys, "--verb", "parity-check", "--cases", "3", "--samples", "10",
        "--format", "csv",
    )
    assert code == 0
    header = out.splitlines()[0].split(",")
    assert "max_residual" in header and "pass" in header
