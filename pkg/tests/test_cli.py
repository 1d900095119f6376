"""
测试命令行：四个子命令的报告输出、确定性与退出码
"""
import json

import pandas as pd
import pytest
from typer.testing import CliRunner

from lawless.cli import app
from lawless.config import reset_config

runner = CliRunner()


def _report(path) -> dict:
    return json.loads(path.read_text(encoding="utf-8"))


def test_born_report(tmp_path):
    out = tmp_path / "born.json"
    result = runner.invoke(app, ["born", "--probs", "0.36,0.64", "--out", str(out)])
    assert result.exit_code == 0
    report = _report(out)
    assert report["subcommand"] == "born"
    assert report["results"]["M"] == 25
    assert report["results"]["n"] == [9, 16]
    assert report["results"]["p"] == pytest.approx([0.36, 0.64], abs=1e-15)
    assert report["parameters"]["probs"] == [0.36, 0.64]


def test_reports_are_byte_identical(tmp_path):
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    args = ["phenomenon", "--scenario", "penrose", "--trials", "500", "--seed", "17"]
    assert runner.invoke(app, args + ["--out", str(first)]).exit_code == 0
    assert runner.invoke(app, args + ["--out", str(second), "--verbose"]).exit_code == 0
    assert first.read_bytes() == second.read_bytes()


def test_phenomenon_csv_mode(tmp_path):
    """CSV 模式同时写出频率表、JSON 报告与逐次试验记录"""
    out = tmp_path / "penrose.csv"
    result = runner.invoke(
        app, ["phenomenon", "--trials", "2000", "--seed", "3", "--format", "csv", "--out", str(out)]
    )
    assert result.exit_code == 0
    report = _report(tmp_path / "penrose.json")
    assert report["results"]["analysis"]["backward"]["beta_1"]["alpha_1"] == 1.0
    assert report["results"]["verdict"]["direction"] == "Forward"

    trials = pd.read_csv(tmp_path / "penrose.trials.csv")
    assert len(trials) == 2000
    assert set(trials["initial"]) == {"alpha_1"}
    table = pd.read_csv(out)
    assert list(table.columns) == ["given", "outcome", "direction", "frequency"]


def test_phenomenon_reverse(tmp_path):
    out = tmp_path / "reverse.json"
    result = runner.invoke(app, ["phenomenon", "--trials", "2000", "--reverse", "--out", str(out)])
    assert result.exit_code == 0
    report = _report(out)
    assert report["results"]["reversed"] is True
    assert report["results"]["verdict"]["direction"] == "Backward"


def test_modular_report(tmp_path):
    out = tmp_path / "modular.json"
    result = runner.invoke(app, ["modular", "--nmax", "2", "--out", str(out)])
    assert result.exit_code == 0
    report = _report(out)["results"]["report"]
    assert report["delta_translation"][0] == pytest.approx(-1.0, abs=1e-10)
    assert report["deviation"] <= 1e-10


def test_holonomy_zero_field(tmp_path, data_dir):
    out = tmp_path / "zero.json"
    curve = str(data_dir / "curves" / "square.csv")
    result = runner.invoke(app, ["holonomy", "--preset", "zero", "--curve", curve, "--out", str(out)])
    assert result.exit_code == 0
    results = _report(out)["results"]
    assert results["matrix"] == [[[1.0, 0.0]]]
    assert results["representation"] == "U1(e=1)"


def test_holonomy_phase_factor_and_small_loop(tmp_path, data_dir):
    out = tmp_path / "phase.json"
    curve = str(data_dir / "curves" / "around_origin.csv")
    result = runner.invoke(
        app, ["holonomy", "--field", str(data_dir / "fields" / "solenoid.json"),
              "--curve", curve, "--phase-factor", "--out", str(out)]
    )
    assert result.exit_code == 0
    phase = _report(out)["results"]["phase_factor"]
    assert phase["value"][0] == pytest.approx(-1.0, abs=1e-12)
    assert phase["winding"] == 1

    loop = tmp_path / "loop.json"
    result = runner.invoke(
        app, ["holonomy", "--preset", "su2_smooth", "--small-loop", "0.05", "--at", "0.2,0.1", "--out", str(loop)]
    )
    assert result.exit_code == 0
    assert _report(loop)["results"]["small_loop"]["residual"] < 1e-3


def test_input_errors_exit_with_2(tmp_path, data_dir):
    out = str(tmp_path / "x.json")
    assert runner.invoke(app, ["born", "--probs", "0.5,0.6", "--out", out]).exit_code == 2
    assert runner.invoke(app, ["born", "--out", out]).exit_code == 2
    assert runner.invoke(app, ["born", "--probs", "0.5,0.5", "--format", "xml"]).exit_code == 2
    assert runner.invoke(app, ["born", "--probs", "0.5,0.5", "--format", "csv"]).exit_code == 2
    assert runner.invoke(app, ["holonomy", "--small-loop", "0.1", "--plane", "a,b"]).exit_code == 2

    open_curve = tmp_path / "open.csv"
    open_curve.write_text("x,y\n1.0,1.0\n2.0,1.0\n", encoding="utf-8")
    result = runner.invoke(
        app, ["holonomy", "--preset", "solenoid", "--curve", str(open_curve), "--phase-factor", "--out", out]
    )
    assert result.exit_code == 2


def test_tolerance_failure_exits_with_3(tmp_path, monkeypatch):
    """分母上限过小时有理划分失败，退出码为 3"""
    monkeypatch.setenv("LAWLESS_M_CAP", "100")
    reset_config()
    result = runner.invoke(
        app, ["born", "--probs", "0.3183098861837907,0.6816901138162093", "--eps", "1e-9",
              "--out", str(tmp_path / "tight.json")]
    )
    assert result.exit_code == 3
    assert not (tmp_path / "tight.json").exists()
