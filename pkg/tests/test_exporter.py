"""
测试报告导出：JSON 兼容转换、确定性序列化与 CSV 路径约定
"""
import json

import numpy as np
import pytest

from lawless import __version__
from lawless.models import RunConfig, TimeDirection
from lawless.runtime.exporter import (
    build_report,
    dumps_report,
    matrix_frame,
    report_path_for,
    to_jsonable,
    trials_path_for,
    write_table,
)
from lawless.runtime.geometry import make_state


def test_to_jsonable_handles_numeric_types():
    value = {
        "complex": 1 + 2j,
        "matrix": np.array([[1j, 0.0]]),
        "ints": np.arange(3),
        "inf": float("inf"),
        "nan": np.float64("nan"),
        "direction": TimeDirection.FORWARD,
        1: np.bool_(True),
    }
    assert to_jsonable(value) == {
        "complex": [1.0, 2.0],
        "matrix": [[[0.0, 1.0], [0.0, 0.0]]],
        "ints": [0, 1, 2],
        "inf": "inf",
        "nan": "nan",
        "direction": "Forward",
        "1": True,
    }


def test_to_jsonable_expands_models():
    state = to_jsonable(make_state([1, 1j]))
    assert state["amplitudes"][1] == pytest.approx([0.0, np.sqrt(0.5)])


def test_report_is_deterministic_and_sorted():
    run = RunConfig(subcommand="born", parameters={"probs": [0.5, 0.5]}, seed=7)
    report = build_report(run, {"m_cap": 100}, {"p": np.array([0.5, 0.5])})
    text = dumps_report(report)
    assert text.endswith("\n")
    assert text == dumps_report(build_report(run, {"m_cap": 100}, {"p": np.array([0.5, 0.5])}))
    parsed = json.loads(text)
    assert parsed["version"] == __version__
    assert parsed["seed"] == 7
    assert list(parsed) == sorted(parsed)


def test_csv_paths():
    assert report_path_for("out/result.csv") == "out/result.json"
    assert report_path_for("result") == "result.json"
    assert trials_path_for("out/result.csv") == "out/result.trials.csv"


def test_matrix_frame_and_table(tmp_path):
    frame = matrix_frame(np.array([[1.0, 2j], [0.0, 1.0]]), "g")
    assert list(frame.columns) == ["name", "row", "col", "re", "im"]
    assert frame.loc[1, "im"] == 2.0
    path = tmp_path / "nested" / "table.csv"
    write_table(frame, str(path))
    assert path.read_text(encoding="utf-8").splitlines()[0] == "name,row,col,re,im"
