"""
场景目录
内置场景（Stern-Gerlach、Penrose 镜面实验、三结果、恒等演化）与 JSON 场景文件读写

JSON 格式：
    {"label": ..., "dim": N,
     "initials": {"名称": [[re, im], ...]},
     "unitary": [[[re, im], ...], ...],          # 按行存储
     "finals": [[[re, im], ...], ...],
     "labels": ["β_1 名称", ...]}
"""
import json
import logging
import os
from typing import Callable, Dict

import numpy as np

from lawless.errors import FileNotFound, SchemaError, UnknownLabel
from lawless.models import Scenario, parse_json_object
from lawless.numerics import decode_complex, encode_complex
from lawless.runtime.geometry import basis_state, make_state

logger = logging.getLogger(__name__)

_SQRT_HALF = 1.0 / np.sqrt(2.0)

# Penrose 镜面实验的四个空间模式
LAMP, DETECTOR, WALL, OPPOSITE_WALL = range(4)


def stern_gerlach() -> Scenario:
    """自旋 x 本征态进入 z 方向磁场，σ_z 基下读出"""
    return Scenario(
        label="stern_gerlach",
        initials={
            "x+": make_state([_SQRT_HALF, _SQRT_HALF]),
            "x-": make_state([_SQRT_HALF, -_SQRT_HALF]),
        },
        evolution=np.eye(2),
        finals={"up": basis_state(2, 0), "down": basis_state(2, 1)},
    )


def penrose_unitary() -> np.ndarray:
    """半镀银镜的四模式幺正演化

    每个入射模式被等幅地分到透射和反射两路，反射获得因子 i：
        U|灯⟩ = (|探测器⟩ + i|墙⟩)/√2
        U|探测器⟩ = (|灯⟩ + i|对面墙⟩)/√2
        U|墙⟩ = (|对面墙⟩ + i|灯⟩)/√2
        U|对面墙⟩ = (|墙⟩ + i|探测器⟩)/√2
    {灯, 对面墙} → {探测器, 墙} 的子块为 (1/√2)[[1, i], [i, 1]]。
    """
    u = np.zeros((4, 4), dtype=np.complex128)
    u[DETECTOR, LAMP], u[WALL, LAMP] = 1, 1j
    u[LAMP, DETECTOR], u[OPPOSITE_WALL, DETECTOR] = 1, 1j
    u[OPPOSITE_WALL, WALL], u[LAMP, WALL] = 1, 1j
    u[WALL, OPPOSITE_WALL], u[DETECTOR, OPPOSITE_WALL] = 1, 1j
    return u * _SQRT_HALF


def penrose() -> Scenario:
    """Penrose 镜面实验：光子由灯发出，经半镀银镜后到达探测器或被墙吸收"""
    return Scenario(
        label="penrose",
        initials={"alpha_1": basis_state(4, LAMP), "alpha_2": basis_state(4, OPPOSITE_WALL)},
        evolution=penrose_unitary(),
        finals={"beta_1": basis_state(4, DETECTOR), "beta_2": basis_state(4, WALL)},
    )


def penrose_rotation() -> np.ndarray:
    """装置绕轴旋转 180°：灯与探测器互换，两面墙互换"""
    perm = [DETECTOR, LAMP, OPPOSITE_WALL, WALL]
    v = np.zeros((4, 4), dtype=np.complex128)
    v[perm, np.arange(4)] = 1.0
    return v


def three_outcome() -> Scenario:
    """c² = (1/2, 1/4, 1/4) 的三结果现象"""
    return Scenario(
        label="three_outcome",
        initials={"psi": make_state([np.sqrt(0.5), 0.5, 0.5])},
        evolution=np.eye(3),
        finals={f"b{i + 1}": basis_state(3, i) for i in range(3)},
    )


def identity() -> Scenario:
    """U = I，初态就是某个终态，过程完全确定"""
    return Scenario(
        label="identity",
        initials={"beta_1": basis_state(2, 0), "beta_2": basis_state(2, 1)},
        evolution=np.eye(2),
        finals={"beta_1": basis_state(2, 0), "beta_2": basis_state(2, 1)},
    )


BUILTIN_SCENARIOS: Dict[str, Callable[[], Scenario]] = {
    "stern_gerlach": stern_gerlach,
    "penrose": penrose,
    "three_outcome": three_outcome,
    "identity": identity,
}


def get_scenario(name_or_path: str) -> Scenario:
    """按名称取内置场景，否则当作 JSON 文件路径读取"""
    if name_or_path in BUILTIN_SCENARIOS:
        return BUILTIN_SCENARIOS[name_or_path]()
    if name_or_path.endswith(".json") or os.path.sep in name_or_path:
        return load_scenario(name_or_path)
    raise UnknownLabel(
        f"unknown scenario {name_or_path!r}; built-ins are {', '.join(sorted(BUILTIN_SCENARIOS))}"
    )


def scenario_from_dict(data: dict) -> Scenario:
    """从 JSON 对象构造场景

    Raises:
        SchemaError: 缺少字段或字段结构错误
    """
    data = parse_json_object(data, "scenario")
    missing = [k for k in ("label", "dim", "initials", "unitary", "finals", "labels") if k not in data]
    if missing:
        raise SchemaError(f"scenario is missing fields: {', '.join(missing)}")
    if not isinstance(data["initials"], dict):
        raise SchemaError("scenario 'initials' must map names to amplitude lists")
    if len(data["labels"]) != len(data["finals"]):
        raise SchemaError("scenario 'labels' and 'finals' differ in length")

    dim = int(data["dim"])
    unitary = decode_complex(data["unitary"])
    if unitary.shape != (dim, dim):
        raise SchemaError(f"scenario 'unitary' must be {dim}x{dim}, got {unitary.shape}")
    initials = {name: make_state(decode_complex(amps)) for name, amps in data["initials"].items()}
    finals = {
        str(name): make_state(decode_complex(amps))
        for name, amps in zip(data["labels"], data["finals"])
    }
    return Scenario(label=str(data["label"]), initials=initials, evolution=unitary, finals=finals)


def scenario_to_dict(sc: Scenario) -> dict:
    return {
        "label": sc.label,
        "dim": sc.dim,
        "initials": {name: encode_complex(s.amplitudes) for name, s in sc.initials.items()},
        "unitary": encode_complex(sc.evolution),
        "finals": [encode_complex(s.amplitudes) for s in sc.finals.values()],
        "labels": sc.final_labels,
    }


def load_scenario(path: str) -> Scenario:
    """读取 JSON 场景文件

    Raises:
        FileNotFound: 文件不存在
        SchemaError: JSON 无法解析或结构错误
    """
    if not os.path.exists(path):
        raise FileNotFound(f"scenario file not found: {path}")
    with open(path, "r", encoding="utf-8") as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"scenario file {path} is not valid JSON: {exc}") from exc
    logger.debug("loaded scenario %s from %s", data.get("label") if isinstance(data, dict) else "?", path)
    return scenario_from_dict(data)


def dump_scenario(sc: Scenario, path: str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(scenario_to_dict(sc), f, ensure_ascii=False, indent=2)
