"""
联络场
预设闭式场与网格采样场的分量求值、统一联络 Γ_μ 的组装，以及挠率/曲率/场强的有限差分

分量数组按批量点求值：
    θ[N, μ, a]      焊接形式 θ_μ^a
    ω[N, μ, a, b]   自旋联络 ω_μ^a_b（矩阵形式，η ω 反对称）
    A[N, μ, k]      规范势 A^k_μ（k 为表示目录中的规范生成元下标）
"""
import json
import logging
import os
from typing import Callable, Dict, Optional, Tuple

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from lawless.config import LawlessConfig, get_config
from lawless.errors import (
    DimensionMismatch,
    FileNotFound,
    InvalidParameter,
    NonDifferentiable,
    OutOfChart,
    SchemaError,
)
from lawless.models import ConnectionField, FieldStrengths, GroupCatalog, GroupSpec, parse_json_object
from lawless.runtime.groups import ETA, build_group

logger = logging.getLogger(__name__)

Components = Dict[str, np.ndarray]
_GAUGE_SIZES = {"U1": 1, "SU2": 3, "SU3": 8}


def lorentz_matrix(a: int, b: int) -> np.ndarray:
    """Lorentz 代数元 E_ab − η_aa η_bb E_ba（4×4 实矩阵）"""
    m = np.zeros((4, 4))
    m[a, b] += 1.0
    m[b, a] -= ETA[a, a] * ETA[b, b]
    return m


# ==================== 预设 ====================

def _zero(params: dict, pts: np.ndarray) -> Components:
    return {}


def _u1_constant(params: dict, pts: np.ndarray) -> Components:
    d = pts.shape[1]
    value = np.zeros(d)
    given = np.asarray(params.get("A", [1.0]), dtype=np.float64)
    value[:min(d, given.size)] = given[:d]
    return {"U1": np.broadcast_to(value[None, :, None], (pts.shape[0], d, 1)).copy()}


def _u1_linear(params: dict, pts: np.ndarray) -> Components:
    """A_y = B·x，F_xy = B"""
    a = np.zeros((pts.shape[0], pts.shape[1], 1))
    a[:, 1, 0] = float(params.get("B", 1.0)) * pts[:, 0]
    return {"U1": a}


def _u1_bump(params: dict, pts: np.ndarray) -> Components:
    """A_x = amp·exp(−|x − c|²/w²)（只依赖前两个坐标）"""
    amp = float(params.get("amp", 1.0))
    width = float(params.get("width", 1.0))
    center = np.asarray(params.get("center", [0.0, 0.0]), dtype=np.float64)
    r2 = np.sum((pts[:, :2] - center) ** 2, axis=1)
    a = np.zeros((pts.shape[0], pts.shape[1], 1))
    a[:, 0, 0] = amp * np.exp(-r2 / width ** 2)
    return {"U1": a}


def _solenoid_geometry(params: dict) -> Tuple[float, float, np.ndarray]:
    flux = float(params.get("flux", np.pi))
    radius = float(params.get("radius", 0.5))
    center = np.asarray(params.get("center", [0.0, 0.0]), dtype=np.float64)
    if radius <= 0:
        raise InvalidParameter("solenoid radius must be positive")
    return flux, radius, center


def _solenoid(params: dict, pts: np.ndarray) -> Components:
    """无限长螺线管：芯内均匀场，芯外 A = (Φ/2π) dφ"""
    flux, radius, center = _solenoid_geometry(params)
    rel = pts[:, :2] - center
    r2 = np.sum(rel ** 2, axis=1)
    scale = np.where(r2 >= radius ** 2, flux / (2 * np.pi * np.maximum(r2, 1e-300)), flux / (2 * np.pi * radius ** 2))
    a = np.zeros((pts.shape[0], pts.shape[1], 1))
    a[:, 0, 0] = -rel[:, 1] * scale
    a[:, 1, 0] = rel[:, 0] * scale
    return {"U1": a}


def _solenoid_singular(params: dict, x: np.ndarray, h: float) -> bool:
    _, radius, center = _solenoid_geometry(params)
    r = float(np.linalg.norm(x[:2] - center))
    return abs(r - radius) <= 2.5 * h


def _su2_constant(params: dict, pts: np.ndarray) -> Components:
    d = pts.shape[1]
    default = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]
    table = np.zeros((d, 3))
    given = np.asarray(params.get("A", default), dtype=np.float64)
    table[:min(d, given.shape[0])] = given[:d]
    return {"SU2": np.broadcast_to(table[None], (pts.shape[0], d, 3)).copy()}


def _su2_smooth(params: dict, pts: np.ndarray) -> Components:
    """光滑非阿贝尔势，只用前两个坐标"""
    amp = float(params.get("amp", 0.8))
    x, y = pts[:, 0], pts[:, 1]
    a = np.zeros((pts.shape[0], pts.shape[1], 3))
    a[:, 0] = amp * np.stack([np.cos(y), 0.5 * np.sin(x), 0.3 * y], axis=1)
    a[:, 1] = amp * np.stack([0.4 * x, np.cos(x + 0.5 * y), np.sin(y)], axis=1)
    return {"SU2": a}


def _flat_solder(params: dict, pts: np.ndarray) -> Components:
    d = pts.shape[1]
    theta = np.zeros((pts.shape[0], d, 4))
    theta[:, np.arange(d), np.arange(d)] = 1.0
    return {"theta": theta}


def _torsion(params: dict, pts: np.ndarray) -> Components:
    """带挠率的焊接形式 θ^1_1 = 1 + τ x^0，配合常数自旋联络

    默认 ω_0 ∝ L_12、ω_1 ∝ L_13，两者不对易，曲率非零。
    也可通过 params["omega"] 直接给出 (d, 4, 4) 常数表。
    """
    d = pts.shape[1]
    tau = float(params.get("tau", 0.3))
    rot = float(params.get("rot", 0.5))
    theta = np.zeros((pts.shape[0], d, 4))
    theta[:, np.arange(d), np.arange(d)] = 1.0
    theta[:, 1, 1] += tau * pts[:, 0]

    if "omega" in params:
        table = np.asarray(params["omega"], dtype=np.float64)
        if table.shape != (d, 4, 4):
            raise InvalidParameter(f"omega table must have shape ({d}, 4, 4)")
    else:
        table = np.zeros((d, 4, 4))
        table[0] = rot * lorentz_matrix(1, 2)
        table[1] = rot * lorentz_matrix(1, 3)
    omega = np.broadcast_to(table[None], (pts.shape[0], d, 4, 4)).copy()
    return {"theta": theta, "omega": omega}


PRESETS: Dict[str, Callable[[dict, np.ndarray], Components]] = {
    "zero": _zero,
    "u1_constant": _u1_constant,
    "u1_linear": _u1_linear,
    "u1_bump": _u1_bump,
    "solenoid": _solenoid,
    "su2_constant": _su2_constant,
    "su2_smooth": _su2_smooth,
    "flat_solder": _flat_solder,
    "torsion": _torsion,
}


# ==================== 网格采样场 ====================

def _sampled_interpolator(params: dict, d: int) -> Tuple[str, RegularGridInterpolator, np.ndarray]:
    """params: {"kind": "U1"|"SU2"|"SU3", "axes": [...], "values": 形状 grid + (d, n_gen), "method": "linear"}"""
    kind = str(params.get("kind", "U1")).upper()
    if kind not in _GAUGE_SIZES:
        raise SchemaError(f"sampled field kind must be one of {sorted(_GAUGE_SIZES)}")
    try:
        axes = [np.asarray(ax, dtype=np.float64) for ax in params["axes"]]
        values = np.asarray(params["values"], dtype=np.float64)
    except KeyError as exc:
        raise SchemaError(f"sampled field is missing {exc}") from exc
    if len(axes) != d or values.shape != tuple(len(ax) for ax in axes) + (d, _GAUGE_SIZES[kind]):
        raise SchemaError("sampled field values do not match the axes and chart dimension")
    interp = RegularGridInterpolator(axes, values, method=params.get("method", "linear"), bounds_error=True)
    spacing = np.array([np.min(np.diff(ax)) for ax in axes])
    return kind, interp, spacing


def _sampled_components(field: ConnectionField, pts: np.ndarray) -> Components:
    kind, interp, _ = _sampled_interpolator(field.params, field.chart_dim)
    try:
        return {kind: interp(pts)}
    except ValueError as exc:
        raise NonDifferentiable(f"sampled field evaluated outside its grid: {exc}") from exc


# ==================== 求值与组装 ====================

def check_chart(field: ConnectionField, pts: np.ndarray) -> None:
    box = field.box
    if field.preset == "sampled":
        axes = field.params.get("axes", [])
        box = np.array([[min(ax), max(ax)] for ax in axes]) if axes else box
    inside = np.all((pts >= box[:, 0] - 1e-12) & (pts <= box[:, 1] + 1e-12), axis=1)
    if not np.all(inside):
        bad = pts[np.argmin(inside)]
        raise OutOfChart(f"point {bad.tolist()} lies outside the chart {box.tolist()}")


def raw_components(field: ConnectionField, pts: np.ndarray) -> Components:
    """预设返回的原始分量（规范势按因子类型分组）"""
    if field.preset == "sampled":
        return _sampled_components(field, pts)
    try:
        preset = PRESETS[field.preset]
    except KeyError as exc:
        raise SchemaError(
            f"unknown field preset {field.preset!r}; choose one of {', '.join(sorted(PRESETS))} or sampled"
        ) from exc
    return preset(field.params, pts)


def field_components(
    field: ConnectionField,
    catalog: GroupCatalog,
    points: np.ndarray,
    in_chart: bool = True,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """批量求 (θ, ω, A)，规范势映射到目录的生成元下标

    Raises:
        OutOfChart: 点不在坐标卡内
        DimensionMismatch: 点的维数与坐标卡不符
        InvalidParameter: 预设需要的群因子不存在
    """
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    if pts.shape[1] != field.chart_dim:
        raise DimensionMismatch(f"points have {pts.shape[1]} coordinates, chart has {field.chart_dim}")
    if in_chart:
        check_chart(field, pts)
    raw = raw_components(field, pts)
    n, d = pts.shape

    theta = np.zeros((n, d, 4))
    omega = np.zeros((n, d, 4, 4))
    gauge = np.zeros((n, d, catalog.gauge.shape[0]))
    if ("theta" in raw or "omega" in raw) and not catalog.has_spacetime:
        raise InvalidParameter(f"preset {field.preset!r} needs a LORENTZ or POINCARE factor")
    if "theta" in raw:
        theta = raw["theta"]
    if "omega" in raw:
        omega = raw["omega"]
    for kind in _GAUGE_SIZES:
        if kind not in raw:
            continue
        if kind not in catalog.gauge_slots:
            raise InvalidParameter(f"preset {field.preset!r} needs a {kind} factor")
        lo, hi = catalog.gauge_slots[kind]
        gauge[:, :, lo:hi] = raw[kind]
    return theta, omega, gauge


def validate_field(field: ConnectionField, spec: GroupSpec) -> None:
    """预设校验：ω 在 η 升降指标后关于标架指标反对称"""
    catalog = build_group(spec)
    center = field.box.mean(axis=1)
    if field.preset == "sampled":
        return
    _, omega, _ = field_components(field, catalog, center[None, :])
    lowered = np.einsum("ac,mcb->mab", ETA, omega[0])
    if np.max(np.abs(lowered + np.swapaxes(lowered, 1, 2))) > 1e-12:
        raise InvalidParameter("spin connection is not antisymmetric with the Minkowski metric")


def assemble_connection(
    catalog: GroupCatalog,
    theta: np.ndarray,
    omega: np.ndarray,
    gauge: np.ndarray,
) -> np.ndarray:
    """Γ_μ = θ_μ^a P_a + ½ ω_μ^a_b M^b_a − A^k_μ T_k，返回形状 (N, d, D, D)"""
    n, d = gauge.shape[:2]
    gamma = -np.einsum("nmk,kij->nmij", gauge, catalog.gauge)
    if catalog.translations is not None:
        gamma = gamma + np.einsum("nma,aij->nmij", theta, catalog.translations)
    if catalog.lorentz is not None:
        gamma = gamma + 0.5 * np.einsum("nmab,baij->nmij", omega, catalog.lorentz)
    return gamma.reshape(n, d, catalog.dim, catalog.dim)


def connection_batch(field: ConnectionField, catalog: GroupCatalog, points: np.ndarray) -> np.ndarray:
    theta, omega, gauge = field_components(field, catalog, points)
    return assemble_connection(catalog, theta, omega, gauge)


def connection_at(field: ConnectionField, spec: GroupSpec, x) -> np.ndarray:
    """在点 x 处的 Γ_μ，形状 (d, D, D)

    Raises:
        OutOfChart: x 不在坐标卡内
    """
    catalog = build_group(spec)
    return connection_batch(field, catalog, np.asarray(x, dtype=np.float64)[None, :])[0]


# ==================== 场强 ====================

def _derivatives(
    field: ConnectionField,
    catalog: GroupCatalog,
    x: np.ndarray,
    h: float,
    fourth_order: bool,
) -> Tuple[Tuple[np.ndarray, ...], float]:
    """中心差分 ∂_μ (θ, ω, A)，返回 ([μ, ...] 形状的导数, 误差估计)"""
    d = x.shape[0]
    offsets = np.array([-2, -1, 1, 2], dtype=np.float64)
    stencil = x[None, None, :] + offsets[None, :, None] * h * np.eye(d)[:, None, :]
    values = field_components(field, catalog, stencil.reshape(-1, d), in_chart=False)

    derivs, error = [], 0.0
    for comp in values:
        comp = comp.reshape((d, 4) + comp.shape[1:])
        m2, m1, p1, p2 = comp[:, 0], comp[:, 1], comp[:, 2], comp[:, 3]
        second = (p1 - m1) / (2 * h)
        # 步长 2h 的二阶格式，用于估计误差
        coarse = (p2 - m2) / (4 * h)
        if fourth_order:
            fourth = (-p2 + 8 * p1 - 8 * m1 + m2) / (12 * h)
            derivs.append(fourth)
            error = max(error, float(np.max(np.abs(fourth - second), initial=0.0)))
        else:
            derivs.append(second)
            error = max(error, float(np.max(np.abs(second - coarse), initial=0.0)) / 3.0)
    return tuple(derivs), error


def field_strengths(
    field: ConnectionField,
    spec: GroupSpec,
    x,
    h: Optional[float] = None,
    config: Optional[LawlessConfig] = None,
) -> FieldStrengths:
    """点 x 处的挠率、曲率与规范场强

        Q^a_μν = ∂_μ θ^a_ν − ∂_ν θ^a_μ + ω^a_{μ b} θ^b_ν − ω^a_{ν b} θ^b_μ
        R_μν   = ∂_μ ω_ν − ∂_ν ω_μ + ω_μ ω_ν − ω_ν ω_μ
        F^k_μν = ∂_μ A^k_ν − ∂_ν A^k_μ + C^k_mn A^m_μ A^n_ν

    预设场用四阶中心差分（步长 LAWLESS_FD_STEP），采样场用网格间距的二阶中心差分。

    Raises:
        OutOfChart: x 不在坐标卡内
        NonDifferentiable: x 靠近场的不可微位置
    """
    config = config or get_config()
    catalog = build_group(spec)
    point = np.asarray(x, dtype=np.float64).reshape(-1)
    if point.shape[0] != field.chart_dim:
        raise DimensionMismatch(f"point has {point.shape[0]} coordinates, chart has {field.chart_dim}")
    check_chart(field, point[None, :])

    sampled = field.preset == "sampled"
    if sampled:
        _, _, spacing = _sampled_interpolator(field.params, field.chart_dim)
        step = h if h is not None else float(spacing.min())
    else:
        step = h if h is not None else config.fd_step
        if field.preset == "solenoid" and _solenoid_singular(field.params, point, 2 * step):
            raise NonDifferentiable("point is on the solenoid core boundary")

    theta, omega, gauge = field_components(field, catalog, point[None, :])
    theta, omega, gauge = theta[0], omega[0], gauge[0]
    (d_theta, d_omega, d_gauge), error = _derivatives(field, catalog, point, step, fourth_order=not sampled)

    curl_theta = d_theta - np.swapaxes(d_theta, 0, 1)
    omega_theta = np.einsum("mab,nb->mna", omega, theta)
    torsion = curl_theta + omega_theta - np.swapaxes(omega_theta, 0, 1)

    curl_omega = d_omega - np.swapaxes(d_omega, 0, 1)
    products = np.einsum("mac,ncb->mnab", omega, omega)
    curvature = curl_omega + products - np.swapaxes(products, 0, 1)

    curl_gauge = d_gauge - np.swapaxes(d_gauge, 0, 1)
    field_strength = curl_gauge + np.einsum("kmn,am,bn->abk", catalog.structure, gauge, gauge)

    return FieldStrengths(torsion=torsion, curvature=curvature, field=field_strength, error_estimate=error)


# ==================== 文件 ====================

def field_from_dict(data: dict) -> Tuple[ConnectionField, GroupSpec]:
    """{chart_dim, factors, preset, parameters[, chart]} → (ConnectionField, GroupSpec)"""
    data = parse_json_object(data, "field preset")
    missing = [k for k in ("chart_dim", "factors", "preset") if k not in data]
    if missing:
        raise SchemaError(f"field preset is missing fields: {', '.join(missing)}")
    spec = GroupSpec(factors=data["factors"])
    field = ConnectionField(
        chart_dim=int(data["chart_dim"]),
        preset=str(data["preset"]),
        params=dict(data.get("parameters", {})),
        chart=data.get("chart"),
    )
    validate_field(field, spec)
    return field, spec


def load_field(path: str) -> Tuple[ConnectionField, GroupSpec]:
    """读取 JSON 场预设文件

    Raises:
        FileNotFound: 文件不存在
        SchemaError: JSON 结构错误
    """
    if not os.path.exists(path):
        raise FileNotFound(f"field file not found: {path}")
    with open(path, "r", encoding="utf-8") as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"field file {path} is not valid JSON: {exc}") from exc
    logger.debug("loaded field preset from %s", path)
    return field_from_dict(data)
