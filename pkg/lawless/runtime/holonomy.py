"""
和乐引擎
统一联络沿折线曲线的路径序指数、小回路展开检查、规范协变检查与电磁相因子

约定：g_γ = P exp(−i ∫ Γ_μ dx^μ)，后走的子段乘在左边；每条折线边分 n 个子段，中点取值。
"""
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from functools import partial
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.integrate import quad
from scipy.linalg import expm

from lawless.config import LawlessConfig, get_config
from lawless.errors import DimensionMismatch, FileNotFound, InvalidParameter, NotClosed, SchemaError
from lawless.models import (
    ConnectionField,
    Curve,
    GaugeTransform,
    GroupCatalog,
    GroupElement,
    GroupSpec,
    HolonomyResult,
    PhaseFactor,
    SmallLoopReport,
)
from lawless.numerics import matrix_norm
from lawless.runtime.fields import check_chart, connection_batch, field_strengths, raw_components
from lawless.runtime.groups import build_group

logger = logging.getLogger(__name__)

Connection = Callable[[np.ndarray], np.ndarray]
Blocks = Tuple[Tuple[str, int, int], ...]


def _fix_affine(mat: np.ndarray, blocks: Blocks) -> None:
    """仿射 Poincaré 块的最后一行恒为 (0, ..., 0, 1)，原地覆盖舍入误差"""
    for kind, start, size in blocks:
        if kind == "POINCARE":
            last = start + size - 1
            mat[..., last, :] = 0.0
            mat[..., last, last] = 1.0


def path_ordered_exponential(
    connection: Connection,
    curve: Curve,
    steps: int,
    blocks: Blocks = (),
) -> np.ndarray:
    """任意矩阵值联络的中点规则路径序积

    Args:
        connection: 批量求值函数，点 (N, d) → Γ (N, d, D, D)
        curve: 折线曲线
        steps: 每条边的子段数
        blocks: 表示的直和块，用于固定仿射行

    Returns:
        D×D 复矩阵
    """
    if steps < 1:
        raise InvalidParameter(f"steps must be at least 1, got {steps}")
    fractions = (np.arange(steps) + 0.5) / steps
    g = None
    for head, tail in zip(curve.vertices[:-1], curve.vertices[1:]):
        delta = tail - head
        gamma = connection(head + fractions[:, None] * delta)
        if g is None:
            g = np.eye(gamma.shape[-1], dtype=np.complex128)
        factors = expm(-1j * np.einsum("nmij,m->nij", gamma, delta / steps))
        _fix_affine(factors, blocks)
        for factor in factors:
            g = factor @ g
            _fix_affine(g, blocks)
    return g


def _field_connection(field: ConnectionField, catalog: GroupCatalog) -> Connection:
    return partial(connection_batch, field, catalog)


def _check_curve(field: ConnectionField, curve: Curve) -> None:
    if curve.dim != field.chart_dim:
        raise DimensionMismatch(f"curve lives in {curve.dim} dimensions, chart has {field.chart_dim}")
    check_chart(field, curve.vertices)


def _richardson(
    connection: Connection,
    curve: Curve,
    steps: int,
    blocks: Blocks,
    config: LawlessConfig,
) -> Tuple[np.ndarray, float]:
    """在 n 与 2n 步下积分，二阶格式的误差估计为 4/3 ‖g_n − g_2n‖"""
    if steps < 1:
        raise InvalidParameter(f"steps must be at least 1, got {steps}")
    run = partial(path_ordered_exponential, connection, curve, blocks=blocks)
    if config.parallel_workers > 1:
        with ThreadPoolExecutor(max_workers=2) as pool:
            coarse, fine = pool.map(run, (steps, 2 * steps))
    else:
        coarse, fine = run(steps), run(2 * steps)
    return coarse, 4.0 / 3.0 * matrix_norm(coarse - fine)


def holonomy(
    field: ConnectionField,
    spec: GroupSpec,
    curve: Curve,
    steps: Optional[int] = None,
    config: Optional[LawlessConfig] = None,
) -> HolonomyResult:
    """沿曲线的和乐 g_γ

    Args:
        field: 联络场
        spec: 群因子
        curve: 折线曲线
        steps: 每条边的子段数，缺省取 LAWLESS_HOLONOMY_STEPS

    Returns:
        HolonomyResult（n 步的群元与 Richardson 误差估计）

    Raises:
        OutOfChart: 曲线离开坐标卡
    """
    config = config or get_config()
    n = steps if steps is not None else config.holonomy_steps
    catalog = build_group(spec)
    _check_curve(field, curve)
    g, error = _richardson(_field_connection(field, catalog), curve, n, catalog.blocks, config)
    logger.debug("holonomy over %d edges, n=%d, error estimate %.3e", len(curve.vertices) - 1, n, error)
    element = GroupElement(matrix=g, representation=spec.tag, blocks=catalog.blocks)
    return HolonomyResult(element=element, error_estimate=error, steps=n)


def square_loop(x: Sequence[float], plane: Tuple[int, int], a: float) -> Curve:
    """以 x 为起点、在 (μ, ν) 坐标平面内逆时针走一圈的正方形，边长 a"""
    base = np.asarray(x, dtype=np.float64)
    mu, nu = _check_plane(plane, base.shape[0])
    if a <= 0:
        raise InvalidParameter(f"loop side must be positive, got {a}")
    e_mu = np.zeros_like(base)
    e_nu = np.zeros_like(base)
    e_mu[mu] = a
    e_nu[nu] = a
    return Curve(vertices=[base, base + e_mu, base + e_mu + e_nu, base + e_nu, base])


def _check_plane(plane: Tuple[int, int], d: int) -> Tuple[int, int]:
    if len(plane) != 2:
        raise InvalidParameter(f"plane must name exactly two coordinates, got {plane}")
    mu, nu = (int(i) for i in plane)
    if mu == nu or not (0 <= mu < d and 0 <= nu < d):
        raise InvalidParameter(f"plane {plane} must name two distinct coordinates in 0..{d - 1}")
    return mu, nu


def linear_predictor(catalog: GroupCatalog, strengths, plane: Tuple[int, int], a: float) -> np.ndarray:
    """小回路的一阶预测 I + i(F^k T_k − Q^a P_a − ½ R^a_b M^b_a) a²"""
    mu, nu = plane
    generator = np.einsum("k,kij->ij", strengths.field[mu, nu], catalog.gauge)
    if catalog.translations is not None:
        generator = generator - np.einsum("a,aij->ij", strengths.torsion[mu, nu], catalog.translations)
    if catalog.lorentz is not None:
        generator = generator - 0.5 * np.einsum("ab,baij->ij", strengths.curvature[mu, nu], catalog.lorentz)
    return np.eye(catalog.dim, dtype=np.complex128) + 1j * a ** 2 * generator


def small_loop_check(
    field: ConnectionField,
    spec: GroupSpec,
    x: Sequence[float],
    plane: Tuple[int, int],
    a: float,
    steps: Optional[int] = None,
    config: Optional[LawlessConfig] = None,
) -> SmallLoopReport:
    """比较小正方形回路的和乐与由场强给出的线性预测

    残差为 O(a³)。

    Raises:
        OutOfChart: 回路离开坐标卡
        NonDifferentiable: x 处场不可微
    """
    config = config or get_config()
    base = np.asarray(x, dtype=np.float64)
    plane = _check_plane(plane, field.chart_dim)
    curve = square_loop(base, plane, a)
    catalog = build_group(spec)
    g_loop = holonomy(field, spec, curve, steps=steps or config.loop_steps, config=config).element.matrix
    predicted = linear_predictor(catalog, field_strengths(field, spec, base, config=config), plane, a)
    residual = matrix_norm(g_loop - predicted)
    logger.debug("small loop at %s plane %s a=%g: residual %.3e", base.tolist(), plane, a, residual)
    return SmallLoopReport(
        x=tuple(float(v) for v in base),
        plane=plane,
        a=float(a),
        g_loop=g_loop,
        predicted=predicted,
        residual=residual,
    )


# ==================== 规范变换 ====================

def _gauge_algebra(h: GaugeTransform, catalog: GroupCatalog, d: int) -> np.ndarray:
    """X_μ = Σ_k c_μk T_k，形状 (d, D, D)"""
    coefficients = h.coefficients
    if coefficients.shape != (d, catalog.gauge.shape[0]):
        raise DimensionMismatch(
            f"gauge transform needs a ({d}, {catalog.gauge.shape[0]}) coefficient table, got {coefficients.shape}"
        )
    return np.einsum("mk,kij->mij", coefficients, catalog.gauge)


def gauge_matrices(h: GaugeTransform, catalog: GroupCatalog, points: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """批量求 h(x) = expm(i x^μ X_μ) 及其导数 ∂_μ h

    导数取块矩阵 [[Z, E], [0, Z]] 指数的右上块（指数映射的 Fréchet 导数）。

    Returns:
        (h (N, D, D), ∂h (N, d, D, D))
    """
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    n, d = pts.shape
    size = catalog.dim
    algebra = _gauge_algebra(h, catalog, d)
    z = 1j * np.einsum("nm,mij->nij", pts, algebra)

    block = np.zeros((n, d, 2 * size, 2 * size), dtype=np.complex128)
    block[..., :size, :size] = z[:, None]
    block[..., size:, size:] = z[:, None]
    block[..., :size, size:] = 1j * algebra[None]
    exp_block = expm(block.reshape(n * d, 2 * size, 2 * size)).reshape(n, d, 2 * size, 2 * size)
    return exp_block[:, 0, :size, :size], exp_block[..., :size, size:]


def transformed_connection(field: ConnectionField, catalog: GroupCatalog, h: GaugeTransform) -> Connection:
    """Γ'_μ = h Γ_μ h⁻¹ + i (∂_μ h) h⁻¹"""
    base = _field_connection(field, catalog)

    def connection(points: np.ndarray) -> np.ndarray:
        gamma = base(points)
        hx, dh = gauge_matrices(h, catalog, points)
        h_inv = np.linalg.inv(hx)
        rotated = np.einsum("nij,nmjk,nkl->nmil", hx, gamma, h_inv)
        return rotated + 1j * np.einsum("nmij,njk->nmik", dh, h_inv)

    return connection


def gauge_covariance_check(
    field: ConnectionField,
    spec: GroupSpec,
    h: GaugeTransform,
    curve: Curve,
    steps: Optional[int] = None,
    config: Optional[LawlessConfig] = None,
) -> float:
    """‖g' − h(end) g h(start)⁻¹‖，g' 为变换后联络的和乐

    Raises:
        OutOfChart: 曲线离开坐标卡
        DimensionMismatch: 规范变换系数表与联络不符
    """
    config = config or get_config()
    n = steps if steps is not None else config.holonomy_steps
    catalog = build_group(spec)
    _check_curve(field, curve)
    g = path_ordered_exponential(_field_connection(field, catalog), curve, n, catalog.blocks)
    g_prime = path_ordered_exponential(transformed_connection(field, catalog, h), curve, n, catalog.blocks)
    ends, _ = gauge_matrices(h, catalog, np.stack([curve.start, curve.end]))
    expected = ends[1] @ g @ np.linalg.inv(ends[0])
    residual = matrix_norm(g_prime - expected)
    logger.debug("gauge covariance residual %.3e at n=%d", residual, n)
    return residual


# ==================== U(1) 相因子 ====================

def _turning_angles(curve: Curve, center: np.ndarray) -> np.ndarray:
    rel = curve.vertices[:, :2] - center
    if np.min(np.linalg.norm(rel, axis=1)) <= 1e-12:
        raise InvalidParameter("curve passes through the winding center")
    head, tail = rel[:-1], rel[1:]
    cross = head[:, 0] * tail[:, 1] - head[:, 1] * tail[:, 0]
    dot = np.sum(head * tail, axis=1)
    return np.arctan2(cross, dot)


def _segment_distance(curve: Curve, center: np.ndarray) -> float:
    """曲线各边到 center 的最小距离（前两个坐标）"""
    head, tail = curve.vertices[:-1, :2], curve.vertices[1:, :2]
    delta = tail - head
    length2 = np.maximum(np.sum(delta ** 2, axis=1), 1e-300)
    t = np.clip(np.sum((center - head) * delta, axis=1) / length2, 0.0, 1.0)
    nearest = head + t[:, None] * delta
    return float(np.min(np.linalg.norm(nearest - center, axis=1)))


def winding_number(curve: Curve, center: Sequence[float] = (0.0, 0.0)) -> int:
    """闭合曲线在前两个坐标平面内绕 center 的卷绕数

    每条边都不能穿过 center。
    """
    if not curve.is_closed():
        raise NotClosed("winding number needs a closed curve")
    c = np.asarray(center, dtype=np.float64)
    if _segment_distance(curve, c) <= 1e-12:
        raise InvalidParameter("curve passes through the winding center")
    return int(np.rint(np.sum(_turning_angles(curve, c)) / (2.0 * np.pi)))


def _line_integral(field: ConnectionField, curve: Curve) -> float:
    """∮A·dx，逐边自适应求积"""
    total = 0.0
    for head, tail in zip(curve.vertices[:-1], curve.vertices[1:]):
        delta = tail - head
        if not np.any(delta):
            continue

        def integrand(t: float) -> float:
            potential = raw_components(field, (head + t * delta)[None, :])["U1"][0, :, 0]
            return float(potential @ delta)

        value, _ = quad(integrand, 0.0, 1.0, epsabs=1e-13, epsrel=1e-12, limit=200)
        total += value
    return total


def u1_phase_factor(field: ConnectionField, charge: float, curve: Curve) -> PhaseFactor:
    """电磁相因子 exp(−ie∮A_μ dx^μ)

    螺线管预设在曲线全程位于芯外时用解析结果 ∮A = Φ·w。

    Raises:
        NotClosed: 曲线首尾不重合
        InvalidParameter: 场没有 U(1) 势
    """
    if not curve.is_closed():
        raise NotClosed("the phase factor needs a closed curve; endpoints differ")
    if curve.dim != field.chart_dim:
        raise DimensionMismatch(f"curve lives in {curve.dim} dimensions, chart has {field.chart_dim}")
    check_chart(field, curve.vertices)
    sample = raw_components(field, curve.vertices[:1])
    if "U1" not in sample:
        raise InvalidParameter(f"preset {field.preset!r} has no U(1) potential")

    winding = None
    if field.preset == "solenoid":
        flux = float(field.params.get("flux", np.pi))
        radius = float(field.params.get("radius", 0.5))
        center = np.asarray(field.params.get("center", [0.0, 0.0]), dtype=np.float64)
        winding = winding_number(curve, center)
        if _segment_distance(curve, center) > radius:
            integral = flux * winding
        else:
            logger.debug("curve enters the solenoid core; integrating numerically")
            integral = _line_integral(field, curve)
    else:
        integral = _line_integral(field, curve)

    value = complex(np.exp(-1j * charge * integral))
    logger.debug("phase factor e=%g: ∮A=%.12g -> %s", charge, integral, value)
    return PhaseFactor(value=value, line_integral=integral, winding=winding)


# ==================== 文件 ====================

def load_curve_csv(path: str) -> Curve:
    """读取顶点 CSV（每行一个顶点，每列一个坐标，带表头）

    Raises:
        FileNotFound: 文件不存在
        SchemaError: 非数值列或顶点不足
    """
    if not os.path.exists(path):
        raise FileNotFound(f"curve file not found: {path}")
    try:
        frame = pd.read_csv(path)
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as exc:
        raise SchemaError(f"curve file {path} is not a valid CSV: {exc}") from exc
    try:
        vertices = frame.to_numpy(dtype=np.float64)
    except ValueError as exc:
        raise SchemaError(f"curve file {path} has non-numeric columns") from exc
    if vertices.ndim != 2 or vertices.shape[0] < 2:
        raise SchemaError(f"curve file {path} needs at least two vertices")
    logger.debug("loaded %d vertices from %s", vertices.shape[0], path)
    return Curve(vertices=vertices)
