"""
李代数表示目录
u(1)、su(2)、su(3)、Lorentz 与仿射 Poincaré 生成元，直和拼装，结构常数校验，以及复结构分解

约定：
- Minkowski 度规 η = diag(1, −1, −1, −1)
- P_a = i E_{a,4}（5×5 仿射表示）
- M^b_a = −i (E_ab − η_aa η_bb E_ba)，使 ½ ω^a_b M^b_a = −i ω
- U(1) 生成元为 1×1 矩阵 [−e]，联络中的 −A T 给出 exp(−ie∫A)
"""
import logging
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import null_space
from scipy.optimize import linear_sum_assignment

from lawless.errors import DoesNotCommute, InvalidParameter, NonIntegralCharge, NotComplexStructure, ToleranceExceeded
from lawless.models import FactorSpec, GroupCatalog, GroupSpec

logger = logging.getLogger(__name__)

ETA = np.diag([1.0, -1.0, -1.0, -1.0])
STRUCTURE_TOL = 1e-12
CHARGE_TOL = 1e-6
MAX_CHARGE = 64

_REP_DIM = {"U1": 1, "SU2": 2, "SU3": 3, "LORENTZ": 4, "POINCARE": 5}


def _unit(dim: int, i: int, j: int) -> np.ndarray:
    e = np.zeros((dim, dim), dtype=np.complex128)
    e[i, j] = 1.0
    return e


def su2_generators() -> np.ndarray:
    """自旋 ½ 表示 J_i = σ_i / 2"""
    sx = np.array([[0, 1], [1, 0]], dtype=np.complex128)
    sy = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
    sz = np.array([[1, 0], [0, -1]], dtype=np.complex128)
    return np.stack([sx, sy, sz]) / 2.0


def su3_generators() -> np.ndarray:
    """标准 Gell-Mann 矩阵 λ_a / 2，a = 1..8"""
    lam = np.zeros((8, 3, 3), dtype=np.complex128)
    pairs = [(0, 1), (0, 2), (1, 2)]
    # λ1, λ2 | λ4, λ5 | λ6, λ7 为各对角对的对称/反对称组合
    for slot, (j, k) in zip((0, 3, 5), pairs):
        lam[slot, j, k] = lam[slot, k, j] = 1.0
        lam[slot + 1, j, k], lam[slot + 1, k, j] = -1j, 1j
    lam[2] = np.diag([1.0, -1.0, 0.0])
    lam[7] = np.diag([1.0, 1.0, -2.0]) / np.sqrt(3.0)
    return lam / 2.0


def su2_structure() -> np.ndarray:
    """Levi-Civita ε_ijk，以 [k, m, n] 存储"""
    eps = np.zeros((3, 3, 3))
    for (i, j, k), sign in (((0, 1, 2), 1), ((1, 2, 0), 1), ((2, 0, 1), 1),
                            ((0, 2, 1), -1), ((2, 1, 0), -1), ((1, 0, 2), -1)):
        eps[k, i, j] = sign
    return eps


def su3_structure() -> np.ndarray:
    """su(3) 的全反对称结构常数 f_abc，以 [c, a, b] 存储"""
    table = {
        (1, 2, 3): 1.0,
        (1, 4, 7): 0.5, (1, 5, 6): -0.5,
        (2, 4, 6): 0.5, (2, 5, 7): 0.5,
        (3, 4, 5): 0.5, (3, 6, 7): -0.5,
        (4, 5, 8): np.sqrt(3.0) / 2.0, (6, 7, 8): np.sqrt(3.0) / 2.0,
    }
    f = np.zeros((8, 8, 8))
    for (a, b, c), value in table.items():
        a, b, c = a - 1, b - 1, c - 1
        for (x, y, z), sign in (((a, b, c), 1), ((b, c, a), 1), ((c, a, b), 1),
                                ((b, a, c), -1), ((a, c, b), -1), ((c, b, a), -1)):
            f[z, x, y] = sign * value
    return f


def lorentz_generators(dim: int) -> np.ndarray:
    """M^b_a 嵌入 dim×dim 的左上 4×4 块，以 [b, a] 存储"""
    m = np.zeros((4, 4, dim, dim), dtype=np.complex128)
    for a in range(4):
        for b in range(4):
            m[b, a] = -1j * (_unit(dim, a, b) - ETA[a, a] * ETA[b, b] * _unit(dim, b, a))
    return m


def translation_generators() -> np.ndarray:
    """仿射表示中的 P_a = i E_{a,4}"""
    return np.stack([1j * _unit(5, a, 4) for a in range(4)])


def compute_structure_constants(generators: np.ndarray) -> Tuple[np.ndarray, float]:
    """由对易子最小二乘求解 [T_m, T_n] = i C^k_mn T_k

    Returns:
        (C[k, m, n], 闭合残差)
    """
    count = generators.shape[0]
    basis = generators.reshape(count, -1).T
    structure = np.zeros((count, count, count))
    residual = 0.0
    for m in range(count):
        for n in range(count):
            comm = generators[m] @ generators[n] - generators[n] @ generators[m]
            target = (-1j * comm).reshape(-1)
            coef, *_ = np.linalg.lstsq(basis, target, rcond=None)
            residual = max(residual, float(np.max(np.abs(basis @ coef - target))))
            structure[:, m, n] = coef.real
            residual = max(residual, float(np.max(np.abs(coef.imag))))
    return structure, residual


def _declared_structure(kind: str) -> np.ndarray:
    if kind == "U1":
        return np.zeros((1, 1, 1))
    if kind == "SU2":
        return su2_structure()
    return su3_structure()


def _factor_generators(factor: FactorSpec) -> np.ndarray:
    if factor.kind == "U1":
        return np.array([[[-factor.charge]]], dtype=np.complex128)
    if factor.kind == "SU2":
        return su2_generators()
    return su3_generators()


def _check_spacetime(lorentz: np.ndarray, translations: Optional[np.ndarray]) -> None:
    """Lorentz（及平移）生成元在对易子下闭合，平移彼此对易"""
    independent = [lorentz[b, a] for a in range(4) for b in range(a + 1, 4)]
    if translations is not None:
        for a in range(4):
            for b in range(4):
                comm = translations[a] @ translations[b] - translations[b] @ translations[a]
                if np.max(np.abs(comm)) > STRUCTURE_TOL:
                    raise ToleranceExceeded("translation generators do not commute")
        independent += list(translations)
    _, residual = compute_structure_constants(np.stack(independent))
    if residual > STRUCTURE_TOL:
        raise ToleranceExceeded(f"spacetime generators do not close (residual {residual:.2e})")


@lru_cache(maxsize=32)
def build_group(spec: GroupSpec) -> GroupCatalog:
    """生成直和表示中的全部生成元，并校验对易关系

    Args:
        spec: 群因子列表

    Returns:
        GroupCatalog

    Raises:
        UnsupportedFactor: 因子类型不受支持（在 GroupSpec 构造时抛出）
        ToleranceExceeded: 对易子与声明的结构常数不符
    """
    blocks: List[Tuple[str, int, int]] = []
    start = 0
    for factor in spec.factors:
        size = _REP_DIM[factor.kind]
        blocks.append((factor.kind, start, size))
        start += size
    dim = start

    gauge: List[np.ndarray] = []
    labels: List[str] = []
    slots: Dict[str, Tuple[int, int]] = {}
    structures: List[np.ndarray] = []
    translations = lorentz = None

    for index, (factor, (kind, offset, size)) in enumerate(zip(spec.factors, blocks)):
        if kind in ("LORENTZ", "POINCARE"):
            local_l = lorentz_generators(size)
            local_p = translation_generators() if kind == "POINCARE" else None
            _check_spacetime(local_l, local_p)
            lorentz = np.zeros((4, 4, dim, dim), dtype=np.complex128)
            lorentz[..., offset:offset + size, offset:offset + size] = local_l
            if local_p is not None:
                translations = np.zeros((4, dim, dim), dtype=np.complex128)
                translations[:, offset:offset + size, offset:offset + size] = local_p
            continue

        local = _factor_generators(factor)
        computed, residual = compute_structure_constants(local)
        declared = _declared_structure(kind)
        if residual > STRUCTURE_TOL or np.max(np.abs(computed - declared)) > STRUCTURE_TOL:
            raise ToleranceExceeded(f"{kind} commutators do not reproduce the declared structure constants")

        first = len(gauge)
        for k, gen in enumerate(local):
            embedded = np.zeros((dim, dim), dtype=np.complex128)
            embedded[offset:offset + size, offset:offset + size] = gen
            gauge.append(embedded)
            labels.append(f"{kind}[{index}].{k + 1}")
        slots.setdefault(kind, (first, len(gauge)))
        structures.append(declared)

    count = len(gauge)
    structure = np.zeros((count, count, count))
    offset = 0
    for c in structures:
        n = c.shape[0]
        structure[offset:offset + n, offset:offset + n, offset:offset + n] = c
        offset += n

    logger.debug("built group %s: dim=%d, %d gauge generators", spec.tag, dim, count)
    return GroupCatalog(
        spec=spec,
        dim=dim,
        blocks=tuple(blocks),
        gauge=np.stack(gauge) if gauge else np.zeros((0, dim, dim), dtype=np.complex128),
        gauge_labels=tuple(labels),
        gauge_slots=slots,
        structure=structure,
        translations=translations,
        lorentz=lorentz,
    )


def _charges_for_angle(phases: np.ndarray, angle: float) -> np.ndarray:
    """由折叠到 (−π, π] 的相位恢复整数荷：q·φ = p + 2πk，取 |q| 最小的整数解

    Raises:
        NonIntegralCharge: 某个相位在 |q| ≤ MAX_CHARGE 内没有整数解
    """
    reach = int(np.ceil(MAX_CHARGE * abs(angle) / (2 * np.pi))) + 1
    shifts = 2 * np.pi * np.arange(-reach, reach + 1)
    q = (phases[:, None] + shifts[None, :]) / angle
    rounded = np.rint(q)
    admissible = (np.abs(q - rounded) <= CHARGE_TOL) & (np.abs(rounded) <= MAX_CHARGE)
    if not np.all(admissible.any(axis=1)):
        bad = phases[~admissible.any(axis=1)]
        raise NonIntegralCharge(
            f"phases {np.round(bad, 6).tolist()} are not integral multiples of {angle:g} (mod 2π)"
        )
    magnitude = np.where(admissible, np.abs(rounded), np.inf)
    return rounded[np.arange(len(phases)), np.argmin(magnitude, axis=1)].astype(np.int64)


def _matches(eigenvalues: np.ndarray, charges: np.ndarray, angle: float) -> bool:
    """e^{iqφ} 与样本本征值作为多重集是否一致"""
    predicted = np.exp(1j * charges * angle)
    cost = np.abs(predicted[:, None] - eigenvalues[None, :])
    rows, cols = linear_sum_assignment(cost)
    return bool(np.max(cost[rows, cols]) <= CHARGE_TOL)


def complex_structure_decompose(
    samples: Sequence[np.ndarray],
    X: np.ndarray,
    angles: Optional[Sequence[float]] = None,
) -> List[int]:
    """用复结构 X 把实表示复化，读出每个不变平面的整数荷

    在 X 的 +i 本征子空间上限制每个样本，其本征值为 e^{iqφ}。
    给出 angles 时直接用 φ 求荷；否则以相位最小的样本确定基本角。
    |qφ| > π 的相位按 2π 展开后再取整，荷的绝对值不超过 MAX_CHARGE。

    Args:
        samples: 实矩阵群元样本（如 exp(φ X_gen)）
        X: 实矩阵，X² = −I
        angles: 可选，每个样本对应的群参数 φ

    Returns:
        升序排列的整数荷列表

    Raises:
        NotComplexStructure: X² ≠ −I
        DoesNotCommute: X 与某个样本不对易
        NonIntegralCharge: 分解得到非整数荷
    """
    x = np.asarray(X, dtype=np.float64)
    size = x.shape[0]
    if x.shape != (size, size) or size % 2:
        raise NotComplexStructure("complex structure must be an even-dimensional square matrix")
    if np.max(np.abs(x @ x + np.eye(size))) > 1e-10:
        raise NotComplexStructure("X² differs from −I")
    mats = [np.asarray(g, dtype=np.float64) for g in samples]
    if not mats:
        raise InvalidParameter("no representation samples supplied")
    for g in mats:
        if g.shape != x.shape:
            raise InvalidParameter(f"sample shape {g.shape} does not match X {x.shape}")
        if np.max(np.abs(g @ x - x @ g)) > 1e-10:
            raise DoesNotCommute("X does not commute with every representation sample")

    # +i 本征子空间的正交归一基，复化后的表示即限制矩阵
    basis = null_space(x - 1j * np.eye(size))
    eigenvalues = [np.linalg.eigvals(basis.conj().T @ g @ basis) for g in mats]
    phases = [np.angle(ev) for ev in eigenvalues]

    if angles is not None:
        if len(angles) != len(mats):
            raise InvalidParameter("one angle per sample is required")
        usable = [i for i, a in enumerate(angles) if abs(a) > 1e-12]
        if not usable:
            raise InvalidParameter("all sample angles are zero")
        # 角度最小的样本折叠最少，用它定荷，其余样本逐一核对
        pivot = min(usable, key=lambda i: abs(angles[i]))
        charges = _charges_for_angle(phases[pivot], float(angles[pivot]))
        for ev, a in zip(eigenvalues, angles):
            if not _matches(ev, charges, float(a)):
                raise NonIntegralCharge("samples disagree on the charge assignment")
    else:
        spans = [np.max(np.abs(p)) for p in phases]
        best = phases[int(np.argmin([s if s > 1e-12 else np.inf for s in spans]))]
        nonzero = np.abs(best)[np.abs(best) > 1e-12]
        if nonzero.size == 0:
            return [0] * basis.shape[1]
        charges = _charges_for_angle(best, float(nonzero.min()))

    result = sorted(int(q) for q in charges)
    logger.debug("complex structure charges %s", result)
    return result
