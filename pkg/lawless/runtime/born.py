"""
Born 概率推导
平方系数的有理划分、辅助系统展开、等距检查，以及分支等概率汇总为 c_i²

分母搜索按块向量化：先用 dist(p_i·M, ℤ) ≤ eps·M 过滤候选 M，再对通过者做最大余数修正。
"""
import logging
from typing import Optional, Sequence, Tuple

import numpy as np

from lawless.config import LawlessConfig, get_config
from lawless.errors import InvalidParameter, LengthMismatch, TooTight, ToleranceExceeded
from lawless.models import AuxiliaryExpansion, BornInstance, BornResult, PureState, RationalPartition
from lawless.runtime.geometry import (
    basis_distances,
    basis_state,
    make_state,
    pairwise_distances,
    transition_probability,
)

logger = logging.getLogger(__name__)

_SEARCH_BLOCK = 1 << 16


def born_instance_from_probabilities(probs: Sequence[float]) -> BornInstance:
    """由目标概率构造系数 c_i = √p_i"""
    p = np.asarray(probs, dtype=np.float64).reshape(-1)
    if np.any(p <= 0):
        raise InvalidParameter("probabilities must be strictly positive")
    return BornInstance(coefficients=np.sqrt(p))


def _validate_probs(probs: Sequence[float]) -> np.ndarray:
    p = np.asarray(probs, dtype=np.float64).reshape(-1)
    if p.size == 0:
        raise InvalidParameter("probability sequence is empty")
    if np.any(~np.isfinite(p)) or np.any(p <= 0):
        raise InvalidParameter("probabilities must be finite and strictly positive")
    if abs(float(p.sum()) - 1.0) > 1e-12:
        raise InvalidParameter(f"probabilities sum to {float(p.sum())!r}, expected 1 within 1e-12")
    return p


def _largest_remainder(p: np.ndarray, M: int) -> np.ndarray:
    """按最大余数法把 p·M 取整，保证 Σn = M 且每个 n_i ≥ 1"""
    scaled = p * M
    n = np.floor(scaled).astype(np.int64)
    deficit = M - int(n.sum())
    if deficit > 0:
        order = np.argsort(-(scaled - n), kind="stable")
        n[order[:deficit]] += 1
    elif deficit < 0:
        order = np.argsort(scaled - n, kind="stable")
        n[order[:-deficit]] -= 1

    # 零份数补到 1，再从超出最多的分量扣回
    zeros = n < 1
    if np.any(zeros):
        excess = int(np.sum(1 - n[zeros]))
        n[zeros] = 1
        for _ in range(excess):
            over = np.where(n > 1, n - scaled, -np.inf)
            n[int(np.argmax(over))] -= 1
    return n


def rational_partition(
    probs: Sequence[float],
    eps: float,
    config: Optional[LawlessConfig] = None,
) -> RationalPartition:
    """寻找最小的 M 使 c_i² ≈ n_i/M 的误差不超过 eps

    Args:
        probs: 正概率序列，和为 1
        eps: 允许的最大误差
        config: 运行配置，提供分母上限 m_cap

    Returns:
        RationalPartition

    Raises:
        InvalidParameter: 概率或 eps 非法
        TooTight: M 超过上限仍未满足 eps
    """
    p = _validate_probs(probs)
    if not eps > 0:
        raise InvalidParameter(f"eps must be positive, got {eps!r}")
    cap = (config or get_config()).m_cap

    start = len(p)
    for block_start in range(start, cap + 1, _SEARCH_BLOCK):
        Ms = np.arange(block_start, min(block_start + _SEARCH_BLOCK, cap + 1), dtype=np.float64)
        scaled = np.outer(Ms, p)
        dist = np.abs(scaled - np.rint(scaled))
        candidates = Ms[np.all(dist <= eps * Ms[:, None], axis=1)]
        for M in candidates.astype(np.int64).tolist():
            n = _largest_remainder(p, M)
            residual = float(np.max(np.abs(p - n / M)))
            if residual <= eps:
                logger.debug("rational partition M=%d residual=%.3e", M, residual)
                return RationalPartition(n=n, M=M, residual=residual)
    raise TooTight(f"no denominator up to {cap} reaches eps={eps:g}; loosen eps or raise LAWLESS_M_CAP")


def auxiliary_expansion(inst: BornInstance, part: RationalPartition) -> AuxiliaryExpansion:
    """把第 i 个分量拆成 n_i 个系数 c_i/√n_i 的分支

    近似相等的上界为 2·residual·√M。

    Raises:
        LengthMismatch: 划分长度与系数个数不一致
    """
    if part.n.shape[0] != inst.dim:
        raise LengthMismatch(f"partition has {part.n.shape[0]} entries, instance has {inst.dim}")
    owner = np.repeat(np.arange(inst.dim), part.n)
    coefficients = (inst.coefficients / np.sqrt(part.n))[owner]
    gap = float(coefficients.max() - coefficients.min())
    bound = 2.0 * part.residual * np.sqrt(part.M)
    return AuxiliaryExpansion(coefficients=coefficients, owner=owner, bound=bound, max_gap=gap)


def check_equidistance(exp: AuxiliaryExpansion) -> Tuple[float, float]:
    """组合态到每个正交分支态的 Fubini-Study 距离

    分支态是维数 Σn_i 空间中的标准基，组合态系数即分支系数。

    Returns:
        (平均距离 θ, 最大最小差)
    """
    combined = exp.coefficients / np.linalg.norm(exp.coefficients)
    distances = basis_distances(PureState(amplitudes=combined))
    return float(distances.mean()), float(distances.max() - distances.min())


def derive_probabilities(
    inst: BornInstance,
    eps: float = 1e-12,
    config: Optional[LawlessConfig] = None,
) -> BornResult:
    """有理划分 → 辅助展开 → 分支等概率 → 汇总 p_i = n_i/M

    Args:
        inst: 系数实例
        eps: 有理逼近精度
        config: 运行配置

    Returns:
        BornResult，p 与 bound 满足 |p_i − c_i²| ≤ bound ≤ eps

    Raises:
        TooTight: 由 rational_partition 传出
        ToleranceExceeded: 推导结果与跃迁概率不符
    """
    squares = inst.coefficients ** 2
    # 允许 1e-12 以内的归一化误差
    probs = squares / squares.sum()
    part = rational_partition(probs, eps, config)
    expansion = auxiliary_expansion(inst, part)
    theta, spread = check_equidistance(expansion)

    branch_probability = 1.0 / part.M
    # 每个分支等概率，第 i 个分量拥有 n_i 个分支
    p = np.bincount(expansion.owner, minlength=inst.dim) / part.M
    bound = float(np.max(np.abs(p - squares)))

    psi = make_state(inst.coefficients)
    transition = np.array([
        transition_probability(psi, basis_state(inst.dim, i)) for i in range(inst.dim)
    ])
    slack = abs(1.0 - float(squares.sum())) + 1e-15
    if bound > eps + slack or np.any(np.abs(p - transition) > bound + slack):
        raise ToleranceExceeded(
            f"derived probabilities deviate from |⟨ψ|ψ_i⟩|² beyond the bound {bound:.3e}"
        )
    return BornResult(
        p=p,
        bound=bound,
        partition=part,
        expansion=expansion,
        theta=theta,
        spread=spread,
        branch_probability=branch_probability,
        transition=transition,
    )


def phase_invariance_check(
    inst: BornInstance,
    phases: Sequence[float],
    eps: float = 1e-12,
    config: Optional[LawlessConfig] = None,
) -> bool:
    """给分支乘上相位 e^{iφ_i} 后，距离与推导结果是否都不变

    Raises:
        LengthMismatch: 相位个数与系数个数不一致
    """
    phi = np.asarray(phases, dtype=np.float64).reshape(-1)
    if phi.shape[0] != inst.dim:
        raise LengthMismatch(f"{phi.shape[0]} phases for {inst.dim} coefficients")

    dim = inst.dim
    factors = np.exp(1j * phi)
    plain = [make_state(inst.coefficients)] + [basis_state(dim, i) for i in range(dim)]
    phased = [make_state(inst.coefficients * factors)]
    phased += [make_state(np.eye(dim)[i] * factors[i]) for i in range(dim)]
    distances_same = bool(
        np.max(np.abs(pairwise_distances(plain) - pairwise_distances(phased))) <= 1e-12
    )

    before = derive_probabilities(inst, eps, config)
    moduli = np.abs(inst.coefficients * factors)
    after = derive_probabilities(BornInstance(coefficients=moduli), eps, config)
    same_result = (
        np.array_equal(before.p, after.p)
        and np.array_equal(before.partition.n, after.partition.n)
        and before.partition.M == after.partition.M
    )
    return distances_same and same_result
