"""
态空间几何
射线语义下的纯态构造、Fubini-Study 距离、跃迁概率与测地线中点
"""
import logging
from typing import Optional, Sequence

import numpy as np
from scipy.stats import unitary_group

from lawless.errors import AmbiguousMidpoint, DimensionMismatch, InvalidParameter, ZeroVector
from lawless.models import PureState
from lawless.numerics import as_complex_vector, stack_states

logger = logging.getLogger(__name__)

# |⟨ψ|ψ'⟩| 与 1 的差在此范围内视为同一射线
RAY_TOLERANCE = 1e-12


def make_state(amplitudes: Sequence[complex]) -> PureState:
    """归一化并固定相位规范

    第一个非零振幅被旋转为正实数，使同一射线只有一个代表。

    Args:
        amplitudes: 复振幅序列

    Returns:
        PureState

    Raises:
        EmptyInput: 序列为空
        ZeroVector: 范数 ≤ 1e−12
        InvalidParameter: 振幅含 NaN 或无穷
    """
    vec = as_complex_vector(amplitudes)
    norm = float(np.linalg.norm(vec))
    if not np.isfinite(norm):
        raise InvalidParameter("amplitudes must be finite")
    if norm <= 1e-12:
        raise ZeroVector(f"cannot normalize vector with norm {norm:.3e}")
    vec = vec / norm
    nonzero = np.flatnonzero(np.abs(vec) > 0)
    lead = vec[nonzero[0]]
    vec = vec * (abs(lead) / lead)
    # 领头分量严格取实
    vec[nonzero[0]] = abs(lead)
    return PureState(amplitudes=vec)


def random_state(dim: int, rng: Optional[np.random.Generator] = None) -> PureState:
    """Haar 随机纯态"""
    rng = rng if rng is not None else np.random.default_rng()
    vec = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return make_state(vec)


def random_unitary(dim: int, rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """Haar 随机幺正矩阵"""
    return unitary_group.rvs(dim, random_state=rng)


def _check_dims(s1: PureState, s2: PureState) -> None:
    if s1.dim != s2.dim:
        raise DimensionMismatch(f"dimensions differ: {s1.dim} vs {s2.dim}")


def overlap(s1: PureState, s2: PureState) -> complex:
    """⟨s1|s2⟩"""
    _check_dims(s1, s2)
    return complex(np.vdot(s1.amplitudes, s2.amplitudes))


def ray_equal(s1: PureState, s2: PureState) -> bool:
    return abs(overlap(s1, s2)) >= 1 - RAY_TOLERANCE


def _distance_from_overlap(mod: np.ndarray) -> np.ndarray:
    mod = np.clip(mod, 0.0, 1.0)
    dist = 2.0 * np.arccos(mod)
    return np.where(mod >= 1 - RAY_TOLERANCE, 0.0, dist)


def fs_distance(s1: PureState, s2: PureState) -> float:
    """Fubini-Study 距离 s，满足 cos(s/2) = |⟨ψ|ψ'⟩|，取值 [0, π]

    Raises:
        DimensionMismatch: 维度不一致
    """
    return float(_distance_from_overlap(np.asarray(abs(overlap(s1, s2)))))


def pairwise_distances(states: Sequence[PureState]) -> np.ndarray:
    """一组等维态两两之间的 Fubini-Study 距离矩阵"""
    mat = stack_states([s.amplitudes for s in states])
    gram = np.abs(mat.conj() @ mat.T)
    dist = _distance_from_overlap(gram)
    np.fill_diagonal(dist, 0.0)
    return dist


def transition_probability(s1: PureState, s2: PureState) -> float:
    """|⟨ψ|ψ'⟩|²，等于 cos²(s/2)"""
    return float(min(abs(overlap(s1, s2)) ** 2, 1.0))


def geodesic_midpoint(s1: PureState, s2: PureState) -> PureState:
    """两态之间最短测地线的中点

    把 s2 的相位对齐使 ⟨s1|s2⟩ 为正实数，再取归一化的和。

    Raises:
        DimensionMismatch: 维度不一致
        AmbiguousMidpoint: 两态正交，测地线不唯一
    """
    z = overlap(s1, s2)
    if abs(z) <= RAY_TOLERANCE:
        raise AmbiguousMidpoint("orthogonal states have infinitely many connecting geodesics")
    aligned = s2.amplitudes * (np.conj(z) / abs(z))
    mid = make_state(s1.amplitudes + aligned)
    logger.debug("midpoint distance %.3e from each endpoint", fs_distance(mid, s1))
    return mid


def apply_unitary(state: PureState, unitary: np.ndarray) -> PureState:
    """U|ψ⟩（返回规范化后的射线代表）"""
    if unitary.shape[0] != state.dim:
        raise DimensionMismatch(f"unitary has dimension {unitary.shape[0]}, state {state.dim}")
    return make_state(unitary @ state.amplitudes)


def basis_state(dim: int, index: int) -> PureState:
    vec = np.zeros(dim, dtype=np.complex128)
    vec[index] = 1.0
    return PureState(amplitudes=vec)


def basis_distances(state: PureState) -> np.ndarray:
    """态到每个标准基矢的 Fubini-Study 距离"""
    return _distance_from_overlap(np.abs(state.amplitudes))
