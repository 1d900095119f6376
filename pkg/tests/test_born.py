"""
测试 Born 概率推导：有理划分、辅助展开、等距性与相位不变性
"""
import numpy as np
import pytest

from lawless.config import LawlessConfig
from lawless.errors import InvalidParameter, LengthMismatch, TooTight
from lawless.models import BornInstance, RationalPartition
from lawless.runtime.born import (
    auxiliary_expansion,
    born_instance_from_probabilities,
    check_equidistance,
    derive_probabilities,
    phase_invariance_check,
    rational_partition,
)


def test_partition_of_exact_rationals():
    """(0.3, 0.7) → n = (3, 7)，M = 10"""
    part = rational_partition([0.3, 0.7], 1e-12)
    assert part.M == 10
    assert part.n.tolist() == [3, 7]
    assert part.residual <= 1e-15


def test_partition_of_equal_halves():
    part = rational_partition([0.5, 0.5], 0.1)
    assert part.M == 2
    assert part.n.tolist() == [1, 1]


def test_partition_of_irrational_is_minimal():
    """1/π 的划分：残差在容差内，且没有更小的 M 满足容差"""
    p = np.array([1 / np.pi, 1 - 1 / np.pi])
    part = rational_partition(p, 1e-3)
    assert part.n.sum() == part.M
    assert np.max(np.abs(part.n / part.M - p)) <= 1e-3
    for M in range(2, part.M):
        n0 = np.rint(p[0] * M)
        best = max(abs(n0 / M - p[0]), abs((M - n0) / M - p[1]))
        assert best > 1e-3 or n0 < 1 or n0 >= M


def test_partition_residual_shrinks_with_tolerance():
    """容差逐个数量级收紧时残差不增，且始终在容差内"""
    p = np.array([1 / np.pi, 1 - 1 / np.pi])
    previous = np.inf
    for k in range(1, 9):
        eps = 10.0 ** -k
        part = rational_partition(p, eps)
        assert part.residual <= eps
        assert part.residual <= previous
        previous = part.residual


def test_partition_rejects_bad_input():
    with pytest.raises(InvalidParameter):
        rational_partition([0.3, 0.6], 1e-6)
    with pytest.raises(InvalidParameter):
        rational_partition([0.0, 1.0], 1e-6)
    with pytest.raises(InvalidParameter):
        rational_partition([0.5, 0.5], 0.0)


def test_partition_too_tight():
    """分母上限内无法达到容差时报 TooTight"""
    config = LawlessConfig(m_cap=50)
    with pytest.raises(TooTight):
        rational_partition([1 / np.pi, 1 - 1 / np.pi], 1e-9, config=config)


def test_auxiliary_expansion_exact():
    """(√0.3, √0.7) 与 (3, 7) → 十个系数都是 1/√10"""
    inst = BornInstance(coefficients=[np.sqrt(0.3), np.sqrt(0.7)])
    exp = auxiliary_expansion(inst, RationalPartition(n=[3, 7], M=10, residual=0.0))
    assert exp.total_branches == 10
    assert np.allclose(exp.coefficients, 1 / np.sqrt(10), atol=1e-15)
    assert exp.owner.tolist() == [0] * 3 + [1] * 7
    assert exp.table()[(1, 7)] == pytest.approx(1 / np.sqrt(10))


def test_auxiliary_expansion_length_mismatch():
    inst = BornInstance(coefficients=[np.sqrt(0.3), np.sqrt(0.7)])
    with pytest.raises(LengthMismatch):
        auxiliary_expansion(inst, RationalPartition(n=[1, 1, 1], M=3, residual=0.0))


def test_auxiliary_expansion_irrational_within_bound():
    inst = born_instance_from_probabilities([1 / np.pi, 1 - 1 / np.pi])
    part = rational_partition(inst.coefficients ** 2, 1e-3)
    exp = auxiliary_expansion(inst, part)
    assert exp.max_gap <= exp.bound


def test_equidistance_of_equal_branches():
    """两个等系数分支 θ = π/2，四个等系数分支 θ = 2π/3"""
    two = auxiliary_expansion(
        BornInstance(coefficients=[np.sqrt(0.5), np.sqrt(0.5)]),
        RationalPartition(n=[1, 1], M=2, residual=0.0),
    )
    theta, spread = check_equidistance(two)
    assert theta == pytest.approx(np.pi / 2, abs=1e-12)
    assert spread <= 1e-12

    four = auxiliary_expansion(
        BornInstance(coefficients=[0.5, np.sqrt(0.75)]),
        RationalPartition(n=[1, 3], M=4, residual=0.0),
    )
    theta, spread = check_equidistance(four)
    assert theta == pytest.approx(2 * np.pi / 3, abs=1e-12)
    assert spread <= 1e-12


def test_equidistance_of_irrational_expansion():
    inst = born_instance_from_probabilities([1 / np.pi, 1 - 1 / np.pi])
    exp = auxiliary_expansion(inst, rational_partition(inst.coefficients ** 2, 1e-3))
    _, spread = check_equidistance(exp)
    assert spread <= 5e-3


def test_derive_probabilities_examples():
    """推导结果等于平方系数"""
    half = derive_probabilities(BornInstance(coefficients=[np.sqrt(0.5), np.sqrt(0.5)]))
    assert half.p.tolist() == [0.5, 0.5]
    assert half.bound <= 1e-15

    result = derive_probabilities(BornInstance(coefficients=[0.6, 0.8]))
    assert np.allclose(result.p, [0.36, 0.64], atol=1e-15)
    assert result.partition.M == 25
    assert result.branch_probability == pytest.approx(1 / 25)

    third = derive_probabilities(born_instance_from_probabilities([1 / 3, 1 / 3, 1 / 3]))
    assert third.partition.n.tolist() == [1, 1, 1]
    assert third.partition.M == 3
    assert np.allclose(third.p, 1 / 3, atol=1e-15)


def test_derive_matches_transition_probabilities():
    """p_i 与 |⟨ψ|ψ_i⟩|² 的差不超过报告的上界"""
    rng = np.random.default_rng(2)
    c = rng.uniform(0.2, 1.0, size=4)
    inst = BornInstance(coefficients=c / np.linalg.norm(c))
    result = derive_probabilities(inst, eps=1e-4)
    assert result.bound <= 1e-4 + 1e-15
    assert np.all(np.abs(result.p - result.transition) <= result.bound + 1e-12)
    assert result.p.sum() == pytest.approx(1.0, abs=1e-15)


def test_derive_many_random_instances():
    """100 个随机实例（维数 2 到 8）都落在各自的上界之内"""
    rng = np.random.default_rng(2024)
    for _ in range(100):
        dim = int(rng.integers(2, 9))
        c = rng.uniform(0.05, 1.0, size=dim)
        inst = BornInstance(coefficients=c / np.linalg.norm(c))
        result = derive_probabilities(inst, eps=1e-4)
        assert result.bound <= 1e-4 + 1e-15
        assert np.all(np.abs(result.p - inst.coefficients ** 2) <= result.bound + 1e-15)


@pytest.mark.parametrize("N", range(2, 17))
def test_equal_coefficients_are_equidistant(N):
    """N 个等系数分支满足 N·cos²(θ/2) = 1"""
    result = derive_probabilities(BornInstance(coefficients=np.full(N, 1 / np.sqrt(N))))
    assert result.partition.M == N
    assert N * np.cos(result.theta / 2) ** 2 == pytest.approx(1.0, abs=1e-10)
    assert result.spread <= 1e-10


def test_phase_invariance():
    """分支相位不改变距离与推导结果"""
    inst = BornInstance(coefficients=[np.sqrt(0.5), np.sqrt(0.5)])
    assert phase_invariance_check(inst, [0.0, 0.0])
    assert phase_invariance_check(inst, [0.0, np.pi])

    rng = np.random.default_rng(9)
    c = rng.uniform(0.3, 1.0, size=5)
    random_inst = BornInstance(coefficients=c / np.linalg.norm(c))
    assert phase_invariance_check(random_inst, rng.uniform(0, 2 * np.pi, size=5), eps=1e-3)

    with pytest.raises(LengthMismatch):
        phase_invariance_check(inst, [0.0])
