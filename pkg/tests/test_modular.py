"""
测试模变量：双波包、模动量期望值、动量矩与规范不变的动力学模动量
"""
import numpy as np
import pytest

from lawless.errors import DomainTooSmall, InvalidParameter, MomentTooHigh, OverlapViolation
from lawless.models import PacketSpec
from lawless.runtime.modular import (
    gauge_transform_packet,
    kinetic_translation_expectation,
    make_packet,
    make_two_packet,
    modular_exchange_report,
    momentum_moment,
    snap_shift,
    translation_expectation,
)

PROFILE = PacketSpec(sigma=1.0, sep=16.0, grid=1024, length=64.0)


def test_two_packet_overlap_is_negligible():
    """ℓ = 16σ 时重叠约为 e^{-32}"""
    psi = make_two_packet(PROFILE)
    assert 0.0 < psi.overlap <= 2e-14
    assert np.sum(np.abs(psi.samples) ** 2) * psi.dx == pytest.approx(1.0, abs=1e-12)


def test_two_packet_rejects_bad_geometry():
    with pytest.raises(OverlapViolation):
        make_two_packet(PROFILE, sep=0.1)
    with pytest.raises(DomainTooSmall):
        make_two_packet(PROFILE, length=40.0)
    with pytest.raises(DomainTooSmall):
        make_two_packet(PROFILE, grid=64)
    with pytest.raises(InvalidParameter):
        PacketSpec(grid=1000)


def test_translation_expectation_of_two_packet():
    """⟨exp(ipℓ)⟩ = ½ e^{iα}"""
    assert translation_expectation(make_two_packet(PROFILE, alpha=0.0), 16.0) == pytest.approx(0.5, abs=1e-10)
    assert translation_expectation(make_two_packet(PROFILE, alpha=np.pi / 2), 16.0) == pytest.approx(0.5j, abs=1e-10)
    assert translation_expectation(make_two_packet(PROFILE), 0.0) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("alpha", [0.0, np.pi / 2, np.pi, 2.3])
def test_translation_expectation_follows_relative_phase(alpha):
    """一般相位 α 下 ⟨exp(ipℓ)⟩ = ½ e^{iα}，反向平移给出复共轭"""
    psi = make_two_packet(PROFILE, alpha=alpha)
    forward = translation_expectation(psi, 16.0)
    assert abs(forward - 0.5 * np.exp(1j * alpha)) <= 1e-6
    assert translation_expectation(psi, -16.0) == pytest.approx(np.conj(forward), abs=1e-14)


def test_translation_expectation_is_bounded():
    """|⟨exp(ipℓ)⟩| ≤ 1，包括不在网格上的 ℓ"""
    psi = make_two_packet(PROFILE, alpha=2.3)
    for ell in np.linspace(-40.0, 40.0, 37):
        assert abs(translation_expectation(psi, float(ell))) <= 1.0 + 1e-12


def test_translation_expectation_under_grid_refinement():
    """网格加密到 2048 点结果不变"""
    coarse = translation_expectation(make_two_packet(PROFILE, alpha=2.3), 16.0)
    fine = translation_expectation(make_two_packet(PROFILE, alpha=2.3, grid=2048), 16.0)
    assert abs(fine - coarse) <= 1e-10


def test_translation_expectation_reports_snap():
    """ℓ 不在网格上时返回对齐偏移"""
    psi = make_two_packet(PROFILE)
    value, snap = translation_expectation(psi, 16.03, return_snap=True)
    assert snap == pytest.approx(0.03, abs=1e-12)
    assert value == pytest.approx(translation_expectation(psi, 16.0), abs=1e-15)
    assert translation_expectation(psi, 16.0, return_snap=True)[1] == 0.0


def test_translation_expectation_of_single_packet():
    single = make_packet(PROFILE)
    assert abs(translation_expectation(single, 16.0)) < 1e-10


def test_snap_shift_on_grid():
    psi = make_packet(PROFILE)
    assert snap_shift(psi, 16.0) == (256, 0.0)
    shift, snap = snap_shift(psi, 16.01)
    assert shift == 256
    assert snap == pytest.approx(0.01)


def test_momentum_moments_of_gaussian():
    """实高斯 ⟨p⟩ = 0，⟨p²⟩ = 1/(4σ²)"""
    psi = make_packet(PROFILE)
    assert momentum_moment(psi, 1) == pytest.approx(0.0, abs=1e-12)
    assert momentum_moment(psi, 2) == pytest.approx(0.25, abs=1e-10)
    with pytest.raises(MomentTooHigh):
        momentum_moment(psi, 7)
    with pytest.raises(InvalidParameter):
        momentum_moment(psi, 0)


def test_modular_exchange_at_pi():
    """α = π：模动量改变 −1，动量矩全部不变"""
    psi0 = make_two_packet(PROFILE)
    report = modular_exchange_report(psi0, np.pi, nmax=4)
    assert report.delta_translation == pytest.approx(-1.0, abs=1e-10)
    assert report.deviation <= 1e-10
    assert report.snap == 0.0
    assert sorted(report.moment_deltas) == [1, 2, 3, 4]
    assert all(abs(d) <= 1e-9 for d in report.moment_deltas.values())


def test_modular_exchange_general_phase():
    report = modular_exchange_report(make_two_packet(PROFILE), 0.9, nmax=2)
    assert report.expected_delta == pytest.approx(0.5 * (np.exp(0.9j) - 1.0))
    assert report.deviation <= 1e-10


def test_modular_exchange_needs_reference_state():
    with pytest.raises(InvalidParameter):
        modular_exchange_report(make_two_packet(PROFILE, alpha=0.3), np.pi)
    with pytest.raises(InvalidParameter):
        modular_exchange_report(make_packet(PROFILE), np.pi)


def test_kinetic_modular_momentum_is_gauge_invariant():
    """ψ → e^{iχ}ψ 且 A → A + χ' 时动力学模动量不变"""
    psi = make_two_packet(PROFILE, alpha=0.4)
    x = psi.x
    k = 2 * np.pi / psi.length
    potential = 0.3 + 0.2 * np.cos(k * x)
    chi = 0.7 * np.sin(k * x)
    dchi = 0.7 * k * np.cos(k * x)

    before = kinetic_translation_expectation(psi, 16.0, potential)
    after = kinetic_translation_expectation(gauge_transform_packet(psi, chi), 16.0, potential + dchi)
    assert after == pytest.approx(before, abs=1e-10)


def test_kinetic_modular_momentum_without_potential():
    psi = make_two_packet(PROFILE, alpha=1.1)
    plain = translation_expectation(psi, 16.0)
    assert kinetic_translation_expectation(psi, 16.0, np.zeros(psi.grid)) == pytest.approx(plain, abs=1e-14)
    with pytest.raises(InvalidParameter):
        kinetic_translation_expectation(psi, 16.0, np.zeros(10))
