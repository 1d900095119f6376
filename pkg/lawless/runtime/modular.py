"""
模变量
周期一维网格上的双波包态、模动量 exp(ipℓ) 的期望值、动量矩以及 AB 模动量交换

约定：ħ = 1，p = −i d/dx，exp(ipℓ)ψ(x) = ψ(x+ℓ)。
"""
import logging
from typing import Optional, Tuple, Union

import numpy as np

from lawless.errors import DomainTooSmall, InvalidParameter, MomentTooHigh, OverlapViolation, ToleranceExceeded
from lawless.models import ModularReport, PacketSpec, WavePacketGrid

logger = logging.getLogger(__name__)

OVERLAP_LIMIT = 1e-8
MAX_MOMENT = 6
# 高斯波包支撑取 ±6σ
_SUPPORT_SIGMAS = 6.0


def _gaussian(x: np.ndarray, center: float, sigma: float, length: float) -> np.ndarray:
    """周期化（最小像距离）的高斯振幅，|f|² 的方差为 σ²"""
    d = np.mod(x - center + length / 2.0, length) - length / 2.0
    return (2.0 * np.pi * sigma ** 2) ** -0.25 * np.exp(-d ** 2 / (4.0 * sigma ** 2))


def _check_resolution(spec: PacketSpec) -> None:
    dx = spec.length / spec.grid
    if dx > spec.sigma / 2.0:
        raise DomainTooSmall(f"grid spacing {dx:g} exceeds sigma/2 = {spec.sigma / 2:g}; increase grid")


def _normalize(psi: np.ndarray, dx: float) -> np.ndarray:
    return psi / np.sqrt(np.sum(np.abs(psi) ** 2) * dx)


def make_packet(spec: PacketSpec) -> WavePacketGrid:
    """单个高斯波包

    Raises:
        DomainTooSmall: 区域放不下 ±6σ 支撑或分辨率不足
    """
    _check_resolution(spec)
    if spec.length < 2 * _SUPPORT_SIGMAS * spec.sigma:
        raise DomainTooSmall(f"domain length {spec.length:g} cannot hold a ±6σ packet")
    x = np.arange(spec.grid) * (spec.length / spec.grid)
    center = spec.center if spec.center is not None else spec.length / 2.0
    psi = _normalize(_gaussian(x, center, spec.sigma, spec.length).astype(np.complex128), spec.length / spec.grid)
    return WavePacketGrid(samples=psi, length=spec.length, spec=spec)


def make_two_packet(
    profile: PacketSpec,
    sep: Optional[float] = None,
    alpha: Optional[float] = None,
    grid: Optional[int] = None,
    length: Optional[float] = None,
) -> WavePacketGrid:
    """ψ_α = (f(x) + e^{iα} f(x−ℓ)) / √2，在网格上重新归一化

    未给出的参数取自 profile。

    Raises:
        DomainTooSmall: 周期区域容不下两个波包及其平移
        OverlapViolation: |∫ f*(x) f(x−ℓ) dx| > 1e−8
    """
    updates = {k: v for k, v in (("sep", sep), ("alpha", alpha), ("grid", grid), ("length", length)) if v is not None}
    spec = PacketSpec(**{**profile.model_dump(), **updates})
    if spec.sep <= 0:
        raise InvalidParameter(f"packet separation must be positive, got {spec.sep:g}")
    _check_resolution(spec)
    # 平移 ℓ 后第二个波包绕回时不能碰到第一个
    if spec.length < 2 * spec.sep + 2 * _SUPPORT_SIGMAS * spec.sigma:
        raise DomainTooSmall(
            f"domain length {spec.length:g} is smaller than 2·sep + 12σ = {2 * spec.sep + 12 * spec.sigma:g}"
        )

    dx = spec.length / spec.grid
    x = np.arange(spec.grid) * dx
    first = spec.center if spec.center is not None else (spec.length - spec.sep) / 2.0
    f1 = _gaussian(x, first, spec.sigma, spec.length)
    f2 = _gaussian(x, first + spec.sep, spec.sigma, spec.length)
    overlap = float(np.sum(f1 * f2) * dx)
    if abs(overlap) > OVERLAP_LIMIT:
        raise OverlapViolation(f"packet overlap {overlap:.3e} exceeds {OVERLAP_LIMIT:g}; increase sep")

    psi = (f1 + np.exp(1j * spec.alpha) * f2) / np.sqrt(2.0)
    return WavePacketGrid(
        samples=_normalize(psi, dx),
        length=spec.length,
        sep=spec.sep,
        alpha=spec.alpha,
        overlap=overlap,
        spec=spec,
    )


def snap_shift(psi: WavePacketGrid, ell: float) -> Tuple[int, float]:
    """把 ℓ 对齐到最近的网格倍数，返回 (格点位移, 对齐偏移)"""
    shift = int(np.rint(ell / psi.dx))
    snap = float(ell - shift * psi.dx)
    if abs(snap) > 1e-9 * max(1.0, abs(ell)):
        logger.debug("ell=%g snapped to %g (offset %.3e)", ell, shift * psi.dx, snap)
    return shift, snap


def translation_expectation(
    psi: WavePacketGrid,
    ell: float,
    return_snap: bool = False,
) -> Union[complex, Tuple[complex, float]]:
    """⟨ψ|exp(ipℓ)|ψ⟩ = Σ ψ*(x) ψ(x+ℓ) Δx，精确的周期下标平移

    ℓ 先对齐到最近的网格倍数；return_snap=True 时一并返回对齐偏移 ℓ − shift·Δx。
    """
    shift, snap = snap_shift(psi, ell)
    shifted = np.roll(psi.samples, -shift)
    value = complex(np.sum(np.conj(psi.samples) * shifted) * psi.dx)
    return (value, snap) if return_snap else value


def _wavenumbers(psi: WavePacketGrid) -> np.ndarray:
    return 2.0 * np.pi * np.fft.fftfreq(psi.grid, d=psi.dx)


def momentum_moment(psi: WavePacketGrid, n: int) -> float:
    """⟨p^n⟩，谱方法：傅里叶空间乘 k^n

    Raises:
        MomentTooHigh: n > 6
        ToleranceExceeded: 虚部超过 1e−8
    """
    if n < 1:
        raise InvalidParameter(f"moment order must be positive, got {n}")
    if n > MAX_MOMENT:
        raise MomentTooHigh(f"moments above p^{MAX_MOMENT} are dominated by grid noise")
    derived = np.fft.ifft(_wavenumbers(psi) ** n * np.fft.fft(psi.samples))
    value = complex(np.sum(np.conj(psi.samples) * derived) * psi.dx)
    if abs(value.imag) >= 1e-8:
        raise ToleranceExceeded(f"⟨p^{n}⟩ has imaginary part {value.imag:.3e}")
    return value.real


def modular_exchange_report(psi0: WavePacketGrid, alpha: float, nmax: int = 4) -> ModularReport:
    """给位移波包加上相对相位 e^{iα}（AB 相互作用的替身），比较前后的期望值

    模动量改变 ½(e^{iα} − 1)，所有动量矩不变。

    Raises:
        InvalidParameter: psi0 不是 α = 0 的双波包态
    """
    if psi0.spec is None or psi0.sep <= 0:
        raise InvalidParameter("modular exchange needs a two-packet state built by make_two_packet")
    if abs(psi0.alpha) > 1e-15:
        raise InvalidParameter(f"reference state must have alpha = 0, got {psi0.alpha:g}")

    psi = make_two_packet(psi0.spec, alpha=alpha)
    before, snap = translation_expectation(psi0, psi0.sep, return_snap=True)
    after = translation_expectation(psi, psi.sep)
    delta = after - before
    expected = 0.5 * (np.exp(1j * alpha) - 1.0)
    moment_deltas = {
        n: momentum_moment(psi, n) - momentum_moment(psi0, n) for n in range(1, nmax + 1)
    }
    return ModularReport(
        alpha=alpha,
        sep=psi0.sep,
        snap=snap,
        translation_before=before,
        translation_after=after,
        delta_translation=delta,
        expected_delta=complex(expected),
        deviation=float(abs(delta - expected)),
        moment_deltas=moment_deltas,
    )


def potential_line_integrals(psi: WavePacketGrid, potential: np.ndarray, ell: float) -> np.ndarray:
    """∫_x^{x+ℓ} A(x') dx'，对每个格点 x；周期部分用谱反导数"""
    a = np.asarray(potential, dtype=np.float64)
    if a.shape != (psi.grid,):
        raise InvalidParameter(f"potential must have {psi.grid} samples")
    shift, _ = snap_shift(psi, ell)
    mean = a.mean()
    k = _wavenumbers(psi)
    spectrum = np.fft.fft(a - mean)
    spectrum[1:] /= 1j * k[1:]
    spectrum[0] = 0.0
    antiderivative = np.real(np.fft.ifft(spectrum))
    return mean * shift * psi.dx + np.roll(antiderivative, -shift) - antiderivative


def kinetic_translation_expectation(
    psi: WavePacketGrid,
    ell: float,
    potential: np.ndarray,
    charge: float = 1.0,
) -> complex:
    """规范不变的模动量 ⟨ψ| exp(−ie∫_x^{x+ℓ}A) exp(ipℓ) |ψ⟩

    对 ψ → e^{ieχ}ψ、A → A + χ' 不变。
    """
    shift, _ = snap_shift(psi, ell)
    phase = np.exp(-1j * charge * potential_line_integrals(psi, potential, ell))
    shifted = np.roll(psi.samples, -shift)
    return complex(np.sum(np.conj(psi.samples) * phase * shifted) * psi.dx)


def gauge_transform_packet(psi: WavePacketGrid, chi: np.ndarray, charge: float = 1.0) -> WavePacketGrid:
    """ψ → e^{ieχ}ψ"""
    samples = psi.samples * np.exp(1j * charge * np.asarray(chi, dtype=np.float64))
    return WavePacketGrid(
        samples=samples,
        length=psi.length,
        sep=psi.sep,
        alpha=psi.alpha,
        overlap=psi.overlap,
        spec=psi.spec,
    )
