"""
Lawless 主入口
演示如何在 Python 中直接调用各个实验模块
"""
import numpy as np
from rich.console import Console
from rich.table import Table

from lawless.config import setup_logging
from lawless.models import BornInstance, Curve, GroupSpec, ConnectionField, PacketSpec
from lawless.runtime.born import derive_probabilities
from lawless.runtime.holonomy import small_loop_check, u1_phase_factor
from lawless.runtime.modular import make_two_packet, modular_exchange_report
from lawless.runtime.phenomenon import analyze_log, reverse_log, run_phenomenon, score_time_direction
from lawless.runtime.scenarios import penrose

console = Console()


def demo_born():
    """c = (0.6, 0.8) 的 Born 概率推导"""
    result = derive_probabilities(BornInstance(coefficients=[0.6, 0.8]))
    console.print(f"📐 p = {result.p.tolist()}，M = {result.partition.M}，θ = {result.theta:.6f}")


def demo_penrose(trials: int = 10000, seed: int = 42):
    """Penrose 镜面实验的正放与倒放"""
    sc = penrose()
    log = run_phenomenon(sc, "alpha_1", trials, seed)
    analysis = analyze_log(log)

    table = Table(title="Penrose 条件频率")
    table.add_column("方向")
    table.add_column("条件")
    table.add_column("结果")
    table.add_column("频率", justify="right")
    for direction, freqs in (("正向", analysis.forward), ("反向", analysis.backward)):
        for given, row in freqs.items():
            for outcome, value in row.items():
                table.add_row(direction, given, outcome, f"{value:.4f}")
    console.print(table)

    for name, candidate in (("正放", log), ("倒放", reverse_log(log))):
        verdict = score_time_direction(candidate, sc)
        console.print(f"🎞️ {name}记录判定为 {verdict.direction.value}")


def demo_modular(alpha: float = np.pi):
    psi0 = make_two_packet(PacketSpec())
    report = modular_exchange_report(psi0, alpha)
    console.print(f"〰️ Δ⟨exp(ipℓ)⟩ = {report.delta_translation:.6f}，期望 {report.expected_delta:.6f}")
    console.print(f"   动量矩变化: {report.moment_deltas}")


def demo_holonomy():
    solenoid = ConnectionField(chart_dim=2, preset="solenoid", params={"flux": np.pi, "radius": 0.5})
    loop = Curve(vertices=[[2, -2], [2, 2], [-2, 2], [-2, -2], [2, -2]])
    phase = u1_phase_factor(solenoid, 1.0, loop)
    console.print(f"🧭 螺线管相因子 {phase.value:.6f}（卷绕数 {phase.winding}）")

    field = ConnectionField(chart_dim=2, preset="su2_smooth")
    for a in (0.1, 0.05, 0.025):
        report = small_loop_check(field, GroupSpec(factors=["SU2"]), [0.2, 0.1], (0, 1), a)
        console.print(f"   SU(2) 小回路 a={a}: 残差 {report.residual:.3e}")


if __name__ == "__main__":
    setup_logging()
    try:
        demo_born()
        demo_penrose()
        demo_modular()
        demo_holonomy()
    except KeyboardInterrupt:
        console.print("\n程序被用户中断")
