"""
编排器
把一次运行配置分派到对应的计算模块，汇总结果并写出报告与表格

每次运行完全由 (子命令, 参数, 种子) 决定。
"""
import logging
import sys
from typing import Any, Dict, Optional, Tuple

import numpy as np
import pandas as pd
from rich.console import Console
from rich.markup import escape

from lawless.config import LawlessConfig, get_config
from lawless.errors import BadFlag, LawlessError
from lawless.models import ConnectionField, Curve, GroupSpec, PacketSpec, RunConfig
from lawless.runtime import exporter
from lawless.runtime.born import born_instance_from_probabilities, check_equidistance, derive_probabilities
from lawless.runtime.fields import field_from_dict, load_field
from lawless.runtime.holonomy import holonomy, load_curve_csv, small_loop_check, u1_phase_factor
from lawless.runtime.modular import make_two_packet, modular_exchange_report
from lawless.runtime.phenomenon import analyze_log, log_frame, reverse_log, run_phenomenon, score_time_direction
from lawless.runtime.scenarios import get_scenario

logger = logging.getLogger(__name__)

Tables = Dict[str, pd.DataFrame]

# 预设场缺省使用的群因子
DEFAULT_FACTORS = {
    "zero": ["U1"],
    "u1_constant": ["U1"],
    "u1_linear": ["U1"],
    "u1_bump": ["U1"],
    "solenoid": ["U1"],
    "su2_constant": ["SU2"],
    "su2_smooth": ["SU2"],
    "flat_solder": ["POINCARE"],
    "torsion": ["POINCARE"],
}


class ExperimentOrchestrator:
    """实验编排器

    compute() 只做计算，返回结果与表格；run() 再负责写出文件并把异常映射为退出码。
    """

    def __init__(self, config: Optional[LawlessConfig] = None, console: Optional[Console] = None):
        """初始化编排器

        Args:
            config: 运行配置，默认取进程级配置
            console: 输出错误信息的 rich 控制台，默认写 stderr
        """
        self.config = config or get_config()
        self.console = console or Console(stderr=True)

    # ==================== 各子命令 ====================

    def _born(self, params: Dict[str, Any]) -> Tuple[Dict[str, Any], Tables]:
        probs = params.get("probs")
        if not probs:
            raise BadFlag("born needs --probs, e.g. --probs 0.36,0.64")
        eps = float(params.get("eps", 1e-12))
        inst = born_instance_from_probabilities(probs)
        result = derive_probabilities(inst, eps=eps, config=self.config)
        theta, spread = check_equidistance(result.expansion)
        results = {
            "p": result.p,
            "bound": result.bound,
            "M": result.partition.M,
            "n": result.partition.n,
            "residual": result.partition.residual,
            "theta": theta,
            "spread": spread,
            "branch_probability": result.branch_probability,
            "transition": result.transition,
            "total_branches": result.expansion.total_branches,
            "max_gap": result.expansion.max_gap,
            "expansion_bound": result.expansion.bound,
        }
        table = pd.DataFrame({
            "index": np.arange(len(result.p)),
            "c_squared": inst.coefficients ** 2,
            "n": result.partition.n,
            "p": result.p,
        })
        return results, {"primary": table}

    def _phenomenon(self, params: Dict[str, Any], seed: int) -> Tuple[Dict[str, Any], Tables]:
        sc = get_scenario(str(params.get("scenario", "penrose")))
        trials = int(params.get("trials", 10000))
        initial = params.get("initial") or sc.initial_labels[0]
        log = run_phenomenon(sc, initial, trials, seed, config=self.config)
        if params.get("reverse"):
            log = reverse_log(log)
        analysis = analyze_log(log)
        verdict = score_time_direction(log, sc)
        results = {
            "scenario": sc.label,
            "initial": initial,
            "reversed": log.reversed,
            "analysis": analysis,
            "verdict": verdict,
            "process_probabilities": {
                str(a): {str(b): float(p) for b, p in zip(sc.final_labels, row)}
                for a, row in zip(sc.initial_labels, sc.process_probabilities())
            },
        }
        rows = [
            {"given": given, "outcome": outcome, "direction": direction, "frequency": freq}
            for direction, table in (("forward", analysis.forward), ("backward", analysis.backward))
            for given, row in sorted(table.items())
            for outcome, freq in sorted(row.items())
        ]
        return results, {"primary": pd.DataFrame(rows), "trials": log_frame(log)}

    def _modular(self, params: Dict[str, Any]) -> Tuple[Dict[str, Any], Tables]:
        fields = {k: params[k] for k in ("sigma", "sep", "grid", "length", "center") if params.get(k) is not None}
        spec = PacketSpec(**fields)
        psi0 = make_two_packet(spec, alpha=0.0)
        alpha = float(params.get("alpha", np.pi))
        report = modular_exchange_report(psi0, alpha, nmax=int(params.get("nmax", 4)))
        psi = make_two_packet(spec, alpha=alpha)
        table = pd.DataFrame({
            "x": psi0.x,
            "re_psi0": psi0.samples.real,
            "im_psi0": psi0.samples.imag,
            "re_psi": psi.samples.real,
            "im_psi": psi.samples.imag,
        })
        return {"report": report, "overlap": psi0.overlap, "spec": spec}, {"primary": table}

    def _resolve_field(self, params: Dict[str, Any], chart_dim: int) -> Tuple[ConnectionField, GroupSpec]:
        if params.get("field"):
            return load_field(str(params["field"]))
        preset = str(params.get("preset", "zero"))
        factors = params.get("group") or DEFAULT_FACTORS.get(preset, ["U1"])
        return field_from_dict({
            "chart_dim": chart_dim,
            "factors": factors,
            "preset": preset,
            "parameters": params.get("params") or {},
        })

    def _holonomy(self, params: Dict[str, Any]) -> Tuple[Dict[str, Any], Tables]:
        curve: Optional[Curve] = load_curve_csv(str(params["curve"])) if params.get("curve") else None
        at = params.get("at")
        chart_dim = curve.dim if curve is not None else (len(at) if at else 2)
        field, spec = self._resolve_field(params, chart_dim)
        steps = params.get("steps")

        if params.get("small_loop") is not None:
            x = at if at is not None else [0.0] * field.chart_dim
            plane = tuple(params.get("plane") or (0, 1))
            report = small_loop_check(
                field, spec, x, plane, float(params["small_loop"]),
                steps=steps, config=self.config,
            )
            tables = {"primary": pd.concat([
                exporter.matrix_frame(report.g_loop, "g_loop"),
                exporter.matrix_frame(report.predicted, "predicted"),
            ], ignore_index=True)}
            return {"representation": spec.tag, "small_loop": report}, tables

        if curve is None:
            raise BadFlag("holonomy needs --curve (or --small-loop)")
        if params.get("phase_factor"):
            charge = params.get("charge")
            charge = float(charge) if charge is not None else spec.factors[0].charge
            phase = u1_phase_factor(field, charge, curve)
            table = pd.DataFrame({"re": [phase.value.real], "im": [phase.value.imag]})
            return {"representation": spec.tag, "phase_factor": phase}, {"primary": table}

        result = holonomy(field, spec, curve, steps=steps, config=self.config)
        results = {
            "representation": spec.tag,
            "matrix": result.element.matrix,
            "error_estimate": result.error_estimate,
            "steps": result.steps,
            "vertices": curve.vertices,
        }
        return results, {"primary": exporter.matrix_frame(result.element.matrix)}

    # ==================== 入口 ====================

    def compute(self, run: RunConfig) -> Tuple[Dict[str, Any], Tables]:
        """执行计算，返回 (报告, 表格)

        Raises:
            LawlessError: 输入或数值容差错误
        """
        logger.debug("running %s with %s (seed %d)", run.subcommand, run.parameters, run.seed)
        if run.subcommand == "born":
            results, tables = self._born(run.parameters)
        elif run.subcommand == "phenomenon":
            results, tables = self._phenomenon(run.parameters, run.seed)
        elif run.subcommand == "modular":
            results, tables = self._modular(run.parameters)
        else:
            results, tables = self._holonomy(run.parameters)
        return exporter.build_report(run, self.config.resolved(), results), tables

    def write(self, run: RunConfig, report: Dict[str, Any], tables: Tables) -> None:
        """按输出格式写出文件；未给 --out 时把 JSON 写到 stdout"""
        if run.format == "csv":
            exporter.write_table(tables["primary"], run.out)
            exporter.write_report(report, exporter.report_path_for(run.out))
            if "trials" in tables:
                exporter.write_table(tables["trials"], exporter.trials_path_for(run.out))
        elif run.out:
            exporter.write_report(report, run.out)
        else:
            sys.stdout.write(exporter.dumps_report(report))
            sys.stdout.flush()

    def run(self, run: RunConfig) -> int:
        """执行并写出结果

        Returns:
            退出码：0 成功，2 输入错误，3 数值容差失败
        """
        try:
            report, tables = self.compute(run)
            self.write(run, report, tables)
        except LawlessError as e:
            self.console.print(f"[red]✗ {type(e).__name__}:[/red] {escape(str(e))}", highlight=False)
            return e.exit_code
        if run.out:
            self.console.print(f"✓ {run.subcommand} 结果已写入: {run.out}", highlight=False)
        return 0
