"""
Lawless CLI 工具
四类数值实验的统一命令行入口：born、phenomenon、modular、holonomy

报告 JSON 写到 stdout 或 --out；日志与错误信息写到 stderr。
退出码：0 成功，2 输入错误，3 数值容差失败，1 其他异常。
"""
import json
from typing import Annotated, Any, Dict, List, Optional

import typer
from rich.console import Console
from rich.markup import escape

from lawless.config import setup_logging
from lawless.errors import BadFlag, LawlessError
from lawless.models import RunConfig
from lawless.runtime.orchestrator import ExperimentOrchestrator

# 初始化 Typer 应用
app = typer.Typer(
    name="lawless",
    help="Lawless - 量子态几何、Born 律推导与联络和乐的数值实验",
    add_completion=False,
    rich_markup_mode="rich",
)

# 错误与进度信息只写 stderr，stdout 留给报告
console = Console(stderr=True)

SeedOption = Annotated[int, typer.Option("--seed", help="64 位无符号随机种子")]
OutOption = Annotated[Optional[str], typer.Option("--out", "-o", help="输出路径（缺省写到 stdout）")]
FormatOption = Annotated[str, typer.Option("--format", "-f", help="输出格式：json 或 csv")]
VerboseOption = Annotated[bool, typer.Option("--verbose", "-v", help="输出调试日志")]


def _floats(raw: Optional[str], flag: str) -> Optional[List[float]]:
    """解析逗号分隔的实数列表"""
    if raw is None:
        return None
    try:
        return [float(item) for item in raw.split(",") if item.strip()]
    except ValueError as e:
        raise BadFlag(f"{flag} expects comma-separated numbers, got {raw!r}") from e


def _ints(raw: Optional[str], flag: str) -> Optional[List[int]]:
    if raw is None:
        return None
    try:
        return [int(item) for item in raw.split(",") if item.strip()]
    except ValueError as e:
        raise BadFlag(f"{flag} expects comma-separated integers, got {raw!r}") from e


def _json_object(raw: Optional[str], flag: str) -> Optional[Dict[str, Any]]:
    if raw is None:
        return None
    try:
        value = json.loads(raw)
    except json.JSONDecodeError as e:
        raise BadFlag(f"{flag} expects a JSON object: {e}") from e
    if not isinstance(value, dict):
        raise BadFlag(f"{flag} expects a JSON object")
    return value


def _execute(subcommand: str, build_parameters, seed: int, fmt: str, out: Optional[str], verbose: bool) -> None:
    """校验参数、执行并按退出码退出"""
    setup_logging("DEBUG" if verbose else None)
    try:
        parameters = {k: v for k, v in build_parameters().items() if v is not None}
        run = RunConfig(subcommand=subcommand, parameters=parameters, seed=seed, format=fmt.lower(), out=out)
    except LawlessError as e:
        console.print(f"[red]✗ {type(e).__name__}:[/red] {escape(str(e))}", highlight=False)
        raise typer.Exit(e.exit_code)

    try:
        code = ExperimentOrchestrator(console=console).run(run)
    except Exception as e:
        console.print(f"[red]✗ 运行失败: {escape(str(e))}[/red]", highlight=False)
        raise typer.Exit(1)
    if code:
        raise typer.Exit(code)


@app.command()
def born(
    probs: Annotated[Optional[str], typer.Option("--probs", help="逗号分隔的概率 c_i²，如 0.36,0.64")] = None,
    eps: Annotated[float, typer.Option("--eps", help="有理划分的容差")] = 1e-12,
    seed: SeedOption = 0,
    out: OutOption = None,
    fmt: FormatOption = "json",
    verbose: VerboseOption = False,
):
    """由分支等距性推导 Born 概率"""
    _execute("born", lambda: {"probs": _floats(probs, "--probs"), "eps": eps}, seed, fmt, out, verbose)


@app.command()
def phenomenon(
    scenario: Annotated[str, typer.Option("--scenario", "-s", help="内置场景名或 JSON 场景文件")] = "penrose",
    trials: Annotated[int, typer.Option("--trials", "-n", help="试验次数")] = 10000,
    initial: Annotated[Optional[str], typer.Option("--initial", help="初态标签（默认第一个初态）")] = None,
    reverse: Annotated[bool, typer.Option("--reverse", help="输出倒放的试验记录并判定其时间方向")] = False,
    seed: SeedOption = 0,
    out: OutOption = None,
    fmt: FormatOption = "json",
    verbose: VerboseOption = False,
):
    """采样试验记录，统计条件频率并判定时间方向"""
    _execute(
        "phenomenon",
        lambda: {"scenario": scenario, "trials": trials, "initial": initial, "reverse": reverse},
        seed, fmt, out, verbose,
    )


@app.command()
def modular(
    alpha: Annotated[float, typer.Option("--alpha", help="相对相位 α")] = 3.141592653589793,
    sigma: Annotated[float, typer.Option("--sigma", help="波包宽度 σ")] = 1.0,
    sep: Annotated[float, typer.Option("--sep", help="波包间距 ℓ")] = 16.0,
    grid: Annotated[int, typer.Option("--grid", help="网格点数（2 的幂）")] = 1024,
    length: Annotated[float, typer.Option("--length", help="周期区域长度")] = 64.0,
    nmax: Annotated[int, typer.Option("--nmax", help="比较的最高动量矩")] = 4,
    seed: SeedOption = 0,
    out: OutOption = None,
    fmt: FormatOption = "json",
    verbose: VerboseOption = False,
):
    """双波包的模动量交换：模动量改变而动量矩不变"""
    _execute(
        "modular",
        lambda: {"alpha": alpha, "sigma": sigma, "sep": sep, "grid": grid, "length": length, "nmax": nmax},
        seed, fmt, out, verbose,
    )


@app.command()
def holonomy(
    preset: Annotated[str, typer.Option("--preset", "-p", help="联络场预设名")] = "zero",
    field: Annotated[Optional[str], typer.Option("--field", help="JSON 场预设文件（优先于 --preset）")] = None,
    group: Annotated[Optional[str], typer.Option("--group", "-g", help="群因子，如 U1:2,SU2 或 POINCARE")] = None,
    params: Annotated[Optional[str], typer.Option("--params", help="预设参数（JSON 对象）")] = None,
    curve: Annotated[Optional[str], typer.Option("--curve", "-c", help="顶点 CSV 文件")] = None,
    steps: Annotated[Optional[int], typer.Option("--steps", help="每条边的积分步数")] = None,
    small_loop: Annotated[Optional[float], typer.Option("--small-loop", help="小回路边长 a")] = None,
    plane: Annotated[Optional[str], typer.Option("--plane", help="小回路所在坐标平面，如 0,1")] = None,
    at: Annotated[Optional[str], typer.Option("--at", help="小回路基点，如 0.1,0.2")] = None,
    phase_factor: Annotated[bool, typer.Option("--phase-factor", help="计算闭合曲线的 U(1) 相因子")] = False,
    charge: Annotated[Optional[float], typer.Option("--charge", help="相因子使用的电荷 e")] = None,
    seed: SeedOption = 0,
    out: OutOption = None,
    fmt: FormatOption = "json",
    verbose: VerboseOption = False,
):
    """沿曲线的路径序指数、小回路检查与电磁相因子"""

    def parameters() -> Dict[str, Any]:
        return {
            "preset": preset,
            "field": field,
            "group": [g.strip() for g in group.split(",") if g.strip()] if group else None,
            "params": _json_object(params, "--params"),
            "curve": curve,
            "steps": steps,
            "small_loop": small_loop,
            "plane": _ints(plane, "--plane"),
            "at": _floats(at, "--at"),
            "phase_factor": phase_factor or None,
            "charge": charge,
        }

    _execute("holonomy", parameters, seed, fmt, out, verbose)


if __name__ == "__main__":
    app()
