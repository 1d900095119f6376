"""
现象模拟
带种子的试验采样、条件频率与熵统计、时间方向判定，以及保护测量与投影测量协议

采样使用计数器式 Philox：第 t 次试验消耗第 t 个 64 位输出，任意分块并行结果都逐位一致。
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence, Union

import numpy as np
import pandas as pd
from scipy.linalg import eigh
from scipy.stats import entropy

from lawless.config import LawlessConfig, get_config
from lawless.errors import DimensionMismatch, EmptyLog, InvalidParameter, UnknownLabel
from lawless.models import (
    DirectionVerdict,
    LogAnalysis,
    MeasurementOutcome,
    ProtocolResult,
    PureState,
    Scenario,
    TimeDirection,
    TrialLog,
)
from lawless.numerics import require_hermitian, require_unitary
from lawless.runtime.geometry import make_state

logger = logging.getLogger(__name__)

# 概率低于此值的终态不参与采样；判定中视为零概率
_SUPPORT_FLOOR = 1e-15
_ZERO_PROBABILITY = 1e-12
# eigh 本征值在此范围内视为简并
_DEGENERACY_TOL = 1e-10

RngLike = Union[None, int, np.random.Generator]


def _uniforms(seed: int, start: int, count: int) -> np.ndarray:
    """第 start..start+count-1 次试验的 [0, 1) 均匀数

    start 必须是 4 的倍数（Philox 每个计数器产出 4 个字）。
    """
    bitgen = np.random.Philox(key=seed, counter=start // 4)
    raw = bitgen.random_raw(count)
    return (raw >> np.uint64(11)).astype(np.float64) * (1.0 / 9007199254740992.0)


def run_phenomenon(
    sc: Scenario,
    initial: str,
    n: int,
    seed: int,
    config: Optional[LawlessConfig] = None,
) -> TrialLog:
    """从同一初态重复 n 次试验，按 |⟨β_i|Uα⟩|² 采样终态

    Args:
        sc: 场景
        initial: 初态标签
        n: 试验次数
        seed: 64 位无符号种子
        config: 运行配置（并行线程数与分块大小）

    Returns:
        TrialLog，相同 (场景, n, seed) 逐位可复现

    Raises:
        UnknownLabel: 初态不在场景中
        InvalidParameter: n 或 seed 非法
    """
    config = config or get_config()
    if n < 1:
        raise InvalidParameter(f"trial count must be at least 1, got {n}")
    if not 0 <= seed < 2 ** 64:
        raise InvalidParameter(f"seed must be an unsigned 64-bit integer, got {seed}")
    if initial not in sc.initials:
        raise UnknownLabel(f"initial {initial!r} not in scenario {sc.label!r}")

    row = sc.process_probabilities()[sc.initial_labels.index(initial)]
    support = np.flatnonzero(row > _SUPPORT_FLOOR)
    cdf = np.cumsum(row[support])
    cdf[-1] = 1.0

    chunk = config.trial_chunk
    starts = list(range(0, n, chunk))

    def _draw(start: int) -> np.ndarray:
        u = _uniforms(seed, start, min(chunk, n - start))
        return np.searchsorted(cdf, u, side="right")

    if config.parallel_workers > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=config.parallel_workers) as executor:
            parts = list(executor.map(_draw, starts))
    else:
        parts = [_draw(s) for s in starts]

    finals = np.asarray(sc.final_labels)[support][np.concatenate(parts)]
    logger.debug("sampled %d trials of %s from %s in %d chunks", n, sc.label, initial, len(starts))
    return TrialLog(
        scenario=sc.label,
        seed=seed,
        initial=np.full(n, initial),
        final=finals,
        scenario_labels=tuple(sc.labels),
    )


def reverse_log(log: TrialLog) -> TrialLog:
    """倒放影片：交换每个试验对的两个分量"""
    return TrialLog(
        scenario=log.scenario,
        seed=log.seed,
        initial=log.final,
        final=log.initial,
        scenario_labels=log.scenario_labels,
        reversed=not log.reversed,
    )


def log_frame(log: TrialLog) -> pd.DataFrame:
    """试验记录的表格形式，列为 trial_index, initial, final"""
    return pd.DataFrame({
        "trial_index": np.arange(len(log)),
        "initial": log.initial,
        "final": log.final,
    })


def export_log_csv(log: TrialLog, path: str) -> None:
    log_frame(log).to_csv(path, index=False)


def _table_dict(table: pd.DataFrame) -> dict:
    return {str(r): {str(c): float(table.loc[r, c]) for c in table.columns} for r in table.index}


def _conditional_entropy(counts: pd.DataFrame) -> float:
    """H(列 | 行)，比特"""
    total = counts.to_numpy().sum()
    h = 0.0
    for _, row in counts.iterrows():
        weight = row.sum() / total
        h += weight * float(entropy(row.to_numpy(), base=2))
    return h


def analyze_log(log: TrialLog) -> LogAnalysis:
    """两个条件方向的相对频率表与终态分布熵

    Raises:
        EmptyLog: 记录为空
    """
    if len(log) == 0:
        raise EmptyLog("trial log is empty")
    frame = log_frame(log)
    forward_counts = pd.crosstab(frame["initial"], frame["final"])
    backward_counts = pd.crosstab(frame["final"], frame["initial"])
    final_counts = frame["final"].value_counts().sort_index()

    return LogAnalysis(
        trials=len(log),
        forward=_table_dict(pd.crosstab(frame["initial"], frame["final"], normalize="index")),
        backward=_table_dict(pd.crosstab(frame["final"], frame["initial"], normalize="index")),
        final_distribution={str(k): float(v) / len(log) for k, v in final_counts.items()},
        final_entropy=float(entropy(final_counts.to_numpy(), base=2)),
        forward_conditional_entropy=_conditional_entropy(forward_counts),
        backward_conditional_entropy=_conditional_entropy(backward_counts),
    )


def apply_symmetry(sc: Scenario, V: np.ndarray) -> Scenario:
    """用幺正变换 V 变换整个装置：态 → Vψ，演化 → VUV†

    所有过程概率 |⟨β_i|Uα⟩|² 保持不变。

    Raises:
        NotUnitary: V 不幺正
        DimensionMismatch: V 的维数与场景不符
    """
    v = require_unitary(V, sc.dim)
    return Scenario(
        label=sc.label,
        initials={k: make_state(v @ s.amplitudes) for k, s in sc.initials.items()},
        evolution=v @ sc.evolution @ v.conj().T,
        finals={k: make_state(v @ s.amplitudes) for k, s in sc.finals.items()},
    )


def _orientation_score(counts: pd.Series, model: dict, conditioning: int) -> float:
    """模型对数似然减去经验条件频率的对数似然（≤ 0）

    conditioning 为条件变量在 (x, y) 对中的位置。
    """
    totals = counts.groupby(level=conditioning).sum()
    score = 0.0
    for (x, y), k in counts.items():
        prob = model[(x, y)]
        if prob < _ZERO_PROBABILITY:
            return -np.inf
        empirical = k / totals[(x, y)[conditioning]]
        score += k * (np.log(prob) - np.log(empirical))
    return float(score)


def score_time_direction(log: TrialLog, sc: Scenario) -> DirectionVerdict:
    """分别假设影片正放与倒放，比较 Born 律对条件频率的解释程度

    正放：对 (x, y) 视 x 为初态、y 为终态，模型 P(y|x) = |⟨y|U x⟩|²。
    倒放：真实过程是 y → x，模型 P(x|y) = |⟨x|U y⟩|²。
    每个方向的得分是模型似然相对该方向经验条件频率的对数比；
    出现零概率对时该方向为 −∞。

    Raises:
        UnknownLabel: 记录中的标签无法在场景中解析
    """
    if len(log) == 0:
        raise EmptyLog("trial log is empty")
    frame = log_frame(log)
    counts = frame.groupby(["initial", "final"]).size()

    states = {}
    for label in set(frame["initial"]) | set(frame["final"]):
        states[label] = sc.resolve(label).amplitudes
    u = sc.evolution
    forward_model, backward_model = {}, {}
    for x, y in counts.index:
        forward_model[(x, y)] = abs(np.vdot(states[y], u @ states[x])) ** 2
        backward_model[(x, y)] = abs(np.vdot(states[x], u @ states[y])) ** 2

    fwd = _orientation_score(counts, forward_model, conditioning=0)
    bwd = _orientation_score(counts, backward_model, conditioning=1)

    if np.isinf(fwd) and np.isinf(bwd):
        direction = TimeDirection.UNDECIDABLE
    elif abs(fwd - bwd) <= 1e-9 * max(1, len(log)):
        direction = TimeDirection.UNDECIDABLE
    else:
        direction = TimeDirection.FORWARD if fwd > bwd else TimeDirection.BACKWARD
    logger.debug("time direction scores forward=%.6g backward=%.6g", fwd, bwd)
    return DirectionVerdict(direction=direction, forward_score=fwd, backward_score=bwd)


def classify_time_direction(log: TrialLog, sc: Scenario) -> TimeDirection:
    """判定试验记录是正放还是倒放"""
    return score_time_direction(log, sc).direction


def protective_measure(s: PureState, A: np.ndarray) -> float:
    """保护测量：读出 ⟨ψ|A|ψ⟩，态不变

    Raises:
        NotHermitian: A 不厄米
        DimensionMismatch: 维数不符
    """
    a = require_hermitian(A, s.dim)
    return float(np.real(np.vdot(s.amplitudes, a @ s.amplitudes)))


def projective_measure(s: PureState, A: np.ndarray, rng: RngLike = None) -> MeasurementOutcome:
    """投影测量（R 过程）：按本征子空间投影的模方采样本征值，态塌缩到归一化投影

    Args:
        s: 测量前的态
        A: 厄米可观测量
        rng: numpy Generator 或种子

    Returns:
        MeasurementOutcome(本征值, 测量后的态)
    """
    a = require_hermitian(A, s.dim)
    rng = np.random.default_rng(rng)
    values, vectors = eigh(a)

    # 相邻本征值差小于容差的归为同一子空间
    cuts = np.flatnonzero(np.diff(values) > _DEGENERACY_TOL) + 1
    groups = np.split(np.arange(values.shape[0]), cuts)
    projections, weights = [], []
    for idx in groups:
        basis = vectors[:, idx]
        proj = basis @ (basis.conj().T @ s.amplitudes)
        projections.append(proj)
        weights.append(float(np.real(np.vdot(proj, proj))))

    cdf = np.cumsum(weights)
    cdf /= cdf[-1]
    pick = int(np.searchsorted(cdf, rng.random(), side="right"))
    pick = min(pick, len(groups) - 1)
    eigenvalue = float(values[groups[pick]].mean())
    return MeasurementOutcome(eigenvalue=eigenvalue, post=make_state(projections[pick]))


def alternating_protocol(
    s: PureState,
    A: np.ndarray,
    B: np.ndarray,
    k: int,
    mode: str = "protective",
    seed: RngLike = None,
) -> ProtocolResult:
    """交替测量 A, B, A, B, ... 共 2k 次

    保护模式下态始终不变，读数在两个期望值之间交替；
    投影模式下每次测量都会让态塌缩，读数只在可对易且非简并时保持不变。

    Raises:
        InvalidParameter: k < 2 或 mode 非法
    """
    if k < 2:
        raise InvalidParameter(f"protocol needs at least 2 repetitions, got {k}")
    if mode not in ("protective", "projective"):
        raise InvalidParameter(f"mode must be protective or projective, got {mode!r}")

    values: List[float] = []
    if mode == "protective":
        a_value, b_value = protective_measure(s, A), protective_measure(s, B)
        for _ in range(k):
            values.extend([a_value, b_value])
    else:
        rng = np.random.default_rng(seed)
        state = s
        for _ in range(k):
            for observable in (A, B):
                outcome = projective_measure(state, observable, rng)
                values.append(outcome.eigenvalue)
                state = outcome.post

    arr = np.asarray(values)
    constant = bool(np.all(arr[0::2] == arr[0]) and np.all(arr[1::2] == arr[1]))
    return ProtocolResult(mode=mode, values=arr, constant=constant)


def gell_mann_basis(dim: int) -> List[np.ndarray]:
    """广义 Gell-Mann 矩阵（不含单位阵），tr(λ_j λ_k) = 2δ_jk"""
    basis = []
    for j in range(dim):
        for k in range(j + 1, dim):
            sym = np.zeros((dim, dim), dtype=np.complex128)
            sym[j, k] = sym[k, j] = 1.0
            anti = np.zeros((dim, dim), dtype=np.complex128)
            anti[j, k], anti[k, j] = -1j, 1j
            basis.extend([sym, anti])
    for j in range(1, dim):
        diag = np.zeros(dim)
        diag[:j] = 1.0
        diag[j] = -j
        basis.append(np.diag(diag * np.sqrt(2.0 / (j * (j + 1)))).astype(np.complex128))
    return basis


def protective_tomography(s: PureState, observables: Optional[Sequence[np.ndarray]] = None) -> PureState:
    """仅凭保护测量的读数重建态

    读出广义 Gell-Mann 基的期望值，组装 ρ = I/d + ½ Σ ⟨λ_j⟩ λ_j，取最大本征值的本征矢。
    自定义 observables 必须满足同样的迹正交归一。

    Raises:
        DimensionMismatch: 可观测量维数不符
    """
    dim = s.dim
    basis = list(observables) if observables is not None else gell_mann_basis(dim)
    if any(np.shape(b) != (dim, dim) for b in basis):
        raise DimensionMismatch(f"observables must be {dim}x{dim}")
    rho = np.eye(dim, dtype=np.complex128) / dim
    for lam in basis:
        rho += 0.5 * protective_measure(s, lam) * lam
    _, vectors = eigh(rho)
    return make_state(vectors[:, -1])
