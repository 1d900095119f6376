"""
数据模型定义
所有领域数据结构的 pydantic 模型；数组字段在构造时转换为只读 numpy 数组

更新: 模型全部冻结（frozen），构造后不可修改，便于跨线程共享
"""
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from lawless.errors import (
    BadFlag,
    DimensionMismatch,
    EmptyInput,
    InvalidParameter,
    NotOrthonormal,
    SchemaError,
    SpanViolation,
    UnknownLabel,
    UnsupportedFactor,
)
from lawless.numerics import as_complex_vector, frozen, require_unitary


class _Frozen(BaseModel):
    """带 numpy 字段的只读模型基类"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)


# ==================== 态空间几何 ====================

class PureState(_Frozen):
    """纯态（射线）

    amplitudes 已归一化；同一射线的不同全局相位代表在 ray_equal 下相等。
    通常通过 geometry.make_state 构造，它会固定相位规范。
    """
    amplitudes: np.ndarray = Field(description="归一化复振幅")

    @field_validator("amplitudes", mode="before")
    @classmethod
    def _to_array(cls, v: Any) -> np.ndarray:
        return frozen(as_complex_vector(v))

    @model_validator(mode="after")
    def _check_norm(self) -> "PureState":
        norm = float(np.sum(np.abs(self.amplitudes) ** 2))
        if not np.isfinite(norm) or abs(norm - 1.0) > 1e-12:
            raise InvalidParameter(f"state is not normalized (|ψ|² = {norm!r})")
        return self

    @property
    def dim(self) -> int:
        return int(self.amplitudes.shape[0])


# ==================== Born 推导 ====================

class BornInstance(_Frozen):
    """ψ = Σ c_i ψ_i 的实正系数"""
    coefficients: np.ndarray = Field(description="实正系数 c_i")

    @field_validator("coefficients", mode="before")
    @classmethod
    def _to_array(cls, v: Any) -> np.ndarray:
        arr = np.asarray(v, dtype=np.float64).reshape(-1)
        if arr.size == 0:
            raise EmptyInput("coefficient sequence is empty")
        return frozen(arr)

    @model_validator(mode="after")
    def _check(self) -> "BornInstance":
        c = self.coefficients
        if not np.all(np.isfinite(c)) or np.any(c <= 0):
            raise InvalidParameter("all coefficients must be finite and strictly positive")
        total = float(np.sum(c ** 2))
        if abs(total - 1.0) > 1e-12:
            raise InvalidParameter(f"Σ c_i² = {total!r}, expected 1 within 1e-12")
        return self

    @property
    def dim(self) -> int:
        return int(self.coefficients.shape[0])


class RationalPartition(_Frozen):
    """c_i² ≈ n_i / M 的有理划分"""
    n: np.ndarray = Field(description="各分支的正整数份数")
    M: int = Field(description="公共分母，等于 Σ n_i")
    residual: float = Field(description="max_i |c_i² − n_i/M|")

    @field_validator("n", mode="before")
    @classmethod
    def _to_array(cls, v: Any) -> np.ndarray:
        return frozen(np.asarray(v, dtype=np.int64).reshape(-1))

    @model_validator(mode="after")
    def _check(self) -> "RationalPartition":
        if np.any(self.n < 1):
            raise InvalidParameter("every n_i must be at least 1")
        if int(self.n.sum()) != self.M:
            raise InvalidParameter(f"Σ n_i = {int(self.n.sum())} differs from M = {self.M}")
        return self


class AuxiliaryExpansion(_Frozen):
    """引入辅助系统后的等系数分支展开

    分支按 (i, j) 展平存储：owner[k] = i，coefficients[k] = c_i / √n_i。
    """
    coefficients: np.ndarray = Field(description="展平的分支系数")
    owner: np.ndarray = Field(description="每个分支所属的原始分量下标")
    bound: float = Field(description="分支系数两两差的理论上界")
    max_gap: float = Field(description="实际观测到的最大两两差")

    @field_validator("coefficients", mode="before")
    @classmethod
    def _coef(cls, v: Any) -> np.ndarray:
        return frozen(np.asarray(v, dtype=np.float64).reshape(-1))

    @field_validator("owner", mode="before")
    @classmethod
    def _owner(cls, v: Any) -> np.ndarray:
        return frozen(np.asarray(v, dtype=np.int64).reshape(-1))

    @model_validator(mode="after")
    def _check(self) -> "AuxiliaryExpansion":
        if self.coefficients.shape != self.owner.shape:
            raise DimensionMismatch("coefficients and owner must have equal length")
        total = float(np.sum(self.coefficients ** 2))
        if abs(total - 1.0) > 1e-12:
            raise InvalidParameter(f"branch weights sum to {total!r}")
        return self

    @property
    def total_branches(self) -> int:
        return int(self.coefficients.shape[0])

    def table(self) -> Dict[Tuple[int, int], float]:
        """返回 {(i, j): 系数}，j 从 1 开始计数"""
        result: Dict[Tuple[int, int], float] = {}
        counters: Dict[int, int] = {}
        for i, coef in zip(self.owner.tolist(), self.coefficients.tolist()):
            counters[i] = counters.get(i, 0) + 1
            result[(i, counters[i])] = coef
        return result


class BornResult(_Frozen):
    """完整 Born 推导的结果"""
    p: np.ndarray = Field(description="推导出的概率 n_i / M")
    bound: float = Field(description="|p_i − c_i²| 的上界")
    partition: RationalPartition
    expansion: AuxiliaryExpansion
    theta: float = Field(description="组合态到各分支态的平均 Fubini-Study 距离")
    spread: float = Field(description="距离的最大最小差")
    branch_probability: float = Field(description="每个分支的等概率 1/Σn_i")
    transition: np.ndarray = Field(description="参照值 |⟨ψ|ψ_i⟩|²")

    @field_validator("p", "transition", mode="before")
    @classmethod
    def _to_array(cls, v: Any) -> np.ndarray:
        return frozen(np.asarray(v, dtype=np.float64).reshape(-1))


# ==================== 现象模拟 ====================

class Scenario(_Frozen):
    """一组固定实验条件：初态、幺正演化与终态基

    初态与终态共享一个标签空间；同名标签必须指向同一射线。
    """
    label: str = Field(description="场景名称")
    initials: Dict[str, PureState] = Field(description="命名初态")
    evolution: np.ndarray = Field(description="幺正演化矩阵 U")
    finals: Dict[str, PureState] = Field(description="命名的正交归一终态，按顺序排列")

    @field_validator("evolution", mode="before")
    @classmethod
    def _unitary(cls, v: Any) -> np.ndarray:
        return frozen(require_unitary(v))

    @model_validator(mode="after")
    def _check(self) -> "Scenario":
        if not self.initials or not self.finals:
            raise EmptyInput("scenario needs at least one initial and one final state")
        dim = self.dim
        for name, state in list(self.initials.items()) + list(self.finals.items()):
            if state.dim != dim:
                raise DimensionMismatch(f"state {name!r} has dimension {state.dim}, expected {dim}")
        for name in set(self.initials) & set(self.finals):
            overlap = abs(np.vdot(self.initials[name].amplitudes, self.finals[name].amplitudes))
            if overlap < 1 - 1e-12:
                raise InvalidParameter(f"label {name!r} names two different states")

        basis = self.final_matrix()
        gram = basis.conj() @ basis.T
        if np.max(np.abs(gram - np.eye(len(self.finals)))) > 1e-10:
            raise NotOrthonormal("final states are not orthonormal within 1e-10")

        weights = self.process_probabilities().sum(axis=1)
        for name, w in zip(self.initials, weights):
            if abs(w - 1.0) > 1e-9:
                raise SpanViolation(
                    f"evolved state of {name!r} has weight {w:.12f} in the final span"
                )
        return self

    @property
    def dim(self) -> int:
        return int(self.evolution.shape[0])

    @property
    def initial_labels(self) -> List[str]:
        return list(self.initials)

    @property
    def final_labels(self) -> List[str]:
        return list(self.finals)

    @property
    def labels(self) -> List[str]:
        seen = dict.fromkeys(list(self.initials) + list(self.finals))
        return list(seen)

    def same_conditions(self, other: "Scenario", tol: float = 1e-12) -> bool:
        """结构相同即视为同一实验条件：标签顺序、演化矩阵与各射线都一致"""
        if self.dim != other.dim:
            return False
        if self.initial_labels != other.initial_labels or self.final_labels != other.final_labels:
            return False
        if np.max(np.abs(self.evolution - other.evolution)) > tol:
            return False
        pairs = list(zip(self.initials.values(), other.initials.values()))
        pairs += list(zip(self.finals.values(), other.finals.values()))
        return all(abs(np.vdot(a.amplitudes, b.amplitudes)) >= 1 - tol for a, b in pairs)

    def final_matrix(self) -> np.ndarray:
        """终态按行堆叠"""
        return np.vstack([s.amplitudes for s in self.finals.values()])

    def initial_matrix(self) -> np.ndarray:
        return np.vstack([s.amplitudes for s in self.initials.values()])

    def process_probabilities(self) -> np.ndarray:
        """P[i, j] = |⟨β_j|U α_i⟩|²，行对应初态"""
        evolved = self.initial_matrix() @ self.evolution.T
        amps = evolved @ self.final_matrix().conj().T
        return np.abs(amps) ** 2

    def resolve(self, label: str) -> PureState:
        """按标签查找初态或终态

        Raises:
            UnknownLabel: 标签不存在
        """
        if label in self.initials:
            return self.initials[label]
        if label in self.finals:
            return self.finals[label]
        raise UnknownLabel(f"label {label!r} not in scenario {self.label!r}")


class TrialLog(_Frozen):
    """现象的试验记录：有序的 (初态标签, 终态标签) 对"""
    scenario: str = Field(description="场景名称")
    seed: int = Field(description="采样种子")
    initial: np.ndarray = Field(description="每次试验的初态标签")
    final: np.ndarray = Field(description="每次试验的终态标签")
    scenario_labels: Tuple[str, ...] = Field(description="场景中出现的全部标签")
    reversed: bool = Field(default=False, description="是否为时间反演后的记录")

    @field_validator("initial", "final", mode="before")
    @classmethod
    def _to_array(cls, v: Any) -> np.ndarray:
        return frozen(np.asarray(v, dtype=str).reshape(-1))

    @model_validator(mode="after")
    def _check(self) -> "TrialLog":
        if self.initial.shape != self.final.shape:
            raise DimensionMismatch("initial and final label arrays differ in length")
        known = set(self.scenario_labels)
        used = set(np.unique(self.initial).tolist()) | set(np.unique(self.final).tolist())
        unknown = used - known
        if unknown:
            raise UnknownLabel(f"labels {sorted(unknown)} not in scenario {self.scenario!r}")
        return self

    def __len__(self) -> int:
        return int(self.initial.shape[0])

    @property
    def pairs(self) -> List[Tuple[str, str]]:
        return list(zip(self.initial.tolist(), self.final.tolist()))


class LogAnalysis(_Frozen):
    """试验记录的统计报告"""
    trials: int
    forward: Dict[str, Dict[str, float]] = Field(description="P(final | initial)")
    backward: Dict[str, Dict[str, float]] = Field(description="P(initial | final)")
    final_distribution: Dict[str, float] = Field(description="终态经验分布")
    final_entropy: float = Field(description="终态分布的香农熵（比特）")
    forward_conditional_entropy: float = Field(description="H(final | initial)，比特")
    backward_conditional_entropy: float = Field(description="H(initial | final)，比特")


class TimeDirection(str, Enum):
    """时间方向判定结果"""
    FORWARD = "Forward"
    BACKWARD = "Backward"
    UNDECIDABLE = "Undecidable"


class DirectionVerdict(_Frozen):
    """时间方向判定及两个方向的得分"""
    direction: TimeDirection
    forward_score: float = Field(description="正向模型相对经验条件频率的对数似然比")
    backward_score: float = Field(description="反向模型相对经验条件频率的对数似然比")


class MeasurementOutcome(_Frozen):
    """投影测量的结果"""
    eigenvalue: float
    post: PureState


class ProtocolResult(_Frozen):
    """交替测量协议的结果"""
    mode: str = Field(description="protective 或 projective")
    values: np.ndarray = Field(description="A, B, A, B, ... 的读数")
    constant: bool = Field(description="同一可观测量的读数是否始终相同")

    @field_validator("values", mode="before")
    @classmethod
    def _to_array(cls, v: Any) -> np.ndarray:
        return frozen(np.asarray(v, dtype=np.float64).reshape(-1))


# ==================== 模变量 ====================

class PacketSpec(_Frozen):
    """波包参数（位置单位任意，ħ = 1）"""
    shape: str = Field(default="gaussian", description="波包形状，目前仅支持 gaussian")
    sigma: float = Field(default=1.0, description="高斯宽度 σ")
    center: Optional[float] = Field(default=None, description="第一个波包中心，默认使整体居中")
    sep: float = Field(default=16.0, description="两波包间距 ℓ")
    alpha: float = Field(default=0.0, description="第二个波包的相对相位 α")
    grid: int = Field(default=1024, description="网格点数 G（2 的幂）")
    length: float = Field(default=64.0, description="周期区域长度 L")

    @model_validator(mode="after")
    def _check(self) -> "PacketSpec":
        if self.shape != "gaussian":
            raise InvalidParameter(f"unsupported packet shape {self.shape!r}")
        if self.sigma <= 0 or self.length <= 0:
            raise InvalidParameter("sigma and length must be positive")
        if self.grid < 2 or self.grid & (self.grid - 1):
            raise InvalidParameter(f"grid size {self.grid} is not a power of two")
        return self


class WavePacketGrid(_Frozen):
    """周期一维网格上的波函数"""
    samples: np.ndarray = Field(description="复波函数采样值")
    length: float = Field(description="周期区域长度 L")
    sep: float = Field(default=0.0, description="两波包间距，单波包为 0")
    alpha: float = Field(default=0.0, description="相对相位")
    overlap: float = Field(default=0.0, description="∫ f*(x) f(x−ℓ) dx 的实际值")
    spec: Optional[PacketSpec] = Field(default=None, description="生成该网格的参数")

    @field_validator("samples", mode="before")
    @classmethod
    def _to_array(cls, v: Any) -> np.ndarray:
        return frozen(as_complex_vector(v))

    @model_validator(mode="after")
    def _check(self) -> "WavePacketGrid":
        g = self.grid
        if g < 2 or g & (g - 1):
            raise InvalidParameter(f"grid size {g} is not a power of two")
        norm = float(np.sum(np.abs(self.samples) ** 2) * self.dx)
        if abs(norm - 1.0) > 1e-9:
            raise InvalidParameter(f"wavefunction norm is {norm!r}, expected 1 within 1e-9")
        return self

    @property
    def grid(self) -> int:
        return int(self.samples.shape[0])

    @property
    def dx(self) -> float:
        return self.length / self.grid

    @property
    def x(self) -> np.ndarray:
        return np.arange(self.grid) * self.dx


class ModularReport(_Frozen):
    """模动量交换报告"""
    alpha: float
    sep: float
    snap: float = Field(description="ℓ 对齐到网格时的偏移")
    translation_before: complex
    translation_after: complex
    delta_translation: complex
    expected_delta: complex = Field(description="0.5 (e^{iα} − 1)")
    deviation: float = Field(description="|Δ − expected|")
    moment_deltas: Dict[int, float] = Field(description="n -> Δ⟨p^n⟩")


# ==================== 和乐引擎 ====================

SUPPORTED_FACTORS = ("U1", "SU2", "SU3", "LORENTZ", "POINCARE")
SPACETIME_FACTORS = ("LORENTZ", "POINCARE")


class FactorSpec(_Frozen):
    """单个群因子"""
    kind: str = Field(description="U1 / SU2 / SU3 / LORENTZ / POINCARE")
    charge: float = Field(default=1.0, description="U(1) 因子的耦合常数 e")

    @field_validator("kind", mode="before")
    @classmethod
    def _kind(cls, v: Any) -> str:
        kind = str(v).upper()
        if kind not in SUPPORTED_FACTORS:
            raise UnsupportedFactor(f"unsupported group factor {v!r}")
        return kind


class GroupSpec(_Frozen):
    """直积群 S = P × G 的因子列表"""
    factors: Tuple[FactorSpec, ...]

    @field_validator("factors", mode="before")
    @classmethod
    def _factors(cls, v: Any) -> Tuple[Any, ...]:
        items = []
        for item in v:
            if isinstance(item, str):
                kind, _, charge = item.partition(":")
                item = {"kind": kind} if not charge else {"kind": kind, "charge": float(charge)}
            items.append(item)
        return tuple(items)

    @model_validator(mode="after")
    def _check(self) -> "GroupSpec":
        if not self.factors:
            raise EmptyInput("group spec has no factors")
        spacetime = [f for f in self.factors if f.kind in SPACETIME_FACTORS]
        if len(spacetime) > 1:
            raise InvalidParameter("at most one LORENTZ or POINCARE factor is allowed")
        return self

    @property
    def tag(self) -> str:
        parts = []
        for f in self.factors:
            parts.append(f"U1(e={f.charge:g})" if f.kind == "U1" else f.kind)
        return "+".join(parts)


class ConnectionField(_Frozen):
    """统一联络的分量：焊接形式 θ、自旋联络 ω、规范势 A

    分量由预设闭式或网格采样给出，见 runtime.fields。
    """
    chart_dim: int = Field(description="坐标卡维数 d（2..4）")
    preset: str = Field(description="预设名称")
    params: Dict[str, Any] = Field(default_factory=dict, description="预设参数")
    chart: Optional[List[Tuple[float, float]]] = Field(default=None, description="坐标卡包围盒，默认 [−10, 10]^d")

    @model_validator(mode="after")
    def _check(self) -> "ConnectionField":
        if not 2 <= self.chart_dim <= 4:
            raise InvalidParameter(f"chart dimension must be 2..4, got {self.chart_dim}")
        if self.chart is not None and len(self.chart) != self.chart_dim:
            raise DimensionMismatch("chart box must have one interval per coordinate")
        return self

    @property
    def box(self) -> np.ndarray:
        if self.chart is None:
            return np.tile([-10.0, 10.0], (self.chart_dim, 1))
        return np.asarray(self.chart, dtype=np.float64)


class Curve(_Frozen):
    """坐标卡中的折线曲线"""
    vertices: np.ndarray = Field(description="顶点坐标，形状 (k, d)")

    @field_validator("vertices", mode="before")
    @classmethod
    def _to_array(cls, v: Any) -> np.ndarray:
        arr = np.asarray(v, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[0] < 2:
            raise InvalidParameter("curve needs at least two vertices given as rows")
        if not np.all(np.isfinite(arr)):
            raise InvalidParameter("curve vertices must be finite")
        return frozen(arr)

    @property
    def dim(self) -> int:
        return int(self.vertices.shape[1])

    @property
    def start(self) -> np.ndarray:
        return self.vertices[0]

    @property
    def end(self) -> np.ndarray:
        return self.vertices[-1]

    def is_closed(self, tol: float = 1e-12) -> bool:
        return bool(np.max(np.abs(self.end - self.start)) <= tol)

    def reversed(self) -> "Curve":
        return Curve(vertices=self.vertices[::-1])

    def then(self, other: "Curve") -> "Curve":
        """先走 self 再走 other（other 必须从 self 的终点出发）"""
        if other.dim != self.dim or np.max(np.abs(other.start - self.end)) > 1e-12:
            raise InvalidParameter("curves do not join")
        return Curve(vertices=np.vstack([self.vertices, other.vertices[1:]]))


class GroupElement(_Frozen):
    """表示空间中的群元

    blocks 记录直和中每个因子的 (kind, 起始下标, 尺寸)。
    幺正因子 ‖g†g − I‖ ≤ 1e−9；仿射 Poincaré 块的最后一行严格为 (0, ..., 0, 1)。
    """
    matrix: np.ndarray
    representation: str = Field(description="表示标签")
    blocks: Tuple[Tuple[str, int, int], ...]

    @field_validator("matrix", mode="before")
    @classmethod
    def _to_array(cls, v: Any) -> np.ndarray:
        return frozen(np.asarray(v, dtype=np.complex128))

    @model_validator(mode="after")
    def _check(self) -> "GroupElement":
        for kind, start, size in self.blocks:
            block = self.matrix[start:start + size, start:start + size]
            if kind == "POINCARE":
                expected = np.zeros(size)
                expected[-1] = 1.0
                if not np.array_equal(block[-1], expected):
                    raise InvalidParameter("affine bottom row is not (0, ..., 0, 1)")
            elif kind != "LORENTZ":
                drift = np.max(np.abs(block.conj().T @ block - np.eye(size)))
                if drift > 1e-9:
                    raise InvalidParameter(f"{kind} block drifted from unitarity by {drift:.3e}")
        return self


class HolonomyResult(_Frozen):
    """和乐及其 Richardson 误差估计"""
    element: GroupElement
    error_estimate: float
    steps: int = Field(description="每条折线边的步数")


class FieldStrengths(_Frozen):
    """小回路展开的三个二形式：挠率 Q、曲率 R、规范场强 F

    分量按 [μ, ν, ...] 存储，μ、ν 为坐标下标。
    """
    torsion: np.ndarray = Field(description="Q_{μν}^a，形状 (d, d, 4)")
    curvature: np.ndarray = Field(description="R_{μν}^a_b，形状 (d, d, 4, 4)")
    field: np.ndarray = Field(description="F_{μν}^k，形状 (d, d, K)")
    error_estimate: float = Field(description="有限差分误差估计")

    @field_validator("torsion", "curvature", "field", mode="before")
    @classmethod
    def _to_array(cls, v: Any) -> np.ndarray:
        return frozen(np.asarray(v, dtype=np.float64))


class SmallLoopReport(_Frozen):
    """小回路检查报告"""
    x: Tuple[float, ...]
    plane: Tuple[int, int]
    a: float
    g_loop: np.ndarray
    predicted: np.ndarray
    residual: float

    @field_validator("g_loop", "predicted", mode="before")
    @classmethod
    def _to_array(cls, v: Any) -> np.ndarray:
        return frozen(np.asarray(v, dtype=np.complex128))


class PhaseFactor(_Frozen):
    """电磁相因子 exp(−ie∮A)"""
    value: complex
    line_integral: float = Field(description="∮A·dx")
    winding: Optional[int] = Field(default=None, description="绕螺线管轴的卷绕数，仅 solenoid 预设")


class GaugeTransform(_Frozen):
    """规范变换 h(x) = expm(i Σ_μ x^μ X_μ)

    coefficients[μ, k] 是 X_μ 在第 k 个规范生成元上的系数。
    """
    coefficients: np.ndarray

    @field_validator("coefficients", mode="before")
    @classmethod
    def _to_array(cls, v: Any) -> np.ndarray:
        arr = np.asarray(v, dtype=np.float64)
        if arr.ndim != 2:
            raise InvalidParameter("gauge transform coefficients must be a (d, K) table")
        return frozen(arr)


# ==================== 命令行 ====================

SUBCOMMANDS = ("born", "phenomenon", "modular", "holonomy")


class RunConfig(_Frozen):
    """一次运行的完整配置：子命令、参数、种子、输出格式与路径"""
    subcommand: str
    parameters: Dict[str, Any] = Field(default_factory=dict)
    seed: int = Field(default=0, description="64 位无符号种子")
    format: str = Field(default="json", description="json 或 csv")
    out: Optional[str] = Field(default=None, description="输出路径，缺省时写到标准输出")

    @model_validator(mode="after")
    def _check(self) -> "RunConfig":
        if self.subcommand not in SUBCOMMANDS:
            raise BadFlag(f"unknown subcommand {self.subcommand!r}; choose one of {', '.join(SUBCOMMANDS)}")
        if not 0 <= self.seed < 2 ** 64:
            raise BadFlag(f"--seed must be an unsigned 64-bit integer, got {self.seed}")
        if self.format not in ("json", "csv"):
            raise BadFlag(f"--format must be json or csv, got {self.format!r}")
        if self.format == "csv" and not self.out:
            raise BadFlag("--format csv requires --out")
        return self


def parse_json_object(data: Any, what: str) -> Dict[str, Any]:
    """确认 JSON 顶层是对象"""
    if not isinstance(data, dict):
        raise SchemaError(f"{what} must be a JSON object")
    return data


class GroupCatalog(_Frozen):
    """build_group 的结果：直和表示中的全部生成元

    - gauge[k] 为第 k 个规范生成元 T_k，structure[k, m, n] = C^k_mn，满足 [T_m, T_n] = i C^k_mn T_k
    - translations[a] = P_a（仅 POINCARE）
    - lorentz[b, a] = M^b_a（LORENTZ 或 POINCARE）
    """
    spec: GroupSpec
    dim: int
    blocks: Tuple[Tuple[str, int, int], ...]
    gauge: np.ndarray
    gauge_labels: Tuple[str, ...]
    gauge_slots: Dict[str, Tuple[int, int]] = Field(description="每种规范因子（首次出现）的生成元下标区间")
    structure: np.ndarray
    translations: Optional[np.ndarray] = None
    lorentz: Optional[np.ndarray] = None

    @field_validator("gauge", "structure", "translations", "lorentz", mode="after")
    @classmethod
    def _read_only(cls, v: Optional[np.ndarray]) -> Optional[np.ndarray]:
        # build_group 的结果被缓存共享
        return None if v is None else frozen(v)

    @property
    def has_spacetime(self) -> bool:
        return self.lorentz is not None
