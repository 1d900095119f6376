"""
异常定义
所有面向用户的错误都继承自 LawlessError，并携带 CLI 退出码

退出码约定：2 表示输入/校验错误，3 表示数值容差失败。
注意：这些异常不继承 ValueError，这样在 pydantic 校验器内抛出时不会被包装成 ValidationError。
"""


class LawlessError(Exception):
    """工具箱基础异常"""
    exit_code: int = 1


class InputError(LawlessError):
    """输入或前置条件不满足"""
    exit_code = 2


class ToleranceError(LawlessError):
    """数值计算无法满足要求的容差"""
    exit_code = 3


# ---- 态空间几何 ----

class EmptyInput(InputError):
    """输入序列为空"""


class ZeroVector(InputError):
    """向量范数过小，无法归一化"""


class DimensionMismatch(InputError):
    """维度不一致"""


class AmbiguousMidpoint(InputError):
    """正交态之间的测地线不唯一"""


# ---- Born 推导 ----

class LengthMismatch(InputError):
    """序列长度不一致"""


class InvalidParameter(InputError):
    """参数取值超出允许范围"""


class TooTight(ToleranceError):
    """有理划分在分母上限内达不到要求精度"""


class ToleranceExceeded(ToleranceError):
    """结果与参考值的偏差超出报告的误差界"""


# ---- 现象模拟 ----

class UnknownLabel(InputError):
    """标签不存在于场景中"""


class SpanViolation(InputError):
    """演化后的初态不在终态基张成的子空间内"""


class NotUnitary(InputError):
    """矩阵不是幺正的"""


class NotHermitian(InputError):
    """矩阵不是厄米的"""


class NotOrthonormal(InputError):
    """终态基不正交归一"""


class EmptyLog(InputError):
    """试验记录为空"""


# ---- 模变量 ----

class OverlapViolation(InputError):
    """两个波包重叠过大"""


class DomainTooSmall(InputError):
    """计算区域或网格分辨率不足以容纳波包"""


class MomentTooHigh(InputError):
    """动量矩阶数超过上限"""


# ---- 和乐引擎 ----

class UnsupportedFactor(InputError):
    """不支持的群因子"""


class OutOfChart(InputError):
    """点不在坐标卡范围内"""


class NonDifferentiable(InputError):
    """场在该点不可微"""


class NotClosed(InputError):
    """曲线不闭合"""


class NotComplexStructure(InputError):
    """X² 不等于 -I"""


class DoesNotCommute(InputError):
    """X 与表示元素不对易"""


class NonIntegralCharge(InputError):
    """分解得到的荷不是整数"""


# ---- 命令行 ----

class BadFlag(InputError):
    """命令行参数非法"""


class FileNotFound(InputError):
    """引用的文件不存在"""


class SchemaError(InputError):
    """配置文件结构不符合要求"""
