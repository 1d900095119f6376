"""
数值工具
复数数组转换、幺正/厄米校验以及 [re, im] 编码
"""
from typing import Any, Sequence

import numpy as np

from lawless.errors import DimensionMismatch, EmptyInput, NotHermitian, NotUnitary, SchemaError


def as_complex_vector(values: Any) -> np.ndarray:
    """把任意序列转换为一维 complex128 数组

    Raises:
        EmptyInput: 序列为空
    """
    arr = np.asarray(values, dtype=np.complex128).reshape(-1)
    if arr.size == 0:
        raise EmptyInput("amplitude sequence is empty")
    return arr


def as_square_matrix(values: Any, name: str = "matrix") -> np.ndarray:
    """转换为方阵 complex128 数组"""
    mat = np.asarray(values, dtype=np.complex128)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {mat.shape}")
    return mat


def frozen(arr: np.ndarray) -> np.ndarray:
    """返回只读副本"""
    out = np.array(arr, copy=True)
    out.setflags(write=False)
    return out


def is_unitary(mat: np.ndarray, tol: float = 1e-10) -> bool:
    ident = np.eye(mat.shape[0])
    return bool(np.max(np.abs(mat.conj().T @ mat - ident)) <= tol)


def is_hermitian(mat: np.ndarray, tol: float = 1e-10) -> bool:
    return bool(np.max(np.abs(mat - mat.conj().T)) <= tol)


def require_unitary(mat: Any, dim: int = None, tol: float = 1e-10) -> np.ndarray:
    """校验并返回幺正矩阵

    Raises:
        DimensionMismatch: 维度与 dim 不一致
        NotUnitary: U†U 偏离单位阵超过 tol
    """
    u = as_square_matrix(mat, "unitary")
    if dim is not None and u.shape[0] != dim:
        raise DimensionMismatch(f"unitary has dimension {u.shape[0]}, expected {dim}")
    if not is_unitary(u, tol):
        raise NotUnitary(f"matrix is not unitary within {tol:g}")
    return u


def require_hermitian(mat: Any, dim: int = None, tol: float = 1e-10) -> np.ndarray:
    """校验并返回厄米矩阵"""
    a = as_square_matrix(mat, "observable")
    if dim is not None and a.shape[0] != dim:
        raise DimensionMismatch(f"observable has dimension {a.shape[0]}, expected {dim}")
    if not is_hermitian(a, tol):
        raise NotHermitian(f"observable is not Hermitian within {tol:g}")
    return a


def encode_complex(value: Any) -> Any:
    """把复数（或复数组）编码为 [re, im] 嵌套列表"""
    arr = np.asarray(value, dtype=np.complex128)
    if arr.ndim == 0:
        return [float(arr.real), float(arr.imag)]
    return [encode_complex(v) for v in arr]


def decode_complex(value: Any) -> np.ndarray:
    """解析 [re, im] 嵌套列表

    Raises:
        SchemaError: 结构不合法
    """
    try:
        arr = np.asarray(value, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"expected nested [re, im] pairs: {exc}") from exc
    if arr.ndim == 0 or arr.shape[-1] != 2:
        raise SchemaError(f"expected [re, im] pairs, got shape {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def matrix_norm(mat: np.ndarray) -> float:
    """谱范数"""
    return float(np.linalg.norm(mat, 2))


def stack_states(vectors: Sequence[np.ndarray]) -> np.ndarray:
    """把等维向量堆叠为矩阵（每行一个态）"""
    dims = {v.shape[0] for v in vectors}
    if len(dims) > 1:
        raise DimensionMismatch(f"states have mixed dimensions {sorted(dims)}")
    return np.vstack(vectors)
