"""
报告导出模块
把运行结果转换为确定性的 JSON 报告，并把表格数据写成 CSV

报告不含时间戳或主机信息，相同的运行配置产生逐字节相同的输出。
"""
import json
import math
import os
from enum import Enum
from typing import Any, Dict, Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel

from lawless import __version__
from lawless.models import RunConfig
from lawless.numerics import encode_complex


def to_jsonable(value: Any) -> Any:
    """
    递归转换为 JSON 兼容结构

    - pydantic 模型按字段展开
    - 复数与复数组编码为 [re, im] 嵌套列表
    - 非有限浮点数写成字符串 "inf" / "-inf" / "nan"

    Args:
        value: 任意结果对象

    Returns:
        只包含 dict / list / str / int / float / bool / None 的结构
    """
    if isinstance(value, BaseModel):
        return {name: to_jsonable(getattr(value, name)) for name in type(value).model_fields}
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        if np.iscomplexobj(value):
            return encode_complex(value)
        return to_jsonable(value.tolist())
    if isinstance(value, (complex, np.complexfloating)):
        return encode_complex(value)
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        number = float(value)
        if math.isfinite(number):
            return number
        return "nan" if math.isnan(number) else ("inf" if number > 0 else "-inf")
    return value


def build_report(run: RunConfig, resolved: Dict[str, Any], results: Dict[str, Any]) -> Dict[str, Any]:
    """自描述报告：输入参数、种子、版本、解析后的配置与结果"""
    return {
        "version": __version__,
        "subcommand": run.subcommand,
        "seed": run.seed,
        "parameters": to_jsonable(run.parameters),
        "config": to_jsonable(resolved),
        "results": to_jsonable(results),
    }


def dumps_report(report: Dict[str, Any]) -> str:
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _ensure_parent(path: str) -> None:
    output_dir = os.path.dirname(path)
    if output_dir:
        os.makedirs(output_dir, exist_ok=True)


def write_report(report: Dict[str, Any], path: str) -> None:
    """写出 JSON 报告（换行符固定为 \\n）"""
    _ensure_parent(path)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(dumps_report(report))


def write_table(frame: pd.DataFrame, path: str) -> None:
    """写出 CSV 表格，不带行索引"""
    _ensure_parent(path)
    frame.to_csv(path, index=False, lineterminator="\n")


def report_path_for(out: str) -> str:
    """CSV 模式下 JSON 报告的路径：同名 .json 后缀"""
    root, ext = os.path.splitext(out)
    return (root if ext.lower() == ".csv" else out) + ".json"


def trials_path_for(out: str) -> str:
    """CSV 模式下试验记录的路径：<out>.trials.csv"""
    root, ext = os.path.splitext(out)
    return (root if ext.lower() == ".csv" else out) + ".trials.csv"


def matrix_frame(matrix: np.ndarray, name: Optional[str] = None) -> pd.DataFrame:
    """把矩阵展开成 (row, col, re, im) 长表"""
    mat = np.asarray(matrix, dtype=np.complex128)
    rows, cols = np.indices(mat.shape)
    frame = pd.DataFrame({
        "row": rows.reshape(-1),
        "col": cols.reshape(-1),
        "re": mat.real.reshape(-1),
        "im": mat.imag.reshape(-1),
    })
    if name is not None:
        frame.insert(0, "name", name)
    return frame
