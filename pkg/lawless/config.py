"""
配置管理
管理数值容差、并行度、积分步数和日志级别

所有字段都可以通过 LAWLESS_* 环境变量覆盖；项目根目录下的 .env.local / .env 在导入时自动加载。
"""
import logging
import os
from typing import Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field


# 在模块导入阶段自动加载默认的 .env 文件，支持 .env.local 优先级
_PROJECT_ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), ".."))
for _env_filename in (".env.local", ".env"):
    _env_path = os.path.join(_PROJECT_ROOT, _env_filename)
    if os.path.exists(_env_path):
        # override=False 保留 shell 中显式设置的变量
        load_dotenv(_env_path, override=False)


_LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


def _env_number(name: str, cast, low, high):
    """读取数值型环境变量，非法值返回 None，越界值截断到 [low, high]"""
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return None
    try:
        value = cast(float(raw)) if cast is int else cast(raw)
    except ValueError:
        return None
    return min(max(value, low), high)


class LawlessConfig(BaseModel):
    """运行配置

    环境变量优先级低于显式传入的参数：
    - LAWLESS_LOG: 日志级别（默认 WARNING）
    - LAWLESS_M_CAP: 有理划分分母上限（默认 1e8）
    - LAWLESS_PARALLEL_WORKERS: 试验采样线程数
    - LAWLESS_TRIAL_CHUNK: 每个采样块的试验数（向上取整为 4 的倍数）
    - LAWLESS_HOLONOMY_STEPS / LAWLESS_LOOP_STEPS: 和乐积分每条边的步数
    - LAWLESS_FD_STEP: 解析预设场的有限差分步长
    """

    log_level: str = Field(default="WARNING", description="日志级别")
    m_cap: int = Field(default=10**8, description="有理划分搜索的分母上限")
    parallel_workers: int = Field(default=1, description="试验采样的并行线程数")
    trial_chunk: int = Field(default=65536, description="每个采样块包含的试验数")
    holonomy_steps: int = Field(default=256, description="和乐积分中每条折线边的默认步数")
    loop_steps: int = Field(default=64, description="小回路检查中每条边的步数")
    fd_step: float = Field(default=1e-4, description="解析预设场有限差分步长")

    def __init__(self, **data):
        if "log_level" not in data:
            env_level = os.getenv("LAWLESS_LOG", "WARNING").upper()
            if env_level in _LOG_LEVELS:
                data["log_level"] = env_level

        env_fields = (
            ("m_cap", "LAWLESS_M_CAP", int, 2, 10**12),
            ("parallel_workers", "LAWLESS_PARALLEL_WORKERS", int, 1, 64),
            ("trial_chunk", "LAWLESS_TRIAL_CHUNK", int, 4, 1 << 24),
            ("holonomy_steps", "LAWLESS_HOLONOMY_STEPS", int, 1, 1 << 20),
            ("loop_steps", "LAWLESS_LOOP_STEPS", int, 1, 1 << 16),
            ("fd_step", "LAWLESS_FD_STEP", float, 1e-8, 1e-1),
        )
        for field_name, env_name, cast, low, high in env_fields:
            if field_name not in data:
                value = _env_number(env_name, cast, low, high)
                if value is not None:
                    data[field_name] = value

        super().__init__(**data)

        # 采样块按 Philox 的 4 字输出对齐
        if self.trial_chunk % 4:
            self.trial_chunk += 4 - self.trial_chunk % 4

    def resolved(self) -> dict:
        """返回写入报告的配置快照（不含日志级别，保证报告与详细程度无关）"""
        return self.model_dump(exclude={"log_level"})


_config: Optional[LawlessConfig] = None


def get_config() -> LawlessConfig:
    """返回进程级缓存的配置实例"""
    global _config
    if _config is None:
        _config = LawlessConfig()
    return _config


def reset_config() -> None:
    """清空缓存（测试中修改环境变量后使用）"""
    global _config
    _config = None


def setup_logging(level: Optional[str] = None) -> None:
    """安装 rich 日志处理器，输出到 stderr

    Args:
        level: 日志级别，默认取配置中的 log_level
    """
    from rich.console import Console
    from rich.logging import RichHandler

    level_name = (level or get_config().log_level).upper()
    root = logging.getLogger("lawless")
    root.setLevel(getattr(logging, level_name, logging.WARNING))
    if not any(isinstance(h, RichHandler) for h in root.handlers):
        handler = RichHandler(console=Console(stderr=True), show_path=False, rich_tracebacks=False)
        handler.setFormatter(logging.Formatter("%(name)s: %(message)s"))
        root.addHandler(handler)
