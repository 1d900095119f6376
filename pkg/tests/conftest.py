"""
测试共享夹具
"""
from pathlib import Path

import pytest

from lawless.config import reset_config

DATA_DIR = Path(__file__).resolve().parent.parent / "data"


@pytest.fixture(autouse=True)
def _fresh_config():
    """每个测试前后清空配置缓存，环境变量修改不会泄漏到其他测试"""
    reset_config()
    yield
    reset_config()


@pytest.fixture
def data_dir() -> Path:
    return DATA_DIR
