"""
工具函数模块
"""

from pathlib import Path
from typing import Any, Dict, Optional

import numpy as np

from app.config import settings


RNG_NAME = "PCG64"


def save_file(content: str, filename: str, directory: Path) -> str:
    """保存文本文件到目录"""
    directory.mkdir(parents=True, exist_ok=True)
    file_path = directory / filename
    with open(file_path, "w", encoding="utf-8", newline="\n") as f:
        f.write(content)
    return str(file_path)


def read_file(file_path: Path) -> str:
    """读取文本文件"""
    with open(file_path, "r", encoding="utf-8") as f:
        return f.read()


def load_fixture(name: str) -> str:
    """
    读取内置样例文件

    Args:
        name: 文件名（相对于 app/fixtures/）

    Returns:
        文件文本
    """
    return read_file(settings.FIXTURES_DIR / name)


def derive_seed(master_seed: int, index: int) -> int:
    """
    由主种子和序号派生 64 位子种子

    使用 SeedSequence 对 (master_seed, index) 做稳定哈希，跨平台一致
    """
    sequence = np.random.SeedSequence([master_seed, index])
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def derive_rng(master_seed: int, index: int) -> np.random.Generator:
    """由 (master_seed, index) 派生独立的 PCG64 生成器"""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([master_seed, index])))


def apply_overrides(base: Dict[str, Any], overrides: Optional[Dict[str, Any]]) -> Dict[str, Any]:
    """
    将覆盖参数应用到基础参数

    值为 None 的覆盖项被忽略

    Args:
        base: 基础参数
        overrides: 覆盖参数

    Returns:
        合并后的新字典
    """
    result = dict(base)
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        result[key] = value
    return result
