# -*- coding: utf-8 -*-
"""
问题实例仓库

SaddleProblem 与 JSON 文档互转。K 以行优先稠密矩阵存储，g/h 存函数描述。
"""

import json
from pathlib import Path
from typing import Any

from loguru import logger

from src.common.constants import INSTANCE_VERSION
from src.common.exceptions import ConfigError
from src.core.coupling import DenseCoupling, DiagonalCoupling, LinearCoupling
from src.core.problem import SaddleProblem
from src.prox.functions import prox_function_from_dict


def coupling_to_dict(coupling: LinearCoupling) -> dict[str, Any]:
    if isinstance(coupling, DiagonalCoupling):
        return {"kind": "diagonal", "diagonal": coupling.diagonal.tolist()}
    return {"kind": "dense", "matrix": coupling.to_matrix().tolist(), "norm_bound": coupling.norm_bound}


def coupling_from_dict(data: dict[str, Any]) -> LinearCoupling:
    kind = data.get("kind", "dense")
    if kind == "diagonal":
        return DiagonalCoupling(data["diagonal"])
    if kind == "dense":
        return DenseCoupling(data["matrix"], norm_bound=data.get("norm_bound"))
    raise ConfigError(f"未知耦合类型: {kind}", field="coupling.kind")


def problem_to_dict(problem: SaddleProblem) -> dict[str, Any]:
    """
    问题转 JSON 文档

    Returns
    -------
    dict
        {version, n, m, mu, nu, coupling, g, h}
    """
    return {
        "version": INSTANCE_VERSION,
        "n": problem.n,
        "m": problem.m,
        "mu": problem.mu,
        "nu": problem.nu,
        "coupling": coupling_to_dict(problem.coupling),
        "g": problem.g.to_dict(),
        "h": problem.h.to_dict(),
    }


def problem_from_dict(data: dict[str, Any]) -> SaddleProblem:
    """
    由 JSON 文档构造问题

    Raises
    ------
    ConfigError
        版本不支持或缺少字段
    """
    version = data.get("version")
    if version != INSTANCE_VERSION:
        raise ConfigError(f"实例版本不支持: {version}", field="version")
    try:
        problem = SaddleProblem(
            coupling=coupling_from_dict(data["coupling"]),
            g=prox_function_from_dict(data["g"]),
            h=prox_function_from_dict(data["h"]),
        )
    except KeyError as e:
        raise ConfigError(f"实例缺少字段: {e}", field=str(e)) from e
    if "n" in data and data["n"] != problem.n:
        raise ConfigError(f"n 与矩阵维度不符: {data['n']} != {problem.n}", field="n")
    if "m" in data and data["m"] != problem.m:
        raise ConfigError(f"m 与矩阵维度不符: {data['m']} != {problem.m}", field="m")
    return problem


def save_problem(problem: SaddleProblem, path: Path) -> None:
    """保存实例 JSON"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(problem_to_dict(problem), f, indent=2)
    logger.info(f"实例已保存: {path}")


def load_problem(path: Path) -> SaddleProblem:
    """
    读取实例 JSON

    Raises
    ------
    FileNotFoundError
        文件不存在
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"实例文件不存在: {path}")
    with open(path, "r", encoding="utf-8") as f:
        data = json.load(f)
    return problem_from_dict(data)
