# -*- coding: utf-8 -*-
"""
参数规划仓库

PlanReport 的 JSON 读写。读取后重新校验，不信任文件中的余量。
"""

import json
from pathlib import Path
from typing import Any

from loguru import logger

from src.algorithm.planner import AuxCertificate, PlanReport, StepPlan, validate_plan
from src.common.constants import ConditionFamily, PlanMode
from src.common.exceptions import ConfigError


def report_from_dict(data: dict[str, Any]) -> PlanReport:
    """由 JSON 文档还原规划报告，余量按当前实现重算"""
    try:
        mode = PlanMode(data["mode"])
        plan = StepPlan(**{k: float(data["plan"][k]) for k in ("tau", "sigma", "alpha", "beta", "xi")})
        c = data["cert"]
        cert = AuxCertificate(
            zeta=int(c["zeta"]),
            eta1=float(c["eta1"]), eta2=float(c["eta2"]),
            eta3=float(c["eta3"]), eta4=float(c["eta4"]),
            family=ConditionFamily(c["family"]),
        )
        mu, nu, normk = float(data["mu"]), float(data["nu"]), float(data["normk"])
    except (KeyError, ValueError, TypeError) as e:
        raise ConfigError(f"规划文件格式错误: {e}", field="plan") from e
    margins = tuple(validate_plan(plan, cert, mu, nu, normk, mode))
    return PlanReport(plan=plan, cert=cert, mode=mode, mu=mu, nu=nu, normk=normk, margins=margins)


def save_plan_report(report: PlanReport, path: Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(report.to_dict(), f, indent=2)
    logger.info(f"参数规划已保存: {path}")


def load_plan_report(path: Path) -> PlanReport:
    """
    读取规划 JSON

    Raises
    ------
    FileNotFoundError
        文件不存在
    ConfigError
        格式错误
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"规划文件不存在: {path}")
    with open(path, "r", encoding="utf-8") as f:
        return report_from_dict(json.load(f))
