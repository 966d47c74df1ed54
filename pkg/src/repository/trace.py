# -*- coding: utf-8 -*-
"""
轨迹仓库

轨迹CSV（标量列 + "# key: value" 文件头）与完整迭代点JSON的读写。
浮点数以 17 位有效数字写出，相同输入产生逐字节相同的文件。
"""

import json
import math
from collections.abc import Iterable
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd
from loguru import logger

from src.algorithm.planner import StepPlan
from src.algorithm.solver import ConstantSchedule, Trace, TraceRecord
from src.common.constants import TRACE_VERSION, TraceColumns
from src.common.exceptions import ConfigError, TraceMismatchError
from src.diagnostics.checks import BoundCheck

_FLOAT_FORMAT = "%.17g"
_HEADER_PREFIX = "# "

# 余量列与检查 id 的对应
_MARGIN_COLUMNS = {
    TraceColumns.MARGIN_ITERATE_SUM: "iterate_sum",
    TraceColumns.MARGIN_ITERATE_X: "iterate_x",
    TraceColumns.MARGIN_ITERATE_Y: "iterate_y",
    TraceColumns.MARGIN_VALUE_UPPER: "value_upper",
    TraceColumns.MARGIN_VALUE_LOWER: "value_lower",
}

# 文件头中与规划比对的字段
PLAN_FIELDS = ("tau", "sigma", "alpha", "beta", "xi")


def _fmt(value: Any) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def build_header(trace: Trace, mode: str | None, seed: int | None) -> dict[str, str]:
    """
    轨迹文件头

    Returns
    -------
    dict[str, str]
        trace_version、规划常数、模式、种子、维度、停止原因
    """
    sched = trace.schedule
    header: dict[str, Any] = {"trace_version": TRACE_VERSION}
    if isinstance(sched, ConstantSchedule):
        header.update(tau=sched.tau_value, sigma=sched.sigma_value,
                      alpha=sched.alpha_value, beta=sched.beta_value)
    header["xi"] = trace.xi
    header["mode"] = mode if mode is not None else "explicit"
    header["seed"] = seed if seed is not None else "none"
    first = trace.records[0]
    header["n"] = first.x.shape[0]
    header["m"] = first.y.shape[0]
    header["stop_reason"] = trace.stop_reason
    return {k: _fmt(v) for k, v in header.items()}


def trace_to_frame(trace: Trace, checks: Iterable[BoundCheck] = ()) -> pd.DataFrame:
    """标量列表，余量列取自 checks（缺失为 NaN）"""
    slack_by = {(c.id, c.k): c.slack for c in checks}
    rows = []
    for rec in trace.records:
        row = {
            TraceColumns.K: rec.k,
            TraceColumns.DIST2_X: rec.dist2_x,
            TraceColumns.DIST2_Y: rec.dist2_y,
            TraceColumns.F_HAT: rec.f_hat,
            TraceColumns.GAP_UPPER: rec.gap_upper,
            TraceColumns.GAP_LOWER: rec.gap_lower,
        }
        for col, check_id in _MARGIN_COLUMNS.items():
            row[col] = slack_by.get((check_id, rec.k), math.nan)
        rows.append(row)
    return pd.DataFrame(rows, columns=list(TraceColumns.ALL))


def write_trace_csv(path: Path, frame: pd.DataFrame, header: dict[str, str]) -> None:
    """写轨迹CSV（先写文件头注释行）"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        for key, value in header.items():
            f.write(f"{_HEADER_PREFIX}{key}: {value}\n")
        frame.to_csv(f, index=False, float_format=_FLOAT_FORMAT, na_rep="nan", lineterminator="\n")
    logger.info(f"轨迹已写入: {path} ({len(frame)} 行)")


def read_trace_csv(path: Path) -> tuple[dict[str, str], pd.DataFrame]:
    """
    读轨迹CSV

    Returns
    -------
    tuple[dict[str, str], pd.DataFrame]
        文件头与数据表

    Raises
    ------
    FileNotFoundError
        文件不存在
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"轨迹文件不存在: {path}")
    header: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            if not line.startswith(_HEADER_PREFIX.strip()):
                break
            key, _, value = line[len(_HEADER_PREFIX):].partition(":")
            header[key.strip()] = value.strip()
    frame = pd.read_csv(path, comment="#")
    return header, frame


def check_header_matches_plan(header: dict[str, str], plan: StepPlan, rel_tol: float = 1e-12) -> None:
    """
    文件头参数与规划比对

    Raises
    ------
    TraceMismatchError
        任一参数不一致或缺失
    """
    for name in PLAN_FIELDS:
        raw = header.get(name)
        expected = getattr(plan, name)
        if raw is None:
            raise TraceMismatchError(name, None, expected)
        value = float(raw)
        if abs(value - expected) > rel_tol * max(1.0, abs(expected)):
            raise TraceMismatchError(name, value, expected)


# ============================================================
# 完整迭代点
# ============================================================

def _vec_or_none(arr: np.ndarray | None) -> list[float] | None:
    return None if arr is None else arr.tolist()


def _num_or_none(value: float) -> float | None:
    return None if math.isnan(value) else value


def write_iterates_json(path: Path, trace: Trace, header: dict[str, str]) -> None:
    """
    写完整迭代点JSON（仅支持常数参数序列）

    Raises
    ------
    ConfigError
        参数序列不可序列化
    """
    if not isinstance(trace.schedule, ConstantSchedule):
        raise ConfigError("仅常数参数序列可写入迭代点文件", field="schedule")
    doc = {
        "header": header,
        "records": [
            {
                "k": r.k,
                "x": r.x.tolist(), "y": r.y.tolist(),
                "x_bar": r.x_bar.tolist(), "y_bar": r.y_bar.tolist(),
                "x_hat": _vec_or_none(r.x_hat), "y_hat": _vec_or_none(r.y_hat),
                "f_hat": _num_or_none(r.f_hat),
            }
            for r in trace.records
        ],
    }
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(doc, f)
    logger.info(f"迭代点已写入: {path}")


def read_iterates_json(path: Path) -> tuple[dict[str, str], Trace]:
    """
    读完整迭代点JSON，还原为常数参数轨迹（不含鞍点信息）

    Raises
    ------
    FileNotFoundError
        文件不存在
    ConfigError
        文件头缺少参数或版本不支持
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"迭代点文件不存在: {path}")
    with open(path, "r", encoding="utf-8") as f:
        doc = json.load(f)
    header = {k: str(v) for k, v in doc.get("header", {}).items()}
    if header.get("trace_version") != str(TRACE_VERSION):
        raise ConfigError(f"轨迹版本不支持: {header.get('trace_version')}", field="trace_version")
    try:
        schedule = ConstantSchedule(
            float(header["tau"]), float(header["sigma"]), float(header["alpha"]), float(header["beta"]),
        )
        xi = float(header["xi"])
    except KeyError as e:
        raise ConfigError(f"迭代点文件头缺少字段: {e}", field=str(e)) from e

    def arr(value: list[float] | None) -> np.ndarray | None:
        return None if value is None else np.asarray(value, dtype=np.float64)

    records = [
        TraceRecord(
            k=int(r["k"]),
            x=arr(r["x"]), y=arr(r["y"]),
            x_bar=arr(r["x_bar"]), y_bar=arr(r["y_bar"]),
            x_hat=arr(r.get("x_hat")), y_hat=arr(r.get("y_hat")),
            f_hat=math.nan if r.get("f_hat") is None else float(r["f_hat"]),
        )
        for r in doc["records"]
    ]
    trace = Trace(records=records, schedule=schedule, xi=xi, stop_reason=header.get("stop_reason", ""))
    return header, trace
