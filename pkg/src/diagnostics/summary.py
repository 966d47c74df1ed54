# -*- coding: utf-8 -*-
"""
检查结果汇总

按不等式标识聚合最小余量与失败数。
"""

from collections.abc import Iterable
from dataclasses import asdict
from typing import Any

import pandas as pd

from src.diagnostics.checks import BoundCheck


def checks_to_frame(checks: Iterable[BoundCheck]) -> pd.DataFrame:
    """检查结果转 DataFrame，列: id, k, lhs, rhs, slack, passed, note"""
    rows = [asdict(c) for c in checks]
    if not rows:
        return pd.DataFrame(columns=["id", "k", "lhs", "rhs", "slack", "passed", "note"])
    return pd.DataFrame(rows)


def summarize_checks(checks: Iterable[BoundCheck]) -> pd.DataFrame:
    """
    按 id 汇总

    Returns
    -------
    pd.DataFrame
        index 为 id，列: count, failures, min_slack, worst_k
    """
    df = checks_to_frame(checks)
    if df.empty:
        return pd.DataFrame(columns=["count", "failures", "min_slack", "worst_k"])
    df["failed"] = ~df["passed"].astype(bool)
    grouped = df.groupby("id", sort=True)
    worst_rows = df.loc[grouped["slack"].idxmin()].set_index("id")
    return pd.DataFrame({
        "count": grouped.size(),
        "failures": grouped["failed"].sum().astype(int),
        "min_slack": grouped["slack"].min(),
        "worst_k": worst_rows["k"].astype(int),
    })


def summary_to_dict(summary: pd.DataFrame) -> dict[str, dict[str, Any]]:
    """汇总表转 JSON 友好的字典"""
    return {
        str(idx): {
            "count": int(row["count"]),
            "failures": int(row["failures"]),
            "min_slack": float(row["min_slack"]),
            "worst_k": int(row["worst_k"]),
        }
        for idx, row in summary.iterrows()
    }
