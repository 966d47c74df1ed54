# -*- coding: utf-8 -*-
"""
经验收敛率拟合

对 log dₖ 做最小二乘直线拟合，rate = exp(斜率)。
"""

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike

from src.common.constants import RATE_FLOOR_REL, RATE_MIN_POINTS
from src.common.exceptions import RateWindowError


@dataclass(frozen=True, slots=True)
class RateFit:
    """
    拟合结果

    Attributes
    ----------
    fitted_rate : float
        每步收缩因子 exp(斜率)
    intercept : float
        log 尺度截距
    window : tuple[int, int]
        实际使用的区间 [start, end)
    residual : float
        log 尺度均方根残差
    """
    fitted_rate: float
    intercept: float
    window: tuple[int, int]
    residual: float


def fit_rate(
    series: ArrayLike,
    window: tuple[int, int] | None = None,
    floor_rel: float = RATE_FLOOR_REL,
) -> RateFit:
    """
    拟合几何衰减率

    Parameters
    ----------
    series : ArrayLike
        非负序列，下标即迭代序号
    window : tuple[int, int], optional
        区间 [start, end)，缺省丢弃前 10%
    floor_rel : float
        低于 floor_rel × 整条序列最大有限值（或非正）的点视为已收敛，窗口在此截断

    Returns
    -------
    RateFit
        拟合结果

    Raises
    ------
    RateWindowError
        有效点少于 3 个，或窗口起点已在收敛平台上

    Examples
    --------
    >>> fit = fit_rate([3 * 0.8 ** k for k in range(100)])
    >>> abs(fit.fitted_rate - 0.8) < 1e-10
    True
    """
    values = np.asarray(series, dtype=np.float64).reshape(-1)
    if window is None:
        start, end = len(values) // 10, len(values)
    else:
        start, end = max(0, window[0]), min(len(values), window[1])
    if end - start < RATE_MIN_POINTS:
        raise RateWindowError(f"窗口 [{start}, {end}) 点数不足")

    segment = values[start:end]
    if np.any(np.isnan(segment)):
        raise RateWindowError("窗口内含 NaN")
    # 噪声底以整条序列为参照，窗口自身的最大值可能已在平台上
    finite = values[np.isfinite(values)]
    peak = float(np.max(finite)) if finite.size else 0.0
    cutoff = max(peak * floor_rel, 0.0)
    dead = np.nonzero(segment <= cutoff)[0]
    if dead.size:
        end = start + int(dead[0])
        segment = values[start:end]
    if segment.size == 0:
        raise RateWindowError(
            f"窗口起点 {start} 已低于噪声底 {cutoff:.3e}（序列最大值 {peak:.3e}），序列已收敛，无法拟合"
        )
    if segment.size < RATE_MIN_POINTS:
        raise RateWindowError(f"截断后窗口 [{start}, {end}) 点数不足 {RATE_MIN_POINTS}")

    ks = np.arange(start, end, dtype=np.float64)
    logs = np.log(segment)
    slope, intercept = np.polyfit(ks, logs, 1)
    resid = logs - (slope * ks + intercept)
    return RateFit(
        fitted_rate=float(np.exp(slope)),
        intercept=float(intercept),
        window=(start, end),
        residual=float(np.sqrt(np.mean(resid ** 2))),
    )
