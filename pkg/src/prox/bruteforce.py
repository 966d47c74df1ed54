# -*- coding: utf-8 -*-
"""
一维邻近算子暴力求解

数值求 argmin φ(u) + (u − v)²/(2τ)，作为闭式算子的参照。
先在区间上做粗网格定位，再在相邻网格点之间用 scipy 的有界标量极小化
（黄金分割 + 抛物线插值）收尾。
"""

import math
from collections.abc import Callable

import numpy as np
from scipy.optimize import minimize_scalar

from src.common.constants import BRUTEFORCE_TOL
from src.common.exceptions import BracketError, ProxParameterError

_FALLBACK_BRACKET = (-1e3, 1e3)
_GRID_POINTS = 201
# 定义域外的替代值：远大于域内取值，并随离网格最优点的距离增大，保持单峰
_OUTSIDE_LEVEL = 1e100


def default_bracket(fun: Callable[[float], float], tau: float, v: float) -> tuple[float, float]:
    """
    默认搜索区间

    [v − 10τ(|φ'₊(v)| + 1), v + 10τ(|φ'₋(v)| + 1)]，单侧导数用差分近似；
    v 不在定义域内时退回 [−1e3, 1e3]；带约束的函数应显式传入区间。
    """
    h = 1e-7 * max(1.0, abs(v))
    f0 = fun(v)
    f_right = fun(v + h)
    f_left = fun(v - h)
    if not all(math.isfinite(val) for val in (f0, f_right, f_left)):
        return _FALLBACK_BRACKET
    d_right = (f_right - f0) / h
    d_left = (f0 - f_left) / h
    return (v - 10.0 * tau * (abs(d_right) + 1.0), v + 10.0 * tau * (abs(d_left) + 1.0))


def _slope_sign_ok(phi: Callable[[float], float], a: float, b: float) -> bool:
    """区间端点处目标函数是否朝内下降（端点为 +∞ 时视为包含）"""
    h = 1e-9 * max(1.0, abs(a), abs(b), b - a)
    fa, fa_in = phi(a), phi(a + h)
    fb, fb_in = phi(b), phi(b - h)
    left_ok = (not math.isfinite(fa)) or fa_in <= fa
    right_ok = (not math.isfinite(fb)) or fb_in <= fb
    return left_ok and right_ok


def prox_bruteforce_1d(
    fun: Callable[[float], float],
    tau: float,
    v: float,
    bracket: tuple[float, float] | None = None,
    tol: float = BRUTEFORCE_TOL,
    max_iter: int = 500,
) -> float:
    """
    一维邻近算子的数值求解

    Parameters
    ----------
    fun : Callable[[float], float]
        强凸函数，可取 +∞
    tau : float
        步长 τ > 0
    v : float
        邻近点
    bracket : tuple[float, float], optional
        搜索区间，缺省用 default_bracket
    tol : float
        极小点的绝对精度
    max_iter : int
        有界极小化的最大迭代次数

    Returns
    -------
    float
        极小点

    Raises
    ------
    BracketError
        区间不包含极小点，或区间内目标函数无有限值

    Examples
    --------
    >>> round(prox_bruteforce_1d(lambda u: 0.5 * u * u, 1.0, 2.0), 8)
    1.0
    """
    if not (tau > 0 and math.isfinite(tau)):
        raise ProxParameterError(f"步长必须为正: τ={tau}")

    def phi(u: float) -> float:
        return fun(u) + (u - v) ** 2 / (2.0 * tau)

    a, b = bracket if bracket is not None else default_bracket(fun, tau, v)
    if not a < b:
        raise BracketError(f"区间非法: [{a}, {b}]", bracket=(a, b))
    if not _slope_sign_ok(phi, a, b):
        raise BracketError(f"区间 [{a}, {b}] 不包含极小点", bracket=(a, b))

    # 1. 粗网格：凸函数的极小点落在网格最优点的相邻两点之间
    grid = np.linspace(a, b, _GRID_POINTS)
    values = np.array([phi(float(u)) for u in grid])
    finite = np.isfinite(values)
    if not finite.any():
        raise BracketError(f"区间 [{a}, {b}] 内目标函数无有限值", bracket=(a, b))
    j = int(np.argmin(np.where(finite, values, np.inf)))
    u_grid, f_grid = float(grid[j]), float(values[j])
    lo = float(grid[max(j - 1, 0)])
    hi = float(grid[min(j + 1, _GRID_POINTS - 1)])

    def phi_local(t: float) -> float:
        # 以网格最优点为原点，有界方法的相对容差才不受 |u| 放大
        u = u_grid + t
        val = phi(u)
        if math.isfinite(val):
            return val
        return _OUTSIDE_LEVEL * (1.0 + abs(t))

    # 2. 有界标量极小化
    res = minimize_scalar(phi_local, bounds=(lo - u_grid, hi - u_grid), method="bounded",
                          options={"xatol": tol, "maxiter": max_iter})
    u = u_grid + float(res.x)
    # 极小点在网格端点（定义域或区间边界）上时有界方法只能逼近，取两者较优
    if not phi(u) < f_grid:
        return u_grid
    return u
