# -*- coding: utf-8 -*-
"""
闭式邻近算子

Prox_{τφ}(v) = argmin_u { φ(u) + ‖u − v‖²/(2τ) }。
所有函数不修改输入，返回新数组。
"""

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from src.common.exceptions import NotPositiveDefiniteError, ProxParameterError
from src.core.types import Matrix, Vector


def _check_step(tau: float) -> None:
    if not (np.isfinite(tau) and tau > 0):
        raise ProxParameterError(f"步长必须为正: τ={tau}")


def _check_modulus(mu: float) -> None:
    if not (np.isfinite(mu) and mu > 0):
        raise ProxParameterError(f"强凸模量必须为正: μ={mu}")


def prox_shifted_sq(mu: float, center: Vector, tau: float, v: Vector) -> Vector:
    """
    φ(u) = (μ/2)‖u − c‖² 的邻近算子

    Returns
    -------
    Vector
        (v + τμc) / (1 + τμ)

    Examples
    --------
    >>> prox_shifted_sq(1.0, np.zeros(1), 1.0, np.array([2.0]))
    array([1.])
    """
    _check_step(tau)
    _check_modulus(mu)
    return (v + tau * mu * center) / (1.0 + tau * mu)


def prox_quadratic(matrix: Matrix, linear: Vector, tau: float, v: Vector) -> Vector:
    """
    φ(u) = ½uᵀAu + aᵀu 的邻近算子

    求解 (I + τA)u = v − τa，Cholesky 分解失败视为非正定输入。

    Raises
    ------
    NotPositiveDefiniteError
        I + τA 不正定
    """
    _check_step(tau)
    n = v.shape[0]
    system = np.eye(n) + tau * matrix
    try:
        factor = cho_factor(system, lower=True, check_finite=True)
    except LinAlgError as e:
        raise NotPositiveDefiniteError(f"I + τA 分解失败: {e}") from e
    return cho_solve(factor, v - tau * linear)


def prox_elastic_net(l1_weight: float, mu: float, tau: float, v: Vector) -> Vector:
    """
    φ(u) = λ₁‖u‖₁ + (μ/2)‖u‖² 的邻近算子

    Returns
    -------
    Vector
        sign(v)·max(|v| − τλ₁, 0) / (1 + τμ)，阈值内分量为精确 0
    """
    _check_step(tau)
    _check_modulus(mu)
    if l1_weight < 0:
        raise ProxParameterError(f"L1 权重不能为负: λ₁={l1_weight}")
    shrunk = np.maximum(np.abs(v) - tau * l1_weight, 0.0)
    return np.sign(v) * shrunk / (1.0 + tau * mu)


def prox_box_quadratic(mu: float, lower: Vector, upper: Vector, tau: float, v: Vector) -> Vector:
    """
    φ(u) = (μ/2)‖u‖² + ι_{[l,u]}(u) 的邻近算子

    Raises
    ------
    ProxParameterError
        存在 lᵢ > uᵢ
    """
    _check_step(tau)
    _check_modulus(mu)
    if np.any(lower > upper):
        raise ProxParameterError("区间下界大于上界")
    return np.clip(v / (1.0 + tau * mu), lower, upper)
