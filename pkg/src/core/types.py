# -*- coding: utf-8 -*-
"""
问题核心类型定义

定义向量别名、算子范数估计结果与鞍点证书。
"""

from dataclasses import dataclass
from typing import TypeAlias

import numpy as np
from numpy.typing import ArrayLike, NDArray

from src.common.exceptions import DimensionMismatchError, NonFiniteValueError


# ============================================================
# 类型别名
# ============================================================

Vector: TypeAlias = NDArray[np.float64]
PrimalVector: TypeAlias = Vector  # x ∈ X = ℝⁿ
DualVector: TypeAlias = Vector    # y ∈ Y = ℝᵐ
Matrix: TypeAlias = NDArray[np.float64]


def as_vector(value: ArrayLike, dim: int | None = None, name: str = "vector") -> Vector:
    """
    转换为一维 float64 向量并校验维度与有限性

    Parameters
    ----------
    value : ArrayLike
        输入数据
    dim : int, optional
        期望维度
    name : str
        向量名称，用于错误信息

    Returns
    -------
    Vector
        新的一维数组（不与输入共享内存）

    Raises
    ------
    DimensionMismatchError
        维度不符
    NonFiniteValueError
        含 NaN 或无穷
    """
    arr = np.array(value, dtype=np.float64).reshape(-1)
    if dim is not None and arr.shape[0] != dim:
        raise DimensionMismatchError(f"{name} 维度错误", expected=dim, actual=arr.shape[0])
    if not np.all(np.isfinite(arr)):
        raise NonFiniteValueError(f"{name} 含非有限值")
    return arr


# ============================================================
# 算子范数估计
# ============================================================

@dataclass(frozen=True, slots=True)
class NormEstimate:
    """
    算子范数估计结果

    Attributes
    ----------
    value : float
        ‖K‖ 的上界估计（已乘放大系数）
    converged : bool
        幂迭代是否在容差内收敛；未收敛时仅为估计而非证明
    iterations : int
        实际迭代次数
    """
    value: float
    converged: bool
    iterations: int


# ============================================================
# 鞍点证书
# ============================================================

@dataclass(frozen=True, eq=False)
class SaddlePointCertificate:
    """
    鞍点证书

    Attributes
    ----------
    x_star : PrimalVector
        原始鞍点
    y_star : DualVector
        对偶鞍点
    f_star : float
        f(x*, y*)
    subgradient_residual : float
        −K*y* ∈ ∂g(x*) 与 Kx* ∈ ∂h(y*) 的残差（乘积空间欧氏范数）
    tol : float
        证书容差
    """
    x_star: PrimalVector
    y_star: DualVector
    f_star: float
    subgradient_residual: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.subgradient_residual) and self.subgradient_residual <= self.tol)
