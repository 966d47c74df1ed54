# -*- coding: utf-8 -*-
"""
线性耦合算子

K: X → Y 及其伴随 K*，附带可证明的范数上界 ‖K‖。
"""

from abc import ABC, abstractmethod

import numpy as np
from loguru import logger
from numpy.typing import ArrayLike

from src.common.constants import NORM_INFLATION, POWER_ITER_MAX, POWER_ITER_TOL
from src.common.exceptions import DimensionMismatchError, NonFiniteValueError
from src.core.types import DualVector, Matrix, NormEstimate, PrimalVector, as_vector


class LinearCoupling(ABC):
    """
    线性耦合算子基类

    Notes
    -----
    子类需要实现:
    - dim_in / dim_out: 原始、对偶空间维度
    - apply(x) / adjoint_apply(y)
    - to_matrix(): 稠密矩阵表示（用于KKT参照与序列化）
    """

    @property
    @abstractmethod
    def dim_in(self) -> int:
        """原始空间维度 n"""

    @property
    @abstractmethod
    def dim_out(self) -> int:
        """对偶空间维度 m"""

    @property
    @abstractmethod
    def norm_bound(self) -> float:
        """‖K‖ 的上界"""

    @abstractmethod
    def apply(self, x: PrimalVector) -> DualVector:
        """Kx"""

    @abstractmethod
    def adjoint_apply(self, y: DualVector) -> PrimalVector:
        """K*y"""

    @abstractmethod
    def to_matrix(self) -> Matrix:
        """m×n 稠密矩阵"""

    def _check_in(self, x: PrimalVector) -> None:
        if x.shape != (self.dim_in,):
            raise DimensionMismatchError("K 输入维度错误", expected=self.dim_in, actual=x.size)

    def _check_out(self, y: DualVector) -> None:
        if y.shape != (self.dim_out,):
            raise DimensionMismatchError("K* 输入维度错误", expected=self.dim_out, actual=y.size)


class DenseCoupling(LinearCoupling):
    """
    稠密矩阵耦合

    Parameters
    ----------
    matrix : ArrayLike
        m×n 矩阵
    norm_bound : float, optional
        已知的范数上界；缺省时用幂迭代估计
    """

    def __init__(self, matrix: ArrayLike, norm_bound: float | None = None) -> None:
        mat = np.array(matrix, dtype=np.float64)
        if mat.ndim != 2:
            raise DimensionMismatchError(f"K 必须是二维矩阵，实际维数 {mat.ndim}")
        if not np.all(np.isfinite(mat)):
            raise NonFiniteValueError("K 含非有限值")
        mat.setflags(write=False)
        self._matrix = mat

        if norm_bound is None:
            estimate = estimate_operator_norm(self)
            norm_bound = estimate.value
        if norm_bound < 0 or not np.isfinite(norm_bound):
            raise NonFiniteValueError(f"范数上界非法: {norm_bound}")
        self._norm_bound = float(norm_bound)

    @property
    def dim_in(self) -> int:
        return self._matrix.shape[1]

    @property
    def dim_out(self) -> int:
        return self._matrix.shape[0]

    @property
    def norm_bound(self) -> float:
        return self._norm_bound

    @property
    def matrix(self) -> Matrix:
        return self._matrix

    def apply(self, x: PrimalVector) -> DualVector:
        self._check_in(x)
        return self._matrix @ x

    def adjoint_apply(self, y: DualVector) -> PrimalVector:
        self._check_out(y)
        return self._matrix.T @ y

    def to_matrix(self) -> Matrix:
        return self._matrix.copy()


class DiagonalCoupling(LinearCoupling):
    """
    对角耦合 K = diag(d)，n = m = len(d)

    范数上界取 max|dᵢ|，是精确值。
    """

    def __init__(self, diagonal: ArrayLike) -> None:
        self._diag = as_vector(diagonal, name="diagonal")
        self._diag.setflags(write=False)

    @property
    def dim_in(self) -> int:
        return self._diag.shape[0]

    @property
    def dim_out(self) -> int:
        return self._diag.shape[0]

    @property
    def norm_bound(self) -> float:
        return float(np.max(np.abs(self._diag))) if self._diag.size else 0.0

    @property
    def diagonal(self) -> PrimalVector:
        return self._diag

    def apply(self, x: PrimalVector) -> DualVector:
        self._check_in(x)
        return self._diag * x

    def adjoint_apply(self, y: DualVector) -> PrimalVector:
        self._check_out(y)
        return self._diag * y

    def to_matrix(self) -> Matrix:
        return np.diag(self._diag)


# ============================================================
# 范数估计与伴随校验
# ============================================================

def estimate_operator_norm(
    coupling: LinearCoupling,
    tol: float = POWER_ITER_TOL,
    max_iter: int = POWER_ITER_MAX,
    seed: int = 0,
) -> NormEstimate:
    """
    幂迭代估计 ‖K‖

    在 K*K 上做幂迭代，取 Rayleigh 商的平方根并乘 (1 + 1e-6) 作为上界。
    未收敛不抛异常，而是返回 converged=False。

    Parameters
    ----------
    coupling : LinearCoupling
        耦合算子
    tol : float
        Rayleigh 商相对变化容差
    max_iter : int
        最大迭代次数
    seed : int
        初始向量随机种子

    Returns
    -------
    NormEstimate
        估计结果

    Examples
    --------
    >>> est = estimate_operator_norm(DenseCoupling([[2.0, 0.0], [0.0, 1.0]], norm_bound=2.0))
    >>> abs(est.value - 2.0 * (1 + 1e-6)) < 1e-9
    True
    """
    n = coupling.dim_in
    if n == 0 or coupling.dim_out == 0:
        return NormEstimate(value=0.0, converged=True, iterations=0)

    rng = np.random.default_rng(seed)
    v = rng.standard_normal(n)
    v /= np.linalg.norm(v)

    lam = 0.0
    for it in range(1, max_iter + 1):
        kv = coupling.apply(v)
        w = coupling.adjoint_apply(kv)
        lam_new = float(kv @ kv)  # vᵀK*Kv
        w_norm = float(np.linalg.norm(w))
        if w_norm == 0.0:
            # v ∈ ker K；K=0 时即为精确结果
            return NormEstimate(value=0.0, converged=True, iterations=it)
        v = w / w_norm
        if abs(lam_new - lam) <= tol * max(1.0, lam_new):
            return NormEstimate(value=float(np.sqrt(lam_new)) * NORM_INFLATION, converged=True, iterations=it)
        lam = lam_new

    logger.warning(f"幂迭代未在 {max_iter} 步内收敛，‖K‖ 仅为估计值")
    return NormEstimate(value=float(np.sqrt(lam)) * NORM_INFLATION, converged=False, iterations=max_iter)


def check_adjoint(coupling: LinearCoupling, trials: int = 10, seed: int = 0) -> float:
    """
    校验伴随恒等式 ⟨Kx, y⟩ = ⟨x, K*y⟩

    Returns
    -------
    float
        随机样本上的最大相对误差
    """
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        x = rng.standard_normal(coupling.dim_in)
        y = rng.standard_normal(coupling.dim_out)
        lhs = float(coupling.apply(x) @ y)
        rhs = float(x @ coupling.adjoint_apply(y))
        scale = max(1.0, abs(lhs), abs(rhs))
        worst = max(worst, abs(lhs - rhs) / scale)
    return worst
