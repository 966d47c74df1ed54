# -*- coding: utf-8 -*-
"""
邻近函数目录

每个函数对象记录维度与强凸模量，提供取值、邻近算子、次微分距离与JSON描述。
对象创建后不可变，可跨线程共享。
"""

from abc import ABC, abstractmethod
from collections.abc import Callable
from typing import Any, ClassVar

import numpy as np
from numpy.typing import ArrayLike

from src.common.constants import MODULUS_REL_TOL, SYMMETRY_TOL, ProxKind
from src.common.exceptions import (
    DimensionMismatchError,
    NotPositiveDefiniteError,
    ProxParameterError,
    UnsupportedSubdifferentialError,
)
from src.core.types import Vector, as_vector
from src.prox.operators import (
    prox_box_quadratic,
    prox_elastic_net,
    prox_quadratic,
    prox_shifted_sq,
)


class ProxFunction(ABC):
    """
    强凸、下半连续的真凸函数

    Notes
    -----
    子类需要实现:
    - KIND: 函数类型
    - value(u): 函数值，定义域外为 +∞
    - prox(tau, v): Prox_{τφ}(v)
    - to_dict(): JSON 描述
    可分函数额外实现 coordinate_function(i)，供一维暴力参照使用。
    """

    KIND: ClassVar[ProxKind]

    def __init__(self, dimension: int, modulus: float) -> None:
        if dimension < 1:
            raise DimensionMismatchError(f"维度必须为正: {dimension}")
        if not (np.isfinite(modulus) and modulus > 0):
            raise ProxParameterError(f"强凸模量必须为正: {modulus}")
        self._dimension = int(dimension)
        self._modulus = float(modulus)

    @property
    def dimension(self) -> int:
        return self._dimension

    @property
    def modulus(self) -> float:
        """声明的强凸模量（不大于真实模量）"""
        return self._modulus

    @property
    def kind(self) -> ProxKind:
        return self.KIND

    @property
    def is_separable(self) -> bool:
        return False

    def _vec(self, u: ArrayLike, name: str = "u") -> Vector:
        return as_vector(u, self._dimension, name=name)

    @abstractmethod
    def value(self, u: Vector) -> float:
        """φ(u)"""

    @abstractmethod
    def prox(self, tau: float, v: Vector) -> Vector:
        """Prox_{τφ}(v)"""

    @abstractmethod
    def to_dict(self) -> dict[str, Any]:
        """JSON 描述"""

    def subgradient_distance(self, u: Vector, s: Vector) -> float:
        """
        dist(s, ∂φ(u))

        u 在定义域外时返回 +∞。
        """
        raise UnsupportedSubdifferentialError(self.KIND.value)

    def coordinate_function(self, i: int) -> Callable[[float], float]:
        """第 i 个分量的一维函数（仅可分函数）"""
        raise UnsupportedSubdifferentialError(self.KIND.value)

    def __repr__(self) -> str:
        return f"{type(self).__name__}(dimension={self._dimension}, modulus={self._modulus:.6g})"


# ============================================================
# 二次函数
# ============================================================

class QuadraticFunction(ProxFunction):
    """
    φ(u) = ½uᵀAu + aᵀu，A 对称正定

    Parameters
    ----------
    matrix : ArrayLike
        对称正定矩阵 A
    linear : ArrayLike
        线性项 a
    modulus : float, optional
        声明模量，缺省取 λ_min(A)；必须不超过 λ_min(A)
    """

    KIND = ProxKind.QUADRATIC

    def __init__(self, matrix: ArrayLike, linear: ArrayLike, modulus: float | None = None) -> None:
        mat = np.array(matrix, dtype=np.float64)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise DimensionMismatchError(f"A 必须是方阵，实际形状 {mat.shape}")
        scale = max(1.0, float(np.max(np.abs(mat)))) if mat.size else 1.0
        if np.max(np.abs(mat - mat.T)) > SYMMETRY_TOL * scale:
            raise NotPositiveDefiniteError("A 不对称")
        mat = 0.5 * (mat + mat.T)
        lam_min = float(np.linalg.eigvalsh(mat)[0])
        if lam_min <= 0:
            raise NotPositiveDefiniteError(f"A 非正定: λ_min={lam_min:.6g}")
        if modulus is None:
            modulus = lam_min
        elif modulus > lam_min * (1.0 + MODULUS_REL_TOL):
            raise NotPositiveDefiniteError(f"声明模量 {modulus:.6g} 超过 λ_min(A)={lam_min:.6g}")
        super().__init__(mat.shape[0], modulus)
        self._matrix = mat
        self._matrix.setflags(write=False)
        self._linear = self._vec(linear, name="a")
        self._linear.setflags(write=False)
        self._lam_min = lam_min

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def linear(self) -> Vector:
        return self._linear

    @property
    def min_eigenvalue(self) -> float:
        return self._lam_min

    @property
    def is_separable(self) -> bool:
        return bool(np.count_nonzero(self._matrix - np.diag(np.diag(self._matrix))) == 0)

    def value(self, u: Vector) -> float:
        return float(0.5 * u @ self._matrix @ u + self._linear @ u)

    def gradient(self, u: Vector) -> Vector:
        return self._matrix @ u + self._linear

    def prox(self, tau: float, v: Vector) -> Vector:
        return prox_quadratic(self._matrix, self._linear, tau, v)

    def subgradient_distance(self, u: Vector, s: Vector) -> float:
        return float(np.linalg.norm(self.gradient(u) - s))

    def coordinate_function(self, i: int) -> Callable[[float], float]:
        if not self.is_separable:
            raise UnsupportedSubdifferentialError(f"{self.KIND.value}(非对角)")
        a_ii, a_i = float(self._matrix[i, i]), float(self._linear[i])
        return lambda t: 0.5 * a_ii * t * t + a_i * t

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.KIND.value,
            "matrix": self._matrix.tolist(),
            "linear": self._linear.tolist(),
            "modulus": self._modulus,
        }


# ============================================================
# 平移平方范数
# ============================================================

class ShiftedSquaredNorm(ProxFunction):
    """φ(u) = (μ/2)‖u − c‖²"""

    KIND = ProxKind.SHIFTED_SQ

    def __init__(self, weight: float, center: ArrayLike) -> None:
        c = as_vector(center, name="center")
        super().__init__(c.shape[0], weight)
        self._center = c
        self._center.setflags(write=False)

    @property
    def center(self) -> Vector:
        return self._center

    @property
    def is_separable(self) -> bool:
        return True

    def value(self, u: Vector) -> float:
        diff = u - self._center
        return float(0.5 * self._modulus * diff @ diff)

    def prox(self, tau: float, v: Vector) -> Vector:
        return prox_shifted_sq(self._modulus, self._center, tau, v)

    def subgradient_distance(self, u: Vector, s: Vector) -> float:
        return float(np.linalg.norm(self._modulus * (u - self._center) - s))

    def coordinate_function(self, i: int) -> Callable[[float], float]:
        mu, c_i = self._modulus, float(self._center[i])
        return lambda t: 0.5 * mu * (t - c_i) ** 2

    def to_dict(self) -> dict[str, Any]:
        return {"kind": self.KIND.value, "weight": self._modulus, "center": self._center.tolist()}


# ============================================================
# 弹性网
# ============================================================

class ElasticNet(ProxFunction):
    """φ(u) = λ₁‖u‖₁ + (μ/2)‖u‖²"""

    KIND = ProxKind.ELASTIC_NET

    def __init__(self, l1_weight: float, quad_weight: float, dimension: int) -> None:
        if not (np.isfinite(l1_weight) and l1_weight >= 0):
            raise ProxParameterError(f"L1 权重不能为负: {l1_weight}")
        super().__init__(dimension, quad_weight)
        self._l1 = float(l1_weight)

    @property
    def l1_weight(self) -> float:
        return self._l1

    @property
    def is_separable(self) -> bool:
        return True

    def value(self, u: Vector) -> float:
        return float(self._l1 * np.sum(np.abs(u)) + 0.5 * self._modulus * u @ u)

    def prox(self, tau: float, v: Vector) -> Vector:
        return prox_elastic_net(self._l1, self._modulus, tau, v)

    def subgradient_distance(self, u: Vector, s: Vector) -> float:
        r = s - self._modulus * u
        # uᵢ ≠ 0: ∂ = {λ₁·sign(uᵢ)}；uᵢ = 0: ∂ = [−λ₁, λ₁]
        dist = np.where(u != 0, np.abs(r - self._l1 * np.sign(u)), np.maximum(np.abs(r) - self._l1, 0.0))
        return float(np.linalg.norm(dist))

    def coordinate_function(self, i: int) -> Callable[[float], float]:
        l1, mu = self._l1, self._modulus
        return lambda t: l1 * abs(t) + 0.5 * mu * t * t

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.KIND.value,
            "l1_weight": self._l1,
            "quad_weight": self._modulus,
            "dimension": self._dimension,
        }


# ============================================================
# 盒约束二次函数
# ============================================================

class BoxQuadratic(ProxFunction):
    """φ(u) = (μ/2)‖u‖² + ι_{[l,u]}(u)"""

    KIND = ProxKind.BOX_QUADRATIC

    def __init__(self, quad_weight: float, lower: ArrayLike, upper: ArrayLike) -> None:
        lo = np.array(lower, dtype=np.float64).reshape(-1)
        hi = np.array(upper, dtype=np.float64).reshape(-1)
        if lo.shape != hi.shape:
            raise DimensionMismatchError("上下界维度不一致", expected=lo.size, actual=hi.size)
        if np.any(np.isnan(lo)) or np.any(np.isnan(hi)) or np.any(lo > hi):
            raise ProxParameterError("区间下界大于上界或含 NaN")
        super().__init__(lo.shape[0], quad_weight)
        lo.setflags(write=False)
        hi.setflags(write=False)
        self._lower = lo
        self._upper = hi

    @property
    def lower(self) -> Vector:
        return self._lower

    @property
    def upper(self) -> Vector:
        return self._upper

    @property
    def is_separable(self) -> bool:
        return True

    def value(self, u: Vector) -> float:
        if np.any(u < self._lower) or np.any(u > self._upper):
            return float("inf")
        return float(0.5 * self._modulus * u @ u)

    def prox(self, tau: float, v: Vector) -> Vector:
        return prox_box_quadratic(self._modulus, self._lower, self._upper, tau, v)

    def subgradient_distance(self, u: Vector, s: Vector) -> float:
        if np.any(u < self._lower) or np.any(u > self._upper):
            return float("inf")
        r = s - self._modulus * u
        at_lower = u == self._lower
        at_upper = u == self._upper
        # 法锥: 下界处 (−∞,0]，上界处 [0,∞)，两者重合为 ℝ
        dist = np.abs(r)
        dist = np.where(at_lower & ~at_upper, np.maximum(r, 0.0), dist)
        dist = np.where(at_upper & ~at_lower, np.maximum(-r, 0.0), dist)
        dist = np.where(at_lower & at_upper, 0.0, dist)
        return float(np.linalg.norm(dist))

    def coordinate_function(self, i: int) -> Callable[[float], float]:
        mu, lo, hi = self._modulus, float(self._lower[i]), float(self._upper[i])
        return lambda t: 0.5 * mu * t * t if lo <= t <= hi else float("inf")

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.KIND.value,
            "quad_weight": self._modulus,
            "lower": self._lower.tolist(),
            "upper": self._upper.tolist(),
        }


# ============================================================
# 工厂
# ============================================================

def prox_function_from_dict(data: dict[str, Any]) -> ProxFunction:
    """
    由 JSON 描述构造函数对象

    Raises
    ------
    ProxParameterError
        未知类型或缺少字段
    """
    try:
        kind = ProxKind(data["kind"])
        if kind is ProxKind.QUADRATIC:
            return QuadraticFunction(data["matrix"], data["linear"], data.get("modulus"))
        if kind is ProxKind.SHIFTED_SQ:
            return ShiftedSquaredNorm(data["weight"], data["center"])
        if kind is ProxKind.ELASTIC_NET:
            return ElasticNet(data["l1_weight"], data["quad_weight"], int(data["dimension"]))
        return BoxQuadratic(data["quad_weight"], data["lower"], data["upper"])
    except (KeyError, ValueError) as e:
        raise ProxParameterError(f"函数描述非法: {e}") from e
