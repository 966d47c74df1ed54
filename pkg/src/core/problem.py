# -*- coding: utf-8 -*-
"""
鞍点问题定义

f(x, y) = ⟨Kx, y⟩ + g(x) − h(y)，g 为 μ-强凸，h 为 ν-强凸。
"""

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike

from src.common.exceptions import CertificateError, DimensionMismatchError, NonFiniteValueError
from src.core.coupling import LinearCoupling
from src.core.types import DualVector, PrimalVector, SaddlePointCertificate, as_vector
from src.prox.functions import ProxFunction


@dataclass(frozen=True, eq=False)
class SaddleProblem:
    """
    鞍点问题 (K, g, h)

    Attributes
    ----------
    coupling : LinearCoupling
        耦合算子 K: ℝⁿ → ℝᵐ
    g : ProxFunction
        原始函数，维度 n
    h : ProxFunction
        对偶函数，维度 m
    """
    coupling: LinearCoupling
    g: ProxFunction
    h: ProxFunction

    def __post_init__(self) -> None:
        if self.g.dimension != self.coupling.dim_in:
            raise DimensionMismatchError("g 维度与 K 输入维度不一致", expected=self.coupling.dim_in, actual=self.g.dimension)
        if self.h.dimension != self.coupling.dim_out:
            raise DimensionMismatchError("h 维度与 K 输出维度不一致", expected=self.coupling.dim_out, actual=self.h.dimension)

    @property
    def n(self) -> int:
        return self.coupling.dim_in

    @property
    def m(self) -> int:
        return self.coupling.dim_out

    @property
    def mu(self) -> float:
        return self.g.modulus

    @property
    def nu(self) -> float:
        return self.h.modulus

    @property
    def normk(self) -> float:
        return self.coupling.norm_bound

    def primal(self, x: ArrayLike) -> PrimalVector:
        return as_vector(x, self.n, name="x")

    def dual(self, y: ArrayLike) -> DualVector:
        return as_vector(y, self.m, name="y")


def evaluate_f(problem: SaddleProblem, x: ArrayLike, y: ArrayLike) -> float:
    """
    计算 f(x, y) = ⟨Kx, y⟩ + g(x) − h(y)

    扩展实数约定: g(x) = +∞ 时返回 +∞；否则 h(y) = +∞ 时返回 −∞。

    Raises
    ------
    DimensionMismatchError
        维度不符
    NonFiniteValueError
        结果为 NaN

    Examples
    --------
    n = m = 1, K = [1], g = ½x², h = ½y² 时 f(1, 1) = 1。
    """
    xv = problem.primal(x)
    yv = problem.dual(y)
    gx = problem.g.value(xv)
    if gx == math.inf:
        return math.inf
    hy = problem.h.value(yv)
    if hy == math.inf:
        return -math.inf
    result = float(problem.coupling.apply(xv) @ yv) + gx - hy
    if math.isnan(result):
        raise NonFiniteValueError("f(x, y) 为 NaN")
    return result


def _require_certificate(cert: SaddlePointCertificate) -> None:
    if not cert.passed:
        raise CertificateError(f"鞍点证书未通过: 残差 {cert.subgradient_residual:.3e} > {cert.tol:.1e}")


def saddle_gap(problem: SaddleProblem, cert: SaddlePointCertificate, x: ArrayLike, y: ArrayLike) -> float:
    """
    计算 f(x, y*) − f(x*, y)

    对有效证书该值非负，且仅在 (x, y) = (x*, y*) 时为 0。
    """
    _require_certificate(cert)
    return evaluate_f(problem, x, cert.y_star) - evaluate_f(problem, cert.x_star, y)


def gap_lower_bound(problem: SaddleProblem, cert: SaddlePointCertificate, x: ArrayLike, y: ArrayLike) -> float:
    """(μ/2)‖x − x*‖² + (ν/2)‖y − y*‖²，saddle_gap 的下界"""
    _require_certificate(cert)
    dx = problem.primal(x) - cert.x_star
    dy = problem.dual(y) - cert.y_star
    return 0.5 * problem.mu * float(dx @ dx) + 0.5 * problem.nu * float(dy @ dy)


def squared_distance(u: np.ndarray, v: np.ndarray) -> float:
    diff = u - v
    return float(diff @ diff)
