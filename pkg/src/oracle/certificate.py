# -*- coding: utf-8 -*-
"""
次梯度鞍点证书

(x*, y*) 为鞍点当且仅当 −K*y* ∈ ∂g(x*) 且 Kx* ∈ ∂h(y*)。
"""

import math

import numpy as np
from numpy.typing import ArrayLike

from src.core.problem import SaddleProblem, evaluate_f
from src.core.types import SaddlePointCertificate


def certify_saddle(
    problem: SaddleProblem,
    x_star: ArrayLike,
    y_star: ArrayLike,
    tol: float = 1e-8,
) -> SaddlePointCertificate:
    """
    计算候选点的次梯度残差

    Parameters
    ----------
    problem : SaddleProblem
        问题实例
    x_star, y_star : ArrayLike
        候选鞍点
    tol : float
        残差容差

    Returns
    -------
    SaddlePointCertificate
        residual = sqrt(dist(−K*y*, ∂g(x*))² + dist(Kx*, ∂h(y*))²)，
        候选点在定义域外时为 +∞（passed=False）

    Raises
    ------
    UnsupportedSubdifferentialError
        函数未提供次微分距离
    """
    x = problem.primal(x_star)
    y = problem.dual(y_star)
    r_x = problem.g.subgradient_distance(x, -problem.coupling.adjoint_apply(y))
    r_y = problem.h.subgradient_distance(y, problem.coupling.apply(x))
    residual = math.hypot(r_x, r_y) if math.isfinite(r_x) and math.isfinite(r_y) else math.inf
    f_star = evaluate_f(problem, x, y)
    x.setflags(write=False)
    y.setflags(write=False)
    return SaddlePointCertificate(
        x_star=x, y_star=y, f_star=f_star,
        subgradient_residual=float(residual), tol=float(tol),
    )


def certificate_distance(cert: SaddlePointCertificate, x: np.ndarray, y: np.ndarray) -> float:
    """‖(x, y) − (x*, y*)‖"""
    return math.sqrt(float(np.sum((x - cert.x_star) ** 2) + np.sum((y - cert.y_star) ** 2)))
