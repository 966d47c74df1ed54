# -*- coding: utf-8 -*-
"""
随机二次实例生成

A = μI + RᵀR/n、B = νI + SᵀS/m，K 为高斯矩阵缩放至目标范数。
相同参数与种子生成逐位相同的实例。
"""

from dataclasses import dataclass

import numpy as np

from src.common.exceptions import PlannerInputError
from src.core.coupling import estimate_operator_norm, DenseCoupling
from src.core.problem import SaddleProblem
from src.oracle.quadratic import QuadraticSaddleInstance


@dataclass(frozen=True, slots=True)
class GeneratorSpec:
    """
    生成参数

    Attributes
    ----------
    n, m : int
        原始、对偶维度
    mu, nu : float
        目标强凸模量（实例的最小特征值不小于该值）
    normk : float
        目标 ‖K‖
    seed : int
        随机种子
    """
    n: int
    m: int
    mu: float
    nu: float
    normk: float
    seed: int


def _spd(rng: np.random.Generator, dim: int, modulus: float) -> np.ndarray:
    r = rng.standard_normal((dim, dim))
    mat = modulus * np.eye(dim) + r.T @ r / dim
    return 0.5 * (mat + mat.T)


def generate_instance(spec: GeneratorSpec) -> tuple[SaddleProblem, QuadraticSaddleInstance]:
    """
    生成随机二次鞍点实例

    Returns
    -------
    tuple[SaddleProblem, QuadraticSaddleInstance]
        问题（声明模量取目标 μ、ν）与原始矩阵

    Raises
    ------
    PlannerInputError
        维度非正、模量非正或范数为负
    """
    if spec.n < 1 or spec.m < 1:
        raise PlannerInputError(f"维度必须为正: n={spec.n}, m={spec.m}")
    if spec.mu <= 0 or spec.nu <= 0 or spec.normk < 0:
        raise PlannerInputError(f"参数非法: μ={spec.mu}, ν={spec.nu}, ‖K‖={spec.normk}")

    rng = np.random.default_rng(spec.seed)
    A = _spd(rng, spec.n, spec.mu)
    a = rng.standard_normal(spec.n)
    B = _spd(rng, spec.m, spec.nu)
    b = rng.standard_normal(spec.m)
    K = rng.standard_normal((spec.m, spec.n))
    if spec.normk == 0:
        K = np.zeros((spec.m, spec.n))
    else:
        K *= spec.normk / np.linalg.norm(K, 2)

    instance = QuadraticSaddleInstance.create(A, a, B, b, K, mu=spec.mu, nu=spec.nu)
    coupling = DenseCoupling(K, norm_bound=spec.normk)
    estimate = estimate_operator_norm(coupling)
    problem = instance.to_problem(norm_bound=max(estimate.value, spec.normk))
    return problem, instance
