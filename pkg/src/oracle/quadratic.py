# -*- coding: utf-8 -*-
"""
二次实例KKT精确解

g(x) = ½xᵀAx + aᵀx，h(y) = ½yᵀBy + bᵀy 时鞍点满足
    [ A   Kᵀ ] [x]   [−a]
    [−K   B  ] [y] = [−b]
"""

from dataclasses import dataclass
from typing import Any

import numpy as np
from loguru import logger
from numpy.typing import ArrayLike
from scipy.linalg import LinAlgError, lu_factor, lu_solve

from src.common.exceptions import DimensionMismatchError, OracleError
from src.core.coupling import DenseCoupling
from src.core.problem import SaddleProblem, evaluate_f
from src.core.types import Matrix, SaddlePointCertificate, Vector
from src.oracle.certificate import certify_saddle
from src.prox.functions import QuadraticFunction

_DEFAULT_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class QuadraticSaddleInstance:
    """
    二次鞍点实例

    Attributes
    ----------
    A, a : g 的二次项与线性项 (n×n, n)
    B, b : h 的二次项与线性项 (m×m, m)
    K : 耦合矩阵 (m×n)
    mu, nu : 声明的强凸模量，缺省取最小特征值
    """
    A: Matrix
    a: Vector
    B: Matrix
    b: Vector
    K: Matrix
    mu: float | None = None
    nu: float | None = None

    @classmethod
    def create(
        cls,
        A: ArrayLike,
        a: ArrayLike,
        B: ArrayLike,
        b: ArrayLike,
        K: ArrayLike,
        mu: float | None = None,
        nu: float | None = None,
    ) -> "QuadraticSaddleInstance":
        """转换为 float64 数组并校验维度"""
        A_, B_, K_ = (np.array(M, dtype=np.float64) for M in (A, B, K))
        a_, b_ = (np.array(v, dtype=np.float64).reshape(-1) for v in (a, b))
        m, n = K_.shape
        if A_.shape != (n, n) or a_.shape != (n,):
            raise DimensionMismatchError("A/a 维度与 K 列数不一致", expected=n, actual=A_.shape[0])
        if B_.shape != (m, m) or b_.shape != (m,):
            raise DimensionMismatchError("B/b 维度与 K 行数不一致", expected=m, actual=B_.shape[0])
        return cls(A=A_, a=a_, B=B_, b=b_, K=K_, mu=mu, nu=nu)

    @classmethod
    def from_problem(cls, problem: SaddleProblem) -> "QuadraticSaddleInstance | None":
        """g、h 均为二次函数时还原实例，否则返回 None"""
        g, h = problem.g, problem.h
        if not (isinstance(g, QuadraticFunction) and isinstance(h, QuadraticFunction)):
            return None
        return cls.create(g.matrix, g.linear, h.matrix, h.linear, problem.coupling.to_matrix(),
                          mu=g.modulus, nu=h.modulus)

    @property
    def n(self) -> int:
        return self.K.shape[1]

    @property
    def m(self) -> int:
        return self.K.shape[0]

    def to_problem(self, norm_bound: float | None = None) -> SaddleProblem:
        """构造 SaddleProblem，范数上界缺省用幂迭代估计"""
        return SaddleProblem(
            coupling=DenseCoupling(self.K, norm_bound=norm_bound),
            g=QuadraticFunction(self.A, self.a, modulus=self.mu),
            h=QuadraticFunction(self.B, self.b, modulus=self.nu),
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "A": self.A.tolist(), "a": self.a.tolist(),
            "B": self.B.tolist(), "b": self.b.tolist(),
            "K": self.K.tolist(), "mu": self.mu, "nu": self.nu,
        }


def solve_quadratic_saddle(
    instance: QuadraticSaddleInstance,
    problem: SaddleProblem | None = None,
    tol: float = _DEFAULT_TOL,
) -> SaddlePointCertificate:
    """
    LU 分解求解 KKT 系统

    Parameters
    ----------
    instance : QuadraticSaddleInstance
        二次实例
    problem : SaddleProblem, optional
        已构造的问题，缺省由实例构造
    tol : float
        证书容差

    Returns
    -------
    SaddlePointCertificate
        精确鞍点及其证书

    Raises
    ------
    OracleError
        KKT 矩阵奇异或证书未通过
    """
    n, m = instance.n, instance.m
    kkt = np.block([[instance.A, instance.K.T], [-instance.K, instance.B]])
    rhs = np.concatenate([-instance.a, -instance.b])
    try:
        factor = lu_factor(kkt, check_finite=True)
        sol = lu_solve(factor, rhs)
    except (LinAlgError, ValueError) as e:
        raise OracleError(f"KKT 系统求解失败: {e}") from e
    if not np.all(np.isfinite(sol)):
        raise OracleError("KKT 解含非有限值")

    problem = problem or instance.to_problem()
    cert = certify_saddle(problem, sol[:n], sol[n:n + m], tol=tol)
    if not cert.passed:
        raise OracleError(f"KKT 解残差过大: {cert.subgradient_residual:.3e}")
    logger.debug(f"KKT 参照求解完成 f*={cert.f_star:.12g} 残差={cert.subgradient_residual:.2e}")
    return cert


def sample_saddle_inequalities(
    problem: SaddleProblem,
    cert: SaddlePointCertificate,
    samples: int = 100,
    scale: float = 1.0,
    seed: int = 0,
) -> float:
    """
    抽样检查 f(x*, y) ≤ f(x*, y*) ≤ f(x, y*) 及强凸加强形式

        f(x, y*) − f* ≥ (μ/2)‖x − x*‖²
        f* − f(x*, y) ≥ (ν/2)‖y − y*‖²

    Returns
    -------
    float
        所有样本上的最小余量（相对尺度）
    """
    rng = np.random.default_rng(seed)
    f_star = evaluate_f(problem, cert.x_star, cert.y_star)
    worst = np.inf
    for _ in range(samples):
        x = cert.x_star + scale * rng.standard_normal(problem.n)
        y = cert.y_star + scale * rng.standard_normal(problem.m)
        dx = x - cert.x_star
        dy = y - cert.y_star
        upper = evaluate_f(problem, x, cert.y_star) - f_star - 0.5 * problem.mu * float(dx @ dx)
        lower = f_star - evaluate_f(problem, cert.x_star, y) - 0.5 * problem.nu * float(dy @ dy)
        worst = min(worst, upper / max(1.0, abs(f_star)), lower / max(1.0, abs(f_star)))
    return float(worst)
