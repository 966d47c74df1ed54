# -*- coding: utf-8 -*-
"""
鞍点参照测试

测试内容：
1. 二次实例KKT解与证书
2. 随机实例生成的确定性与模量
3. 抽样鞍点不等式
4. 非光滑实例由求解器迭代认证
"""

import sys
from pathlib import Path

import numpy as np
import pytest

# 把项目根目录加入 path
PROJECT_ROOT = Path(__file__).parent.parent.parent
sys.path.insert(0, str(PROJECT_ROOT))

from src.algorithm.planner import plan_iterate_rate_k
from src.algorithm.solver import StoppingRule, run
from src.common.exceptions import PlannerInputError
from src.core.coupling import DenseCoupling
from src.core.problem import SaddleProblem
from src.oracle.certificate import certificate_distance, certify_saddle
from src.oracle.generator import GeneratorSpec, generate_instance
from src.oracle.quadratic import QuadraticSaddleInstance, sample_saddle_inequalities, solve_quadratic_saddle
from src.prox.functions import ElasticNet, ShiftedSquaredNorm


# ============================================================
# 二次实例
# ============================================================

def test_scalar_kkt_solution():
    """g = ½x² + x，h = ½y²，K = 1"""
    print("[TEST] 一维KKT解")
    instance = QuadraticSaddleInstance.create([[1.0]], [1.0], [[1.0]], [0.0], [[1.0]])
    cert = solve_quadratic_saddle(instance)
    # x + 1 + y = 0，−x + y = 0 ⇒ x = y = −0.5
    assert cert.x_star[0] == pytest.approx(-0.5)
    assert cert.y_star[0] == pytest.approx(-0.5)
    assert cert.passed
    assert cert.subgradient_residual <= 1e-12
    print("  [OK]")


def test_generated_instance_certificate():
    """随机实例的KKT解通过证书，维度到 50"""
    print("[TEST] 随机实例KKT解")
    for n, m, seed in ((20, 15, 42), (35, 50, 43), (50, 50, 44)):
        problem, instance = generate_instance(GeneratorSpec(n=n, m=m, mu=0.3, nu=0.7, normk=2.0, seed=seed))
        cert = solve_quadratic_saddle(instance, problem=problem)
        assert cert.passed
        assert problem.mu == 0.3 and problem.nu == 0.7
        assert np.linalg.eigvalsh(instance.A)[0] >= 0.3 - 1e-12
        assert np.linalg.eigvalsh(instance.B)[0] >= 0.7 - 1e-12
        assert np.linalg.norm(instance.K, 2) == pytest.approx(2.0, rel=1e-10)
        assert problem.normk >= 2.0
        print(f"  {n}×{m} 残差 {cert.subgradient_residual:.2e} [OK]")


def test_generator_is_deterministic():
    spec = GeneratorSpec(n=4, m=3, mu=1.0, nu=1.0, normk=1.0, seed=7)
    _, a = generate_instance(spec)
    _, b = generate_instance(spec)
    for name in ("A", "a", "B", "b", "K"):
        assert np.array_equal(getattr(a, name), getattr(b, name))
    _, c = generate_instance(GeneratorSpec(n=4, m=3, mu=1.0, nu=1.0, normk=1.0, seed=8))
    assert not np.array_equal(a.K, c.K)


def test_generator_rejects_bad_spec():
    with pytest.raises(PlannerInputError):
        generate_instance(GeneratorSpec(n=0, m=3, mu=1.0, nu=1.0, normk=1.0, seed=0))
    with pytest.raises(PlannerInputError):
        generate_instance(GeneratorSpec(n=3, m=3, mu=-1.0, nu=1.0, normk=1.0, seed=0))


def test_zero_coupling_instance():
    """K = 0 时鞍点为各自极小点"""
    problem, instance = generate_instance(GeneratorSpec(n=3, m=2, mu=1.0, nu=1.0, normk=0.0, seed=1))
    cert = solve_quadratic_saddle(instance, problem=problem)
    np.testing.assert_allclose(cert.x_star, np.linalg.solve(instance.A, -instance.a), atol=1e-12)
    np.testing.assert_allclose(cert.y_star, np.linalg.solve(instance.B, -instance.b), atol=1e-12)
    assert problem.normk == 0.0


def test_from_problem_round_trip():
    problem, instance = generate_instance(GeneratorSpec(n=3, m=3, mu=1.0, nu=1.0, normk=1.0, seed=2))
    again = QuadraticSaddleInstance.from_problem(problem)
    np.testing.assert_allclose(again.A, instance.A)
    np.testing.assert_allclose(again.K, instance.K)
    nonsmooth = SaddleProblem(
        coupling=DenseCoupling(np.eye(2), norm_bound=1.0),
        g=ElasticNet(0.1, 1.0, 2),
        h=ShiftedSquaredNorm(1.0, np.zeros(2)),
    )
    assert QuadraticSaddleInstance.from_problem(nonsmooth) is None


# ============================================================
# 鞍点不等式
# ============================================================

def test_sampled_saddle_inequalities():
    """f(x*, y) ≤ f* ≤ f(x, y*) 的强凸加强形式，每个实例 1000 个样本"""
    print("[TEST] 抽样鞍点不等式")
    for n, m, seed in ((6, 5, 9), (50, 50, 10)):
        problem, instance = generate_instance(GeneratorSpec(n=n, m=m, mu=0.5, nu=0.5, normk=1.0, seed=seed))
        cert = solve_quadratic_saddle(instance, problem=problem)
        worst = sample_saddle_inequalities(problem, cert, samples=1000, scale=2.0, seed=1)
        assert worst >= -1e-9
        print(f"  {n}×{m} 最小余量 {worst:.3e} [OK]")


def test_certificate_rejects_wrong_point():
    problem, instance = generate_instance(GeneratorSpec(n=3, m=2, mu=1.0, nu=1.0, normk=1.0, seed=4))
    cert = solve_quadratic_saddle(instance, problem=problem)
    bad = certify_saddle(problem, cert.x_star + 0.1, cert.y_star)
    assert not bad.passed
    assert certificate_distance(cert, cert.x_star + 0.1, cert.y_star) == pytest.approx(0.1 * np.sqrt(3))


def test_nonsmooth_saddle_certified_by_solver():
    """弹性网原始函数：求解器末次迭代通过次梯度证书"""
    print("[TEST] 非光滑实例认证")
    rng = np.random.default_rng(17)
    K = rng.standard_normal((4, 5))
    K /= np.linalg.norm(K, 2)
    problem = SaddleProblem(
        coupling=DenseCoupling(K, norm_bound=1.0 + 1e-9),
        g=ElasticNet(0.2, 1.0, 5),
        h=ShiftedSquaredNorm(1.0, rng.standard_normal(4)),
    )
    plan = plan_iterate_rate_k(problem.mu, problem.nu, problem.normk).plan
    trace = run(problem, plan, np.zeros(5), np.zeros(4), stop=StoppingRule(max_iter=400, displacement_tol=0.0))
    cert = certify_saddle(problem, trace.final.x, trace.final.y)
    assert cert.passed, cert.subgradient_residual
    print(f"  残差 {cert.subgradient_residual:.2e} [OK]")


# ============================================================
# 主入口
# ============================================================

if __name__ == "__main__":
    tests = [obj for name, obj in sorted(globals().items()) if name.startswith("test_")]
    passed = 0
    for fn in tests:
        try:
            fn()
            passed += 1
        except AssertionError as e:
            print(f"  [FAIL] {fn.__name__}: {e}")
    print("=" * 60)
    print(f"测试结果: {passed}/{len(tests)} 通过")
    print("=" * 60)
