# -*- coding: utf-8 -*-
"""
求解器测试

测试内容：
1. 单步更新顺序（一维手算）
2. 遍历平均递推
3. 规划参数下的收敛与停止准则
4. 确定性、参数序列校验、发散检测
"""

import sys
from pathlib import Path

import numpy as np
import pytest

# 把项目根目录加入 path
PROJECT_ROOT = Path(__file__).parent.parent.parent
sys.path.insert(0, str(PROJECT_ROOT))

from src.algorithm.planner import plan_iterate_rate_k
from src.algorithm.solver import (
    ConstantSchedule,
    ErgodicAccumulator,
    FunctionSchedule,
    IterateState,
    StoppingRule,
    ergodic_update,
    run,
    step,
)
from src.common.exceptions import NonFiniteIterateError, ScheduleError
from src.core.coupling import DenseCoupling
from src.core.problem import SaddleProblem
from src.oracle.generator import GeneratorSpec, generate_instance
from src.oracle.quadratic import solve_quadratic_saddle
from src.prox.functions import QuadraticFunction


def _scalar_problem() -> SaddleProblem:
    """g = h = ½(·)²，K = 1"""
    return SaddleProblem(
        coupling=DenseCoupling([[1.0]], norm_bound=1.0),
        g=QuadraticFunction(np.eye(1), np.zeros(1)),
        h=QuadraticFunction(np.eye(1), np.zeros(1)),
    )


# ============================================================
# 单步
# ============================================================

def test_single_step_order():
    """y 先更新，x 使用外推后的 ȳ"""
    print("[TEST] 单步更新顺序")
    problem = _scalar_problem()
    state = IterateState.initial(problem, [1.0], [0.0])
    nxt = step(problem, state, ConstantSchedule(1.0, 1.0, 0.0, 0.0))
    assert nxt.k == 1
    assert nxt.y[0] == pytest.approx(0.5)
    assert nxt.y_bar[0] == pytest.approx(0.5)
    assert nxt.x[0] == pytest.approx(0.25)
    assert nxt.x_bar[0] == pytest.approx(0.25)
    # 输入状态不变
    assert state.x[0] == 1.0 and state.k == 0
    print("  [OK]")


def test_single_step_with_extrapolation():
    """α = β = 1 时的外推点"""
    problem = _scalar_problem()
    state = IterateState.initial(problem, [1.0], [0.0])
    nxt = step(problem, state, ConstantSchedule(1.0, 1.0, 1.0, 1.0))
    # y¹ = 0.5，ȳ¹ = 1.0，x¹ = (1 − 1)/2 = 0，x̄¹ = 0 + (0 − 1) = −1
    assert nxt.y_bar[0] == pytest.approx(1.0)
    assert nxt.x[0] == pytest.approx(0.0)
    assert nxt.x_bar[0] == pytest.approx(-1.0)
    assert nxt.x_prev[0] == 1.0


def test_schedule_validation():
    """非正步长或负外推系数"""
    problem = _scalar_problem()
    state = IterateState.initial(problem, [1.0], [0.0])
    with pytest.raises(ScheduleError):
        step(problem, state, ConstantSchedule(0.0, 1.0, 0.5, 0.5))
    with pytest.raises(ScheduleError):
        step(problem, state, ConstantSchedule(1.0, 1.0, -0.5, 0.5))
    sched = FunctionSchedule(lambda k: 1.0 if k < 2 else -1.0, lambda k: 1.0, lambda k: 0.0, lambda k: 0.0)
    with pytest.raises(ScheduleError):
        run(problem, sched, [1.0], [0.0], stop=StoppingRule(max_iter=5, displacement_tol=0.0))


def test_divergence_detected():
    """超大外推系数导致溢出"""
    problem = _scalar_problem()
    sched = ConstantSchedule(1.0, 1.0, 0.0, 1e308)
    with np.errstate(over="ignore", invalid="ignore"):
        with pytest.raises(NonFiniteIterateError):
            run(problem, sched, [1.0], [0.0], stop=StoppingRule(max_iter=20, displacement_tol=0.0))


def test_dual_overflow_stops_before_primal_prox():
    """ȳ 溢出时在原始邻近算子（Cholesky 求解）之前报告非有限值"""
    problem = _scalar_problem()
    state = IterateState.initial(problem, [1e300], [0.0])
    # y¹ = 5e299，ȳ¹ = y¹ + 1e10·y¹ 溢出
    with np.errstate(over="ignore", invalid="ignore"):
        with pytest.raises(NonFiniteIterateError) as exc:
            step(problem, state, ConstantSchedule(1.0, 1.0, 0.0, 1e10))
    assert exc.value.k == 1


# ============================================================
# 遍历平均
# ============================================================

def test_ergodic_update_weights():
    """ξ = 0.5 时 x̂ = (0.5·1 + 3)/1.5"""
    print("[TEST] 遍历平均递推")
    acc = ErgodicAccumulator(xi=0.5)
    assert acc.index == -1
    acc = ergodic_update(acc, np.array([1.0]), np.array([0.0]))
    assert acc.x_hat[0] == 1.0 and acc.index == 0
    acc = ergodic_update(acc, np.array([3.0]), np.array([6.0]))
    assert acc.weight == pytest.approx(1.5)
    assert acc.x_hat[0] == pytest.approx(7.0 / 3.0)
    assert acc.y_hat[0] == pytest.approx(4.0)
    print("  [OK]")


def test_ergodic_uniform_average():
    """ξ = 1 时为算术平均"""
    acc = ErgodicAccumulator(xi=1.0)
    values = [2.0, -1.0, 5.0, 4.0]
    for v in values:
        acc = ergodic_update(acc, np.array([v]), np.array([v]))
    assert acc.x_hat[0] == pytest.approx(np.mean(values))


def test_ergodic_recursion_matches_direct_sum():
    """递推与直接加权求和一致，权重满足 1 ≤ s < 1/(1−ξ)"""
    print("[TEST] 遍历平均与直接求和")
    rng = np.random.default_rng(19)
    xs = 5.0 + rng.standard_normal((50, 3))
    ys = -2.0 + rng.standard_normal((50, 2))
    for xi in (0.5, 0.9, 0.99):
        acc = ErgodicAccumulator(xi=xi)
        for k in range(1, 51):
            acc = ergodic_update(acc, xs[k - 1], ys[k - 1])
            w = xi ** np.arange(k - 1, -1, -1)
            np.testing.assert_allclose(acc.x_hat, w @ xs[:k] / w.sum(), rtol=1e-10)
            np.testing.assert_allclose(acc.y_hat, w @ ys[:k] / w.sum(), rtol=1e-10)
            assert acc.weight == pytest.approx(w.sum(), rel=1e-12)
            assert 1.0 <= acc.weight < 1.0 / (1.0 - xi)
    print("  ξ ∈ {0.5, 0.9, 0.99} [OK]")


def test_trace_records_ergodic_index():
    """记录 k 的遍历平均为 x¹..x^k 的加权平均"""
    problem = _scalar_problem()
    trace = run(problem, ConstantSchedule(0.5, 0.5, 0.5, 0.5), [1.0], [1.0],
                stop=StoppingRule(max_iter=3, displacement_tol=0.0), xi=0.5)
    xs = [r.x[0] for r in trace.records]
    assert trace.records[0].x_hat is None
    assert trace.records[1].x_hat[0] == pytest.approx(xs[1])
    expected = (0.25 * xs[1] + 0.5 * xs[2] + xs[3]) / 1.75
    assert trace.records[3].x_hat[0] == pytest.approx(expected)


# ============================================================
# 收敛与停止
# ============================================================

def test_planned_run_converges():
    """规划参数下收敛到KKT解"""
    print("[TEST] 规划参数收敛")
    problem, instance = generate_instance(GeneratorSpec(n=6, m=4, mu=1.0, nu=1.0, normk=1.0, seed=3))
    oracle = solve_quadratic_saddle(instance, problem=problem)
    report = plan_iterate_rate_k(problem.mu, problem.nu, problem.normk)
    trace = run(problem, report.plan, np.zeros(6), np.zeros(4),
                stop=StoppingRule(max_iter=300, displacement_tol=0.0), oracle=oracle)
    assert len(trace) == 301
    assert trace.stop_reason == "max_iter"
    assert trace.xi == report.plan.xi
    final = trace.final
    assert final.dist2_x + final.dist2_y <= 1e-20
    assert final.gap_lower >= 0
    assert abs(final.f_hat - oracle.f_star) <= 1e-6
    print(f"  ‖z − z*‖² = {final.dist2_x + final.dist2_y:.2e} [OK]")


def test_stopping_rules():
    """最大步数、位移与参照距离"""
    problem, instance = generate_instance(GeneratorSpec(n=3, m=3, mu=1.0, nu=1.0, normk=1.0, seed=0))
    oracle = solve_quadratic_saddle(instance, problem=problem)
    plan = plan_iterate_rate_k(1.0, 1.0, problem.normk).plan

    trace = run(problem, plan, np.ones(3), np.ones(3), stop=StoppingRule(max_iter=0))
    assert len(trace) == 1 and trace.final.k == 0

    trace = run(problem, plan, np.ones(3), np.ones(3), stop=StoppingRule(max_iter=10_000, displacement_tol=1e-8))
    assert trace.stop_reason == "displacement"
    assert trace.final.displacement <= 1e-8

    trace = run(problem, plan, np.ones(3), np.ones(3), oracle=oracle,
                stop=StoppingRule(max_iter=10_000, displacement_tol=0.0, oracle_tol=1e-6))
    assert trace.stop_reason == "oracle"
    assert np.sqrt(trace.final.dist2_x + trace.final.dist2_y) <= 1e-6


def test_run_is_deterministic():
    """相同输入逐位相同"""
    problem, _ = generate_instance(GeneratorSpec(n=5, m=5, mu=0.5, nu=2.0, normk=2.0, seed=11))
    plan = plan_iterate_rate_k(problem.mu, problem.nu, problem.normk).plan
    stop = StoppingRule(max_iter=50, displacement_tol=0.0)
    a = run(problem, plan, np.ones(5), -np.ones(5), stop=stop)
    b = run(problem, plan, np.ones(5), -np.ones(5), stop=stop)
    for ra, rb in zip(a.records, b.records):
        assert np.array_equal(ra.x, rb.x)
        assert np.array_equal(ra.y, rb.y)
    assert np.array_equal(a.series("f_hat")[1:], b.series("f_hat")[1:])


def test_fixed_point_stays():
    """从鞍点出发停在鞍点"""
    problem, instance = generate_instance(GeneratorSpec(n=4, m=3, mu=1.0, nu=1.0, normk=1.5, seed=5))
    oracle = solve_quadratic_saddle(instance, problem=problem)
    plan = plan_iterate_rate_k(problem.mu, problem.nu, problem.normk).plan
    trace = run(problem, plan, oracle.x_star, oracle.y_star,
                stop=StoppingRule(max_iter=5, displacement_tol=0.0), oracle=oracle)
    for rec in trace.records:
        assert rec.dist2_x + rec.dist2_y <= 1e-18


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
