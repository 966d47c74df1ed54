# -*- coding: utf-8 -*-
"""
收敛界检查测试

测试内容：
1. make_check 的方向与相对容差
2. 规划参数下全部检查通过
3. β 过大时迭代点界在第一步失败
4. 五类检查对人为构造的 1% 越界均报告失败
5. 汇总表
"""

import sys
from pathlib import Path

import math
import numpy as np
import pytest

# 把项目根目录加入 path
PROJECT_ROOT = Path(__file__).parent.parent.parent
sys.path.insert(0, str(PROJECT_ROOT))

from src.algorithm.planner import StepPlan, certify_constants, plan_for_mode, plan_iterate_rate_k
from src.algorithm.solver import ConstantSchedule, StoppingRule, Trace, TraceRecord, run
from src.common.constants import PlanMode
from src.common.exceptions import MissingOracleError
from src.diagnostics.checks import (
    check_contraction_step,
    check_cross_term_bounds,
    check_ergodic_gap,
    check_iterate_bound,
    check_prox_step_inequalities,
    check_saddle_step_inequality,
    check_value_bound,
    make_check,
    value_bracket_sup,
)
from src.diagnostics.summary import summarize_checks, summary_to_dict
from src.oracle.generator import GeneratorSpec, generate_instance
from src.oracle.quadratic import QuadraticSaddleInstance, solve_quadratic_saddle


def _planned_run(mode: PlanMode, seed: int = 42, iters: int = 150):
    problem, instance = generate_instance(GeneratorSpec(n=8, m=6, mu=0.5, nu=1.5, normk=2.0, seed=seed))
    oracle = solve_quadratic_saddle(instance, problem=problem)
    report = plan_for_mode(mode, problem.mu, problem.nu, problem.normk)
    rng = np.random.default_rng(seed)
    trace = run(problem, report.plan, rng.standard_normal(8), rng.standard_normal(6),
                stop=StoppingRule(max_iter=iters, displacement_tol=0.0), oracle=oracle)
    return problem, report, trace, oracle


def _failures(checks) -> list:
    return [(c.id, c.k, c.slack) for c in checks if not c.passed]


# ============================================================
# make_check
# ============================================================

def test_make_check_orientation():
    """le / ge 方向"""
    print("[TEST] make_check 方向")
    le = make_check("a", 3, 1.0, 2.0, "le")
    assert le.passed and le.slack == 1.0 and le.k == 3
    ge = make_check("a", 3, 1.0, 2.0, "ge")
    assert not ge.passed and ge.slack == -1.0
    print("  [OK]")


def test_make_check_relative_tolerance():
    """1% 人为违反必被检出，舍入级误差通过"""
    print("[TEST] 相对容差")
    for rhs in [1e-6, 1.0, 1e6]:
        assert not make_check("v", 0, rhs * 1.01 + 1e-8, rhs).passed
        assert make_check("v", 0, rhs * (1 + 1e-12), rhs).passed
    assert not make_check("v", 0, math.nan, 1.0).passed
    assert make_check("v", 0, 1.0 + 1e-6, 1.0, tol=1e-5).passed
    print("  [OK]")


# ============================================================
# 规划参数下的检查
# ============================================================

def test_iterate_mode_checks_pass():
    """迭代点方案: 迭代点界与全部单步不等式"""
    print("[TEST] 迭代点方案检查")
    for mode in (PlanMode.ITERATE_K, PlanMode.ITERATE_KSQ):
        problem, report, trace, oracle = _planned_run(mode)
        checks = check_iterate_bound(trace, report.plan, report.cert, problem.normk, oracle)
        assert len(checks) >= 2 * len(trace)
        checks += check_prox_step_inequalities(trace, problem, random_points=3, seed=1)
        checks += check_saddle_step_inequality(trace, problem)
        checks += check_cross_term_bounds(trace, problem, report.plan, report.cert)
        checks += check_contraction_step(trace, problem, report.plan)
        assert not _failures(checks), _failures(checks)[:5]
        ids = {c.id for c in checks}
        assert {"iterate_sum", "iterate_x", "prox_primal", "prox_dual", "prox_combined",
                "saddle_step", "cross_eta4", "contraction_step"} <= ids
        assert ("cross_norm" in ids) == (mode is PlanMode.ITERATE_K)
        print(f"  {mode.value}: {len(checks)} 项 [OK]")


def test_value_mode_checks_pass():
    """函数值方案: 遍历平均函数值界与间隙界"""
    print("[TEST] 函数值方案检查")
    for mode in (PlanMode.VALUE_K, PlanMode.VALUE_KSQ):
        problem, report, trace, oracle = _planned_run(mode, seed=7, iters=300)
        checks = check_value_bound(trace, report.plan, oracle)
        checks += check_ergodic_gap(trace, problem, oracle, max_points=20)
        assert not _failures(checks), _failures(checks)[:5]
        assert {c.k for c in checks if c.id == "value_upper"} == set(range(1, len(trace)))
        assert value_bracket_sup(trace, report.plan, oracle) > 0
        final = trace.final
        assert abs(final.f_hat - oracle.f_star) <= 1e-6
        print(f"  {mode.value} [OK]")


def test_value_bound_with_explicit_f_star():
    """错误的 f* 使函数值界失败"""
    _, report, trace, oracle = _planned_run(PlanMode.VALUE_K, seed=3, iters=120)
    checks = check_value_bound(trace, report.plan, oracle, f_star=oracle.f_star + 1.0)
    assert any(not c.passed for c in checks)


def test_checks_require_oracle():
    problem, report, trace, _ = _planned_run(PlanMode.ITERATE_K, iters=5)
    trace.oracle = None
    with pytest.raises(MissingOracleError):
        check_iterate_bound(trace, report.plan, report.cert, problem.normk)
    with pytest.raises(MissingOracleError):
        check_saddle_step_inequality(trace, problem)
    with pytest.raises(MissingOracleError):
        check_prox_step_inequalities(trace, problem)


def test_prox_step_with_explicit_points():
    """任意检查点都成立（与参数无关）"""
    problem, _, trace, _ = _planned_run(PlanMode.ITERATE_K, iters=30)
    points = [(np.zeros(8), np.zeros(6)), (np.ones(8), -np.ones(6))]
    checks = check_prox_step_inequalities(trace, problem, points=points)
    assert len(checks) == 3 * 2 * 30
    assert not _failures(checks)


# ============================================================
# 违反条件的参数
# ============================================================

def _adversarial():
    """一维，K = 1，τ = σ = 1，α = 0.5，β = 20"""
    instance = QuadraticSaddleInstance.create([[1.0]], [0.0], [[1.0]], [0.0], [[1.0]])
    problem = instance.to_problem(norm_bound=1.0)
    oracle = solve_quadratic_saddle(instance, problem=problem)
    report = certify_constants(1.0, 1.0, 0.5, 20.0, 1.0, 1.0, 1.0, PlanMode.ITERATE_K)
    trace = run(problem, ConstantSchedule(1.0, 1.0, 0.5, 20.0), [1.0], [0.0],
                stop=StoppingRule(max_iter=5, displacement_tol=0.0), oracle=oracle, xi=0.5)
    return problem, report, trace, oracle


def test_large_beta_breaks_iterate_bound():
    """第一步即违反迭代点界"""
    print("[TEST] β 过大")
    problem, report, trace, oracle = _adversarial()
    assert not report.feasible
    assert trace.records[1].x[0] == pytest.approx(-4.75)
    checks = check_iterate_bound(trace, report.plan, report.cert, 1.0, oracle)
    first = [c for c in checks if c.id == "iterate_sum" and c.k == 1][0]
    assert not first.passed
    assert first.rhs == pytest.approx(0.5)
    print(f"  k=1 余量 {first.slack:.3f} [OK]")


def test_large_beta_keeps_parameter_free_inequalities():
    """邻近不等式与参数无关，仍成立"""
    problem, _, trace, _ = _adversarial()
    checks = check_prox_step_inequalities(trace, problem)
    checks += check_saddle_step_inequality(trace, problem)
    assert not _failures(checks)


# ============================================================
# 人为构造的两点轨迹：越界 1% 必须检出
# ============================================================

def _unit_problem():
    """g = ½x²，h = ½y²，K = 1，鞍点 (0, 0)，f* = 0"""
    instance = QuadraticSaddleInstance.create([[1.0]], [0.0], [[1.0]], [0.0], [[1.0]])
    problem = instance.to_problem(norm_bound=1.0)
    return problem, solve_quadratic_saddle(instance, problem=problem)


def _two_point_trace(first: dict, second: dict, oracle, schedule=None) -> Trace:
    """记录 0 与记录 1，未给出的分量取 0"""
    def record(k: int, fields: dict) -> TraceRecord:
        vec = {name: np.array([float(fields.get(name, 0.0))]) for name in ("x", "y", "x_bar", "y_bar")}
        extra = {name: fields[name] for name in ("x_hat", "y_hat", "f_hat") if name in fields}
        return TraceRecord(k=k, **vec, **extra)

    schedule = schedule or ConstantSchedule(1.0, 1.0, 0.5, 0.5)
    return Trace(records=[record(0, first), record(1, second)], schedule=schedule, xi=0.5, oracle=oracle)


def test_iterate_bound_detects_one_percent_excess():
    """‖x¹ − x*‖²/τ = c·ξ·B₀：c = 0.99 通过，c = 1.01 失败"""
    print("[TEST] 迭代点界敏感性")
    problem, oracle = _unit_problem()
    report = plan_iterate_rate_k(1.0, 1.0, 1.0)
    xi = report.plan.xi
    for c, expect in ((0.99, True), (1.01, False)):
        # B₀ = ‖x⁰‖²/τ = 4
        trace = _two_point_trace({"x": 2.0}, {"x": math.sqrt(c * xi * 4.0)}, oracle)
        checks = check_iterate_bound(trace, report.plan, report.cert, 1.0, oracle)
        first = [ch for ch in checks if ch.id == "iterate_sum" and ch.k == 1][0]
        assert first.passed is expect, (c, first)
        assert first.rhs == pytest.approx(4.0 * xi)
    print("  [OK]")


def test_value_bound_detects_one_percent_excess():
    """f(x̂, ŷ) − f* = c·括号项（j = 0）"""
    print("[TEST] 函数值界敏感性")
    problem, oracle = _unit_problem()
    plan = StepPlan(tau=1.0, sigma=1.0, alpha=0.5, beta=0.5, xi=0.5)
    for c, expect in ((0.99, True), (1.01, False)):
        # 括号项 = ‖x* − x⁰‖²/(2τ) + ‖ŷ − y⁰‖²/(2σ) = 2
        second = {"x_hat": np.zeros(1), "y_hat": np.zeros(1), "f_hat": oracle.f_star + 2.0 * c}
        trace = _two_point_trace({"x": 2.0}, second, oracle)
        checks = {ch.id: ch for ch in check_value_bound(trace, plan, oracle)}
        assert checks["value_upper"].rhs == pytest.approx(2.0)
        assert checks["value_upper"].passed is expect, (c, checks["value_upper"])
        assert checks["value_lower"].passed
    print("  [OK]")


def test_prox_step_detects_one_percent_excess():
    """原始子梯度偏差 δ 使 (i) 左端为 g(x) + δ·(x − x¹)"""
    print("[TEST] 邻近不等式敏感性")
    problem, _ = _unit_problem()
    point = (np.array([2.0]), np.array([1.0]))
    for delta, expect in ((-0.01, True), (0.01, False)):
        # (x⁰ − x¹)/τ − ȳ¹ = 1 − (1 − δ) = δ，而 ∇g(x¹) = 0；g(2) = 2，偏差 2δ 即 1%
        trace = _two_point_trace({"x": 1.0}, {"y_bar": 1.0 - delta}, None)
        checks = check_prox_step_inequalities(trace, problem, points=[point])
        primal = [ch for ch in checks if ch.id == "prox_primal"][0]
        dual = [ch for ch in checks if ch.id == "prox_dual"][0]
        assert primal.rhs == pytest.approx(2.0)
        assert primal.lhs == pytest.approx(2.0 + 2.0 * delta)
        assert primal.passed is expect, (delta, primal)
        assert dual.passed
    print("  [OK]")


def test_saddle_step_detects_one_percent_excess():
    """x⁰ = 2，x¹ = t，y ≡ 0：右端 2t² − 2t + 2 = c·左端"""
    print("[TEST] 鞍点单步不等式敏感性")
    problem, oracle = _unit_problem()
    for c, expect in ((0.99, True), (1.01, False)):
        t = (1.0 + math.sqrt(4.0 * c - 3.0)) / 2.0
        trace = _two_point_trace({"x": 2.0}, {"x": t}, oracle)
        check = check_saddle_step_inequality(trace, problem, oracle)[0]
        assert check.lhs == pytest.approx(2.0)
        assert check.rhs == pytest.approx(2.0 * c, rel=1e-12)
        assert check.passed is expect, (c, check)
    print("  [OK]")


def test_contraction_step_detects_one_percent_excess():
    """ξ = 0.5，x⁰ = 2，x¹ = t，y ≡ 0：右端 1.5t² − 2t + 2 = c·左端"""
    print("[TEST] 单步收缩敏感性")
    problem, oracle = _unit_problem()
    plan = StepPlan(tau=1.0, sigma=1.0, alpha=0.5, beta=0.5, xi=0.5)
    for c, expect in ((0.99, True), (1.01, False)):
        t = (2.0 + math.sqrt(4.0 - 12.0 * (1.0 - c))) / 3.0
        trace = _two_point_trace({"x": 2.0}, {"x": t}, oracle)
        check = check_contraction_step(trace, problem, plan, oracle)[0]
        assert check.lhs == pytest.approx(2.0)
        assert check.rhs == pytest.approx(2.0 * c, rel=1e-12)
        assert check.passed is expect, (c, check)
    print("  [OK]")


# ============================================================
# 汇总
# ============================================================

def test_summarize_checks():
    """按 id 聚合"""
    print("[TEST] 汇总表")
    checks = [
        make_check("a", 0, 1.0, 2.0),
        make_check("a", 1, 3.0, 2.0),
        make_check("a", 2, 2.5, 2.0),
        make_check("b", 0, 0.0, 1.0),
    ]
    summary = summarize_checks(checks)
    assert list(summary.index) == ["a", "b"]
    assert summary.loc["a", "count"] == 3
    assert summary.loc["a", "failures"] == 2
    assert summary.loc["a", "min_slack"] == -1.0
    assert summary.loc["a", "worst_k"] == 1
    assert summary.loc["b", "failures"] == 0
    data = summary_to_dict(summary)
    assert data["a"] == {"count": 3, "failures": 2, "min_slack": -1.0, "worst_k": 1}
    assert summarize_checks([]).empty
    print("  [OK]")


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
