# -*- coding: utf-8 -*-
"""
收敛率拟合测试
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
from src.common.exceptions import RateWindowError
from src.diagnostics.rate import fit_rate
from src.oracle.generator import GeneratorSpec, generate_instance
from src.oracle.quadratic import solve_quadratic_saddle


def test_exact_geometric_series():
    """精确几何序列"""
    print("[TEST] 几何序列拟合")
    fit = fit_rate([3 * 0.8 ** k for k in range(100)])
    assert fit.fitted_rate == pytest.approx(0.8, rel=1e-10)
    assert fit.window == (10, 100)
    assert fit.residual <= 1e-10
    assert np.exp(fit.intercept) == pytest.approx(3.0, rel=1e-8)
    print("  [OK]")


def test_explicit_window():
    series = [1.0] * 20 + [0.5 ** k for k in range(40)]
    fit = fit_rate(series, window=(20, 60))
    assert fit.fitted_rate == pytest.approx(0.5, rel=1e-10)
    assert fit.window == (20, 60)


def test_floor_truncates_window():
    """低于噪声底的尾部被截断"""
    series = np.array([0.5 ** k for k in range(200)])
    series[60:] = 0.0
    fit = fit_rate(series)
    assert fit.window == (20, 60)
    assert fit.fitted_rate == pytest.approx(0.5, rel=1e-10)

    deep = np.array([0.5 ** k for k in range(100)])
    fit = fit_rate(deep, window=(0, 100))
    # 1e-24 以下的点不参与
    assert fit.window == (0, 80)


def test_too_few_points():
    with pytest.raises(RateWindowError):
        fit_rate([1.0, 0.5])
    with pytest.raises(RateWindowError):
        fit_rate([1.0, 0.5, 0.25, 0.125], window=(2, 4))
    with pytest.raises(RateWindowError):
        fit_rate([1.0, 0.0, 0.0, 0.0, 0.0], window=(0, 5))
    with pytest.raises(RateWindowError):
        fit_rate([1.0, np.nan, 0.25, 0.125], window=(0, 4))


def test_solver_rate_below_xi():
    """规划方案下 dist2_x 的经验率不超过 ξ"""
    print("[TEST] 求解器经验收敛率")
    problem, instance = generate_instance(GeneratorSpec(n=20, m=20, mu=1.0, nu=1.0, normk=1.0, seed=42))
    oracle = solve_quadratic_saddle(instance, problem=problem)
    report = plan_iterate_rate_k(1.0, 1.0, problem.normk, step_scale=0.05)
    trace = run(problem, report.plan, np.zeros(20), np.zeros(20),
                stop=StoppingRule(max_iter=500, displacement_tol=0.0), oracle=oracle)
    fit = fit_rate(trace.series("dist2_x"), window=(50, 501))
    assert fit.fitted_rate <= report.plan.xi + 0.02
    assert fit.fitted_rate < 1.0
    print(f"  拟合 {fit.fitted_rate:.4f} ≤ ξ={report.plan.xi:.4f} + 0.02 [OK]")


def test_plateau_window_rejected():
    """窗口整体落在舍入噪声平台上时报错，不给出假的收敛率"""
    series = np.array([0.5 ** k for k in range(60)] + [3e-30] * 440)
    with pytest.raises(RateWindowError, match="已收敛"):
        fit_rate(series, window=(100, 500))
    # 窗口从仍在衰减的位置开始时截断到平台前
    fit = fit_rate(series, window=(10, 500))
    assert fit.window == (10, 60)
    assert fit.fitted_rate == pytest.approx(0.5, rel=1e-10)


def test_default_plan_converged_run():
    """默认步长下很快收敛到机器精度，平台段不能拟合"""
    print("[TEST] 默认规划收敛后的窗口")
    problem, instance = generate_instance(GeneratorSpec(n=20, m=20, mu=1.0, nu=1.0, normk=1.0, seed=0))
    oracle = solve_quadratic_saddle(instance, problem=problem)
    report = plan_iterate_rate_k(1.0, 1.0, problem.normk)
    trace = run(problem, report.plan, np.zeros(20), np.zeros(20),
                stop=StoppingRule(max_iter=500, displacement_tol=0.0), oracle=oracle)
    d = trace.series("dist2_x")
    assert d[50] < 1e-24 * d[0]
    with pytest.raises(RateWindowError):
        fit_rate(d, window=(50, 501))

    # 衰减段本身的拟合率不超过 ξ
    fit = fit_rate(d, window=(1, 501))
    assert fit.window[1] <= 50
    assert fit.fitted_rate <= report.plan.xi + 0.02
    print(f"  衰减段 {fit.window} 拟合 {fit.fitted_rate:.4f} [OK]")


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
