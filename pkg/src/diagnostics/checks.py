# -*- coding: utf-8 -*-
"""
收敛界与单步不等式检查

每个检查返回 BoundCheck 列表，负余量是数据而非异常。
容差为相对量: slack ≥ −tol·max(1, |lhs|, |rhs|) 视为通过。
"""

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from typing import Literal

import numpy as np
from loguru import logger

from src.algorithm.planner import AuxCertificate, StepPlan
from src.algorithm.solver import Trace, TraceRecord
from src.common.constants import CHECK_REL_TOL, ConditionFamily
from src.common.exceptions import MissingOracleError
from src.core.problem import SaddleProblem, evaluate_f, squared_distance
from src.core.types import DualVector, PrimalVector, SaddlePointCertificate

Orientation = Literal["le", "ge"]


@dataclass(frozen=True, slots=True)
class BoundCheck:
    """
    单个不等式检查结果

    Attributes
    ----------
    id : str
        不等式标识
    k : int
        迭代序号
    lhs, rhs : float
        两端数值
    slack : float
        按方向计算的余量，非负即成立
    passed : bool
        容差内是否成立
    note : str
        附注（如扩展实数跳过）
    """
    id: str
    k: int
    lhs: float
    rhs: float
    slack: float
    passed: bool
    note: str = ""


def make_check(
    check_id: str,
    k: int,
    lhs: float,
    rhs: float,
    orientation: Orientation = "le",
    tol: float = CHECK_REL_TOL,
) -> BoundCheck:
    """
    构造检查结果

    orientation="le" 检查 lhs ≤ rhs，"ge" 检查 lhs ≥ rhs。
    """
    slack = rhs - lhs if orientation == "le" else lhs - rhs
    scale = max(1.0, abs(lhs), abs(rhs))
    passed = bool(math.isfinite(slack) and slack >= -tol * scale)
    return BoundCheck(id=check_id, k=k, lhs=float(lhs), rhs=float(rhs), slack=float(slack), passed=passed)


def _skipped(check_id: str, k: int, note: str) -> BoundCheck:
    return BoundCheck(id=check_id, k=k, lhs=math.nan, rhs=math.inf, slack=math.inf, passed=True, note=note)


def _require_oracle(trace: Trace, cert: SaddlePointCertificate | None, check_id: str) -> SaddlePointCertificate:
    cert = cert or trace.oracle
    if cert is None:
        raise MissingOracleError(check_id)
    return cert


def _steps(trace: Trace) -> Iterable[tuple[TraceRecord, TraceRecord, TraceRecord]]:
    """(记录 k−1, 记录 k, 记录 k+1)，k=0 时 k−1 取记录 0"""
    records = trace.records
    for i in range(len(records) - 1):
        yield records[max(i - 1, 0)], records[i], records[i + 1]


def _inner(u: np.ndarray, v: np.ndarray) -> float:
    return float(u @ v)


# ============================================================
# 迭代点收敛界
# ============================================================

def check_iterate_bound(
    trace: Trace,
    plan: StepPlan,
    cert: AuxCertificate,
    normk: float,
    oracle: SaddlePointCertificate | None = None,
    tol: float = CHECK_REL_TOL,
) -> list[BoundCheck]:
    """
    检查迭代点的线性收敛界

        (1/τ)‖x* − x^k‖² + (1/σ − ξη₄‖K‖²)‖y* − y^k‖² ≤ ξ^k·B₀
        B₀ = (1/τ)‖x* − x⁰‖² + (1/σ)‖y* − y⁰‖²

    并分别给出 x、y 两个分量的推论界。

    Returns
    -------
    list[BoundCheck]
        每条记录三项: iterate_sum / iterate_x / iterate_y
    """
    oracle = _require_oracle(trace, oracle, "iterate_bound")
    tau, sigma, xi = plan.tau, plan.sigma, plan.xi
    c_y = 1.0 / sigma - xi * cert.eta4 * normk * normk
    first = trace.records[0]
    bracket = squared_distance(first.x, oracle.x_star) / tau + squared_distance(first.y, oracle.y_star) / sigma

    checks = []
    for rec in trace.records:
        dx = squared_distance(rec.x, oracle.x_star)
        dy = squared_distance(rec.y, oracle.y_star)
        bound = xi ** rec.k * bracket
        checks.append(make_check("iterate_sum", rec.k, dx / tau + c_y * dy, bound, "le", tol))
        checks.append(make_check("iterate_x", rec.k, dx, tau * bound, "le", tol))
        if c_y > 0:
            checks.append(make_check("iterate_y", rec.k, dy, bound / c_y, "le", tol))
    return checks


# ============================================================
# 函数值收敛界（遍历平均）
# ============================================================

def value_brackets(
    trace: Trace,
    plan: StepPlan,
    oracle: SaddlePointCertificate,
) -> list[tuple[int, float, float]]:
    """
    每条含遍历平均的记录的两个括号项

    Returns
    -------
    list[tuple[int, float, float]]
        (k, (1/2τ)‖x*−x⁰‖² + (1/2σ)‖ŷ−y⁰‖², (1/2τ)‖x̂−x⁰‖² + (1/2σ)‖y*−y⁰‖²)
    """
    tau, sigma = plan.tau, plan.sigma
    x0, y0 = trace.records[0].x, trace.records[0].y
    out = []
    for rec in trace.records:
        if rec.x_hat is None:
            continue
        upper = squared_distance(oracle.x_star, x0) / (2 * tau) + squared_distance(rec.y_hat, y0) / (2 * sigma)
        lower = squared_distance(rec.x_hat, x0) / (2 * tau) + squared_distance(oracle.y_star, y0) / (2 * sigma)
        out.append((rec.k, upper, lower))
    return out


def value_bracket_sup(trace: Trace, plan: StepPlan, oracle: SaddlePointCertificate | None = None) -> float:
    """经验常数 M = sup_k 括号项"""
    oracle = _require_oracle(trace, oracle, "value_bracket_sup")
    brackets = value_brackets(trace, plan, oracle)
    return max((max(u, lo) for _, u, lo in brackets), default=0.0)


def check_value_bound(
    trace: Trace,
    plan: StepPlan,
    oracle: SaddlePointCertificate | None = None,
    f_star: float | None = None,
    tol: float = CHECK_REL_TOL,
) -> list[BoundCheck]:
    """
    检查遍历平均函数值的线性收敛界（序号 j = k − 1）

        f(x̂_j, ŷ_j) − f* ≤ ξ^j((1/2τ)‖x* − x⁰‖² + (1/2σ)‖ŷ_j − y⁰‖²)
        f* − f(x̂_j, ŷ_j) ≤ ξ^j((1/2τ)‖x̂_j − x⁰‖² + (1/2σ)‖y* − y⁰‖²)
    """
    oracle = _require_oracle(trace, oracle, "value_bound")
    f_star = oracle.f_star if f_star is None else f_star
    by_k = {rec.k: rec for rec in trace.records}
    checks = []
    for k, upper, lower in value_brackets(trace, plan, oracle):
        j = k - 1
        f_hat = by_k[k].f_hat
        rate = plan.xi ** j
        checks.append(make_check("value_upper", k, f_hat - f_star, rate * upper, "le", tol))
        checks.append(make_check("value_lower", k, f_star - f_hat, rate * lower, "le", tol))
    return checks


# ============================================================
# 单步邻近不等式
# ============================================================

def check_prox_step_inequalities(
    trace: Trace,
    problem: SaddleProblem,
    points: Sequence[tuple[PrimalVector, DualVector]] | None = None,
    random_points: int = 0,
    seed: int = 0,
    tol: float = CHECK_REL_TOL,
) -> list[BoundCheck]:
    """
    检查每步的邻近最优性不等式，对任意 (x, y):

    (i)  ⟨(x^k − x^{k+1})/τ − K*ȳ^{k+1}, x − x^{k+1}⟩ + (μ/2)‖x − x^{k+1}‖² + g(x^{k+1}) ≤ g(x)
    (ii) ⟨(y^k − y^{k+1})/σ + Kx̄^k, y − y^{k+1}⟩ + (ν/2)‖y − y^{k+1}‖² + h(y^{k+1}) ≤ h(y)
    (v)  二者相加后的距离形式

    g(x) 或 h(y) 为 +∞ 的样本点跳过并附注。

    Parameters
    ----------
    points : Sequence[tuple], optional
        检查点，缺省为轨迹自带的鞍点
    random_points : int
        额外随机点个数（以鞍点或原点为中心）
    """
    sample: list[tuple[PrimalVector, DualVector]] = list(points or [])
    if trace.oracle is not None and not points:
        sample.append((trace.oracle.x_star, trace.oracle.y_star))
    if random_points:
        rng = np.random.default_rng(seed)
        cx = trace.oracle.x_star if trace.oracle is not None else np.zeros(problem.n)
        cy = trace.oracle.y_star if trace.oracle is not None else np.zeros(problem.m)
        sample += [(cx + rng.standard_normal(problem.n), cy + rng.standard_normal(problem.m))
                   for _ in range(random_points)]
    if not sample:
        raise MissingOracleError("prox_step")

    mu, nu = problem.mu, problem.nu
    kop = problem.coupling
    checks = []
    for _, cur, nxt in _steps(trace):
        tau, sigma, _, _ = trace.schedule.at(cur.k)
        g_next = problem.g.value(nxt.x)
        h_next = problem.h.value(nxt.y)
        kt_ybar = kop.adjoint_apply(nxt.y_bar)
        k_xbar = kop.apply(cur.x_bar)
        sub_x = (cur.x - nxt.x) / tau - kt_ybar
        sub_y = (cur.y - nxt.y) / sigma + k_xbar
        for x, y in sample:
            g_x = problem.g.value(x)
            h_y = problem.h.value(y)
            if math.isinf(g_x) or math.isinf(h_y):
                for cid in ("prox_primal", "prox_dual", "prox_combined"):
                    checks.append(_skipped(cid, cur.k, "extended value skipped"))
                continue
            ex = x - nxt.x
            ey = y - nxt.y
            lhs_i = _inner(sub_x, ex) + 0.5 * mu * _inner(ex, ex) + g_next
            lhs_ii = _inner(sub_y, ey) + 0.5 * nu * _inner(ey, ey) + h_next
            checks.append(make_check("prox_primal", cur.k, lhs_i, g_x, "le", tol))
            checks.append(make_check("prox_dual", cur.k, lhs_ii, h_y, "le", tol))

            lhs_v = squared_distance(x, cur.x) / (2 * tau) + squared_distance(y, cur.y) / (2 * sigma)
            rhs_v = (
                (mu / 2 + 1 / (2 * tau)) * _inner(ex, ex)
                + (nu / 2 + 1 / (2 * sigma)) * _inner(ey, ey)
                + squared_distance(cur.x, nxt.x) / (2 * tau)
                + squared_distance(cur.y, nxt.y) / (2 * sigma)
                + _inner(k_xbar, ey)
                - _inner(nxt.y_bar, kop.apply(ex))
                + g_next - h_y + h_next - g_x
            )
            checks.append(make_check("prox_combined", cur.k, lhs_v, rhs_v, "ge", tol))
    return checks


def check_saddle_step_inequality(
    trace: Trace,
    problem: SaddleProblem,
    oracle: SaddlePointCertificate | None = None,
    tol: float = CHECK_REL_TOL,
) -> list[BoundCheck]:
    """
    在鞍点处检查每步不等式

        (1/2τ)‖x*−x^k‖² + (1/2σ)‖y*−y^k‖²
            ≥ (μ + 1/2τ)‖x*−x^{k+1}‖² + (ν + 1/2σ)‖y*−y^{k+1}‖²
              + (1/2τ)‖x^k−x^{k+1}‖² + (1/2σ)‖y^k−y^{k+1}‖²
              + ⟨K(x^{k+1}−x̄^k), y^{k+1}−y*⟩ − ⟨K(x^{k+1}−x*), y^{k+1}−ȳ^{k+1}⟩
    """
    oracle = _require_oracle(trace, oracle, "saddle_step")
    xs, ys = oracle.x_star, oracle.y_star
    mu, nu = problem.mu, problem.nu
    kop = problem.coupling
    checks = []
    for _, cur, nxt in _steps(trace):
        tau, sigma, _, _ = trace.schedule.at(cur.k)
        lhs = squared_distance(xs, cur.x) / (2 * tau) + squared_distance(ys, cur.y) / (2 * sigma)
        rhs = (
            (mu + 1 / (2 * tau)) * squared_distance(xs, nxt.x)
            + (nu + 1 / (2 * sigma)) * squared_distance(ys, nxt.y)
            + squared_distance(cur.x, nxt.x) / (2 * tau)
            + squared_distance(cur.y, nxt.y) / (2 * sigma)
            + _inner(kop.apply(nxt.x - cur.x_bar), nxt.y - ys)
            - _inner(kop.apply(nxt.x - xs), nxt.y - nxt.y_bar)
        )
        checks.append(make_check("saddle_step", cur.k, lhs, rhs, "ge", tol))
    return checks


# ============================================================
# 交叉项估计与单步收缩
# ============================================================

def check_cross_term_bounds(
    trace: Trace,
    problem: SaddleProblem,
    plan: StepPlan,
    cert: AuxCertificate,
    point: tuple[PrimalVector, DualVector] | None = None,
    tol: float = CHECK_REL_TOL,
) -> list[BoundCheck]:
    """
    检查交叉项的 Cauchy-Schwarz 下界

    交叉项 C = ⟨K(x^{k+1}−x̄^k), y^{k+1}−y⟩ − ⟨K(x^{k+1}−x), y^{k+1}−ȳ^{k+1}⟩
    拆分为 ⟨K(x^{k+1}−x^k), y^{k+1}−y⟩ − ξ⟨K(x^k−x^{k−1}), y^k−y⟩ 加三项误差，
    误差按 cert.family 选用 ‖K‖ 或 ‖K‖² 形式估计。另检查 η₄ 的绝对值界:
        |⟨K(x^{k+1}−x^k), y^{k+1}−y⟩| ≤ ½(η₄‖K‖²‖y^{k+1}−y‖² + ‖x^{k+1}−x^k‖²/η₄)
    """
    if point is None:
        oracle = _require_oracle(trace, None, "cross_term")
        point = (oracle.x_star, oracle.y_star)
    x, y = point
    kop = problem.coupling
    k1 = problem.normk
    k2 = k1 * k1
    xi = plan.xi
    e1, e2, e3, e4 = cert.eta1, cert.eta2, cert.eta3, cert.eta4
    checks = []
    for prev, cur, nxt in _steps(trace):
        alpha_prev = trace.schedule.alpha(max(cur.k - 1, 0))
        beta = trace.schedule.beta(cur.k)
        d_old = cur.x - prev.x  # x^k − x^{k−1}，k=0 时为 0
        d_new = nxt.x - cur.x
        dy = nxt.y - cur.y
        cross = (
            _inner(kop.apply(nxt.x - cur.x_bar), nxt.y - y)
            - _inner(kop.apply(nxt.x - x), nxt.y - nxt.y_bar)
        )
        main = _inner(kop.apply(d_new), nxt.y - y) - xi * _inner(kop.apply(d_old), cur.y - y)
        n_old = _inner(d_old, d_old)
        n_dy = _inner(dy, dy)
        n_y = squared_distance(nxt.y, y)
        n_x = squared_distance(nxt.x, x)
        if cert.family is ConditionFamily.NORM:
            err = 0.5 * k1 * (
                e1 * xi * xi * n_old + n_dy / e1
                + e2 * (xi - alpha_prev) ** 2 * n_y + n_old / e2
                + e3 * beta * beta * n_x + n_dy / e3
            )
            cid = "cross_norm"
        else:
            err = 0.5 * (
                e1 * k2 * xi * xi * n_old + n_dy / e1
                + e2 * k2 * (xi - alpha_prev) ** 2 * n_y + n_old / e2
                + e3 * k2 * beta * beta * n_x + n_dy / e3
            )
            cid = "cross_squared"
        checks.append(make_check(cid, cur.k, cross, main - err, "ge", tol))

        abs_term = abs(_inner(kop.apply(d_new), nxt.y - y))
        bound = 0.5 * (e4 * k2 * n_y + _inner(d_new, d_new) / e4)
        checks.append(make_check("cross_eta4", cur.k, abs_term, bound, "le", tol))
    return checks


def check_contraction_step(
    trace: Trace,
    problem: SaddleProblem,
    plan: StepPlan,
    oracle: SaddlePointCertificate | None = None,
    tol: float = CHECK_REL_TOL,
) -> list[BoundCheck]:
    """
    检查每步收缩不等式（方案可行、ξ = α 时成立）

        (1/2τ)‖x*−x^k‖² + (1/2σ)‖y*−y^k‖²
            ≥ (1/2τξ)‖x*−x^{k+1}‖² + (1/2σξ)‖y*−y^{k+1}‖²
              + (1/2τ)‖x^k−x^{k+1}‖² − (ξ/2τ)‖x^k−x^{k−1}‖²
              + ⟨K(x^{k+1}−x^k), y^{k+1}−y*⟩ − ξ⟨K(x^k−x^{k−1}), y^k−y*⟩
    """
    oracle = _require_oracle(trace, oracle, "contraction_step")
    xs, ys = oracle.x_star, oracle.y_star
    tau, sigma, xi = plan.tau, plan.sigma, plan.xi
    kop = problem.coupling
    checks = []
    for prev, cur, nxt in _steps(trace):
        lhs = squared_distance(xs, cur.x) / (2 * tau) + squared_distance(ys, cur.y) / (2 * sigma)
        rhs = (
            squared_distance(xs, nxt.x) / (2 * tau * xi)
            + squared_distance(ys, nxt.y) / (2 * sigma * xi)
            + squared_distance(cur.x, nxt.x) / (2 * tau)
            - xi * squared_distance(cur.x, prev.x) / (2 * tau)
            + _inner(kop.apply(nxt.x - cur.x), nxt.y - ys)
            - xi * _inner(kop.apply(cur.x - prev.x), cur.y - ys)
        )
        checks.append(make_check("contraction_step", cur.k, lhs, rhs, "ge", tol))
    return checks


# ============================================================
# 遍历平均间隙
# ============================================================

def check_ergodic_gap(
    trace: Trace,
    problem: SaddleProblem,
    oracle: SaddlePointCertificate | None = None,
    ks: Sequence[int] | None = None,
    max_points: int = 50,
    tol: float = CHECK_REL_TOL,
) -> list[BoundCheck]:
    """
    检查遍历平均的加权间隙界（序号 j = k − 1，权重 ξ^{j−i}）

        f(x̂, ŷ) − f* ≤ Σ wᵢ (f(x^{i+1}, ŷ) − f(x*, y^{i+1})) / Σ wᵢ
        f* − f(x̂, ŷ) ≤ Σ wᵢ (f(x^{i+1}, y*) − f(x̂, y^{i+1})) / Σ wᵢ

    每个 k 需 O(k) 次函数求值，默认只在最多 max_points 个均匀分布的记录上检查。
    """
    oracle = _require_oracle(trace, oracle, "ergodic_gap")
    xs, ys, f_star = oracle.x_star, oracle.y_star, oracle.f_star
    records = trace.records
    candidates = [r.k for r in records if r.x_hat is not None]
    if ks is None:
        if len(candidates) > max_points:
            idx = np.unique(np.linspace(0, len(candidates) - 1, max_points).round().astype(int))
            ks = [candidates[i] for i in idx]
        else:
            ks = candidates
    by_k = {r.k: r for r in records}

    checks = []
    for k in ks:
        rec = by_k[k]
        # 记录 1..k 即 x^1..x^k，权重 ξ^{k−i}
        weights = np.array([trace.xi ** (k - i) for i in range(1, k + 1)])
        weights /= weights.sum()
        upper_terms = np.array([
            evaluate_f(problem, by_k[i].x, rec.y_hat) - evaluate_f(problem, xs, by_k[i].y)
            for i in range(1, k + 1)
        ])
        lower_terms = np.array([
            evaluate_f(problem, by_k[i].x, ys) - evaluate_f(problem, rec.x_hat, by_k[i].y)
            for i in range(1, k + 1)
        ])
        checks.append(make_check("ergodic_upper", k, rec.f_hat - f_star, float(weights @ upper_terms), "le", tol))
        checks.append(make_check("ergodic_lower", k, f_star - rec.f_hat, float(weights @ lower_terms), "le", tol))
    failures = sum(not c.passed for c in checks)
    if failures:
        logger.warning(f"遍历间隙检查有 {failures} 项未通过")
    return checks
