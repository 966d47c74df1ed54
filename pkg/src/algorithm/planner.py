# -*- coding: utf-8 -*-
"""
参数规划器

给定 (μ, ν, ‖K‖)，选取常数参数 (τ, σ, α, β, ξ) 及辅助常数 η₁..η₄，
使线性收敛所需的全部不等式成立，并报告每个不等式的余量。

搜索策略:
    τ = σ = c·min(1/μ, 1/ν, 1/(‖K‖+ε))，不可行时 c 减半，最多 40 次；
    α 取可行区间中点，ξ = α；
    β = 0.9·sqrt(预算)，β=0 方案可选；
    η 取 下界 + min(0.1·下界, 0.5·(上界−下界))。
"""

import math
from dataclasses import asdict, dataclass, field
from typing import Any

from loguru import logger

from src.common.constants import (
    BETA_BUDGET_FACTOR,
    BETA_CAP,
    ETA_DEFAULT,
    ETA_STEP,
    PLANNER_MAX_HALVINGS,
    PLANNER_NORM_EPS,
    STRICT_REL_SLACK,
    ConditionFamily,
    PlanMode,
)
from src.common.exceptions import InfeasiblePlanError, PlannerInputError


# ============================================================
# 数据结构
# ============================================================

@dataclass(frozen=True, slots=True)
class StepPlan:
    """
    常数参数方案

    Attributes
    ----------
    tau, sigma : float
        原始、对偶步长
    alpha, beta : float
        原始、对偶外推系数
    xi : float
        收敛率 ξ ∈ (0, 1)
    """
    tau: float
    sigma: float
    alpha: float
    beta: float
    xi: float


@dataclass(frozen=True, slots=True)
class AuxCertificate:
    """
    辅助常数证书

    Attributes
    ----------
    zeta : int
        2 为迭代点方案，1 为函数值方案
    eta1, eta2, eta3, eta4 : float
        交叉项估计使用的正常数
    family : ConditionFamily
        ‖K‖ 族或 ‖K‖² 族
    """
    zeta: int
    eta1: float
    eta2: float
    eta3: float
    eta4: float
    family: ConditionFamily


@dataclass(frozen=True, slots=True)
class Margin:
    """
    单个不等式的余量

    slack = 右端 − 左端（已按方向统一为 lhs ≤ rhs）。
    """
    name: str
    lhs: float
    rhs: float
    strict: bool

    @property
    def slack(self) -> float:
        if math.isinf(self.rhs) and math.isinf(self.lhs) and self.rhs == self.lhs:
            return 0.0
        return self.rhs - self.lhs

    @property
    def passed(self) -> bool:
        slack = self.slack
        if math.isnan(slack):
            return False
        if not self.strict:
            return slack >= 0.0
        scale = max(1.0, abs(self.lhs) if math.isfinite(self.lhs) else 1.0,
                    abs(self.rhs) if math.isfinite(self.rhs) else 1.0)
        return slack > STRICT_REL_SLACK * scale

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "slack": self.slack,
            "strict": self.strict,
            "passed": self.passed,
        }


@dataclass(frozen=True)
class PlanReport:
    """规划结果: 参数、证书、模式与全部余量"""
    plan: StepPlan
    cert: AuxCertificate
    mode: PlanMode
    mu: float
    nu: float
    normk: float
    margins: tuple[Margin, ...] = field(default_factory=tuple)

    @property
    def feasible(self) -> bool:
        return all(m.passed for m in self.margins)

    @property
    def failed(self) -> list[Margin]:
        return [m for m in self.margins if not m.passed]

    @property
    def min_slack(self) -> float:
        return min((m.slack for m in self.margins), default=math.inf)

    def to_dict(self) -> dict[str, Any]:
        cert = asdict(self.cert)
        cert["family"] = self.cert.family.value
        return {
            "mode": self.mode.value,
            "mu": self.mu,
            "nu": self.nu,
            "normk": self.normk,
            "plan": asdict(self.plan),
            "cert": cert,
            "margins": [m.to_dict() for m in self.margins],
            "feasible": self.feasible,
        }


# ============================================================
# 辅助函数
# ============================================================

def _div(num: float, den: float) -> float:
    """num/den，den ≤ 0 视为界不可达（+∞）"""
    if den <= 0:
        return math.inf if num > 0 else (0.0 if num == 0 else -math.inf)
    return num / den


def _scaled(coef: float, weight: float) -> float:
    """coef·weight，weight = 0 时为 0（coef 可为 +∞）"""
    return 0.0 if weight == 0 else coef * weight


def _pick(lower: float, upper: float, default: float = ETA_DEFAULT) -> float:
    """在 [lower, upper) 中取值: 下界 + min(0.1·下界, 0.5·(上界−下界))"""
    if lower <= 0:
        return default if math.isinf(upper) else min(default, 0.5 * upper)
    if math.isinf(upper):
        return lower * (1.0 + ETA_STEP)
    return lower + min(ETA_STEP * lower, 0.5 * (upper - lower))


def _check_inputs(mu: float, nu: float, normk: float) -> None:
    if not (math.isfinite(mu) and mu > 0):
        raise PlannerInputError(f"μ 必须为正: {mu}")
    if not (math.isfinite(nu) and nu > 0):
        raise PlannerInputError(f"ν 必须为正: {nu}")
    if not (math.isfinite(normk) and normk >= 0):
        raise PlannerInputError(f"‖K‖ 不能为负: {normk}")


# ============================================================
# 不等式校验
# ============================================================

def validate_plan(
    plan: StepPlan,
    cert: AuxCertificate,
    mu: float,
    nu: float,
    normk: float,
    mode: PlanMode,
) -> list[Margin]:
    """
    校验方案满足的全部不等式

    包含两层条件:
    1. 参数构造条件（阈值、α 区间、β 预算、η 链）
    2. 收敛定理的假设（ξ 范围、μ/ν 下界、聚合条件、η₄ 条件）
    ζ 与估计族取自 mode，而非 cert。

    Returns
    -------
    list[Margin]
        每个不等式一项，统一为 lhs ≤ rhs 方向
    """
    tau, sigma, alpha, beta, xi = plan.tau, plan.sigma, plan.alpha, plan.beta, plan.xi
    eta1, eta2, eta3, eta4 = cert.eta1, cert.eta2, cert.eta3, cert.eta4
    zeta = mode.zeta
    k1 = normk
    k2 = normk * normk
    is_norm = mode.family is ConditionFamily.NORM
    ki = k1 if is_norm else k2
    q = alpha * tau * sigma * k2
    d_term = zeta * mu + 1.0 / tau - 1.0 / (alpha * tau)

    margins = [
        # 1. 参数构造条件
        Margin("threshold_mu", k2, (zeta * mu + 1.0 / tau) / sigma, strict=True),
        Margin("threshold_nu", k2, (zeta * nu + 1.0 / sigma) / tau, strict=True),
        Margin("alpha_lower", 1.0 / (zeta * mu * tau + 1.0), alpha, strict=True),
        Margin("alpha_nu", 1.0 / (zeta * nu * sigma + 1.0), alpha, strict=False),
        Margin("alpha_upper", alpha, 1.0, strict=True),
        Margin("alpha_coupling", q, 1.0, strict=True),
        Margin("beta_budget", sigma * k2 * beta * beta, (1.0 - q) * d_term,
               strict=not (is_norm and not mode.is_value)),
        Margin("eta4_lower", tau, eta4, strict=False),
        Margin("eta4_upper", alpha * sigma * eta4 * k2, 1.0, strict=True),
    ]
    if is_norm:
        margins += [
            Margin("eta3_lower", _div(sigma * k1, 1.0 - q), eta3, strict=True),
            Margin("eta3_upper", eta3 * k1 * beta * beta, d_term, strict=not mode.is_value),
            Margin("eta1_lower", _div(sigma * k1 * eta3, eta3 - sigma * k1), eta1, strict=False),
            Margin("eta1_upper", alpha * tau * eta1 * k1, 1.0, strict=True),
            Margin("eta2_lower", _div(tau * k1, alpha - tau * eta1 * k1 * alpha * alpha), eta2, strict=False),
        ]
    else:
        margins += [
            Margin("eta3_lower", _div(sigma, 1.0 - q), eta3, strict=True),
            Margin("eta3_upper", k2 * beta * beta * eta3, d_term, strict=False),
            Margin("eta1_lower", _div(sigma * eta3, eta3 - sigma), eta1, strict=False),
            Margin("eta1_upper", alpha * tau * eta1 * k2, 1.0, strict=True),
            Margin("eta2_lower", _div(tau, alpha * (1.0 - alpha * tau * eta1 * k2)), eta2, strict=False),
        ]

    # 2. 收敛定理假设
    if is_norm:
        agg_tau = Margin("agg_tau", k1 * (eta1 * xi * xi + 1.0 / eta2), xi / tau, strict=False)
        agg_sigma = Margin("agg_sigma", k1 * (1.0 / eta1 + 1.0 / eta3), 1.0 / sigma, strict=False)
    else:
        agg_tau = Margin("agg_tau", eta1 * k2 * xi + 1.0 / (eta2 * xi), 1.0 / tau, strict=False)
        agg_sigma = Margin("agg_sigma", 1.0 / eta1 + 1.0 / eta3, 1.0 / sigma, strict=False)
    margins += [
        Margin("xi_positive", 0.0, xi, strict=True),
        Margin("xi_below_one", xi, 1.0, strict=True),
        Margin("xi_coupling", xi * tau * sigma * k2, 1.0, strict=True),
        Margin("mu_bound", 1.0 / (xi * tau) - 1.0 / tau + eta3 * ki * beta * beta, zeta * mu, strict=False),
        Margin("nu_bound", 1.0 / (xi * sigma) - 1.0 / sigma + _scaled(eta2 * ki, (xi - alpha) ** 2), zeta * nu, strict=False),
        agg_tau,
        agg_sigma,
        Margin("y_coefficient", xi * eta4 * k2, 1.0 / sigma, strict=True),
    ]
    return margins


# ============================================================
# 辅助常数构造
# ============================================================

def _complete_certificate(
    tau: float,
    sigma: float,
    alpha: float,
    beta: float,
    mu: float,
    normk: float,
    mode: PlanMode,
) -> AuxCertificate:
    """给定 (τ, σ, α, β) 依次构造 η₄、η₃、η₁、η₂"""
    zeta = mode.zeta
    k1 = normk
    k2 = normk * normk
    q = alpha * tau * sigma * k2
    d_term = zeta * mu + 1.0 / tau - 1.0 / (alpha * tau)

    eta4 = _pick(tau, _div(1.0, alpha * sigma * k2))
    if mode.family is ConditionFamily.NORM:
        eta3 = _pick(_div(sigma * k1, 1.0 - q), _div(d_term, k1 * beta * beta))
        eta1 = _pick(_div(sigma * k1 * eta3, eta3 - sigma * k1), _div(1.0, alpha * tau * k1))
        eta2 = _pick(_div(tau * k1, alpha - tau * eta1 * k1 * alpha * alpha), math.inf)
    else:
        eta3 = _pick(_div(sigma, 1.0 - q), _div(d_term, k2 * beta * beta), default=max(sigma, ETA_DEFAULT))
        eta1 = _pick(_div(sigma * eta3, eta3 - sigma), _div(1.0, alpha * tau * k2))
        eta2 = _pick(_div(tau, alpha * (1.0 - alpha * tau * eta1 * k2)), math.inf)
    return AuxCertificate(zeta=zeta, eta1=eta1, eta2=eta2, eta3=eta3, eta4=eta4, family=mode.family)


def certify_constants(
    tau: float,
    sigma: float,
    alpha: float,
    beta: float,
    mu: float,
    nu: float,
    normk: float,
    mode: PlanMode,
    xi: float | None = None,
) -> PlanReport:
    """
    为用户指定的常数参数构造辅助常数并校验

    Parameters
    ----------
    tau, sigma, alpha, beta : float
        用户指定参数
    xi : float, optional
        收敛率，缺省取 α

    Returns
    -------
    PlanReport
        含全部余量；不可行时 feasible=False，不抛异常
    """
    _check_inputs(mu, nu, normk)
    if not (tau > 0 and sigma > 0 and 0 < alpha and beta >= 0):
        raise PlannerInputError(f"参数非法: τ={tau}, σ={sigma}, α={alpha}, β={beta}")
    plan = StepPlan(tau=tau, sigma=sigma, alpha=alpha, beta=beta, xi=alpha if xi is None else xi)
    cert = _complete_certificate(tau, sigma, alpha, beta, mu, normk, mode)
    margins = tuple(validate_plan(plan, cert, mu, nu, normk, mode))
    return PlanReport(plan=plan, cert=cert, mode=mode, mu=mu, nu=nu, normk=normk, margins=margins)


# ============================================================
# 自动规划
# ============================================================

def _try_steps(
    tau: float,
    sigma: float,
    mu: float,
    nu: float,
    normk: float,
    mode: PlanMode,
    zero_beta: bool,
) -> PlanReport | str:
    """固定步长下构造方案；不可行时返回失败的不等式名"""
    zeta = mode.zeta
    k2 = normk * normk

    # 1. 步长阈值
    if not Margin("threshold_mu", k2, (zeta * mu + 1.0 / tau) / sigma, strict=True).passed:
        return "threshold_mu"
    if not Margin("threshold_nu", k2, (zeta * nu + 1.0 / sigma) / tau, strict=True).passed:
        return "threshold_nu"

    # 2. α ∈ (L, U)
    lower = max(1.0 / (zeta * mu * tau + 1.0), 1.0 / (zeta * nu * sigma + 1.0))
    upper = min(1.0, _div(1.0, tau * sigma * k2))
    if not Margin("alpha_lower", lower, upper, strict=True).passed:
        return "alpha_lower"
    alpha = 0.5 * (lower + upper)

    # 3. β 预算 σ‖K‖²β² ≤ (1 − q)·D
    q = alpha * tau * sigma * k2
    d_term = zeta * mu + 1.0 / tau - 1.0 / (alpha * tau)
    if zero_beta:
        beta = 0.0
    elif sigma * k2 == 0:
        beta = BETA_CAP
    else:
        beta = BETA_BUDGET_FACTOR * math.sqrt(max((1.0 - q) * d_term, 0.0) / (sigma * k2))

    # 4. η 链与全部校验
    cert = _complete_certificate(tau, sigma, alpha, beta, mu, normk, mode)
    plan = StepPlan(tau=tau, sigma=sigma, alpha=alpha, beta=beta, xi=alpha)
    margins = tuple(validate_plan(plan, cert, mu, nu, normk, mode))
    report = PlanReport(plan=plan, cert=cert, mode=mode, mu=mu, nu=nu, normk=normk, margins=margins)
    if not report.feasible:
        return report.failed[0].name
    return report


def plan_for_mode(
    mode: PlanMode | str,
    mu: float,
    nu: float,
    normk: float,
    zero_beta: bool = False,
    step_scale: float = 1.0,
) -> PlanReport:
    """
    按模式自动规划参数

    Parameters
    ----------
    mode : PlanMode | str
        iterate-k / iterate-k2 / value-k / value-k2
    mu, nu : float
        g、h 的强凸模量
    normk : float
        ‖K‖ 上界
    zero_beta : bool
        使用 β = 0 方案
    step_scale : float
        搜索起点 c

    Returns
    -------
    PlanReport
        可行方案及全部余量

    Raises
    ------
    PlannerInputError
        μ、ν 非正或 ‖K‖ 为负
    InfeasiblePlanError
        减半 40 次后仍不可行
    """
    mode = PlanMode(mode)
    _check_inputs(mu, nu, normk)
    if not (math.isfinite(step_scale) and step_scale > 0):
        raise PlannerInputError(f"step_scale 必须为正: {step_scale}")

    base = min(1.0 / mu, 1.0 / nu, 1.0 / (normk + PLANNER_NORM_EPS))
    c = step_scale
    last_failed = "threshold_mu"
    for attempt in range(PLANNER_MAX_HALVINGS + 1):
        step = c * base
        result = _try_steps(step, step, mu, nu, normk, mode, zero_beta)
        if isinstance(result, PlanReport):
            p = result.plan
            logger.info(
                f"参数规划完成 [{mode.value}] τ=σ={p.tau:.6g} α={p.alpha:.6g} "
                f"β={p.beta:.6g} ξ={p.xi:.6g} (减半 {attempt} 次)"
            )
            return result
        last_failed = result
        logger.debug(f"c={c:.3g} 不可行，失败条件: {result}")
        c *= 0.5

    logger.error(f"参数规划不可行 [{mode.value}] μ={mu:g} ν={nu:g} ‖K‖={normk:g}，失败条件: {last_failed}")
    raise InfeasiblePlanError(last_failed, detail=f"μ={mu:g}, ν={nu:g}, ‖K‖={normk:g}")


def plan_iterate_rate_k(mu: float, nu: float, normk: float, zero_beta: bool = False, step_scale: float = 1.0) -> PlanReport:
    """迭代点线性收敛方案，‖K‖ 族"""
    return plan_for_mode(PlanMode.ITERATE_K, mu, nu, normk, zero_beta, step_scale)


def plan_iterate_rate_ksq(mu: float, nu: float, normk: float, zero_beta: bool = False, step_scale: float = 1.0) -> PlanReport:
    """迭代点线性收敛方案，‖K‖² 族"""
    return plan_for_mode(PlanMode.ITERATE_KSQ, mu, nu, normk, zero_beta, step_scale)


def plan_value_rate(
    mu: float,
    nu: float,
    normk: float,
    family: ConditionFamily | str = ConditionFamily.NORM,
    zero_beta: bool = False,
    step_scale: float = 1.0,
) -> PlanReport:
    """遍历平均函数值线性收敛方案（ζ = 1）"""
    family = ConditionFamily(family)
    mode = PlanMode.VALUE_K if family is ConditionFamily.NORM else PlanMode.VALUE_KSQ
    return plan_for_mode(mode, mu, nu, normk, zero_beta, step_scale)
