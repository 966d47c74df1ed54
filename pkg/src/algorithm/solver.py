# -*- coding: utf-8 -*-
"""
交替外推邻近求解器

每步按固定顺序更新:
    y^{k+1} = Prox_{σh}(σKx̄^k + y^k)
    ȳ^{k+1} = y^{k+1} + β(y^{k+1} − y^k)
    x^{k+1} = Prox_{τg}(−τK*ȳ^{k+1} + x^k)
    x̄^{k+1} = x^{k+1} + α(x^{k+1} − x^k)
同时维护 ξ 加权的遍历平均 (x̂, ŷ)。
"""

import math
from abc import ABC, abstractmethod
from collections.abc import Callable
from dataclasses import dataclass, field, replace

import numpy as np
from loguru import logger
from numpy.typing import ArrayLike

from src.algorithm.planner import StepPlan
from src.common.constants import DEFAULT_DISPLACEMENT_TOL, DEFAULT_LOG_EVERY, DEFAULT_MAX_ITER
from src.common.exceptions import NonFiniteIterateError, ScheduleError
from src.core.problem import SaddleProblem, evaluate_f, squared_distance
from src.core.types import DualVector, PrimalVector, SaddlePointCertificate


# ============================================================
# 迭代状态
# ============================================================

@dataclass(frozen=True, eq=False, slots=True)
class IterateState:
    """
    第 k 步迭代状态

    Attributes
    ----------
    x, y : 当前迭代点 (x^k, y^k)
    x_prev, y_prev : 上一步迭代点，k=0 时等于初始点
    x_bar, y_bar : 外推点 (x̄^k, ȳ^k)
    k : int
        迭代序号
    """
    x: PrimalVector
    y: DualVector
    x_prev: PrimalVector
    y_prev: DualVector
    x_bar: PrimalVector
    y_bar: DualVector
    k: int

    @classmethod
    def initial(cls, problem: SaddleProblem, x0: ArrayLike, y0: ArrayLike) -> "IterateState":
        """x̄⁰ = x⁰，ȳ⁰ = y⁰"""
        x = problem.primal(x0)
        y = problem.dual(y0)
        return cls(x=x, y=y, x_prev=x, y_prev=y, x_bar=x, y_bar=y, k=0)


# ============================================================
# 参数序列
# ============================================================

class Schedule(ABC):
    """参数序列 (τ_k, σ_k, α_k, β_k)"""

    @abstractmethod
    def tau(self, k: int) -> float: ...

    @abstractmethod
    def sigma(self, k: int) -> float: ...

    @abstractmethod
    def alpha(self, k: int) -> float: ...

    @abstractmethod
    def beta(self, k: int) -> float: ...

    def at(self, k: int) -> tuple[float, float, float, float]:
        """取第 k 步参数并校验 τ, σ > 0，α, β ≥ 0"""
        tau, sigma, alpha, beta = self.tau(k), self.sigma(k), self.alpha(k), self.beta(k)
        if not (tau > 0 and sigma > 0 and math.isfinite(tau) and math.isfinite(sigma)):
            raise ScheduleError(f"第 {k} 步步长非法: τ={tau}, σ={sigma}")
        if not (alpha >= 0 and beta >= 0 and math.isfinite(alpha) and math.isfinite(beta)):
            raise ScheduleError(f"第 {k} 步外推系数非法: α={alpha}, β={beta}")
        return tau, sigma, alpha, beta


@dataclass(frozen=True, slots=True)
class ConstantSchedule(Schedule):
    """常数参数序列"""
    tau_value: float
    sigma_value: float
    alpha_value: float
    beta_value: float

    @classmethod
    def from_plan(cls, plan: StepPlan) -> "ConstantSchedule":
        return cls(plan.tau, plan.sigma, plan.alpha, plan.beta)

    def tau(self, k: int) -> float:
        return self.tau_value

    def sigma(self, k: int) -> float:
        return self.sigma_value

    def alpha(self, k: int) -> float:
        return self.alpha_value

    def beta(self, k: int) -> float:
        return self.beta_value


@dataclass(frozen=True)
class FunctionSchedule(Schedule):
    """由 k 的函数给出的一般参数序列"""
    tau_fn: Callable[[int], float]
    sigma_fn: Callable[[int], float]
    alpha_fn: Callable[[int], float]
    beta_fn: Callable[[int], float]

    def tau(self, k: int) -> float:
        return float(self.tau_fn(k))

    def sigma(self, k: int) -> float:
        return float(self.sigma_fn(k))

    def alpha(self, k: int) -> float:
        return float(self.alpha_fn(k))

    def beta(self, k: int) -> float:
        return float(self.beta_fn(k))


# ============================================================
# 单步迭代
# ============================================================

def _require_finite(k: int, *arrays: np.ndarray) -> None:
    for arr in arrays:
        if not np.all(np.isfinite(arr)):
            raise NonFiniteIterateError(k)


def step(problem: SaddleProblem, state: IterateState, schedule: Schedule) -> IterateState:
    """
    执行一步迭代，返回新状态（不修改输入）

    Raises
    ------
    ScheduleError
        参数非法
    NonFiniteIterateError
        产生非有限值

    Examples
    --------
    1 维、K=1、g=h=½(·)²、τ=σ=1、α=β=0、(x⁰, y⁰)=(1, 0) 时
    y¹=0.5, ȳ¹=0.5, x¹=0.25, x̄¹=0.25。
    """
    tau, sigma, alpha, beta = schedule.at(state.k)
    k_op = problem.coupling
    k_next = state.k + 1

    # 每次进入邻近算子前检查，溢出值不能传给分解类算子
    dual_arg = sigma * k_op.apply(state.x_bar) + state.y
    _require_finite(k_next, dual_arg)
    y_new = problem.h.prox(sigma, dual_arg)
    y_bar = y_new + beta * (y_new - state.y)
    _require_finite(k_next, y_new, y_bar)

    primal_arg = state.x - tau * k_op.adjoint_apply(y_bar)
    _require_finite(k_next, primal_arg)
    x_new = problem.g.prox(tau, primal_arg)
    x_bar = x_new + alpha * (x_new - state.x)
    _require_finite(k_next, x_new, x_bar)

    return IterateState(
        x=x_new, y=y_new, x_prev=state.x, y_prev=state.y,
        x_bar=x_bar, y_bar=y_bar, k=k_next,
    )


# ============================================================
# 遍历平均
# ============================================================

@dataclass(frozen=True, eq=False, slots=True)
class ErgodicAccumulator:
    """
    ξ 加权遍历平均

    x̂_k = Σ_{i=0}^{k} ξ^{k−i} x^{i+1} / s_k，s_k = Σ ξ^{k−i}。
    递推: s' = ξs + 1，x̂' = (1 − 1/s')x̂ + x_new/s'。
    xi=1 时为均匀平均。
    """
    xi: float
    x_hat: PrimalVector | None = None
    y_hat: DualVector | None = None
    weight: float = 0.0
    count: int = 0

    @property
    def index(self) -> int:
        """当前平均的序号 k（含 x^1..x^{k+1}），空时为 −1"""
        return self.count - 1


def ergodic_update(acc: ErgodicAccumulator, x_new: PrimalVector, y_new: DualVector) -> ErgodicAccumulator:
    """
    加入新迭代点，返回新累加器

    Examples
    --------
    ξ=0.5，依次加入 x¹=1, x²=3: s=1.5，x̂ = (0.5·1 + 3)/1.5 = 7/3。
    """
    if acc.x_hat is None:
        return replace(acc, x_hat=x_new.copy(), y_hat=y_new.copy(), weight=1.0, count=1)
    weight = acc.xi * acc.weight + 1.0
    ratio = 1.0 / weight
    x_hat = (1.0 - ratio) * acc.x_hat + ratio * x_new
    y_hat = (1.0 - ratio) * acc.y_hat + ratio * y_new
    return replace(acc, x_hat=x_hat, y_hat=y_hat, weight=weight, count=acc.count + 1)


# ============================================================
# 轨迹
# ============================================================

@dataclass(slots=True)
class StoppingRule:
    """
    停止准则

    Attributes
    ----------
    max_iter : int
        最大迭代次数，0 时只记录初始点
    displacement_tol : float
        ‖z^{k+1} − z^k‖ ≤ tol 时停止，0 表示不启用
    oracle_tol : float | None
        已知鞍点时 ‖z^k − z*‖ ≤ tol 停止
    """
    max_iter: int = DEFAULT_MAX_ITER
    displacement_tol: float = DEFAULT_DISPLACEMENT_TOL
    oracle_tol: float | None = None


@dataclass(eq=False, slots=True)
class TraceRecord:
    """
    第 k 步记录

    k ≥ 1 时 x_hat/y_hat 为序号 k−1 的遍历平均（x¹..x^k 的加权平均），
    f_hat = f(x̂, ŷ)。缺失量为 NaN。
    """
    k: int
    x: PrimalVector
    y: DualVector
    x_bar: PrimalVector
    y_bar: DualVector
    x_hat: PrimalVector | None = None
    y_hat: DualVector | None = None
    dist2_x: float = math.nan
    dist2_y: float = math.nan
    f_hat: float = math.nan
    gap_upper: float = math.nan
    gap_lower: float = math.nan
    displacement: float = math.nan


@dataclass(eq=False)
class Trace:
    """求解轨迹"""
    records: list[TraceRecord]
    schedule: Schedule
    xi: float
    stop_reason: str = ""
    oracle: SaddlePointCertificate | None = None
    plan: StepPlan | None = None
    meta: dict[str, object] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.records)

    @property
    def final(self) -> TraceRecord:
        return self.records[-1]

    def series(self, name: str) -> np.ndarray:
        """按列名取标量序列"""
        return np.array([getattr(r, name) for r in self.records], dtype=np.float64)


def _make_record(
    problem: SaddleProblem,
    state: IterateState,
    acc: ErgodicAccumulator,
    oracle: SaddlePointCertificate | None,
) -> TraceRecord:
    record = TraceRecord(
        k=state.k, x=state.x, y=state.y, x_bar=state.x_bar, y_bar=state.y_bar,
        displacement=math.sqrt(squared_distance(state.x, state.x_prev) + squared_distance(state.y, state.y_prev)),
    )
    if acc.x_hat is not None:
        record.x_hat = acc.x_hat
        record.y_hat = acc.y_hat
        record.f_hat = evaluate_f(problem, acc.x_hat, acc.y_hat)
    if oracle is not None:
        _fill_oracle_fields(problem, record, oracle)
    return record


def _fill_oracle_fields(problem: SaddleProblem, record: TraceRecord, oracle: SaddlePointCertificate) -> None:
    dx = squared_distance(record.x, oracle.x_star)
    dy = squared_distance(record.y, oracle.y_star)
    record.dist2_x = dx
    record.dist2_y = dy
    record.gap_upper = evaluate_f(problem, record.x, oracle.y_star) - evaluate_f(problem, oracle.x_star, record.y)
    record.gap_lower = 0.5 * problem.mu * dx + 0.5 * problem.nu * dy


def attach_oracle(problem: SaddleProblem, trace: Trace, oracle: SaddlePointCertificate) -> None:
    """事后补充鞍点信息（非二次实例先求解再认证时使用）"""
    trace.oracle = oracle
    for record in trace.records:
        _fill_oracle_fields(problem, record, oracle)


def run(
    problem: SaddleProblem,
    schedule: Schedule | StepPlan,
    x0: ArrayLike,
    y0: ArrayLike,
    stop: StoppingRule | None = None,
    oracle: SaddlePointCertificate | None = None,
    xi: float | None = None,
    log_every: int = DEFAULT_LOG_EVERY,
) -> Trace:
    """
    运行求解器并记录轨迹

    Parameters
    ----------
    problem : SaddleProblem
        问题实例
    schedule : Schedule | StepPlan
        参数序列；传入 StepPlan 时使用常数序列
    x0, y0 : ArrayLike
        初始点
    stop : StoppingRule, optional
        停止准则
    oracle : SaddlePointCertificate, optional
        已知鞍点，用于距离与间隙列
    xi : float, optional
        遍历平均权重，缺省取方案的 ξ；均无时为 1（均匀平均）
    log_every : int
        每隔多少步输出 debug 日志

    Returns
    -------
    Trace
        记录 0..N，记录 k 含 (x^k, y^k, x̄^k, ȳ^k)

    Raises
    ------
    NonFiniteIterateError
        迭代发散
    """
    stop = stop or StoppingRule()
    plan = schedule if isinstance(schedule, StepPlan) else None
    sched = ConstantSchedule.from_plan(plan) if plan is not None else schedule
    if xi is None:
        xi = plan.xi if plan is not None else 1.0

    state = IterateState.initial(problem, x0, y0)
    acc = ErgodicAccumulator(xi=xi)
    records = [_make_record(problem, state, acc, oracle)]
    stop_reason = "max_iter"

    logger.info(f"开始求解 n={problem.n} m={problem.m} max_iter={stop.max_iter}")
    for _ in range(stop.max_iter):
        state = step(problem, state, sched)
        acc = ergodic_update(acc, state.x, state.y)
        record = _make_record(problem, state, acc, oracle)
        records.append(record)

        if log_every > 0 and state.k % log_every == 0:
            logger.debug(f"k={state.k} 位移={record.displacement:.3e} f̂={record.f_hat:.10g}")

        if stop.displacement_tol > 0 and record.displacement <= stop.displacement_tol:
            stop_reason = "displacement"
            break
        if stop.oracle_tol is not None and oracle is not None:
            if math.sqrt(record.dist2_x + record.dist2_y) <= stop.oracle_tol:
                stop_reason = "oracle"
                break

    logger.info(f"求解结束: {state.k} 步，停止原因 {stop_reason}")
    return Trace(records=records, schedule=sched, xi=xi, stop_reason=stop_reason, oracle=oracle, plan=plan)
