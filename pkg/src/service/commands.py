# -*- coding: utf-8 -*-
"""
命令行子命令实现

plan / solve / check / rate，每个函数返回退出码:
0 成功，1 检查失败或不可行，2 输入错误。
"""

import json
import math
from pathlib import Path

import pandas as pd
from loguru import logger

from src.algorithm.planner import PlanReport, plan_for_mode
from src.common.constants import RATE_DEFAULT_EXCESS, ExitCode, PlanMode, TraceColumns
from src.common.exceptions import (
    ConfigError,
    InfeasiblePlanError,
    MissingOracleError,
    PlannerInputError,
    RateWindowError,
    SaddleError,
    TraceMismatchError,
)
from src.algorithm.solver import attach_oracle
from src.diagnostics.checks import (
    BoundCheck,
    check_contraction_step,
    check_cross_term_bounds,
    check_iterate_bound,
    check_prox_step_inequalities,
    check_saddle_step_inequality,
    check_value_bound,
)
from src.diagnostics.rate import fit_rate
from src.diagnostics.summary import summarize_checks, summary_to_dict
from src.oracle.certificate import certify_saddle
from src.repository.instance import load_problem
from src.repository.plan import load_plan_report, save_plan_report
from src.repository.trace import check_header_matches_plan, read_iterates_json, read_trace_csv
from src.service.experiment import create_experiment_service, oracle_for


def _margin_table(report: PlanReport) -> pd.DataFrame:
    return pd.DataFrame([m.to_dict() for m in report.margins]).set_index("name")


def cmd_plan(
    mu: float,
    nu: float,
    normk: float,
    mode: str = PlanMode.ITERATE_K.value,
    out: str | Path | None = None,
    zero_beta: bool = False,
    step_scale: float = 1.0,
) -> int:
    """
    规划参数并打印余量表

    Returns
    -------
    int
        0 可行，1 不可行，2 输入非法
    """
    try:
        report = plan_for_mode(mode, mu, nu, normk, zero_beta=zero_beta, step_scale=step_scale)
    except InfeasiblePlanError as e:
        logger.error(f"不可行: {e.failed_inequality}")
        print(f"[INFEASIBLE] 失败条件: {e.failed_inequality}")
        return ExitCode.CHECK_FAILED
    except (PlannerInputError, ValueError) as e:
        logger.error(f"输入非法: {e}")
        return ExitCode.INPUT_ERROR

    p, c = report.plan, report.cert
    print("=" * 60)
    print(f"模式: {report.mode.value}  (ζ={c.zeta}, {c.family.value})")
    print(f"τ={p.tau!r}  σ={p.sigma!r}")
    print(f"α={p.alpha!r}  β={p.beta!r}  ξ={p.xi!r}")
    print(f"η₁={c.eta1!r}  η₂={c.eta2!r}  η₃={c.eta3!r}  η₄={c.eta4!r}")
    print("=" * 60)
    print(_margin_table(report).to_string())

    if out is not None:
        save_plan_report(report, Path(out))
    logger.success(f"规划可行，最小余量 {report.min_slack:.3e}")
    return ExitCode.OK


def cmd_solve(config_path: str | Path, out_dir: str | Path | None = None, seed: int | None = None) -> int:
    """
    按配置运行实验并写出结果

    Returns
    -------
    int
        0 全部检查通过，1 规划不可行或检查失败，2 配置/文件错误
    """
    try:
        service = create_experiment_service(config_path, out_dir=out_dir, seed=seed)
        result = service.run()
        written = service.write_outputs(result)
    except InfeasiblePlanError as e:
        logger.error(str(e))
        return ExitCode.CHECK_FAILED
    except (ConfigError, FileNotFoundError) as e:
        logger.error(str(e))
        return ExitCode.INPUT_ERROR
    except SaddleError as e:
        logger.error(str(e))
        return ExitCode.CHECK_FAILED

    for name, path in written.items():
        logger.info(f"{name}: {path}")
    if not result.passed:
        return ExitCode.CHECK_FAILED
    logger.success(f"求解完成: {result.trace.final.k} 步，{len(result.checks)} 项检查全部通过")
    return ExitCode.OK


def run_all_checks(iterates_path: Path, plan_path: Path, instance_path: Path, tol: float) -> list[BoundCheck]:
    """
    载入迭代点、规划与实例，运行全部检查

    Raises
    ------
    TraceMismatchError
        迭代点文件头与规划不一致
    MissingOracleError
        无法得到鞍点
    """
    header, trace = read_iterates_json(iterates_path)
    report = load_plan_report(plan_path)
    check_header_matches_plan(header, report.plan)
    problem = load_problem(instance_path)

    oracle = oracle_for(problem)
    if oracle is None:
        final = trace.final
        oracle = certify_saddle(problem, final.x, final.y)
        if not oracle.passed:
            raise MissingOracleError("check")
    attach_oracle(problem, trace, oracle)

    plan, cert = report.plan, report.cert
    checks: list[BoundCheck] = []
    checks += check_iterate_bound(trace, plan, cert, problem.normk, oracle, tol)
    if report.mode.is_value:
        checks += check_value_bound(trace, plan, oracle, tol=tol)
    checks += check_prox_step_inequalities(trace, problem, tol=tol)
    checks += check_saddle_step_inequality(trace, problem, oracle, tol)
    checks += check_cross_term_bounds(trace, problem, plan, cert, tol=tol)
    checks += check_contraction_step(trace, problem, plan, oracle, tol)
    return checks


def cmd_check(
    iterates_path: str | Path,
    plan_path: str | Path,
    instance_path: str | Path,
    report_path: str | Path | None = None,
    tol: float = 1e-9,
) -> int:
    """
    对保存的轨迹运行全部检查

    Returns
    -------
    int
        0 全部通过，1 有失败项，2 文件缺失或参数不一致
    """
    try:
        checks = run_all_checks(Path(iterates_path), Path(plan_path), Path(instance_path), tol)
    except TraceMismatchError as e:
        logger.error(str(e))
        return ExitCode.INPUT_ERROR
    except (ConfigError, FileNotFoundError, MissingOracleError) as e:
        logger.error(str(e))
        return ExitCode.INPUT_ERROR

    summary = summarize_checks(checks)
    print(summary.to_string())
    if report_path is not None:
        path = Path(report_path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(summary_to_dict(summary), f, indent=2, sort_keys=True)

    failures = int(summary["failures"].sum()) if not summary.empty else 0
    if failures:
        logger.error(f"检查失败 {failures} 项")
        return ExitCode.CHECK_FAILED
    logger.success(f"{len(checks)} 项检查全部通过")
    return ExitCode.OK


def cmd_rate(
    trace_path: str | Path,
    column: str = TraceColumns.DIST2_X,
    window: tuple[int, int] | None = None,
    max_excess: float = RATE_DEFAULT_EXCESS,
) -> int:
    """
    拟合轨迹某列的收敛率并与规划的 ξ 比较

    Returns
    -------
    int
        0 拟合率 ≤ ξ + max_excess，1 超出，2 文件/窗口错误
    """
    try:
        header, frame = read_trace_csv(Path(trace_path))
    except FileNotFoundError as e:
        logger.error(str(e))
        return ExitCode.INPUT_ERROR
    if column not in frame.columns:
        logger.error(f"轨迹中没有列: {column}")
        return ExitCode.INPUT_ERROR

    series = frame.set_index(TraceColumns.K)[column].sort_index()
    if series.empty:
        logger.error(f"轨迹为空: {trace_path}")
        return ExitCode.INPUT_ERROR
    # 整条序列按迭代序号对齐后交给拟合，噪声底才能以全序列为参照
    values = series.reindex(pd.RangeIndex(int(series.index.max()) + 1)).to_numpy(dtype=float)
    try:
        fit = fit_rate(values, window=window)
    except RateWindowError as e:
        logger.error(str(e))
        return ExitCode.INPUT_ERROR

    xi = float(header.get("xi", "nan"))
    print(f"列: {column}  窗口: [{fit.window[0]}, {fit.window[1]})")
    print(f"拟合率: {fit.fitted_rate!r}  规划 ξ: {xi!r}  残差: {fit.residual:.3e}")

    if math.isfinite(xi) and fit.fitted_rate > xi + max_excess:
        logger.error(f"拟合率 {fit.fitted_rate:.6f} 超过 ξ + {max_excess}")
        return ExitCode.CHECK_FAILED
    logger.success(f"拟合率 {fit.fitted_rate:.6f}")
    return ExitCode.OK
