# -*- coding: utf-8 -*-
"""
实验服务

按运行配置构造实例、规划参数、求解、检查收敛界并写出结果文件。
"""

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
from loguru import logger

from src.algorithm.planner import PlanReport, certify_constants, plan_for_mode
from src.algorithm.solver import StoppingRule, Trace, attach_oracle, run
from src.common.config import RunConfig, load_config, with_overrides
from src.common.constants import ProblemSource, StartKind
from src.core.problem import SaddleProblem
from src.core.types import SaddlePointCertificate
from src.diagnostics.checks import BoundCheck, check_iterate_bound, check_value_bound, value_bracket_sup
from src.diagnostics.summary import summarize_checks, summary_to_dict
from src.oracle.certificate import certificate_distance, certify_saddle
from src.oracle.generator import GeneratorSpec, generate_instance
from src.oracle.quadratic import QuadraticSaddleInstance, solve_quadratic_saddle
from src.repository.instance import load_problem, problem_from_dict, save_problem
from src.repository.plan import save_plan_report
from src.repository.trace import build_header, trace_to_frame, write_iterates_json, write_trace_csv


@dataclass
class ExperimentResult:
    """一次实验的全部产物"""
    problem: SaddleProblem
    report: PlanReport
    trace: Trace
    oracle: SaddlePointCertificate | None
    checks: list[BoundCheck] = field(default_factory=list)
    summary: dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def oracle_for(problem: SaddleProblem, tol: float = 1e-8) -> SaddlePointCertificate | None:
    """二次实例返回KKT精确解，其他实例返回 None（求解后再认证）"""
    instance = QuadraticSaddleInstance.from_problem(problem)
    if instance is None:
        return None
    return solve_quadratic_saddle(instance, problem=problem, tol=tol)


class ExperimentService:
    """
    实验服务

    功能：
    - 构造问题实例（随机生成 / 文件 / 内嵌）
    - 自动规划或校验显式参数
    - 求解并记录轨迹
    - 检查迭代点界与函数值界，写出 CSV/JSON
    """

    def __init__(self, config: RunConfig) -> None:
        self._config = config

    @property
    def config(self) -> RunConfig:
        return self._config

    def build_problem(self) -> SaddleProblem:
        """按配置构造问题"""
        pc = self._config.problem
        if pc.source is ProblemSource.GENERATOR:
            spec = GeneratorSpec(n=pc.n, m=pc.m, mu=pc.mu, nu=pc.nu, normk=pc.normk, seed=pc.seed)
            problem, _ = generate_instance(spec)
            logger.info(f"生成随机二次实例 n={pc.n} m={pc.m} μ={pc.mu:g} ν={pc.nu:g} ‖K‖={pc.normk:g} seed={pc.seed}")
            return problem
        if pc.source is ProblemSource.FILE:
            logger.info(f"读取实例: {pc.path}")
            return load_problem(Path(pc.path))
        return problem_from_dict(pc.inline)

    def build_plan(self, problem: SaddleProblem) -> PlanReport:
        """
        自动规划或校验显式参数

        显式参数不可行时仅告警，仍按其运行（用于扰动实验）。
        """
        pl = self._config.plan
        if pl.explicit is None:
            return plan_for_mode(pl.mode, problem.mu, problem.nu, problem.normk,
                                 zero_beta=pl.zero_beta, step_scale=pl.step_scale)
        ex = pl.explicit
        report = certify_constants(ex.tau, ex.sigma, ex.alpha, ex.beta,
                                   problem.mu, problem.nu, problem.normk, ex.check_mode, xi=ex.xi)
        if not report.feasible:
            names = ", ".join(m.name for m in report.failed)
            logger.warning(f"显式参数不满足收敛条件: {names}")
        return report

    def initial_point(self, problem: SaddleProblem) -> tuple[np.ndarray, np.ndarray]:
        st = self._config.start
        if st.kind is StartKind.ZEROS:
            return np.zeros(problem.n), np.zeros(problem.m)
        if st.kind is StartKind.RANDOM:
            seed = self._config.problem.seed or 0
            rng = np.random.default_rng(seed + 1)
            return st.scale * rng.standard_normal(problem.n), st.scale * rng.standard_normal(problem.m)
        return problem.primal(st.x0), problem.dual(st.y0)

    def run(self) -> ExperimentResult:
        """
        执行完整实验（不写文件）

        Returns
        -------
        ExperimentResult
            问题、规划、轨迹、鞍点与边界检查
        """
        cfg = self._config
        problem = self.build_problem()
        report = self.build_plan(problem)
        oracle = oracle_for(problem)
        x0, y0 = self.initial_point(problem)

        stop = StoppingRule(
            max_iter=cfg.solver.max_iter,
            displacement_tol=cfg.solver.displacement_tol,
            oracle_tol=cfg.solver.oracle_tol,
        )
        trace = run(problem, report.plan, x0, y0, stop=stop, oracle=oracle, log_every=cfg.solver.log_every)

        if oracle is None:
            final = trace.final
            candidate = certify_saddle(problem, final.x, final.y)
            if candidate.passed:
                oracle = candidate
                attach_oracle(problem, trace, oracle)
                logger.info(f"末次迭代通过鞍点认证，残差 {candidate.subgradient_residual:.2e}")
            else:
                logger.warning(f"末次迭代未通过鞍点认证，残差 {candidate.subgradient_residual:.2e}")

        checks: list[BoundCheck] = []
        summary: dict[str, Any] = {}
        if oracle is not None:
            tol = cfg.diagnostics.tol
            checks += check_iterate_bound(trace, report.plan, report.cert, problem.normk, oracle, tol)
            if report.mode.is_value:
                checks += check_value_bound(trace, report.plan, oracle, tol=tol)
                summary["value_bracket_sup"] = value_bracket_sup(trace, report.plan, oracle)
            final = trace.final
            summary["final_distance"] = certificate_distance(oracle, final.x, final.y)
            summary["f_star"] = oracle.f_star
        summary["checks"] = summary_to_dict(summarize_checks(checks))
        summary["iterations"] = trace.final.k
        summary["stop_reason"] = trace.stop_reason
        summary["plan"] = report.to_dict()

        failures = sum(not c.passed for c in checks)
        if failures:
            logger.error(f"收敛界检查失败 {failures} 项")
        return ExperimentResult(problem=problem, report=report, trace=trace, oracle=oracle,
                                checks=checks, summary=summary)

    def write_outputs(self, result: ExperimentResult) -> dict[str, Path]:
        """写出实例、规划、轨迹、迭代点与摘要文件"""
        out = self._config.outputs
        header = build_header(result.trace, self._mode_label(), self._config.problem.seed)
        written: dict[str, Path] = {}

        if (path := out.resolve("instance_json")) is not None:
            save_problem(result.problem, path)
            written["instance_json"] = path
        if (path := out.resolve("plan_json")) is not None:
            save_plan_report(result.report, path)
            written["plan_json"] = path
        if (path := out.resolve("trace_csv")) is not None:
            margins = result.checks if self._config.diagnostics.margins else []
            write_trace_csv(path, trace_to_frame(result.trace, margins), header)
            written["trace_csv"] = path
        if (path := out.resolve("iterates_json")) is not None:
            write_iterates_json(path, result.trace, header)
            written["iterates_json"] = path
        if (path := out.resolve("report_json")) is not None:
            path.parent.mkdir(parents=True, exist_ok=True)
            with open(path, "w", encoding="utf-8") as f:
                json.dump(result.summary, f, indent=2, sort_keys=True)
            written["report_json"] = path
        return written

    def _mode_label(self) -> str:
        pl = self._config.plan
        return pl.mode.value if pl.mode is not None else "explicit"


def create_experiment_service(
    config_path: str | Path,
    out_dir: str | Path | None = None,
    seed: int | None = None,
) -> ExperimentService:
    """由配置文件创建实验服务，可覆盖输出目录与种子"""
    config = load_config(config_path)
    if out_dir is not None or seed is not None:
        config = with_overrides(config, out_dir=out_dir, seed=seed)
    return ExperimentService(config)
