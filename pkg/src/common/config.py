# -*- coding: utf-8 -*-
"""
运行配置读取器

从YAML文件加载配置到dataclass，提供类型安全的访问。
JSON 是 YAML 的子集，JSON 格式的配置可直接加载。
"""
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Any

import yaml

from src.common.config_schema import CONFIG_SCHEMA, REQUIRED_FIELDS
from src.common.constants import CONFIG_VERSION, PlanMode, ProblemSource, StartKind
from src.common.exceptions import ConfigError


@dataclass(frozen=True)
class MetaConfig:
    """元信息"""
    version: str
    project: str
    generated_at: str


@dataclass(frozen=True)
class ProblemConfig:
    """问题实例配置"""
    source: ProblemSource
    seed: int | None
    n: int
    m: int
    mu: float
    nu: float
    normk: float
    path: str
    inline: dict | None


@dataclass(frozen=True)
class ExplicitPlanConfig:
    """显式常数参数"""
    tau: float
    sigma: float
    alpha: float
    beta: float
    xi: float | None = None
    check_mode: PlanMode = PlanMode.ITERATE_K


@dataclass(frozen=True)
class PlanConfig:
    """参数规划配置"""
    mode: PlanMode | None
    zero_beta: bool
    step_scale: float
    explicit: ExplicitPlanConfig | None


@dataclass(frozen=True)
class StartConfig:
    """初始点配置"""
    kind: StartKind
    scale: float
    x0: list[float] | None
    y0: list[float] | None


@dataclass(frozen=True)
class SolverConfig:
    """求解器配置"""
    max_iter: int
    displacement_tol: float
    oracle_tol: float | None
    log_every: int


@dataclass(frozen=True)
class DiagnosticsConfig:
    """诊断配置"""
    tol: float
    margins: bool


@dataclass(frozen=True)
class OutputsConfig:
    """输出配置"""
    dir: Path
    trace_csv: str
    iterates_json: str
    plan_json: str
    instance_json: str
    report_json: str

    def resolve(self, name: str) -> Path | None:
        """输出文件完整路径，文件名为空时返回 None"""
        filename = getattr(self, name)
        return self.dir / filename if filename else None


@dataclass(frozen=True)
class RunConfig:
    """运行主配置"""
    meta: MetaConfig
    problem: ProblemConfig
    plan: PlanConfig
    start: StartConfig
    solver: SolverConfig
    diagnostics: DiagnosticsConfig
    outputs: OutputsConfig


# ============================================================
# 字段转换
# ============================================================

def _as_float(value: Any, field: str, optional: bool = False) -> float | None:
    if value is None and optional:
        return None
    # pyyaml 将 1e-12 这类无小数点的写法读成字符串
    try:
        return float(value)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"需要数值，实际为 {value!r}", field=field) from e


def _as_int(value: Any, field: str, optional: bool = False) -> int | None:
    if value is None and optional:
        return None
    if isinstance(value, bool):
        raise ConfigError(f"需要整数，实际为 {value!r}", field=field)
    try:
        number = float(value)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"需要整数，实际为 {value!r}", field=field) from e
    if not number.is_integer():
        raise ConfigError(f"需要整数，实际为 {value!r}", field=field)
    return int(number)


def _as_bool(value: Any, field: str) -> bool:
    if not isinstance(value, bool):
        raise ConfigError(f"需要布尔值，实际为 {value!r}", field=field)
    return value


def _as_enum(enum_cls: type, value: Any, field: str) -> Any:
    try:
        return enum_cls(value)
    except ValueError as e:
        choices = ", ".join(item.value for item in enum_cls)
        raise ConfigError(f"取值 {value!r} 不在 [{choices}] 中", field=field) from e


def _as_vector(value: Any, field: str) -> list[float] | None:
    if value is None:
        return None
    if not isinstance(value, list):
        raise ConfigError("需要数值列表", field=field)
    return [_as_float(v, f"{field}[{i}]") for i, v in enumerate(value)]


def _section(data: dict, name: str) -> dict[str, Any]:
    """取配置块，缺失键用Schema默认值补齐，未知键报错"""
    raw = data.get(name) or {}
    if not isinstance(raw, dict):
        raise ConfigError("配置块必须是映射", field=name)
    schema = CONFIG_SCHEMA[name]
    unknown = set(raw) - set(schema)
    if unknown:
        raise ConfigError(f"未知字段: {sorted(unknown)}", field=f"{name}.{sorted(unknown)[0]}")
    for key in REQUIRED_FIELDS.get(name, ()):
        if key not in raw:
            raise ConfigError("缺少必填字段", field=f"{name}.{key}")
    return {key: raw.get(key, default) for key, (default, _) in schema.items()}


# ============================================================
# 解析
# ============================================================

def _parse_explicit(raw: Any) -> ExplicitPlanConfig | None:
    if raw is None:
        return None
    if not isinstance(raw, dict):
        raise ConfigError("explicit 必须是映射", field="plan.explicit")
    allowed = {f.name for f in fields(ExplicitPlanConfig)}
    unknown = set(raw) - allowed
    if unknown:
        raise ConfigError(f"未知字段: {sorted(unknown)}", field="plan.explicit")
    for key in ("tau", "sigma", "alpha", "beta"):
        if key not in raw:
            raise ConfigError("缺少必填字段", field=f"plan.explicit.{key}")
    return ExplicitPlanConfig(
        tau=_as_float(raw["tau"], "plan.explicit.tau"),
        sigma=_as_float(raw["sigma"], "plan.explicit.sigma"),
        alpha=_as_float(raw["alpha"], "plan.explicit.alpha"),
        beta=_as_float(raw["beta"], "plan.explicit.beta"),
        xi=_as_float(raw.get("xi"), "plan.explicit.xi", optional=True),
        check_mode=_as_enum(PlanMode, raw.get("check_mode", PlanMode.ITERATE_K.value), "plan.explicit.check_mode"),
    )


def parse_config(data: dict[str, Any]) -> RunConfig:
    """
    字典转配置对象并校验

    Raises
    ------
    ConfigError
        字段类型错误、版本不支持、规划方式冲突或缺少种子
    """
    if not isinstance(data, dict):
        raise ConfigError("配置顶层必须是映射")
    unknown = set(data) - set(CONFIG_SCHEMA)
    if unknown:
        raise ConfigError(f"未知配置块: {sorted(unknown)}", field=sorted(unknown)[0])

    meta = _section(data, "meta")
    if str(meta["version"]) != CONFIG_VERSION:
        raise ConfigError(f"配置版本不支持: {meta['version']}", field="meta.version")

    prob = _section(data, "problem")
    source = _as_enum(ProblemSource, prob["source"], "problem.source")
    if source is ProblemSource.GENERATOR and prob["seed"] is None:
        raise ConfigError("generator 来源必须指定种子", field="problem.seed")
    if source is ProblemSource.FILE and not prob["path"]:
        raise ConfigError("file 来源必须指定路径", field="problem.path")
    if source is ProblemSource.INLINE and not isinstance(prob["inline"], dict):
        raise ConfigError("inline 来源必须给出实例描述", field="problem.inline")
    problem = ProblemConfig(
        source=source,
        seed=_as_int(prob["seed"], "problem.seed", optional=True),
        n=_as_int(prob["n"], "problem.n"),
        m=_as_int(prob["m"], "problem.m"),
        mu=_as_float(prob["mu"], "problem.mu"),
        nu=_as_float(prob["nu"], "problem.nu"),
        normk=_as_float(prob["normk"], "problem.normk"),
        path=str(prob["path"] or ""),
        inline=prob["inline"],
    )

    pl = _section(data, "plan")
    explicit = _parse_explicit(pl["explicit"])
    mode_raw = pl["mode"]
    if explicit is not None and "mode" not in (data.get("plan") or {}):
        mode_raw = None  # 显式常数时 mode 不取默认值
    mode = None if mode_raw is None else _as_enum(PlanMode, mode_raw, "plan.mode")
    if (mode is None) == (explicit is None):
        raise ConfigError("plan.mode 与 plan.explicit 必须且只能给出一个", field="plan")
    plan = PlanConfig(
        mode=mode,
        zero_beta=_as_bool(pl["zero_beta"], "plan.zero_beta"),
        step_scale=_as_float(pl["step_scale"], "plan.step_scale"),
        explicit=explicit,
    )

    st = _section(data, "start")
    start = StartConfig(
        kind=_as_enum(StartKind, st["kind"], "start.kind"),
        scale=_as_float(st["scale"], "start.scale"),
        x0=_as_vector(st["x0"], "start.x0"),
        y0=_as_vector(st["y0"], "start.y0"),
    )
    if start.kind is StartKind.EXPLICIT and (start.x0 is None or start.y0 is None):
        raise ConfigError("explicit 初始点必须给出 x0 与 y0", field="start")

    sv = _section(data, "solver")
    solver = SolverConfig(
        max_iter=_as_int(sv["max_iter"], "solver.max_iter"),
        displacement_tol=_as_float(sv["displacement_tol"], "solver.displacement_tol"),
        oracle_tol=_as_float(sv["oracle_tol"], "solver.oracle_tol", optional=True),
        log_every=_as_int(sv["log_every"], "solver.log_every"),
    )
    if solver.max_iter < 0:
        raise ConfigError("max_iter 不能为负", field="solver.max_iter")

    dg = _section(data, "diagnostics")
    diagnostics = DiagnosticsConfig(
        tol=_as_float(dg["tol"], "diagnostics.tol"),
        margins=_as_bool(dg["margins"], "diagnostics.margins"),
    )

    out = _section(data, "outputs")
    outputs = OutputsConfig(
        dir=Path(out["dir"]),
        trace_csv=str(out["trace_csv"] or ""),
        iterates_json=str(out["iterates_json"] or ""),
        plan_json=str(out["plan_json"] or ""),
        instance_json=str(out["instance_json"] or ""),
        report_json=str(out["report_json"] or ""),
    )

    return RunConfig(
        meta=MetaConfig(version=str(meta["version"]), project=str(meta["project"]),
                        generated_at=str(meta["generated_at"] or "")),
        problem=problem, plan=plan, start=start, solver=solver,
        diagnostics=diagnostics, outputs=outputs,
    )


def load_config(config_path: str | Path = "config/example_solve.yaml") -> RunConfig:
    """
    从YAML文件加载配置

    Parameters
    ----------
    config_path : str | Path
        配置文件路径

    Returns
    -------
    RunConfig
        运行配置对象

    Raises
    ------
    FileNotFoundError
        配置文件不存在
    ConfigError
        语法错误（带行号）或字段错误（带字段路径）
    """
    path = Path(config_path)
    if not path.exists():
        raise FileNotFoundError(f"配置文件不存在: {path}")

    with open(path, "r", encoding="utf-8") as f:
        try:
            data: dict[str, Any] = yaml.safe_load(f)
        except yaml.YAMLError as e:
            mark = getattr(e, "problem_mark", None)
            line = mark.line + 1 if mark is not None else None
            raise ConfigError(f"YAML 语法错误: {getattr(e, 'problem', e)}", line=line) from e

    return parse_config(data or {})


def with_overrides(cfg: RunConfig, out_dir: str | Path | None = None, seed: int | None = None) -> RunConfig:
    """命令行覆盖输出目录与种子"""
    data = config_to_dict(cfg)
    if out_dir is not None:
        data["outputs"]["dir"] = str(out_dir)
    if seed is not None:
        data["problem"]["seed"] = seed
    return parse_config(data)


def config_to_dict(cfg: RunConfig) -> dict[str, Any]:
    """
    配置对象转普通字典

    parse_config(config_to_dict(cfg)) 与 cfg 相等，序列化可重复。
    """
    data = asdict(cfg)
    data["problem"]["source"] = cfg.problem.source.value
    data["plan"]["mode"] = None if cfg.plan.mode is None else cfg.plan.mode.value
    if cfg.plan.explicit is not None:
        data["plan"]["explicit"]["check_mode"] = cfg.plan.explicit.check_mode.value
    data["start"]["kind"] = cfg.start.kind.value
    data["outputs"]["dir"] = str(cfg.outputs.dir)
    return data
