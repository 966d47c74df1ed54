# -*- coding: utf-8 -*-
"""
求解库异常定义

所有异常继承 SaddleError，消息格式为 "[来源] 描述"。
扩展实数值 (+∞/−∞) 与负余量属于正常数据，不抛异常。
"""


class SaddleError(Exception):
    """基础异常"""

    def __init__(self, message: str, source: str = "unknown") -> None:
        self.source = source
        self.message = message
        super().__init__(f"[{source}] {message}")


# ============================================================
# problem-core
# ============================================================

class DimensionMismatchError(SaddleError):
    """向量或算子维度不匹配"""

    def __init__(self, message: str, expected: int | None = None, actual: int | None = None) -> None:
        self.expected = expected
        self.actual = actual
        detail = f"{message} (期望: {expected}, 实际: {actual})" if expected is not None else message
        super().__init__(detail, source="core")


class NonFiniteValueError(SaddleError):
    """
    数值异常

    出现 NaN 等非法数值时抛出，与扩展实数 +∞ 区分。
    """

    def __init__(self, message: str, source: str = "core") -> None:
        super().__init__(message, source=source)


# ============================================================
# prox-library
# ============================================================

class ProxParameterError(SaddleError):
    """邻近算子参数非法（步长、模量、区间）"""

    def __init__(self, message: str) -> None:
        super().__init__(message, source="prox")


class NotPositiveDefiniteError(ProxParameterError):
    """矩阵非对称或非正定"""


class BracketError(SaddleError):
    """一维暴力求解的搜索区间不包含极小点"""

    def __init__(self, message: str, bracket: tuple[float, float] | None = None) -> None:
        self.bracket = bracket
        super().__init__(message, source="prox")


# ============================================================
# parameter-planner / solver
# ============================================================

class PlannerInputError(SaddleError):
    """规划器输入非法（μ、ν 非正或 ‖K‖ 为负）"""

    def __init__(self, message: str) -> None:
        super().__init__(message, source="planner")


class InfeasiblePlanError(SaddleError):
    """
    参数规划不可行

    搜索耗尽后仍有条件不满足，failed_inequality 为最后失败的条件名。
    """

    def __init__(self, failed_inequality: str, detail: str = "") -> None:
        self.failed_inequality = failed_inequality
        msg = f"无可行参数，失败条件: {failed_inequality}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg, source="planner")


class ScheduleError(SaddleError):
    """步长序列取值非法"""

    def __init__(self, message: str) -> None:
        super().__init__(message, source="solver")


class NonFiniteIterateError(SaddleError):
    """迭代产生非有限值"""

    def __init__(self, k: int) -> None:
        self.k = k
        super().__init__(f"第 {k} 步迭代出现非有限值", source="solver")


# ============================================================
# oracle / diagnostics
# ============================================================

class OracleError(SaddleError):
    """二次实例KKT系统无法求解"""

    def __init__(self, message: str) -> None:
        super().__init__(message, source="oracle")


class UnsupportedSubdifferentialError(SaddleError):
    """函数未提供次微分距离"""

    def __init__(self, kind: str) -> None:
        self.kind = kind
        super().__init__(f"函数类型不支持次微分检查: {kind}", source="oracle")


class CertificateError(SaddleError):
    """鞍点证书未通过校验却被使用"""

    def __init__(self, message: str) -> None:
        super().__init__(message, source="oracle")


class MissingOracleError(SaddleError):
    """检查需要鞍点 (x*, y*) 但未提供"""

    def __init__(self, check_id: str) -> None:
        self.check_id = check_id
        super().__init__(f"检查 {check_id} 需要鞍点证书", source="diagnostics")


class RateWindowError(SaddleError):
    """拟合窗口内有效点不足"""

    def __init__(self, message: str) -> None:
        super().__init__(message, source="diagnostics")


# ============================================================
# 配置与文件
# ============================================================

class ConfigError(SaddleError):
    """
    配置错误

    语法错误带行号，字段错误带点分字段路径。
    """

    def __init__(self, message: str, field: str | None = None, line: int | None = None) -> None:
        self.field = field
        self.line = line
        parts = []
        if line is not None:
            parts.append(f"第 {line} 行")
        if field:
            parts.append(f"字段 {field}")
        detail = f"{message} ({', '.join(parts)})" if parts else message
        super().__init__(detail, source="config")


class TraceMismatchError(SaddleError):
    """轨迹文件头参数与规划文件不一致"""

    def __init__(self, field: str, trace_value: object, plan_value: object) -> None:
        self.field = field
        super().__init__(
            f"轨迹与规划不一致: {field} (轨迹: {trace_value}, 规划: {plan_value})",
            source="repository",
        )
