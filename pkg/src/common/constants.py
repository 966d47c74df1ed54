# -*- coding: utf-8 -*-
"""
常量定义模块

定义求解器、参数规划器与诊断模块共用的枚举和数值常量。
"""

from enum import Enum
from typing import Final


# ============================================================
# 参数规划模式
# ============================================================

class ConditionFamily(str, Enum):
    """交叉项估计族"""
    NORM = "norm"        # ‖K‖ 族
    SQUARED = "squared"  # ‖K‖² 族


class PlanMode(str, Enum):
    """
    参数规划模式

    iterate-* 保证迭代点线性收敛（ζ=2），value-* 保证遍历平均函数值线性收敛（ζ=1）。
    """
    ITERATE_K = "iterate-k"
    ITERATE_KSQ = "iterate-k2"
    VALUE_K = "value-k"
    VALUE_KSQ = "value-k2"

    @property
    def zeta(self) -> int:
        return 2 if self in (PlanMode.ITERATE_K, PlanMode.ITERATE_KSQ) else 1

    @property
    def family(self) -> ConditionFamily:
        if self in (PlanMode.ITERATE_K, PlanMode.VALUE_K):
            return ConditionFamily.NORM
        return ConditionFamily.SQUARED

    @property
    def is_value(self) -> bool:
        return self.zeta == 1


# ============================================================
# 邻近算子目录
# ============================================================

class ProxKind(str, Enum):
    """邻近算子函数类型"""
    QUADRATIC = "quadratic"        # ½uᵀAu + aᵀu
    SHIFTED_SQ = "shifted_sq"      # (μ/2)‖u − c‖²
    ELASTIC_NET = "elastic_net"    # λ₁‖u‖₁ + (μ/2)‖u‖²
    BOX_QUADRATIC = "box_quadratic"  # (μ/2)‖u‖² + ι_[l,u]


class StartKind(str, Enum):
    """初始点类型"""
    ZEROS = "zeros"
    RANDOM = "random"
    EXPLICIT = "explicit"


class ProblemSource(str, Enum):
    """问题实例来源"""
    GENERATOR = "generator"  # 随机二次实例
    FILE = "file"            # 实例JSON文件
    INLINE = "inline"        # 配置内嵌描述


# ============================================================
# 数值容差
# ============================================================

# 算子范数上界的放大系数
NORM_INFLATION: Final[float] = 1.0 + 1e-6

# 幂迭代相对收敛容差与最大迭代次数
POWER_ITER_TOL: Final[float] = 1e-10
POWER_ITER_MAX: Final[int] = 1000

# 严格不等式要求的相对余量
STRICT_REL_SLACK: Final[float] = 1e-9

# 诊断检查的默认相对容差
CHECK_REL_TOL: Final[float] = 1e-9

# 对称性与模量校验容差
SYMMETRY_TOL: Final[float] = 1e-12
MODULUS_REL_TOL: Final[float] = 1e-12

# 一维暴力邻近求解精度
BRUTEFORCE_TOL: Final[float] = 1e-10


# ============================================================
# 参数规划器常量
# ============================================================

PLANNER_MAX_HALVINGS: Final[int] = 40
PLANNER_NORM_EPS: Final[float] = 1e-12  # 1/(‖K‖+ε) 中的 ε
BETA_BUDGET_FACTOR: Final[float] = 0.9  # β = 0.9·sqrt(预算)
BETA_CAP: Final[float] = 1.0            # ‖K‖=0 时预算无界，β 取上限
ETA_STEP: Final[float] = 0.1            # η = 下界 + min(0.1·下界, 0.5·(上界−下界))
ETA_DEFAULT: Final[float] = 1.0         # 下界为0且上界无穷时的默认值


# ============================================================
# 求解器与诊断常量
# ============================================================

DEFAULT_MAX_ITER: Final[int] = 1000
DEFAULT_DISPLACEMENT_TOL: Final[float] = 1e-12
DEFAULT_LOG_EVERY: Final[int] = 100
RATE_FLOOR_REL: Final[float] = 1e-24  # 低于 max×floor 视为已收敛
RATE_MIN_POINTS: Final[int] = 3
RATE_DEFAULT_EXCESS: Final[float] = 0.02

TRACE_VERSION: Final[int] = 1
CONFIG_VERSION: Final[str] = "1.0"
INSTANCE_VERSION: Final[int] = 1


class TraceColumns:
    """轨迹CSV列名"""
    K = "k"
    DIST2_X = "dist2_x"
    DIST2_Y = "dist2_y"
    F_HAT = "f_hat"
    GAP_UPPER = "gap_upper"
    GAP_LOWER = "gap_lower"
    MARGIN_ITERATE_SUM = "margin_iterate_sum"
    MARGIN_ITERATE_X = "margin_iterate_x"
    MARGIN_ITERATE_Y = "margin_iterate_y"
    MARGIN_VALUE_UPPER = "margin_value_upper"
    MARGIN_VALUE_LOWER = "margin_value_lower"

    ALL: Final[tuple[str, ...]] = (
        K, DIST2_X, DIST2_Y, F_HAT, GAP_UPPER, GAP_LOWER,
        MARGIN_ITERATE_SUM, MARGIN_ITERATE_X, MARGIN_ITERATE_Y,
        MARGIN_VALUE_UPPER, MARGIN_VALUE_LOWER,
    )


class ExitCode:
    """命令行退出码"""
    OK = 0
    CHECK_FAILED = 1
    INPUT_ERROR = 2
