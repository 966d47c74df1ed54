# -*- coding: utf-8 -*-
"""
运行配置Schema定义 - 数据驱动设计

使用字典定义所有配置参数，格式: 'key': (default_value, '注释')
"""

# ================================================================
# 元信息
# ================================================================
META_SCHEMA = {
    'version': ('1.0', '配置格式版本'),
    'project': ('saddle-rate-lab', '项目名称'),
    'generated_at': ('', '生成时间'),
}

# ================================================================
# 问题实例
# ================================================================
PROBLEM_SCHEMA = {
    'source': ('generator', '实例来源 generator=随机二次 file=实例JSON inline=内嵌描述'),
    'seed': (42, '随机种子 generator 来源必填'),
    'n': (20, '原始维度'),
    'm': (20, '对偶维度'),
    'mu': (1.0, 'g 的强凸模量 μ'),
    'nu': (1.0, 'h 的强凸模量 ν'),
    'normk': (1.0, '目标 ‖K‖'),
    'path': ('', '实例JSON路径 source=file 时使用'),
    'inline': (None, '内嵌实例描述 source=inline 时使用'),
}

# ================================================================
# 参数规划
# ================================================================
PLAN_SCHEMA = {
    'mode': ('iterate-k', '规划模式 iterate-k / iterate-k2 / value-k / value-k2，与 explicit 二选一'),
    'zero_beta': (False, '使用 β=0 方案'),
    'step_scale': (1.0, '步长搜索起点 c，τ=σ=c·min(1/μ,1/ν,1/‖K‖)'),
    'explicit': (None, '显式常数 {tau, sigma, alpha, beta, xi, check_mode}'),
}

# ================================================================
# 初始点
# ================================================================
START_SCHEMA = {
    'kind': ('zeros', '初始点 zeros / random / explicit'),
    'scale': (1.0, 'random 初始点的标准差'),
    'x0': (None, 'explicit 原始初始点'),
    'y0': (None, 'explicit 对偶初始点'),
}

# ================================================================
# 求解器
# ================================================================
SOLVER_SCHEMA = {
    'max_iter': (1000, '最大迭代次数'),
    'displacement_tol': (1e-12, '位移停止容差，0 表示不启用'),
    'oracle_tol': (None, '到鞍点距离停止容差'),
    'log_every': (100, 'debug 日志间隔'),
}

# ================================================================
# 诊断
# ================================================================
DIAGNOSTICS_SCHEMA = {
    'tol': (1e-9, '检查相对容差'),
    'margins': (True, '轨迹CSV中写入余量列'),
}

# ================================================================
# 输出
# ================================================================
OUTPUTS_SCHEMA = {
    'dir': ('./output', '输出目录'),
    'trace_csv': ('trace.csv', '轨迹CSV'),
    'iterates_json': ('iterates.json', '完整迭代点，空字符串表示不写'),
    'plan_json': ('plan.json', '参数规划'),
    'instance_json': ('instance.json', '问题实例'),
    'report_json': ('report.json', '运行摘要'),
}

# ================================================================
# 汇总
# ================================================================
CONFIG_SCHEMA = {
    'meta': META_SCHEMA,
    'problem': PROBLEM_SCHEMA,
    'plan': PLAN_SCHEMA,
    'start': START_SCHEMA,
    'solver': SOLVER_SCHEMA,
    'diagnostics': DIAGNOSTICS_SCHEMA,
    'outputs': OUTPUTS_SCHEMA,
}

SECTION_NAMES = {
    'meta': '元信息',
    'problem': '问题实例',
    'plan': '参数规划',
    'start': '初始点',
    'solver': '求解器',
    'diagnostics': '诊断',
    'outputs': '输出',
}

# 加载时不能用默认值补齐的字段
REQUIRED_FIELDS = {
    'problem': ('source',),
}
