# -*- coding: utf-8 -*-
"""
鞍点求解实验命令行

子命令:
    plan   规划参数并打印余量表
    solve  按配置运行实验
    check  对保存的迭代点运行全部不等式检查
    rate   拟合轨迹列的收敛率

运行方式:
    python scripts/saddle_cli.py plan --mu 1 --nu 1 --normk 1 --mode iterate-k
    python scripts/saddle_cli.py solve --config config/example_solve.yaml --out output/run1
    python scripts/saddle_cli.py check --iterates output/run1/iterates.json \\
        --plan output/run1/plan.json --instance output/run1/instance.json
    python scripts/saddle_cli.py rate --trace output/run1/trace.csv --window 50 500
"""

import sys
from datetime import date
from pathlib import Path

from loguru import logger

# 添加项目根目录到路径
PROJECT_ROOT = Path(__file__).parent.parent
sys.path.insert(0, str(PROJECT_ROOT))

from src.common.constants import RATE_DEFAULT_EXCESS, PlanMode, TraceColumns
from src.service.commands import cmd_check, cmd_plan, cmd_rate, cmd_solve


# ============================================================
# 日志配置
# ============================================================

def setup_logging(verbose: bool = False, log_file: bool = False) -> None:
    """配置 loguru 日志"""
    level = "DEBUG" if verbose else "INFO"

    # 移除默认 handler，重新配置
    logger.remove()

    # 控制台输出（彩色）
    logger.add(
        sys.stderr,
        format="<green>{time:HH:mm:ss}</green> | <level>{level: <8}</level> | {message}",
        level=level,
        colorize=True,
    )

    # 文件输出
    if log_file:
        log_dir = PROJECT_ROOT / "logs"
        log_dir.mkdir(exist_ok=True)
        logger.add(
            log_dir / f"saddle_cli_{date.today().strftime('%Y%m')}.log",
            format="{time:YYYY-MM-DD HH:mm:ss} | {level: <8} | {message}",
            level="DEBUG",
            encoding="utf-8",
            rotation="1 month",  # 每月轮转
        )


# ============================================================
# 入口
# ============================================================

def build_parser():
    """构造参数解析器"""
    import argparse

    parser = argparse.ArgumentParser(description="强凸-强凹鞍点问题的交替外推求解实验")
    parser.add_argument("--verbose", "-v", action="store_true", help="输出 debug 日志")
    parser.add_argument("--log-file", action="store_true", help="同时写日志文件")
    sub = parser.add_subparsers(dest="command", required=True)

    p_plan = sub.add_parser("plan", help="规划参数")
    p_plan.add_argument("--mu", type=float, required=True, help="g 的强凸模量")
    p_plan.add_argument("--nu", type=float, required=True, help="h 的强凸模量")
    p_plan.add_argument("--normk", type=float, required=True, help="‖K‖ 上界")
    p_plan.add_argument("--mode", choices=[m.value for m in PlanMode], default=PlanMode.ITERATE_K.value)
    p_plan.add_argument("--zero-beta", action="store_true", help="使用 β=0 方案")
    p_plan.add_argument("--step-scale", type=float, default=1.0, help="步长搜索起点 c")
    p_plan.add_argument("--out", default=None, help="规划JSON输出路径")

    p_solve = sub.add_parser("solve", help="运行实验")
    p_solve.add_argument("--config", required=True, help="运行配置 YAML/JSON")
    p_solve.add_argument("--out", default=None, help="覆盖输出目录")
    p_solve.add_argument("--seed", type=int, default=None, help="覆盖随机种子")

    p_check = sub.add_parser("check", help="检查保存的迭代点")
    p_check.add_argument("--iterates", required=True, help="迭代点JSON")
    p_check.add_argument("--plan", required=True, help="规划JSON")
    p_check.add_argument("--instance", required=True, help="实例JSON")
    p_check.add_argument("--report", default=None, help="检查汇总JSON输出路径")
    p_check.add_argument("--tol", type=float, default=1e-9, help="相对容差")

    p_rate = sub.add_parser("rate", help="拟合收敛率")
    p_rate.add_argument("--trace", required=True, help="轨迹CSV")
    p_rate.add_argument("--column", default=TraceColumns.DIST2_X, help="拟合列")
    p_rate.add_argument("--window", type=int, nargs=2, default=None, metavar=("START", "END"))
    p_rate.add_argument("--max-excess", type=float, default=RATE_DEFAULT_EXCESS, help="允许超出 ξ 的量")
    return parser


def main(argv: list[str] | None = None) -> int:
    """主入口，返回退出码"""
    args = build_parser().parse_args(argv)
    setup_logging(verbose=args.verbose, log_file=args.log_file)

    if args.command == "plan":
        return cmd_plan(args.mu, args.nu, args.normk, mode=args.mode, out=args.out,
                        zero_beta=args.zero_beta, step_scale=args.step_scale)
    if args.command == "solve":
        return cmd_solve(args.config, out_dir=args.out, seed=args.seed)
    if args.command == "check":
        return cmd_check(args.iterates, args.plan, args.instance, report_path=args.report, tol=args.tol)
    window = tuple(args.window) if args.window else None
    return cmd_rate(args.trace, column=args.column, window=window, max_excess=args.max_excess)


if __name__ == "__main__":
    sys.exit(main())
