# -*- coding: utf-8 -*-
"""
配置生成器测试

测试内容：
1. Schema 完整性验证
2. 配置生成功能
3. YAML 文件保存并可被读取器加载
4. 覆盖默认值功能
5. JSON 输出与示例过期检查
"""

import json
import sys
from pathlib import Path
from tempfile import TemporaryDirectory

# 把项目根目录加入 path
PROJECT_ROOT = Path(__file__).parent.parent.parent
sys.path.insert(0, str(PROJECT_ROOT))

from src.common.config import config_to_dict, load_config
from src.common.config_generator import (
    EXAMPLE_OVERRIDES,
    build_config_section,
    generate_config,
    render_config,
    save_config,
    sync_example,
)
from src.common.config_schema import CONFIG_SCHEMA, PLAN_SCHEMA, SECTION_NAMES, SOLVER_SCHEMA
from src.common.constants import PlanMode, ProblemSource


# ============================================================
# 测试用例
# ============================================================

def test_schema_completeness():
    """每个分区有中文名称，每个配置项有默认值和注释"""
    print("[TEST] Schema 完整性验证")
    for section_key, section_schema in CONFIG_SCHEMA.items():
        assert SECTION_NAMES.get(section_key), f"{section_key} 缺少名称"
        for key, item in section_schema.items():
            assert isinstance(item, tuple) and len(item) == 2, f"{section_key}.{key} 格式错误"
            assert isinstance(item[1], str) and item[1], f"{section_key}.{key} 缺少注释"
        print(f"      {section_key:12} -> {SECTION_NAMES[section_key]} [OK]")


def test_build_config_section():
    """单个配置块生成与覆盖"""
    print("[TEST] 单个配置块生成")
    section = build_config_section(SOLVER_SCHEMA, {'max_iter': 42})
    assert list(section.keys()) == list(SOLVER_SCHEMA.keys())
    assert section['max_iter'] == 42
    assert section['log_every'] == SOLVER_SCHEMA['log_every'][0]
    print("  [OK]")


def test_generate_full_config():
    """完整配置包含全部分区，时间戳可关闭"""
    print("[TEST] 完整配置生成")
    config = generate_config()
    assert list(config.keys()) == list(CONFIG_SCHEMA.keys())
    assert config['meta']['generated_at']
    assert generate_config(stamp=False)['meta']['generated_at'] == ''
    print("  [OK]")


def test_save_and_load_config():
    """保存的YAML可被读取器加载"""
    print("[TEST] YAML 保存与加载")
    with TemporaryDirectory() as tmpdir:
        path = Path(tmpdir) / "sub" / "run.yaml"
        save_config(generate_config(stamp=False), path)
        text = path.read_text(encoding='utf-8')
        for name in SECTION_NAMES.values():
            assert f"# {name}" in text
        assert "# 最大迭代次数" in text

        cfg = load_config(path)
        assert cfg.problem.source is ProblemSource.GENERATOR
        assert cfg.plan.mode is PlanMode.ITERATE_K
        assert cfg.solver.displacement_tol == SOLVER_SCHEMA['displacement_tol'][0]
        assert cfg.plan.explicit is None
    print("  [OK]")


def test_generate_with_overrides():
    """覆盖默认值后加载"""
    print("[TEST] 覆盖默认值")
    overrides = {
        'plan': {'mode': 'value-k2', 'step_scale': 0.25},
        'problem': {'n': 7, 'seed': 3},
    }
    config = generate_config(overrides=overrides, stamp=False)
    assert config['plan']['mode'] == 'value-k2'
    assert config['plan']['zero_beta'] == PLAN_SCHEMA['zero_beta'][0]
    # 输入的覆盖字典不被修改
    assert 'meta' not in overrides

    with TemporaryDirectory() as tmpdir:
        path = Path(tmpdir) / "run.yaml"
        save_config(config, path)
        cfg = load_config(path)
    assert cfg.plan.mode is PlanMode.VALUE_KSQ
    assert cfg.plan.step_scale == 0.25
    assert cfg.problem.n == 7 and cfg.problem.seed == 3
    print("  [OK]")


def test_plain_dict_round_trip():
    """加载 → 转字典 → 保存 → 再加载，结果不变"""
    cfg = load_config(PROJECT_ROOT / "config" / "example_solve.yaml")
    with TemporaryDirectory() as tmpdir:
        first = Path(tmpdir) / "a.yaml"
        save_config(config_to_dict(cfg), first)
        again = load_config(first)
        second = Path(tmpdir) / "b.yaml"
        save_config(config_to_dict(again), second)
        assert first.read_text(encoding='utf-8') == second.read_text(encoding='utf-8')
    assert again == cfg


def test_save_json_config():
    """.json 后缀写出纯 JSON，读取器同样可以加载"""
    with TemporaryDirectory() as tmpdir:
        path = Path(tmpdir) / "run.json"
        save_config(generate_config(overrides={'problem': {'seed': 9}}, stamp=False), path)
        data = json.loads(path.read_text(encoding='utf-8'))
        cfg = load_config(path)
    assert list(data.keys()) == list(CONFIG_SCHEMA.keys())
    assert cfg.problem.seed == 9
    assert cfg.solver.displacement_tol == SOLVER_SCHEMA['displacement_tol'][0]


def test_sync_example():
    """示例文件写出与过期检查"""
    print("[TEST] 示例同步")
    with TemporaryDirectory() as tmpdir:
        path = Path(tmpdir) / "example.yaml"
        assert sync_example(path, check=True) == 1
        assert sync_example(path) == 0
        assert sync_example(path, check=True) == 0
        assert render_config(generate_config(overrides=EXAMPLE_OVERRIDES, stamp=False)) == path.read_text(encoding='utf-8')
        path.write_text(path.read_text(encoding='utf-8').replace('max_iter: 500', 'max_iter: 501'), encoding='utf-8')
        assert sync_example(path, check=True) == 1
        cfg = load_config(path)
    assert cfg.solver.max_iter == 501
    assert cfg.plan.step_scale == EXAMPLE_OVERRIDES['plan']['step_scale']
    print("  [OK]")


def test_bundled_example_loads():
    """仓库自带的示例配置"""
    cfg = load_config(PROJECT_ROOT / "config" / "example_solve.yaml")
    assert cfg.plan.step_scale == 0.05
    assert cfg.solver.displacement_tol == 0.0
    assert cfg.solver.max_iter == 500
    assert cfg.diagnostics.tol == 1e-9


# ============================================================
# 主入口
# ============================================================

if __name__ == "__main__":
    tests = [obj for name, obj in sorted(globals().items()) if name.startswith("test_")]
    passed = 0
    for fn in tests:
        try:
            fn()
            passed += 1
        except AssertionError as e:
            print(f"  [FAIL] {fn.__name__}: {e}")
    print("=" * 60)
    print(f"测试结果: {passed}/{len(tests)} 通过")
    print("=" * 60)
