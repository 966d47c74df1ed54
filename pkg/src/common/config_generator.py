# -*- coding: utf-8 -*-
"""
运行配置生成器

根据Schema渲染带注释的YAML运行配置；目标后缀为 .json 时写出纯 JSON。

运行方式:
    python -m src.common.config_generator           # 重写 config/example_solve.yaml
    python -m src.common.config_generator --check   # 仅比较，示例过期时退出码 1
"""
import json
import sys
from datetime import datetime
from io import StringIO
from pathlib import Path

try:
    from ruamel.yaml import YAML
    from ruamel.yaml.comments import CommentedMap
except ImportError:
    print("错误: 缺少 ruamel.yaml 库，请安装: pip install ruamel.yaml")
    raise

from src.common.config_schema import CONFIG_SCHEMA, SECTION_NAMES

_RULE = '# ' + '=' * 62 + '\n'

# 仓库示例与默认值的差异
EXAMPLE_OVERRIDES = {
    'plan': {'step_scale': 0.05},
    'solver': {'displacement_tol': 0.0, 'max_iter': 500},
}


def _banner(text: str) -> str:
    return f"{_RULE}# {text}\n{_RULE}"


def _yaml() -> YAML:
    yaml = YAML()
    yaml.default_flow_style = False
    yaml.indent(mapping=2, sequence=2, offset=0)
    return yaml


def build_config_section(schema: dict, overrides: dict | None = None) -> CommentedMap:
    """
    根据Schema生成单个配置块

    Parameters
    ----------
    schema : dict
        配置定义 {key: (default_value, comment)}
    overrides : dict, optional
        覆盖默认值 {key: value}

    Returns
    -------
    CommentedMap
        按Schema顺序、每项带行尾注释
    """
    overrides = overrides or {}
    section = CommentedMap()
    for key, (default_value, comment) in schema.items():
        section[key] = overrides.get(key, default_value)
        section.yaml_add_eol_comment(comment, key)
    return section


def generate_config(overrides: dict | None = None, stamp: bool = True) -> CommentedMap:
    """
    生成完整配置

    Parameters
    ----------
    overrides : dict, optional
        覆盖默认值 {'section': {'key': value}}，不会被修改
    stamp : bool
        是否填充生成时间；关闭时输出可逐字节复现

    Returns
    -------
    CommentedMap
        完整配置字典
    """
    merged = {name: dict(values) for name, values in (overrides or {}).items()}
    if stamp:
        merged.setdefault('meta', {})['generated_at'] = datetime.now().strftime("%Y-%m-%d %H:%M:%S")

    config = CommentedMap()
    for name, schema in CONFIG_SCHEMA.items():
        config[name] = build_config_section(schema, merged.get(name))
    return config


def render_config(config: CommentedMap | dict, title: str = '鞍点求解实验配置') -> str:
    """
    渲染为YAML文本

    分区按Schema顺序输出，每个分区前加中文名称横幅；缺失的分区跳过。
    普通字典（如 config_to_dict 的结果）同样可渲染，只是没有行尾注释。
    """
    yaml = _yaml()
    parts = [_banner(title), '\n']
    for name in CONFIG_SCHEMA:
        if name not in config:
            continue
        stream = StringIO()
        yaml.dump({name: config[name]}, stream)
        parts += [_banner(SECTION_NAMES.get(name, name)), stream.getvalue(), '\n']
    return ''.join(parts)


def save_config(config: CommentedMap | dict, output_path: Path, title: str = '鞍点求解实验配置') -> None:
    """
    保存配置

    Parameters
    ----------
    config : CommentedMap | dict
        配置字典
    output_path : Path
        输出路径；后缀 .json 时写 JSON（无注释），否则写YAML
    title : str
        YAML 文件头标题
    """
    output_path = Path(output_path)
    output_path.parent.mkdir(parents=True, exist_ok=True)
    if output_path.suffix.lower() == '.json':
        text = json.dumps({name: dict(config[name]) for name in CONFIG_SCHEMA if name in config},
                          indent=2, ensure_ascii=False) + '\n'
    else:
        text = render_config(config, title)
    output_path.write_text(text, encoding='utf-8')


def sync_example(output_path: Path, check: bool = False) -> int:
    """
    重写或检查示例配置

    Returns
    -------
    int
        0 已写出或内容一致，1 check 模式下内容过期
    """
    output_path = Path(output_path)
    expected = render_config(generate_config(overrides=EXAMPLE_OVERRIDES, stamp=False))

    if check:
        current = output_path.read_text(encoding='utf-8') if output_path.exists() else ''
        if current != expected:
            print(f"[STALE] 示例配置与Schema不一致: {output_path}")
            return 1
        print(f"[OK] 示例配置是最新的: {output_path}")
        return 0

    output_path.parent.mkdir(parents=True, exist_ok=True)
    output_path.write_text(expected, encoding='utf-8')
    print(f"[OK] 配置文件已生成: {output_path}")
    return 0


def main(argv: list[str] | None = None) -> int:
    """重写或检查仓库自带的示例配置"""
    argv = sys.argv[1:] if argv is None else argv
    project_root = Path(__file__).parent.parent.parent
    return sync_example(project_root / "config" / "example_solve.yaml", check='--check' in argv)


if __name__ == "__main__":
    sys.exit(main())
