"""配置文件加载器模块"""
from __future__ import annotations

import copy
import os
import re
from pathlib import Path
from typing import Any, Dict, Optional, Union

import yaml

from config import (
    DEFAULT_BEAM_WIDTH,
    DEFAULT_BIBSG_ROUNDS,
    DEFAULT_ETA,
    DEFAULT_EVAL_EVERY,
    DEFAULT_EXACT_MAX_SEQUENCES,
    DEFAULT_MAX_DEPTH,
    DEFAULT_MAX_EPOCHS,
    DEFAULT_MIN_LEAF,
    SynthConfig,
)

SECTIONS = ("logging", "training", "search", "parallel", "exact", "synthetic")

_ENV_PATTERN = re.compile(r"\$\{([^}]+)\}")


def default_config() -> Dict[str, Dict[str, Any]]:
    """默认配置，与 config.py 中的数据类默认值保持一致"""
    return {
        "logging": {"level": "INFO", "file": None},
        "training": {
            "max_epochs": DEFAULT_MAX_EPOCHS,
            "eval_every": DEFAULT_EVAL_EVERY,
            "max_depth": DEFAULT_MAX_DEPTH,
            "min_leaf": DEFAULT_MIN_LEAF,
            "eta": DEFAULT_ETA,
            "seed": 0,
            "patience": None,
        },
        "search": {
            "strategy": "bibsg",
            "beam_width": DEFAULT_BEAM_WIDTH,
            "bibsg_rounds": DEFAULT_BIBSG_ROUNDS,
        },
        "parallel": {"workers": 1, "memory_limit_mb": None},
        "exact": {"max_sequences": DEFAULT_EXACT_MAX_SEQUENCES},
        "synthetic": SynthConfig().to_dict(),
    }


class ConfigLoader:
    """配置文件加载器，支持YAML格式和环境变量替换"""

    def __init__(self, config_path: Optional[Union[str, Path]] = None):
        self.config_path = Path(config_path) if config_path else Path("config.yaml")
        self.explicit = config_path is not None
        self._config_cache: Optional[Dict[str, Dict[str, Any]]] = None

    def load_config(self) -> Dict[str, Dict[str, Any]]:
        """加载配置文件，缺失的段落和键使用默认值补齐"""
        if self._config_cache is not None:
            return self._config_cache

        merged = default_config()
        if not self.config_path.exists():
            if self.explicit:
                raise FileNotFoundError(f"No such config file: {self.config_path}")
            self._config_cache = merged
            return merged

        try:
            with open(self.config_path, "r", encoding="utf-8") as f:
                raw = yaml.safe_load(f) or {}
        except yaml.YAMLError as exc:
            raise ValueError(f"{self.config_path}: invalid YAML ({exc})") from exc
        if not isinstance(raw, dict):
            raise ValueError(f"{self.config_path}: top level must be a mapping")

        raw = self._process_env_vars(raw)
        for section, values in raw.items():
            if values is None:
                continue
            if section not in merged or not isinstance(values, dict):
                # 未知段落或格式错误的段落交给校验器报告
                merged[section] = values
                continue
            merged[section].update(values)
        self._config_cache = merged
        return merged

    def _process_env_vars(self, config: Any) -> Any:
        """递归处理配置中的环境变量替换"""
        if isinstance(config, dict):
            return {k: self._process_env_vars(v) for k, v in config.items()}
        if isinstance(config, list):
            return [self._process_env_vars(item) for item in config]
        if isinstance(config, str):
            return self._replace_env_vars(config)
        return config

    def _replace_env_vars(self, text: str) -> Any:
        """替换字符串中的环境变量；整串为单个占位符时按YAML标量重新解析"""

        def replace_match(match: re.Match) -> str:
            var_expr = match.group(1)
            if ":-" in var_expr:
                var_name, default_value = var_expr.split(":-", 1)
                return os.environ.get(var_name, default_value)
            return os.environ.get(var_expr, "")

        replaced = _ENV_PATTERN.sub(replace_match, text)
        if replaced != text and _ENV_PATTERN.fullmatch(text.strip()):
            if replaced == "":
                return None
            return yaml.safe_load(replaced)
        return replaced

    def section(self, name: str) -> Dict[str, Any]:
        return copy.deepcopy(self.load_config().get(name) or {})

    def get_log_level(self) -> str:
        """获取日志级别配置"""
        return str(self.section("logging").get("level") or "INFO")

    def get_log_file(self) -> Optional[Path]:
        """获取日志文件路径配置"""
        path = self.section("logging").get("file")
        return Path(path).expanduser() if path else None

    def get_training_config(self) -> Dict[str, Any]:
        """获取训练循环配置"""
        return self.section("training")

    def get_search_config(self) -> Dict[str, Any]:
        """获取束搜索配置"""
        return self.section("search")

    def get_parallel_config(self) -> Dict[str, Any]:
        """获取并行处理配置"""
        return self.section("parallel")

    def get_exact_max_sequences(self) -> int:
        """获取精确枚举的序列数上限"""
        return int(self.section("exact").get("max_sequences", DEFAULT_EXACT_MAX_SEQUENCES))

    def get_synthetic_config(self) -> Dict[str, Any]:
        """获取合成语料配置"""
        return self.section("synthetic")


def create_config_loader(config_path: Optional[Union[str, Path]] = None) -> ConfigLoader:
    """创建配置加载器实例"""
    return ConfigLoader(config_path)


__all__ = ["ConfigLoader", "SECTIONS", "create_config_loader", "default_config"]
