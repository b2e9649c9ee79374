"""配置文件验证模块"""
from __future__ import annotations

from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from config import Strategy

from .config_loader import SECTIONS, ConfigLoader

VALID_LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")


class ConfigValidationError(ValueError):
    """配置验证错误，消息中列出全部问题"""

    def __init__(self, errors: List[str]) -> None:
        self.errors = list(errors)
        super().__init__("invalid configuration: " + "; ".join(self.errors))


class ConfigValidator:
    """配置验证器：检查各配置段的类型与取值范围，并把字符串数值规范化"""

    def __init__(self, config_loader: Optional[ConfigLoader] = None):
        self.config_loader = config_loader or ConfigLoader()
        self.errors: List[str] = []
        self.warnings: List[str] = []
        self.normalized: Dict[str, Dict[str, Any]] = {}

    def validate_config(self) -> bool:
        """验证配置文件"""
        try:
            config = self.config_loader.load_config()
        except (OSError, ValueError) as e:
            self.errors = [f"配置文件加载失败: {e}"]
            self.warnings = []
            return False
        return self.validate(config)

    def validate(self, config: Dict[str, Any]) -> bool:
        """验证已合并的配置字典"""
        self.errors = []
        self.warnings = []
        self.normalized = {}

        for section in config:
            if section not in SECTIONS:
                self.warnings.append(f"未知的配置段: {section}")
        for section in SECTIONS:
            values = config.get(section) or {}
            if not isinstance(values, dict):
                self.errors.append(f"{section} 配置段必须是映射")
                values = {}
            self.normalized[section] = dict(values)

        self._validate_logging_config(self.normalized["logging"])
        self._validate_training_config(self.normalized["training"])
        self._validate_search_config(self.normalized["search"])
        self._validate_parallel_config(self.normalized["parallel"])
        self._validate_exact_config(self.normalized["exact"])
        self._validate_synthetic_config(self.normalized["synthetic"])
        return len(self.errors) == 0

    # ------------------------------------------------------------------
    def _int(self, values: Dict[str, Any], section: str, key: str, *, minimum: int, optional: bool = False) -> None:
        value = values.get(key)
        if value is None:
            if not optional:
                self.errors.append(f"{section}.{key} 配置缺失")
            return
        if isinstance(value, bool):
            self.errors.append(f"{section}.{key} 必须是整数: {value!r}")
            return
        if isinstance(value, str):
            try:
                value = int(value.strip())
            except ValueError:
                self.errors.append(f"{section}.{key} 必须是整数: {value!r}")
                return
        if isinstance(value, float) and value.is_integer():
            value = int(value)
        if not isinstance(value, int):
            self.errors.append(f"{section}.{key} 必须是整数: {value!r}")
            return
        if value < minimum:
            self.errors.append(f"{section}.{key} 必须 >= {minimum}: {value}")
            return
        values[key] = value

    def _float(
        self,
        values: Dict[str, Any],
        section: str,
        key: str,
        *,
        low: Optional[float] = None,
        high: Optional[float] = None,
        strictly_positive: bool = False,
    ) -> None:
        value = values.get(key)
        if isinstance(value, bool) or value is None:
            self.errors.append(f"{section}.{key} 必须是数字: {value!r}")
            return
        try:
            number = float(value)
        except (TypeError, ValueError):
            self.errors.append(f"{section}.{key} 必须是数字: {value!r}")
            return
        if strictly_positive and not number > 0:
            self.errors.append(f"{section}.{key} 必须 > 0: {number}")
            return
        if (low is not None and number < low) or (high is not None and number > high):
            self.errors.append(f"{section}.{key} 必须位于 [{low}, {high}]: {number}")
            return
        values[key] = number

    def _bool(self, values: Dict[str, Any], section: str, key: str) -> None:
        value = values.get(key, False)
        if isinstance(value, str):
            lowered = value.strip().lower()
            if lowered in {"1", "true", "yes", "on"}:
                value = True
            elif lowered in {"0", "false", "no", "off", ""}:
                value = False
        if not isinstance(value, bool):
            self.errors.append(f"{section}.{key} 必须是布尔值: {value!r}")
            return
        values[key] = value

    # ------------------------------------------------------------------
    def _validate_logging_config(self, values: Dict[str, Any]) -> None:
        """验证日志配置"""
        level = values.get("level") or "INFO"
        if not isinstance(level, str) or level.upper() not in VALID_LOG_LEVELS:
            self.errors.append(f"无效的日志级别: {level}，必须是: {', '.join(VALID_LOG_LEVELS)}")
        else:
            values["level"] = level.upper()
        log_file = values.get("file")
        if log_file:
            parent = Path(str(log_file)).expanduser().parent
            if parent.exists() and not parent.is_dir():
                self.errors.append(f"日志文件目录不是有效目录: {parent}")

    def _validate_training_config(self, values: Dict[str, Any]) -> None:
        """验证训练循环配置"""
        self._int(values, "training", "max_epochs", minimum=0)
        self._int(values, "training", "eval_every", minimum=1)
        self._int(values, "training", "max_depth", minimum=1)
        self._int(values, "training", "min_leaf", minimum=1)
        self._int(values, "training", "seed", minimum=0)
        self._int(values, "training", "patience", minimum=1, optional=True)
        self._float(values, "training", "eta", strictly_positive=True)
        epochs, every = values.get("max_epochs"), values.get("eval_every")
        if isinstance(epochs, int) and isinstance(every, int) and epochs and every > epochs:
            self.errors.append(f"training.eval_every ({every}) 不能大于 training.max_epochs ({epochs})")

    def _validate_search_config(self, values: Dict[str, Any]) -> None:
        """验证束搜索配置"""
        try:
            values["strategy"] = Strategy.parse(values.get("strategy", Strategy.BIBSG)).value
        except ValueError:
            names = ", ".join(member.value for member in Strategy)
            self.errors.append(f"无效的搜索策略: {values.get('strategy')}，必须是: {names}")
        self._int(values, "search", "beam_width", minimum=1)
        self._int(values, "search", "bibsg_rounds", minimum=1)

    def _validate_parallel_config(self, values: Dict[str, Any]) -> None:
        """验证并行处理配置"""
        self._int(values, "parallel", "workers", minimum=1)
        self._int(values, "parallel", "memory_limit_mb", minimum=1, optional=True)

    def _validate_exact_config(self, values: Dict[str, Any]) -> None:
        """验证精确枚举配置"""
        self._int(values, "exact", "max_sequences", minimum=1)

    def _validate_synthetic_config(self, values: Dict[str, Any]) -> None:
        """验证合成语料配置"""
        for key in ("n_docs", "T", "candidates_per_mention", "d_local", "d_pair"):
            self._int(values, "synthetic", key, minimum=1)
        for key in ("n_dev", "n_test", "seed"):
            self._int(values, "synthetic", key, minimum=0)
        self._float(values, "synthetic", "local_signal", low=0.0, high=1.0)
        self._float(values, "synthetic", "noise_pairs", low=0.0, high=1.0)
        self._float(values, "synthetic", "coherence_strength", low=0.0)
        self._bool(values, "synthetic", "future_informative")

    # ------------------------------------------------------------------
    def get_errors(self) -> List[str]:
        """获取验证错误列表"""
        return self.errors.copy()

    def get_warnings(self) -> List[str]:
        """获取验证警告列表"""
        return self.warnings.copy()

    def raise_for_errors(self) -> None:
        if self.errors:
            raise ConfigValidationError(self.errors)


def validate_config_file(config_path: Optional[Union[str, Path]] = None) -> ConfigValidator:
    """验证配置文件并返回验证器，调用方可读取错误与警告"""
    validator = ConfigValidator(ConfigLoader(config_path))
    validator.validate_config()
    return validator


__all__ = ["ConfigValidationError", "ConfigValidator", "VALID_LOG_LEVELS", "validate_config_file"]
