"""Runtime configuration models and helpers."""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Mapping, Optional

from config import DEFAULT_EXACT_MAX_SEQUENCES, SearchConfig, SynthConfig, TrainConfig

from .config_loader import create_config_loader
from .config_validator import ConfigValidationError, ConfigValidator

# (environment variable, section, key)
ENV_OVERRIDES = (
    ("SGTB_LOG_LEVEL", "logging", "level"),
    ("SGTB_WORKERS", "parallel", "workers"),
    ("SGTB_SEED", "training", "seed"),
    ("SGTB_SEED", "synthetic", "seed"),
    ("SGTB_BEAM", "search", "beam_width"),
    ("SGTB_STRATEGY", "search", "strategy"),
    ("SGTB_MEMORY_LIMIT_MB", "parallel", "memory_limit_mb"),
    ("SGTB_EXACT_MAX_SEQUENCES", "exact", "max_sequences"),
)

# (argparse dest, section, key)
CLI_OVERRIDES = (
    ("log_level", "logging", "level"),
    ("log_file", "logging", "file"),
    ("epochs", "training", "max_epochs"),
    ("eval_every", "training", "eval_every"),
    ("max_depth", "training", "max_depth"),
    ("min_leaf", "training", "min_leaf"),
    ("eta", "training", "eta"),
    ("seed", "training", "seed"),
    ("patience", "training", "patience"),
    ("strategy", "search", "strategy"),
    ("beam", "search", "beam_width"),
    ("bibsg_rounds", "search", "bibsg_rounds"),
    ("workers", "parallel", "workers"),
    ("memory_limit_mb", "parallel", "memory_limit_mb"),
    ("exact_max_sequences", "exact", "max_sequences"),
    ("seed", "synthetic", "seed"),
    ("n_docs", "synthetic", "n_docs"),
    ("n_dev", "synthetic", "n_dev"),
    ("n_test", "synthetic", "n_test"),
    ("mentions", "synthetic", "T"),
    ("candidates", "synthetic", "candidates_per_mention"),
    ("d_local", "synthetic", "d_local"),
    ("d_pair", "synthetic", "d_pair"),
    ("local_signal", "synthetic", "local_signal"),
    ("coherence", "synthetic", "coherence_strength"),
    ("noise_pairs", "synthetic", "noise_pairs"),
    ("future_informative", "synthetic", "future_informative"),
)

SEARCH_KEYS = ("strategy", "beam_width", "bibsg_rounds")


def _assign(merged: Dict[str, Any], section: str, key: str, value: object) -> None:
    target = merged.get(section)
    if isinstance(target, dict):
        target[key] = value


def _optional_path(value: object) -> Optional[Path]:
    return Path(str(value)).expanduser() if value else None


@dataclass(frozen=True)
class AppSettings:
    """Resolved settings for one ``sgtb`` command."""

    command: str
    log_level: str = "INFO"
    log_file: Optional[Path] = None
    train: TrainConfig = field(default_factory=TrainConfig)
    synth: SynthConfig = field(default_factory=SynthConfig)
    exact_max_sequences: int = DEFAULT_EXACT_MAX_SEQUENCES
    # search fields set by a flag or environment variable; they take
    # precedence over the defaults stored in a model header
    search_overrides: Mapping[str, Any] = field(default_factory=dict)
    paths: Mapping[str, Optional[Path]] = field(default_factory=dict)
    exact_decode: bool = False

    @property
    def search(self) -> SearchConfig:
        return self.train.search

    def path(self, name: str) -> Optional[Path]:
        return self.paths.get(name)

    def search_for_model(self, model_defaults: Optional[SearchConfig]) -> SearchConfig:
        """Search settings for decoding with a stored model."""

        if model_defaults is None:
            return self.search
        payload = {**model_defaults.to_dict(), **dict(self.search_overrides)}
        return SearchConfig.from_dict(payload)

    @classmethod
    def from_cli_args(
        cls, args: object, environ: Optional[Mapping[str, str]] = None
    ) -> "AppSettings":
        # 优先级：命令行参数 > 环境变量 > 配置文件 > 默认值
        env = os.environ if environ is None else environ
        config_loader = create_config_loader(getattr(args, "config_file", None))
        try:
            merged: Dict[str, Any] = config_loader.load_config()
        except (OSError, ValueError) as exc:
            raise ConfigValidationError([f"配置文件加载失败: {exc}"]) from exc
        merged = {name: (dict(values) if isinstance(values, dict) else values) for name, values in merged.items()}

        search_overrides: Dict[str, Any] = {}
        for env_name, section, key in ENV_OVERRIDES:
            value = env.get(env_name)
            if value is None or value.strip() == "":
                continue
            _assign(merged, section, key, value.strip())
            if section == "search":
                search_overrides[key] = value.strip()

        for dest, section, key in CLI_OVERRIDES:
            value = getattr(args, dest, None)
            if value is None or value is False:
                continue
            _assign(merged, section, key, value)
            if section == "search":
                search_overrides[key] = value

        validator = ConfigValidator(config_loader)
        validator.validate(merged)
        validator.raise_for_errors()
        values = validator.normalized

        training = values["training"]
        parallel = values["parallel"]
        search = values["search"]
        train_config = TrainConfig(
            max_epochs=training["max_epochs"],
            eval_every=training["eval_every"],
            beam_width=search["beam_width"],
            max_depth=training["max_depth"],
            min_leaf=training["min_leaf"],
            eta=training["eta"],
            strategy=search["strategy"],
            bibsg_rounds=search["bibsg_rounds"],
            workers=parallel["workers"],
            seed=training["seed"],
            patience=training.get("patience"),
            memory_limit_mb=parallel.get("memory_limit_mb"),
        )
        synth_values = values["synthetic"]
        synth_config = SynthConfig(**{key: synth_values[key] for key in SynthConfig().to_dict()})

        paths = {
            name: _optional_path(getattr(args, name, None))
            for name in (
                "train",
                "dev",
                "pairwise",
                "model_out",
                "report_out",
                "model",
                "input",
                "output",
                "predictions",
                "out_dir",
            )
        }
        return cls(
            command=str(getattr(args, "command", "") or ""),
            log_level=values["logging"]["level"],
            log_file=_optional_path(values["logging"].get("file")),
            train=train_config,
            synth=synth_config,
            exact_max_sequences=values["exact"]["max_sequences"],
            search_overrides={key: search[key] for key in SEARCH_KEYS if key in search_overrides},
            paths=paths,
            exact_decode=bool(getattr(args, "exact", False)),
        )


__all__ = ["AppSettings", "CLI_OVERRIDES", "ENV_OVERRIDES"]
