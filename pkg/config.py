"""Core configuration values for the structured gradient tree boosting toolkit."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional


# Published training protocol.
DEFAULT_BEAM_WIDTH = 4
DEFAULT_MAX_DEPTH = 3
DEFAULT_MIN_LEAF = 1
DEFAULT_ETA = 1.0
DEFAULT_MAX_EPOCHS = 500
DEFAULT_EVAL_EVERY = 25
DEFAULT_BIBSG_ROUNDS = 2
DEFAULT_EXACT_MAX_SEQUENCES = 10**6

FORMAT_VERSION = 1


class Strategy(str, Enum):
    """Training-time search strategy."""

    EARLY_UPDATE = "bs-early"
    BSG = "bsg"
    BIBSG = "bibsg"
    LOCAL = "local"

    @classmethod
    def parse(cls, value: "Strategy | str") -> "Strategy":
        if isinstance(value, cls):
            return value
        candidate = str(value).strip().lower()
        for member in cls:
            if member.value == candidate or member.name.lower() == candidate:
                return member
        names = ", ".join(member.value for member in cls)
        raise ValueError(f"Unknown strategy {value!r}; expected one of: {names}")


@dataclass(frozen=True)
class SearchConfig:
    """Beam search settings shared by training and decoding."""

    strategy: Strategy = Strategy.BIBSG
    beam_width: int = DEFAULT_BEAM_WIDTH
    bibsg_rounds: int = DEFAULT_BIBSG_ROUNDS

    def __post_init__(self) -> None:
        object.__setattr__(self, "strategy", Strategy.parse(self.strategy))
        if self.beam_width < 1:
            raise ValueError(f"beam_width must be >= 1, got {self.beam_width}")
        if self.bibsg_rounds < 1:
            raise ValueError(f"bibsg_rounds must be >= 1, got {self.bibsg_rounds}")

    def to_dict(self) -> dict:
        return {
            "strategy": self.strategy.value,
            "beam_width": self.beam_width,
            "bibsg_rounds": self.bibsg_rounds,
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "SearchConfig":
        return cls(
            strategy=Strategy.parse(payload.get("strategy", Strategy.BIBSG)),
            beam_width=int(payload.get("beam_width", DEFAULT_BEAM_WIDTH)),
            bibsg_rounds=int(payload.get("bibsg_rounds", DEFAULT_BIBSG_ROUNDS)),
        )


@dataclass(frozen=True)
class TrainConfig:
    """Outer boosting loop settings."""

    max_epochs: int = DEFAULT_MAX_EPOCHS
    eval_every: int = DEFAULT_EVAL_EVERY
    beam_width: int = DEFAULT_BEAM_WIDTH
    max_depth: int = DEFAULT_MAX_DEPTH
    min_leaf: int = DEFAULT_MIN_LEAF
    eta: float = DEFAULT_ETA
    strategy: Strategy = Strategy.BIBSG
    bibsg_rounds: int = DEFAULT_BIBSG_ROUNDS
    workers: int = 1
    seed: int = 0
    patience: Optional[int] = None
    memory_limit_mb: Optional[int] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "strategy", Strategy.parse(self.strategy))
        if self.max_epochs < 0:
            raise ValueError(f"max_epochs must be >= 0, got {self.max_epochs}")
        if self.eval_every < 1:
            raise ValueError(f"eval_every must be >= 1, got {self.eval_every}")
        if self.max_epochs and self.eval_every > self.max_epochs:
            raise ValueError(
                f"eval_every ({self.eval_every}) must not exceed max_epochs ({self.max_epochs})"
            )
        for name in ("beam_width", "max_depth", "min_leaf", "workers", "bibsg_rounds"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1, got {getattr(self, name)}")
        if not self.eta > 0:
            raise ValueError(f"eta must be > 0, got {self.eta}")
        if self.seed < 0:
            raise ValueError(f"seed must be unsigned, got {self.seed}")
        if self.patience is not None and self.patience < 1:
            raise ValueError(f"patience must be >= 1 when set, got {self.patience}")

    @property
    def search(self) -> SearchConfig:
        return SearchConfig(
            strategy=self.strategy,
            beam_width=self.beam_width,
            bibsg_rounds=self.bibsg_rounds,
        )

    def to_dict(self) -> dict:
        return {
            "max_epochs": self.max_epochs,
            "eval_every": self.eval_every,
            "beam_width": self.beam_width,
            "max_depth": self.max_depth,
            "min_leaf": self.min_leaf,
            "eta": self.eta,
            "strategy": self.strategy.value,
            "bibsg_rounds": self.bibsg_rounds,
            "workers": self.workers,
            "seed": self.seed,
            "patience": self.patience,
        }


@dataclass(frozen=True)
class SynthConfig:
    """Parameters of a synthetic disambiguation corpus."""

    n_docs: int = 500
    n_dev: int = 100
    n_test: int = 100
    T: int = 8
    candidates_per_mention: int = 5
    d_local: int = 3
    d_pair: int = 2
    local_signal: float = 1.0
    coherence_strength: float = 0.0
    future_informative: bool = False
    noise_pairs: float = 0.1
    seed: int = 0

    def __post_init__(self) -> None:
        for name in ("n_docs", "T", "candidates_per_mention", "d_local", "d_pair"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        for name in ("n_dev", "n_test", "seed"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)}")
        if not 0.0 <= self.local_signal <= 1.0:
            raise ValueError(f"local_signal must lie in [0, 1], got {self.local_signal}")
        if self.coherence_strength < 0:
            raise ValueError(f"coherence_strength must be >= 0, got {self.coherence_strength}")
        if not 0.0 <= self.noise_pairs <= 1.0:
            raise ValueError(f"noise_pairs must lie in [0, 1], got {self.noise_pairs}")

    def to_dict(self) -> dict:
        return {
            "n_docs": self.n_docs,
            "n_dev": self.n_dev,
            "n_test": self.n_test,
            "T": self.T,
            "candidates_per_mention": self.candidates_per_mention,
            "d_local": self.d_local,
            "d_pair": self.d_pair,
            "local_signal": self.local_signal,
            "coherence_strength": self.coherence_strength,
            "future_informative": self.future_informative,
            "noise_pairs": self.noise_pairs,
            "seed": self.seed,
        }
