"""Model and training configuration for the fusion decoder."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from stancebench.errors import ConfigInvalid
from stancebench.prompt.tokenizer import VOCAB_SIZE


@dataclass
class ModelConfig:
    d_v: int = 64
    layers: int = 2
    heads: int = 4
    vocab_size: int = VOCAB_SIZE
    max_len: int = 1024
    lora_rank: int = 4
    lora_alpha: Optional[int] = None  # defaults to the rank (scale 1)
    seed: int = 0

    def __post_init__(self) -> None:
        if self.d_v % self.heads != 0:
            raise ConfigInvalid(f"d_v {self.d_v} not divisible by heads {self.heads}")
        if not (1 <= self.lora_rank <= self.d_v):
            raise ConfigInvalid(f"lora_rank must be in [1, d_v], got {self.lora_rank}")
        if self.lora_alpha is None:
            self.lora_alpha = self.lora_rank

    @property
    def lora_scale(self) -> float:
        return self.lora_alpha / self.lora_rank

    def to_dict(self) -> dict:
        return {
            "d_v": self.d_v, "layers": self.layers, "heads": self.heads,
            "vocab_size": self.vocab_size, "max_len": self.max_len,
            "lora_rank": self.lora_rank, "lora_alpha": self.lora_alpha,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "ModelConfig":
        known = {k: obj[k] for k in obj if k in cls.__dataclass_fields__}
        return cls(**known)


@dataclass
class TrainConfig:
    lr: float = 1e-3
    steps: int = 200
    batch: int = 8

    def to_dict(self) -> dict:
        return {"lr": self.lr, "steps": self.steps, "batch": self.batch}

    @classmethod
    def from_dict(cls, obj: dict) -> "TrainConfig":
        known = {k: obj[k] for k in obj if k in cls.__dataclass_fields__}
        return cls(**known)
