"""Low-rank adapters for the attention query/value projections.

The base weight is never mutated: the effective weight is W + scale * (B @ A)
with A seeded random and B zero-initialized, so a fresh adapter is an exact
no-op. Applying an adapter routes through the two small factors rather than
materializing the dense delta.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from stancebench.errors import DimensionError
from stancebench.fusion.config import ModelConfig


@dataclass
class LoraAdapter:
    a: np.ndarray  # (r, d)
    b: np.ndarray  # (d, r)
    scale: float

    @property
    def rank(self) -> int:
        return self.a.shape[0]


def init_adapter(d: int, rank: int, scale: float, rng: np.random.Generator) -> LoraAdapter:
    return LoraAdapter(
        a=rng.normal(0.0, 0.02, size=(rank, d)),
        b=np.zeros((d, rank)),
        scale=scale,
    )


ADAPTER_TARGETS = ("q", "v")


def init_adapters(config: ModelConfig) -> dict[str, LoraAdapter]:
    """One adapter per (layer, target) pair, keyed '<layer>.<q|v>'."""
    rng = np.random.default_rng([config.seed, 0x10AA])
    return {
        f"{layer}.{target}": init_adapter(config.d_v, config.lora_rank, config.lora_scale, rng)
        for layer in range(config.layers)
        for target in ADAPTER_TARGETS
    }


def lora_apply(w: np.ndarray, adapter: LoraAdapter, x: np.ndarray) -> np.ndarray:
    """x @ (W + scale * B @ A)^T computed through the low-rank route."""
    if x.shape[-1] != w.shape[1]:
        raise DimensionError(f"input width {x.shape[-1]} != weight in-dim {w.shape[1]}")
    if adapter.a.shape[1] != w.shape[1] or adapter.b.shape[0] != w.shape[0]:
        raise DimensionError(
            f"adapter ({adapter.b.shape[0]}x{adapter.a.shape[0]} rank factors) "
            f"incompatible with weight {w.shape}"
        )
    return x @ w.T + adapter.scale * ((x @ adapter.a.T) @ adapter.b.T)


def lora_delta_dense(w: np.ndarray, adapter: LoraAdapter) -> np.ndarray:
    """Materialized effective weight; reference route for equivalence checks."""
    return w + adapter.scale * (adapter.b @ adapter.a)
