"""Small frozen patch-transformer: class token + positional embeddings, a few
pre-norm self-attention blocks, and a trainable linear projection to the
fusion width.

Weights are seeded random stand-ins (scaled normal, std 0.02); everything is
frozen except the output projection. All arithmetic is float64 so downstream
gradient checks are exact to finite-difference precision.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from stancebench.errors import ConfigInvalid, DimensionError, NumericalError
from stancebench.vision.image_io import load_image
from stancebench.vision.patches import patchify


@dataclass
class VisionConfig:
    resolution: int = 32
    patch_size: int = 4
    embed_dim: int = 32
    layers: int = 2
    heads: int = 2
    proj_dim: int = 64  # fusion width d_v
    seed: int = 0

    def __post_init__(self) -> None:
        if self.resolution % self.patch_size != 0:
            raise ConfigInvalid(
                f"resolution {self.resolution} not divisible by patch size {self.patch_size}"
            )
        if self.embed_dim % self.heads != 0:
            raise ConfigInvalid(f"embed_dim {self.embed_dim} not divisible by heads {self.heads}")

    @property
    def grid(self) -> int:
        return self.resolution // self.patch_size

    @property
    def num_patches(self) -> int:
        return self.grid * self.grid


def init_vision_params(config: VisionConfig) -> tuple[dict[str, np.ndarray], dict[str, bool]]:
    rng = np.random.default_rng(config.seed)
    d = config.embed_dim
    patch_len = config.patch_size * config.patch_size * 3

    def normal(*shape):
        return rng.normal(0.0, 0.02, size=shape)

    params: dict[str, np.ndarray] = {
        "E": normal(patch_len, d),
        "E_pos": normal(config.num_patches + 1, d),
        "x_class": normal(d),
    }
    for l in range(config.layers):
        params[f"enc.{l}.ln1_g"] = np.ones(d)
        params[f"enc.{l}.wq"] = normal(d, d)
        params[f"enc.{l}.wk"] = normal(d, d)
        params[f"enc.{l}.wv"] = normal(d, d)
        params[f"enc.{l}.wo"] = normal(d, d)
        params[f"enc.{l}.ln2_g"] = np.ones(d)
        params[f"enc.{l}.w1"] = normal(4 * d, d)
        params[f"enc.{l}.w2"] = normal(d, 4 * d)
    params["w_proj"] = normal(d, config.proj_dim)
    frozen = {name: name != "w_proj" for name in params}
    return params, frozen


def embed_patches(patches: np.ndarray, params: dict[str, np.ndarray]) -> np.ndarray:
    """Class token plus linearly embedded patches, shifted by the positional table."""
    e, e_pos, x_class = params["E"], params["E_pos"], params["x_class"]
    if patches.ndim != 2 or patches.shape[1] != e.shape[0]:
        raise DimensionError(
            f"patches {patches.shape} incompatible with embedding {e.shape}"
        )
    n = patches.shape[0]
    if e_pos.shape != (n + 1, e.shape[1]):
        raise DimensionError(
            f"positional table {e_pos.shape} must be ({n + 1}, {e.shape[1]})"
        )
    v0 = np.empty((n + 1, e.shape[1]))
    v0[0] = x_class
    v0[1:] = patches @ e
    return v0 + e_pos


def _rmsnorm(x: np.ndarray, gain: np.ndarray, eps: float = 1e-6) -> np.ndarray:
    rms = np.sqrt(np.mean(x * x, axis=-1, keepdims=True) + eps)
    return x / rms * gain


def _softmax(scores: np.ndarray) -> np.ndarray:
    shifted = scores - scores.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def _attention(x: np.ndarray, wq, wk, wv, wo, heads: int) -> np.ndarray:
    t, d = x.shape
    hd = d // heads
    q = (x @ wq.T).reshape(t, heads, hd).transpose(1, 0, 2)
    k = (x @ wk.T).reshape(t, heads, hd).transpose(1, 0, 2)
    v = (x @ wv.T).reshape(t, heads, hd).transpose(1, 0, 2)
    scores = q @ k.transpose(0, 2, 1) / np.sqrt(hd)
    probs = _softmax(scores)
    out = (probs @ v).transpose(1, 0, 2).reshape(t, d)
    return out @ wo.T


def _silu(x: np.ndarray) -> np.ndarray:
    return x / (1.0 + np.exp(-x))


def encode(v0: np.ndarray, params: dict[str, np.ndarray], config: VisionConfig) -> np.ndarray:
    """Run the pre-norm encoder blocks; with zero layers this is the identity."""
    if not np.all(np.isfinite(v0)):
        raise NumericalError("non-finite values in encoder input")
    x = v0
    for l in range(config.layers):
        xn = _rmsnorm(x, params[f"enc.{l}.ln1_g"])
        x = x + _attention(
            xn,
            params[f"enc.{l}.wq"], params[f"enc.{l}.wk"],
            params[f"enc.{l}.wv"], params[f"enc.{l}.wo"],
            config.heads,
        )
        xn2 = _rmsnorm(x, params[f"enc.{l}.ln2_g"])
        x = x + _silu(xn2 @ params[f"enc.{l}.w1"].T) @ params[f"enc.{l}.w2"].T
    if not np.all(np.isfinite(x)):
        raise NumericalError("non-finite values in encoder output")
    return x


def project(features: np.ndarray, w_proj: np.ndarray) -> np.ndarray:
    if features.ndim != 2 or features.shape[1] != w_proj.shape[0]:
        raise DimensionError(
            f"features {features.shape} incompatible with projection {w_proj.shape}"
        )
    return features @ w_proj


FROZEN_GROUP_PREFIXES = ("E", "E_pos", "x_class", "enc.")


class VisionEncoder:
    """Convenience wrapper binding a config to its parameter set."""

    def __init__(self, config: VisionConfig, params: dict[str, np.ndarray] | None = None,
                 class_token_only: bool = False):
        self.config = config
        if params is None:
            params, frozen = init_vision_params(config)
            self.frozen = frozen
        else:
            self.frozen = {name: name != "w_proj" for name in params}
        self.params = params
        # Project all N+1 token features by default; class-token-only mode
        # keeps just the first row.
        self.class_token_only = class_token_only

    def features(self, image: np.ndarray) -> np.ndarray:
        """Frozen part of the pipeline: patchify, embed, encode."""
        patches = patchify(image, self.config.patch_size)
        v0 = embed_patches(patches, self.params)
        feats = encode(v0, self.params, self.config)
        return feats[:1] if self.class_token_only else feats

    def forward(self, image: np.ndarray) -> np.ndarray:
        return project(self.features(image), self.params["w_proj"])

    def features_from_file(self, path, data_root=".") -> np.ndarray:
        from pathlib import Path
        return self.features(load_image(Path(data_root) / path, self.config.resolution))

    def frozen_param_names(self) -> list[str]:
        return [name for name, fr in self.frozen.items() if fr]
