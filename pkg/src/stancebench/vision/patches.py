"""Split an image into flattened square patches.

Patches are ordered row-major over the grid and flattened row-major within
each patch (row, column, channel); values are raw pixels, no normalization
beyond the loader's [0,1] scaling.
"""

from __future__ import annotations

import numpy as np

from stancebench.errors import PatchGridError


def patchify(image: np.ndarray, patch_size: int) -> np.ndarray:
    if image.ndim != 3:
        raise PatchGridError(f"expected H x W x C image, got shape {image.shape}")
    h, w, c = image.shape
    if h % patch_size != 0 or w % patch_size != 0:
        raise PatchGridError(
            f"image {h}x{w} not divisible by patch size {patch_size}"
        )
    gh, gw = h // patch_size, w // patch_size
    patches = (
        image.reshape(gh, patch_size, gw, patch_size, c)
        .transpose(0, 2, 1, 3, 4)
        .reshape(gh * gw, patch_size * patch_size * c)
    )
    return np.ascontiguousarray(patches, dtype=np.float64)
