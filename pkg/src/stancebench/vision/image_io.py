"""PNG/JPEG loading with bilinear resize to a square resolution, scaled to [0,1]."""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image as PILImage

from stancebench.errors import ImageMissing


def load_image(path: str | Path, resolution: int) -> np.ndarray:
    """Return an (resolution, resolution, 3) float64 array in [0, 1]."""
    p = Path(path)
    if not p.is_file():
        raise ImageMissing(f"image file not found: {p}")
    with PILImage.open(p) as img:
        rgb = img.convert("RGB").resize((resolution, resolution), PILImage.BILINEAR)
        return np.asarray(rgb, dtype=np.float64) / 255.0
