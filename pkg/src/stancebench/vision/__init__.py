from stancebench.vision.image_io import load_image
from stancebench.vision.patches import patchify
from stancebench.vision.encoder import (
    VisionConfig,
    VisionEncoder,
    embed_patches,
    encode,
    init_vision_params,
    project,
)

__all__ = [
    "VisionConfig",
    "VisionEncoder",
    "embed_patches",
    "encode",
    "init_vision_params",
    "load_image",
    "patchify",
    "project",
]
