"""
Vision features step by step
============================

Takes one synthetic image through patchify -> class token + positional
embedding -> frozen encoder blocks -> trainable projection, checking the
structural identities along the way.
"""

import numpy as np

from stancebench.vision import VisionConfig, VisionEncoder, embed_patches, patchify

rng = np.random.default_rng(0)
image = rng.random((32, 32, 3))  # desk-scale default resolution

config = VisionConfig(resolution=32, patch_size=4, embed_dim=32,
                      layers=2, heads=2, proj_dim=64, seed=0)
encoder = VisionEncoder(config)

patches = patchify(image, config.patch_size)
print(f"image {image.shape} -> {patches.shape[0]} patches of length {patches.shape[1]}")
print(f"patch-count identity N = HW/P^2: {patches.shape[0]} == "
      f"{image.shape[0] * image.shape[1] // config.patch_size**2}")

v0 = embed_patches(patches, encoder.params)
print(f"embedded sequence: {v0.shape} (class token + {patches.shape[0]} patches)")

# the embedding layout is recoverable: subtract positions, drop the class row
recovered = (v0 - encoder.params["E_pos"])[1:]
print("layout recovers patches @ E to",
      float(np.max(np.abs(recovered - patches @ encoder.params["E"]))))

features = encoder.features(image)
gamma_v = encoder.forward(image)
print(f"encoder output {features.shape} -> projected visual tokens {gamma_v.shape}")

# the full-scale grid: 448x448 with 14px patches gives 1024 tokens
big = VisionConfig(resolution=448, patch_size=14, embed_dim=32,
                   layers=0, heads=2, proj_dim=64, seed=0)
print("448x448 / P=14 patch count:", big.num_patches)

# frozen determinism: same image, same bytes
again = encoder.forward(image)
print("bit-identical repeat:", gamma_v.tobytes() == again.tobytes())
