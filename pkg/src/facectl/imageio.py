"""PNG image I/O and value-range conventions.

Images travel through the pipeline as float arrays in [-1, 1], shaped 3xHxW.
A stored 8-bit value p maps to 2p/255 - 1 on read; writing inverts the map
with round-half-even, so read -> write round-trips byte-identically.
Segmentation maps are stored as single-channel 8-bit label images.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image


def read_image(path) -> np.ndarray:
    """Load an RGB PNG as float32 3xHxW in [-1, 1]."""
    path = Path(path)
    if path.suffix.lower() != ".png":
        raise ValueError(f"unsupported image format: {path.suffix!r} (PNG only)")
    with Image.open(path) as im:
        arr = np.asarray(im.convert("RGB"), dtype=np.float32)
    return (2.0 * arr / 255.0 - 1.0).transpose(2, 0, 1)


def write_image(path, image: np.ndarray) -> None:
    """Write a 3xHxW array in [-1, 1] as an 8-bit RGB PNG."""
    path = Path(path)
    if path.suffix.lower() != ".png":
        raise ValueError(f"unsupported image format: {path.suffix!r} (PNG only)")
    if image.ndim != 3 or image.shape[0] != 3:
        raise ValueError(f"expected 3xHxW image, got shape {image.shape}")
    arr = np.asarray(image, dtype=np.float64)
    # np.rint rounds half to even, matching the documented convention
    quant = np.rint((np.clip(arr, -1.0, 1.0) + 1.0) * 255.0 / 2.0).astype(np.uint8)
    Image.fromarray(quant.transpose(1, 2, 0), mode="RGB").save(path)


def read_label_image(path) -> np.ndarray:
    """Load a single-channel label PNG as int64 HxW."""
    with Image.open(Path(path)) as im:
        if im.mode not in ("L", "P", "I"):
            im = im.convert("L")
        return np.asarray(im, dtype=np.int64)


def write_label_image(path, labels: np.ndarray) -> None:
    labels = np.asarray(labels)
    if labels.ndim != 2:
        raise ValueError(f"expected HxW label map, got shape {labels.shape}")
    if labels.min() < 0 or labels.max() > 255:
        raise ValueError("labels must fit in uint8")
    Image.fromarray(labels.astype(np.uint8), mode="L").save(Path(path))


def image_grid(images: list[np.ndarray], separator: int = 2) -> np.ndarray:
    """Lay out same-sized 3xHxW images in a row with white separators."""
    if not images:
        raise ValueError("empty image list")
    h = images[0].shape[1]
    sep = np.ones((3, h, separator), dtype=np.float32)
    parts = []
    for i, im in enumerate(images):
        if i:
            parts.append(sep)
        parts.append(np.asarray(im, dtype=np.float32))
    return np.concatenate(parts, axis=2)
