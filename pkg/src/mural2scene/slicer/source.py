"""Mural source images: loading, integer downsampling and PNG output."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from ..errors import CompileError
from ..manifest.model import MuralSource

# the fixture crop is ~65 Mpx; keep PIL's bomb guard but above that
Image.MAX_IMAGE_PIXELS = 200_000_000

_ROW_CHUNK = 256


@dataclass(frozen=True, eq=False)
class SourceImage:
    """A decoded source at working resolution.

    ``mask_scale`` maps manifest mask coordinates (full-resolution pixels)
    onto this raster; ``dpi`` is the effective dpi after downsampling.
    """

    source_id: str
    pixels: np.ndarray  # (h, w, 3) uint8
    dpi: float
    mask_scale: float = 1.0
    original_size: tuple[int, int] = (0, 0)

    @property
    def size(self) -> tuple[int, int]:
        return self.pixels.shape[1], self.pixels.shape[0]


def downsample(pixels: np.ndarray, factor: int) -> np.ndarray:
    """Box-filter ``pixels`` by an integer factor.

    Each output pixel is the mean of a ``factor`` x ``factor`` block, rounded
    half up (a 0/255 checkerboard at factor 2 gives 128). Trailing rows and
    columns that do not fill a block are dropped, so sizes are floored.
    """
    if factor < 1:
        raise ValueError("factor must be >= 1")
    if factor == 1:
        return pixels
    h, w = pixels.shape[0] // factor, pixels.shape[1] // factor
    squeeze = pixels.ndim == 2
    src = pixels[:, :, None] if squeeze else pixels
    c = src.shape[2]
    n = factor * factor
    out = np.empty((h, w, c), dtype=np.uint8)
    for r0 in range(0, h, _ROW_CHUNK):
        r1 = min(h, r0 + _ROW_CHUNK)
        block = src[r0 * factor:r1 * factor, :w * factor].reshape(r1 - r0, factor, w, factor, c)
        total = block.sum(axis=(1, 3), dtype=np.uint32)
        out[r0:r1] = (total + n // 2) // n
    return out[:, :, 0] if squeeze else out


def load_source(src: MuralSource, base_dir: str | Path = ".", factor: int = 1) -> SourceImage:
    path = Path(base_dir) / src.image
    try:
        with Image.open(path) as im:
            im.load()
            rgb = np.asarray(im.convert("RGB"))
    except (OSError, Image.DecompressionBombError) as exc:
        raise CompileError("IO_ERROR", f"cannot read {path}: {exc}") from exc
    full = (rgb.shape[1], rgb.shape[0])
    return SourceImage(src.source_id, downsample(rgb, factor), src.dpi / factor, 1.0 / factor, full)


def write_png(path: str | Path, pixels: np.ndarray) -> None:
    """8-bit non-interlaced PNG; identical pixels give identical bytes."""
    arr = np.ascontiguousarray(pixels, dtype=np.uint8)
    if arr.ndim == 3 and arr.shape[2] == 1:
        arr = arr[:, :, 0]
    Image.fromarray(arr).save(path, format="PNG", compress_level=6)
