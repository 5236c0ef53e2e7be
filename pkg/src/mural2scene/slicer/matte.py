"""Polygon mattes: scanline rasterization, clip extraction and edge feathering.

A pixel belongs to a mask when its center lies inside the polygon. Rows are
filled between sorted edge crossings, pairing them up as [c0, c1), [c2, c3),
... with edges counted half-open in y, which is the even-odd rule evaluated
at pixel centers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from ..errors import CompileError
from ..manifest.model import INCH_M, SliceSpec
from .source import SourceImage

Point = tuple[float, float]


@dataclass(frozen=True, eq=False)
class Clip:
    """An RGBA slice cut from a source, plus the polygon it was cut with.

    ``mask`` is in clip-local pixel coordinates (origin at the clip's top-left).
    """

    slice_id: str
    pixels: np.ndarray  # (h, w, 4) uint8
    origin_px: tuple[int, int]
    mask: tuple[Point, ...]
    dpi: float

    @property
    def size_px(self) -> tuple[int, int]:
        return self.pixels.shape[1], self.pixels.shape[0]

    @property
    def physical_size_m(self) -> tuple[float, float]:
        w, h = self.size_px
        return w / self.dpi * INCH_M, h / self.dpi * INCH_M


def rasterize_mask(poly: Sequence[Point], width: int, height: int,
                   x0: float = 0.0, y0: float = 0.0) -> np.ndarray:
    """Boolean (height, width) coverage of ``poly`` sampled at pixel centers.

    Pixel (i, j) has its center at (x0 + j + 0.5, y0 + i + 0.5).
    """
    out = np.zeros((height, width), dtype=bool)
    if width <= 0 or height <= 0:
        return out
    pts = np.asarray(poly, dtype=np.float64)
    xa, ya = pts[:, 0], pts[:, 1]
    xb, yb = np.roll(xa, -1), np.roll(ya, -1)
    keep = ya != yb
    xa, ya, xb, yb = xa[keep], ya[keep], xb[keep], yb[keep]
    centers_x = x0 + np.arange(width) + 0.5
    lo_row = max(0, math.floor(float(np.min(pts[:, 1])) - y0 - 0.5))
    hi_row = min(height, math.ceil(float(np.max(pts[:, 1])) - y0 + 0.5))
    for i in range(lo_row, hi_row):
        yc = y0 + i + 0.5
        hit = (ya > yc) != (yb > yc)
        if not hit.any():
            continue
        xs = xa[hit] + ((yc - ya[hit]) * (xb[hit] - xa[hit])) / (yb[hit] - ya[hit])
        xs.sort()
        starts = np.searchsorted(centers_x, xs[0::2], side="left")
        ends = np.searchsorted(centers_x, xs[1::2], side="left")
        row = out[i]
        for s, e in zip(starts, ends):
            row[s:e] = True
    return out


def edge_distance(poly: Sequence[Point], width: int, height: int, cap: float) -> np.ndarray:
    """Distance from each pixel center to the polygon outline, clamped to ``cap``.

    Each edge only touches the window of pixels within ``cap`` of it.
    """
    best = np.full((height, width), cap * cap, dtype=np.float64)
    n = len(poly)
    for k in range(n):
        ax, ay = poly[k]
        bx, by = poly[(k + 1) % n]
        c0 = max(0, math.floor(min(ax, bx) - cap - 0.5))
        c1 = min(width, math.ceil(max(ax, bx) + cap + 0.5))
        r0 = max(0, math.floor(min(ay, by) - cap - 0.5))
        r1 = min(height, math.ceil(max(ay, by) + cap + 0.5))
        if c0 >= c1 or r0 >= r1:
            continue
        xs = np.arange(c0, c1) + 0.5
        ys = (np.arange(r0, r1) + 0.5)[:, None]
        dx, dy = bx - ax, by - ay
        seg2 = dx * dx + dy * dy
        if seg2 == 0.0:
            d2 = (xs - ax) ** 2 + (ys - ay) ** 2
        else:
            t = np.clip(((xs - ax) * dx + (ys - ay) * dy) / seg2, 0.0, 1.0)
            d2 = (xs - (ax + t * dx)) ** 2 + (ys - (ay + t * dy)) ** 2
        window = best[r0:r1, c0:c1]
        np.minimum(window, d2, out=window)
    return np.sqrt(best)


def feather_alpha(clip: Clip, radius_px: float) -> Clip:
    """Ramp alpha from 0 at the outline to 255 at ``radius_px`` inside it.

    alpha = round_half_up(255 * min(d / r, 1)) on covered pixels, 0 elsewhere,
    with d the exact distance from the pixel center to the polygon outline.
    Radius 0 returns the clip unchanged.
    """
    if radius_px < 0:
        raise ValueError("radius_px must be >= 0")
    if radius_px == 0:
        return clip
    w, h = clip.size_px
    inside = rasterize_mask(clip.mask, w, h)
    d = edge_distance(clip.mask, w, h, float(radius_px))
    ramp = np.floor(255.0 * np.minimum(d / radius_px, 1.0) + 0.5).astype(np.uint8)
    pixels = clip.pixels.copy()
    pixels[:, :, 3] = np.where(inside, ramp, 0)
    return replace(clip, pixels=pixels)


def extract_clip(source: SourceImage, spec: SliceSpec, feather_px: float = 0) -> Clip:
    """Cut ``spec.mask`` out of ``source`` as an RGBA clip over the mask's bounding box.

    RGB is copied verbatim; alpha is 255 on covered pixels and 0 elsewhere,
    then feathered when ``feather_px`` > 0.
    """
    s = source.mask_scale
    poly = [(x * s, y * s) for x, y in spec.mask]
    img_w, img_h = source.size
    xs = [p[0] for p in poly]
    ys = [p[1] for p in poly]
    x0 = max(0, math.floor(min(xs)))
    y0 = max(0, math.floor(min(ys)))
    x1 = min(img_w, math.ceil(max(xs)))
    y1 = min(img_h, math.ceil(max(ys)))
    local = tuple((x - x0, y - y0) for x, y in poly)
    inside = rasterize_mask(local, x1 - x0, y1 - y0)
    if not inside.any():
        raise CompileError("DEGENERATE_MASK", f"mask of slice {spec.slice_id!r} covers no pixel center")
    pixels = np.zeros((y1 - y0, x1 - x0, 4), dtype=np.uint8)
    pixels[:, :, :3] = source.pixels[y0:y1, x0:x1, :3]
    pixels[:, :, 3] = np.where(inside, 255, 0).astype(np.uint8)
    clip = Clip(spec.slice_id, pixels, (x0, y0), local, source.dpi)
    return feather_alpha(clip, feather_px) if feather_px else clip
