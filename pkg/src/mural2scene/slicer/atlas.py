"""Greedy shelf packing of clips into RGBA texture atlases."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..errors import CompileError
from .matte import Clip

DEFAULT_MAX_SIDE = 4096
DEFAULT_PADDING = 2

UVRect = tuple[float, float, float, float]  # (u0, v0, u1, v1), v down from the top edge


@dataclass
class _Shelf:
    y: int
    height: int
    x: int = 0


@dataclass
class _Bin:
    shelves: list[_Shelf] = field(default_factory=list)
    placed: list[tuple[Clip, int, int]] = field(default_factory=list)  # clip, padded x, padded y

    @property
    def used_height(self) -> int:
        return self.shelves[-1].y + self.shelves[-1].height if self.shelves else 0


@dataclass(frozen=True, eq=False)
class Atlas:
    atlas_id: int
    pixels: np.ndarray  # (H, W, 4) uint8
    entries: dict[str, UVRect]
    rects_px: dict[str, tuple[int, int, int, int]]  # slice_id -> (x, y, w, h), unpadded
    padding_px: int

    @property
    def size(self) -> tuple[int, int]:
        return self.pixels.shape[1], self.pixels.shape[0]


def _place(b: _Bin, pw: int, ph: int, max_side: int) -> tuple[int, int] | None:
    for shelf in b.shelves:
        if ph <= shelf.height and shelf.x + pw <= max_side:
            x = shelf.x
            shelf.x += pw
            return x, shelf.y
    if b.used_height + ph <= max_side:
        shelf = _Shelf(b.used_height, ph, pw)
        b.shelves.append(shelf)
        return 0, shelf.y
    return None


def pack_atlas(clips: Sequence[Clip], max_side_px: int = DEFAULT_MAX_SIDE,
               padding_px: int = DEFAULT_PADDING) -> list[Atlas]:
    """Pack ``clips`` into as few atlases as the greedy shelf rule manages.

    Clips go tallest first (ties by slice id, so input order never matters)
    into the first open atlas with room. Each clip is surrounded by
    ``padding_px`` of its own edge texels so filtering never bleeds in a
    neighbor. Atlases are cropped to the occupied area.
    """
    p = padding_px
    order = sorted(clips, key=lambda c: (-c.size_px[1], c.slice_id))
    bins: list[_Bin] = []
    for clip in order:
        w, h = clip.size_px
        pw, ph = w + 2 * p, h + 2 * p
        if pw > max_side_px or ph > max_side_px:
            raise CompileError("CLIP_TOO_LARGE", f"clip {clip.slice_id!r} is {w}x{h} px; with "
                               f"padding it exceeds the {max_side_px} px atlas side")
        for b in bins:
            spot = _place(b, pw, ph, max_side_px)
            if spot is not None:
                break
        else:
            bins.append(_Bin())
            b = bins[-1]
            spot = _place(b, pw, ph, max_side_px)
        b.placed.append((clip, *spot))

    atlases = []
    for idx, b in enumerate(bins):
        width = max(x + c.size_px[0] + 2 * p for c, x, _ in b.placed)
        height = max(y + c.size_px[1] + 2 * p for c, _, y in b.placed)
        canvas = np.zeros((height, width, 4), dtype=np.uint8)
        entries: dict[str, UVRect] = {}
        rects: dict[str, tuple[int, int, int, int]] = {}
        for clip, x, y in b.placed:
            w, h = clip.size_px
            padded = np.pad(clip.pixels, ((p, p), (p, p), (0, 0)), mode="edge") if p else clip.pixels
            canvas[y:y + h + 2 * p, x:x + w + 2 * p] = padded
            rects[clip.slice_id] = (x + p, y + p, w, h)
            entries[clip.slice_id] = ((x + p) / width, (y + p) / height,
                                      (x + p + w) / width, (y + p + h) / height)
        atlases.append(Atlas(idx, canvas, entries, rects, p))
    return atlases
