"""Cross transfer: two copies of a clip crossing at right angles on a vertical axis."""

from __future__ import annotations

import math

import numpy as np

from ..slicer.matte import Clip
from ..values import Placement
from .billboard import sprite_size
from .mesh import FULL_RECT, MaterialRef, Mesh, Primitive


def make_cross(clip: Clip, placement: Placement, uv_rect=FULL_RECT) -> Mesh:
    """Static, double-sided "+" of two quads: one in the XY plane, one in the ZY plane."""
    w, h = sprite_size(clip, placement)
    a = w / 2
    positions = np.array([
        (-a, 0, 0), (a, 0, 0), (a, h, 0), (-a, h, 0),
        (0, 0, a), (0, 0, -a), (0, h, -a), (0, h, a),
    ], dtype=np.float64)
    uvs = np.array([(0, 1), (1, 1), (1, 0), (0, 0)] * 2, dtype=np.float64)
    tris = np.array([[0, 1, 2], [0, 2, 3], [4, 5, 6], [4, 6, 7]], dtype=np.int64)
    prim = Primitive(clip.slice_id, positions, uvs, tris,
                     MaterialRef(double_sided=True, alpha_blend=True))
    if uv_rect != FULL_RECT:
        prim = prim.in_atlas(uv_rect)
    return Mesh((prim,))


def silhouette_width(width: float, theta: float) -> float:
    """Horizontal extent of a cross of quad width ``width`` seen from azimuth ``theta``."""
    return width * max(abs(math.cos(theta)), abs(math.sin(theta)))
