"""Face-to-eye sprites: an upright quad plus the orientation rule a runtime applies.

The compiler cannot see the runtime camera, so the quad is emitted facing
+Z with a ``BillboardFlag``; ``billboard_yaw`` is the reference math any
runtime honoring the flag must reproduce.
"""

from __future__ import annotations

import math
from typing import Sequence

from ..errors import CompileError
from ..manifest.model import AxisLock, DynamicEffect
from ..slicer.matte import Clip
from ..values import Placement
from .mesh import FULL_RECT, BillboardFlag, MaterialRef, Mesh, quad

DEFAULT_EPS = 1e-9


def sprite_size(clip: Clip, placement: Placement) -> tuple[float, float]:
    w, h = clip.physical_size_m
    if not (w > 0 and h > 0):
        raise CompileError("DEGENERATE_MASK", f"clip {clip.slice_id!r} has no physical size")
    return w * placement.scale, h * placement.scale


def make_billboard_quad(clip: Clip, placement: Placement, axis_lock: AxisLock,
                        effects: Sequence[DynamicEffect] = (),
                        uv_rect=FULL_RECT) -> Mesh:
    """Quad of the clip's world size, bottom-center at the local origin, facing +Z.

    ``placement`` position and yaw belong to the scene node; its scale is
    baked into the corners here.
    """
    w, h = sprite_size(clip, placement)
    corners = [(-w / 2, 0.0, 0.0), (w / 2, 0.0, 0.0), (w / 2, h, 0.0), (-w / 2, h, 0.0)]
    uvs = [(0.0, 1.0), (1.0, 1.0), (1.0, 0.0), (0.0, 0.0)]
    prim = quad(corners, uvs, clip.slice_id, MaterialRef(double_sided=False, alpha_blend=True))
    if uv_rect != FULL_RECT:
        prim = prim.in_atlas(uv_rect)
    return Mesh((prim,), BillboardFlag(axis_lock), tuple(effects))


def billboard_yaw(sprite_pos, camera_pos, eps: float = DEFAULT_EPS) -> float:
    """Yaw about +Y that turns the quad's +Z normal toward the camera's horizontal projection."""
    dx = camera_pos[0] - sprite_pos[0]
    dz = camera_pos[2] - sprite_pos[2]
    if math.hypot(dx, dz) <= eps:
        raise CompileError("DEGENERATE_VIEW", "camera is directly above or below the sprite")
    return math.atan2(dx, dz)


def billboard_orientation(sprite_pos, camera_pos, axis_lock: AxisLock,
                          eps: float = DEFAULT_EPS) -> tuple[float, float]:
    """(yaw, pitch) for a sprite; pitch is 0 under a Cylindrical lock.

    A Spherical sprite also tilts by pitch = atan2(dy, horizontal distance)
    about its local +X axis, so its normal points straight at the camera.
    Directly overhead it keeps yaw 0 and pitches a quarter turn.
    """
    if axis_lock is AxisLock.CYLINDRICAL:
        return billboard_yaw(sprite_pos, camera_pos, eps), 0.0
    dx = camera_pos[0] - sprite_pos[0]
    dy = camera_pos[1] - sprite_pos[1]
    dz = camera_pos[2] - sprite_pos[2]
    horiz = math.hypot(dx, dz)
    if horiz <= eps:
        if abs(dy) <= eps:
            raise CompileError("DEGENERATE_VIEW", "camera coincides with the sprite")
        return 0.0, math.copysign(math.pi / 2, dy)
    return math.atan2(dx, dz), math.atan2(dy, horiz)
