"""Score how well a mesh, seen from a calibrated pinhole, covers its mural rectangle.

Image-plane units put the vertical field of view at y in [-1, 1] with +y up
and +x to the right; x uses the same scale, so the aspect ratio is free.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import CompileError
from ..manifest.model import ViewCalibration
from ..polygon import clip_convex_to_rect, convex_hull, signed_area
from .mesh import Mesh

NEAR = 1e-6


def camera_basis(cal: ViewCalibration) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Right, up and forward unit vectors of the calibrated camera."""
    eye = np.asarray(cal.eye, dtype=np.float64)
    fwd = np.asarray(cal.look_at, dtype=np.float64) - eye
    fwd /= np.linalg.norm(fwd)
    world_up = np.array([0.0, 1.0, 0.0])
    right = np.cross(fwd, world_up)
    if np.linalg.norm(right) < 1e-12:
        # looking straight up or down: let -Z play "up" on the image
        right = np.cross(fwd, np.array([0.0, 0.0, -1.0]))
    right /= np.linalg.norm(right)
    up = np.cross(right, fwd)
    return right, up, fwd


def _clip_near(tri: np.ndarray) -> list[np.ndarray]:
    """Polygon part of a camera-space triangle with depth >= NEAR."""
    out = []
    for i in range(3):
        cur, prev = tri[i], tri[i - 1]
        cin, pin = cur[2] >= NEAR, prev[2] >= NEAR
        if cin != pin:
            t = (NEAR - prev[2]) / (cur[2] - prev[2])
            out.append(prev + t * (cur - prev))
        if cin:
            out.append(cur)
    return out


def project_points(mesh: Mesh, cal: ViewCalibration) -> list[tuple[float, float]]:
    """Image-plane points of every triangle, clipped at the near plane."""
    right, up, fwd = camera_basis(cal)
    basis = np.stack([right, up, fwd])
    tris = mesh.triangles_world() - np.asarray(cal.eye, dtype=np.float64)
    cam = tris @ basis.T  # (m, 3, 3) in (right, up, forward)
    focal = 1.0 / math.tan(cal.vertical_fov / 2)
    front = (cam[:, :, 2] >= NEAR).all(axis=1)
    pts = cam[front].reshape(-1, 3)
    for tri in cam[~front]:
        part = _clip_near(tri)
        if part:
            pts = np.vstack([pts, np.array(part)])
    if len(pts) == 0:
        return []
    return list(zip((focal * pts[:, 0] / pts[:, 2]).tolist(), (focal * pts[:, 1] / pts[:, 2]).tolist()))


def projection_match_check(mesh: Mesh, cal: ViewCalibration) -> float:
    """IoU of the projected mesh's convex hull and ``cal.image_rect``.

    Raises BEHIND_CAMERA when no part of the mesh is in front of the eye.
    """
    pts = project_points(mesh, cal)
    if not pts:
        raise CompileError("BEHIND_CAMERA", "the whole mesh is behind the calibrated eye")
    hull = convex_hull(pts)
    if len(hull) < 3:
        return 0.0
    x0, y0, x1, y1 = cal.image_rect
    rect_area = (x1 - x0) * (y1 - y0)
    hull_area = abs(signed_area(hull))
    inter = clip_convex_to_rect(hull, cal.image_rect)
    inter_area = abs(signed_area(inter)) if len(inter) >= 3 else 0.0
    union = hull_area + rect_area - inter_area
    return inter_area / union if union > 0 else 0.0
