"""Triangle meshes in a node-local frame (meters, +Y up).

A mesh is a list of primitives, one per texture (slice) and material, so
that an architecture can carry its wall and roof textures side by side.
UVs are clip-local in [0, 1]² with v pointing down; ``Primitive.in_atlas``
maps them onto an atlas entry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from ..manifest.model import AxisLock, DynamicEffect

FULL_RECT = (0.0, 0.0, 1.0, 1.0)


@dataclass(frozen=True)
class MaterialRef:
    double_sided: bool = False
    alpha_blend: bool = False


@dataclass(frozen=True)
class BillboardFlag:
    axis_lock: AxisLock


@dataclass(frozen=True, eq=False)
class Primitive:
    slice_id: str
    positions: np.ndarray  # (n, 3) float64
    uvs: np.ndarray  # (n, 2) float64
    triangles: np.ndarray  # (m, 3) int64
    material: MaterialRef = MaterialRef()

    def in_atlas(self, rect: tuple[float, float, float, float]) -> Primitive:
        u0, v0, u1, v1 = rect
        uv = np.column_stack([u0 + self.uvs[:, 0] * (u1 - u0), v0 + self.uvs[:, 1] * (v1 - v0)])
        return replace(self, uvs=uv)


@dataclass(frozen=True, eq=False)
class Mesh:
    primitives: tuple[Primitive, ...]
    billboard: BillboardFlag | None = None
    animation: tuple[DynamicEffect, ...] = ()

    @property
    def positions(self) -> np.ndarray:
        return np.concatenate([p.positions for p in self.primitives])

    @property
    def triangle_count(self) -> int:
        return sum(len(p.triangles) for p in self.primitives)

    def triangles_world(self) -> np.ndarray:
        """(m, 3, 3) corner positions of every triangle."""
        return np.concatenate([p.positions[p.triangles] for p in self.primitives])

    def aabb(self) -> tuple[np.ndarray, np.ndarray]:
        pos = self.positions
        return pos.min(axis=0), pos.max(axis=0)

    def problems(self) -> list[str]:
        out = []
        if self.triangle_count < 1:
            out.append("mesh has no triangles")
        for k, p in enumerate(self.primitives):
            n = len(p.positions)
            if len(p.uvs) != n:
                out.append(f"primitive {k}: {len(p.uvs)} uvs for {n} vertices")
            if len(p.triangles) and (p.triangles.min() < 0 or p.triangles.max() >= n):
                out.append(f"primitive {k}: triangle index out of range")
            if len(p.uvs) and (p.uvs.min() < 0.0 or p.uvs.max() > 1.0):
                out.append(f"primitive {k}: uv outside [0, 1]")
            if not np.isfinite(p.positions).all():
                out.append(f"primitive {k}: non-finite position")
        return out


def rotate_y(points: np.ndarray, yaw: float) -> np.ndarray:
    """Rotate (n, 3) points by ``yaw`` about +Y; +Z goes to (sin yaw, 0, cos yaw)."""
    c, s = math.cos(yaw), math.sin(yaw)
    x, y, z = points[:, 0], points[:, 1], points[:, 2]
    return np.column_stack([c * x + s * z, y, -s * x + c * z])


def quad(corners: list, uvs: list, slice_id: str, material: MaterialRef) -> Primitive:
    """Two triangles over four corners given counter-clockwise from the front."""
    return Primitive(slice_id, np.asarray(corners, dtype=np.float64),
                     np.asarray(uvs, dtype=np.float64),
                     np.array([[0, 1, 2], [0, 2, 3]], dtype=np.int64), material)


def merge(prims: list[Primitive]) -> Primitive:
    """Concatenate primitives that share a slice and material."""
    first = prims[0]
    offsets = np.cumsum([0] + [len(p.positions) for p in prims[:-1]])
    return Primitive(
        first.slice_id,
        np.concatenate([p.positions for p in prims]),
        np.concatenate([p.uvs for p in prims]),
        np.concatenate([p.triangles + o for p, o in zip(prims, offsets)]),
        first.material,
    )
