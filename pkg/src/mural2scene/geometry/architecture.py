"""Architecture transfer: stacked wall prisms under truncated-pyramid roofs.

The footprint is centered on the local origin, x across the width and z
across the depth. Each storey is four wall faces; a roof adds an eave
underside (when it overhangs) and four slopes rising from the overhang
outline to the footprint outline ``rise_m`` higher. The next storey stands
on top of that. Only the topmost storey is capped, and the ground face is
left open.
"""

from __future__ import annotations

from typing import Mapping

from ..errors import CompileError
from ..manifest.model import ArchitectureSpec
from .mesh import MaterialRef, Mesh, Primitive, merge, quad

OPAQUE = MaterialRef(double_sided=False, alpha_blend=False)


def _ring(half_w: float, half_d: float) -> list[tuple[float, float]]:
    # front (+z), right (+x), back (-z), left (-x) sides are consecutive pairs
    return [(-half_w, half_d), (half_w, half_d), (half_w, -half_d), (-half_w, -half_d)]


def _walls(a: float, b: float, y0: float, y1: float, slice_id: str) -> list[Primitive]:
    ring = _ring(a, b)
    out = []
    for k in range(4):
        (x0, z0), (x1, z1) = ring[k], ring[(k + 1) % 4]
        out.append(quad([(x0, y0, z0), (x1, y0, z1), (x1, y1, z1), (x0, y1, z0)],
                        [(0, 1), (1, 1), (1, 0), (0, 0)], slice_id, OPAQUE))
    return out


def _roof(a: float, b: float, y0: float, overhang: float, rise: float,
          slice_id: str) -> list[Primitive]:
    inner, outer = _ring(a, b), _ring(a + overhang, b + overhang)
    y1 = y0 + rise
    out = []
    for k in range(4):
        k1 = (k + 1) % 4
        side = 2 * (a if k % 2 == 0 else b)
        t0 = overhang / (side + 2 * overhang)
        t1 = 1.0 - t0
        (px0, pz0), (px1, pz1) = inner[k], inner[k1]
        (qx0, qz0), (qx1, qz1) = outer[k], outer[k1]
        if overhang > 0:
            # underside of the eave, facing down
            out.append(quad([(px0, y0, pz0), (px1, y0, pz1), (qx1, y0, qz1), (qx0, y0, qz0)],
                            [(t0, 0), (t1, 0), (1, 1), (0, 1)], slice_id, OPAQUE))
        if rise > 0:
            out.append(quad([(qx0, y0, qz0), (qx1, y0, qz1), (px1, y1, pz1), (px0, y1, pz0)],
                            [(0, 1), (1, 1), (t1, 0), (t0, 0)], slice_id, OPAQUE))
    return out


def _cap(a: float, b: float, y: float, slice_id: str) -> Primitive:
    ring = _ring(a, b)
    return quad([(x, y, z) for x, z in ring],
                [((x + a) / (2 * a), (z + b) / (2 * b)) for x, z in ring], slice_id, OPAQUE)


def make_architecture(spec: ArchitectureSpec, clips: Mapping[str, object] | None = None,
                      uv_rects: Mapping[str, tuple] | None = None) -> Mesh:
    """Mesh for ``spec`` in its local frame, one primitive per texture slice.

    When ``clips`` is given every referenced slice must be in it. Each face
    shows its whole clip; ``uv_rects`` maps those UVs into atlas entries.
    """
    needed = []
    for st in spec.storeys:
        needed.append(st.wall_slice_id)
        if st.roof:
            needed.append(st.roof.roof_slice_id)
    if clips is not None:
        for sid in needed:
            if sid not in clips:
                raise CompileError("UNRESOLVED_SOURCE",
                                   f"architecture {spec.arch_id!r} needs missing slice {sid!r}")

    a, b = spec.width_m / 2, spec.depth_m / 2
    faces: list[Primitive] = []
    base = 0.0
    for st in spec.storeys:
        top = base + st.height_m
        faces += _walls(a, b, base, top, st.wall_slice_id)
        if st.roof:
            faces += _roof(a, b, top, st.roof.overhang_m, st.roof.rise_m, st.roof.roof_slice_id)
            top += st.roof.rise_m
        base = top
    last = spec.storeys[-1]
    faces.append(_cap(a, b, base, last.roof.roof_slice_id if last.roof else last.wall_slice_id))

    groups: dict[str, list[Primitive]] = {}
    for f in faces:
        groups.setdefault(f.slice_id, []).append(f)
    prims = []
    for sid, group in groups.items():
        p = merge(group)
        if uv_rects and sid in uv_rects:
            p = p.in_atlas(uv_rects[sid])
        prims.append(p)
    return Mesh(tuple(prims))
