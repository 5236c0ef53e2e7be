"""Cube-map sky synthesis from a gradient, a ground color and tiled mountain clips.

Faces follow the OpenGL cube-map convention (row 0 at the top of each side
face). The four side faces are cut from one cylindrical strip in the order
+Z, +X, -Z, -X. Neighboring faces share their edge texel column, so the strip
period is 4 * (F - 1) columns, and that is what keeps the side seams exact.
+Y is filled with the top sky color and -Y with the ground color, which
equal the side faces' first and last rows.
"""

from __future__ import annotations

import math
from typing import Mapping

import numpy as np
from PIL import Image

from ..errors import CompileError
from ..manifest.model import SkyboxSpec
from ..slicer.matte import Clip

FACE_NAMES = ("px", "nx", "py", "ny", "pz", "nz")
SIDE_ORDER = ("pz", "px", "nz", "nx")
# horizontal cross layout: (column, row) of each face in a 4 x 3 sheet
CROSS_LAYOUT = {"py": (1, 0), "nx": (0, 1), "pz": (1, 1), "px": (2, 1), "nz": (3, 1), "ny": (1, 2)}
OVERLAP = (0.6, 0.9)  # advance per mountain, as a fraction of its width


def _lerp_rows(top, bottom, n: int) -> np.ndarray:
    """(n, 3) rows going from ``top`` to ``bottom`` inclusive, rounded half up."""
    t = np.arange(n, dtype=np.float64)[:, None] / max(n - 1, 1)
    a = np.asarray(top, dtype=np.float64)
    b = np.asarray(bottom, dtype=np.float64)
    return np.floor(a + (b - a) * t + 0.5).astype(np.uint8)


def sky_column(spec: SkyboxSpec) -> np.ndarray:
    """(F, 3) colors of one side-face column before the mountain band."""
    f = spec.face_size_px
    half = f // 2
    col = np.empty((f, 3), dtype=np.uint8)
    col[:half] = _lerp_rows(spec.sky_top, spec.sky_horizon, half)
    col[half:] = spec.ground_color
    return col


def _over(dst: np.ndarray, src: np.ndarray) -> None:
    """Alpha-composite RGBA ``src`` onto RGB ``dst`` in place, integer arithmetic."""
    a = src[:, :, 3:4].astype(np.uint32)
    blended = (src[:, :, :3].astype(np.uint32) * a + dst.astype(np.uint32) * (255 - a) + 127) // 255
    dst[:] = blended.astype(np.uint8)


def horizon_strip(spec: SkyboxSpec, clips: Mapping[str, Clip]) -> np.ndarray:
    """(F, 4 * (F - 1), 3) cylindrical strip: gradient, ground and the mountain band.

    Mountains stand on the horizon (the last sky row). Each one is a horizon
    clip, cycled in order, scaled to the band height times a seeded jitter,
    then the cursor advances by a seeded fraction of its width so that
    neighbors overlap. Pasting wraps around the strip.
    """
    f = spec.face_size_px
    period = 4 * (f - 1)
    strip = np.repeat(sky_column(spec)[:, None, :], period, axis=1)
    if spec.band_height_frac <= 0:
        return strip
    if not spec.horizon_slices:
        raise CompileError("MISSING_HORIZON", "band_height_frac > 0 needs horizon_slices")
    missing = [s for s in spec.horizon_slices if s not in clips]
    if missing:
        raise CompileError("UNRESOLVED_SOURCE", f"skybox needs missing slice {missing[0]!r}")

    horizon_row = f // 2 - 1
    band = spec.band_height_frac * (f // 2)
    # the top row must stay the pure top color so the +Y seam is exact
    max_h = horizon_row
    rng = np.random.default_rng(spec.rhythm_seed)
    lo, hi = spec.scale_jitter
    x = 0.0
    i = 0
    while x < period:
        clip = clips[spec.horizon_slices[i % len(spec.horizon_slices)]]
        i += 1
        scale = rng.uniform(lo, hi)
        advance = rng.uniform(*OVERLAP)
        cw, ch = clip.size_px
        h = int(min(max_h, max(1, round(band * scale))))
        w = int(max(1, min(period, round(cw * h / ch))))
        sprite = np.asarray(Image.fromarray(clip.pixels).resize((w, h), Image.Resampling.BILINEAR))
        top = horizon_row + 1 - h
        cols = (int(round(x)) + np.arange(w)) % period
        region = strip[top:horizon_row + 1][:, cols]
        _over(region, sprite)
        strip[top:horizon_row + 1, cols] = region
        x += max(1.0, advance * w)
    return strip


def make_skybox(spec: SkyboxSpec, clips: Mapping[str, Clip] | None = None) -> dict[str, np.ndarray]:
    """Six (F, F, 4) opaque RGBA faces keyed px, nx, py, ny, pz, nz."""
    f = spec.face_size_px
    strip = horizon_strip(spec, clips or {})
    faces: dict[str, np.ndarray] = {}
    for k, name in enumerate(SIDE_ORDER):
        faces[name] = np.take(strip, k * (f - 1) + np.arange(f), axis=1, mode="wrap")
    faces["py"] = np.broadcast_to(np.asarray(spec.sky_top, np.uint8), (f, f, 3))
    faces["ny"] = np.broadcast_to(np.asarray(spec.ground_color, np.uint8), (f, f, 3))
    return {n: _rgba(faces[n]) for n in FACE_NAMES}


def _rgba(rgb: np.ndarray) -> np.ndarray:
    out = np.full(rgb.shape[:2] + (4,), 255, dtype=np.uint8)
    out[:, :, :3] = rgb
    return out


def contact_sheet(faces: Mapping[str, np.ndarray]) -> np.ndarray:
    """All six faces in a 4 x 3 horizontal cross; unused cells are transparent."""
    f = faces["px"].shape[0]
    sheet = np.zeros((3 * f, 4 * f, 4), dtype=np.uint8)
    for name, (c, r) in CROSS_LAYOUT.items():
        sheet[r * f:(r + 1) * f, c * f:(c + 1) * f] = faces[name]
    return sheet


# -- cube-map geometry ---------------------------------------------------------

# OpenGL face selection: face -> (major axis, sc axis/sign, tc axis/sign)
_GL_FACES = {
    "px": ((0, 1), (2, -1), (1, -1)),
    "nx": ((0, -1), (2, 1), (1, -1)),
    "py": ((1, 1), (0, 1), (2, 1)),
    "ny": ((1, -1), (0, 1), (2, -1)),
    "pz": ((2, 1), (0, 1), (1, -1)),
    "nz": ((2, -1), (0, -1), (1, -1)),
}


def face_direction(face: str, s: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Unit directions for face coordinates s, t in [0, 1] (t = 0 is the top row)."""
    (ma, ms), (sa, ss), (ta, ts) = _GL_FACES[face]
    sc, tc = 2 * s - 1, 2 * t - 1
    d = np.zeros(np.broadcast(s, t).shape + (3,))
    d[..., ma] = ms
    d[..., sa] = sc * ss
    d[..., ta] = tc * ts
    return d / np.linalg.norm(d, axis=-1, keepdims=True)


def panorama_to_cubemap(pano: np.ndarray, face_size: int) -> dict[str, np.ndarray]:
    """Resample an equirectangular RGB(A) panorama onto six cube faces (bilinear)."""
    ph, pw = pano.shape[:2]
    src = pano[:, :, :3].astype(np.float64)
    centers = (np.arange(face_size) + 0.5) / face_size
    s, t = np.meshgrid(centers, centers)
    out = {}
    for name in FACE_NAMES:
        d = face_direction(name, s, t)
        lon = np.arctan2(d[..., 0], -d[..., 2])  # 0 at -Z, the forward direction
        lat = np.arcsin(np.clip(d[..., 1], -1, 1))
        u = (lon / (2 * math.pi) + 0.5) * pw - 0.5
        v = (0.5 - lat / math.pi) * ph - 0.5
        u0 = np.floor(u).astype(int)
        vf = np.floor(v).astype(int)
        v0 = np.clip(vf, 0, ph - 1)  # clamp each tap, not the pair, at the poles
        v1 = np.clip(vf + 1, 0, ph - 1)
        fu = (u - u0)[..., None]
        fv = np.clip(v - np.floor(v), 0, 1)[..., None]
        ua, ub = u0 % pw, (u0 + 1) % pw
        top = src[v0, ua] * (1 - fu) + src[v0, ub] * fu
        bot = src[v1, ua] * (1 - fu) + src[v1, ub] * fu
        rgb = np.floor(top * (1 - fv) + bot * fv + 0.5).clip(0, 255).astype(np.uint8)
        out[name] = _rgba(rgb)
    return out


def seam_pairs(face_size: int) -> list[tuple[str, np.ndarray, str, np.ndarray]]:
    """Texel index arrays along each of the 12 shared cube edges, paired up.

    For every face edge, the direction at each edge texel's outer boundary
    point is matched to the neighboring face whose edge contains the same
    direction. Returns (face_a, (rows, cols), face_b, (rows, cols)).
    """
    f = face_size
    idx = np.arange(f)
    mid = (idx + 0.5) / f
    edges = {}
    for name in FACE_NAMES:
        for side, (rows, cols, s, t) in {
            "top": (np.zeros(f, int), idx, mid, np.zeros(f)),
            "bottom": (np.full(f, f - 1), idx, mid, np.ones(f)),
            "left": (idx, np.zeros(f, int), np.zeros(f), mid),
            "right": (idx, np.full(f, f - 1), np.ones(f), mid),
        }.items():
            edges[(name, side)] = (rows, cols, face_direction(name, s, t))
    pairs = []
    keys = list(edges)
    used = set()
    for i, ka in enumerate(keys):
        if ka in used:
            continue
        ra, ca, da = edges[ka]
        for kb in keys[i + 1:]:
            if kb in used or kb[0] == ka[0]:
                continue
            rb, cb, db = edges[kb]
            # same directions, possibly in reverse order along the edge
            for order in (slice(None), slice(None, None, -1)):
                if np.allclose(da, db[order], atol=1e-9):
                    pairs.append((ka[0], (ra, ca), kb[0], (rb[order], cb[order])))
                    used.update((ka, kb))
                    break
            if ka in used:
                break
    return pairs


def max_seam_difference(faces: Mapping[str, np.ndarray]) -> int:
    """Largest per-channel difference between edge texels across any cube edge."""
    f = faces["px"].shape[0]
    worst = 0
    for fa, (ra, ca), fb, (rb, cb) in seam_pairs(f):
        a = faces[fa][ra, ca, :3].astype(int)
        b = faces[fb][rb, cb, :3].astype(int)
        worst = max(worst, int(np.abs(a - b).max()))
    return worst
