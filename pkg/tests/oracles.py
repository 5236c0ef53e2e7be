"""Independent reference computations the tests compare the package against.

Nothing here imports mural2scene's geometry or slicer code; each oracle
solves the same problem a different way (per-pixel parity instead of
scanline spans, direction lookup instead of edge tables, grid sampling
instead of polygon clipping).
"""

from __future__ import annotations

import math

import numpy as np
from scipy.spatial import ConvexHull
from shapely.geometry import Point, Polygon

# -- point in polygon ---------------------------------------------------------

QUANT = 8  # test polygons use vertices on a 1/8 px grid


def inside_mask(poly, width: int, height: int) -> np.ndarray:
    """Pixel-center parity test done in exact integer arithmetic.

    Coordinates are scaled by 2*QUANT so vertices (multiples of 1/QUANT)
    and centers (k + 1/2) are all integers. A center counts a crossing when
    the edge straddles its row half-open (ya > yc) != (yb > yc) and the
    crossing lies at or left of it; odd parity is inside.
    """
    s = 2 * QUANT
    if any((x * QUANT) % 1 or (y * QUANT) % 1 for x, y in poly):
        raise ValueError(f"oracle needs vertices on the 1/{QUANT} px grid")
    v = np.array([(round(x * s), round(y * s)) for x, y in poly], dtype=np.int64)
    xc = (np.arange(width, dtype=np.int64) * s + QUANT)[None, :]
    yc = (np.arange(height, dtype=np.int64) * s + QUANT)[:, None]
    parity = np.zeros((height, width), dtype=bool)
    for k in range(len(v)):
        xa, ya = v[k]
        xb, yb = v[(k + 1) % len(v)]
        straddle = (ya > yc) != (yb > yc)
        # crossing x <= xc  <=>  (xc - xa)(yb - ya) >= (yc - ya)(xb - xa) when yb > ya
        lhs = (xc - xa) * (yb - ya)
        rhs = (yc - ya) * (xb - xa)
        left = lhs >= rhs if yb > ya else lhs <= rhs
        parity ^= straddle & left
    return parity


def random_star_polygon(rng: np.random.Generator, size: int, n_min: int = 3, n_max: int = 14):
    """Simple polygon: vertices at sorted distinct angles around an interior center.

    Vertices are quantized to 1/QUANT px inside [0, size]^2. Returns None
    when quantization collapsed it (the caller draws again).
    """
    n = int(rng.integers(n_min, n_max + 1))
    cx, cy = rng.uniform(0.3 * size, 0.7 * size, 2)
    angles = np.sort(rng.uniform(0, 2 * math.pi, n))
    if len(np.unique(np.round(angles, 3))) < n:
        return None
    radii = rng.uniform(0.1 * size, 0.5 * size, n)
    pts = []
    for a, r in zip(angles, radii):
        x = min(max(cx + r * math.cos(a), 0.0), float(size))
        y = min(max(cy + r * math.sin(a), 0.0), float(size))
        pts.append((round(x * QUANT) / QUANT, round(y * QUANT) / QUANT))
    poly = Polygon(pts)
    if not poly.is_valid or poly.area < 1.0 or len(set(pts)) < n:
        return None
    return pts


def outline_distance(poly, width: int, height: int) -> np.ndarray:
    """Distance from each pixel center to the polygon outline (shapely)."""
    ring = Polygon(poly).exterior
    out = np.empty((height, width))
    for i in range(height):
        for j in range(width):
            out[i, j] = ring.distance(Point(j + 0.5, i + 0.5))
    return out


# -- projection IoU -----------------------------------------------------------

def pinhole(points: np.ndarray, eye, look_at, vertical_fov: float) -> np.ndarray:
    """Project world points to the image plane (y in [-1, 1] spans the vertical FOV)."""
    eye = np.asarray(eye, float)
    z = np.asarray(look_at, float) - eye
    z /= np.linalg.norm(z)
    x = np.array([-z[2], 0.0, z[0]])  # forward x world-up, for a non-vertical view
    x /= np.linalg.norm(x)
    y = np.cross(x, z)
    rel = np.asarray(points, float) - eye
    depth = rel @ z
    assert (depth > 0).all(), "oracle expects every vertex in front of the camera"
    f = 1.0 / math.tan(vertical_fov / 2)
    return np.stack([f * (rel @ x) / depth, f * (rel @ y) / depth], axis=1)


def raster_hull_iou(points2d: np.ndarray, rect, n: int = 2048) -> float:
    """IoU of the convex hull of ``points2d`` and ``rect`` by sampling an n x n grid."""
    hull = ConvexHull(points2d)
    x0, y0, x1, y1 = rect
    lo = np.minimum(points2d.min(axis=0), (x0, y0))
    hi = np.maximum(points2d.max(axis=0), (x1, y1))
    gx = lo[0] + (np.arange(n) + 0.5) * (hi[0] - lo[0]) / n
    gy = lo[1] + (np.arange(n) + 0.5) * (hi[1] - lo[1]) / n
    inter = union = 0
    for row in np.array_split(np.arange(n), 16):
        X, Y = np.meshgrid(gx, gy[row])
        in_hull = np.ones(X.shape, dtype=bool)
        for a, b, c in hull.equations:
            in_hull &= a * X + b * Y + c <= 0
        in_rect = (X >= x0) & (X <= x1) & (Y >= y0) & (Y <= y1)
        inter += int((in_hull & in_rect).sum())
        union += int((in_hull | in_rect).sum())
    return inter / union


# -- cube seams ---------------------------------------------------------------

# direction -> (face, s, t) following the OpenGL cube map selection table
def _lookup(d: np.ndarray) -> tuple[str, float, float]:
    x, y, z = d
    ax, ay, az = abs(x), abs(y), abs(z)
    if ax >= ay and ax >= az:
        face, sc, tc, ma = ("px", -z, -y, ax) if x > 0 else ("nx", z, -y, ax)
    elif ay >= az:
        face, sc, tc, ma = ("py", x, z, ay) if y > 0 else ("ny", x, -z, ay)
    else:
        face, sc, tc, ma = ("pz", x, -y, az) if z > 0 else ("nz", -x, -y, az)
    return face, (sc / ma + 1) / 2, (tc / ma + 1) / 2


def _direction(face: str, s: float, t: float) -> np.ndarray:
    # inverse of _lookup, written out per face
    sc, tc = 2 * s - 1, 2 * t - 1
    return np.array({
        "px": (1.0, -tc, -sc), "nx": (-1.0, -tc, sc),
        "py": (sc, 1.0, tc), "ny": (sc, -1.0, -tc),
        "pz": (sc, -tc, 1.0), "nz": (-sc, -tc, -1.0),
    }[face])


def seam_difference(faces: dict) -> int:
    """Largest per-channel difference between texels that touch across a cube edge.

    For every non-corner edge texel, step half a texel past the face border,
    look the direction up, and compare with the texel found on the other face.
    """
    f = faces["px"].shape[0]
    worst = 0
    eps = 1e-7
    for name, img in faces.items():
        if name not in ("px", "nx", "py", "ny", "pz", "nz"):
            continue
        for k in range(1, f - 1):
            mid = (k + 0.5) / f
            for (i, j), (s, t) in (
                ((0, k), (mid, -eps)), ((f - 1, k), (mid, 1 + eps)),
                ((k, 0), (-eps, mid)), ((k, f - 1), (1 + eps, mid)),
            ):
                other, s2, t2 = _lookup(_direction(name, s, t))
                assert other != name
                i2 = min(int(t2 * f), f - 1)
                j2 = min(int(s2 * f), f - 1)
                a = img[i, j, :3].astype(int)
                b = faces[other][i2, j2, :3].astype(int)
                worst = max(worst, int(np.abs(a - b).max()))
    return worst


# -- meshes ---------------------------------------------------------------

def horizontal_extent(points: np.ndarray, theta: float) -> float:
    """Width of the vertex set seen along azimuth theta (orthographic, about +Y)."""
    axis = np.array([math.cos(theta), 0.0, -math.sin(theta)])
    proj = points @ axis
    return float(proj.max() - proj.min())


def stepped_aabb(storeys, width: float, depth: float):
    """Analytic bounds of stacked storeys, each roof widening the footprint by its overhang."""
    over = max([st["overhang"] for st in storeys] + [0.0])
    height = sum(st["height"] + st["rise"] for st in storeys)
    return ((-width / 2 - over, 0.0, -depth / 2 - over),
            (width / 2 + over, height, depth / 2 + over))
