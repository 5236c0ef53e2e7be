"""Planar polygon helpers shared by validation, matting and projection checks."""

from __future__ import annotations

from typing import Sequence

import numpy as np

Point = tuple[float, float]


def signed_area(poly: Sequence[Point]) -> float:
    a = 0.0
    n = len(poly)
    for i in range(n):
        x0, y0 = poly[i]
        x1, y1 = poly[(i + 1) % n]
        a += x0 * y1 - x1 * y0
    return 0.5 * a


def _orient(a: Point, b: Point, c: Point) -> float:
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def _on_segment(a: Point, b: Point, p: Point) -> bool:
    return (min(a[0], b[0]) <= p[0] <= max(a[0], b[0])
            and min(a[1], b[1]) <= p[1] <= max(a[1], b[1]))


def segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool:
    """Closed-segment intersection, touching and collinear overlap included."""
    o1, o2 = _orient(a, b, c), _orient(a, b, d)
    o3, o4 = _orient(c, d, a), _orient(c, d, b)
    if ((o1 > 0 > o2) or (o1 < 0 < o2)) and ((o3 > 0 > o4) or (o3 < 0 < o4)):
        return True
    return ((o1 == 0 and _on_segment(a, b, c)) or (o2 == 0 and _on_segment(a, b, d))
            or (o3 == 0 and _on_segment(c, d, a)) or (o4 == 0 and _on_segment(c, d, b)))


def is_simple(poly: Sequence[Point]) -> bool:
    """True when no two non-adjacent edges meet and adjacent edges only share a vertex."""
    n = len(poly)
    if n < 3:
        return False
    if any(poly[i] == poly[(i + 1) % n] for i in range(n)):
        return False
    for i in range(n):
        a, b = poly[i], poly[(i + 1) % n]
        for j in range(i + 1, n):
            c, d = poly[j], poly[(j + 1) % n]
            if j == i + 1 or (i == 0 and j == n - 1):
                # shared vertex s; the edges fold back onto each other when
                # collinear and heading the same way out of s
                s_, p, q = (b, a, d) if j == i + 1 else (a, b, c)
                if _orient(p, s_, q) == 0 and (
                        (p[0] - s_[0]) * (q[0] - s_[0]) + (p[1] - s_[1]) * (q[1] - s_[1])) > 0:
                    return False
                continue
            if segments_intersect(a, b, c, d):
                return False
    return True


def distance_to_boundary(poly: Sequence[Point], xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Euclidean distance from each (xs, ys) point to the polygon outline."""
    best = np.full(np.broadcast(xs, ys).shape, np.inf)
    n = len(poly)
    for i in range(n):
        ax, ay = poly[i]
        bx, by = poly[(i + 1) % n]
        dx, dy = bx - ax, by - ay
        seg2 = dx * dx + dy * dy
        if seg2 == 0.0:
            d2 = (xs - ax) ** 2 + (ys - ay) ** 2
        else:
            t = np.clip(((xs - ax) * dx + (ys - ay) * dy) / seg2, 0.0, 1.0)
            d2 = (xs - (ax + t * dx)) ** 2 + (ys - (ay + t * dy)) ** 2
        np.minimum(best, d2, out=best)
    return np.sqrt(best)


def convex_hull(points: Sequence[Point]) -> list[Point]:
    """Andrew's monotone chain; counter-clockwise, collinear points dropped."""
    pts = sorted(set((float(x), float(y)) for x, y in points))
    if len(pts) <= 2:
        return pts

    def half(seq):
        out: list[Point] = []
        for p in seq:
            while len(out) >= 2 and _orient(out[-2], out[-1], p) <= 0:
                out.pop()
            out.append(p)
        return out

    lower = half(pts)
    upper = half(reversed(pts))
    return lower[:-1] + upper[:-1]


def clip_convex_to_rect(poly: Sequence[Point], rect: tuple[float, float, float, float]) -> list[Point]:
    """Sutherland-Hodgman clip of a convex polygon to an axis-aligned rectangle."""
    x0, y0, x1, y1 = rect
    out = list(poly)
    planes = [
        (lambda p: p[0] >= x0, lambda a, b: _cut_x(a, b, x0)),
        (lambda p: p[0] <= x1, lambda a, b: _cut_x(a, b, x1)),
        (lambda p: p[1] >= y0, lambda a, b: _cut_y(a, b, y0)),
        (lambda p: p[1] <= y1, lambda a, b: _cut_y(a, b, y1)),
    ]
    for inside, cut in planes:
        if not out:
            break
        src, out = out, []
        for i, cur in enumerate(src):
            prev = src[i - 1]
            if inside(cur):
                if not inside(prev):
                    out.append(cut(prev, cur))
                out.append(cur)
            elif inside(prev):
                out.append(cut(prev, cur))
    return out


def _cut_x(a: Point, b: Point, x: float) -> Point:
    t = (x - a[0]) / (b[0] - a[0])
    return (x, a[1] + t * (b[1] - a[1]))


def _cut_y(a: Point, b: Point, y: float) -> Point:
    t = (y - a[1]) / (b[1] - a[1])
    return (a[0] + t * (b[0] - a[0]), y)
