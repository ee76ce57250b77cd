#!/usr/bin/env python3
"""Generates the shipped hexagonal mesh family meshes/hexagonal/hex_<level>.json.

A flat-top honeycomb (side s = 1/(12 * 2^(level-1))) is clipped to the unit
square with Sutherland-Hodgman; the lattice is shifted by an irrational-ish
fraction of s so that no hexagon edge is collinear with the square boundary
and no lattice vertex lands exactly on it. Vertices are merged with a
tolerance-aware pool and boundary coordinates are snapped to exact 0/1, so
that neighbouring cells share identical face endpoints. Each file is a
json-poly mesh: {"vertices": [[x, y], ...], "cells": [[i0, i1, ...], ...]}
with counter-clockwise cells.
"""

import json
import math
import os

LEVELS = 5
SNAP = 1e-9


def hexagon(cx, cy, s):
    return [(cx + s * math.cos(a), cy + s * math.sin(a))
            for a in (k * math.pi / 3.0 for k in range(6))]


def clip_halfplane(poly, inside, intersect):
    out = []
    n = len(poly)
    for i in range(n):
        a, b = poly[i], poly[(i + 1) % n]
        ain, bin_ = inside(a), inside(b)
        if ain:
            out.append(a)
            if not bin_:
                out.append(intersect(a, b))
        elif bin_:
            out.append(intersect(a, b))
    return out


def clip_to_unit_square(poly):
    planes = [
        (lambda p: p[0] >= 0.0, lambda a, b: axis_cross(a, b, 0, 0.0)),
        (lambda p: p[0] <= 1.0, lambda a, b: axis_cross(a, b, 0, 1.0)),
        (lambda p: p[1] >= 0.0, lambda a, b: axis_cross(a, b, 1, 0.0)),
        (lambda p: p[1] <= 1.0, lambda a, b: axis_cross(a, b, 1, 1.0)),
    ]
    for inside, intersect in planes:
        poly = clip_halfplane(poly, inside, intersect)
        if not poly:
            return []
    return poly


def axis_cross(a, b, axis, bound):
    t = (bound - a[axis]) / (b[axis] - a[axis])
    p = [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
    p[axis] = bound
    return (p[0], p[1])


def snap(v):
    x, y = v
    for bound in (0.0, 1.0):
        if abs(x - bound) < SNAP:
            x = bound
        if abs(y - bound) < SNAP:
            y = bound
    return (x, y)


def dedupe_consecutive(poly, tol):
    out = []
    for p in poly:
        if not out or math.dist(p, out[-1]) > tol:
            out.append(p)
    if len(out) > 1 and math.dist(out[0], out[-1]) <= tol:
        out.pop()
    return out


def polygon_area(poly):
    a = 0.0
    for i in range(len(poly)):
        p, q = poly[i], poly[(i + 1) % len(poly)]
        a += p[0] * q[1] - q[0] * p[1]
    return 0.5 * a


class VertexPool:
    def __init__(self, tol):
        self.tol = tol
        self.buckets = {}
        self.coords = []

    def key(self, p):
        return (round(p[0] / self.tol), round(p[1] / self.tol))

    def insert(self, p):
        kx, ky = self.key(p)
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                for idx in self.buckets.get((kx + dx, ky + dy), []):
                    if math.dist(p, self.coords[idx]) <= self.tol:
                        return idx
        idx = len(self.coords)
        self.coords.append(p)
        self.buckets.setdefault((kx, ky), []).append(idx)
        return idx


def build_level(level):
    s = 1.0 / (12.0 * 2 ** (level - 1))
    dx, dy = 0.2137 * s, 0.1379 * s
    col_step, row_step = 1.5 * s, math.sqrt(3.0) * s

    polys = []
    ncols = int(1.0 / col_step) + 4
    nrows = int(1.0 / row_step) + 4
    for i in range(-2, ncols):
        for j in range(-2, nrows):
            cx = dx + col_step * i
            cy = dy + row_step * (j + 0.5 * (i % 2))
            poly = clip_to_unit_square(hexagon(cx, cy, s))
            if not poly:
                continue
            poly = dedupe_consecutive([snap(v) for v in poly], 1e-12 * s)
            if len(poly) >= 3 and polygon_area(poly) > 1e-12 * s * s:
                polys.append(poly)

    pool = VertexPool(1e-9 * s)
    cells = [[pool.insert(v) for v in poly] for poly in polys]

    total = sum(polygon_area(p) for p in polys)
    assert abs(total - 1.0) < 1e-10, f"level {level}: area {total}"
    assert all(polygon_area(p) > 0 for p in polys)
    h_max = max(max(math.dist(p, q) for p in poly for q in poly) for poly in polys)
    min_area = min(polygon_area(p) for p in polys)
    print(f"level {level}: s = {s:.5g}, cells = {len(cells)}, vertices = {len(pool.coords)}, "
          f"h_max = {h_max:.5g}, min area / s^2 = {min_area / s**2:.3g}")
    return {"vertices": [[x, y] for x, y in pool.coords], "cells": cells}


def main():
    out_dir = os.path.join(os.path.dirname(__file__), "..", "meshes", "hexagonal")
    os.makedirs(out_dir, exist_ok=True)
    for level in range(1, LEVELS + 1):
        mesh = build_level(level)
        path = os.path.join(out_dir, f"hex_{level}.json")
        with open(path, "w") as f:
            json.dump(mesh, f)
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
