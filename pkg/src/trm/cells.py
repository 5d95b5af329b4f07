"""Equal-measure cell subdivisions of the outcome simplex.

Cellular densities break only inside a chosen subset of cells, uniformly.
The averaging results downstream need nothing from the cells beyond equal
measure, so each dimension uses the simplest exact scheme:

  two outcomes     equal intervals of the first barycentric coordinate
  three outcomes   edgewise subdivision of the triangle into k^2 congruent
                   up/down triangles (cell count must be a perfect square)
  four and more    slabs between consecutive quantiles of the first
                   barycentric coordinate (lam_1 is Beta(1, n-1) under the
                   uniform law, so quantile cuts give equal measure and
                   within-slab sampling stays exact)

Cells are indexed 1..n_cells in a fixed documented order: interval/slab
cells by increasing coordinate; triangle cells row by row from the edge
opposite vertex 3, upward triangle before the downward one to its right.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDensityError

__all__ = [
    "CellularDensity",
    "cell_fraction_in_regions",
    "sample_in_cells",
    "slab_bounds",
    "triangle_vertices",
]


@dataclass(frozen=True)
class CellularDensity:
    """Uniform break density restricted to a subset of equal-measure cells.

    breakable holds 1-based cell indices; it must be a nonempty subset of
    {1..n_cells}.  For three outcomes n_cells must be a perfect square.
    """

    n_outcomes: int
    n_cells: int
    breakable: frozenset[int]

    def __post_init__(self) -> None:
        if self.n_outcomes < 2:
            raise ValueError(f"need at least two outcomes, got {self.n_outcomes}")
        if self.n_cells < 1:
            raise ValueError(f"need at least one cell, got {self.n_cells}")
        if self.n_outcomes == 3:
            k = math.isqrt(self.n_cells)
            if k * k != self.n_cells:
                raise ValueError(
                    f"triangle subdivision needs a square cell count, got {self.n_cells}"
                )
        cells = frozenset(int(c) for c in self.breakable)
        if not cells:
            raise DegenerateDensityError("no breakable cells: density has no support")
        if not cells <= set(range(1, self.n_cells + 1)):
            raise ValueError(f"breakable cells {sorted(cells)} outside 1..{self.n_cells}")
        object.__setattr__(self, "breakable", cells)

    @property
    def breakable_sorted(self) -> np.ndarray:
        return np.array(sorted(self.breakable), dtype=np.intp)


def interval_bounds(n_cells: int) -> np.ndarray:
    """(n_cells, 2) bounds of equal lam_1 intervals on [0, 1]."""
    edges = np.linspace(0.0, 1.0, n_cells + 1)
    return np.column_stack([edges[:-1], edges[1:]])


def slab_bounds(n_outcomes: int, n_cells: int) -> np.ndarray:
    """(n_cells, 2) lam_1 bounds of equal-measure quantile slabs.

    Under the uniform law lam_1 has CDF 1 - (1 - t)**(n-1); cutting at its
    c/n_cells quantiles yields cells of measure exactly 1/n_cells each.
    """
    c = np.linspace(0.0, 1.0, n_cells + 1)
    q = 1.0 - (1.0 - c) ** (1.0 / (n_outcomes - 1))
    q[-1] = 1.0
    return np.column_stack([q[:-1], q[1:]])


def triangle_vertices(k: int) -> np.ndarray:
    """(k*k, 3, 2) chart vertices of the edgewise subdivision.

    Chart coordinates are (u, v) = (lam_2, lam_3); the full triangle has
    corners (0,0), (1,0), (0,1).  Every cell has chart area 1/(2 k^2).
    """
    cells = []
    for j in range(k):
        for i in range(k - j):
            cells.append([(i / k, j / k), ((i + 1) / k, j / k), (i / k, (j + 1) / k)])
            if i + j <= k - 2:
                cells.append(
                    [((i + 1) / k, j / k), ((i + 1) / k, (j + 1) / k), (i / k, (j + 1) / k)]
                )
    return np.array(cells, dtype=float)


def _polygon_area(poly: np.ndarray) -> float:
    x, y = poly[:, 0], poly[:, 1]
    return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))


def _ensure_ccw(poly: np.ndarray) -> np.ndarray:
    x, y = poly[:, 0], poly[:, 1]
    signed = 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))
    return poly if signed >= 0.0 else poly[::-1]


def _clip_convex(subject: np.ndarray, clip: np.ndarray) -> np.ndarray:
    """Intersection of two convex polygons (both CCW), Sutherland-Hodgman."""
    output = [tuple(p) for p in subject]
    m = len(clip)
    for e in range(m):
        ax, ay = clip[e]
        bx, by = clip[(e + 1) % m]
        if not output:
            break
        polygon = output
        output = []
        k = len(polygon)
        for i in range(k):
            px, py = polygon[i]
            qx, qy = polygon[(i + 1) % k]
            c1 = (bx - ax) * (py - ay) - (by - ay) * (px - ax)
            c2 = (bx - ax) * (qy - ay) - (by - ay) * (qx - ax)
            if c1 >= 0.0:
                output.append((px, py))
            if (c1 >= 0.0) != (c2 >= 0.0):
                # signs differ strictly, so c1 - c2 cannot vanish
                t = c1 / (c1 - c2)
                output.append((px + t * (qx - px), py + t * (qy - py)))
    return np.array(output, dtype=float) if output else np.empty((0, 2))


def _region_polygons(x: np.ndarray) -> list[np.ndarray]:
    """Chart polygons of the three outcome regions of a 3-outcome state.

    Region A_i is the convex hull of the state point and the two vertices
    other than i; chart corners are x1->(0,0), x2->(1,0), x3->(0,1).
    """
    p = (float(x[1]), float(x[2]))
    corners = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)]
    polys = []
    for i in range(3):
        verts = [p if j == i else corners[j] for j in range(3)]
        polys.append(_ensure_ccw(np.array(verts, dtype=float)))
    return polys


def cell_fraction_in_regions(x: np.ndarray, n_outcomes: int, n_cells: int) -> np.ndarray:
    """(n_outcomes, n_cells) fraction of each cell's measure inside each
    outcome region of the state x.  Exact; two and three outcomes only."""
    xv = np.asarray(x, dtype=float)
    if n_outcomes == 2:
        bounds = interval_bounds(n_cells)
        lo, hi = bounds[:, 0], bounds[:, 1]
        overlap = np.clip(np.minimum(hi, xv[0]) - lo, 0.0, None)
        frac1 = overlap / (hi - lo)
        return np.vstack([frac1, 1.0 - frac1])
    if n_outcomes == 3:
        k = math.isqrt(n_cells)
        if k * k != n_cells:
            raise ValueError(f"triangle subdivision needs a square cell count, got {n_cells}")
        tris = triangle_vertices(k)
        cell_area = 0.5 / (k * k)
        regions = _region_polygons(xv)
        out = np.zeros((3, n_cells))
        for c in range(n_cells):
            cell = _ensure_ccw(tris[c])
            for i, reg in enumerate(regions):
                part = _clip_convex(reg, cell)
                if len(part) >= 3:
                    out[i, c] = _polygon_area(part) / cell_area
        sums = out.sum(axis=0)
        if np.max(np.abs(sums - 1.0)) > 1e-9:
            raise ValueError("region polygons fail to tile a cell; clipping is broken")
        # clipping noise: renormalize columns that must sum to exactly 1
        return out / sums[None, :]
    raise ValueError(f"exact cell fractions implemented for 2 or 3 outcomes, not {n_outcomes}")


def sample_in_cells(
    n_outcomes: int, n_cells: int, cell_idx: np.ndarray, rng: np.random.Generator
) -> np.ndarray:
    """Uniform points inside the given cells (0-based indices), one each.

    Returns an (m, n_outcomes) array of barycentric points.
    """
    idx = np.asarray(cell_idx, dtype=np.intp)
    m = idx.shape[0]
    if n_outcomes == 2:
        lam1 = (idx + rng.random(m)) / n_cells
        return np.column_stack([lam1, 1.0 - lam1])
    if n_outcomes == 3:
        k = math.isqrt(n_cells)
        tris = triangle_vertices(k)[idx]
        r = rng.random((m, 2))
        flip = r.sum(axis=1) > 1.0
        r[flip] = 1.0 - r[flip]
        a, b, c = tris[:, 0], tris[:, 1], tris[:, 2]
        uv = a + r[:, :1] * (b - a) + r[:, 1:] * (c - a)
        lam1 = 1.0 - uv.sum(axis=1)
        return np.column_stack([lam1, uv])
    # quantile slabs: invert the lam_1 CDF inside the cell, then spread the
    # remainder uniformly over the lower-dimensional simplex
    p = (idx + rng.random(m)) / n_cells
    lam1 = 1.0 - (1.0 - p) ** (1.0 / (n_outcomes - 1))
    rest = rng.standard_exponential((m, n_outcomes - 1))
    rest /= rest.sum(axis=1, keepdims=True)
    return np.column_stack([lam1, (1.0 - lam1)[:, None] * rest])
