"""General break densities and their transition laws.

The uniform law is one member of a family: any probability density over the
break region defines a measurement, with outcome probabilities given by the
density's mass inside each outcome region.

One-dimensional densities live on the on-axis coordinate z in
[-1/sqrt(2), +1/sqrt(2)] of a two-outcome measurement.  A state at angle
theta from the measured direction sits at z_a = cos(theta)/sqrt(2); the
"plus" outcome collects all break mass at or below z_a, so

    p_plus = P(Z < z_a) + P(Z == z_a) / 2

where an atom exactly at the particle splits evenly (a break at the
particle's own position leaves no preferred side).  For a continuous
density this is just the CDF at z_a.

Variants: Uniform (the full-interval uniform law), Epsilon(e) (uniform on
the central fraction e of the interval), PointBreak (a single atom),
DoublePoint (atoms at both ends, giving state-independent outcomes),
PiecewiseConstant1D, and CellularDensity for any outcome count.

Every density has a canonical JSON form {"type": tag, ...parameters}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Mapping

import numpy as np

from .cells import CellularDensity, cell_fraction_in_regions, sample_in_cells
from .errors import SchemaError, UnstableEquilibriumError
from .simplex import BarycentricVector, OutcomePartition, regions_of_batch

__all__ = [
    "DensitySpec",
    "DoublePoint",
    "Epsilon",
    "PiecewiseConstant1D",
    "PointBreak",
    "Uniform",
    "Z_MAX",
    "cdf",
    "atom",
    "density_from_json",
    "density_to_json",
    "epsilon_probability",
    "sample_break_point",
    "transition_probabilities_1d",
    "transition_probabilities_nd",
]

Z_MAX = 1.0 / math.sqrt(2.0)

MASS_TOL = 1e-9


@dataclass(frozen=True)
class Uniform:
    """Break anywhere with equal density (the plain measurement law)."""


@dataclass(frozen=True)
class Epsilon:
    """Uniform on the central fraction epsilon of the interval; the two
    outer segments of length (1-epsilon)/sqrt(2) never break.

    epsilon must lie in (0, 1]; epsilon == 1 coincides with Uniform.
    """

    epsilon: float

    def __post_init__(self) -> None:
        e = float(self.epsilon)
        if not 0.0 < e <= 1.0:
            raise ValueError(f"epsilon must lie in (0, 1], got {e}")
        object.__setattr__(self, "epsilon", e)


@dataclass(frozen=True)
class PointBreak:
    """All break mass at a single coordinate z0: a deterministic membrane."""

    z0: float

    def __post_init__(self) -> None:
        z = float(self.z0)
        if not -Z_MAX <= z <= Z_MAX:
            raise ValueError(f"z0 must lie in [-{Z_MAX}, {Z_MAX}], got {z}")
        object.__setattr__(self, "z0", z)


@dataclass(frozen=True)
class DoublePoint:
    """Atoms at the two endpoints: mass a at +z_max, mass b at -z_max.

    Away from the endpoints every state gets outcome probabilities (b, a),
    independent of the state: a break at an endpoint detaches that anchor
    and the band contracts to the opposite one.
    """

    a: float
    b: float

    def __post_init__(self) -> None:
        a, b = float(self.a), float(self.b)
        if a <= 0.0 or b <= 0.0:
            raise ValueError(f"both masses must be positive, got a={a}, b={b}")
        total = a + b
        if abs(total - 1.0) > MASS_TOL:
            raise ValueError(f"masses sum to {total}, not 1 within {MASS_TOL}")
        object.__setattr__(self, "a", a / total)
        object.__setattr__(self, "b", b / total)


@dataclass(frozen=True)
class PiecewiseConstant1D:
    """Piecewise-constant density: breakpoints z_0 < ... < z_k inside the
    interval and one probability mass per sub-interval (normalized on
    construction; zero density outside [z_0, z_k])."""

    breakpoints: tuple[float, ...]
    masses: tuple[float, ...]

    def __post_init__(self) -> None:
        bp = tuple(float(z) for z in self.breakpoints)
        ms = tuple(float(m) for m in self.masses)
        if len(bp) < 2:
            raise ValueError("need at least two breakpoints")
        if len(ms) != len(bp) - 1:
            raise ValueError(f"{len(ms)} masses for {len(bp) - 1} sub-intervals")
        if any(q <= p for p, q in zip(bp, bp[1:])):
            raise ValueError(f"breakpoints must increase strictly: {bp}")
        if bp[0] < -Z_MAX - 1e-12 or bp[-1] > Z_MAX + 1e-12:
            raise ValueError(f"breakpoints must lie within [-{Z_MAX}, {Z_MAX}]")
        if any(m < 0.0 for m in ms):
            raise ValueError(f"negative mass in {ms}")
        total = math.fsum(ms)
        if abs(total - 1.0) > MASS_TOL:
            raise ValueError(f"masses sum to {total}, not 1 within {MASS_TOL}")
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "masses", tuple(m / total for m in ms))


DensitySpec = Uniform | Epsilon | PointBreak | DoublePoint | PiecewiseConstant1D | CellularDensity

_ONE_D = (Uniform, Epsilon, PointBreak, DoublePoint, PiecewiseConstant1D)


def cdf(density: DensitySpec, z: float) -> float:
    """P(Z <= z) of a one-dimensional break density."""
    if isinstance(density, Uniform):
        return float(np.clip((z + Z_MAX) / (2.0 * Z_MAX), 0.0, 1.0))
    if isinstance(density, Epsilon):
        half = density.epsilon * Z_MAX
        return float(np.clip((z + half) / (2.0 * half), 0.0, 1.0))
    if isinstance(density, PointBreak):
        return 1.0 if z >= density.z0 else 0.0
    if isinstance(density, DoublePoint):
        out = 0.0
        if z >= -Z_MAX:
            out += density.b
        if z >= Z_MAX:
            out += density.a
        return out
    if isinstance(density, PiecewiseConstant1D):
        bp, ms = density.breakpoints, density.masses
        if z < bp[0]:
            return 0.0
        acc = 0.0
        for lo, hi, m in zip(bp, bp[1:], ms):
            if z >= hi:
                acc += m
            else:
                acc += m * (z - lo) / (hi - lo)
                break
        return min(acc, 1.0)
    raise ValueError(f"{type(density).__name__} is not a one-dimensional density")


def atom(density: DensitySpec, z: float) -> float:
    """Point mass P(Z == z); zero for the continuous variants."""
    if isinstance(density, PointBreak):
        return 1.0 if z == density.z0 else 0.0
    if isinstance(density, DoublePoint):
        if z == Z_MAX:
            return density.a
        if z == -Z_MAX:
            return density.b
        return 0.0
    if isinstance(density, _ONE_D):
        return 0.0
    raise ValueError(f"{type(density).__name__} is not a one-dimensional density")


def transition_probabilities_1d(
    cos_theta: float, density: DensitySpec
) -> tuple[float, float]:
    """(p_plus, p_minus) for a state at angle theta from the measured
    direction, under a one-dimensional break density."""
    c = float(cos_theta)
    if not -1.0 <= c <= 1.0:
        raise ValueError(f"cos(theta) must lie in [-1, 1], got {c}")
    if not isinstance(density, _ONE_D):
        raise ValueError(f"{type(density).__name__} is not a one-dimensional density")
    z_a = c * Z_MAX
    p_plus = cdf(density, z_a) - atom(density, z_a) / 2.0
    return p_plus, 1.0 - p_plus


def epsilon_probability(cos_theta: float, epsilon: float) -> tuple[float, float]:
    """Closed form of the Epsilon(e) transition law:

        p_plus = 1                      for cos(theta) >  e
                 (1 + cos(theta)/e)/2   for |cos(theta)| <= e
                 0                      for cos(theta) < -e

    At epsilon == 1 this is the squared half-angle law
    (cos^2(theta/2), sin^2(theta/2)).
    """
    c = float(cos_theta)
    e = float(epsilon)
    if e <= 0.0 or e > 1.0:
        raise ValueError(f"epsilon must lie in (0, 1], got {e}")
    if not -1.0 <= c <= 1.0:
        raise ValueError(f"cos(theta) must lie in [-1, 1], got {c}")
    if c > e:
        return 1.0, 0.0
    if c < -e:
        return 0.0, 1.0
    p = 0.5 * (1.0 + c / e)
    return p, 1.0 - p


def transition_probabilities_nd(
    x: BarycentricVector,
    partition: OutcomePartition,
    density: DensitySpec,
    rng: np.random.Generator | None = None,
    samples_per_cell: int = 4096,
) -> tuple[np.ndarray, np.ndarray]:
    """Block probabilities under a density on the full outcome simplex.

    Returns (probabilities, standard_errors).  Uniform is exact (the block
    sums of x).  Cellular densities are exact for two outcomes (interval
    arithmetic) and stratified Monte Carlo within the breakable cells
    otherwise, with per-cell binomial standard errors.
    """
    if partition.n != x.n:
        raise ValueError(f"partition covers 1..{partition.n} but state has {x.n} outcomes")
    k_blocks = partition.n_blocks
    if isinstance(density, Uniform):
        xv = x.as_array()
        probs = np.array([xv[[i - 1 for i in sorted(b)]].sum() for b in partition.blocks])
        return probs, np.zeros(k_blocks)
    if not isinstance(density, CellularDensity):
        raise ValueError(
            f"{type(density).__name__} does not define a break density on a "
            f"{x.n}-outcome simplex"
        )
    if density.n_outcomes != x.n:
        raise ValueError(
            f"density subdivides a {density.n_outcomes}-outcome simplex, state has {x.n}"
        )
    bmap = partition.block_map()
    cells = density.breakable_sorted - 1
    if x.n == 2:
        fr = cell_fraction_in_regions(x.as_array(), 2, density.n_cells)
        region = fr[:, cells].mean(axis=1)
        probs = np.bincount(bmap, weights=region, minlength=k_blocks)
        return probs, np.zeros(k_blocks)
    if rng is None:
        raise ValueError("stratified sampling needs an explicit generator")
    if samples_per_cell < 2:
        raise ValueError(f"need at least two samples per cell, got {samples_per_cell}")
    m = samples_per_cell
    idx = np.repeat(cells, m)
    hits = _sample_regions(x, density, idx, rng)
    block_hits = bmap[hits - 1].reshape(len(cells), m)
    frac = np.stack(
        [(block_hits == k).mean(axis=1) for k in range(k_blocks)], axis=1
    )  # (cells, blocks)
    probs = frac.mean(axis=0)
    var = (frac * (1.0 - frac) / m).sum(axis=0) / len(cells) ** 2
    return probs, np.sqrt(var)


def _sample_regions(
    x: BarycentricVector,
    density: CellularDensity,
    cell_idx: np.ndarray,
    rng: np.random.Generator,
    max_retries: int = 64,
) -> np.ndarray:
    """Outcome region (1-based) of a uniform break inside each given cell,
    resampling boundary hits."""
    out = np.zeros(cell_idx.shape[0], dtype=np.intp)
    pending = np.arange(cell_idx.shape[0])
    for _ in range(max_retries):
        if pending.size == 0:
            return out
        pts = sample_in_cells(density.n_outcomes, density.n_cells, cell_idx[pending], rng)
        idx, tie = regions_of_batch(x, pts)
        good = ~tie
        out[pending[good]] = idx[good]
        pending = pending[tie]
    raise UnstableEquilibriumError(
        f"{max_retries} consecutive boundary draws in cellular sampling"
    )


def sample_break_point(
    density: DensitySpec, rng: np.random.Generator, size: int | None = None
):
    """Draw break points from a density.

    One-dimensional variants return a float (or an array of them when size
    is given) via inverse-CDF sampling; cellular densities return
    barycentric points, choosing a breakable cell uniformly (all cells have
    equal measure) and a uniform point inside it.
    """
    m = 1 if size is None else int(size)
    if isinstance(density, Uniform):
        z = (rng.random(m) * 2.0 - 1.0) * Z_MAX
    elif isinstance(density, Epsilon):
        z = (rng.random(m) * 2.0 - 1.0) * density.epsilon * Z_MAX
    elif isinstance(density, PointBreak):
        z = np.full(m, density.z0)
    elif isinstance(density, DoublePoint):
        z = np.where(rng.random(m) < density.a, Z_MAX, -Z_MAX)
    elif isinstance(density, PiecewiseConstant1D):
        cum = np.concatenate([[0.0], np.cumsum(density.masses)])
        cum[-1] = 1.0
        u = rng.random(m)
        seg = np.clip(np.searchsorted(cum, u, side="right") - 1, 0, len(density.masses) - 1)
        bp = np.asarray(density.breakpoints)
        frac = (u - cum[seg]) / (cum[seg + 1] - cum[seg])
        z = bp[seg] + frac * (bp[seg + 1] - bp[seg])
    elif isinstance(density, CellularDensity):
        cells = density.breakable_sorted - 1
        idx = cells[rng.integers(0, cells.size, m)]
        pts = sample_in_cells(density.n_outcomes, density.n_cells, idx, rng)
        return pts[0] if size is None else pts
    else:
        raise ValueError(f"unknown density {type(density).__name__}")
    return float(z[0]) if size is None else z


_TAGS = {
    "uniform": Uniform,
    "epsilon": Epsilon,
    "point": PointBreak,
    "double_point": DoublePoint,
    "piecewise": PiecewiseConstant1D,
    "cellular": CellularDensity,
}


def density_to_json(density: DensitySpec) -> dict[str, Any]:
    if isinstance(density, Uniform):
        return {"type": "uniform"}
    if isinstance(density, Epsilon):
        return {"type": "epsilon", "epsilon": density.epsilon}
    if isinstance(density, PointBreak):
        return {"type": "point", "z0": density.z0}
    if isinstance(density, DoublePoint):
        return {"type": "double_point", "a": density.a, "b": density.b}
    if isinstance(density, PiecewiseConstant1D):
        return {
            "type": "piecewise",
            "breakpoints": list(density.breakpoints),
            "masses": list(density.masses),
        }
    if isinstance(density, CellularDensity):
        return {
            "type": "cellular",
            "n_outcomes": density.n_outcomes,
            "n_cells": density.n_cells,
            "breakable": sorted(density.breakable),
        }
    raise ValueError(f"unknown density {type(density).__name__}")


def density_from_json(doc: Mapping[str, Any]) -> DensitySpec:
    """Parse the canonical JSON form; structural problems raise SchemaError,
    out-of-range parameter values raise the variant's own ValueError."""
    if not isinstance(doc, Mapping):
        raise SchemaError(f"density must be an object, got {type(doc).__name__}")
    tag = doc.get("type")
    if tag not in _TAGS:
        raise SchemaError(f"unknown density type {tag!r}; expected one of {sorted(_TAGS)}")
    fields = {k: v for k, v in doc.items() if k != "type"}
    try:
        if tag == "uniform":
            return Uniform()
        if tag == "epsilon":
            return Epsilon(float(fields.pop("epsilon")))
        if tag == "point":
            return PointBreak(float(fields.pop("z0")))
        if tag == "double_point":
            return DoublePoint(float(fields.pop("a")), float(fields.pop("b")))
        if tag == "piecewise":
            return PiecewiseConstant1D(
                tuple(float(z) for z in fields.pop("breakpoints")),
                tuple(float(v) for v in fields.pop("masses")),
            )
        return CellularDensity(
            int(fields.pop("n_outcomes")),
            int(fields.pop("n_cells")),
            frozenset(int(c) for c in fields.pop("breakable")),
        )
    except KeyError as exc:
        raise SchemaError(f"density {tag!r} is missing field {exc}") from None
    except TypeError as exc:
        raise SchemaError(f"malformed density {tag!r}: {exc}") from None
