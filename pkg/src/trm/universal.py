"""Averaging over all cellular break densities.

Fix a subdivision of the simplex into n_c equal-measure cells.  Every
nonempty subset of cells defines a cellular density; averaging the outcome
probabilities over all 2^n_c - 1 of them (and, in the limit, over
subdivisions) models a measurement whose density is itself picked blindly.
For equal-measure cells the average collapses to the uniform law exactly at
every finite n_c: the block mass of region A_i is linear in the cell
indicators and every cell has the same expected weight 1/|B| conditional on
being breakable, so the subset average is just m(A_i)/m(simplex) = x_i.

universal_probability_exact enumerates subsets and computes each term in
closed form (interval overlap for two outcomes, convex polygon clipping for
three).  universal_probability_mc samples subsets and break points instead
and works up to five outcomes.  convergence_scan tabulates either route
against the uniform law over a range of cell counts.
"""

from __future__ import annotations

import math
from typing import Iterator, Sequence

import numpy as np

from .cells import CellularDensity, cell_fraction_in_regions, sample_in_cells
from .simplex import BarycentricVector, OutcomePartition, regions_of_batch

__all__ = [
    "ENUMERATION_LIMIT",
    "convergence_scan",
    "enumerate_cellular",
    "universal_probability_exact",
    "universal_probability_mc",
]

# 2^24 - 1 subsets is the largest enumeration worth supporting.
ENUMERATION_LIMIT = 24

_CHUNK = 1 << 18


def enumerate_cellular(n_outcomes: int, n_cells: int) -> Iterator[CellularDensity]:
    """All cellular densities on a subdivision: one per nonempty cell subset.

    Subsets come in bitmask order (cell 1 is the lowest bit).
    """
    if n_cells > ENUMERATION_LIMIT:
        raise ValueError(
            f"enumeration over 2^{n_cells} subsets refused; limit is {ENUMERATION_LIMIT}"
        )
    for mask in range(1, 1 << n_cells):
        cells = frozenset(c + 1 for c in range(n_cells) if mask >> c & 1)
        yield CellularDensity(n_outcomes, n_cells, cells)


def _subset_average(fractions: np.ndarray, n_cells: int) -> np.ndarray:
    """Mean outcome probabilities over all nonempty cell subsets.

    fractions[i, c] is the conditional probability of outcome i given a
    break in cell c; a subset B contributes mean_{c in B} fractions[:, c].
    Enumerates in chunks to bound memory.
    """
    total = np.zeros(fractions.shape[0])
    n_masks = (1 << n_cells) - 1
    shifts = np.arange(n_cells, dtype=np.uint32)
    start = 1
    while start <= n_masks:
        stop = min(start + _CHUNK, n_masks + 1)
        masks = np.arange(start, stop, dtype=np.uint32)
        bits = (masks[:, None] >> shifts[None, :]) & 1
        sizes = bits.sum(axis=1, dtype=float)
        total += (bits @ fractions.T / sizes[:, None]).sum(axis=0)
        start = stop
    return total / n_masks


def universal_probability_exact(
    x: BarycentricVector,
    n_cells: int,
    partition: OutcomePartition | None = None,
) -> np.ndarray:
    """Exact subset-average outcome (or block) probabilities.

    Two outcomes: any cell count up to the enumeration limit.  Three
    outcomes: edgewise subdivisions with at most 16 cells.  The average is
    linear in the outcome indicators, so block probabilities are block sums
    of the singleton average.
    """
    if x.n == 2:
        if n_cells > ENUMERATION_LIMIT:
            raise ValueError(
                f"cell count {n_cells} above enumeration limit {ENUMERATION_LIMIT}"
            )
    elif x.n == 3:
        k = math.isqrt(n_cells)
        if k * k != n_cells or n_cells > 16:
            raise ValueError(
                f"exact three-outcome averaging needs a square cell count <= 16, got {n_cells}"
            )
    else:
        raise ValueError(f"exact averaging implemented for 2 or 3 outcomes, not {x.n}")
    fractions = cell_fraction_in_regions(x.as_array(), x.n, n_cells)
    mean = _subset_average(fractions, n_cells)
    if partition is None:
        return mean
    if partition.n != x.n:
        raise ValueError(f"partition covers 1..{partition.n} but state has {x.n} outcomes")
    return np.bincount(partition.block_map(), weights=mean, minlength=partition.n_blocks)


def universal_probability_mc(
    x: BarycentricVector,
    n_cells: int,
    density_samples: int,
    point_samples: int,
    rng: np.random.Generator,
    partition: OutcomePartition | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Monte Carlo subset average for up to five outcomes.

    Draws breakable subsets uniformly among the nonempty ones (rejection on
    the empty draw), estimates each density's outcome law from point_samples
    breaks, and averages.  Returns (probabilities, standard errors); the
    standard error is the spread of per-density estimates over
    sqrt(density_samples).
    """
    if x.n > 5:
        raise ValueError(f"subset-average sampling supports up to five outcomes, not {x.n}")
    if density_samples < 2 or point_samples < 1:
        raise ValueError("need at least two density samples and one point sample")
    stats = mc_batch(x, n_cells, density_samples, point_samples, rng, partition)
    return mc_combine(stats, density_samples)


def mc_batch(
    x: BarycentricVector,
    n_cells: int,
    density_samples: int,
    point_samples: int,
    rng: np.random.Generator,
    partition: OutcomePartition | None = None,
) -> np.ndarray:
    """Accumulated (2, n_blocks) array of per-density estimate sums and sums
    of squares, the reducible building block of universal_probability_mc.

    Block aggregation happens per density, before squaring, so the combined
    standard errors account for within-block correlations.
    """
    xv = x.as_array()
    # constructing one density validates the subdivision parameters
    CellularDensity(x.n, n_cells, frozenset(range(1, n_cells + 1)))
    if partition is None:
        bmap = np.arange(x.n)
        n_blocks = x.n
    else:
        if partition.n != x.n:
            raise ValueError(
                f"partition covers 1..{partition.n} but state has {x.n} outcomes"
            )
        bmap = partition.block_map()
        n_blocks = partition.n_blocks
    sums = np.zeros((2, n_blocks))
    for _ in range(density_samples):
        while True:
            bits = rng.random(n_cells) < 0.5
            if bits.any():
                break
        cells = np.flatnonzero(bits)
        idx = cells[rng.integers(0, cells.size, point_samples)]
        hits = _point_regions(xv, x.n, n_cells, idx, rng)
        p_hat = np.bincount(bmap[hits - 1], minlength=n_blocks) / point_samples
        sums[0] += p_hat
        sums[1] += p_hat**2
    return sums


def mc_combine(stats: np.ndarray, density_samples: int) -> tuple[np.ndarray, np.ndarray]:
    """Turn accumulated sums/sums-of-squares into (mean, standard error)."""
    d = density_samples
    mean = stats[0] / d
    var = np.clip((stats[1] - stats[0] ** 2 / d) / (d - 1), 0.0, None)
    return mean, np.sqrt(var / d)


def _point_regions(
    xv: np.ndarray,
    n_outcomes: int,
    n_cells: int,
    cell_idx: np.ndarray,
    rng: np.random.Generator,
    max_retries: int = 64,
) -> np.ndarray:
    out = np.zeros(cell_idx.shape[0], dtype=np.intp)
    pending = np.arange(cell_idx.shape[0])
    for _ in range(max_retries):
        if pending.size == 0:
            return out
        pts = sample_in_cells(n_outcomes, n_cells, cell_idx[pending], rng)
        idx, tie = regions_of_batch(xv, pts)
        good = ~tie
        out[pending[good]] = idx[good]
        pending = pending[tie]
    raise ValueError(f"{max_retries} consecutive boundary draws while averaging")


def convergence_scan(
    x: BarycentricVector,
    cell_counts: Sequence[int],
    rng: np.random.Generator | None = None,
    method: str = "exact",
    density_samples: int = 1000,
    point_samples: int = 1000,
    partition: OutcomePartition | None = None,
) -> list[dict[str, float | int]]:
    """Average-vs-uniform-law deviation per cell count and outcome.

    Returns one row per (n_c, outcome_index) with the estimated probability,
    its standard error (zero for the exact route), and the signed deviation
    from the uniform law.  With a partition, rows are per block and the
    reference is the block sum of x.
    """
    if method not in ("exact", "mc"):
        raise ValueError(f"method must be 'exact' or 'mc', got {method!r}")
    rows: list[dict[str, float | int]] = []
    if partition is None:
        xv = x.as_array()
    else:
        xv = np.bincount(
            partition.block_map(), weights=x.as_array(), minlength=partition.n_blocks
        )
    for n_c in cell_counts:
        if method == "exact":
            probs = universal_probability_exact(x, n_c, partition)
            errs = np.zeros(len(xv))
        else:
            if rng is None:
                raise ValueError("the mc route needs an explicit generator")
            probs, errs = universal_probability_mc(
                x, n_c, density_samples, point_samples, rng, partition
            )
        for i in range(len(xv)):
            rows.append(
                {
                    "n_c": int(n_c),
                    "outcome_index": i + 1,
                    "probability": float(probs[i]),
                    "stderr": float(errs[i]),
                    "deviation": float(probs[i] - xv[i]),
                }
            )
    return rows
