"""Uniform tension-reduction measurements on the outcome simplex.

The break point is drawn uniformly from the whole simplex, so the outcome
law is the barycentric coordinate itself: P(outcome i | state x) = x_i, and
for a block of outcomes the probabilities add.  Collapse keeps the block's
components and renormalizes, which makes sequential measurements compose by
plain multiplication of conditional weights.

The same geometry read with the roles of state and break point swapped
gives the complementary law: the break point is held fixed and the state is
uniform.  Closed forms exist for two and three outcomes; complementary_mc
estimates the law for any dimension.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ImpossibleOutcomeError, UnstableEquilibriumError
from .simplex import (
    BarycentricVector,
    OutcomePartition,
    _ratio_regions,
    region_of,
    regions_of_batch,
    sample_uniform,
    sample_uniform_batch,
)

__all__ = [
    "MAX_BOUNDARY_RETRIES",
    "UtrOutcome",
    "collapse",
    "complementary_mc",
    "complementary_probabilities",
    "outcome_probabilities",
    "product_probability_check",
    "product_relation_residuals",
    "run_batch",
    "run_once",
    "sequential_probability",
]

# Consecutive boundary (tie) draws tolerated before giving up on a trial.
MAX_BOUNDARY_RETRIES = 64


@dataclass(frozen=True)
class UtrOutcome:
    """One measurement event: which block fired, the collapsed state, and
    the break point that decided it."""

    block_index: int
    post_state: BarycentricVector
    breaking_point: BarycentricVector


def outcome_probabilities(x: BarycentricVector, partition: OutcomePartition) -> np.ndarray:
    """Block probabilities under the uniform break law: sums of x over blocks."""
    if partition.n != x.n:
        raise ValueError(f"partition covers 1..{partition.n} but state has {x.n} outcomes")
    xv = x.as_array()
    return np.array([xv[[i - 1 for i in sorted(b)]].sum() for b in partition.blocks])


def collapse(
    x: BarycentricVector, partition: OutcomePartition, block_index: int
) -> BarycentricVector:
    """State after a block fires: restriction to the block, renormalized.

    Raises ImpossibleOutcomeError when the block carries zero weight.
    """
    if not 1 <= block_index <= partition.n_blocks:
        raise ValueError(f"block index {block_index} outside 1..{partition.n_blocks}")
    if partition.n != x.n:
        raise ValueError(f"partition covers 1..{partition.n} but state has {x.n} outcomes")
    block = partition.blocks[block_index - 1]
    xv = x.as_array()
    mask = np.zeros(x.n, dtype=bool)
    mask[[i - 1 for i in block]] = True
    weight = float(xv[mask].sum())
    if weight == 0.0:
        raise ImpossibleOutcomeError(f"block {sorted(block)} has zero weight in {x.components}")
    post = np.where(mask, xv / weight, 0.0)
    return BarycentricVector(tuple(post))


def run_once(
    x: BarycentricVector,
    partition: OutcomePartition,
    rng: np.random.Generator,
    max_retries: int = MAX_BOUNDARY_RETRIES,
) -> UtrOutcome:
    """Sample one measurement event.

    Break points landing on a region boundary are resampled; after
    max_retries consecutive boundary hits the trial is abandoned with
    UnstableEquilibriumError.
    """
    for _ in range(max_retries):
        lam = sample_uniform(x.n, rng)
        try:
            region = region_of(x, lam)
        except UnstableEquilibriumError:
            continue
        block = partition.block_of(region)
        return UtrOutcome(block, collapse(x, partition, block), lam)
    raise UnstableEquilibriumError(
        f"{max_retries} consecutive boundary draws for state {x.components}"
    )


def run_batch(
    x: BarycentricVector,
    partition: OutcomePartition,
    trials: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Vectorized trial counts per block for `trials` independent events."""
    if trials < 0:
        raise ValueError(f"negative trial count {trials}")
    if partition.n != x.n:
        raise ValueError(f"partition covers 1..{partition.n} but state has {x.n} outcomes")
    bmap = partition.block_map()
    counts = np.zeros(partition.n_blocks, dtype=np.int64)
    support = x.support()
    if len(support) == 1:
        counts[bmap[support[0] - 1]] = trials
        return counts
    xv = x.as_array()
    remaining = trials
    for _ in range(MAX_BOUNDARY_RETRIES):
        if remaining == 0:
            return counts
        lam = sample_uniform_batch(x.n, remaining, rng)
        idx, tie = regions_of_batch(xv, lam)
        good = idx[~tie] - 1
        counts += np.bincount(bmap[good], minlength=partition.n_blocks)
        remaining = int(tie.sum())
    raise UnstableEquilibriumError(
        f"{MAX_BOUNDARY_RETRIES} consecutive boundary draws for state {x.components}"
    )


def sequential_probability(
    x: BarycentricVector,
    steps: Sequence[tuple[OutcomePartition, int]],
) -> float:
    """Probability of a chain of block outcomes, collapsing after each step.

    Multiplies the conditional block weights along the chain.  A zero-weight
    block makes the whole path impossible and returns 0.0 outright.
    """
    prob = 1.0
    state = x
    for partition, block_index in steps:
        weights = outcome_probabilities(state, partition)
        if not 1 <= block_index <= partition.n_blocks:
            raise ValueError(f"block index {block_index} outside 1..{partition.n_blocks}")
        w = float(weights[block_index - 1])
        if w == 0.0:
            return 0.0
        prob *= w
        state = collapse(state, partition, block_index)
    return prob


def complementary_probabilities(lam: BarycentricVector) -> np.ndarray:
    """Outcome law when the break point lam is fixed and the state is uniform.

    Two outcomes: (lam_2, lam_1).  Three outcomes, interior lam only:

        P(1) = lam_2 lam_3 (1 + lam_1) / ((1 - lam_2)(1 - lam_3))

    and cyclic permutations.  Other dimensions have no implemented closed
    form; use complementary_mc.
    """
    if lam.n == 2:
        l1, l2 = lam.components
        return np.array([l2, l1])
    if lam.n == 3:
        if any(c <= 0.0 for c in lam.components):
            raise ValueError(
                f"closed form needs an interior break point, got {lam.components}"
            )
        l1, l2, l3 = lam.components
        return np.array(
            [
                l2 * l3 * (1.0 + l1) / ((1.0 - l2) * (1.0 - l3)),
                l3 * l1 * (1.0 + l2) / ((1.0 - l3) * (1.0 - l1)),
                l1 * l2 * (1.0 + l3) / ((1.0 - l1) * (1.0 - l2)),
            ]
        )
    raise ValueError(f"closed form implemented for 2 or 3 outcomes, not {lam.n}")


def complementary_mc(
    lam: BarycentricVector, trials: int, rng: np.random.Generator
) -> np.ndarray:
    """Monte Carlo estimate of the fixed-break-point law, any dimension.

    Samples states uniformly and tallies which region of each sampled state
    contains lam; boundary hits are resampled.
    """
    if trials <= 0:
        raise ValueError(f"need a positive trial count, got {trials}")
    lv = lam.as_array()
    counts = np.zeros(lam.n, dtype=np.int64)
    remaining = trials
    for _ in range(MAX_BOUNDARY_RETRIES):
        if remaining == 0:
            return counts / trials
        xs = sample_uniform_batch(lam.n, remaining, rng)
        idx, tie = _ratio_regions(lv, xs)
        counts += np.bincount(idx[~tie] - 1, minlength=lam.n)
        remaining = int(tie.sum())
    raise UnstableEquilibriumError(
        f"{MAX_BOUNDARY_RETRIES} consecutive boundary draws at break point {lam.components}"
    )


def product_relation_residuals(x: Sequence[float]) -> tuple[float, float, float, float]:
    """Residuals of the four product identities a four-outcome law satisfies
    exactly when it factors over two independent two-outcome laws:

        x1 = (x1+x2)(x1+x3)   x2 = (x1+x2)(x2+x4)
        x3 = (x3+x4)(x1+x3)   x4 = (x3+x4)(x2+x4)
    """
    x1, x2, x3, x4 = (float(c) for c in x)
    return (
        x1 - (x1 + x2) * (x1 + x3),
        x2 - (x1 + x2) * (x2 + x4),
        x3 - (x3 + x4) * (x1 + x3),
        x4 - (x3 + x4) * (x2 + x4),
    )


def product_probability_check(
    x: BarycentricVector | Sequence[float], tol: float = 1e-9
) -> tuple[bool, tuple[float, float, float, float]]:
    """Whether a four-outcome law factors into two independent binary laws.

    Returns the verdict and all four residuals.
    """
    if not isinstance(x, BarycentricVector):
        x = BarycentricVector(tuple(float(v) for v in x))
    if x.n != 4:
        raise ValueError(f"product structure is defined for four outcomes, not {x.n}")
    residuals = product_relation_residuals(x.components)
    return max(abs(r) for r in residuals) <= tol, residuals
