"""Subset averages over cellular densities and their collapse to the
uniform law.

The two small cases worked out by hand pin the enumeration semantics:

two outcomes, x = (1/2, 1/2), two cells on lam_1:
    {1} -> P(1) = 1      (break always below the state)
    {2} -> P(1) = 0
    {1,2} -> P(1) = 1/2
    average = (1 + 0 + 1/2)/3 = 1/2 = x_1

two outcomes, x = (3/10, 7/10), three cells:
    region 1 is lam_1 < 0.3, so the per-cell fractions are (0.9, 0, 0) and
    {1} -> 0.9   {2} -> 0    {3} -> 0
    {1,2} -> 0.45   {1,3} -> 0.45   {2,3} -> 0
    {1,2,3} -> 0.3
    average = 2.1/7 = 0.3 = x_1
"""

import numpy as np
import pytest

from trm import (
    BarycentricVector,
    OutcomePartition,
    convergence_scan,
    enumerate_cellular,
    transition_probabilities_nd,
    universal_probability_exact,
    universal_probability_mc,
)
from trm.universal import ENUMERATION_LIMIT, mc_batch, mc_combine
from conftest import random_interior_state

HALF = BarycentricVector((0.5, 0.5))
SKEW = BarycentricVector((0.3, 0.7))

ORACLE_HALF_2 = {
    frozenset({1}): 1.0,
    frozenset({2}): 0.0,
    frozenset({1, 2}): 0.5,
}

ORACLE_SKEW_3 = {
    frozenset({1}): 0.9,
    frozenset({2}): 0.0,
    frozenset({3}): 0.0,
    frozenset({1, 2}): 0.45,
    frozenset({1, 3}): 0.45,
    frozenset({2, 3}): 0.0,
    frozenset({1, 2, 3}): 0.3,
}


@pytest.mark.parametrize(
    "x,n_c,oracle",
    [(HALF, 2, ORACLE_HALF_2), (SKEW, 3, ORACLE_SKEW_3)],
    ids=["half-2cells", "skew-3cells"],
)
def test_hand_enumerated_subset_laws(x, n_c, oracle):
    part = OutcomePartition.singletons(2)
    seen = {}
    for density in enumerate_cellular(2, n_c):
        probs, errs = transition_probabilities_nd(x, part, density)
        assert (errs == 0).all()
        seen[density.breakable] = probs[0]
    assert set(seen) == set(oracle)
    for cells, expected in oracle.items():
        assert abs(seen[cells] - expected) < 1e-12, cells
    mean = sum(seen.values()) / len(seen)
    assert abs(mean - x.components[0]) < 1e-12
    np.testing.assert_allclose(
        universal_probability_exact(x, n_c), x.components, atol=1e-12
    )


def test_enumeration_counts_and_guard():
    assert sum(1 for _ in enumerate_cellular(2, 4)) == 15
    assert sum(1 for _ in enumerate_cellular(3, 4)) == 15
    with pytest.raises(ValueError):
        list(enumerate_cellular(2, ENUMERATION_LIMIT + 1))


def test_exact_average_equals_state_two_outcomes(rng):
    for n_c in range(1, 13):
        for _ in range(4):
            x = BarycentricVector(tuple(random_interior_state(rng, 2)))
            dev = np.abs(universal_probability_exact(x, n_c) - x.as_array())
            assert dev.max() < 1e-12, (n_c, x)


def test_exact_average_equals_state_three_outcomes(rng):
    for n_c in (1, 4, 9, 16):
        x = BarycentricVector(tuple(random_interior_state(rng, 3)))
        dev = np.abs(universal_probability_exact(x, n_c) - x.as_array())
        assert dev.max() < 1e-12, (n_c, x)


def test_exact_average_dimension_guard(rng):
    with pytest.raises(ValueError):
        universal_probability_exact(BarycentricVector((0.25, 0.25, 0.25, 0.25)), 4)


def test_mc_average_matches_state_within_bands(rng):
    for n in (3, 4, 5):
        x = BarycentricVector(tuple(random_interior_state(rng, n)))
        n_c = 9 if n == 3 else 8
        probs, errs = universal_probability_mc(x, n_c, 400, 400, rng)
        assert abs(probs.sum() - 1.0) < 1e-9
        assert (np.abs(probs - x.as_array()) <= 4 * errs + 1e-12).all(), (n, probs)


def test_mc_combine_is_mean_and_stderr():
    estimates = np.array([[0.2, 0.8], [0.4, 0.6], [0.3, 0.7]])
    stats = np.stack([estimates.sum(axis=0), (estimates**2).sum(axis=0)])
    mean, err = mc_combine(stats, 3)
    np.testing.assert_allclose(mean, estimates.mean(axis=0), atol=1e-15)
    np.testing.assert_allclose(
        err, estimates.std(axis=0, ddof=1) / np.sqrt(3), atol=1e-15
    )


def test_mc_batch_additivity(rng):
    # two half-batches reduce exactly like one full batch with the same draws
    x = BarycentricVector((0.4, 0.6))
    r1 = np.random.default_rng(5)
    full = mc_batch(x, 4, 40, 50, r1)
    r2 = np.random.default_rng(5)
    split = mc_batch(x, 4, 20, 50, r2) + mc_batch(x, 4, 20, 50, r2)
    np.testing.assert_allclose(full, split, atol=1e-12)


def test_symmetric_state_average_is_uniform():
    x = BarycentricVector((1 / 3, 1 / 3, 1 / 3))
    for n_c in (1, 4, 9, 16):
        np.testing.assert_allclose(
            universal_probability_exact(x, n_c), np.full(3, 1 / 3), atol=1e-12
        )


def test_exact_average_with_partition(rng):
    # the average is linear, so block probabilities are block sums of x
    part = OutcomePartition.of([[1, 3], [2]])
    for n_c in (1, 4, 9):
        x = BarycentricVector(tuple(random_interior_state(rng, 3)))
        probs = universal_probability_exact(x, n_c, part)
        expected = np.array(
            [x.components[0] + x.components[2], x.components[1]]
        )
        assert probs.shape == (2,)
        np.testing.assert_allclose(probs, expected, atol=1e-12)
    with pytest.raises(ValueError):
        universal_probability_exact(BarycentricVector((0.5, 0.5)), 2, part)


def test_mc_average_with_partition(rng):
    x = BarycentricVector(tuple(random_interior_state(rng, 4)))
    part = OutcomePartition.of([[1, 2], [3, 4]])
    probs, errs = universal_probability_mc(x, 8, 400, 400, rng, part)
    target = np.array(
        [x.components[0] + x.components[1], x.components[2] + x.components[3]]
    )
    assert probs.shape == errs.shape == (2,)
    assert (errs > 0).all()
    assert abs(probs.sum() - 1.0) < 1e-9
    assert (np.abs(probs - target) <= 4 * errs + 1e-12).all()
    with pytest.raises(ValueError):
        mc_batch(x, 8, 4, 4, rng, OutcomePartition.singletons(3))


def test_mc_agrees_with_exact_two_outcomes(rng):
    x = BarycentricVector((0.3, 0.7))
    exact = universal_probability_exact(x, 5)
    probs, errs = universal_probability_mc(x, 5, 600, 400, rng)
    assert (np.abs(probs - exact) <= 4 * errs + 1e-12).all()


def test_convergence_scan_with_partition(rng):
    x = BarycentricVector(tuple(random_interior_state(rng, 3)))
    part = OutcomePartition.of([[2, 3], [1]])
    rows = convergence_scan(x, [4, 9], partition=part)
    assert len(rows) == 4
    target = {1: x.components[1] + x.components[2], 2: x.components[0]}
    for r in rows:
        assert abs(r["probability"] - target[r["outcome_index"]]) < 1e-12
        assert abs(r["deviation"]) < 1e-12


def test_convergence_scan_exact_and_mc(rng):
    x = BarycentricVector((0.25, 0.75))
    rows = convergence_scan(x, [1, 2, 3], method="exact")
    assert len(rows) == 6
    for r in rows:
        assert r["stderr"] == 0.0
        assert abs(r["deviation"]) < 1e-12
    rows = convergence_scan(
        x, [4], rng=rng, method="mc", density_samples=300, point_samples=300
    )
    for r in rows:
        assert abs(r["deviation"]) <= 4 * r["stderr"] + 1e-12
    with pytest.raises(ValueError):
        convergence_scan(x, [2], method="bogus")
    with pytest.raises(ValueError):
        convergence_scan(x, [2], method="mc")  # rng required
