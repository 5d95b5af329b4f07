"""Two-outcome measurements on the sphere of radius 1/sqrt(2).

A state is a point on the sphere; measuring along a direction u makes the
state fall orthogonally onto the diameter from -u to +u, landing at on-axis
coordinate z_a = cos(theta)/sqrt(2) where theta is the angle between state
and direction.  A one-dimensional break density on the diameter then decides
the outcome: mass at or below the landing point contracts the state to +u,
the rest to -u, with an atom exactly at the landing point splitting evenly.

With the Epsilon(e) density this gives the closed-form transition law of
gtr.epsilon_probability; at e == 1 it is the squared-half-angle law.

The module also builds the standard three-direction experiment (two steps
of sequential measurement along w, v, u at angles pi/4 and pi/2) whose
joint probabilities violate the single-probability-space inequality
P(V and W) - P(U and W) <= P(not-U and V) for every e in (0, 1]:
below e = sqrt(2)/2 the joints are exactly (1, 0, 1/2) with margin 1/2,
and at e = 1 they are the squared-half-angle values, still violating with
margin (3*sqrt(2) - 2)/8.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .gtr import (
    DensitySpec,
    Epsilon,
    Z_MAX,
    sample_break_point,
    transition_probabilities_1d,
)

__all__ = [
    "BlochVector",
    "CounterexampleReport",
    "MeasureResult",
    "RADIUS",
    "SequentialRecord",
    "counterexample_bundle",
    "counterexample_directions",
    "fall",
    "kolmogorov_counterexample",
    "measure",
    "sequential_joint",
    "transition_probability",
]

RADIUS = 1.0 / math.sqrt(2.0)

NORM_TOL = 1e-9


@dataclass(frozen=True)
class BlochVector:
    """A point of the state sphere: three coordinates of norm 1/sqrt(2),
    renormalized exactly on construction."""

    coords: tuple[float, float, float]

    def __post_init__(self) -> None:
        c = tuple(float(v) for v in self.coords)
        if len(c) != 3:
            raise ValueError(f"need three coordinates, got {len(c)}")
        norm = math.sqrt(math.fsum(v * v for v in c))
        if abs(norm - RADIUS) > NORM_TOL:
            raise ValueError(f"norm {norm} is not {RADIUS} within {NORM_TOL}")
        object.__setattr__(self, "coords", tuple(v * (RADIUS / norm) for v in c))

    @classmethod
    def from_angles(cls, theta: float, phi: float = 0.0) -> "BlochVector":
        """Polar angle theta from +z, azimuth phi, on the radius-1/sqrt(2) sphere."""
        s = math.sin(theta)
        return cls(
            (RADIUS * s * math.cos(phi), RADIUS * s * math.sin(phi), RADIUS * math.cos(theta))
        )

    def as_array(self) -> np.ndarray:
        return np.asarray(self.coords, dtype=float)

    def __neg__(self) -> "BlochVector":
        return BlochVector(tuple(-v for v in self.coords))


@dataclass(frozen=True)
class MeasureResult:
    sign: int
    post_state: BlochVector
    break_coordinate: float


@dataclass(frozen=True)
class SequentialRecord:
    """A chain of (direction, sign) measurement outcomes and its probability."""

    steps: tuple[tuple[BlochVector, int], ...]
    probability: float


def fall(w: BlochVector, u: BlochVector) -> float:
    """cos(theta) between state and direction: twice their dot product."""
    c = 2.0 * float(np.dot(w.as_array(), u.as_array()))
    return max(-1.0, min(1.0, c))


def transition_probability(
    w: BlochVector, u: BlochVector, density: DensitySpec
) -> tuple[float, float]:
    """(p_plus, p_minus) of measuring direction u on state w."""
    return transition_probabilities_1d(fall(w, u), density)


def measure(
    w: BlochVector, u: BlochVector, density: DensitySpec, rng: np.random.Generator
) -> MeasureResult:
    """Sample one measurement: draw a break coordinate and compare it with
    the landing point.  The post state is +-u."""
    z_a = fall(w, u) * Z_MAX
    z = sample_break_point(density, rng)
    if not isinstance(z, float):
        raise ValueError("sphere measurements need a one-dimensional density")
    if z < z_a:
        sign = 1
    elif z > z_a:
        sign = -1
    else:
        sign = 1 if rng.random() < 0.5 else -1
    return MeasureResult(sign, u if sign == 1 else -u, z)


def sequential_joint(
    start: BlochVector,
    steps: Sequence[tuple[BlochVector, int]],
    density: DensitySpec,
) -> SequentialRecord:
    """Joint probability of a chain of signed outcomes, collapsing to +-u
    after each step and multiplying the conditional probabilities."""
    state = start
    prob = 1.0
    norm_steps: list[tuple[BlochVector, int]] = []
    for direction, sign in steps:
        if sign not in (1, -1):
            raise ValueError(f"outcome sign must be +1 or -1, got {sign}")
        p_plus, p_minus = transition_probability(state, direction, density)
        prob *= p_plus if sign == 1 else p_minus
        state = direction if sign == 1 else -direction
        norm_steps.append((direction, sign))
    return SequentialRecord(tuple(norm_steps), prob)


def counterexample_directions() -> tuple[BlochVector, BlochVector, BlochVector]:
    """The three coplanar directions w, v, u with angle(w,v) = pi/4 and
    angle(v,u) = pi/2, so angle(w,u) = 3*pi/4."""
    w = BlochVector((RADIUS, 0.0, 0.0))
    v = BlochVector((0.5, 0.5, 0.0))
    u = BlochVector((-0.5, 0.5, 0.0))
    return w, v, u


@dataclass(frozen=True)
class CounterexampleReport:
    epsilon: float
    joints: tuple[float, float, float]
    margin: float
    violated: bool


def kolmogorov_counterexample(epsilon: float) -> CounterexampleReport:
    """Joint probabilities of the three-direction experiment under Epsilon.

    The three joints, all starting from state w, are

        J1 = P(+w then +v)   J2 = P(+w then +u)   J3 = P(+v then -u)

    A single probability space would force J1 - J2 <= J3; the report's
    margin is J1 - J2 - J3 and `violated` says the inequality fails.
    """
    density = Epsilon(epsilon)
    w, v, u = counterexample_directions()
    j1 = sequential_joint(w, [(w, 1), (v, 1)], density).probability
    j2 = sequential_joint(w, [(w, 1), (u, 1)], density).probability
    j3 = sequential_joint(w, [(v, 1), (u, -1)], density).probability
    margin = j1 - j2 - j3
    return CounterexampleReport(float(epsilon), (j1, j2, j3), margin, margin > 1e-12)


def counterexample_bundle(epsilon: float) -> dict:
    """The same experiment packaged for the model checker: the three joints
    plus the pairwise transition probabilities (w->v, v->u, w->u)."""
    density = Epsilon(epsilon)
    w, v, u = counterexample_directions()
    rep = kolmogorov_counterexample(epsilon)
    j1, j2, j3 = rep.joints
    return {
        "joints": [{"p_vw": j1, "p_uw": j2, "p_ucv": j3}],
        "transitions": [
            {
                "p_ab": transition_probability(w, v, density)[0],
                "p_bc": transition_probability(v, u, density)[0],
                "p_ac": transition_probability(w, u, density)[0],
            }
        ],
    }
