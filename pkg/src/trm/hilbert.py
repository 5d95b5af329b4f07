"""Complex Hilbert-space oracle for the simplex measurement law.

Finite-dimensional pure states and projective measurements with possibly
degenerate eigenvalues.  The squared moduli of a state's coordinates in a
measurement eigenbasis form a barycentric vector, and under that mapping the
Born rule, degenerate block probabilities, and projective collapse agree
with the uniform simplex law component by component.  This module is kept
deliberately independent of the simplex code paths so the two can be
compared as separate routes to the same numbers.

States serialize as JSON arrays of [re, im] pairs.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ImpossibleOutcomeError
from .simplex import BarycentricVector, OutcomePartition, iter_partitions
from .utr import collapse as utr_collapse
from .utr import outcome_probabilities, product_relation_residuals

__all__ = [
    "CorrespondenceReport",
    "HilbertObservable",
    "HilbertState",
    "ProductCheck",
    "born_probabilities",
    "collapse",
    "is_product_state",
    "state_from_json",
    "state_to_json",
    "tensor",
    "utr_correspondence",
]

NORM_TOL = 1e-9


@dataclass(frozen=True)
class HilbertState:
    """Pure state: complex amplitudes with unit norm (within NORM_TOL,
    renormalized exactly on construction)."""

    amplitudes: tuple[complex, ...]

    def __post_init__(self) -> None:
        amps = tuple(complex(a) for a in self.amplitudes)
        if len(amps) < 2:
            raise ValueError("a state needs at least two amplitudes")
        norm = math.sqrt(math.fsum(abs(a) ** 2 for a in amps))
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state norm {norm} is not 1 within {NORM_TOL}")
        object.__setattr__(self, "amplitudes", tuple(a / norm for a in amps))

    @property
    def n(self) -> int:
        return len(self.amplitudes)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.amplitudes, dtype=complex)

    def moduli_squared(self) -> np.ndarray:
        return np.abs(self.as_array()) ** 2

    def to_barycentric(self) -> BarycentricVector:
        return BarycentricVector(tuple(self.moduli_squared()))


@dataclass(frozen=True)
class HilbertObservable:
    """Projective measurement: an orthonormal eigenbasis, a grouping of the
    basis indices into outcome blocks, and one eigenvalue per block.

    basis[i] is the i-th eigenvector; block eigenvalues must be pairwise
    distinct, otherwise two blocks would describe the same outcome.
    """

    basis: tuple[tuple[complex, ...], ...]
    partition: OutcomePartition
    eigenvalues: tuple[float, ...]

    def __post_init__(self) -> None:
        rows = tuple(tuple(complex(a) for a in row) for row in self.basis)
        m = np.asarray(rows, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"eigenbasis must be square, got shape {m.shape}")
        n = m.shape[0]
        gram = m.conj() @ m.T
        if np.max(np.abs(gram - np.eye(n))) > NORM_TOL:
            raise ValueError("eigenbasis is not orthonormal")
        if self.partition.n != n:
            raise ValueError(
                f"grouping covers 1..{self.partition.n} but basis has {n} vectors"
            )
        eigs = tuple(float(v) for v in self.eigenvalues)
        if len(eigs) != self.partition.n_blocks:
            raise ValueError(
                f"{len(eigs)} eigenvalues for {self.partition.n_blocks} blocks"
            )
        if len(set(eigs)) != len(eigs):
            raise ValueError(f"block eigenvalues must be distinct, got {eigs}")
        object.__setattr__(self, "basis", rows)
        object.__setattr__(self, "eigenvalues", eigs)

    @classmethod
    def standard(
        cls,
        n: int,
        partition: OutcomePartition | None = None,
        basis: np.ndarray | None = None,
    ) -> "HilbertObservable":
        """Observable on the computational basis (or a supplied one) with
        eigenvalues 1..k."""
        p = partition if partition is not None else OutcomePartition.singletons(n)
        b = np.eye(n, dtype=complex) if basis is None else np.asarray(basis, dtype=complex)
        eigs = tuple(float(k) for k in range(1, p.n_blocks + 1))
        return cls(tuple(tuple(row) for row in b), p, eigs)

    @property
    def n(self) -> int:
        return len(self.basis)

    def basis_matrix(self) -> np.ndarray:
        return np.asarray(self.basis, dtype=complex)

    def coordinates(self, state: HilbertState) -> np.ndarray:
        """Amplitudes of the state in the eigenbasis, c_i = <a_i|psi>."""
        if state.n != self.n:
            raise ValueError(f"dimension mismatch: state {state.n}, basis {self.n}")
        return self.basis_matrix().conj() @ state.as_array()


def born_probabilities(state: HilbertState, obs: HilbertObservable) -> np.ndarray:
    """Block outcome probabilities: sums of |<a_i|psi>|^2 over each block."""
    w = np.abs(obs.coordinates(state)) ** 2
    return np.array(
        [w[[i - 1 for i in sorted(b)]].sum() for b in obs.partition.blocks]
    )


def collapse(state: HilbertState, obs: HilbertObservable, block_index: int) -> HilbertState:
    """Project onto the block's eigenspace and renormalize.

    Raises ImpossibleOutcomeError when the block has zero Born weight.
    """
    if not 1 <= block_index <= obs.partition.n_blocks:
        raise ValueError(
            f"block index {block_index} outside 1..{obs.partition.n_blocks}"
        )
    coords = obs.coordinates(state)
    mask = np.zeros(obs.n, dtype=bool)
    mask[[i - 1 for i in obs.partition.blocks[block_index - 1]]] = True
    projected = np.where(mask, coords, 0.0 + 0.0j)
    norm = float(np.linalg.norm(projected))
    if norm == 0.0:
        raise ImpossibleOutcomeError(
            f"block {block_index} has zero weight in state {state.amplitudes}"
        )
    psi = obs.basis_matrix().T @ (projected / norm)
    return HilbertState(tuple(psi))


def tensor(a: HilbertState, b: HilbertState) -> HilbertState:
    """Composite of two subsystem states, ordered |i,j> = |i>|j>."""
    return HilbertState(tuple(np.kron(a.as_array(), b.as_array())))


@dataclass(frozen=True)
class ProductCheck:
    """Verdict on whether a two-qubit state factors, with both witnesses:
    the amplitude determinant and the four probability product residuals."""

    is_product: bool
    determinant_residual: float
    law_residuals: tuple[float, float, float, float]


def is_product_state(state: HilbertState, tol: float = 1e-9) -> ProductCheck:
    """A four-amplitude state factors exactly when psi1*psi4 == psi2*psi3.

    The probability residuals are reported alongside: they vanish for every
    product state but, unlike the determinant, cannot see phases.
    """
    if state.n != 4:
        raise ValueError(f"product structure is defined for four amplitudes, not {state.n}")
    a1, a2, a3, a4 = state.amplitudes
    det = abs(a1 * a4 - a2 * a3)
    residuals = product_relation_residuals(state.moduli_squared())
    return ProductCheck(det <= tol, det, residuals)


def product_state(
    a: float, b: float, c: float, d: float, alpha: float, beta: float, gamma: float, delta: float
) -> HilbertState:
    """Tensor product of (sqrt(a) e^{i alpha}, sqrt(b) e^{i beta}) and
    (sqrt(c) e^{i delta}, sqrt(d) e^{i gamma}) built from the closed form."""
    return HilbertState(
        (
            math.sqrt(a * c) * cmath.exp(1j * (alpha + delta)),
            math.sqrt(a * d) * cmath.exp(1j * (alpha + gamma)),
            math.sqrt(b * c) * cmath.exp(1j * (beta + delta)),
            math.sqrt(b * d) * cmath.exp(1j * (beta + gamma)),
        )
    )


@dataclass(frozen=True)
class CorrespondenceReport:
    ok: bool
    max_deviation: float
    partitions_checked: int


def utr_correspondence(
    state: HilbertState,
    basis: np.ndarray | None = None,
    tol: float = 1e-12,
) -> CorrespondenceReport:
    """Compare the Hilbert route against the simplex route on every grouping.

    The state's squared moduli in the eigenbasis define a barycentric vector
    x.  For every partition of the basis indices, block Born probabilities
    must match the block sums of x, and the squared moduli of the collapsed
    state must match the renormalized restriction of x, all within tol.
    """
    n = state.n
    base = np.eye(n, dtype=complex) if basis is None else np.asarray(basis, dtype=complex)
    coords = base.conj() @ state.as_array()
    x = BarycentricVector(tuple(np.abs(coords) ** 2))
    worst = 0.0
    checked = 0
    for blocks in iter_partitions(n):
        partition = OutcomePartition(blocks)
        obs = HilbertObservable.standard(n, partition, base)
        born = born_probabilities(state, obs)
        law = outcome_probabilities(x, partition)
        worst = max(worst, float(np.max(np.abs(born - law))))
        for k in range(1, partition.n_blocks + 1):
            if law[k - 1] == 0.0:
                continue
            post = collapse(state, obs, k)
            post_coords = np.abs(base.conj() @ post.as_array()) ** 2
            post_law = utr_collapse(x, partition, k).as_array()
            worst = max(worst, float(np.max(np.abs(post_coords - post_law))))
        checked += 1
    return CorrespondenceReport(worst <= tol, worst, checked)


def state_to_json(state: HilbertState) -> list[list[float]]:
    return [[a.real, a.imag] for a in state.amplitudes]


def state_from_json(doc: Sequence[Sequence[float]]) -> HilbertState:
    try:
        amps = tuple(complex(float(re), float(im)) for re, im in doc)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"amplitudes must be [re, im] pairs: {exc}") from None
    return HilbertState(amps)
