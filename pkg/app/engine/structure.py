"""
Structural certificates for nonnegative matrices.

Edge convention: i -> j whenever A[j][i] > 0, i.e. mass flows from coordinate i into
coordinate j under x -> Ax. Strong connectivity does not depend on the direction, but the
tests rely on this one.
"""

from typing import Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_serializer
from scipy.sparse.csgraph import connected_components

from core.core_model import NonNegMatrix, Tolerances
from core.errors import EmptyVector, NoConvergence, NotIrreducible
from engine.spectral import SHIFT, shifted_power_iteration, spectral_radius
from logger import build_logger

logger = build_logger(__name__)

COMPUTED_POSITIVITY_FLOOR = 1e-12


class PerronPair(BaseModel):
    """
    Attributes:
        value (float): The spectral radius.
        right_vec (np.ndarray): Strictly positive right eigenvector, inf-norm 1.
        left_vec (np.ndarray): Strictly positive left eigenvector (eigenfunctional), inf-norm 1.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    value: float = Field(ge=0)
    right_vec: np.ndarray
    left_vec: np.ndarray

    @field_serializer("right_vec", "left_vec")
    def _as_list(self, vector: np.ndarray):
        return vector.tolist()


def strongly_connected_components(A: NonNegMatrix) -> Tuple[int, np.ndarray]:
    """
    :return: (number of strongly connected components, component label per coordinate)
    """
    adjacency = (A.entries > 0).T
    count, labels = connected_components(adjacency, directed=True, connection="strong")
    return int(count), labels


def is_irreducible(A: NonNegMatrix) -> bool:
    """
    True iff the digraph of A is strongly connected. A 1 x 1 matrix is irreducible iff its
    entry is positive.
    """
    if A.n == 1:
        return bool(A.entries[0, 0] > 0)
    count, _ = strongly_connected_components(A)
    return count == 1


def is_almost_interior(x, computed: bool = False) -> bool:
    """
    An orthant vector is almost interior iff every coordinate is strictly positive.

    :param x: A nonnegative vector.
    :param computed: Use the roundoff floor 1e-12 * ||x||_inf instead of exact positivity.
    :raise EmptyVector
    """
    vector = np.asarray(x, dtype=float).ravel()
    if vector.size == 0:
        raise EmptyVector()
    floor = COMPUTED_POSITIVITY_FLOOR * float(np.max(np.abs(vector))) if computed else 0.0
    return bool(np.all(vector > floor))


def perron_pair(
        A: NonNegMatrix, tol: Optional[Tolerances] = None, start: Optional[np.ndarray] = None
) -> PerronPair:
    """
    Perron value and strictly positive left/right eigenvectors of an irreducible matrix.

    :param start: Strictly positive start vector for both iterations. Defaults to all ones.
    :raise NotIrreducible
    :raise NoConvergence: An iteration failed, or a vector is not strictly positive.
    """
    tol = tol or Tolerances()
    if not is_irreducible(A):
        count, _ = strongly_connected_components(A)
        raise NotIrreducible(count)

    # The vectors have no Gelfand fallback: nearly periodic matrices run to max_iter.
    right = shifted_power_iteration(A.entries, tol, start, detect_stall=False)
    left = shifted_power_iteration(A.entries.T, tol, start, detect_stall=False)
    for side, outcome in (("right", right), ("left", left)):
        if not outcome.converged:
            raise NoConvergence(f"perron_pair ({side})", outcome.iterations, outcome.residual)
        if not is_almost_interior(outcome.vector, computed=True):
            raise NoConvergence(f"perron_pair ({side} vector not strictly positive)", outcome.iterations)

    value = spectral_radius(A, tol).radius
    logger.debug(
        f"Perron pair: value={value!r}, shifted estimates {right.shifted_radius - SHIFT!r} / "
        f"{left.shifted_radius - SHIFT!r}."
    )
    return PerronPair(
        value=value,
        right_vec=right.vector / np.max(right.vector),
        left_vec=left.vector / np.max(left.vector),
    )
