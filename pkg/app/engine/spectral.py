"""
Spectral radii of nonnegative matrices.

spectral_radius runs power iteration on A + I. The shift leaves r(A) + 1 as the unique
dominant value whenever A is irreducible, and Collatz-Wielandt ratios of the iterate bracket
r(A) + 1 from both sides. When the bracket stalls (reducible matrices, nilpotent parts) the
Gelfand estimator ||A^(2^k)||^(1/2^k) takes over. eig_oracle is an independent check for small n.
"""

import math
from enum import Enum
from typing import List, NamedTuple, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from core.core_model import NonNegMatrix, Tolerances
from core.errors import (DimensionTooLarge, EmptyVector, NoConvergence,
                         RootFindingStalled)
from logger import build_logger

logger = build_logger(__name__)

SHIFT = 1.0
# The bracket is checked for progress every STALL_WINDOW iterations.
STALL_WINDOW = 64
STALL_RATIO = 0.9
GELFAND_K_MAX = 64
# Largest n * max(A) for which A x is computed without rescaling A.
OVERFLOW_GUARD = 2.0 ** 512
ORACLE_MAX_N = 12
ORACLE_BACKWARD_ERROR = 1e-12
ORACLE_MAX_SWEEPS = 5000
ORACLE_POLISH_SWEEPS = 2


class SpectralMethod(str, Enum):
    POWER_ITERATION = "PowerIteration"
    GELFAND = "Gelfand"
    CHAR_POLY_ORACLE = "CharPolyOracle"


class SpectralResult(BaseModel):
    """
    Attributes:
        radius (float): The spectral radius estimate.
        method (SpectralMethod): Algorithm that produced the value.
        iterations (int): Power iterations, squaring steps or Durand-Kerner sweeps.
        residual (float): ||Bx - rho x|| / ||x|| for power iteration, the gap between the last two
            estimates for Gelfand, the polynomial backward error for the oracle.
    """

    model_config = ConfigDict(frozen=True)

    radius: float = Field(ge=0)
    method: SpectralMethod
    iterations: int = Field(ge=0)
    residual: float = Field(ge=0)


class PowerOutcome(NamedTuple):
    shifted_radius: float
    vector: np.ndarray
    iterations: int
    lower: float
    upper: float
    residual: float
    converged: bool


def collatz_wielandt_bounds(matrix: np.ndarray, x: np.ndarray) -> Tuple[float, float]:
    """
    Min and max of (Mx)_i / x_i over the strictly positive coordinates of x.
    For a strictly positive x they bracket r(M) of any nonnegative M.
    """
    x = np.asarray(x, dtype=float)
    if x.size == 0:
        raise EmptyVector()
    positive = x > 0
    ratios = (matrix @ x)[positive] / x[positive]
    return float(ratios.min()), float(ratios.max())


def _overflow_scale(matrix: np.ndarray) -> float:
    """Power of two that brings the largest entry near 1 when matrix-vector products could overflow, else 1."""
    largest = float(np.max(matrix)) if matrix.size else 0.0
    if largest * matrix.shape[0] <= OVERFLOW_GUARD:
        return 1.0
    return math.ldexp(1.0, math.frexp(largest)[1] - 1)


def shifted_power_iteration(
        matrix: np.ndarray,
        tol: Tolerances,
        start: Optional[np.ndarray] = None,
        detect_stall: bool = True,
        scale: float = 1.0,
) -> PowerOutcome:
    """
    Power iteration on matrix + SHIFT*I, stopped by the Collatz-Wielandt bracket.

    :param matrix: A dense nonnegative square array.
    :param tol: tol_spec is the bracket target, max_iter the budget.
    :param start: Strictly positive start vector. Defaults to all ones.
    :param detect_stall: Give up early when the bracket stops shrinking. Callers without a
        fallback pass False and spend the whole max_iter budget.
    :param scale: matrix is some original matrix divided by scale; the target accuracy is
        expressed in the original units.
    :return: PowerOutcome with the shifted radius estimate (midpoint of the bracket).
    """
    n = matrix.shape[0]
    shifted = matrix + SHIFT * np.eye(n)
    x = np.ones(n) if start is None else np.asarray(start, dtype=float) / np.max(start)

    width_then = math.inf
    lower = upper = SHIFT
    iteration = 0
    converged = False
    while iteration < tol.max_iter:
        iteration += 1
        y = shifted @ x
        # shifted >= I keeps every coordinate positive unless it underflows.
        positive = x > 0
        ratios = y[positive] / x[positive]
        lower, upper = float(ratios.min()), float(ratios.max())
        x = y / y.max()

        width = upper - lower
        if width <= tol.tol_spec * max(1.0 / scale, 0.5 * (lower + upper) - SHIFT):
            converged = True
            break
        if detect_stall and iteration % STALL_WINDOW == 0:
            if width > STALL_RATIO * width_then:
                logger.debug(f"Collatz-Wielandt bracket stalled at width {width:.3e} after {iteration} iterations.")
                break
            width_then = width

    rho = 0.5 * (lower + upper)
    residual = float(np.max(np.abs(shifted @ x - rho * x)) / np.max(x))
    return PowerOutcome(rho, x, iteration, lower, upper, residual, converged)


def gelfand_estimate(A: NonNegMatrix, k_max: int = GELFAND_K_MAX) -> SpectralResult:
    """
    ||A^(2^k)||_inf^(1/2^k) by repeated squaring with per-step normalisation.

    The log of the discarded scale is tracked, starting from the largest entry of A, so neither
    overflow nor underflow occurs for any k_max. The estimate is biased upwards and converges to r(A).

    :param A: The matrix.
    :param k_max: Number of squarings, at least 1.
    :return: SpectralResult whose residual is the gap between the last two finite estimates.
    :raise NoConvergence: r(A) itself exceeds the float range.
    """
    if k_max < 1:
        raise ValueError("k_max must be >= 1")

    largest = float(np.max(A.entries))
    if largest == 0.0:
        return SpectralResult(radius=0.0, method=SpectralMethod.GELFAND, iterations=0, residual=0.0)
    # A^(2^k) = power * exp(log_scale)
    power = np.array(A.entries, dtype=float) / largest
    log_scale = math.log(largest)
    previous = None
    estimate = None
    residual = 0.0
    k = 0
    for k in range(0, k_max + 1):
        norm = float(np.max(power.sum(axis=1)))
        if norm == 0.0:
            return SpectralResult(radius=0.0, method=SpectralMethod.GELFAND, iterations=k, residual=0.0)

        log_total = log_scale + math.log(norm)
        try:
            candidate = math.exp(log_total / 2.0 ** k)
        except OverflowError:
            candidate = math.inf
        if math.isfinite(candidate):
            estimate = candidate
            residual = abs(estimate - previous) if previous is not None else estimate
            previous = estimate
        if k == k_max:
            break

        power = power / norm
        power = power @ power
        log_scale = 2.0 * log_total

    if estimate is None:
        raise NoConvergence("gelfand_estimate (radius beyond the float range)", k)
    return SpectralResult(radius=estimate, method=SpectralMethod.GELFAND, iterations=k, residual=residual)


def spectral_radius(A: NonNegMatrix, tol: Optional[Tolerances] = None) -> SpectralResult:
    """
    r(A) of a nonnegative matrix to within max(tol_spec, tol_spec * r(A)).

    Matrices whose products could overflow are divided by a power of two first, which is exact.

    :raise NoConvergence: Neither power iteration nor the Gelfand fallback reached tolerance.
    """
    tol = tol or Tolerances()
    scale = _overflow_scale(A.entries)
    outcome = shifted_power_iteration(A.entries / scale, tol, scale=scale)
    if outcome.converged:
        return SpectralResult(
            radius=max(0.0, outcome.shifted_radius - SHIFT) * scale,
            method=SpectralMethod.POWER_ITERATION,
            iterations=outcome.iterations,
            residual=outcome.residual * scale,
        )

    logger.debug(f"Power iteration fell back to the Gelfand estimator (n={A.n}).")
    estimate = gelfand_estimate(A, GELFAND_K_MAX)
    if estimate.residual <= tol.tol_spec * max(1.0, estimate.radius):
        return estimate

    raise NoConvergence("spectral_radius", outcome.iterations + estimate.iterations, estimate.residual)


def characteristic_polynomial(A: NonNegMatrix) -> np.ndarray:
    """
    Monic characteristic polynomial by Faddeev-LeVerrier, highest degree first.

    :return: Array [1, c_(n-1), ..., c_0].
    """
    n = A.n
    matrix = A.entries
    identity = np.eye(n)
    coefficients = np.zeros(n + 1)
    coefficients[0] = 1.0
    auxiliary = np.zeros((n, n))
    for k in range(1, n + 1):
        auxiliary = matrix @ auxiliary + coefficients[k - 1] * identity
        coefficients[k] = -np.trace(matrix @ auxiliary) / k
    return coefficients


def _backward_error(coefficients: np.ndarray, z: np.ndarray) -> float:
    values = np.abs(np.polyval(coefficients, z))
    scale = np.polyval(np.abs(coefficients), np.abs(z))
    return float(np.max(values / np.maximum(1.0, scale)))


def durand_kerner(coefficients: np.ndarray) -> Tuple[np.ndarray, int, float]:
    """
    All roots of a monic polynomial by simultaneous (Weierstrass) iteration.

    Start points lie on a circle whose radius is the Cauchy bound 1 + max|c_i|.

    :return: (roots, sweeps, backward error)
    :raise RootFindingStalled
    """
    degree = len(coefficients) - 1
    if degree == 0:
        return np.zeros(0, dtype=complex), 0, 0.0

    radius = 1.0 + float(np.max(np.abs(coefficients[1:])))
    angles = 2.0 * np.pi * np.arange(degree) / degree + 0.4
    z = radius * np.exp(1j * angles)

    def sweep(points):
        differences = points[:, None] - points[None, :]
        np.fill_diagonal(differences, 1.0)
        return points - np.polyval(coefficients, points) / differences.prod(axis=1)

    backward = math.inf
    with np.errstate(divide="ignore", invalid="ignore"):
        for iteration in range(1, ORACLE_MAX_SWEEPS + 1):
            z = sweep(z)
            if not np.all(np.isfinite(z)):
                raise RootFindingStalled(iteration, backward)
            backward = _backward_error(coefficients, z)
            if backward <= ORACLE_BACKWARD_ERROR:
                for _ in range(ORACLE_POLISH_SWEEPS):
                    polished = sweep(z)
                    if np.all(np.isfinite(polished)) and _backward_error(coefficients, polished) <= backward:
                        z = polished
                        backward = _backward_error(coefficients, z)
                return z, iteration, backward

    raise RootFindingStalled(ORACLE_MAX_SWEEPS, backward)


def eig_oracle(A: NonNegMatrix) -> List[complex]:
    """
    Every eigenvalue of a small matrix, sorted by decreasing modulus.

    :raise DimensionTooLarge: n > 12.
    :raise RootFindingStalled
    """
    if A.n > ORACLE_MAX_N:
        raise DimensionTooLarge(A.n, ORACLE_MAX_N)
    roots, _, _ = durand_kerner(characteristic_polynomial(A))
    return sorted((complex(z) for z in roots), key=lambda z: (-abs(z), -z.real, -z.imag))


def oracle_radius(A: NonNegMatrix) -> SpectralResult:
    """max |lambda| over eig_oracle, tagged CharPolyOracle."""
    if A.n > ORACLE_MAX_N:
        raise DimensionTooLarge(A.n, ORACLE_MAX_N)
    roots, sweeps, backward = durand_kerner(characteristic_polynomial(A))
    return SpectralResult(
        radius=float(np.max(np.abs(roots))),
        method=SpectralMethod.CHAR_POLY_ORACLE,
        iterations=sweeps,
        residual=backward,
    )
