"""
Resolvents (lambda I - T)^-1, next-generation operators F (lambda I - T)^-1 and the basic
reproduction number R0 = r(F (I - T)^-1).

The map lambda -> r(F (lambda I - T)^-1) is non-increasing and convex on (r(T), inf). When
R0 > 1 it crosses 1 exactly at lambda = r(A), which bisect_radius exploits.
"""

import warnings
from concurrent.futures import ThreadPoolExecutor
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np
import scipy.linalg
from pydantic import BaseModel, ConfigDict, Field, model_validator

from core.core_model import NonNegMatrix, SplitSystem, Tolerances
from core.errors import (BadRange, CaseOneCurve, LambdaTooSmall, NearBoundary,
                         NoConvergence, SingularSolve)
from engine.spectral import SpectralResult, spectral_radius
from logger import build_logger

logger = build_logger(__name__)

# Negative entries below CLAMP_RELATIVE * ||result||_inf are roundoff.
CLAMP_RELATIVE = 1e-12
MAX_BRACKET = 2.0 ** 60
MAX_BISECTION_STEPS = 200


class CurveCase(str, Enum):
    CROSSES_ONE = "CrossesOne"
    BELOW_ONE = "BelowOne"


class CurveSample(BaseModel):
    """
    Sampled values of lambda -> r(F (lambda I - T)^-1) with their shape audit.

    Attributes:
        points (List[Tuple[float, float]]): (lambda, radius) pairs, lambda strictly increasing.
        monotone_ok (bool): Every consecutive difference is <= +tol_eq.
        convex_ok (bool): Every second difference is >= -tol_eq.
        max_violation (float): Worst violation of either audit, 0 when both hold exactly.
    """

    model_config = ConfigDict(frozen=True)

    points: List[Tuple[float, float]]
    monotone_ok: bool
    convex_ok: bool
    max_violation: float = Field(ge=0)

    @model_validator(mode="after")
    def _check_points(self):
        lambdas = [p[0] for p in self.points]
        if any(b <= a for a, b in zip(lambdas, lambdas[1:])):
            raise ValueError("lambdas must be strictly increasing")
        if any(p[1] < 0 for p in self.points):
            raise ValueError("radii must be nonnegative")
        return self

    @property
    def lambdas(self) -> List[float]:
        return [p[0] for p in self.points]

    @property
    def radii(self) -> List[float]:
        return [p[1] for p in self.points]


class BisectionResult(BaseModel):
    """
    Attributes:
        radius (float): lambda* when the curve crosses 1, otherwise r(A) returned directly.
        lambda_star (Optional[float]): The crossing point, None on the case-one path.
        curve_case (CurveCase): Which branch of the curve dichotomy was detected.
        spectral_check (float): spectral_radius(A), computed independently.
        discrepancy (float): |radius - spectral_check|.
        iterations (int): Bracket doublings plus bisection steps.
    """

    model_config = ConfigDict(frozen=True)

    radius: float
    lambda_star: Optional[float] = None
    curve_case: CurveCase
    spectral_check: float
    discrepancy: float
    iterations: int


def _tolerances(sys: SplitSystem, tol: Optional[Tolerances]) -> Tolerances:
    return tol or sys.tolerances


def _norm_inf(matrix: np.ndarray) -> float:
    return float(np.max(np.abs(matrix).sum(axis=1))) if matrix.size else 0.0


def clamp_nonnegative(matrix: np.ndarray, what: str = "result") -> Tuple[np.ndarray, float]:
    """
    Zero the negative entries of a matrix that is nonnegative in exact arithmetic.

    :return: (clamped matrix, largest clamped magnitude)
    """
    negative = matrix < 0
    if not negative.any():
        return matrix, 0.0

    max_clamp = float(-matrix[negative].min())
    threshold = CLAMP_RELATIVE * max(_norm_inf(matrix), np.finfo(float).tiny)
    if max_clamp > threshold:
        logger.warning(f"Clamped a negative entry of magnitude {max_clamp:.3e} in {what} (threshold {threshold:.3e}).")
    else:
        logger.debug(f"Clamped roundoff negatives up to {max_clamp:.3e} in {what}.")
    return np.where(negative, 0.0, matrix), max_clamp


def _shifted_inverse(operator: np.ndarray, lam: float) -> np.ndarray:
    """(lam I - operator)^-1 by LU with partial pivoting."""
    n = operator.shape[0]
    identity = np.eye(n)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(lam * identity - operator, check_finite=False)
        if np.any(np.diag(lu) == 0.0):
            raise SingularSolve(lam)
        inverse = scipy.linalg.lu_solve((lu, piv), identity, check_finite=False)
    if not np.all(np.isfinite(inverse)):
        raise SingularSolve(lam)
    return inverse


def resolvent_with_diagnostics(sys: SplitSystem, lam: float) -> Tuple[np.ndarray, float]:
    """
    (lam I - T)^-1 together with the largest clamped magnitude.

    :raise LambdaTooSmall: lam <= r(T) + tol_split.
    :raise SingularSolve
    """
    limit = sys.r_T + sys.tolerances.tol_split
    if not lam > limit:
        raise LambdaTooSmall(lam, limit)
    return clamp_nonnegative(_shifted_inverse(sys.T.entries, lam), "(lambda I - T)^-1")


def resolvent_T(sys: SplitSystem, lam: float) -> np.ndarray:
    """
    :param sys: The splitting.
    :param lam: A real number above r(T) + tol_split.
    :return: (lam I - T)^-1, entrywise nonnegative.
    """
    resolvent, _ = resolvent_with_diagnostics(sys, lam)
    return resolvent


def neumann_resolvent(sys: SplitSystem, lam: float, terms: int) -> np.ndarray:
    """
    Partial Neumann sum sum_{k<terms} lam^(-k-1) T^k. Only used to cross-check resolvent_T.

    :raise LambdaTooSmall: lam <= r(T).
    """
    if not lam > sys.r_T:
        raise LambdaTooSmall(lam, sys.r_T)
    if terms < 1:
        raise BadRange(f"terms must be >= 1, got {terms}")

    T = sys.T.entries
    term = np.eye(sys.n) / lam
    total = term.copy()
    for _ in range(1, terms):
        term = (T @ term) / lam
        total += term
    return total


def next_generation(sys: SplitSystem, lam: float) -> NonNegMatrix:
    """F (lam I - T)^-1, clamped to the orthant."""
    product = sys.F.entries @ resolvent_T(sys, lam)
    clamped, _ = clamp_nonnegative(product, "F (lambda I - T)^-1")
    return NonNegMatrix(entries=clamped)


def r0(sys: SplitSystem, tol: Optional[Tolerances] = None) -> SpectralResult:
    """The basic reproduction number R0 = r(F (I - T)^-1)."""
    return spectral_radius(next_generation(sys, 1.0), _tolerances(sys, tol))


def curve_value(sys: SplitSystem, lam: float, tol: Optional[Tolerances] = None) -> float:
    return spectral_radius(next_generation(sys, lam), _tolerances(sys, tol)).radius


def curve(
        sys: SplitSystem,
        lambda_min: float,
        lambda_max: float,
        samples: int,
        tol: Optional[Tolerances] = None,
        workers: int = 1,
) -> CurveSample:
    """
    Sample r(F (lambda I - T)^-1) at evenly spaced lambdas and audit monotonicity and convexity.

    :param workers: Number of threads evaluating the lambdas. Results do not depend on it.
    :raise BadRange: lambda_min <= r(T) + tol_split, lambda_min >= lambda_max or samples < 3.
    """
    tol = _tolerances(sys, tol)
    if samples < 3:
        raise BadRange(f"samples must be >= 3, got {samples}")
    if not sys.r_T + tol.tol_split < lambda_min < lambda_max:
        raise BadRange(
            f"need r(T) + tol_split < lambda_min < lambda_max, got r(T)={sys.r_T!r}, "
            f"[{lambda_min!r}, {lambda_max!r}]"
        )

    lambdas = [float(v) for v in np.linspace(lambda_min, lambda_max, samples)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            radii = list(pool.map(lambda lam: curve_value(sys, lam, tol), lambdas))
    else:
        radii = [curve_value(sys, lam, tol) for lam in lambdas]

    values = np.array(radii)
    increases = np.diff(values)
    concavity = -(values[:-2] - 2.0 * values[1:-1] + values[2:])
    worst_increase = float(increases.max())
    worst_concavity = float(concavity.max())

    return CurveSample(
        points=list(zip(lambdas, radii)),
        monotone_ok=worst_increase <= tol.tol_eq,
        convex_ok=worst_concavity <= tol.tol_eq,
        max_violation=max(0.0, worst_increase, worst_concavity),
    )


def bisect_radius(
        sys: SplitSystem, tol: Optional[Tolerances] = None, strict_case_two: bool = False
) -> BisectionResult:
    """
    Recover r(A) as the point where r(F (lambda I - T)^-1) = 1.

    When R0 < 1 the curve stays below 1 on (r(T), inf); r(A) is then returned directly with
    curve_case BELOW_ONE, unless strict_case_two asks for CaseOneCurve instead.

    :raise NearBoundary: |R0 - 1| <= tol_eq, so lambda* = 1.
    :raise CaseOneCurve: Only with strict_case_two.
    :raise NoConvergence: The bracket could not be closed.
    """
    tol = _tolerances(sys, tol)
    reproduction = r0(sys, tol).radius
    r_A = spectral_radius(sys.A, tol).radius

    if abs(reproduction - 1.0) <= tol.tol_eq:
        raise NearBoundary(reproduction)
    if reproduction < 1.0 - tol.tol_eq:
        if strict_case_two:
            raise CaseOneCurve(reproduction, r_A)
        return BisectionResult(
            radius=r_A,
            lambda_star=None,
            curve_case=CurveCase.BELOW_ONE,
            spectral_check=r_A,
            discrepancy=0.0,
            iterations=0,
        )

    lo, hi = 1.0, 2.0
    iterations = 0
    while curve_value(sys, hi, tol) >= 1.0:
        lo, hi = hi, 2.0 * hi
        iterations += 1
        if hi > MAX_BRACKET:
            raise NoConvergence("bisect_radius bracket", iterations)

    while hi - lo > tol.tol_spec * max(1.0, hi) and iterations < MAX_BISECTION_STEPS:
        mid = 0.5 * (lo + hi)
        if curve_value(sys, mid, tol) >= 1.0:
            lo = mid
        else:
            hi = mid
        iterations += 1

    lambda_star = 0.5 * (lo + hi)
    crossing = curve_value(sys, lambda_star, tol)
    if abs(crossing - 1.0) > tol.tol_eq:
        logger.warning(f"Curve value at lambda*={lambda_star!r} is {crossing!r}, outside the tol_eq band.")

    return BisectionResult(
        radius=lambda_star,
        lambda_star=lambda_star,
        curve_case=CurveCase.CROSSES_ONE,
        spectral_check=r_A,
        discrepancy=abs(lambda_star - r_A),
        iterations=iterations,
    )


def resolvent_A(sys: SplitSystem, lam: float, tol: Optional[Tolerances] = None) -> np.ndarray:
    """
    (lam I - A)^-1 for lam above r(A) + tol_split.

    :raise LambdaTooSmall
    """
    tol = _tolerances(sys, tol)
    limit = spectral_radius(sys.A, tol).radius + tol.tol_split
    if not lam > limit:
        raise LambdaTooSmall(lam, limit)
    resolvent, _ = clamp_nonnegative(_shifted_inverse(sys.A.entries, lam), "(lambda I - A)^-1")
    return resolvent


def factorization_discrepancy(sys: SplitSystem, lam: float, tol: Optional[Tolerances] = None) -> float:
    """
    Relative inf-norm gap between (lam - A)^-1 and (lam - T)^-1 (I - F (lam - T)^-1)^-1.

    :raise LambdaTooSmall: lam <= max(r(A), r(T)) + tol_split.
    """
    tol = _tolerances(sys, tol)
    left = resolvent_A(sys, lam, tol)
    transition = resolvent_T(sys, lam)
    generation = sys.F.entries @ transition
    # X (I - K) = R_T  <=>  (I - K)^T X^T = R_T^T
    right = scipy.linalg.solve((np.eye(sys.n) - generation).T, transition.T).T
    return _norm_inf(left - right) / max(_norm_inf(left), np.finfo(float).tiny)
