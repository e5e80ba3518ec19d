"""
Leslie models with infinitely many age classes on l_p.

Survival t_i moves age class i into class i + 1, fertility f_i feeds class 1. Sequences are
parametric so that limsup t_i < 1 and f in l_q are checked structurally. F (I - T)^-1 has a
single nonzero row, so R0 is its (1,1) entry f_1 + sum_{i>=2} f_i t_1 ... t_(i-1).
"""

import math
from concurrent.futures import ThreadPoolExecutor
from typing import Annotated, List, Literal, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_serializer, field_validator

from core.core_model import NonNegMatrix, SplitSystem, Tolerances, make_split
from core.errors import BadRange, DivergentSeries
from engine.resolvent_ngm import r0
from engine.spectral import spectral_radius
from logger import build_logger

logger = build_logger(__name__)

FiniteNonNegative = Annotated[float, Field(ge=0, allow_inf_nan=False)]
Probability = Annotated[float, Field(ge=0, le=1, allow_inf_nan=False)]


class FiniteSupportFertility(BaseModel):
    """f = (values[0], values[1], ..., 0, 0, ...)"""

    model_config = ConfigDict(frozen=True)

    type: Literal["finite"] = "finite"
    values: List[FiniteNonNegative]

    def at(self, i: int) -> float:
        return self.values[i - 1] if i <= len(self.values) else 0.0


class GeometricFertility(BaseModel):
    """f_i = c * beta^(i-1)"""

    model_config = ConfigDict(frozen=True)

    type: Literal["geometric"] = "geometric"
    c: FiniteNonNegative
    beta: float = Field(ge=0, lt=1)

    def at(self, i: int) -> float:
        return self.c * self.beta ** (i - 1)


class ConstantSurvival(BaseModel):
    """t_i = t for every i"""

    model_config = ConfigDict(frozen=True)

    type: Literal["constant"] = "constant"
    t: float = Field(ge=0, lt=1)

    @property
    def tail(self) -> float:
        return self.t

    @property
    def head_length(self) -> int:
        return 0

    def at(self, i: int) -> float:
        return self.t


class FiniteListSurvival(BaseModel):
    """t_i = values[i-1] for i <= len(values), tail afterwards"""

    model_config = ConfigDict(frozen=True)

    type: Literal["finite_list"] = "finite_list"
    values: List[Probability]
    tail: float = Field(ge=0, lt=1)

    @property
    def head_length(self) -> int:
        return len(self.values)

    def at(self, i: int) -> float:
        return self.values[i - 1] if i <= len(self.values) else self.tail


Fertility = Annotated[Union[FiniteSupportFertility, GeometricFertility], Field(discriminator="type")]
Survival = Annotated[Union[ConstantSurvival, FiniteListSurvival], Field(discriminator="type")]


class LeslieModel(BaseModel):
    """
    Attributes:
        fertility (Fertility): Finite support or geometric.
        survival (Survival): Constant or a finite list followed by a constant tail.
        p (float): Norm index in [1, inf]. R0 does not depend on it; fertility_norm does.
        tolerances (Tolerances): Used for truncations built from this model.
    """

    model_config = ConfigDict(frozen=True)

    fertility: Fertility
    survival: Survival
    p: float = Field(default=2.0, ge=1)
    tolerances: Tolerances = Field(default_factory=Tolerances)

    @field_validator("p", mode="before")
    @classmethod
    def _parse_p(cls, value):
        if isinstance(value, str) and value.strip().lower() in ("inf", "infinity"):
            return math.inf
        return value

    @field_serializer("p")
    def _serialize_p(self, value: float):
        return "inf" if math.isinf(value) else value

    @property
    def q(self) -> float:
        """Conjugate index, 1/p + 1/q = 1."""
        if math.isinf(self.p):
            return 1.0
        if self.p == 1.0:
            return math.inf
        return self.p / (self.p - 1.0)

    def fertility_at(self, i: int) -> float:
        return self.fertility.at(i)

    def survival_at(self, i: int) -> float:
        return self.survival.at(i)


class LeslieR0(BaseModel):
    """
    Attributes:
        value (float): R0, or a partial sum of its series.
        error_bound (float): Upper bound on the neglected tail, 0 for exact evaluations.
        terms (int): Number of series terms summed, 0 for the closed form.
    """

    model_config = ConfigDict(frozen=True)

    value: float
    error_bound: float = Field(ge=0)
    terms: int = Field(ge=0)


class SurvivalBound(BaseModel):
    """
    Certificate r(T) <= bound = 1 - epsilon, valid for the infinite survival operator.

    Attributes:
        bound (float)
        m (int): t_i < 1 - epsilon is only required for i > m.
        epsilon (float)
    """

    model_config = ConfigDict(frozen=True)

    bound: float
    m: int
    epsilon: float


def _term(model: LeslieModel, i: int) -> float:
    """f_i * t_1 * ... * t_(i-1)"""
    survivorship = 1.0
    for j in range(1, i):
        survivorship *= model.survival_at(j)
    return model.fertility_at(i) * survivorship


def _tail_ratio(model: LeslieModel) -> float:
    ratio = model.fertility.beta * model.survival.tail
    if ratio >= 1.0:
        raise DivergentSeries(ratio)
    return ratio


def truncation_tail_bound(model: LeslieModel, n: int) -> float:
    """
    sum_{i>n} f_i t_1 ... t_(i-1), the part of R0 that the first n age classes miss.
    Exact for finite support; for geometric fertility the tail beyond the survival list is
    summed as a geometric series.
    """
    if isinstance(model.fertility, FiniteSupportFertility):
        return float(sum(_term(model, i) for i in range(n + 1, len(model.fertility.values) + 1)))

    ratio = _tail_ratio(model)
    total = 0.0
    i = n + 1
    while i <= model.survival.head_length:
        total += _term(model, i)
        i += 1
    # term_(i+1) / term_i = beta * tail from here on
    return total + _term(model, i) / (1.0 - ratio)


def closed_form_r0_report(model: LeslieModel, tol: Optional[Tolerances] = None) -> LeslieR0:
    """
    R0 = f_1 + sum_{i>=2} f_i prod_{j<i} t_j with the bound on what was left out.

    :raise DivergentSeries: Only if the model invariants were bypassed.
    """
    tol = tol or model.tolerances
    fertility, survival = model.fertility, model.survival

    if isinstance(fertility, FiniteSupportFertility):
        terms = len(fertility.values)
        return LeslieR0(value=float(sum(_term(model, i) for i in range(1, terms + 1))), error_bound=0.0, terms=terms)

    ratio = _tail_ratio(model)
    if isinstance(survival, ConstantSurvival):
        return LeslieR0(value=fertility.c / (1.0 - ratio), error_bound=0.0, terms=0)

    value = 0.0
    terms = 0
    while True:
        terms += 1
        value += _term(model, terms)
        bound = truncation_tail_bound(model, terms)
        if terms > survival.head_length and bound <= tol.tol_eq:
            break
    logger.debug(f"Closed-form R0 summed {terms} terms, tail bound {bound:.3e}.")
    return LeslieR0(value=value, error_bound=bound, terms=terms)


def closed_form_r0(model: LeslieModel, tol: Optional[Tolerances] = None) -> float:
    return closed_form_r0_report(model, tol).value


def truncate(model: LeslieModel, n: int) -> SplitSystem:
    """
    The first n age classes: F has first row (f_1, ..., f_n), T has subdiagonal
    (t_1, ..., t_(n-1)). Outflow from class n is dropped, so T is nilpotent.

    :raise BadRange: n < 1.
    """
    if n < 1:
        raise BadRange(f"n must be >= 1, got {n}")
    survival = np.zeros((n, n))
    fertility = np.zeros((n, n))
    for i in range(1, n + 1):
        fertility[0, i - 1] = model.fertility_at(i)
        if i < n:
            survival[i, i - 1] = model.survival_at(i)
    return make_split(NonNegMatrix(entries=survival), NonNegMatrix(entries=fertility), model.tolerances)


def survival_radius_bound(model: LeslieModel) -> SurvivalBound:
    """
    Bound on r(T) for the infinite survival operator: T is dominated by S with s_i = 1 for
    i <= m and 1 - epsilon afterwards, and r(S) <= 1 - epsilon.
    """
    survival = model.survival
    tail = max(survival.tail, 0.0)
    return SurvivalBound(bound=tail, m=survival.head_length, epsilon=1.0 - tail)


def _check_n_list(n_list: Sequence[int]) -> List[int]:
    values = [int(n) for n in n_list]
    if not values:
        raise BadRange("n_list must not be empty")
    if any(b < a for a, b in zip(values, values[1:])) or values[0] < 1:
        raise BadRange(f"n_list must be ascending positive integers, got {values}")
    return values


def _series(evaluate, n_list: Sequence[int], workers: int) -> List[Tuple[int, float]]:
    values = _check_n_list(n_list)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(evaluate, values))
    else:
        results = [evaluate(n) for n in values]
    return list(zip(values, results))


def truncated_r0_series(
        model: LeslieModel, n_list: Sequence[int], tol: Optional[Tolerances] = None, workers: int = 1
) -> List[Tuple[int, float]]:
    """
    R0 of successive truncations. Non-decreasing in n, converging to closed_form_r0 from below.
    """
    tol = tol or model.tolerances
    return _series(lambda n: r0(truncate(model, n), tol).radius, n_list, workers)


def truncated_radius_series(
        model: LeslieModel, n_list: Sequence[int], tol: Optional[Tolerances] = None, workers: int = 1
) -> List[Tuple[int, float]]:
    """r(A_n) of successive truncations. Observed to converge, no rate is certified."""
    tol = tol or model.tolerances
    return _series(lambda n: spectral_radius(truncate(model, n).A, tol).radius, n_list, workers)


def fertility_norm(model: LeslieModel) -> float:
    """||f||_q, a bound on the norm of F acting on l_p."""
    q = model.q
    fertility = model.fertility
    if isinstance(fertility, FiniteSupportFertility):
        if not fertility.values:
            return 0.0
        return float(np.linalg.norm(np.array(fertility.values), ord=np.inf if math.isinf(q) else q))
    if math.isinf(q):
        return fertility.c
    return fertility.c / (1.0 - fertility.beta ** q) ** (1.0 / q)


def _horizon(model: LeslieModel, tol: Tolerances) -> int:
    if isinstance(model.fertility, FiniteSupportFertility):
        return max(1, len(model.fertility.values))
    n = max(1, model.survival.head_length)
    while truncation_tail_bound(model, n) > tol.tol_eq:
        n *= 2
    return n


def reproductive_values(model: LeslieModel, count: int, tol: Optional[Tolerances] = None) -> List[float]:
    """
    First entries of the nonzero row of F (I - T)^-1:
    v_k = f_k + sum_{i>k} f_i t_k ... t_(i-1), by the recurrence v_k = f_k + t_k v_(k+1).
    v_1 is R0.

    :raise BadRange: count < 1.
    """
    if count < 1:
        raise BadRange(f"count must be >= 1, got {count}")
    tol = tol or model.tolerances
    horizon = max(count, _horizon(model, tol))
    values = [0.0] * (horizon + 2)
    for k in range(horizon, 0, -1):
        values[k] = model.fertility_at(k) + model.survival_at(k) * values[k + 1]
    return values[1:count + 1]
