"""Validated data types shared by every engine module: nonnegative matrices, splittings, tolerances.

The cone is fixed to the nonnegative orthant, so cone preservation reduces to entrywise
nonnegativity. Every type is frozen after construction.
"""

import os
from typing import Any, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from core.errors import (DimensionMismatch, NegativeEntry, NonFiniteEntry,
                         NotSquare, SubcriticalityViolated)


class Tolerances(BaseModel):
    """
    Numerical tolerances used across the engine.

    Attributes:
        tol_eq (float): Half-width of the band around 1 treated as equality. Defaults to 1e-9.
        tol_spec (float): Target accuracy of spectral radius computations. Defaults to 1e-10.
        tol_split (float): Margin required for r(T) < 1. Defaults to 1e-8.
        max_iter (int): Iteration budget of the iterative solvers. Defaults to 100000.
    """

    model_config = ConfigDict(frozen=True)

    tol_eq: float = Field(default=1e-9, gt=0)
    tol_spec: float = Field(default=1e-10, gt=0)
    tol_split: float = Field(default=1e-8, gt=0)
    max_iter: int = Field(default=100000, ge=1)

    @classmethod
    def from_env(cls, **overrides) -> "Tolerances":
        """
        Build tolerances from R0_TOL_EQ, R0_TOL_SPEC, R0_TOL_SPLIT and R0_MAX_ITER.
        Explicit keyword overrides win over the environment.
        """
        values = {}
        for field_name, env_name in (
                ("tol_eq", "R0_TOL_EQ"),
                ("tol_spec", "R0_TOL_SPEC"),
                ("tol_split", "R0_TOL_SPLIT"),
                ("max_iter", "R0_MAX_ITER"),
        ):
            raw = os.getenv(env_name)
            if raw:
                values[field_name] = raw
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


def _checked_entries(raw: Any) -> np.ndarray:
    """Convert raw input to a read-only float array, raising the first offending entry."""
    if isinstance(raw, NonNegMatrix):
        return raw.entries
    try:
        array = np.array(raw, dtype=float)
    except (TypeError, ValueError):
        raise NotSquare((len(raw),) if hasattr(raw, "__len__") else ())

    if array.ndim != 2 or array.shape[0] != array.shape[1] or array.shape[0] == 0:
        raise NotSquare(array.shape)

    bad = np.argwhere(~np.isfinite(array))
    if bad.size:
        i, j = (int(k) for k in bad[0])
        raise NonFiniteEntry(i, j, float(array[i, j]))

    negative = np.argwhere(array < 0)
    if negative.size:
        i, j = (int(k) for k in negative[0])
        raise NegativeEntry(i, j, float(array[i, j]))

    # drop -0.0
    array = array + 0.0
    array.setflags(write=False)
    return array


class NonNegMatrix(BaseModel):
    """
    A square matrix with finite, nonnegative entries (a cone-preserving operator on the orthant).

    Attributes:
        entries (np.ndarray): n x n read-only array.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    entries: np.ndarray

    @field_validator("entries", mode="before")
    @classmethod
    def _validate_entries(cls, value):
        return _checked_entries(value)

    @property
    def n(self) -> int:
        return int(self.entries.shape[0])

    def is_zero(self) -> bool:
        return not np.any(self.entries)

    def scaled(self, alpha: float) -> "NonNegMatrix":
        return NonNegMatrix(entries=alpha * self.entries)

    def transpose(self) -> "NonNegMatrix":
        return NonNegMatrix(entries=self.entries.T)

    def tolist(self):
        return self.entries.tolist()


class SplitSystem(BaseModel):
    """
    A splitting A = T + F with r(T) < 1 - tol_split, checked at construction.

    Attributes:
        T (NonNegMatrix): Transition (survival) part.
        F (NonNegMatrix): Fertility (new-case) part.
        tolerances (Tolerances): Tolerances the system was validated with, reused downstream.
        A (NonNegMatrix): T + F, computed.
        r_T (float): Cached spectral radius of T, computed.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    T: NonNegMatrix
    F: NonNegMatrix
    tolerances: Tolerances = Field(default_factory=Tolerances)
    A: NonNegMatrix
    r_T: float

    @model_validator(mode="before")
    @classmethod
    def _build(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data
        from engine.spectral import spectral_radius

        T = data["T"] if isinstance(data["T"], NonNegMatrix) else NonNegMatrix(entries=data["T"])
        F = data["F"] if isinstance(data["F"], NonNegMatrix) else NonNegMatrix(entries=data["F"])
        tol = data.get("tolerances") or Tolerances()
        if T.n != F.n:
            raise DimensionMismatch(T.n, F.n)

        r_T = spectral_radius(T, tol).radius
        limit = 1.0 - tol.tol_split
        if r_T >= limit:
            raise SubcriticalityViolated(r_T, limit)

        return {"T": T, "F": F, "tolerances": tol, "A": NonNegMatrix(entries=T.entries + F.entries), "r_T": r_T}

    @property
    def n(self) -> int:
        return self.A.n


def validate_matrix(raw) -> NonNegMatrix:
    """
    :param raw: An n x n array-like of real numbers.
    :return: The validated NonNegMatrix.
    :raise NotSquare, NegativeEntry, NonFiniteEntry
    """
    return NonNegMatrix(entries=raw)


def make_split(T: NonNegMatrix, F: NonNegMatrix, tol: Optional[Tolerances] = None) -> SplitSystem:
    """
    Build a SplitSystem, computing and caching r(T).

    :raise DimensionMismatch: T and F differ in size.
    :raise SubcriticalityViolated: r(T) >= 1 - tol_split.
    """
    return SplitSystem(T=T, F=F, tolerances=tol or Tolerances())


def entrywise_leq(B: NonNegMatrix, A: NonNegMatrix) -> bool:
    """Exact entrywise comparison B <= A, i.e. A - B is cone-preserving."""
    if B.n != A.n:
        raise DimensionMismatch(B.n, A.n)
    return bool(np.all(B.entries <= A.entries))
