"""
Discrete-time linear dynamics x_(t+1) = A x_t on the nonnegative orthant.

States are stored rescaled to unit inf-norm and the log of the true norm is accumulated
separately, so supercritical systems can run for thousands of steps without overflow.
"""

import math
from typing import List

import numpy as np
from pydantic import BaseModel, ConfigDict, field_serializer, model_validator

from core.core_model import NonNegMatrix
from core.errors import (DimensionMismatch, InvalidInitialState, TooFewSteps,
                         ZeroInitialState)
from logger import build_logger

logger = build_logger(__name__)


class Trajectory(BaseModel):
    """
    Attributes:
        states (List[np.ndarray]): x_t / ||x_t||_inf for t = 0..steps, the zero vector once absorbed.
        log_norms (List[float]): log ||x_t||_inf, -inf once absorbed.
        steps (int): Number of applications of A actually performed.
        absorbed_at_zero (bool): Some iterate was exactly zero; the trajectory stops there.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    states: List[np.ndarray]
    log_norms: List[float]
    steps: int
    absorbed_at_zero: bool = False

    @model_validator(mode="after")
    def _consistent_lengths(self):
        if len(self.states) != self.steps + 1 or len(self.log_norms) != self.steps + 1:
            raise ValueError(
                f"expected {self.steps + 1} states and log norms, got {len(self.states)} and {len(self.log_norms)}"
            )
        return self

    @field_serializer("states")
    def _states_as_lists(self, states: List[np.ndarray]):
        return [state.tolist() for state in states]

    @field_serializer("log_norms")
    def _log_norms_as_json(self, log_norms: List[float]):
        return [value if math.isfinite(value) else None for value in log_norms]

    def unnormalized(self, t: int) -> np.ndarray:
        """The true state x_t."""
        log_norm = self.log_norms[t]
        if not math.isfinite(log_norm):
            return np.zeros_like(self.states[t])
        return self.states[t] * math.exp(log_norm)


def iterate(A: NonNegMatrix, x0, steps: int) -> Trajectory:
    """
    :param A: The operator.
    :param x0: Nonnegative, nonzero initial state of length A.n.
    :param steps: At least 1.
    :raise ZeroInitialState
    :raise InvalidInitialState: A negative or non-finite coordinate.
    :raise DimensionMismatch
    """
    x = np.asarray(x0, dtype=float).ravel()
    if x.size != A.n:
        raise DimensionMismatch(A.n, x.size)
    invalid = np.flatnonzero(~np.isfinite(x) | (x < 0))
    if invalid.size:
        raise InvalidInitialState(int(invalid[0]), float(x[invalid[0]]))
    if steps < 1:
        raise TooFewSteps(steps, 0)
    norm = float(np.max(np.abs(x)))
    if norm == 0.0:
        raise ZeroInitialState()

    states = [x / norm]
    log_norms = [math.log(norm)]
    for step in range(1, steps + 1):
        y = A.entries @ states[-1]
        norm = float(np.max(y))
        if norm == 0.0:
            logger.debug(f"Trajectory absorbed at zero after {step} steps.")
            states.append(np.zeros_like(y))
            log_norms.append(-math.inf)
            return Trajectory(states=states, log_norms=log_norms, steps=step, absorbed_at_zero=True)
        states.append(y / norm)
        log_norms.append(log_norms[-1] + math.log(norm))

    return Trajectory(states=states, log_norms=log_norms, steps=steps)


def growth_rate(traj: Trajectory, burn_in: int) -> float:
    """
    exp of the least-squares slope of log ||x_t|| over t in [burn_in, steps]. A regression
    rather than the last ratio, so periodic matrices still give r(A). Absorbed trajectories
    grow at rate 0.

    For reducible A the rate can be that of a sub-block reached by the support of x0.

    :raise TooFewSteps: steps <= burn_in + 1.
    """
    if traj.absorbed_at_zero:
        return 0.0
    if traj.steps <= burn_in + 1:
        raise TooFewSteps(traj.steps, burn_in)
    times = np.arange(burn_in, traj.steps + 1, dtype=float)
    slope, _ = np.polyfit(times, np.array(traj.log_norms[burn_in:]), 1)
    return float(math.exp(slope))
