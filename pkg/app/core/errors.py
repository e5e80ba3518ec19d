"""Exception hierarchy shared by every module.

The errors deliberately do not derive from ValueError: pydantic only wraps ValueError and
AssertionError raised inside validators, so these reach the caller unchanged.
"""

from typing import List, Optional


class ReproductionError(Exception):
    """Root of every error raised by the library."""


class InputError(ReproductionError):
    """Malformed or invalid input. The command line maps it to exit code 1."""


class NumericalError(ReproductionError):
    """A computation failed or produced an inconsistent result. Exit code 2."""


# ___ core_model ___


class NotSquare(InputError):
    def __init__(self, shape):
        self.shape = tuple(shape)
        super().__init__(f"Matrix must be square, got shape {self.shape}.")


class NegativeEntry(InputError):
    def __init__(self, i: int, j: int, value: float):
        self.i, self.j, self.value = i, j, value
        super().__init__(f"Entry ({i},{j}) is negative: {value!r}.")


class NonFiniteEntry(InputError):
    def __init__(self, i: int, j: int, value: float):
        self.i, self.j, self.value = i, j, value
        super().__init__(f"Entry ({i},{j}) is not finite: {value!r}.")


class DimensionMismatch(InputError):
    def __init__(self, left, right):
        self.left, self.right = left, right
        super().__init__(f"Dimension mismatch: {left} vs {right}.")


class SubcriticalityViolated(InputError):
    def __init__(self, r_T: float, limit: float):
        self.r_T, self.limit = r_T, limit
        super().__init__(f"r(T) >= 1: r(T)={r_T!r} is not below {limit!r}.")


# ___ spectral ___


class NoConvergence(NumericalError):
    def __init__(self, what: str, iterations: int, residual: Optional[float] = None):
        self.what, self.iterations, self.residual = what, iterations, residual
        super().__init__(
            f"{what} did not converge after {iterations} iterations (residual={residual!r})."
        )


class DimensionTooLarge(InputError):
    def __init__(self, n: int, limit: int):
        self.n, self.limit = n, limit
        super().__init__(f"Dimension {n} exceeds the limit {limit}.")


class RootFindingStalled(NumericalError):
    def __init__(self, iterations: int, residual: float):
        self.iterations, self.residual = iterations, residual
        super().__init__(
            f"Durand-Kerner stalled after {iterations} sweeps, backward error {residual!r}."
        )


# ___ resolvent_ngm ___


class LambdaTooSmall(InputError):
    def __init__(self, lam: float, limit: float):
        self.lam, self.limit = lam, limit
        super().__init__(f"lambda={lam!r} must exceed {limit!r}.")


class SingularSolve(NumericalError):
    def __init__(self, lam: float):
        self.lam = lam
        super().__init__(f"(lambda I - T) is singular at lambda={lam!r}.")


class BadRange(InputError):
    def __init__(self, reason: str):
        self.reason = reason
        super().__init__(reason)


class CaseOneCurve(NumericalError):
    def __init__(self, r0: float, r_A: float):
        self.r0, self.r_A = r0, r_A
        super().__init__(
            f"The curve never reaches 1 (R0={r0!r}); r(A)={r_A!r} was returned directly."
        )


class NearBoundary(NumericalError):
    def __init__(self, r0: float, lambda_star: float = 1.0):
        self.r0, self.lambda_star = r0, lambda_star
        super().__init__(f"R0={r0!r} lies within the equality band of 1; lambda*=1.")


# ___ trichotomy ___


class TheoremViolation(NumericalError):
    def __init__(self, details: str):
        self.details = details
        super().__init__(f"Trichotomy violated: {details}")


class AmbiguousBoundary(NumericalError):
    def __init__(self, r0: float, r_A: float):
        self.r0, self.r_A = r0, r_A
        super().__init__(f"R0={r0!r} and r(A)={r_A!r} straddle 1 within the noise band.")


class R0Zero(InputError):
    def __init__(self, r0: float):
        self.r0 = r0
        super().__init__(f"R0={r0!r} is zero; T + F/R0 is undefined.")


class PreconditionUnmet(InputError):
    def __init__(self, unmet: List[str]):
        self.unmet = list(unmet)
        super().__init__("Strictness cannot be certified: " + "; ".join(self.unmet))


# ___ structure ___


class NotIrreducible(InputError):
    def __init__(self, components: int):
        self.components = components
        super().__init__(f"Matrix is reducible ({components} strongly connected components).")


class EmptyVector(InputError):
    def __init__(self):
        super().__init__("Vector has length 0.")


# ___ leslie ___


class DivergentSeries(NumericalError):
    def __init__(self, ratio: float):
        self.ratio = ratio
        super().__init__(f"R0 series diverges: tail ratio {ratio!r} >= 1.")


# ___ dynamics ___


class ZeroInitialState(InputError):
    def __init__(self):
        super().__init__("Initial state is the zero vector.")


class InvalidInitialState(InputError):
    def __init__(self, index: int, value: float):
        self.index, self.value = index, value
        super().__init__(f"Initial state coordinate {index} must be finite and nonnegative, got {value!r}.")


class TooFewSteps(InputError):
    def __init__(self, steps: int, burn_in: int):
        self.steps, self.burn_in = steps, burn_in
        super().__init__(f"Need more than burn_in + 1 = {burn_in + 1} steps, got {steps}.")


# ___ oracle_harness ___


class DegenerateDraw(NumericalError):
    def __init__(self, attempts: int):
        self.attempts = attempts
        super().__init__(f"No usable random draw after {attempts} attempts.")


# ___ model files ___


class ParseError(InputError):
    def __init__(self, location: str, reason: str = ""):
        self.location, self.reason = location, reason
        super().__init__(f"Parse error at {location}: {reason}")


class ModelValidationError(InputError):
    def __init__(self, field: str, reason: str):
        self.field, self.reason = field, reason
        super().__init__(f"Invalid field '{field}': {reason}")
