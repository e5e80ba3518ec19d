"""
Classification of (R0, r(A)) into the three mutually exclusive cases

    (a) R0 >= r(A) > 1,   (b) R0 = r(A) = 1,   (c) R0 <= r(A) < 1,

with strict inequalities in (a) and (c) once A is irreducible, T != 0 and R0 > 0.
Equality with 1 is decided inside a band of half-width tol_eq.
"""

from enum import Enum
from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

from core.core_model import NonNegMatrix, SplitSystem, Tolerances
from core.errors import (AmbiguousBoundary, PreconditionUnmet, R0Zero,
                         TheoremViolation)
from engine.resolvent_ngm import r0
from engine.spectral import spectral_radius
from engine.structure import is_irreducible
from logger import build_logger

logger = build_logger(__name__)

AMBIGUITY_FACTOR = 3.0


class TrichotomyCase(str, Enum):
    SUPERCRITICAL_A = "SupercriticalA"
    CRITICAL_B = "CriticalB"
    SUBCRITICAL_C = "SubcriticalC"

    @property
    def label(self) -> str:
        return {"SupercriticalA": "a", "CriticalB": "b", "SubcriticalC": "c"}[self.value]


class TrichotomyVerdict(BaseModel):
    """
    Attributes:
        case (TrichotomyCase)
        r0 (float): The basic reproduction number.
        rA (float): The spectral radius of A.
        strict (bool): Strict inequalities were certified.
        margins (Tuple[float, float]): (|R0 - 1|, |r(A) - 1|).
        boundary_flag (bool): One of the values lies within tol_eq of 1.
        unmet_preconditions (List[str]): Why strictness could not be certified. Empty otherwise.
    """

    model_config = ConfigDict(frozen=True)

    case: TrichotomyCase
    r0: float
    rA: float
    strict: bool = False
    margins: Tuple[float, float]
    boundary_flag: bool
    unmet_preconditions: List[str] = Field(default_factory=list)

    def describe(self, digits: int = 9) -> str:
        r0_text, ra_text = f"{self.r0:.{digits}g}", f"{self.rA:.{digits}g}"
        relation = {
            TrichotomyCase.SUPERCRITICAL_A: f"R0={r0_text} {'>' if self.strict else '≥'} r(A)={ra_text} > 1",
            TrichotomyCase.CRITICAL_B: f"R0={r0_text} = r(A)={ra_text} = 1",
            TrichotomyCase.SUBCRITICAL_C: f"R0={r0_text} {'<' if self.strict else '≤'} r(A)={ra_text} < 1",
        }[self.case]
        return f"case ({self.case.label}): {relation}"


def _side(value: float, tol_eq: float) -> int:
    if value > 1.0 + tol_eq:
        return 1
    if value < 1.0 - tol_eq:
        return -1
    return 0


def classify(sys: SplitSystem, tol: Optional[Tolerances] = None) -> TrichotomyVerdict:
    """
    Nonstrict classification of a splitting.

    :raise AmbiguousBoundary: R0 and r(A) fall on different sides of 1, both within 3 * tol_eq.
    :raise TheoremViolation: The computed pair contradicts the trichotomy, which means a numerical bug.
    """
    tol = tol or sys.tolerances
    reproduction = r0(sys, tol).radius
    r_A = spectral_radius(sys.A, tol).radius

    side_r0, side_rA = _side(reproduction, tol.tol_eq), _side(r_A, tol.tol_eq)
    if side_r0 != side_rA:
        band = AMBIGUITY_FACTOR * tol.tol_eq
        if abs(reproduction - 1.0) <= band and abs(r_A - 1.0) <= band:
            raise AmbiguousBoundary(reproduction, r_A)
        details = f"sign(R0 - 1) != sign(r(A) - 1) with R0={reproduction!r}, r(A)={r_A!r}"
        logger.error(details)
        raise TheoremViolation(details)

    slack = tol.tol_eq * max(1.0, r_A)
    if side_rA > 0:
        case = TrichotomyCase.SUPERCRITICAL_A
        if reproduction < r_A - slack:
            details = f"case (a) requires R0 >= r(A), got R0={reproduction!r} < r(A)={r_A!r}"
            logger.error(details)
            raise TheoremViolation(details)
    elif side_rA < 0:
        case = TrichotomyCase.SUBCRITICAL_C
        if reproduction > r_A + slack:
            details = f"case (c) requires R0 <= r(A), got R0={reproduction!r} > r(A)={r_A!r}"
            logger.error(details)
            raise TheoremViolation(details)
    else:
        case = TrichotomyCase.CRITICAL_B

    margins = (abs(reproduction - 1.0), abs(r_A - 1.0))
    return TrichotomyVerdict(
        case=case,
        r0=reproduction,
        rA=r_A,
        strict=False,
        margins=margins,
        boundary_flag=min(margins) <= tol.tol_eq,
    )


def verify_unit_radius(sys: SplitSystem, tol: Optional[Tolerances] = None) -> float:
    """
    r(T + F / R0), which equals 1 whenever R0 > 0.

    :raise R0Zero: R0 <= tol_eq.
    """
    tol = tol or sys.tolerances
    reproduction = r0(sys, tol).radius
    if reproduction <= tol.tol_eq:
        raise R0Zero(reproduction)
    rescaled = NonNegMatrix(entries=sys.T.entries + sys.F.entries / reproduction)
    return spectral_radius(rescaled, tol).radius


def strictness_preconditions(sys: SplitSystem, reproduction: float, tol: Tolerances) -> List[str]:
    """The strict-trichotomy hypotheses that fail for this splitting, as readable reasons."""
    unmet = []
    if not is_irreducible(sys.A):
        unmet.append("A is reducible")
    if sys.T.is_zero():
        unmet.append("T is the zero operator")
    if reproduction <= tol.tol_eq:
        unmet.append("R0 is zero")
    return unmet


def classify_strict(
        sys: SplitSystem, tol: Optional[Tolerances] = None, require: bool = False
) -> TrichotomyVerdict:
    """
    classify, then certify strict inequalities.

    Poles of the resolvent are not checked: every eigenvalue of a matrix is one.

    :param require: Raise PreconditionUnmet instead of returning an uncertified verdict.
    :raise PreconditionUnmet: Only with require.
    :raise TheoremViolation: The certified strict inequality fails numerically.
    """
    tol = tol or sys.tolerances
    verdict = classify(sys, tol)
    unmet = strictness_preconditions(sys, verdict.r0, tol)
    if unmet:
        if require:
            raise PreconditionUnmet(unmet)
        return verdict.model_copy(update={"strict": False, "unmet_preconditions": unmet})

    gap = verdict.r0 - verdict.rA
    if verdict.case == TrichotomyCase.SUPERCRITICAL_A and not gap > tol.tol_eq:
        details = f"strict case (a) requires R0 > r(A), got gap {gap!r}"
        logger.error(details)
        raise TheoremViolation(details)
    if verdict.case == TrichotomyCase.SUBCRITICAL_C and not -gap > tol.tol_eq:
        details = f"strict case (c) requires R0 < r(A), got gap {gap!r}"
        logger.error(details)
        raise TheoremViolation(details)

    return verdict.model_copy(update={"strict": True})
