from typing import List, Optional

from pydantic import BaseModel

from engine.leslie import LeslieR0, SurvivalBound
from engine.resolvent_ngm import CurveSample
from engine.spectral import SpectralResult
from engine.trichotomy import TrichotomyVerdict


class SplitR0Response(BaseModel):
    kind: str = "split"
    r0: SpectralResult
    rA: SpectralResult
    r_T: float


class LeslieR0Response(BaseModel):
    kind: str = "leslie"
    closed_form: LeslieR0
    truncation_n: int
    truncated_r0: float
    truncated_rA: float
    survival_bound: SurvivalBound
    fertility_norm: float


class ClassifyResponse(BaseModel):
    verdict: TrichotomyVerdict
    description: str
    exit_code: int
    truncation_n: Optional[int] = None


class CurveResponse(BaseModel):
    sample: CurveSample


class LeslieSeriesRow(BaseModel):
    n: int
    r0: float
    rA: float
    gap: float
    tail_bound: float


class LeslieSeriesResponse(BaseModel):
    closed_form: LeslieR0
    survival_bound: SurvivalBound
    fertility_norm: float
    p: str
    q: str
    rows: List[LeslieSeriesRow]
    reproductive_values: List[float] = []


class SimulateResponse(BaseModel):
    growth_rate: float
    rA: float
    r0: float
    steps: int
    burn_in: int
    absorbed_at_zero: bool
    consistent: bool
