"""
Seeded random splittings and the invariant battery run over them.

Randomness comes from numpy's PCG64 generator. An instance i of cross_validate draws from
SeedSequence(seed).spawn(count)[i], so every instance and the whole report depend only on
(seed, count, cfg), never on the number of worker threads.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from core.core_model import NonNegMatrix, SplitSystem, Tolerances, make_split
from core.errors import (AmbiguousBoundary, BadRange, DegenerateDraw, NearBoundary,
                         ReproductionError, TheoremViolation)
from engine.dynamics import growth_rate, iterate
from engine.resolvent_ngm import bisect_radius, curve, factorization_discrepancy, r0
from engine.spectral import ORACLE_MAX_N, oracle_radius, spectral_radius
from engine.structure import perron_pair
from engine.trichotomy import TrichotomyCase, classify, classify_strict, verify_unit_radius
from logger import build_logger

logger = build_logger(__name__)

MAX_DRAWS = 64
STRESS_RT = 0.99
SPLIT_WEIGHTS = (0.05, 0.95)
FERTILITY_FACTOR = (0.05, 2.0)
CYCLE_WEIGHTS = (0.1, 1.0)
SCALING_FACTOR = 2.5

CURVE_RANGE = (1.0, 4.0)
CURVE_SAMPLES = 16
DYNAMICS_STEPS = 500
DYNAMICS_BURN_IN = 100
DYNAMICS_MARGIN = 0.05
STRICT_MIN_R0 = 1e-6
STRICT_MIN_MARGIN = 1e-3
STRICT_GAP = 1e-7
BISECTION_MIN_R0 = 1.0 + 1e-6

# Largest violation magnitude each invariant tolerates.
THRESHOLDS: Dict[str, float] = {
    "scaling": 1e-7,
    "ordering": 1e-7,
    "oracle_agreement": 1e-8,
    "factorization": 1e-8,
    "curve_audit": 1e-7,
    "unit_radius": 1e-7,
    "trichotomy": 1e-7,
    "bisection": 1e-6,
    "strict_trichotomy": 0.0,
    "perron_residual": 1e-7,
    "dynamics": 1e-3,
}


class GenConfig(BaseModel):
    """
    Attributes:
        n_max (int): Largest dimension drawn. Defaults to 8.
        n_min (int): Smallest dimension drawn. Defaults to 1.
        density (float): Probability that an entry is nonzero.
        scale (float): Entry magnitude cap. 0 makes every random draw of F zero.
        seed (int): 64-bit seed.
        target_rT (float): r(T) after rescaling.
    """

    model_config = ConfigDict(frozen=True)

    n_max: int = Field(default=8, ge=1)
    n_min: int = Field(default=1, ge=1)
    density: float = Field(default=0.5, ge=0, le=1)
    scale: float = Field(default=1.0, ge=0, allow_inf_nan=False)
    seed: int = Field(default=0, ge=0, lt=2 ** 64)
    target_rT: float = Field(default=0.5, gt=0, lt=1)

    @model_validator(mode="after")
    def _check_dimensions(self):
        if self.n_min > self.n_max:
            raise ValueError(f"n_min={self.n_min} exceeds n_max={self.n_max}")
        return self


class InvariantOutcome(BaseModel):
    """
    Attributes:
        name (str)
        checked (int): Instances the invariant applied to.
        failures (int): Violations above threshold plus computations that raised.
        worst (float): Largest violation magnitude observed.
        threshold (float)
    """

    name: str
    checked: int = 0
    failures: int = 0
    worst: float = 0.0
    threshold: float

    @property
    def passed(self) -> bool:
        return self.failures == 0


class SelfTestReport(BaseModel):
    """
    Attributes:
        count (int): Instances drawn.
        config (GenConfig)
        targets (List[float]): target_rT values cycled over the instances.
        outcomes (List[InvariantOutcome]): One entry per invariant, in THRESHOLDS order.
        stress_instances (List[int]): Instances with r(T) >= 0.99, where (I - T)^-1 is badly conditioned.
        errors (List[str]): "instance i, invariant: message" for every computation that raised.
    """

    count: int
    config: GenConfig
    targets: List[float]
    outcomes: List[InvariantOutcome]
    stress_instances: List[int] = Field(default_factory=list)
    errors: List[str] = Field(default_factory=list)

    @property
    def all_passed(self) -> bool:
        return all(outcome.passed for outcome in self.outcomes)


def _rng(cfg: GenConfig, rng: Optional[np.random.Generator]) -> np.random.Generator:
    return rng if rng is not None else np.random.default_rng(cfg.seed)


def _draw_dimension(cfg: GenConfig, rng: np.random.Generator, n_floor: int = 1) -> int:
    low = max(cfg.n_min, n_floor)
    if low > cfg.n_max:
        raise BadRange(f"need n_max >= {low}, got {cfg.n_max}")
    return int(rng.integers(low, cfg.n_max + 1))


def _draw_entries(rng: np.random.Generator, n: int, density: float, scale: float) -> np.ndarray:
    mask = rng.random((n, n)) < density
    values = rng.random((n, n)) * scale
    return np.where(mask, values, 0.0)


def _rescaled(T: np.ndarray, target: float, tol: Tolerances) -> Optional[np.ndarray]:
    r_T = spectral_radius(NonNegMatrix(entries=T), tol).radius
    if r_T <= 0.0:
        return None
    return T * (target / r_T)


def gen_split(cfg: GenConfig, rng: Optional[np.random.Generator] = None,
              tol: Optional[Tolerances] = None) -> SplitSystem:
    """
    Random splitting with r(T) = target_rT.

    T is redrawn until r(T) > 0, so that the rescale is defined.

    :param rng: Generator to draw from. Defaults to a fresh one seeded with cfg.seed.
    :raise DegenerateDraw: MAX_DRAWS draws of T all had r(T) = 0.
    """
    rng = _rng(cfg, rng)
    tol = tol or Tolerances()
    n = _draw_dimension(cfg, rng)
    for _ in range(MAX_DRAWS):
        T = _rescaled(_draw_entries(rng, n, cfg.density, 1.0), cfg.target_rT, tol)
        if T is not None:
            break
    else:
        raise DegenerateDraw(MAX_DRAWS)

    F = _draw_entries(rng, n, cfg.density, cfg.scale)
    return make_split(NonNegMatrix(entries=T), NonNegMatrix(entries=F), tol)


def gen_irreducible(cfg: GenConfig, rng: Optional[np.random.Generator] = None) -> NonNegMatrix:
    """
    Random nonnegative matrix plus a positive cycle 0 -> 1 -> ... -> n-1 -> 0.

    :raise BadRange: n_max < 2.
    """
    rng = _rng(cfg, rng)
    n = _draw_dimension(cfg, rng, n_floor=2)
    entries = _draw_entries(rng, n, cfg.density, cfg.scale)
    weights = rng.uniform(*CYCLE_WEIGHTS, size=n) * (cfg.scale if cfg.scale > 0 else 1.0)
    source = np.arange(n)
    # edge i -> j is entry [j, i]
    entries[(source + 1) % n, source] += weights
    return NonNegMatrix(entries=entries)


def gen_irreducible_split(cfg: GenConfig, rng: Optional[np.random.Generator] = None,
                          tol: Optional[Tolerances] = None) -> SplitSystem:
    """
    Irreducible A from gen_irreducible, split entrywise as T = A*W and F = A*(1-W).
    T keeps the support of A, hence T != 0 and r(T) > 0, and so does T + F after rescaling.
    """
    rng = _rng(cfg, rng)
    tol = tol or Tolerances()
    A = gen_irreducible(cfg, rng).entries
    weights = rng.uniform(*SPLIT_WEIGHTS, size=A.shape)
    T = _rescaled(A * weights, cfg.target_rT, tol)
    if T is None:
        raise DegenerateDraw(1)
    F = A * (1.0 - weights) * rng.uniform(*FERTILITY_FACTOR)
    return make_split(NonNegMatrix(entries=T), NonNegMatrix(entries=F), tol)


# ___ invariant battery ___
# Every check returns a violation magnitude, or None when it does not apply to the instance.


def _check_scaling(sys: SplitSystem, tol: Tolerances, r_A: float) -> Optional[float]:
    scaled = spectral_radius(sys.A.scaled(SCALING_FACTOR), tol).radius
    return abs(scaled - SCALING_FACTOR * r_A) / max(1.0, SCALING_FACTOR * r_A)


def _check_ordering(sys: SplitSystem, tol: Tolerances, r_A: float) -> Optional[float]:
    # T <= A and F <= A entrywise
    return max(0.0, max(sys.r_T, spectral_radius(sys.F, tol).radius) - r_A)


def _check_oracle(sys: SplitSystem, tol: Tolerances, r_A: float) -> Optional[float]:
    if sys.n > ORACLE_MAX_N:
        return None
    return abs(oracle_radius(sys.A).radius - r_A) / max(1.0, r_A)


def _check_factorization(sys: SplitSystem, tol: Tolerances, r_A: float) -> Optional[float]:
    return factorization_discrepancy(sys, r_A + 1.0, tol)


def _check_curve(sys: SplitSystem, tol: Tolerances, r_A: float) -> Optional[float]:
    return curve(sys, *CURVE_RANGE, CURVE_SAMPLES, tol).max_violation


def _check_unit_radius(sys: SplitSystem, tol: Tolerances, r_A: float) -> Optional[float]:
    if r0(sys, tol).radius <= tol.tol_eq:
        return None
    return abs(verify_unit_radius(sys, tol) - 1.0)


def _check_trichotomy(sys: SplitSystem, tol: Tolerances, r_A: float) -> Optional[float]:
    try:
        verdict = classify(sys, tol)
    except AmbiguousBoundary:
        return None
    if verdict.case == TrichotomyCase.SUPERCRITICAL_A:
        return max(0.0, verdict.rA - verdict.r0)
    if verdict.case == TrichotomyCase.SUBCRITICAL_C:
        return max(0.0, verdict.r0 - verdict.rA)
    return 0.0


def _check_bisection(sys: SplitSystem, tol: Tolerances, r_A: float) -> Optional[float]:
    if r0(sys, tol).radius < BISECTION_MIN_R0:
        return None
    try:
        return bisect_radius(sys, tol).discrepancy
    except NearBoundary:
        return None


def _check_strict(sys: SplitSystem, tol: Tolerances, r_A: float) -> Optional[float]:
    reproduction = r0(sys, tol).radius
    if reproduction <= STRICT_MIN_R0 or abs(reproduction - 1.0) <= STRICT_MIN_MARGIN:
        return None
    verdict = classify_strict(sys, tol, require=True)
    gap = verdict.r0 - verdict.rA if verdict.case == TrichotomyCase.SUPERCRITICAL_A else verdict.rA - verdict.r0
    return max(0.0, STRICT_GAP - gap)


def _check_perron(sys: SplitSystem, tol: Tolerances, r_A: float) -> Optional[float]:
    pair = perron_pair(sys.A, tol)
    A = sys.A.entries
    right = np.max(np.abs(A @ pair.right_vec - pair.value * pair.right_vec))
    left = np.max(np.abs(A.T @ pair.left_vec - pair.value * pair.left_vec))
    return float(max(right, left)) / max(1.0, pair.value)


def _check_dynamics(sys: SplitSystem, tol: Tolerances, r_A: float) -> Optional[float]:
    if abs(r_A - 1.0) <= DYNAMICS_MARGIN:
        return None
    rate = growth_rate(iterate(sys.A, np.ones(sys.n), DYNAMICS_STEPS), DYNAMICS_BURN_IN)
    reproduction = r0(sys, tol).radius
    deviation = abs(rate - r_A)
    if np.sign(rate - 1.0) != np.sign(r_A - 1.0) or np.sign(reproduction - 1.0) != np.sign(r_A - 1.0):
        return max(deviation, 1.0)
    return deviation


Check = Callable[[SplitSystem, Tolerances, float], Optional[float]]

SPLIT_CHECKS: List[Tuple[str, Check]] = [
    ("scaling", _check_scaling),
    ("ordering", _check_ordering),
    ("oracle_agreement", _check_oracle),
    ("factorization", _check_factorization),
    ("curve_audit", _check_curve),
    ("unit_radius", _check_unit_radius),
    ("trichotomy", _check_trichotomy),
    ("bisection", _check_bisection),
]
IRREDUCIBLE_CHECKS: List[Tuple[str, Check]] = [
    ("strict_trichotomy", _check_strict),
    ("perron_residual", _check_perron),
    ("dynamics", _check_dynamics),
]


class InstanceResult(BaseModel):
    index: int
    stressed: bool = False
    violations: Dict[str, Optional[float]] = Field(default_factory=dict)
    errors: Dict[str, str] = Field(default_factory=dict)


def _run_checks(sys: SplitSystem, tol: Tolerances, checks: List[Tuple[str, Check]], result: InstanceResult):
    try:
        r_A = spectral_radius(sys.A, tol).radius
    except ReproductionError as e:
        for name, _ in checks:
            result.errors[name] = str(e)
        return
    for name, check in checks:
        try:
            result.violations[name] = check(sys, tol, r_A)
        except TheoremViolation as e:
            result.errors[name] = str(e)
        except ReproductionError as e:
            result.errors[name] = f"{type(e).__name__}: {e}"


def _run_instance(index: int, seed: np.random.SeedSequence, cfg: GenConfig, tol: Tolerances) -> InstanceResult:
    rng = np.random.default_rng(seed)
    result = InstanceResult(index=index, stressed=cfg.target_rT >= STRESS_RT)

    try:
        split = gen_split(cfg, rng, tol)
    except ReproductionError as e:
        for name, _ in SPLIT_CHECKS:
            result.errors[name] = f"generation failed: {e}"
    else:
        _run_checks(split, tol, SPLIT_CHECKS, result)

    if cfg.n_max >= 2:
        try:
            irreducible = gen_irreducible_split(cfg, rng, tol)
        except ReproductionError as e:
            for name, _ in IRREDUCIBLE_CHECKS:
                result.errors[name] = f"generation failed: {e}"
        else:
            _run_checks(irreducible, tol, IRREDUCIBLE_CHECKS, result)
    return result


def cross_validate(
        count: int,
        cfg: GenConfig,
        tol: Optional[Tolerances] = None,
        workers: int = 1,
        targets: Optional[Sequence[float]] = None,
) -> SelfTestReport:
    """
    Run the invariant battery over count seeded instances. Failures are report content.

    :param workers: Threads evaluating instances. The report does not depend on it.
    :param targets: target_rT values cycled over the instances. Defaults to [cfg.target_rT].
    :raise BadRange: count < 1, or a target outside (0, 1).
    """
    if count < 1:
        raise BadRange(f"count must be >= 1, got {count}")
    tol = tol or Tolerances()
    targets = list(targets) if targets else [cfg.target_rT]
    configs = []
    for target in targets:
        if not 0.0 < target < 1.0:
            raise BadRange(f"target_rT must lie in (0, 1), got {target!r}")
        configs.append(cfg.model_copy(update={"target_rT": float(target)}))

    seeds = np.random.SeedSequence(cfg.seed).spawn(count)
    jobs = [(i, seeds[i], configs[i % len(configs)]) for i in range(count)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda job: _run_instance(job[0], job[1], job[2], tol), jobs))
    else:
        results = [_run_instance(i, seed, config, tol) for i, seed, config in jobs]

    outcomes = {name: InvariantOutcome(name=name, threshold=threshold) for name, threshold in THRESHOLDS.items()}
    report = SelfTestReport(count=count, config=cfg, targets=[c.target_rT for c in configs], outcomes=[])
    for result in results:
        if result.stressed:
            report.stress_instances.append(result.index)
            logger.warning(f"Instance {result.index} is a near-boundary stress case (r(T) >= {STRESS_RT}).")
        for name, violation in result.violations.items():
            if violation is None:
                continue
            outcome = outcomes[name]
            outcome.checked += 1
            outcome.worst = max(outcome.worst, violation)
            if violation > outcome.threshold:
                outcome.failures += 1
        for name, message in result.errors.items():
            outcome = outcomes[name]
            outcome.checked += 1
            outcome.failures += 1
            report.errors.append(f"instance {result.index}, {name}: {message}")

    report.outcomes = list(outcomes.values())
    return report


def render_report(report: SelfTestReport) -> str:
    """Plain-text report. Identical reports render to identical text."""
    lines = [
        f"selftest: count={report.count} seed={report.config.seed} n_max={report.config.n_max} "
        f"density={report.config.density:g} scale={report.config.scale:g} "
        f"target_rT={','.join(f'{t:g}' for t in report.targets)}",
        f"{'invariant':<20}{'checked':>8}{'failed':>8}{'worst':>12}{'threshold':>12}",
    ]
    for outcome in report.outcomes:
        worst = f"{outcome.worst:.3e}" if math.isfinite(outcome.worst) else "inf"
        lines.append(
            f"{outcome.name:<20}{outcome.checked:>8}{outcome.failures:>8}{worst:>12}{outcome.threshold:>12.1e}"
        )
    if report.stress_instances:
        lines.append(f"near-boundary stress instances: {', '.join(str(i) for i in report.stress_instances)}")
    lines.extend(report.errors)
    lines.append("all invariants passed" if report.all_passed else "INVARIANT FAILURES")
    return "\n".join(lines)
