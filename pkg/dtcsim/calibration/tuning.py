"""Derivative-free tuning of the dc ramp corrections."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from ..errors import ConfigurationError
from ..gates.engine import GateSimulator
from .families import DcPulseFamily

logger = logging.getLogger(__name__)

CONVERGED = "converged"
BUDGET_EXHAUSTED = "budget_exhausted"


@dataclass(frozen=True)
class PatternSearchResult:
    """Best point found, its objective value and how the search ended.

    ``value`` is NaN when no evaluation fitted in the budget.
    """

    x: tuple[float, ...]
    value: float
    evaluations: int
    status: str
    history: tuple[tuple[tuple[float, ...], float], ...] = field(default=(), repr=False)


def pattern_search(
    objective: Callable[[np.ndarray], float],
    x0: Sequence[float],
    *,
    step: float,
    budget: int,
    min_step: float = 1e-3,
    feasible: Optional[Callable[[np.ndarray], bool]] = None,
    threads: Optional[int] = None,
) -> PatternSearchResult:
    """Minimize ``objective`` by compass search.

    Every iteration polls ``x +- step e_i`` for each coordinate, evaluating
    the feasible poll points concurrently. The best improving point is
    accepted; without improvement the step is halved. The search converges
    once the step drops below ``min_step`` and otherwise stops after
    ``budget`` objective evaluations (the start point included). Infeasible
    points are skipped without spending budget.
    """
    if budget < 0:
        raise ValueError("budget must be non-negative")
    x = np.asarray(x0, dtype=float)
    history: list[tuple[tuple[float, ...], float]] = []
    if budget == 0:
        return PatternSearchResult(tuple(x), math.nan, 0, BUDGET_EXHAUSTED)

    best = float(objective(x))
    history.append((tuple(x), best))
    used = 1
    status = BUDGET_EXHAUSTED

    with ThreadPoolExecutor(max_workers=threads) as pool:
        while used < budget:
            if step < min_step:
                status = CONVERGED
                break
            polls = []
            for i in range(x.size):
                for sign in (1.0, -1.0):
                    candidate = x.copy()
                    candidate[i] += sign * step
                    if feasible is None or feasible(candidate):
                        polls.append(candidate)
            polls = polls[: budget - used]
            values = list(pool.map(objective, polls))
            used += len(polls)
            history.extend((tuple(p), float(v)) for p, v in zip(polls, values))

            improved = False
            for candidate, value in zip(polls, values):
                if value < best:
                    x, best, improved = candidate, float(value), True
            if not improved:
                step /= 2.0
            logger.debug(f"pattern search: {used}/{budget} evaluations, best={best:.6e}, step={step:.3e}")
        else:
            if step < min_step:
                status = CONVERGED

    if status == BUDGET_EXHAUSTED:
        logger.warning(f"pattern search stopped after {used} evaluations; returning best so far ({best:.6e})")
    return PatternSearchResult(tuple(float(v) for v in x), best, used, status, tuple(history))


@dataclass(frozen=True)
class RampTuning:
    """Tuned ramp coefficients and the total leakage they reach at the tuning gate time."""

    coeffs: tuple[float, ...]
    total_leakage: float
    evaluations: int
    status: str


def tune_dc_ramp(
    simulator: GateSimulator,
    family: DcPulseFamily,
    gate_time: float,
    budget: int,
    *,
    kind: str = "cz",
    n_coeffs: Optional[int] = None,
    step: float = 0.05,
    min_step: float = 1e-3,
    threads: Optional[int] = None,
) -> RampTuning:
    """Minimize the total leakage at ``gate_time`` over the ramp coefficients.

    Starts from ``family.ramp_coeffs`` padded with zeros to ``n_coeffs``
    (two when the family has none). Candidates violating the overshoot bound
    are never simulated, so the result always satisfies it. A zero budget
    returns the starting coefficients unchanged.

    Raises
    ------
    ConfigurationError
        If the starting coefficients already break the overshoot bound.
    """
    start = list(family.ramp_coeffs)
    size = n_coeffs if n_coeffs is not None else max(len(start), 2)
    start = (start + [0.0] * size)[:size]
    if not family.admits(start):
        raise ConfigurationError(
            f"starting ramp coefficients {tuple(start)} exceed the overshoot bound "
            f"{family.max_overshoot / math.pi:.4f} pi; nothing to tune from"
        )

    def _leakage(coeffs: np.ndarray) -> float:
        return simulator.simulate(kind, family.with_coeffs(coeffs).at(gate_time)).total_leakage

    result = pattern_search(
        _leakage,
        start,
        step=step,
        budget=budget,
        min_step=min_step,
        feasible=lambda c: family.admits(c),
        threads=threads,
    )
    logger.info(
        f"dc ramp tuning at T={gate_time} ns: sum L = {result.value:.3e} after {result.evaluations} "
        f"simulations ({result.status})"
    )
    return RampTuning(
        coeffs=result.x, total_leakage=result.value, evaluations=result.evaluations, status=result.status
    )


__all__ = [
    "BUDGET_EXHAUSTED",
    "CONVERGED",
    "PatternSearchResult",
    "RampTuning",
    "pattern_search",
    "tune_dc_ramp",
]
