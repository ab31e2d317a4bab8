"""Bracketed derivative-free extremum searches over flux."""

from __future__ import annotations

import logging
import math
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from ..errors import NoInteriorExtremumError

logger = logging.getLogger(__name__)

DEFAULT_XATOL = 1e-5 * math.pi


def _check_bracket(bracket: Sequence[float]) -> tuple[float, float]:
    lo, hi = (float(b) for b in bracket)
    if not lo < hi:
        raise ValueError(f"bracket must be increasing (got {bracket!r})")
    return lo, hi


def _bounded(func: Callable[[float], float], lo: float, hi: float, xatol: float) -> float:
    result = minimize_scalar(func, bounds=(lo, hi), method="bounded", options={"xatol": xatol})
    return float(result.x)


def locate_interior_minimum(
    func: Callable[[float], float],
    bracket: Sequence[float],
    *,
    xatol: float = DEFAULT_XATOL,
) -> tuple[float, float]:
    """Minimize ``func`` on ``bracket`` and return ``(x, func(x))``.

    Raises
    ------
    NoInteriorExtremumError
        If the minimizer lands on a bracket edge, or an edge value is lower
        than the one found inside.
    """
    lo, hi = _check_bracket(bracket)
    x = _bounded(func, lo, hi, xatol)
    value = float(func(x))
    margin = 2.0 * xatol
    if x - lo <= margin or hi - x <= margin or value > min(func(lo), func(hi)):
        raise NoInteriorExtremumError(
            f"no interior minimum in [{lo / math.pi:.4f} pi, {hi / math.pi:.4f} pi]"
        )
    logger.debug(f"interior minimum at {x / math.pi:.6f} pi: {value:.6g}")
    return x, value


def locate_interior_maximum(
    func: Callable[[float], float],
    bracket: Sequence[float],
    *,
    grid_points: Optional[int] = None,
    xatol: float = DEFAULT_XATOL,
) -> tuple[float, float]:
    """Maximize ``func`` on ``bracket`` and return ``(x, func(x))``.

    With ``grid_points`` the bracket is scanned first and the refinement is
    restricted to the two cells around the best grid point, which keeps the
    search on the right peak when ``func`` has several.
    """
    lo, hi = _check_bracket(bracket)
    if grid_points:
        grid = np.linspace(lo, hi, int(grid_points))
        samples = np.array([func(x) for x in grid])
        best = int(np.argmax(samples))
        if best in (0, len(grid) - 1):
            raise NoInteriorExtremumError(
                f"maximum on [{lo / math.pi:.4f} pi, {hi / math.pi:.4f} pi] sits at the bracket edge"
            )
        lo, hi = float(grid[best - 1]), float(grid[best + 1])
    x, negative = locate_interior_minimum(lambda v: -func(v), (lo, hi), xatol=xatol)
    return x, -negative


__all__ = ["DEFAULT_XATOL", "locate_interior_maximum", "locate_interior_minimum"]
