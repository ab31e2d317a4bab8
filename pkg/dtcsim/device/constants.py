"""Physical constants and unit conversions.

All internal quantities are angular frequencies in rad/s; GHz/MHz/ns only
appear at I/O boundaries through the helpers below.
"""

from __future__ import annotations

import math

from scipy import constants as _codata

E_CHARGE = _codata.e
HBAR = _codata.hbar
# Reduced flux quantum, hbar / 2e.
PHI0 = HBAR / (2.0 * E_CHARGE)

FEMTO = 1e-15
TWO_PI = 2.0 * math.pi


def ghz_to_rad_s(value: float) -> float:
    return TWO_PI * value * 1e9


def rad_s_to_ghz(value: float) -> float:
    return value / (TWO_PI * 1e9)


def rad_s_to_mhz(value: float) -> float:
    return value / (TWO_PI * 1e6)


def rad_s_to_khz(value: float) -> float:
    return value / (TWO_PI * 1e3)


def rad_s_to_rad_ns(value: float) -> float:
    return value * 1e-9


__all__ = [
    "E_CHARGE",
    "FEMTO",
    "HBAR",
    "PHI0",
    "TWO_PI",
    "ghz_to_rad_s",
    "rad_s_to_ghz",
    "rad_s_to_khz",
    "rad_s_to_mhz",
    "rad_s_to_rad_ns",
]
