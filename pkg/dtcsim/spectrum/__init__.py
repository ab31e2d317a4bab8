"""Eigenpairs, state labelling and flux sweeps."""

from .eigen import Eigenpairs, LabelAssignment, eigensolve, label_states
from .extrema import locate_interior_maximum, locate_interior_minimum
from .sweep import (
    COMPUTATIONAL_LABELS,
    IdlePoint,
    Level,
    SpectrumResult,
    cutoff_convergence,
    delta_at_idle,
    effective_coupling,
    find_idle_point,
    product_label,
    spectrum_at,
    spectrum_from_pairs,
    sweep_spectrum,
    sweep_table,
)

__all__ = [
    "COMPUTATIONAL_LABELS",
    "Eigenpairs",
    "IdlePoint",
    "LabelAssignment",
    "Level",
    "SpectrumResult",
    "cutoff_convergence",
    "delta_at_idle",
    "effective_coupling",
    "eigensolve",
    "find_idle_point",
    "label_states",
    "locate_interior_maximum",
    "locate_interior_minimum",
    "product_label",
    "spectrum_at",
    "spectrum_from_pairs",
    "sweep_spectrum",
    "sweep_table",
]
