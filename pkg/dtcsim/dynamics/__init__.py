"""Schroedinger propagation of computational states under flux pulses."""

from .propagate import DEFAULT_TOL, PropagationResult, propagate, propagate_computational_basis

__all__ = ["DEFAULT_TOL", "PropagationResult", "propagate", "propagate_computational_basis"]
