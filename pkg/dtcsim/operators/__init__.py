"""Charge-basis operators and the flux-parametrized system Hamiltonian."""

from .charge_basis import (
    OperatorSet,
    build_operator_set,
    charge_operator,
    cos_sin_operators,
    embed,
    shift_operator,
)
from .hamiltonian import (
    HamiltonianModel,
    Label,
    assemble_hamiltonian,
    bare_transmon_eigensystem,
    build_hamiltonian_model,
    build_model,
    fix_phase,
    truncate_to_eigenbasis,
)

__all__ = [
    "HamiltonianModel",
    "Label",
    "OperatorSet",
    "assemble_hamiltonian",
    "bare_transmon_eigensystem",
    "build_hamiltonian_model",
    "build_model",
    "build_operator_set",
    "charge_operator",
    "cos_sin_operators",
    "embed",
    "fix_phase",
    "shift_operator",
    "truncate_to_eigenbasis",
]
