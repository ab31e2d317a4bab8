"""Flux-parametrized Hamiltonian of two qubits and a double-transmon coupler.

All operators here are ``H / hbar`` in rad/s.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from ..device.params import N_TRANSMONS, DerivedParams
from ..errors import LabelingError
from .charge_basis import (
    OperatorSet,
    build_operator_set,
    charge_operator,
    cos_sin_operators,
    embed,
    relative_phase_operators,
    shift_operator,
)

logger = logging.getLogger(__name__)

Label = tuple[int, int, int, int]

# Operator sets depend only on the cutoff.
_cached_operator_set = lru_cache(maxsize=4)(build_operator_set)


def fix_phase(vector: np.ndarray) -> np.ndarray:
    """Rotate ``vector`` so that its largest-magnitude component is real positive."""
    vector = np.asarray(vector)
    idx = int(np.argmax(np.abs(vector)))
    pivot = vector[idx]
    if pivot == 0:
        return vector
    return vector * (abs(pivot) / pivot)


def bare_transmon_eigensystem(
    cutoff: int, w_ii: float, omega_j: float
) -> tuple[np.ndarray, np.ndarray]:
    """Diagonalize ``4 W_ii n^2 - omega_J cos(phi)`` in the charge basis.

    Returns ascending eigenvalues (rad/s) and real eigenvectors as columns,
    each with its largest component positive.
    """
    n = np.arange(-cutoff, cutoff + 1, dtype=float)
    diagonal = 4.0 * w_ii * n**2
    off_diagonal = np.full(2 * cutoff, -0.5 * omega_j)
    evals, evecs = scipy.linalg.eigh_tridiagonal(diagonal, off_diagonal, check_finite=False)
    evecs = np.column_stack([fix_phase(evecs[:, k]) for k in range(evecs.shape[1])])
    return evals, np.real(evecs)


@dataclass(frozen=True, eq=False)
class HamiltonianModel:
    """Sparse ``H(Theta_ex, dTheta_ex/dt) / hbar`` split into fixed parts.

    ``H = static + cos(Theta) loop_cos + sin(Theta) loop_sin
    + (dTheta/dt / omega_C34) drive`` where ``loop_cos = -omega_J5 cos(phi_4 - phi_3)``
    and ``loop_sin = -omega_J5 sin(phi_4 - phi_3)``.

    Attributes
    ----------
    static : sp.csr_matrix
        Kinetic term ``4 n^T W n`` plus the four transmon cosine potentials.
    loop_cos, loop_sin : sp.csr_matrix
        Flux-dependent coupler-loop terms.
    drive : sp.csr_matrix
        ``(0, 0, -1, 1) W n``, multiplied by ``dTheta/dt / omega_C34``.
    omega_c34 : float
        Coupler charging frequency in rad/s.
    cutoff : int
        Charge cutoff ``N`` the model was built from.
    local_states : tuple[np.ndarray, ...]
        Per-transmon bare eigenvectors (columns) expressed in the model basis.
    coupler_terms : tuple[np.ndarray, np.ndarray, np.ndarray]
        Static, cosine and sine parts of the isolated coupler pair (transmons
        3 and 4 joined by the loop junction) on its own two-site space.
    basis : str
        ``"charge"`` for the full charge basis, ``"eigen"`` after truncation.
    """

    static: sp.csr_matrix
    loop_cos: sp.csr_matrix
    loop_sin: sp.csr_matrix
    drive: sp.csr_matrix
    omega_c34: float
    cutoff: int
    local_states: tuple[np.ndarray, ...]
    coupler_terms: tuple[np.ndarray, ...] = ()
    basis: str = "charge"

    @property
    def dim(self) -> int:
        return self.static.shape[0]

    @property
    def local_dims(self) -> tuple[int, ...]:
        return tuple(states.shape[0] for states in self.local_states)

    def assemble(self, theta: float, theta_dot: float = 0.0) -> sp.csr_matrix:
        """Return ``H / hbar`` at flux ``theta`` (rad) and flux rate ``theta_dot`` (rad/s)."""
        h = self.static + np.cos(theta) * self.loop_cos + np.sin(theta) * self.loop_sin
        if theta_dot != 0.0:
            h = h + (theta_dot / self.omega_c34) * self.drive
        return sp.csr_matrix(h)

    def apply(self, theta: float, theta_dot: float, psi: np.ndarray) -> np.ndarray:
        """Return ``H(theta, theta_dot) psi / hbar`` without assembling ``H``."""
        out = self.static @ psi
        out = out + np.cos(theta) * (self.loop_cos @ psi)
        out = out + np.sin(theta) * (self.loop_sin @ psi)
        if theta_dot != 0.0:
            out = out + (theta_dot / self.omega_c34) * (self.drive @ psi)
        return out

    def reference_product(self, label: Sequence[int]) -> np.ndarray:
        """Return the bare product state ``|l1> x |l2> x |l3> x |l4>`` in the model basis.

        Raises
        ------
        LabelingError
            If a label exceeds the levels kept per transmon.
        """
        if len(label) != N_TRANSMONS:
            raise ValueError(f"label must have four entries (got {label!r})")
        vector = np.ones(1)
        for site, level in enumerate(label):
            vector = np.kron(vector, self._bare_state(site, level))
        return vector.astype(complex)

    def coupler_ground(self, theta: float) -> np.ndarray:
        """Ground state of the isolated coupler pair at flux ``theta`` on its two-site space."""
        if not self.coupler_terms:
            raise ValueError("model was built without coupler-pair terms")
        static, loop_cos, loop_sin = self.coupler_terms
        h = static + np.cos(theta) * loop_cos + np.sin(theta) * loop_sin
        _, vecs = scipy.linalg.eigh(h, subset_by_index=[0, 0])
        return fix_phase(vecs[:, 0])

    def computational_reference(self, q1: int, q2: int, theta: float) -> np.ndarray:
        """Return ``|q1> x |q2> x |coupler ground at theta>`` in the model basis.

        The qubit factors are bare transmon states. The coupler factor is the
        ground state of transmons 3 and 4 joined by the loop junction, whose
        phase equilibrium the flux displaces away from the bare product.
        """
        qubits = np.kron(self._bare_state(0, q1), self._bare_state(1, q2))
        return np.kron(qubits, self.coupler_ground(theta)).astype(complex)

    def _bare_state(self, site: int, level: int) -> np.ndarray:
        states = self.local_states[site]
        if level >= states.shape[1]:
            raise LabelingError(
                f"transmon {site + 1} keeps {states.shape[1]} levels; "
                f"cannot represent bare level {level}"
            )
        return states[:, level]


def _kinetic(
    n_ops: Sequence[sp.spmatrix], n2_ops: Sequence[sp.spmatrix], w: np.ndarray
) -> sp.csr_matrix:
    dim = n_ops[0].shape[0]
    kinetic = sp.csr_matrix((dim, dim))
    for i in range(N_TRANSMONS):
        kinetic = kinetic + 4.0 * w[i, i] * n2_ops[i]
        for j in range(i + 1, N_TRANSMONS):
            if w[i, j] != 0.0:
                kinetic = kinetic + 8.0 * w[i, j] * (n_ops[i] @ n_ops[j])
    return kinetic


def _coupler_terms(
    n_local: Sequence[np.ndarray],
    n2_local: Sequence[np.ndarray],
    cos_local: Sequence[np.ndarray],
    shift_local: Sequence[np.ndarray],
    derived: DerivedParams,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Dense static, cosine and sine parts of the coupler pair alone.

    Each sequence holds the single-site operators of transmons 3 and 4 in the
    model's local basis.
    """
    w = np.asarray(derived.w)
    omega_j = np.asarray(derived.omega_j)
    dims = [1, 1, n_local[0].shape[0], n_local[1].shape[0]]
    static = (
        4.0 * w[2, 2] * embed({2: n2_local[0]}, dims)
        + 4.0 * w[3, 3] * embed({3: n2_local[1]}, dims)
        + 8.0 * w[2, 3] * embed({2: n_local[0], 3: n_local[1]}, dims)
        - omega_j[2] * embed({2: cos_local[0]}, dims)
        - omega_j[3] * embed({3: cos_local[1]}, dims)
    )
    cos_rel, sin_rel = relative_phase_operators(shift_local[0], shift_local[1], dims)
    return (
        static.toarray().astype(complex),
        (-omega_j[4] * cos_rel).toarray().astype(complex),
        (-omega_j[4] * sin_rel).toarray().astype(complex),
    )


def _assemble_model(
    *,
    n_ops: Sequence[sp.spmatrix],
    n2_ops: Sequence[sp.spmatrix],
    cos_ops: Sequence[sp.spmatrix],
    cos_rel: sp.spmatrix,
    sin_rel: sp.spmatrix,
    derived: DerivedParams,
    cutoff: int,
    local_states: tuple[np.ndarray, ...],
    coupler_terms: tuple[np.ndarray, ...],
    basis: str,
) -> HamiltonianModel:
    w = np.asarray(derived.w)
    omega_j = np.asarray(derived.omega_j)
    static = _kinetic(n_ops, n2_ops, w)
    for i in range(N_TRANSMONS):
        static = static - omega_j[i] * cos_ops[i]
    drive = sum(((w[3, j] - w[2, j]) * n_ops[j] for j in range(N_TRANSMONS)), sp.csr_matrix(static.shape))

    def _clean(matrix: sp.spmatrix) -> sp.csr_matrix:
        matrix = sp.csr_matrix(matrix, dtype=complex)
        matrix.eliminate_zeros()
        return matrix

    return HamiltonianModel(
        static=_clean(static),
        loop_cos=_clean(-omega_j[4] * cos_rel),
        loop_sin=_clean(-omega_j[4] * sin_rel),
        drive=_clean(drive),
        omega_c34=float(derived.omega_c34),
        cutoff=cutoff,
        local_states=local_states,
        coupler_terms=coupler_terms,
        basis=basis,
    )


def _check_dimensions(ops: OperatorSet, derived: DerivedParams) -> None:
    if np.shape(derived.w) != (N_TRANSMONS, N_TRANSMONS) or len(derived.omega_j) != 5:
        raise ValueError("derived parameters must hold a 4x4 W and five Josephson frequencies")
    if ops.dim != ops.local_dim**N_TRANSMONS or any(op.shape != (ops.dim, ops.dim) for op in ops.n_ops):
        raise ValueError("operator set dimensions are inconsistent with its cutoff")


def build_hamiltonian_model(ops: OperatorSet, derived: DerivedParams) -> HamiltonianModel:
    """Build the full charge-basis :class:`HamiltonianModel`."""
    _check_dimensions(ops, derived)
    w = np.asarray(derived.w)
    local_states = tuple(
        bare_transmon_eigensystem(ops.cutoff, w[i, i], derived.omega_j[i])[1]
        for i in range(N_TRANSMONS)
    )
    n_local = charge_operator(ops.cutoff).toarray()
    cos_local = cos_sin_operators(ops.cutoff)[0].toarray()
    shift_local = shift_operator(ops.cutoff).toarray()
    model = _assemble_model(
        n_ops=ops.n_ops,
        n2_ops=[n @ n for n in ops.n_ops],
        cos_ops=ops.cos_ops,
        cos_rel=ops.cos_rel,
        sin_rel=ops.sin_rel,
        derived=derived,
        cutoff=ops.cutoff,
        local_states=local_states,
        coupler_terms=_coupler_terms(
            (n_local, n_local),
            (n_local @ n_local, n_local @ n_local),
            (cos_local, cos_local),
            (shift_local, shift_local),
            derived,
        ),
        basis="charge",
    )
    logger.debug(f"Built charge-basis model: N={ops.cutoff}, dim={model.dim}, nnz={model.static.nnz}")
    return model


def assemble_hamiltonian(
    ops: OperatorSet, derived: DerivedParams, theta: float, theta_dot: float = 0.0
) -> sp.csr_matrix:
    """Return the sparse ``H(theta, theta_dot) / hbar`` in rad/s."""
    return build_hamiltonian_model(ops, derived).assemble(theta, theta_dot)


def truncate_to_eigenbasis(
    ops: OperatorSet, derived: DerivedParams, levels: int
) -> HamiltonianModel:
    """Project every transmon onto its lowest ``levels`` bare eigenstates.

    Each bare transmon (``4 W_ii n^2 - omega_Ji cos phi``) is diagonalized in
    the charge basis; all single-site operators, including ``n^2`` and the
    coupler shift operators, are projected before being tensored together.
    The reduced dimension is ``levels^4``.
    """
    _check_dimensions(ops, derived)
    local_dim = ops.local_dim
    if isinstance(levels, bool) or int(levels) != levels or not 1 <= levels <= local_dim:
        raise ValueError(f"levels must lie in [1, {local_dim}] (got {levels!r})")
    levels = int(levels)

    w = np.asarray(derived.w)
    n_local = charge_operator(ops.cutoff).toarray()
    cos_local = cos_sin_operators(ops.cutoff)[0].toarray()
    shift_local = shift_operator(ops.cutoff).toarray()

    projectors = []
    for i in range(N_TRANSMONS):
        _, evecs = bare_transmon_eigensystem(ops.cutoff, w[i, i], derived.omega_j[i])
        projectors.append(evecs[:, :levels])

    def _project(op: np.ndarray, u: np.ndarray) -> np.ndarray:
        return u.T @ op @ u

    n_proj = [_project(n_local, u) for u in projectors]
    n2_proj = [_project(n_local @ n_local, u) for u in projectors]
    cos_proj = [_project(cos_local, u) for u in projectors]
    shift_proj = [_project(shift_local, u) for u in projectors]

    dims = [levels] * N_TRANSMONS
    n_ops = [embed({i: n_proj[i]}, dims) for i in range(N_TRANSMONS)]
    n2_ops = [embed({i: n2_proj[i]}, dims) for i in range(N_TRANSMONS)]
    cos_ops = [embed({i: cos_proj[i]}, dims) for i in range(N_TRANSMONS)]
    cos_rel, sin_rel = relative_phase_operators(shift_proj[2], shift_proj[3], dims)
    identity_states = tuple(np.eye(levels) for _ in range(N_TRANSMONS))
    model = _assemble_model(
        n_ops=n_ops,
        n2_ops=n2_ops,
        cos_ops=cos_ops,
        cos_rel=cos_rel,
        sin_rel=sin_rel,
        derived=derived,
        cutoff=ops.cutoff,
        local_states=identity_states,
        coupler_terms=_coupler_terms(n_proj[2:], n2_proj[2:], cos_proj[2:], shift_proj[2:], derived),
        basis="eigen",
    )
    logger.debug(f"Built truncated model: N={ops.cutoff}, levels={levels}, dim={model.dim}")
    return model


def build_model(
    derived: DerivedParams, cutoff: int, truncation_levels: Optional[int] = None
) -> HamiltonianModel:
    """Build the full model, or the truncated one when ``truncation_levels`` is set."""
    ops = _cached_operator_set(cutoff)
    if truncation_levels:
        return truncate_to_eigenbasis(ops, derived, truncation_levels)
    return build_hamiltonian_model(ops, derived)


__all__ = [
    "HamiltonianModel",
    "Label",
    "assemble_hamiltonian",
    "bare_transmon_eigensystem",
    "build_hamiltonian_model",
    "build_model",
    "fix_phase",
    "truncate_to_eigenbasis",
]
