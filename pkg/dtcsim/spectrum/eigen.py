"""Lowest eigenpairs of sparse Hermitian operators and computational labeling."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Hashable, Mapping, Optional

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from ..errors import ConvergenceError, LabelingError
from ..operators.hamiltonian import fix_phase

logger = logging.getLogger(__name__)

# Below this dimension a dense LAPACK solve beats ARPACK.
DENSE_LIMIT = 4096
RESIDUAL_TOL = 1e-9
ORTHONORMALITY_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class Eigenpairs:
    """Ascending eigenvalues (rad/s) and matching orthonormal column eigenvectors."""

    values: np.ndarray
    vectors: np.ndarray
    residuals: np.ndarray

    def __len__(self) -> int:
        return len(self.values)

    def sorted(self) -> "Eigenpairs":
        order = np.argsort(self.values, kind="stable")
        return Eigenpairs(self.values[order], self.vectors[:, order], self.residuals[order])


def _operator_norm(h: sp.spmatrix) -> float:
    # The 1-norm bounds the spectral norm of a Hermitian matrix from above.
    return float(spla.norm(h, 1)) if sp.issparse(h) else float(np.linalg.norm(h, 1))


def eigensolve(
    h: sp.spmatrix,
    k: int = 20,
    *,
    sigma: Optional[float] = None,
    dense_limit: int = DENSE_LIMIT,
    seed: int = 0,
) -> Eigenpairs:
    """Return the ``k`` lowest eigenpairs of the Hermitian matrix ``h``.

    Small problems are solved densely; larger ones with ARPACK Lanczos
    (``which="SA"``), or shift-invert around ``sigma`` when given. The start
    vector is drawn from a seeded generator so repeated runs are identical.
    Each eigenvector is phase-fixed so that its largest component is real
    positive.

    Raises
    ------
    ConvergenceError
        If ARPACK does not converge or a residual ``||Hv - lv||`` exceeds
        ``1e-9 ||H||``.
    """
    dim = h.shape[0]
    if h.shape != (dim, dim):
        raise ValueError("h must be square")
    k = int(min(k, dim))
    if k < 1:
        raise ValueError("k must be >= 1")

    if dim <= dense_limit or k >= dim - 1:
        dense = h.toarray() if sp.issparse(h) else np.asarray(h)
        values, vectors = scipy.linalg.eigh(dense, subset_by_index=[0, k - 1])
    else:
        rng = np.random.default_rng(seed)
        v0 = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        try:
            if sigma is None:
                values, vectors = spla.eigsh(h, k=k, which="SA", v0=v0)
            else:
                values, vectors = spla.eigsh(h, k=k, sigma=sigma, which="LM", v0=v0)
        except spla.ArpackNoConvergence as exc:
            raise ConvergenceError(
                f"ARPACK did not converge: {len(exc.eigenvalues)} of {k} eigenpairs found",
                residuals=[],
            ) from exc

    order = np.argsort(values, kind="stable")
    values = np.asarray(values)[order].real
    vectors = np.asarray(vectors)[:, order].astype(complex)

    gram = vectors.conj().T @ vectors
    if np.max(np.abs(gram - np.eye(k))) > ORTHONORMALITY_TOL:
        vectors, _ = np.linalg.qr(vectors)
    vectors = np.column_stack([fix_phase(vectors[:, i]) for i in range(k)])

    residuals = np.linalg.norm(h @ vectors - vectors * values, axis=0)
    scale = _operator_norm(h)
    worst = float(residuals.max()) if k else 0.0
    logger.debug(f"eigensolve dim={dim} k={k}: worst residual {worst:.3e} (||H||={scale:.3e})")
    if worst > RESIDUAL_TOL * scale:
        raise ConvergenceError(
            f"eigenpair residual {worst:.3e} exceeds {RESIDUAL_TOL:g} * ||H|| = {RESIDUAL_TOL * scale:.3e}",
            residuals=residuals.tolist(),
        )
    return Eigenpairs(values=values, vectors=vectors, residuals=residuals)


@dataclass(frozen=True)
class LabelAssignment:
    """Index of the eigenpair carrying a label and its squared overlap."""

    index: int
    overlap: float


def label_states(
    pairs: Eigenpairs,
    references: Mapping[Hashable, np.ndarray],
    *,
    min_overlap: float = 0.5,
    tie_tol: float = 1e-12,
    theta: Optional[float] = None,
) -> dict[Hashable, LabelAssignment]:
    """Assign each reference label to the eigenstate of maximal squared overlap.

    ``pairs`` is sorted by energy first, so the assignment does not depend on
    the input order; returned indices refer to the sorted order. Overlaps
    equal within ``tie_tol`` are broken in favour of the lower energy.

    Raises
    ------
    LabelingError
        If a winning overlap is below ``min_overlap`` or two labels claim the
        same eigenstate.
    """
    pairs = pairs.sorted()
    assignment: dict[Hashable, LabelAssignment] = {}
    claimed: dict[int, Hashable] = {}
    where = "" if theta is None else f" at theta={theta / np.pi:.6f} pi"
    for label, reference in references.items():
        overlaps = np.abs(np.asarray(reference).conj() @ pairs.vectors) ** 2
        best = float(overlaps.max())
        # lowest index among near-ties is the lowest energy
        index = int(np.flatnonzero(overlaps >= best - tie_tol)[0])
        if best < min_overlap:
            raise LabelingError(
                f"state {label} hybridized too strongly{where}: best overlap {best:.3f}",
                theta=theta,
                overlap=best,
            )
        if index in claimed:
            raise LabelingError(
                f"labels {claimed[index]} and {label} both map to eigenstate {index}{where}",
                theta=theta,
                overlap=best,
            )
        claimed[index] = label
        assignment[label] = LabelAssignment(index=index, overlap=best)
    return assignment


__all__ = [
    "DENSE_LIMIT",
    "Eigenpairs",
    "LabelAssignment",
    "eigensolve",
    "label_states",
]
