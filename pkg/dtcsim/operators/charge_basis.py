"""Single-transmon operators in the Cooper-pair number basis and their embedding."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
import scipy.sparse as sp

from ..device.params import N_TRANSMONS


def _check_cutoff(cutoff: int) -> int:
    if isinstance(cutoff, bool) or int(cutoff) != cutoff or cutoff < 1:
        raise ValueError(f"charge cutoff must be an integer >= 1 (got {cutoff!r})")
    return int(cutoff)


def charge_operator(cutoff: int) -> sp.csr_matrix:
    """Return ``n = diag(-N, ..., N)`` as a ``(2N+1) x (2N+1)`` sparse matrix."""
    cutoff = _check_cutoff(cutoff)
    return sp.diags(np.arange(-cutoff, cutoff + 1, dtype=float), format="csr")


def shift_operator(cutoff: int) -> sp.csr_matrix:
    """Return the lowering shift ``S|n> = |n-1>`` (the truncated ``exp(i phi)``).

    ``S|-N>`` is dropped by the truncation.
    """
    cutoff = _check_cutoff(cutoff)
    dim = 2 * cutoff + 1
    return sp.diags(np.ones(dim - 1), offsets=1, shape=(dim, dim), format="csr")


def cos_sin_operators(cutoff: int) -> tuple[sp.csr_matrix, sp.csr_matrix]:
    """Return ``(cos phi, sin phi)`` built from :func:`shift_operator`.

    ``cos = (S + S^dag) / 2`` and ``sin = (S - S^dag) / 2i``; both Hermitian.
    The shift direction only flips the sign of ``sin``, which leaves spectra
    and matrix-element moduli unchanged.
    """
    shift = shift_operator(cutoff)
    cos_phi = ((shift + shift.T) * 0.5).tocsr()
    sin_phi = ((shift - shift.T) * (-0.5j)).tocsr()
    return cos_phi, sin_phi


def embed(local_ops: Mapping[int, sp.spmatrix], dims: Sequence[int]) -> sp.csr_matrix:
    """Tensor ``local_ops`` (site -> operator) with identities on the other sites.

    Site 0 is the leftmost (most significant) factor.
    """
    factors = []
    for site, dim in enumerate(dims):
        op = local_ops.get(site)
        factors.append(sp.identity(dim, format="csr") if op is None else sp.csr_matrix(op))
    result = factors[0]
    for factor in factors[1:]:
        result = sp.kron(result, factor, format="csr")
    result.eliminate_zeros()
    return result


@dataclass(frozen=True, eq=False)
class OperatorSet:
    """Charge-basis operators of the four transmons on the full product space.

    Attributes
    ----------
    cutoff : int
        Cooper-pair number cutoff ``N``.
    n_ops, cos_ops, sin_ops : tuple[sp.csr_matrix, ...]
        ``n_i``, ``cos phi_i`` and ``sin phi_i`` embedded for ``i = 1..4``.
    cos_rel, sin_rel : sp.csr_matrix
        ``cos(phi_4 - phi_3)`` and ``sin(phi_4 - phi_3)``.
    dim : int
        ``(2N+1)^4``.
    """

    cutoff: int
    n_ops: tuple[sp.csr_matrix, ...]
    cos_ops: tuple[sp.csr_matrix, ...]
    sin_ops: tuple[sp.csr_matrix, ...]
    cos_rel: sp.csr_matrix
    sin_rel: sp.csr_matrix
    dim: int

    @property
    def local_dim(self) -> int:
        return 2 * self.cutoff + 1


def relative_phase_operators(
    shift3: sp.spmatrix, shift4: sp.spmatrix, dims: Sequence[int]
) -> tuple[sp.csr_matrix, sp.csr_matrix]:
    """Return ``cos(phi_4 - phi_3)`` and ``sin(phi_4 - phi_3)`` on the product space.

    ``exp(i(phi_4 - phi_3)) = S_4 S_3^dag``, so both follow from one product.
    """
    forward = embed({2: sp.csr_matrix(shift3).conj().T, 3: shift4}, dims)
    backward = forward.conj().T.tocsr()
    cos_rel = ((forward + backward) * 0.5).tocsr()
    sin_rel = ((forward - backward) * (-0.5j)).tocsr()
    return cos_rel, sin_rel


def build_operator_set(cutoff: int) -> OperatorSet:
    """Construct every embedded charge-basis operator for cutoff ``N``."""
    cutoff = _check_cutoff(cutoff)
    local_dim = 2 * cutoff + 1
    dims = [local_dim] * N_TRANSMONS
    n_local = charge_operator(cutoff)
    cos_local, sin_local = cos_sin_operators(cutoff)
    shift = shift_operator(cutoff)

    n_ops = tuple(embed({i: n_local}, dims) for i in range(N_TRANSMONS))
    cos_ops = tuple(embed({i: cos_local}, dims) for i in range(N_TRANSMONS))
    sin_ops = tuple(embed({i: sin_local}, dims) for i in range(N_TRANSMONS))
    cos_rel, sin_rel = relative_phase_operators(shift, shift, dims)
    return OperatorSet(
        cutoff=cutoff,
        n_ops=n_ops,
        cos_ops=cos_ops,
        sin_ops=sin_ops,
        cos_rel=cos_rel,
        sin_rel=sin_rel,
        dim=local_dim**N_TRANSMONS,
    )


__all__ = [
    "OperatorSet",
    "build_operator_set",
    "charge_operator",
    "cos_sin_operators",
    "embed",
    "relative_phase_operators",
    "shift_operator",
]
