"""Labelled spectra versus flux, the idling point and the derived couplings."""

from __future__ import annotations

import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np
import pandas as pd

from ..device.constants import rad_s_to_ghz, rad_s_to_khz, rad_s_to_mhz
from ..device.params import DeviceParams, derive_params
from ..errors import ConfigurationError, LabelingError
from ..operators.hamiltonian import HamiltonianModel, Label, build_model
from .eigen import Eigenpairs, LabelAssignment, eigensolve, label_states
from .extrema import DEFAULT_XATOL, locate_interior_minimum

logger = logging.getLogger(__name__)

QubitLabel = tuple[int, int]

# Ordered by the gate-matrix index 2i + j.
COMPUTATIONAL_LABELS: tuple[QubitLabel, ...] = ((0, 0), (0, 1), (1, 0), (1, 1))

TAG_COMPUTATIONAL = "computational"
TAG_COUPLER = "coupler-excited"
TAG_SECOND = "qubit-second-excited"
TAG_OTHER = "other"

DEFAULT_EIGEN_COUNT = 20
IDLE_BRACKET = (0.6 * math.pi, 0.7 * math.pi)


def product_label(q1: int, q2: int) -> Label:
    """Bare product label of a computational state (couplers in their ground state)."""
    return (q1, q2, 0, 0)


def _tag_candidates(max_excitations: int = 2) -> list[Label]:
    return [
        label
        for label in itertools.product(range(max_excitations + 1), repeat=4)
        if sum(label) <= max_excitations
    ]


def _tag_for(label: Label) -> str:
    if label[2] or label[3]:
        return TAG_COUPLER
    if max(label[0], label[1]) >= 2:
        return TAG_SECOND
    return TAG_OTHER


@dataclass(frozen=True)
class Level:
    """One eigenstate of a :class:`SpectrumResult`.

    ``frequency`` is in rad/s relative to the ``|00>`` level. ``label`` is the
    bare product with the largest overlap and ``overlap`` its squared value.
    """

    index: int
    frequency: float
    label: Label
    tag: str
    overlap: float


@dataclass(frozen=True, eq=False)
class SpectrumResult:
    """Labelled low-lying eigenpairs at one flux point.

    Attributes
    ----------
    theta : float
        External flux in radians.
    cutoff : int
        Charge cutoff ``N`` of the model.
    energies : np.ndarray
        Ascending absolute eigenvalues, rad/s.
    vectors : np.ndarray
        Matching phase-fixed eigenvectors as columns.
    levels : tuple[Level, ...]
        Per-eigenstate frequency, label and tag.
    computational : Mapping[QubitLabel, LabelAssignment]
        Eigenstate index and overlap carrying each computational label.
    """

    theta: float
    cutoff: int
    energies: np.ndarray
    vectors: np.ndarray
    levels: tuple[Level, ...]
    computational: Mapping[QubitLabel, LabelAssignment]

    @property
    def theta_over_pi(self) -> float:
        return self.theta / math.pi

    def index(self, q1: int, q2: int) -> int:
        try:
            return self.computational[(q1, q2)].index
        except KeyError:
            raise LabelingError(
                f"label |{q1}{q2}> missing at theta={self.theta_over_pi:.6f} pi", theta=self.theta
            ) from None

    def frequency(self, q1: int, q2: int) -> float:
        """``omega_{q1,q2}`` in rad/s, with ``omega_{0,0} = 0``."""
        return float(self.energies[self.index(q1, q2)] - self.energies[self.index(0, 0)])

    def state(self, q1: int, q2: int) -> np.ndarray:
        return self.vectors[:, self.index(q1, q2)]

    @property
    def zz(self) -> float:
        return self.frequency(1, 1) - self.frequency(1, 0) - self.frequency(0, 1)

    @property
    def delta(self) -> float:
        return self.frequency(0, 1) - self.frequency(1, 0)

    def idle_frequencies(self) -> np.ndarray:
        """Computational frequencies ordered by gate index ``2i + j``."""
        return np.array([self.frequency(*label) for label in COMPUTATIONAL_LABELS])

    def idle_basis(self) -> np.ndarray:
        """Computational eigenvectors as columns ordered by gate index ``2i + j``."""
        return np.column_stack([self.state(*label) for label in COMPUTATIONAL_LABELS])


def spectrum_from_pairs(
    model: HamiltonianModel,
    pairs: Eigenpairs,
    theta: float,
    references: Optional[Mapping[QubitLabel, np.ndarray]] = None,
) -> SpectrumResult:
    """Label ``pairs`` and tag every level.

    Computational labels come from ``references``. When omitted, each
    reference is the bare qubit pair times the coupler-pair ground state at
    ``theta`` (see :meth:`HamiltonianModel.computational_reference`). The
    remaining levels are tagged from their dominant bare product with at most
    two excitations; those tags are informational and carry no overlap
    threshold.
    """
    pairs = pairs.sorted()
    if references is None:
        references = {label: model.computational_reference(*label, theta) for label in COMPUTATIONAL_LABELS}
    computational = label_states(pairs, references, theta=theta)

    candidates = _tag_candidates()
    products = np.column_stack([model.reference_product(label) for label in candidates])
    overlaps = np.abs(products.conj().T @ pairs.vectors) ** 2
    by_index = {assignment.index: label for label, assignment in computational.items()}
    ground = pairs.values[computational[(0, 0)].index]

    levels = []
    for idx in range(len(pairs)):
        best = int(np.argmax(overlaps[:, idx]))
        if idx in by_index:
            label = product_label(*by_index[idx])
            tag = TAG_COMPUTATIONAL
            overlap = computational[by_index[idx]].overlap
        else:
            label = candidates[best]
            tag = _tag_for(label)
            overlap = float(overlaps[best, idx])
        levels.append(
            Level(index=idx, frequency=float(pairs.values[idx] - ground), label=label, tag=tag, overlap=overlap)
        )

    return SpectrumResult(
        theta=float(theta),
        cutoff=model.cutoff,
        energies=pairs.values,
        vectors=pairs.vectors,
        levels=tuple(levels),
        computational=computational,
    )


def spectrum_at(
    model: HamiltonianModel,
    theta: float,
    k: int = DEFAULT_EIGEN_COUNT,
    references: Optional[Mapping[QubitLabel, np.ndarray]] = None,
) -> SpectrumResult:
    """Solve and label the static spectrum at flux ``theta`` (rad)."""
    return spectrum_from_pairs(model, eigensolve(model.assemble(theta), k), theta, references)


def _check_grid(theta_grid: Iterable[float]) -> list[float]:
    grid = [float(theta) for theta in theta_grid]
    if not grid:
        raise ConfigurationError("theta grid is empty")
    for theta in grid:
        if not -1e-12 <= theta <= math.pi + 1e-12:
            raise ConfigurationError(f"theta grid point {theta / math.pi:.6f} pi lies outside [0, pi]")
    return grid


def sweep_spectrum(
    model: HamiltonianModel,
    theta_grid: Iterable[float],
    k: int = DEFAULT_EIGEN_COUNT,
    *,
    threads: Optional[int] = None,
) -> list[SpectrumResult]:
    """Static spectra along ``theta_grid`` (rad), in grid order.

    Eigensolves run concurrently. Labelling is sequential: the first point
    is matched against bare products, every later point against the
    previous point's computational eigenvectors.

    Raises
    ------
    LabelingError
        Carrying the offending ``theta`` when a label cannot be continued.
    """
    grid = _check_grid(theta_grid)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        solved = list(pool.map(lambda theta: eigensolve(model.assemble(theta), k), grid))

    results: list[SpectrumResult] = []
    for theta, pairs in zip(grid, solved):
        references = None
        if results:
            previous = results[-1]
            references = {label: previous.state(*label) for label in COMPUTATIONAL_LABELS}
        results.append(spectrum_from_pairs(model, pairs, theta, references))
    logger.debug(f"Swept {len(grid)} flux points with k={k}")
    return results


@dataclass(frozen=True, eq=False)
class IdlePoint:
    """Flux idling point ``Theta_0`` and the spectrum that defines the idle basis."""

    theta: float
    zz: float
    spectrum: SpectrumResult

    @property
    def theta_over_pi(self) -> float:
        return self.theta / math.pi


def find_idle_point(
    model: HamiltonianModel,
    bracket: Sequence[float] = IDLE_BRACKET,
    k: int = DEFAULT_EIGEN_COUNT,
    *,
    xatol: float = DEFAULT_XATOL,
) -> IdlePoint:
    """Locate the minimum of ``|zeta_ZZ|`` inside ``bracket`` (rad).

    Raises
    ------
    NoInteriorExtremumError
        If ``|zeta_ZZ|`` has no interior minimum in the bracket.
    """
    theta, _ = locate_interior_minimum(lambda t: abs(spectrum_at(model, t, k).zz), bracket, xatol=xatol)
    spectrum = spectrum_at(model, theta, k)
    logger.info(
        f"Idle point at {theta / math.pi:.6f} pi, |zeta_ZZ|/2pi = {rad_s_to_khz(abs(spectrum.zz)):.3f} kHz"
    )
    return IdlePoint(theta=theta, zz=spectrum.zz, spectrum=spectrum)


def effective_coupling(model: HamiltonianModel, theta: float, idle: SpectrumResult) -> complex:
    """``g(theta) = <01(Theta_0)| H(theta, 0) |10(Theta_0)>`` in rad/s.

    The idle eigenstates are frozen at ``Theta_0``, so ``g`` vanishes there
    up to eigensolver residuals.
    """
    bra = idle.state(0, 1)
    ket = idle.state(1, 0)
    return complex(bra.conj() @ model.apply(theta, 0.0, ket))


def delta_at_idle(model: HamiltonianModel, theta_idle: float, k: int = DEFAULT_EIGEN_COUNT) -> float:
    """``Delta(Theta_0) = omega_01 - omega_10`` in rad/s."""
    return spectrum_at(model, theta_idle, k).delta


CONVERGENCE_QUANTITIES = {
    "delta": ("delta_MHz", lambda s: rad_s_to_mhz(s.delta)),
    "zz": ("zeta_zz_kHz", lambda s: rad_s_to_khz(s.zz)),
}


def cutoff_convergence(
    params: DeviceParams,
    cutoffs: Sequence[int],
    quantity: str = "delta",
    *,
    theta: Optional[float] = None,
    k: int = DEFAULT_EIGEN_COUNT,
    truncation_levels: Optional[int] = None,
    bracket: Sequence[float] = IDLE_BRACKET,
) -> pd.DataFrame:
    """Tabulate ``quantity`` (``"delta"`` or ``"zz"``) at fixed flux for each cutoff.

    When ``theta`` is omitted the idling point of the largest cutoff is used
    for every row. ``relative_change`` compares each row with the previous one.
    """
    if quantity not in CONVERGENCE_QUANTITIES:
        raise ConfigurationError(f"unknown convergence quantity {quantity!r}")
    cutoffs = [int(n) for n in cutoffs]
    if not cutoffs or any(b <= a for a, b in zip(cutoffs, cutoffs[1:])):
        raise ConfigurationError("cutoff list must be non-empty and strictly ascending")
    column, measure = CONVERGENCE_QUANTITIES[quantity]
    derived = derive_params(params)

    if theta is None:
        largest = build_model(derived, cutoffs[-1], truncation_levels)
        theta = find_idle_point(largest, bracket, k).theta

    rows = []
    previous = None
    for cutoff in cutoffs:
        model = build_model(derived, cutoff, truncation_levels)
        value = float(measure(spectrum_at(model, theta, k)))
        change = float("nan") if previous is None else abs(value - previous) / max(abs(value), 1e-300)
        if previous is not None:
            logger.info(f"{column}: N={cutoff} gives {value:.9g} (relative change {change:.3e})")
        rows.append({"N": cutoff, "theta_over_pi": theta / math.pi, column: value, "relative_change": change})
        previous = value
    return pd.DataFrame(rows)


def sweep_table(
    results: Sequence[SpectrumResult],
    *,
    what: str = "spectrum",
    model: Optional[HamiltonianModel] = None,
    idle: Optional[SpectrumResult] = None,
) -> pd.DataFrame:
    """Tabulate a sweep for CSV output.

    ``what="spectrum"`` gives the labelled computational frequencies plus
    every solved level; ``"zz"`` and ``"g"`` give the single curve. The
    ``abs_g_MHz`` column needs both ``model`` and ``idle``.
    """
    if what not in ("spectrum", "zz", "g"):
        raise ConfigurationError(f"unknown sweep quantity {what!r}")
    with_g = model is not None and idle is not None
    if what == "g" and not with_g:
        raise ValueError("a g sweep needs the model and the idle spectrum")

    rows = []
    for result in results:
        row: dict[str, float] = {"theta_over_pi": result.theta_over_pi}
        if what == "spectrum":
            for q1, q2 in COMPUTATIONAL_LABELS:
                row[f"omega_{q1}{q2}_GHz"] = rad_s_to_ghz(result.frequency(q1, q2))
        if what in ("spectrum", "zz"):
            row["zeta_zz_kHz"] = rad_s_to_khz(result.zz)
        if with_g and what in ("spectrum", "g"):
            row["abs_g_MHz"] = rad_s_to_mhz(abs(effective_coupling(model, result.theta, idle)))
        if what == "spectrum":
            row["delta_MHz"] = rad_s_to_mhz(result.delta)
            for level in result.levels:
                row[f"level{level.index}_GHz"] = rad_s_to_ghz(level.frequency)
        rows.append(row)
    return pd.DataFrame(rows)


__all__ = [
    "COMPUTATIONAL_LABELS",
    "IdlePoint",
    "Level",
    "SpectrumResult",
    "cutoff_convergence",
    "delta_at_idle",
    "effective_coupling",
    "find_idle_point",
    "product_label",
    "spectrum_at",
    "spectrum_from_pairs",
    "sweep_spectrum",
    "sweep_table",
]
