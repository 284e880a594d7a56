"""Frequency content of observable expectation values."""
import logging
import math
import typing

import attr
import numpy as np
import scipy.sparse

from revivalkit import _common_types as _ct
from revivalkit import exceptions
from revivalkit import operators
from revivalkit import spectrum
from revivalkit import verdict

logger = logging.getLogger(__name__)

#: Coefficients with ``|c|**2`` at or below this are left out
SUPPORT_CUT = 1e-14
#: Clusters whose amplitude is at or below this are dropped
AMPLITUDE_FLOOR = 1e-14

OS = typing.TypeVar("OS", bound="ObservableSpectrum")


@attr.s(frozen=True, eq=False)
class ObservableSpectrum:
    """``<A(t)> = sum_w v_w exp(-i w t)`` over clustered Bohr frequencies."""

    frequencies: _ct.RealArray = attr.ib(converter=_ct.frozen_array)
    amplitudes: _ct.ComplexArray = attr.ib(converter=_ct.frozen_array)

    def __len__(self: OS) -> int:
        return int(self.frequencies.size)

    def expectation(self: OS, t: float) -> float:
        """Reconstruct ``<A(t)>`` from the spectrum."""
        return float(
            (self.amplitudes @ np.exp(-1j * self.frequencies * t)).real
        )

    def at(self: OS, omega: float, tol: float = 1e-8) -> complex:
        """Return ``v_omega``, zero when no cluster sits at ``omega``."""
        hits = np.flatnonzero(np.abs(self.frequencies - omega) <= tol)
        return complex(self.amplitudes[hits].sum())


def _as_matrix(observable: typing.Any) -> typing.Any:
    if scipy.sparse.issparse(observable):
        return observable.tocsr()
    return np.asarray(observable)


def observable_spectrum(
    coeffs: _ct.ArrayLike,
    eig: spectrum.EigenDecomposition,
    observable: typing.Any,
    freq_tol: typing.Optional[float] = None,
) -> ObservableSpectrum:
    """Cluster ``v_w = sum_{E_i - E_j = w} c_i c_j* <E_j|A|E_i>``.

    ``coeffs`` are the unmerged eigenbasis coefficients of the state; only
    eigenvectors on which the state has weight enter the sum.
    """
    matrix = _as_matrix(observable)
    if matrix.shape != (eig.dimension, eig.dimension):
        raise exceptions.DimensionError(
            f"observable of shape {matrix.shape} does not match "
            f"{eig.dimension} eigenpairs"
        )
    if not operators.is_hermitian(matrix):
        raise exceptions.DomainError("the observable is not Hermitian")
    if freq_tol is None:
        freq_tol = 1e-8 * (eig.hamiltonian.h or 1.0)

    coeffs = np.asarray(coeffs, dtype=complex)
    support = np.flatnonzero(np.abs(coeffs) ** 2 > SUPPORT_CUT)
    vectors = eig.vectors[:, support]
    c = coeffs[support]
    energies = eig.energies[support]
    elements = vectors.conj().T @ (matrix @ vectors)
    # pair (i, j) carries c_i c_j* <E_j|A|E_i> at frequency E_i - E_j
    pairs = np.outer(c, c.conj()) * elements.T
    omegas = (energies[:, None] - energies[None, :]).ravel()
    values = pairs.ravel()

    order = np.argsort(omegas, kind="stable")
    omegas, values = omegas[order], values[order]
    frequencies: typing.List[float] = []
    amplitudes: typing.List[complex] = []
    start = 0
    for index in range(1, omegas.size + 1):
        if index == omegas.size or omegas[index] - omegas[start] > freq_tol:
            total = complex(values[start:index].sum())
            if abs(total) > AMPLITUDE_FLOOR:
                frequencies.append(float(omegas[start:index].mean()))
                amplitudes.append(total)
            start = index
    logger.debug(
        "%d support states give %d frequency clusters",
        support.size,
        len(frequencies),
    )
    return ObservableSpectrum(
        np.asarray(frequencies, dtype=float),
        np.asarray(amplitudes, dtype=complex),
    )


def ladder_check(
    observable_spectrum: ObservableSpectrum,
    tau: float,
    amplitude_tol: float = 1e-10,
    frequency_tol: float = 1e-8,
) -> verdict.CheckResult:
    """Check that every visible frequency is a multiple of ``2 pi / tau``."""
    if not tau > 0:
        raise exceptions.DomainError(f"tau must be positive, got {tau!r}")
    spacing = 2 * math.pi / tau
    visible = np.abs(observable_spectrum.amplitudes) > amplitude_tol
    omegas = observable_spectrum.frequencies[visible]
    offsets = np.abs(omegas - np.rint(omegas / spacing) * spacing)
    worst = float(offsets.max(initial=0.0))
    return verdict.CheckResult.upper(
        "observable_ladder",
        worst,
        frequency_tol,
        {"tau": tau, "frequencies": int(omegas.size)},
        tolerance=0.0,
    )
