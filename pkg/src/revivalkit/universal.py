"""Model-independent limits on how long and how often a state returns."""
import logging
import math
import typing

import attr
import numpy as np

from revivalkit import _common_types as _ct
from revivalkit import dynamics
from revivalkit import exceptions
from revivalkit import model
from revivalkit import revival
from revivalkit import spectrum
from revivalkit import statistics
from revivalkit import verdict

logger = logging.getLogger(__name__)

#: Rows of the pair kernel evaluated per block
CHUNK_ROWS = 1024

FA = typing.TypeVar("FA", bound="FidelityAverage")


@attr.s(frozen=True)
class FidelityAverage:
    """``(1/T) int_0^T F(t)**2 dt`` with the terms of its ceiling."""

    T: float = attr.ib()
    average: float = attr.ib()
    sigma: float = attr.ib()
    site_count: int = attr.ib()
    lattice_dimension: int = attr.ib(default=1)

    @property
    def spread_term(self: FA) -> float:
        """``5 pi / (2 sigma T)``, infinite for an eigenstate."""
        if self.sigma <= 0:
            return math.inf
        return 5 * math.pi / (2 * self.sigma * self.T)

    @property
    def size_term(self: FA) -> float:
        """``log(N)**(2D) / sqrt(N)``."""
        return statistics.log_factor(
            self.site_count, self.lattice_dimension
        ) / math.sqrt(self.site_count)

    @property
    def rhs_structure(self: FA) -> typing.Tuple[float, float]:
        """Both terms of the ceiling, before the constant is applied."""
        return self.spread_term, self.size_term

    def bound(self: FA, K_prime: float) -> float:
        """The ceiling for a given constant."""
        return self.spread_term + K_prime * self.size_term


def time_average_fidelity(
    dist: spectrum.EnergyDistribution, T: float, lattice_dimension: int = 1
) -> FidelityAverage:
    """Average ``F(t)**2`` over ``[0, T]`` exactly.

    Each pair of levels contributes ``w_l w_m sin(T d) / (T d)`` with
    ``d = E_l - E_m``; the imaginary parts cancel between the two orders of
    every pair.
    """
    if not T > 0:
        raise exceptions.DomainError(f"T must be positive, got {T!r}")
    energies, weights = dist.energies, dist.weights
    total = 0.0
    for start in range(0, energies.size, CHUNK_ROWS):
        block = slice(start, start + CHUNK_ROWS)
        gaps = energies[block, None] - energies[None, :]
        kernel = np.sinc(T * gaps / math.pi)
        total += float(weights[block] @ kernel @ weights)
    average = float(np.clip(total / dist.total_weight ** 2, 0.0, 1.0))
    logger.debug("time average over T=%.6g is %.12g", T, average)
    return FidelityAverage(
        T, average, dist.sigma, dist.site_count, lattice_dimension
    )


def average_fidelity_check(
    average: FidelityAverage, K_prime: float
) -> verdict.CheckResult:
    """Check the time average against its ceiling for a given constant."""
    params = {"T": average.T, "K_prime": K_prime, "N": average.site_count}
    if average.sigma <= 0:
        return verdict.CheckResult.not_applicable(
            "fidelity_average", "the state is an eigenstate", params
        )
    return verdict.CheckResult.upper(
        "fidelity_average", average.average, average.bound(K_prime), params
    )


def fit_average_constant(family: typing.Sequence[FidelityAverage]) -> float:
    """Smallest ``K' >= 0`` making every average meet its ceiling."""
    fitted = 0.0
    for average in family:
        if average.sigma <= 0:
            continue
        if average.size_term <= 0:
            raise exceptions.DomainError(
                "a single site leaves no logarithmic factor to fit"
            )
        excess = average.average - average.spread_term
        fitted = max(fitted, excess / average.size_term)
    return fitted


def _crossing(
    t0: float, f0: float, t1: float, f1: float, level: float
) -> float:
    if f1 == f0:
        return t0
    return t0 + (level - f0) * (t1 - t0) / (f1 - f0)


def revival_duration(
    series: dynamics.SurvivalSeries,
    event: revival.RevivalEvent,
    level: float,
) -> float:
    """Length of the contiguous run around ``tau`` where ``F >= level``.

    The run edges are placed by linear interpolation between grid points;
    a run touching the end of the grid stops there.
    """
    if not 0 < level <= 1:
        raise exceptions.DomainError(
            f"level must lie in (0, 1], got {level!r}"
        )
    times, F = series.times, series.F_values
    centre = series.index_of(event.tau)
    if F[centre] < level:
        return 0.0
    left = centre
    while left > 0 and F[left - 1] >= level:
        left -= 1
    right = centre
    while right < F.size - 1 and F[right + 1] >= level:
        right += 1
    start = times[left]
    if left > 0:
        start = _crossing(
            times[left - 1], F[left - 1], times[left], F[left], level
        )
    stop = times[right]
    if right < F.size - 1:
        stop = _crossing(
            times[right], F[right], times[right + 1], F[right + 1], level
        )
    return float(stop - start)


def revival_duration_check(
    event: revival.RevivalEvent,
    duration: float,
    level: float,
    sigma: float,
    site_count: int,
    K_prime: float,
    lattice_dimension: int = 1,
) -> verdict.CheckResult:
    """Check ``level**2 * duration / tau`` against the averaged ceiling.

    A run of length ``duration`` with ``F >= level`` adds at least
    ``level**2 * duration`` to the integral of ``F**2``.
    """
    params = {
        "tau": event.tau,
        "level": level,
        "duration": duration,
        "K_prime": K_prime,
    }
    if sigma <= 0:
        return verdict.CheckResult.not_applicable(
            "revival_duration", "the state is an eigenstate", params
        )
    ceiling = FidelityAverage(
        event.tau, 0.0, sigma, site_count, lattice_dimension
    ).bound(K_prime)
    return verdict.CheckResult.upper(
        "revival_duration", level ** 2 * duration / event.tau, ceiling, params
    )


def single_site_return(
    eig: spectrum.EigenDecomposition,
    state: model.ProductState,
    site: int,
    tau: float,
) -> float:
    """Return ``k(tau) = -log <psi_x| rho_x(tau) |psi_x>`` for one site."""
    if not 0 <= site < state.size:
        raise exceptions.ModelError(
            f"site {site} outside a state of {state.size} sites"
        )
    d = state.local_dim
    evolved = spectrum.evolve(eig, state, tau).amplitudes
    tensor = evolved.reshape(d ** site, d, d ** (state.size - site - 1))
    reduced = np.einsum("aib,ajb->ij", tensor, tensor.conj())
    local = state.site_vectors[site]
    overlap = float(np.vdot(local, reduced @ local).real)
    if overlap <= 0:
        raise exceptions.NumericalError(
            f"single-site return overlap {overlap!r} is not positive"
        )
    return max(-math.log(min(overlap, 1.0)), 0.0)


def return_exponent(taus: _ct.ArrayLike, ks: _ct.ArrayLike) -> float:
    """Least-squares slope of ``log k`` against ``log tau``."""
    taus = np.asarray(taus, dtype=float)
    ks = np.asarray(ks, dtype=float)
    if taus.size < 2 or np.any(ks <= 0) or np.any(taus <= 0):
        raise exceptions.DomainError(
            "an exponent fit needs two or more positive samples"
        )
    slope, _ = np.polyfit(np.log(taus), np.log(ks), 1)
    return float(slope)


@attr.s(frozen=True)
class FidelityDecay:
    """Fit of ``-log F(tau)**2 = rate * N + offset`` over system sizes."""

    sizes: typing.Tuple[int, ...] = attr.ib(converter=tuple)
    fidelities: typing.Tuple[float, ...] = attr.ib(converter=tuple)
    rate: float = attr.ib()
    offset: float = attr.ib()


def fidelity_decay(
    sizes: typing.Sequence[int], fidelities: typing.Sequence[float]
) -> FidelityDecay:
    """Fit how fast the fidelity at a fixed time falls with N."""
    sizes_arr = np.asarray(sizes, dtype=float)
    values = np.asarray(fidelities, dtype=float)
    if sizes_arr.size < 2 or sizes_arr.size != values.size:
        raise exceptions.DomainError("a decay fit needs two or more sizes")
    if np.any(values <= 0):
        raise exceptions.DomainError("fidelities must be positive to fit")
    rate, offset = np.polyfit(sizes_arr, -np.log(values ** 2), 1)
    return FidelityDecay(sizes, fidelities, float(rate), float(offset))
