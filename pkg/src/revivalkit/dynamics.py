"""Survival amplitude, fidelity and phase of a state on a time grid."""
import logging
import math
import typing

import attr
import numpy as np

from revivalkit import _common_types as _ct
from revivalkit import exceptions
from revivalkit import spectrum

logger = logging.getLogger(__name__)

#: Fidelity below which the phase of f(t) is carried over, not measured
PHASE_FLOOR = 1e-12
#: Grid points evaluated per block when summing the amplitude
CHUNK_ROWS = 4096

SS = typing.TypeVar("SS", bound="SurvivalSeries")


def _check_series(instance: "SurvivalSeries") -> None:
    n = instance.times.size
    if n == 0:
        raise exceptions.GridError("the time grid is empty")
    for name in ("f_values", "F_values", "alpha_values"):
        if getattr(instance, name).shape != (n,):
            raise exceptions.DimensionError(
                f"{name} does not match a grid of {n} points"
            )
    if abs(instance.F_values[0] - 1) > 1e-10:
        raise exceptions.NormalizationError(
            f"F(0) = {instance.F_values[0]!r}, expected 1"
        )
    if instance.F_values.max() > 1 + 1e-10:
        raise exceptions.NormalizationError("F(t) exceeds one")


@attr.s(frozen=True, eq=False)
class SurvivalSeries:
    """``f(t) = exp(i alpha(t)) F(t)`` sampled on a grid that starts at 0."""

    times: _ct.RealArray = attr.ib(converter=_ct.frozen_array)
    f_values: _ct.ComplexArray = attr.ib(converter=_ct.frozen_array)
    F_values: _ct.RealArray = attr.ib(converter=_ct.frozen_array)
    alpha_values: _ct.RealArray = attr.ib(converter=_ct.frozen_array)

    def __attrs_post_init__(self: SS) -> None:
        """Check the series invariants."""
        _check_series(self)

    def __len__(self: SS) -> int:
        return int(self.times.size)

    @property
    def t_max(self: SS) -> float:
        """Last time on the grid."""
        return float(self.times[-1])

    def index_of(self: SS, t: float) -> int:
        """Return the grid index closest to ``t``."""
        return int(np.abs(self.times - t).argmin())

    def rows(self: SS) -> _ct.RealArray:
        """Stack ``(t, Re f, Im f, F, alpha)`` columns for export."""
        return typing.cast(
            _ct.RealArray,
            np.column_stack(
                [
                    self.times,
                    self.f_values.real,
                    self.f_values.imag,
                    self.F_values,
                    self.alpha_values,
                ]
            ),
        )


def _validate_grid(times: _ct.RealArray) -> None:
    if times.ndim != 1 or times.size == 0:
        raise exceptions.GridError("the time grid is empty")
    if times[0] != 0:
        raise exceptions.GridError(
            f"the time grid must start at t=0, got {times[0]!r}"
        )
    if np.any(np.diff(times) <= 0):
        raise exceptions.GridError("grid times must be strictly increasing")


def max_time_step(dist: spectrum.EnergyDistribution) -> float:
    """Largest step that keeps every component within half a turn.

    Relative to the mean energy, no component may turn by pi or more
    between consecutive grid points.
    """
    spread = float(np.abs(dist.energies - dist.mean).max())
    return math.inf if spread == 0 else math.pi / spread


def amplitudes(
    dist: spectrum.EnergyDistribution, times: _ct.ArrayLike
) -> _ct.ComplexArray:
    """Evaluate ``f(t)`` on ``times`` without any grid requirements."""
    times = np.atleast_1d(np.asarray(times, dtype=float))
    values = np.empty(times.size, dtype=complex)
    for start in range(0, times.size, CHUNK_ROWS):
        block = times[start : start + CHUNK_ROWS]
        phases = np.exp(-1j * np.outer(block, dist.energies))
        values[start : start + CHUNK_ROWS] = phases @ dist.weights
    return typing.cast(_ct.ComplexArray, values / dist.total_weight)


def amplitude_at(dist: spectrum.EnergyDistribution, t: float) -> complex:
    """Evaluate ``f(t)`` at a single time."""
    return complex(amplitudes(dist, [t])[0])


def _unwrap_phase(
    values: _ct.ComplexArray, times: _ct.RealArray, mean: float
) -> _ct.RealArray:
    # remove the mean rotation so that consecutive phases differ by < pi
    demodulated = values * np.exp(1j * mean * times)
    reliable = np.abs(values) > PHASE_FLOOR
    reliable[0] = True
    positions = np.flatnonzero(reliable)
    unwrapped = np.unwrap(np.angle(demodulated[positions]))
    unwrapped -= unwrapped[0]
    # points where F vanishes inherit the last measured phase
    last = np.searchsorted(positions, np.arange(values.size), side="right")
    filled = unwrapped[last - 1]
    skipped = values.size - positions.size
    if skipped:
        logger.debug("carried the phase over %d near-zero points", skipped)
    return typing.cast(_ct.RealArray, filled - mean * times)


def survival_amplitude(
    dist: spectrum.EnergyDistribution, times: _ct.ArrayLike
) -> SurvivalSeries:
    """Sample f(t), F(t) and the continuous phase alpha(t) on ``times``.

    Raises :class:`~revivalkit.exceptions.GridError` when the grid is too
    coarse to follow the phase.
    """
    times = np.asarray(times, dtype=float)
    _validate_grid(times)
    limit = max_time_step(dist)
    if times.size > 1:
        step = float(np.diff(times).max())
        if step >= limit:
            raise exceptions.GridError(
                f"time step {step:.6g} is too coarse to unwrap the phase; "
                f"use steps below {limit:.6g}"
            )
    values = amplitudes(dist, times)
    values[0] = 1.0
    fidelity = np.abs(values)
    alpha = _unwrap_phase(values, times, dist.mean)
    logger.debug(
        "survival series on %d points up to t=%.6g", times.size, times[-1]
    )
    return SurvivalSeries(times, values, fidelity, alpha)
