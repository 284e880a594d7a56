"""Revival detection and the bounds tying revivals to the spectrum.

A revival at time ``tau`` forces the energy distribution to crowd into
narrow windows around an equally spaced ladder of centres. This module
builds those windows, measures the weight inside them, and checks the
peak-weight, peak-count and cascade inequalities against the measured
numbers.
"""
import logging
import math
import typing

import attr
import numpy as np

from revivalkit import _common_types as _ct
from revivalkit import dynamics
from revivalkit import exceptions
from revivalkit import spectrum
from revivalkit import statistics
from revivalkit import verdict

logger = logging.getLogger(__name__)

#: Relative tolerance for a level to sit on a window centre
MEMBERSHIP_TOL = 1e-9
#: Fidelity differences below this count as one plateau
PLATEAU_TOL = 1e-12
#: Largest epsilon still treated as a perfect revival when delta is 0
PERFECT_REVIVAL_TOL = 1e-10

RE = typing.TypeVar("RE", bound="RevivalEvent")
IP = typing.TypeVar("IP", bound="IntervalPartition")
PSt = typing.TypeVar("PSt", bound="PeakStatistics")


def _positive(
    instance: typing.Any, attribute: "attr.Attribute[typing.Any]", value: float
) -> None:
    if not value > 0:
        raise exceptions.DomainError(
            f"{attribute.name} must be positive, got {value!r}"
        )


def _unit_interval(
    instance: typing.Any, attribute: "attr.Attribute[typing.Any]", value: float
) -> None:
    if not 0 <= value <= 1:
        raise exceptions.DomainError(
            f"{attribute.name} must lie in [0, 1], got {value!r}"
        )


@attr.s(frozen=True)
class RevivalEvent:
    """A return of the fidelity close to one at time ``tau``."""

    tau: float = attr.ib(converter=float, validator=_positive)
    #: ``|F(tau) - F(0)|``
    epsilon: float = attr.ib(converter=float, validator=_unit_interval)
    #: Phase of ``f(tau)`` continued from ``alpha(0) = 0``
    alpha_tau: float = attr.ib(converter=float)

    @property
    def fidelity(self: RE) -> float:
        """``F(tau)``."""
        return 1.0 - self.epsilon


def _epsilon(fidelity: float) -> float:
    return float(np.clip(abs(fidelity - 1.0), 0.0, 1.0))


def revival_at(dist: spectrum.EnergyDistribution, tau: float) -> RevivalEvent:
    """Describe the state at an arbitrary ``tau`` as a revival event.

    The phase is the principal value of ``f(tau)``; only its value modulo
    2 pi enters the window construction.
    """
    value = dynamics.amplitude_at(dist, tau)
    return RevivalEvent(tau, _epsilon(abs(value)), float(np.angle(value)))


def detect_revivals(
    series: dynamics.SurvivalSeries, threshold: float
) -> typing.List[RevivalEvent]:
    """Find local maxima of F at t > 0 with ``F >= 1 - threshold``.

    A flat run of maxima is reported once, at its first grid point, so a
    constant fidelity yields the smallest positive grid time.
    """
    if not 0 < threshold < 1:
        raise exceptions.DomainError(
            f"threshold must lie in (0, 1), got {threshold!r}"
        )
    F = series.F_values
    n = F.size
    if n < 2:
        raise exceptions.GridError("detecting revivals needs t > 0 points")
    events = []
    previous = False
    for k in range(1, n):
        rising = F[k] >= F[k - 1] - PLATEAU_TOL
        falling = k == n - 1 or F[k] >= F[k + 1] - PLATEAU_TOL
        candidate = rising and falling and F[k] >= 1 - threshold
        flat = abs(F[k] - F[k - 1]) <= PLATEAU_TOL
        if candidate and not (previous and flat):
            events.append(
                RevivalEvent(
                    series.times[k],
                    _epsilon(F[k]),
                    series.alpha_values[k],
                )
            )
        previous = candidate
    logger.debug(
        "found %d revivals above %.6g", len(events), 1 - threshold
    )
    return events


def peak_weight_bound(epsilon: float, delta: float) -> float:
    """Lower bound ``1 - eps / (1 - cos delta)`` on the in-window weight.

    At ``delta == 0`` only a perfect revival carries information: the bound
    is 1 when ``epsilon`` vanishes and ``-inf`` otherwise.
    """
    if not 0 <= delta <= math.pi:
        raise exceptions.DomainError(
            f"delta must lie in [0, pi], got {delta!r}"
        )
    if delta == 0:
        return 1.0 if epsilon <= PERFECT_REVIVAL_TOL else -math.inf
    return 1.0 - epsilon / (2 * math.sin(delta / 2) ** 2)


@attr.s(frozen=True)
class IntervalPartition:
    """Windows of half-width ``delta / tau`` around ``(2 pi l - alpha) / tau``.

    The centres are where ``cos(E tau + alpha) = 1``, with ``alpha`` the
    phase of ``f(tau)``. Everything outside the windows is gap.
    """

    tau: float = attr.ib(converter=float, validator=_positive)
    delta: float = attr.ib(converter=float)
    alpha_tau: float = attr.ib(converter=float)
    l_min: int = attr.ib(converter=int)
    l_max: int = attr.ib(converter=int)
    #: Width of the spectral range the windows must cover
    spectral_width: float = attr.ib(converter=float)

    @delta.validator
    def _check_delta(
        self: IP, attribute: "attr.Attribute[float]", value: float
    ) -> None:
        if not 0 <= value <= math.pi:
            raise exceptions.DomainError(
                f"delta must lie in [0, pi], got {value!r}"
            )

    @classmethod
    def build(
        cls: typing.Type[IP],
        event: RevivalEvent,
        delta: float,
        spectral_width: float,
        energies: typing.Optional[_ct.ArrayLike] = None,
    ) -> IP:
        """Cover ``[0, spectral_width]`` and any listed energies."""
        tau, alpha = event.tau, event.alpha_tau
        top = spectral_width
        bottom = 0.0
        if energies is not None and np.size(energies):
            top = max(top, float(np.max(energies)))
            bottom = min(bottom, float(np.min(energies)))
        l_min = math.floor((bottom * tau + alpha) / (2 * math.pi))
        l_max = math.ceil((top * tau + alpha) / (2 * math.pi))
        return cls(tau, delta, alpha, l_min, l_max, spectral_width)

    @property
    def half_width(self: IP) -> float:
        """Half-width of every window in energy units."""
        return self.delta / self.tau

    @property
    def n_max(self: IP) -> float:
        """``h N tau / (2 pi)``, the ladder length across the range."""
        return self.spectral_width * self.tau / (2 * math.pi)

    @property
    def l_range(self: IP) -> _ct.IntArray:
        """Every window index of the partition."""
        return typing.cast(
            _ct.IntArray, np.arange(self.l_min, self.l_max + 1)
        )

    def center(self: IP, l: typing.Any) -> typing.Any:
        """Centre energy of window ``l``."""
        return (2 * math.pi * np.asarray(l) - self.alpha_tau) / self.tau

    def locate(
        self: IP, energies: _ct.ArrayLike
    ) -> typing.Tuple[_ct.IntArray, typing.Any]:
        """Return the nearest window of each energy and whether it is inside.

        Membership is decided on the wrapped phase ``E tau + alpha``.
        """
        phase = np.asarray(energies, dtype=float) * self.tau + self.alpha_tau
        nearest = np.rint(phase / (2 * math.pi)).astype(np.int64)
        wrapped = phase - 2 * math.pi * nearest
        slack = MEMBERSHIP_TOL * np.maximum(1.0, np.abs(self.center(nearest)))
        return nearest, np.abs(wrapped) <= self.delta + slack

    def contains(self: IP, energy: float, l: int) -> bool:
        """Whether ``energy`` falls inside window ``l``."""
        nearest, inside = self.locate([energy])
        return bool(inside[0] and nearest[0] == l)


def peak_count_bound(
    N: int,
    h: float,
    tau: float,
    c: float,
    delta: float,
    epsilon: float,
    s: float,
    K_assumed: float,
    lattice_dimension: int = 1,
) -> float:
    """Lower bound on the number of windows holding weight above 1/(cN).

    The bound is negative, and so vacuous, whenever the bracketed deficit
    ``1 - h tau / (2 pi c) - eps / (1 - cos delta)`` is.
    """
    if not c > 1:
        raise exceptions.DomainError(f"c must exceed 1, got {c!r}")
    if not 0 < delta <= math.pi:
        raise exceptions.DomainError(
            f"delta must lie in (0, pi], got {delta!r}"
        )
    if not s > 0:
        raise exceptions.DomainError(f"s must be positive, got {s!r}")
    if K_assumed < 0:
        raise exceptions.DomainError(
            f"K must be non-negative, got {K_assumed!r}"
        )
    bracket = (
        1
        - h * tau / (2 * math.pi * c)
        - epsilon / (2 * math.sin(delta / 2) ** 2)
    )
    denominator = delta / (tau * s) + K_assumed * statistics.log_factor(
        N, lattice_dimension
    )
    if denominator <= 0:
        raise exceptions.NumericalError(
            f"peak-count denominator {denominator!r} is not positive"
        )
    return math.sqrt(N) * bracket / denominator


def perfect_revival_count_bound(
    N: int,
    h: float,
    tau: float,
    c: float,
    K: float,
    lattice_dimension: int = 1,
) -> float:
    """Count bound for exact eigenstates when ``F(tau) == F(0)``.

    Without a positive ``K * log(N)**(2D)`` the bound is infinite and
    carries no information.
    """
    if not c > 1:
        raise exceptions.DomainError(f"c must exceed 1, got {c!r}")
    if K < 0:
        raise exceptions.DomainError(f"K must be non-negative, got {K!r}")
    numerator = math.sqrt(N) * (1 - h * tau / (2 * math.pi * c))
    denominator = K * statistics.log_factor(N, lattice_dimension)
    if denominator == 0:
        return math.inf if numerator > 0 else -math.inf
    return numerator / denominator


def interval_weight_bound(
    delta: float,
    sigma: float,
    tau: float,
    N: int,
    K: float,
    lattice_dimension: int = 1,
) -> float:
    """Window ceiling ``delta / (sigma tau) + K log(N)**(2D) / sqrt(N)``."""
    if not sigma > 0:
        raise exceptions.DomainError(
            f"sigma must be positive, got {sigma!r}"
        )
    return delta / (sigma * tau) + K * statistics.log_factor(
        N, lattice_dimension
    ) / math.sqrt(N)


def suggested_parameters(
    epsilon: float, h: float, tau: float
) -> typing.Tuple[float, float]:
    """Return ``c = 2 h tau / pi`` and ``delta = 2 sqrt(eps)``.

    This choice makes ``eps / (1 - cos delta)`` close to one half for small
    ``eps``, which leaves a quarter of the weight for the count.
    """
    return 2 * h * tau / math.pi, min(2 * math.sqrt(epsilon), math.pi)


@attr.s(frozen=True, eq=False)
class PeakStatistics:
    """Weights of every window of a partition and the bounds they meet."""

    partition: IntervalPartition = attr.ib()
    #: ``p`` of every window in ``partition.l_range``
    peak_weights: _ct.RealArray = attr.ib(converter=_ct.frozen_array)
    in_peak_total: float = attr.ib()
    gap_total: float = attr.ib()
    site_count: int = attr.ib()
    term_bound: float = attr.ib()
    sigma: float = attr.ib()
    epsilon: float = attr.ib()
    c: float = attr.ib()
    K_assumed: float = attr.ib(default=0.0)
    lattice_dimension: int = attr.ib(default=1)

    def __attrs_post_init__(self: PSt) -> None:
        """Check the totals tile the unit weight."""
        if abs(self.in_peak_total + self.gap_total - 1) > 1e-10:
            raise exceptions.NumericalError(
                "in-window and gap weights do not add up to one"
            )

    @property
    def delta(self: PSt) -> float:
        """Half-width in phase units."""
        return self.partition.delta

    @property
    def s(self: PSt) -> float:
        """``sigma / sqrt(N)``."""
        return self.sigma / math.sqrt(self.site_count)

    @property
    def threshold(self: PSt) -> float:
        """Weight ``1 / (c N)`` a window must exceed to be counted."""
        return 1 / (self.c * self.site_count)

    def qualifying(self: PSt) -> _ct.IntArray:
        """Window indices whose weight exceeds ``threshold``."""
        mask = self.peak_weights > self.threshold
        return typing.cast(_ct.IntArray, self.partition.l_range[mask])

    @property
    def N_c_delta(self: PSt) -> int:
        """Number of windows holding more than ``1 / (c N)``."""
        return int(self.qualifying().size)

    def weight(self: PSt, l: int) -> float:
        """Weight of window ``l``, zero outside the partition."""
        if not self.partition.l_min <= l <= self.partition.l_max:
            return 0.0
        return float(self.peak_weights[l - self.partition.l_min])

    @property
    def perfect(self: PSt) -> bool:
        """Whether the windows have zero width around a perfect revival."""
        return self.delta == 0 and self.epsilon <= PERFECT_REVIVAL_TOL

    @property
    def bound_value(self: PSt) -> float:
        """Peak-count lower bound, or ``nan`` when it does not apply.

        Zero-width windows around a perfect revival use
        :func:`perfect_revival_count_bound`.
        """
        if self.c <= 1 or self.sigma <= 0:
            return math.nan
        if self.perfect:
            return perfect_revival_count_bound(
                self.site_count,
                self.term_bound,
                self.partition.tau,
                self.c,
                self.K_assumed,
                self.lattice_dimension,
            )
        if self.delta <= 0:
            return math.nan
        return peak_count_bound(
            self.site_count,
            self.term_bound,
            self.partition.tau,
            self.c,
            self.delta,
            self.epsilon,
            self.s,
            self.K_assumed,
            self.lattice_dimension,
        )

    def parameters(self: PSt) -> typing.Dict[str, typing.Any]:
        """Echo every input of the checks for reports."""
        return {
            "tau": self.partition.tau,
            "delta": self.delta,
            "alpha_tau": self.partition.alpha_tau,
            "epsilon": self.epsilon,
            "c": self.c,
            "s": self.s,
            "K_assumed": self.K_assumed,
            "N": self.site_count,
            "h": self.term_bound,
            "perfect": self.perfect,
        }

    def peak_weight_check(self: PSt) -> verdict.CheckResult:
        """In-window weight against ``1 - eps / (1 - cos delta)``."""
        return verdict.CheckResult.lower(
            "peak_weight",
            self.in_peak_total,
            peak_weight_bound(self.epsilon, self.delta),
            self.parameters(),
        )

    def peak_count_check(self: PSt) -> verdict.CheckResult:
        """Measured window count against the peak-count lower bound."""
        bound = self.bound_value
        if math.isnan(bound):
            return verdict.CheckResult.not_applicable(
                "peak_count",
                "needs c > 1, a spread-out energy and delta > 0 "
                "unless the revival is perfect",
                self.parameters(),
            )
        return verdict.CheckResult.lower(
            "peak_count", self.N_c_delta, bound, self.parameters()
        )

    def window_count_check(self: PSt) -> verdict.CheckResult:
        """Counted windows against the ladder length ``n_max + 1``.

        Windows overhanging either end of the range add ``delta / pi``.
        """
        ceiling = self.partition.n_max + 1 + self.delta / math.pi
        return verdict.CheckResult.upper(
            "window_count", self.N_c_delta, ceiling, self.parameters()
        )

    def rows(self: PSt) -> _ct.RealArray:
        """Stack ``(l, centre, p, counted)`` columns for the peak table."""
        ls = self.partition.l_range
        return typing.cast(
            _ct.RealArray,
            np.column_stack(
                [
                    ls,
                    self.partition.center(ls),
                    self.peak_weights,
                    (self.peak_weights > self.threshold).astype(float),
                ]
            ),
        )


def default_c(h: float, tau: float) -> float:
    """``2 h tau / pi``."""
    return 2 * h * tau / math.pi


def partition_weights(
    dist: spectrum.EnergyDistribution,
    event: RevivalEvent,
    delta: float,
    c: typing.Optional[float] = None,
    K_assumed: float = 0.0,
    lattice_dimension: int = 1,
) -> PeakStatistics:
    """Sum the weight of ``dist`` inside every window of the partition.

    The gap total is the complement of the in-window total and so includes
    any weight discarded when the distribution was built.
    """
    partition = IntervalPartition.build(
        event, delta, dist.spectral_width, dist.energies
    )
    nearest, inside = partition.locate(dist.energies)
    peak_weights = np.bincount(
        nearest[inside] - partition.l_min,
        weights=dist.weights[inside],
        minlength=partition.l_range.size,
    )
    in_peak_total = float(dist.weights[inside].sum())
    gap_total = 1.0 - in_peak_total
    if c is None:
        c = default_c(dist.term_bound, event.tau)
    stats = PeakStatistics(
        partition,
        peak_weights,
        in_peak_total,
        gap_total,
        dist.site_count,
        dist.term_bound,
        dist.sigma,
        event.epsilon,
        c,
        K_assumed,
        lattice_dimension,
    )
    logger.debug(
        "tau=%.6g delta=%.3g: in-window weight %.12g over %d windows",
        event.tau,
        delta,
        in_peak_total,
        stats.N_c_delta,
    )
    return stats


def interval_weight_check(
    stats: PeakStatistics, K: float, lattice_dimension: int = 1
) -> verdict.CheckResult:
    """Check every window weight against the Gaussian-comparison ceiling."""
    if stats.sigma <= 0:
        return verdict.CheckResult.not_applicable(
            "interval_weight", "the state is an eigenstate"
        )
    bound = interval_weight_bound(
        stats.delta,
        stats.sigma,
        stats.partition.tau,
        stats.site_count,
        K,
        lattice_dimension,
    )
    rows = [
        verdict.CheckResult.upper(
            "interval_weight", float(p), bound, {"l": int(l)}
        )
        for l, p in zip(stats.partition.l_range, stats.peak_weights)
        if p > 0
    ]
    return verdict.CheckResult.aggregate(
        "interval_weight", rows, {"K": K, **stats.parameters()}
    )


def fit_interval_weight_constant(
    family: typing.Sequence[PeakStatistics], lattice_dimension: int = 1
) -> float:
    """Smallest ``K >= 0`` for which every window meets its ceiling."""
    fitted = 0.0
    for stats in family:
        scale = statistics.log_factor(stats.site_count, lattice_dimension)
        if scale <= 0:
            raise exceptions.DomainError(
                "a single site leaves no logarithmic factor to fit"
            )
        linear = stats.delta / (stats.sigma * stats.partition.tau)
        excess = float(stats.peak_weights.max(initial=0.0)) - linear
        fitted = max(fitted, excess * math.sqrt(stats.site_count) / scale)
    return fitted


def interpolate_fidelity(series: dynamics.SurvivalSeries, t: float) -> float:
    """Quadratic interpolation of F through the three nearest grid points."""
    times, values = series.times, series.F_values
    if times.size < 3:
        return float(np.interp(t, times, values))
    centre = int(np.clip(series.index_of(t), 1, times.size - 2))
    xs = times[centre - 1 : centre + 2]
    ys = values[centre - 1 : centre + 2]
    total = 0.0
    for i in range(3):
        basis = 1.0
        for j in range(3):
            if j != i:
                basis *= (t - xs[j]) / (xs[i] - xs[j])
        total += ys[i] * basis
    return total


def cascade_check(
    series: dynamics.SurvivalSeries, event: RevivalEvent, m_max: int
) -> typing.List[verdict.CheckResult]:
    """Check ``F(m tau) >= 1 - m sqrt(2 eps)`` for ``m = 1 .. m_max``."""
    if m_max < 1:
        raise exceptions.DomainError(f"m_max must be at least 1, got {m_max}")
    reach = m_max * event.tau
    if reach > series.t_max * (1 + 1e-12):
        raise exceptions.GridError(
            f"the grid ends at {series.t_max:.6g}, before "
            f"{m_max} * tau = {reach:.6g}"
        )
    root = math.sqrt(2 * event.epsilon)
    results = []
    for m in range(1, m_max + 1):
        t = m * event.tau
        results.append(
            verdict.CheckResult.lower(
                "cascade",
                interpolate_fidelity(series, t),
                1 - m * root,
                {"m": m, "t": t, "epsilon": event.epsilon},
            )
        )
    return results
