"""Comparison of a state's energy distribution with a Gaussian."""
import logging
import math
import typing

import attr
import numpy as np
import scipy.special

from revivalkit import _common_types as _ct
from revivalkit import exceptions
from revivalkit import spectrum
from revivalkit import verdict

logger = logging.getLogger(__name__)

BEF = typing.TypeVar("BEF", bound="BerryEsseenFit")


def empirical_cdf(
    dist: spectrum.EnergyDistribution, x: _ct.ArrayLike
) -> typing.Any:
    """Return ``J(x)``, the weight on energies at or below ``x``."""
    cumulative = np.concatenate([[0.0], np.cumsum(dist.weights)])
    cumulative /= cumulative[-1]
    index = np.searchsorted(dist.energies, np.asarray(x), side="right")
    values = cumulative[index]
    return float(values) if np.ndim(values) == 0 else values


def gaussian_cdf(mean: float, sigma: float, x: _ct.ArrayLike) -> typing.Any:
    """Return the normal CDF with the given mean and deviation at ``x``."""
    if not sigma > 0:
        raise exceptions.DomainError(
            f"sigma must be positive, got {sigma!r}; eigenstates have no "
            "Gaussian comparison"
        )
    values = scipy.special.ndtr((np.asarray(x, dtype=float) - mean) / sigma)
    return float(values) if np.ndim(values) == 0 else values


def berry_esseen_sup(
    dist: spectrum.EnergyDistribution,
    mean: typing.Optional[float] = None,
    sigma: typing.Optional[float] = None,
) -> float:
    """Return ``sup_x |J(x) - G(x)|``.

    J is a step function and G is monotone, so the supremum is attained at
    a left or right limit of one of the jumps of J.
    """
    mean = dist.mean if mean is None else mean
    sigma = dist.sigma if sigma is None else sigma
    gauss = gaussian_cdf(mean, sigma, dist.energies)
    cumulative = np.cumsum(dist.weights) / dist.total_weight
    right = np.abs(cumulative - gauss)
    left = np.abs(np.concatenate([[0.0], cumulative[:-1]]) - gauss)
    return float(max(right.max(), left.max()))


def log_factor(site_count: int, lattice_dimension: int) -> float:
    """Return ``log(N) ** (2 D)``."""
    return math.log(site_count) ** (2 * lattice_dimension)


@attr.s(frozen=True)
class BerryEsseenFit:
    """One constant C with ``sup |J - G| <= C * scale(N) / sqrt(N)``.

    ``scale`` is 1, or ``log(N)**(2D) / s**3`` when fitted with logarithms.
    """

    sizes: typing.Tuple[int, ...] = attr.ib(converter=tuple)
    sups: typing.Tuple[float, ...] = attr.ib(converter=tuple)
    scales: typing.Tuple[float, ...] = attr.ib(converter=tuple)
    constant: float = attr.ib()

    def _steps(self: BEF) -> typing.List[float]:
        ordered = [s for _, s in sorted(zip(self.sizes, self.sups))]
        return [a - b for a, b in zip(ordered, ordered[1:])]

    @property
    def decreasing(self: BEF) -> bool:
        """Whether the sup shrinks strictly as N grows."""
        return all(step > 0 for step in self._steps())

    def bound(self: BEF, index: int) -> float:
        """The fitted right-hand side for the ``index``-th member."""
        return (
            self.constant * self.scales[index] / math.sqrt(self.sizes[index])
        )

    def check(self: BEF) -> verdict.CheckResult:
        """Verify every member against the fitted constant."""
        rows = [
            verdict.CheckResult.upper(
                "berry_esseen", sup, self.bound(i), {"N": n}
            )
            for i, (n, sup) in enumerate(zip(self.sizes, self.sups))
        ]
        return verdict.CheckResult.aggregate(
            "berry_esseen",
            rows,
            {"C": self.constant, "decreasing": self.decreasing},
        )

    def trend(self: BEF) -> verdict.CheckResult:
        """Report the monotonic decrease with N as its own check."""
        steps = self._steps()
        if not steps:
            return verdict.CheckResult.not_applicable(
                "berry_esseen_trend", "a trend needs two sizes"
            )
        worst = min(steps)
        return verdict.CheckResult(
            "berry_esseen_trend",
            worst,
            0.0,
            verdict.Verdict.passed if worst > 0 else verdict.Verdict.failed,
            worst,
            {"N": list(self.sizes)},
        )


def fit_berry_esseen_constant(
    distributions: typing.Sequence[spectrum.EnergyDistribution],
    lattice_dimension: typing.Optional[int] = None,
) -> BerryEsseenFit:
    """Fit the smallest C that bounds every member of a family.

    With ``lattice_dimension`` the bound carries the ``log(N)**(2D) / s**3``
    factor; otherwise it is ``C / sqrt(N)``.
    """
    if not distributions:
        raise exceptions.DomainError("cannot fit a constant to no states")
    sizes, sups, scales = [], [], []
    for dist in distributions:
        n = dist.site_count
        sups.append(berry_esseen_sup(dist))
        sizes.append(n)
        if lattice_dimension is None:
            scales.append(1.0)
        else:
            scale = log_factor(n, lattice_dimension) / dist.s ** 3
            if scale <= 0:
                raise exceptions.DomainError(
                    f"N={n} gives a vanishing logarithmic factor"
                )
            scales.append(scale)
    constant = max(
        sup * math.sqrt(n) / scale
        for n, sup, scale in zip(sizes, sups, scales)
    )
    logger.debug(
        "fitted Berry-Esseen constant %.6g over N=%s", constant, sizes
    )
    return BerryEsseenFit(sizes, sups, scales, constant)
