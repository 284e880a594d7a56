"""Closed forms for the scar tower of the spin-1 XY model.

The nematic Neel state of ``N`` sites spreads over ``N + 1`` tower states
``|S_n>`` with energies ``h (2 n - N) + N D`` and binomial weights. Every
quantity here is computed without diagonalizing anything and serves as an
independent reference for the numerical modules.
"""
import fractions
import logging
import math
import typing
import warnings

import attr
import numpy as np
import scipy.special

from revivalkit import _common_types as _ct
from revivalkit import exceptions
from revivalkit import spectrum

logger = logging.getLogger(__name__)

#: Largest N for which binomials are evaluated in exact integer arithmetic
EXACT_LIMIT = 60
#: Relative tolerance for T to sit on a multiple of pi / h
PERIOD_TOL = 1e-9

ST = typing.TypeVar("ST", bound="ScarTower")


def _log_binomial(n: int, k: int) -> float:
    return float(
        scipy.special.gammaln(n + 1)
        - scipy.special.gammaln(k + 1)
        - scipy.special.gammaln(n - k + 1)
    )


def _binomial_ratio(
    numerators: typing.Sequence[typing.Tuple[int, int]],
    denominator: typing.Tuple[int, int],
    exact: bool,
) -> float:
    """``prod binom(a, b) / binom(c, d)``, exactly when ``exact``."""
    if exact:
        value = fractions.Fraction(1)
        for n, k in numerators:
            value *= math.comb(n, k)
        return float(value / math.comb(*denominator))
    logs = sum(_log_binomial(n, k) for n, k in numerators)
    return math.exp(logs - _log_binomial(*denominator))


def _site_count(
    instance: typing.Any, attribute: "attr.Attribute[int]", value: int
) -> None:
    if value < 1:
        raise exceptions.ModelError(f"N must be at least 1, got {value}")


@attr.s(frozen=True)
class ScarTower:
    """The tower reached from the nematic Neel state."""

    N: int = attr.ib(converter=int, validator=_site_count)
    h: float = attr.ib(default=1.0, converter=float)
    D_aniso: float = attr.ib(default=0.0, converter=float)

    @property
    def exact(self: ST) -> bool:
        """Whether binomials are evaluated as exact integers."""
        return self.N <= EXACT_LIMIT

    @property
    def levels(self: ST) -> _ct.IntArray:
        """Tower indices ``0 .. N``."""
        return typing.cast(_ct.IntArray, np.arange(self.N + 1))

    @property
    def energies(self: ST) -> _ct.RealArray:
        """``E_n = h (2 n - N) + N D`` before any shift."""
        return typing.cast(
            _ct.RealArray,
            self.h * (2 * self.levels - self.N) + self.N * self.D_aniso,
        )

    def exact_weights(self: ST) -> typing.List[fractions.Fraction]:
        """``binom(N, n) / 2**N`` as fractions; they sum to exactly one."""
        if not self.exact:
            raise exceptions.DomainError(
                f"exact weights are limited to N <= {EXACT_LIMIT}"
            )
        return [
            fractions.Fraction(math.comb(self.N, n), 2 ** self.N)
            for n in range(self.N + 1)
        ]

    @property
    def weights(self: ST) -> _ct.RealArray:
        """``binom(N, n) / 2**N`` as floats."""
        if self.exact:
            return typing.cast(
                _ct.RealArray,
                np.array([float(w) for w in self.exact_weights()]),
            )
        logs = np.array(
            [_log_binomial(self.N, n) for n in range(self.N + 1)]
        )
        return typing.cast(_ct.RealArray, np.exp(logs - self.N * math.log(2)))

    @property
    def mean(self: ST) -> float:
        """``<H> = N D``."""
        return self.N * self.D_aniso

    @property
    def sigma(self: ST) -> float:
        """``|h| sqrt(N)``."""
        return abs(self.h) * math.sqrt(self.N)

    def distribution(
        self: ST, weight_cut: float = spectrum.DEFAULT_WEIGHT_CUT
    ) -> spectrum.EnergyDistribution:
        """The energy distribution of the Neel state, ground level at zero.

        Levels lighter than ``weight_cut`` are dropped and their weight is
        reported as discarded, as for a projected state.
        """
        if self.h == 0:
            return spectrum.EnergyDistribution(
                [0.0], [1.0], self.N, 0.0, weight_cut, shift=self.mean
            )
        energies = self.energies
        weights = self.weights
        order = np.argsort(energies)
        energies, weights = energies[order], weights[order]
        ground = float(energies[0])
        keep = weights > weight_cut
        retained = math.fsum(weights[keep])
        return spectrum.EnergyDistribution(
            energies[keep] - ground,
            weights[keep],
            self.N,
            abs(self.h),
            weight_cut,
            discarded=max(1.0 - retained, 0.0),
            shift=ground,
            spectral_width=2 * abs(self.h) * self.N,
        )


def oracle_fidelity(tower: ScarTower, t: float) -> float:
    """``F(t) = |cos(h t)|**N``."""
    return abs(math.cos(tower.h * t)) ** tower.N


def oracle_single_site_return(tower: ScarTower, t: float) -> float:
    """``k(t) = -2 log|cos(h t)|`` on every site of the Neel state."""
    value = abs(math.cos(tower.h * t))
    if value == 0:
        return math.inf
    return -2 * math.log(value)


def oracle_schmidt(tower: ScarTower, n: int, N_A: int, k: int) -> float:
    """Squared Schmidt value ``k`` of ``|S_n>`` cut into N_A and N - N_A sites.

    ``binom(N_A, k) binom(N_B, n - k) / binom(N, n)``; indices outside the
    support give zero with an
    :class:`~revivalkit.exceptions.OracleRangeWarning`.
    """
    N = tower.N
    N_B = N - N_A
    if not (0 <= n <= N and 0 <= N_A <= N):
        raise exceptions.DomainError(
            f"tower level {n} and block {N_A} must lie in [0, {N}]"
        )
    if not (0 <= k <= min(n, N_A) and 0 <= n - k <= N_B):
        warnings.warn(
            f"Schmidt index {k} outside the support of level {n} "
            f"with {N_A} sites in the block",
            exceptions.OracleRangeWarning,
        )
        return 0.0
    return _binomial_ratio(
        [(N_A, k), (N_B, n - k)], (N, n), tower.exact
    )


def schmidt_values(tower: ScarTower, n: int, N_A: int) -> _ct.RealArray:
    """Every nonzero squared Schmidt value of ``|S_n>`` in descending order."""
    N_B = tower.N - N_A
    ks = range(max(0, n - N_B), min(n, N_A) + 1)
    values = np.array([oracle_schmidt(tower, n, N_A, k) for k in ks])
    return typing.cast(_ct.RealArray, np.sort(values)[::-1])


def max_schmidt(tower: ScarTower, n: int, N_A: int) -> float:
    """Largest squared Schmidt value of ``|S_n>`` for any block size."""
    return float(schmidt_values(tower, n, N_A)[0])


def oracle_lambda_max(
    tower: ScarTower, n: int, N_A: typing.Optional[int] = None
) -> float:
    """``binom(N/2, n/2)**2 / binom(N, n)`` at the half cut.

    Only defined for even N and even n.
    """
    N = tower.N
    if N % 2:
        raise exceptions.DomainError(
            f"the half-cut formula needs even N, not {N}"
        )
    if n % 2 or not 0 <= n <= N:
        raise exceptions.DomainError(
            f"the half-cut formula needs an even level in [0, {N}], not {n}"
        )
    if N_A is not None and N_A != N // 2:
        raise exceptions.DomainError(
            f"the formula holds at the half cut N_A = {N // 2}, not {N_A}"
        )
    half = N // 2
    pairs = [(half, n // 2), (half, n // 2)]
    return _binomial_ratio(pairs, (N, n), tower.exact)


def oracle_sinf_asymptotic(N: int, b: float) -> float:
    """Large-N min-entropy ``log(N) / 2 + log(pi b (1 - b) / 2) / 2``."""
    if not 0 < b < 1:
        raise exceptions.DomainError(f"b must lie in (0, 1), got {b!r}")
    if N < 1:
        raise exceptions.DomainError(f"N must be positive, got {N}")
    return 0.5 * math.log(N) + 0.5 * math.log(math.pi * b * (1 - b) / 2)


def oracle_time_average(tower: ScarTower, T: float) -> float:
    """``Gamma(N + 1/2) / (sqrt(pi) Gamma(N + 1))``.

    Defined for ``T`` a positive multiple of ``pi / |h|``.
    """
    if tower.h == 0:
        raise exceptions.DomainError("a flat tower has no period")
    periods = T * abs(tower.h) / math.pi
    nearest = round(periods)
    if nearest < 1 or abs(periods - nearest) > PERIOD_TOL * max(1.0, periods):
        raise exceptions.DomainError(
            f"T={T!r} is not a positive multiple of pi / |h|"
        )
    N = tower.N
    log_value = (
        scipy.special.gammaln(N + 0.5)
        - 0.5 * math.log(math.pi)
        - scipy.special.gammaln(N + 1)
    )
    return float(math.exp(log_value))


def oracle_mean(tower: ScarTower) -> float:
    """``N D``."""
    return tower.mean


def oracle_sigma(tower: ScarTower) -> float:
    """``|h| sqrt(N)``."""
    return tower.sigma
