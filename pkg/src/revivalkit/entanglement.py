"""Bipartite Schmidt spectra and Renyi entropies of lattice states."""
import logging
import math
import typing

import attr
import numpy as np
import scipy.linalg

from revivalkit import _common_types as _ct
from revivalkit import exceptions
from revivalkit import lattice as _lattice
from revivalkit import model
from revivalkit import verdict

logger = logging.getLogger(__name__)

#: Default squared-Schmidt threshold for the rank entropy
DEFAULT_RANK_CUT = 1e-12

R = typing.TypeVar("R", bound="Region")
ES = typing.TypeVar("ES", bound="EntanglementSpectrum")


@attr.s(frozen=True)
class Region:
    """A proper, non-empty subset A of the lattice sites.

    ``boundary`` counts the nearest-neighbour bonds between A and its
    complement.
    """

    sites: _ct.Sites = attr.ib(converter=lambda s: tuple(sorted(set(s))))
    boundary: int = attr.ib()
    site_count: int = attr.ib()

    @sites.validator
    def _check_sites(
        self: R, attribute: "attr.Attribute[_ct.Sites]", value: _ct.Sites
    ) -> None:
        if not value:
            raise exceptions.DomainError("region is empty")

    def __attrs_post_init__(self: R) -> None:
        """Reject the full lattice and out-of-range sites."""
        if len(self.sites) >= self.site_count:
            raise exceptions.DomainError("region covers the whole lattice")
        if self.sites[0] < 0 or self.sites[-1] >= self.site_count:
            raise exceptions.DomainError(
                f"region {self.sites} lies outside {self.site_count} sites"
            )

    @classmethod
    def from_sites(
        cls: typing.Type[R],
        lattice: _lattice.Lattice,
        sites: typing.Iterable[int],
    ) -> R:
        """Build a region and count its boundary bonds."""
        sites = tuple(sorted(set(sites)))
        if not sites:
            raise exceptions.DomainError("region is empty")
        if sites[0] < 0 or sites[-1] >= lattice.size:
            raise exceptions.DomainError(
                f"region {sites} lies outside {lattice.size} sites"
            )
        return cls(sites, lattice.boundary_size(sites), lattice.size)

    @classmethod
    def block(
        cls: typing.Type[R], lattice: _lattice.Lattice, start: int, length: int
    ) -> R:
        """Sites whose first coordinate lies in ``[start, start + length)``."""
        sites = [
            site
            for site in range(lattice.size)
            if start <= lattice.coordinates(site)[0] < start + length
        ]
        return cls.from_sites(lattice, sites)

    @classmethod
    def half(cls: typing.Type[R], lattice: _lattice.Lattice) -> R:
        """The first half of the lattice along its first axis."""
        return cls.block(lattice, 0, lattice.extents[0] // 2)

    @property
    def complement(self: R) -> _ct.Sites:
        """Sites outside the region."""
        inside = set(self.sites)
        return tuple(s for s in range(self.site_count) if s not in inside)


def _check_schmidt(
    instance: "EntanglementSpectrum",
    attribute: "attr.Attribute[typing.Any]",
    value: _ct.RealArray,
) -> None:
    if np.any(value < 0):
        raise exceptions.NumericalError("negative squared Schmidt value")
    if abs(float(value.sum()) - 1) > 1e-10:
        raise exceptions.NormalizationError(
            f"Schmidt values sum to {float(value.sum())!r}"
        )


def _descending(value: _ct.ArrayLike) -> _ct.RealArray:
    array = np.sort(np.asarray(value, dtype=float))[::-1]
    return typing.cast(_ct.RealArray, _ct.frozen_array(array))


@attr.s(frozen=True, eq=False)
class EntanglementSpectrum:
    """Squared Schmidt values of a pure state across a region boundary."""

    region: Region = attr.ib()
    schmidt_sq: _ct.RealArray = attr.ib(
        converter=_descending, validator=_check_schmidt
    )
    rank_cut: float = attr.ib(default=DEFAULT_RANK_CUT)

    @property
    def lambda_max(self: ES) -> float:
        """Largest squared Schmidt value."""
        return float(self.schmidt_sq[0])

    @property
    def rank(self: ES) -> int:
        """Number of squared Schmidt values above ``rank_cut``."""
        return int((self.schmidt_sq > self.rank_cut).sum())


def schmidt_spectrum(
    state: model.StateLike,
    region: Region,
    lattice: _lattice.Lattice,
    rank_cut: float = DEFAULT_RANK_CUT,
) -> EntanglementSpectrum:
    """Split ``state`` into the region and its complement and decompose."""
    vector = model.as_state_vector(state)
    if vector.dimension != lattice.hilbert_dimension:
        raise exceptions.DimensionError(
            f"state of dimension {vector.dimension} does not live on "
            f"{lattice.size} sites of dimension {lattice.local_dim}"
        )
    if region.site_count != lattice.size:
        raise exceptions.DomainError("region was built for another lattice")
    d = lattice.local_dim
    tensor = vector.amplitudes.reshape((d,) * lattice.size)
    order = list(region.sites) + list(region.complement)
    matrix = tensor.transpose(order).reshape(
        d ** len(region.sites), d ** len(region.complement)
    )
    singular = scipy.linalg.svdvals(matrix)
    logger.debug(
        "Schmidt decomposition of %s: %d values", region.sites, singular.size
    )
    return EntanglementSpectrum(region, singular ** 2, rank_cut)


def renyi_entropy(spec: EntanglementSpectrum, alpha: float) -> float:
    """Return ``S_alpha``; pass ``math.inf`` for the min-entropy.

    ``alpha == 0`` counts values above the rank cut, ``alpha == 1`` is the
    von Neumann entropy with ``0 log 0 = 0``.
    """
    if alpha < 0:
        raise exceptions.DomainError(
            f"alpha must be non-negative, got {alpha!r}"
        )
    values = spec.schmidt_sq[spec.schmidt_sq > 0]
    if math.isinf(alpha):
        return -math.log(spec.lambda_max)
    if alpha == 0:
        return math.log(max(spec.rank, 1))
    if alpha == 1:
        return float(-(values * np.log(values)).sum())
    return float(math.log((values ** alpha).sum()) / (1 - alpha))


def monotonicity_check(
    spec: EntanglementSpectrum, alphas: typing.Sequence[float]
) -> verdict.CheckResult:
    """Check ``S_a >= S_b`` for every ``a <= b`` in ``alphas``."""
    ordered = sorted(alphas)
    values = [renyi_entropy(spec, a) for a in ordered]
    rows = [
        verdict.CheckResult.lower(
            "renyi_monotonicity",
            values[i],
            values[i + 1],
            {"alpha": ordered[i], "beta": ordered[i + 1]},
            tolerance=1e-9,
        )
        for i in range(len(values) - 1)
    ]
    return verdict.CheckResult.aggregate("renyi_monotonicity", rows)


def min_entropy_check(
    spec: EntanglementSpectrum, alpha: float
) -> verdict.CheckResult:
    """Check ``S_inf >= (alpha - 1) / alpha * S_alpha`` for ``alpha > 1``."""
    if not alpha > 1:
        raise exceptions.DomainError(f"alpha must exceed 1, got {alpha!r}")
    factor = 1.0 if math.isinf(alpha) else (alpha - 1) / alpha
    return verdict.CheckResult.lower(
        "min_entropy",
        renyi_entropy(spec, math.inf),
        factor * renyi_entropy(spec, alpha),
        {"alpha": alpha},
        tolerance=1e-9,
    )


@attr.s(frozen=True, eq=False)
class RenyiReport:
    """Entropies of one spectrum with the checks run against them."""

    spectrum: EntanglementSpectrum = attr.ib()
    alphas: typing.Tuple[float, ...] = attr.ib(converter=tuple)
    values: typing.Tuple[float, ...] = attr.ib(converter=tuple)
    checks: typing.Tuple[verdict.CheckResult, ...] = attr.ib(
        default=(), converter=tuple
    )

    @property
    def s_inf(self: "RenyiReport") -> float:
        """``-log lambda_max``."""
        return renyi_entropy(self.spectrum, math.inf)

    @property
    def s_0(self: "RenyiReport") -> float:
        """Log of the rank above the cut."""
        return renyi_entropy(self.spectrum, 0)

    def value(self: "RenyiReport", alpha: float) -> float:
        """Look up ``S_alpha`` among the reported orders."""
        return self.values[self.alphas.index(alpha)]

    def to_dict(self: "RenyiReport") -> typing.Dict[str, typing.Any]:
        """Render rows for the entropy report."""
        return {
            "region": list(self.spectrum.region.sites),
            "boundary": self.spectrum.region.boundary,
            "rank_cut": self.spectrum.rank_cut,
            "entropies": [
                {"alpha": "inf" if math.isinf(a) else a, "S": s}
                for a, s in zip(self.alphas, self.values)
            ],
            "checks": [c.to_dict() for c in self.checks],
        }


def renyi_report(
    spec: EntanglementSpectrum,
    alphas: typing.Sequence[float],
    checks: typing.Iterable[verdict.CheckResult] = (),
) -> RenyiReport:
    """Evaluate every order in ``alphas`` and attach the given checks."""
    values = [renyi_entropy(spec, a) for a in alphas]
    return RenyiReport(spec, alphas, values, tuple(checks))
