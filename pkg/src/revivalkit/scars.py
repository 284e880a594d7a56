"""Approximate scar eigenstates, their entanglement and the ladder filter."""
import logging
import math
import typing

import attr
import numpy as np

from revivalkit import _common_types as _ct
from revivalkit import entanglement
from revivalkit import exceptions
from revivalkit import lattice as _lattice
from revivalkit import model
from revivalkit import revival
from revivalkit import spectrum
from revivalkit import verdict

logger = logging.getLogger(__name__)

#: Smallest window weight from which a state can be normalized
EMPTY_WEIGHT = 1e-300
#: Tolerance of the filter reconstruction and projection checks
FILTER_TOL = 1e-6

AE = typing.TypeVar("AE", bound="ApproxEigenstate")


@attr.s(frozen=True, eq=False)
class ApproxEigenstate:
    """The normalized part of the state inside window ``l``."""

    l: int = attr.ib()
    energy: float = attr.ib()
    vector: model.StateVector = attr.ib(repr=False)
    #: Weight of the window, which is also the overlap squared with the state
    weight: float = attr.ib()
    #: ``|| (H - energy) |E_l> ||``
    residual: float = attr.ib()
    partition: revival.IntervalPartition = attr.ib(repr=False)

    def residual_check(self: AE) -> verdict.CheckResult:
        """Check ``residual <= delta / tau``."""
        return verdict.CheckResult.upper(
            "residual",
            self.residual,
            self.partition.half_width,
            {"l": self.l, "energy": self.energy},
        )


def _window_mask(
    eig: spectrum.EigenDecomposition,
    coeffs: _ct.ComplexArray,
    partition: revival.IntervalPartition,
    l: int,
) -> typing.Any:
    nearest, inside = partition.locate(spectrum.merged_energies(eig, coeffs))
    return inside & (nearest == l)


def build_approx_eigenstate(
    eig: spectrum.EigenDecomposition,
    coeffs: _ct.ArrayLike,
    partition: revival.IntervalPartition,
    l: int,
) -> ApproxEigenstate:
    """Project the state onto window ``l`` and normalize.

    The residual is measured with the sparse Hamiltonian rather than from
    the eigenvalues.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    mask = _window_mask(eig, coeffs, partition, l)
    weight = float((np.abs(coeffs[mask]) ** 2).sum())
    if weight <= EMPTY_WEIGHT:
        raise exceptions.DomainError(f"window {l} carries no weight")
    amplitudes = eig.vectors[:, mask] @ coeffs[mask] / math.sqrt(weight)
    vector = model.StateVector(amplitudes)
    energy = float(partition.center(l))
    applied = eig.hamiltonian.shifted_matrix @ vector.amplitudes
    residual = float(np.linalg.norm(applied - energy * vector.amplitudes))
    logger.debug(
        "window %d: weight %.6g, residual %.3g", l, weight, residual
    )
    return ApproxEigenstate(l, energy, vector, weight, residual, partition)


def select_family(
    eig: spectrum.EigenDecomposition,
    coeffs: _ct.ArrayLike,
    stats: revival.PeakStatistics,
) -> typing.List[ApproxEigenstate]:
    """Build the states of every window holding more than ``1 / (c N)``."""
    return [
        build_approx_eigenstate(eig, coeffs, stats.partition, int(l))
        for l in stats.qualifying()
    ]


def dephasing_check(
    eig: spectrum.EigenDecomposition,
    approx: ApproxEigenstate,
    tau: float,
    delta: float,
    times: typing.Iterable[float],
) -> verdict.CheckResult:
    """Check ``|U_t|E> - exp(-i E t)|E>| <= sqrt(2 (1 - cos(delta t / tau)))``.

    The inequality is guaranteed for ``0 <= t <= tau``.
    """
    rows = []
    start = approx.vector.amplitudes
    for t in times:
        evolved = spectrum.evolve(eig, approx.vector, t).amplitudes
        drift = float(
            np.linalg.norm(evolved - np.exp(-1j * approx.energy * t) * start)
        )
        ceiling = math.sqrt(max(2 * (1 - math.cos(delta * t / tau)), 0.0))
        rows.append(
            verdict.CheckResult.upper(
                "dephasing", drift, ceiling, {"l": approx.l, "t": t}
            )
        )
    return verdict.CheckResult.aggregate("dephasing", rows)


def renyi_ceiling(
    alpha: float, c: float, N: int, chi: float, boundary: int
) -> float:
    """``alpha / (alpha - 1) * (log(c N) + |dA| log chi)``."""
    if not alpha > 1:
        raise exceptions.DomainError(f"alpha must exceed 1, got {alpha!r}")
    if not c > 1:
        raise exceptions.DomainError(f"c must exceed 1, got {c!r}")
    factor = 1.0 if math.isinf(alpha) else alpha / (alpha - 1)
    return factor * (math.log(c * N) + boundary * math.log(chi))


def renyi_ceiling_check(
    spectra: typing.Union[
        entanglement.EntanglementSpectrum,
        typing.Sequence[entanglement.EntanglementSpectrum],
    ],
    c: float,
    N: int,
    chi: float,
    boundary: typing.Optional[int],
    alpha: float,
    exact: bool = False,
) -> verdict.CheckResult:
    """Check the entropy ceiling for every state of a selected family.

    With ``exact`` the family consists of exact eigenstates built at
    ``delta == 0`` and the entry is reported as ``exact_scar_entropy``.
    """
    name = "exact_scar_entropy" if exact else "renyi_ceiling"
    if isinstance(spectra, entanglement.EntanglementSpectrum):
        spectra = [spectra]
    rows = []
    for spec in spectra:
        edges = spec.region.boundary if boundary is None else boundary
        rows.append(
            verdict.CheckResult.upper(
                name,
                entanglement.renyi_entropy(spec, alpha),
                renyi_ceiling(alpha, c, N, chi, edges),
                {
                    "alpha": "inf" if math.isinf(alpha) else alpha,
                    "region": list(spec.region.sites),
                    "boundary": edges,
                },
            )
        )
    return verdict.CheckResult.aggregate(
        name, rows, {"c": c, "N": N, "chi": chi}
    )


def fidelity_rank_check(
    initial: model.StateLike,
    approx: typing.Union[ApproxEigenstate, model.StateVector],
    region: entanglement.Region,
    lattice: _lattice.Lattice,
    chi: float,
    boundary: typing.Optional[int] = None,
) -> verdict.CheckResult:
    """Check ``|<Psi|E>|**2 <= chi**|dA| * lambda_max`` of the state E."""
    vector = approx.vector if isinstance(approx, ApproxEigenstate) else approx
    initial_vector = model.as_state_vector(initial)
    overlap = initial_vector.fidelity(vector)
    spec = entanglement.schmidt_spectrum(vector, region, lattice)
    edges = region.boundary if boundary is None else boundary
    return verdict.CheckResult.upper(
        "fidelity_rank",
        overlap,
        chi ** edges * spec.lambda_max,
        {"region": list(region.sites), "boundary": edges, "chi": chi},
    )


def _filter_polynomial(
    energies: _ct.RealArray, ladder: _ct.RealArray, i: int
) -> _ct.RealArray:
    if not 0 <= i < ladder.size:
        raise exceptions.DomainError(
            f"ladder index {i} outside {ladder.size} levels"
        )
    values = np.ones_like(energies)
    target = ladder[i]
    for j, other in enumerate(ladder):
        if j == i:
            continue
        gap = other - target
        if gap == 0:
            raise exceptions.DomainError(
                f"ladder energies {i} and {j} coincide"
            )
        values *= 1 - (energies - target) ** 2 / gap ** 2
    return typing.cast(_ct.RealArray, values)


def apply_filter(
    eig: spectrum.EigenDecomposition,
    state: model.StateLike,
    ladder: _ct.ArrayLike,
    i: int,
) -> _ct.ComplexArray:
    """Return ``K_i(H)|Psi>`` for the occupied ``ladder`` energies.

    ``K_i(E) = prod_{j != i} (1 - (E - E_i)**2 / (E_j - E_i)**2)`` is
    evaluated on every eigenvalue; the result is not normalized.
    """
    ladder = np.asarray(ladder, dtype=float)
    if np.unique(ladder).size != ladder.size:
        raise exceptions.DomainError("ladder energies must be distinct")
    coeffs = spectrum.coefficients(eig, state)
    weights = _filter_polynomial(eig.energies, ladder, i)
    return typing.cast(_ct.ComplexArray, eig.vectors @ (weights * coeffs))


def _phase_distance(a: _ct.ComplexArray, b: _ct.ComplexArray) -> float:
    overlap = abs(np.vdot(a, b))
    return math.sqrt(max(2 * (1 - overlap), 0.0))


def filter_projection_check(
    eig: spectrum.EigenDecomposition,
    state: model.StateLike,
    ladder: _ct.ArrayLike,
    i: int,
    target: model.StateVector,
) -> verdict.CheckResult:
    """Compare the normalized filtered state with ``target`` up to phase."""
    filtered = model.StateVector.from_unnormalized(
        apply_filter(eig, state, ladder, i)
    )
    return verdict.CheckResult.upper(
        "filter_projection",
        _phase_distance(filtered.amplitudes, target.amplitudes),
        FILTER_TOL,
        {"i": i},
        tolerance=0.0,
    )


def filter_completeness(
    eig: spectrum.EigenDecomposition,
    state: model.StateLike,
    ladder: _ct.ArrayLike,
) -> verdict.CheckResult:
    """Check that the filters of all ladder levels add up to the state."""
    ladder = np.asarray(ladder, dtype=float)
    vector = model.as_state_vector(state)
    total = sum(
        apply_filter(eig, vector, ladder, i) for i in range(ladder.size)
    )
    error = float(np.linalg.norm(total - vector.amplitudes))
    return verdict.CheckResult.upper(
        "filter_completeness",
        error,
        FILTER_TOL,
        {"levels": int(ladder.size)},
        tolerance=0.0,
    )


def rank_ceiling(
    h: float,
    N: int,
    tau: float,
    d: int,
    b: int,
    chi: float,
    boundary: int,
) -> float:
    """``7 sqrt(h N tau |dA|) log(h N**2 tau d**b) + |dA| log chi``."""
    return 7 * math.sqrt(h * N * tau * boundary) * math.log(
        h * N ** 2 * tau * d ** b
    ) + boundary * math.log(chi)


def rank_ceiling_check(
    filtered: model.StateLike,
    region: entanglement.Region,
    lattice: _lattice.Lattice,
    h: float,
    N: int,
    tau: float,
    d: int,
    b: int,
    chi: float,
    rank_cut: float = entanglement.DEFAULT_RANK_CUT,
) -> verdict.CheckResult:
    """Check the rank entropy of a filtered state against its ceiling."""
    vector = model.as_state_vector(filtered)
    spec = entanglement.schmidt_spectrum(vector, region, lattice, rank_cut)
    return verdict.CheckResult.upper(
        "rank_ceiling",
        entanglement.renyi_entropy(spec, 0),
        rank_ceiling(h, N, tau, d, b, chi, region.boundary),
        {
            "region": list(region.sites),
            "boundary": region.boundary,
            "rank_cut": rank_cut,
        },
    )
