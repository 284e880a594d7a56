"""Dense diagonalization and energy distributions of initial states."""
import logging
import math
import typing

import attr
import numpy as np
import scipy.linalg

from revivalkit import _common_types as _ct
from revivalkit import exceptions
from revivalkit import model

logger = logging.getLogger(__name__)

#: Default threshold below which a merged weight is dropped
DEFAULT_WEIGHT_CUT = 1e-14
#: Retained weight below ``1 - RETAINED_WEIGHT_TOL`` signals a bad cut
RETAINED_WEIGHT_TOL = 1e-6
#: Tolerance on the total of retained plus discarded weight
NORMALIZATION_TOL = 1e-10
RESIDUAL_TOL = 1e-8
UNITARITY_TOL = 1e-10

ED = typing.TypeVar("ED", bound="EigenDecomposition")
EDist = typing.TypeVar("EDist", bound="EnergyDistribution")


def default_degeneracy_tol(hamiltonian: model.Hamiltonian) -> float:
    """Return ``1e-9 * h * N``, or a floor for a vanishing Hamiltonian."""
    width = hamiltonian.h * hamiltonian.site_count
    return 1e-9 * width if width > 0 else 1e-12


@attr.s(frozen=True, eq=False)
class EigenDecomposition:
    """Eigenpairs of a Hamiltonian with the ground energy shifted to zero.

    ``vectors[:, j]`` belongs to ``energies[j]``. The Hamiltonian carries the
    subtracted ground energy as its ``energy_shift``.
    """

    hamiltonian: model.Hamiltonian = attr.ib(repr=False)
    energies: _ct.RealArray = attr.ib(converter=_ct.frozen_array)
    vectors: _ct.ComplexArray = attr.ib(
        converter=_ct.frozen_array, repr=False
    )
    degeneracy_tol: float = attr.ib(converter=float)
    labels: _ct.IntArray = attr.ib(init=False, repr=False)

    @labels.default
    def _cluster_labels(self: ED) -> _ct.IntArray:
        labels = np.zeros(self.energies.size, dtype=np.int64)
        anchor = 0
        for index in range(1, self.energies.size):
            if self.energies[index] - self.energies[anchor] > (
                self.degeneracy_tol
            ):
                anchor = index
                labels[index] = labels[index - 1] + 1
            else:
                labels[index] = labels[index - 1]
        return typing.cast(_ct.IntArray, _ct.frozen_array(labels))

    @property
    def shift(self: ED) -> float:
        """The ground energy subtracted from every eigenvalue."""
        return self.hamiltonian.energy_shift

    @property
    def dimension(self: ED) -> int:
        """Number of eigenpairs."""
        return int(self.energies.size)

    @property
    def cluster_count(self: ED) -> int:
        """Number of distinct energies after merging degeneracies."""
        return int(self.labels[-1]) + 1 if self.dimension else 0

    def clusters(self: ED) -> typing.List[_ct.IntArray]:
        """Group eigenvector indices by degenerate cluster."""
        boundaries = np.flatnonzero(np.diff(self.labels)) + 1
        return list(np.split(np.arange(self.dimension), boundaries))


def diagonalize(
    hamiltonian: model.Hamiltonian,
    cap: int = model.DEFAULT_DIMENSION_CAP,
    degeneracy_tol: typing.Optional[float] = None,
) -> EigenDecomposition:
    """Diagonalize ``hamiltonian`` densely and shift its ground energy to 0."""
    dense = hamiltonian.dense(cap)
    logger.debug("diagonalizing a dense %dx%d matrix", *dense.shape)
    try:
        energies, vectors = scipy.linalg.eigh(dense)
    except (scipy.linalg.LinAlgError, ValueError) as exc:
        raise exceptions.DiagonalizationError(str(exc)) from exc

    scale = float(np.abs(energies).max(initial=0.0))
    residual = float(np.linalg.norm(dense @ vectors - vectors * energies))
    if residual > RESIDUAL_TOL * max(scale, np.finfo(float).tiny):
        raise exceptions.DiagonalizationError(
            f"eigen-residual {residual:.3e} exceeds "
            f"{RESIDUAL_TOL:g} * |H| = {RESIDUAL_TOL * scale:.3e}"
        )
    gram = vectors.conj().T @ vectors
    np.fill_diagonal(gram, np.diagonal(gram) - 1)
    if gram.size and np.abs(gram).max() > UNITARITY_TOL:
        raise exceptions.DiagonalizationError(
            "eigenvectors are not orthonormal within "
            f"{UNITARITY_TOL:g}"
        )

    ground = float(energies[0]) if energies.size else 0.0
    shifted = energies - ground
    if shifted.size:
        shifted[0] = 0.0
    bound = hamiltonian.spectral_bound
    if shifted.size and shifted[-1] > bound * (1 + 1e-9) + 1e-12:
        raise exceptions.ModelError(
            f"spectral width {shifted[-1]:.6g} exceeds the term bound "
            f"{bound:.6g}"
        )
    tol = (
        default_degeneracy_tol(hamiltonian)
        if degeneracy_tol is None
        else degeneracy_tol
    )
    decomposition = EigenDecomposition(
        hamiltonian.with_shift(ground), shifted, vectors, tol
    )
    logger.debug(
        "spectrum width %.6g, %d clusters at tolerance %.3g",
        shifted[-1] if shifted.size else 0.0,
        decomposition.cluster_count,
        tol,
    )
    return decomposition


def coefficients(
    eig: EigenDecomposition, state: model.StateLike
) -> _ct.ComplexArray:
    """Return ``c_j = <E_j|psi>`` for every eigenvector."""
    vector = model.as_state_vector(state)
    if vector.dimension != eig.dimension:
        raise exceptions.DimensionError(
            f"state of dimension {vector.dimension} does not match "
            f"{eig.dimension} eigenpairs"
        )
    return typing.cast(
        _ct.ComplexArray, eig.vectors.conj().T @ vector.amplitudes
    )


def merged_energies(
    eig: EigenDecomposition, coeffs: _ct.ComplexArray
) -> _ct.RealArray:
    """Give each eigen-index the weight-averaged energy of its cluster."""
    weights = np.abs(coeffs) ** 2
    cluster_weight = np.bincount(eig.labels, weights=weights)
    cluster_moment = np.bincount(eig.labels, weights=weights * eig.energies)
    cluster_size = np.bincount(eig.labels)
    cluster_plain = np.bincount(eig.labels, weights=eig.energies)
    with np.errstate(invalid="ignore", divide="ignore"):
        averaged = np.where(
            cluster_weight > 0,
            cluster_moment / np.where(cluster_weight > 0, cluster_weight, 1),
            cluster_plain / cluster_size,
        )
    return typing.cast(_ct.RealArray, averaged[eig.labels])


def _check_distribution(instance: "EnergyDistribution") -> None:
    energies, weights = instance.energies, instance.weights
    if energies.ndim != 1 or energies.shape != weights.shape:
        raise exceptions.DimensionError(
            "energies and weights must be equal-length vectors"
        )
    if energies.size == 0:
        raise exceptions.NormalizationError("energy distribution is empty")
    if np.any(np.diff(energies) <= 0):
        raise exceptions.DomainError("energies must be strictly increasing")
    if np.any(weights <= instance.weight_cut) or np.any(
        weights > 1 + NORMALIZATION_TOL
    ):
        raise exceptions.NormalizationError(
            f"weights must lie in ({instance.weight_cut:g}, 1]"
        )
    total = float(weights.sum()) + instance.discarded
    if abs(total - 1) > NORMALIZATION_TOL:
        raise exceptions.NormalizationError(
            f"weights sum to {total!r} including {instance.discarded!r} "
            "discarded, expected 1"
        )


@attr.s(frozen=True, eq=False)
class EnergyDistribution:
    """Distinct energies of a state with the weight it carries on each.

    ``site_count`` and ``term_bound`` are the N and h of the Hamiltonian the
    distribution came from; the bounds of the analysis modules need them.
    """

    energies: _ct.RealArray = attr.ib(
        converter=lambda v: _ct.frozen_array(v, float)
    )
    weights: _ct.RealArray = attr.ib(
        converter=lambda v: _ct.frozen_array(v, float)
    )
    site_count: int = attr.ib(converter=int)
    term_bound: float = attr.ib(converter=float)
    weight_cut: float = attr.ib(default=DEFAULT_WEIGHT_CUT, converter=float)
    discarded: float = attr.ib(default=0.0, converter=float)
    shift: float = attr.ib(default=0.0, converter=float)
    #: Width of the spectral range, ``h * N`` unless stated otherwise
    spectral_width: float = attr.ib(default=None)

    def __attrs_post_init__(self: EDist) -> None:
        """Validate the distribution and fill in the spectral width."""
        _check_distribution(self)
        if self.spectral_width is None:
            object.__setattr__(
                self, "spectral_width", self.term_bound * self.site_count
            )

    @classmethod
    def from_weights(
        cls: typing.Type[EDist],
        energies: _ct.ArrayLike,
        weights: _ct.ArrayLike,
        site_count: int = 1,
        term_bound: typing.Optional[float] = None,
        **kwargs: typing.Any,
    ) -> EDist:
        """Build a distribution from raw pairs, sorting by energy.

        ``term_bound`` defaults to the largest energy over ``site_count``.
        """
        energies = np.asarray(energies, dtype=float)
        weights = np.asarray(weights, dtype=float)
        order = np.argsort(energies, kind="stable")
        energies, weights = energies[order], weights[order]
        if term_bound is None:
            term_bound = max(float(energies.max(initial=0.0)), 0.0) / max(
                site_count, 1
            )
        return cls(energies, weights, site_count, term_bound, **kwargs)

    @property
    def size(self: EDist) -> int:
        """Number of distinct energies."""
        return int(self.energies.size)

    @property
    def total_weight(self: EDist) -> float:
        """Sum of the retained weights."""
        return float(self.weights.sum())

    @property
    def mean(self: EDist) -> float:
        """Mean energy of the distribution."""
        return float(self.weights @ self.energies / self.total_weight)

    @property
    def sigma(self: EDist) -> float:
        """Standard deviation of the energy."""
        centred = self.energies - self.mean
        variance = float(self.weights @ centred ** 2 / self.total_weight)
        return math.sqrt(max(variance, 0.0))

    @property
    def s(self: EDist) -> float:
        """Energy spread per square root of a site, ``sigma / sqrt(N)``."""
        return self.sigma / math.sqrt(self.site_count)

    def amplitude(self: EDist, t: float) -> complex:
        """Return ``sum_j w_j exp(-i E_j t)`` normalized by the weight."""
        phases = np.exp(-1j * self.energies * t)
        return complex(self.weights @ phases / self.total_weight)


def project_state(
    eig: EigenDecomposition,
    state: model.StateLike,
    weight_cut: float = DEFAULT_WEIGHT_CUT,
) -> EnergyDistribution:
    """Expand ``state`` in the eigenbasis and merge degenerate clusters."""
    coeffs = coefficients(eig, state)
    weights = np.abs(coeffs) ** 2
    cluster_weight = np.bincount(eig.labels, weights=weights)
    cluster_energy = np.bincount(
        eig.labels, weights=merged_energies(eig, coeffs)
    ) / np.bincount(eig.labels)
    keep = cluster_weight > weight_cut
    retained = float(cluster_weight[keep].sum())
    if retained < 1 - RETAINED_WEIGHT_TOL:
        raise exceptions.NormalizationError(
            f"only {retained!r} of the weight survives the cut {weight_cut:g}"
        )
    weights_kept = cluster_weight[keep]
    discarded = 1.0 - retained
    if discarded < 0:
        # rounding pushed the total above one
        weights_kept = weights_kept / retained
        discarded = 0.0
    logger.debug(
        "kept %d of %d clusters, discarded weight %.3g",
        int(keep.sum()),
        cluster_weight.size,
        discarded,
    )
    return EnergyDistribution(
        cluster_energy[keep],
        weights_kept,
        site_count=eig.hamiltonian.site_count,
        term_bound=eig.hamiltonian.h,
        weight_cut=weight_cut,
        discarded=discarded,
        shift=eig.shift,
        spectral_width=eig.hamiltonian.spectral_bound,
    )


def evolve(
    eig: EigenDecomposition, state: model.StateLike, t: float
) -> model.StateVector:
    """Propagate ``state`` by ``exp(-i H t)`` in the eigenbasis."""
    coeffs = coefficients(eig, state)
    evolved = eig.vectors @ (np.exp(-1j * eig.energies * t) * coeffs)
    return model.StateVector(evolved)
