"""Hamiltonians built from local terms, and the states they act on."""
import functools
import logging
import math
import typing

import attr
import numpy as np
import scipy.sparse

from revivalkit import _common_types as _ct
from revivalkit import exceptions
from revivalkit import lattice as _lattice
from revivalkit import operators

logger = logging.getLogger(__name__)

#: Dense dimension above which ``Hamiltonian.dense`` refuses to allocate
DEFAULT_DIMENSION_CAP = 20000
#: Tolerance on the norm of a ``StateVector``
STATE_NORM_TOL = 1e-10
#: Tolerance on the norm of each factor of a ``ProductState``
SITE_NORM_TOL = 1e-12

H = typing.TypeVar("H", bound="Hamiltonian")
SV = typing.TypeVar("SV", bound="StateVector")
PS = typing.TypeVar("PS", bound="ProductState")


@attr.s(frozen=True, eq=False)
class Hamiltonian:
    """A sum of bounded local terms on a lattice.

    ``h`` bounds both the operator norm and the eigenvalue spread of every
    term, ``b`` is the largest support. ``energy_shift`` is subtracted from
    the assembled matrix wherever shifted energies are needed; diagonalizing
    sets it to the ground energy.
    """

    lattice: _lattice.Lattice = attr.ib()
    terms: typing.Tuple[operators.LocalTerm, ...] = attr.ib(converter=tuple)
    h: float = attr.ib(converter=float)
    b: int = attr.ib(converter=int)
    energy_shift: float = attr.ib(default=0.0, converter=float)
    matrix: "scipy.sparse.csr_matrix" = attr.ib(init=False, repr=False)

    @matrix.default
    def _assemble(self: H) -> "scipy.sparse.csr_matrix":
        dimension = self.lattice.hilbert_dimension
        total = scipy.sparse.csr_matrix(
            (dimension, dimension), dtype=complex
        )
        for term in self.terms:
            total = total + operators.embed(term, self.lattice)
        total.sum_duplicates()
        if not operators.is_hermitian(total):
            raise exceptions.ModelError(
                "assembled Hamiltonian is not Hermitian"
            )
        logger.debug(
            "assembled %d terms into a %dx%d matrix with %d non-zeros",
            len(self.terms),
            dimension,
            dimension,
            total.nnz,
        )
        return total

    @property
    def dimension(self: H) -> int:
        """Dimension of the many-body space."""
        return self.lattice.hilbert_dimension

    @property
    def site_count(self: H) -> int:
        """Number of lattice sites N."""
        return self.lattice.size

    @property
    def spectral_bound(self: H) -> float:
        """Upper bound on the width of the spectrum.

        Equals ``h * N`` whenever there are at most N terms, which is the
        case for every shipped builder.
        """
        return self.h * max(self.site_count, len(self.terms))

    @property
    def shifted_matrix(self: H) -> "scipy.sparse.csr_matrix":
        """The matrix with ``energy_shift`` subtracted from the diagonal."""
        identity = scipy.sparse.identity(self.dimension, format="csr")
        return (self.matrix - self.energy_shift * identity).tocsr()

    def dense(self: H, cap: int = DEFAULT_DIMENSION_CAP) -> typing.Any:
        """Return the unshifted matrix as a dense array.

        The array is real when every entry has a vanishing imaginary part.
        """
        if self.dimension > cap:
            raise exceptions.DimensionError(
                f"dense dimension {self.dimension} exceeds the cap {cap}"
            )
        array = self.matrix.toarray()
        if not np.any(array.imag):
            return array.real
        return array

    def apply(self: H, vector: _ct.ArrayLike) -> _ct.ComplexArray:
        """Apply the unshifted Hamiltonian to a dense vector."""
        vector = np.asarray(vector)
        if vector.shape[0] != self.dimension:
            raise exceptions.DimensionError(
                f"vector of length {vector.shape[0]} does not match "
                f"dimension {self.dimension}"
            )
        return typing.cast(_ct.ComplexArray, self.matrix @ vector)

    def with_shift(self: H, shift: float) -> H:
        """Return the same Hamiltonian carrying a new energy shift."""
        return attr.evolve(self, energy_shift=shift)


def build_from_terms(
    lattice: _lattice.Lattice,
    terms: typing.Iterable[operators.LocalTerm],
) -> Hamiltonian:
    """Assemble a Hamiltonian from explicit local terms.

    Each support must lie inside the lattice, match its local dimension, and
    be connected through nearest-neighbour bonds.
    """
    terms = tuple(terms)
    for term in terms:
        if term.local_dim != lattice.local_dim:
            raise exceptions.DimensionError(
                f"term on {term.support} has local dimension "
                f"{term.local_dim}, lattice has {lattice.local_dim}"
            )
        if any(not 0 <= site < lattice.size for site in term.support):
            raise exceptions.ModelError(
                f"term support {term.support} lies outside the lattice"
            )
        if not lattice.is_connected(term.support):
            raise exceptions.ModelError(
                f"term support {term.support} exceeds the interaction range"
            )
    h = max((max(t.norm, t.spread) for t in terms), default=0.0)
    b = max((len(t.support) for t in terms), default=0)
    logger.debug(
        "built Hamiltonian from %d terms, h=%g b=%d", len(terms), h, b
    )
    return Hamiltonian(lattice, terms, h, b)


def _local_product(
    factors: typing.Mapping[int, typing.Any], width: int, local_dim: int
) -> typing.Any:
    identity = np.eye(local_dim, dtype=complex)
    return functools.reduce(
        np.kron, [factors.get(p, identity) for p in range(width)]
    )


def build_spin1_xy(
    lattice: _lattice.Lattice,
    J: float,
    h_field: float,
    D_aniso: float,
) -> Hamiltonian:
    """Build the spin-1 XY model with a field and single-ion anisotropy.

    H = J sum_<ij> (Sx_i Sx_j + Sy_i Sy_j) + h_field sum_i Sz_i
        + D_aniso sum_i (Sz_i)^2

    One term is emitted per site: its field and anisotropy plus the bonds it
    owns in the positive direction of every axis.
    """
    if lattice.local_dim != 3:
        raise exceptions.ModelError(
            f"the spin-1 XY model needs d=3, got d={lattice.local_dim}"
        )
    if J != 0:
        for extent, periodic in zip(lattice.extents, lattice.periodic):
            if periodic and extent < 2:
                raise exceptions.ModelError(
                    "a periodic axis of extent 1 would couple a site to "
                    "itself"
                )
    spin = operators.spin_operators(3)
    owned: typing.Dict[int, typing.List[int]] = {
        site: [] for site in range(lattice.size)
    }
    if J != 0:
        for owner, neighbour in lattice.bonds():
            owned[owner].append(neighbour)

    terms = []
    for site in range(lattice.size):
        support = (site, *owned[site])
        width = len(support)
        onsite = h_field * spin.z + D_aniso * (spin.z @ spin.z)
        matrix = _local_product({0: onsite}, width, 3)
        for position in range(1, width):
            for op in (spin.x, spin.y):
                matrix = matrix + J * _local_product(
                    {0: op, position: op}, width, 3
                )
        terms.append(operators.LocalTerm(support, matrix))
    hamiltonian = build_from_terms(lattice, terms)
    logger.debug(
        "spin-1 XY on %s: J=%g h=%g D=%g", lattice.extents, J, h_field, D_aniso
    )
    return hamiltonian


def _unit_norm(
    instance: "StateVector",
    attribute: "attr.Attribute[typing.Any]",
    value: _ct.ComplexArray,
) -> None:
    if value.ndim != 1:
        raise exceptions.DimensionError(
            f"state amplitudes must be one-dimensional, got {value.shape}"
        )
    norm = float(np.linalg.norm(value))
    if abs(norm - 1) > STATE_NORM_TOL:
        raise exceptions.NormalizationError(
            f"state has norm {norm!r}, expected 1"
        )


def _complex_vector(value: _ct.ArrayLike) -> _ct.ComplexArray:
    return typing.cast(_ct.ComplexArray, _ct.frozen_array(value, complex))


@attr.s(frozen=True, eq=False)
class StateVector:
    """Dense amplitudes of a normalized many-body state."""

    amplitudes: _ct.ComplexArray = attr.ib(
        converter=_complex_vector, validator=_unit_norm, repr=False
    )

    @classmethod
    def from_unnormalized(
        cls: typing.Type[SV], amplitudes: _ct.ArrayLike
    ) -> SV:
        """Normalize ``amplitudes`` and wrap them."""
        vector = np.asarray(amplitudes, dtype=complex)
        norm = float(np.linalg.norm(vector))
        if norm == 0:
            raise exceptions.NormalizationError(
                "cannot normalize a zero vector"
            )
        return cls(vector / norm)

    @property
    def dimension(self: SV) -> int:
        """Length of the amplitude vector."""
        return int(self.amplitudes.shape[0])

    def overlap(self: SV, other: "StateVector") -> complex:
        """Return ``<self|other>``."""
        if other.dimension != self.dimension:
            raise exceptions.DimensionError(
                f"dimensions {self.dimension} and {other.dimension} differ"
            )
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def fidelity(self: SV, other: "StateVector") -> float:
        """Return ``|<self|other>|**2``."""
        return abs(self.overlap(other)) ** 2


def _site_vectors(
    value: typing.Iterable[_ct.ArrayLike],
) -> typing.Tuple[_ct.ComplexArray, ...]:
    return tuple(_complex_vector(v) for v in value)


def _normalized_sites(
    instance: "ProductState",
    attribute: "attr.Attribute[typing.Any]",
    value: typing.Tuple[_ct.ComplexArray, ...],
) -> None:
    if not value:
        raise exceptions.ModelError("a product state needs at least one site")
    if len({v.shape for v in value}) != 1 or value[0].ndim != 1:
        raise exceptions.DimensionError(
            "all site vectors must share one local dimension"
        )
    for site, vector in enumerate(value):
        norm = float(np.linalg.norm(vector))
        if abs(norm - 1) > SITE_NORM_TOL:
            raise exceptions.NormalizationError(
                f"site {site} vector has norm {norm!r}"
            )


@attr.s(frozen=True, eq=False)
class ProductState:
    """A product of normalized single-site states, site 0 first."""

    site_vectors: typing.Tuple[_ct.ComplexArray, ...] = attr.ib(
        converter=_site_vectors, validator=_normalized_sites
    )

    #: Entanglement rank parameter of a product state
    chi = 1

    @property
    def size(self: PS) -> int:
        """Number of sites."""
        return len(self.site_vectors)

    @property
    def local_dim(self: PS) -> int:
        """Dimension of each site vector."""
        return int(self.site_vectors[0].shape[0])

    def vector(self: PS) -> StateVector:
        """Expand into dense amplitudes."""
        amplitudes = functools.reduce(np.kron, self.site_vectors)
        return StateVector.from_unnormalized(amplitudes)


StateLike = typing.Union[StateVector, ProductState, _ct.ArrayLike]


def as_state_vector(state: StateLike) -> StateVector:
    """Coerce a product state or raw amplitudes into a ``StateVector``."""
    if isinstance(state, StateVector):
        return state
    if isinstance(state, ProductState):
        return state.vector()
    return StateVector(state)


#: Site states of the nematic Neel pattern in the |+1>, |0>, |-1> basis
NEEL_X = np.array([1, 0, -1], dtype=complex) / math.sqrt(2)
NEEL_Y = 1j * np.array([1, 0, 1], dtype=complex) / math.sqrt(2)


def nematic_neel(lattice: _lattice.Lattice) -> ProductState:
    """Alternate ``NEEL_X`` and ``NEEL_Y`` on the two sublattices."""
    if lattice.local_dim != 3:
        raise exceptions.ModelError(
            f"the nematic Neel state needs d=3, got d={lattice.local_dim}"
        )
    if not lattice.is_bipartite:
        raise exceptions.ModelError(
            f"lattice {lattice.extents} with periodicity "
            f"{lattice.periodic} has no consistent bipartition"
        )
    return ProductState(
        NEEL_Y if lattice.sublattice(site) else NEEL_X
        for site in range(lattice.size)
    )


def polarized(lattice: _lattice.Lattice, level: int = 0) -> ProductState:
    """Put every site in basis state ``level``."""
    if not 0 <= level < lattice.local_dim:
        raise exceptions.ModelError(
            f"level {level} outside a {lattice.local_dim}-level site"
        )
    site = np.zeros(lattice.local_dim, dtype=complex)
    site[level] = 1
    return ProductState([site] * lattice.size)


NAMED_STATES: typing.Dict[
    str, typing.Callable[[_lattice.Lattice], ProductState]
] = {
    "nematic_neel": nematic_neel,
    "polarized_up": polarized,
    "polarized_down": lambda lat: polarized(lat, lat.local_dim - 1),
}


def named_state(lattice: _lattice.Lattice, name: str) -> ProductState:
    """Look up one of the ``NAMED_STATES`` by name."""
    try:
        factory = NAMED_STATES[name]
    except KeyError:
        raise exceptions.ModelError(
            f"unknown initial state {name!r}; choose from "
            f"{sorted(NAMED_STATES)}"
        ) from None
    return factory(lattice)


def energy_moments(
    hamiltonian: Hamiltonian, state: StateLike
) -> typing.Tuple[float, float]:
    """Return the mean energy and its standard deviation in ``state``."""
    vector = as_state_vector(state)
    if vector.dimension != hamiltonian.dimension:
        raise exceptions.DimensionError(
            f"state of dimension {vector.dimension} does not match "
            f"Hamiltonian dimension {hamiltonian.dimension}"
        )
    applied = hamiltonian.shifted_matrix @ vector.amplitudes
    mean = float(np.vdot(vector.amplitudes, applied).real)
    sigma = float(np.linalg.norm(applied - mean * vector.amplitudes))
    return mean, sigma
