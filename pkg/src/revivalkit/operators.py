"""Local spin operators and their embedding into the many-body space."""
import functools
import logging
import typing

import attr
import numpy as np
import scipy.sparse

from revivalkit import _common_types as _ct
from revivalkit import exceptions

if typing.TYPE_CHECKING:
    from revivalkit import lattice as _lattice

logger = logging.getLogger(__name__)

#: Largest tolerated entry of ``M - M^dagger`` for a Hermitian matrix
HERMITIAN_TOL = 1e-12

LT = typing.TypeVar("LT", bound="LocalTerm")


@attr.s(frozen=True)
class SpinOperators:
    """Spin matrices in the descending ``|m = S>, ..., |m = -S>`` basis."""

    x: _ct.ComplexArray = attr.ib(repr=False)
    y: _ct.ComplexArray = attr.ib(repr=False)
    z: _ct.ComplexArray = attr.ib(repr=False)
    plus: _ct.ComplexArray = attr.ib(repr=False)
    minus: _ct.ComplexArray = attr.ib(repr=False)
    identity: _ct.ComplexArray = attr.ib(repr=False)

    @property
    def spin(self: "SpinOperators") -> float:
        """The spin quantum number S = (d - 1) / 2."""
        return (self.z.shape[0] - 1) / 2


@functools.lru_cache(maxsize=None)
def spin_operators(local_dim: int) -> SpinOperators:
    """Build the spin-S matrices for a site with ``local_dim`` levels.

    For ``local_dim == 3`` the basis is ``|+1>, |0>, |-1>`` and
    ``z == diag(1, 0, -1)``.
    """
    if local_dim < 2:
        raise exceptions.ModelError(
            f"local dimension must be at least 2, got {local_dim}"
        )
    spin = (local_dim - 1) / 2
    m = spin - np.arange(local_dim)
    # S+ |m> = sqrt(S(S+1) - m(m+1)) |m+1> and |m+1> sits one row up
    raising = np.sqrt(spin * (spin + 1) - m[1:] * (m[1:] + 1))
    plus = np.diag(raising, k=1).astype(complex)
    minus = plus.conj().T
    return SpinOperators(
        x=_ct.frozen_array((plus + minus) / 2),
        y=_ct.frozen_array((plus - minus) / 2j),
        z=_ct.frozen_array(np.diag(m).astype(complex)),
        plus=_ct.frozen_array(plus),
        minus=_ct.frozen_array(minus),
        identity=_ct.frozen_array(np.eye(local_dim, dtype=complex)),
    )


def is_hermitian(matrix: typing.Any, tol: float = HERMITIAN_TOL) -> bool:
    """Check ``max |M - M^dagger| <= tol`` for dense or sparse ``M``."""
    if scipy.sparse.issparse(matrix):
        difference = (matrix - matrix.conj().T).tocoo()
        if difference.nnz == 0:
            return True
        return bool(np.abs(difference.data).max() <= tol)
    matrix = np.asarray(matrix)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        return False
    return bool(np.abs(matrix - matrix.conj().T).max(initial=0.0) <= tol)


def _support_converter(value: typing.Iterable[int]) -> _ct.Sites:
    return tuple(int(s) for s in value)


def _distinct_sites(
    instance: "LocalTerm",
    attribute: "attr.Attribute[typing.Any]",
    value: _ct.Sites,
) -> None:
    if not value:
        raise exceptions.ModelError("a local term needs at least one site")
    if len(set(value)) != len(value):
        raise exceptions.ModelError(f"repeated sites in support {value}")


def _hermitian_matrix(
    instance: "LocalTerm",
    attribute: "attr.Attribute[typing.Any]",
    value: _ct.ComplexArray,
) -> None:
    if value.ndim != 2 or value.shape[0] != value.shape[1]:
        raise exceptions.DimensionError(
            f"term matrix must be square, got shape {value.shape}"
        )
    if not is_hermitian(value):
        raise exceptions.ModelError(
            f"term on sites {instance.support} is not Hermitian"
        )


def _complex_matrix(value: _ct.ArrayLike) -> _ct.ComplexArray:
    return typing.cast(_ct.ComplexArray, _ct.frozen_array(value, complex))


@attr.s(frozen=True, eq=False)
class LocalTerm:
    """A Hermitian operator acting on a few lattice sites.

    The tensor factors of ``matrix`` follow the order of ``support``; the
    first listed site is the most significant digit.
    """

    support: _ct.Sites = attr.ib(
        converter=_support_converter, validator=_distinct_sites
    )
    matrix: _ct.ComplexArray = attr.ib(
        converter=_complex_matrix, validator=_hermitian_matrix, repr=False
    )

    @property
    def local_dim(self: LT) -> int:
        """Infer d from ``d ** len(support) == matrix.shape[0]``."""
        size = self.matrix.shape[0]
        local = int(round(size ** (1 / len(self.support))))
        if local ** len(self.support) != size:
            raise exceptions.DimensionError(
                f"a {size}x{size} matrix cannot act on "
                f"{len(self.support)} sites of equal dimension"
            )
        return local

    @property
    def eigenvalues(self: LT) -> _ct.RealArray:
        """Ascending eigenvalues of the term."""
        return typing.cast(_ct.RealArray, np.linalg.eigvalsh(self.matrix))

    @property
    def norm(self: LT) -> float:
        """Operator norm of the term."""
        return float(np.abs(self.eigenvalues).max())

    @property
    def spread(self: LT) -> float:
        """Difference between the largest and smallest eigenvalue."""
        values = self.eigenvalues
        return float(values[-1] - values[0])

    def scaled(self: LT, factor: float) -> LT:
        """Return the same term multiplied by a real ``factor``."""
        return attr.evolve(self, matrix=self.matrix * factor)


def _digits(
    index: _ct.IntArray, places: typing.Sequence[int], local_dim: int
) -> _ct.IntArray:
    powers = local_dim ** np.asarray(places, dtype=np.int64)
    return (index[:, None] // powers[None, :]) % local_dim


def embed(
    term: LocalTerm, lattice: "_lattice.Lattice"
) -> "scipy.sparse.csr_matrix":
    """Embed ``term`` as a sparse operator on the whole lattice."""
    d = lattice.local_dim
    n_sites = lattice.size
    if term.local_dim != d:
        raise exceptions.DimensionError(
            f"term on sites {term.support} has local dimension "
            f"{term.local_dim}, the lattice has {d}"
        )
    for site in term.support:
        if not 0 <= site < n_sites:
            raise exceptions.ModelError(
                f"term support {term.support} lies outside a lattice of "
                f"{n_sites} sites"
            )
    # digit place of each site counted from the least significant end
    places = [n_sites - 1 - site for site in term.support]
    rest = [n_sites - 1 - s for s in range(n_sites) if s not in term.support]
    k = len(term.support)

    base = np.zeros(d ** (n_sites - k), dtype=np.int64)
    if rest:
        rest_digits = _digits(
            np.arange(d ** (n_sites - k), dtype=np.int64),
            list(range(len(rest) - 1, -1, -1)),
            d,
        )
        base = rest_digits @ (d ** np.asarray(rest, dtype=np.int64))

    local = np.arange(d ** k, dtype=np.int64)
    local_digits = _digits(local, list(range(k - 1, -1, -1)), d)
    offsets = local_digits @ (d ** np.asarray(places, dtype=np.int64))

    rows, cols = np.nonzero(term.matrix)
    data = term.matrix[rows, cols]
    full_rows = (base[:, None] + offsets[rows][None, :]).ravel()
    full_cols = (base[:, None] + offsets[cols][None, :]).ravel()
    full_data = np.tile(data, base.size)
    dimension = d ** n_sites
    return scipy.sparse.coo_matrix(
        (full_data, (full_rows, full_cols)), shape=(dimension, dimension)
    ).tocsr()


def site_operator(
    operator: _ct.ArrayLike, site: int, lattice: "_lattice.Lattice"
) -> "scipy.sparse.csr_matrix":
    """Embed a single-site matrix acting on ``site``."""
    return embed(LocalTerm((site,), operator), lattice)


def site_operator_sum(
    operator: _ct.ArrayLike, lattice: "_lattice.Lattice"
) -> "scipy.sparse.csr_matrix":
    """Return the sum over all sites of a single-site operator."""
    total = scipy.sparse.csr_matrix(
        (lattice.hilbert_dimension, lattice.hilbert_dimension), dtype=complex
    )
    for site in range(lattice.size):
        total = total + site_operator(operator, site, lattice)
    return total
