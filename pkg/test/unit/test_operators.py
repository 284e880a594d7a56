"""Verify spin matrices, local terms and their embedding."""
import numpy as np
import pytest

from revivalkit import exceptions
from revivalkit import lattice
from revivalkit import operators


@pytest.mark.parametrize("local_dim", [2, 3, 4])
def test_spin_algebra(local_dim):
    """``[Sx, Sy] = i Sz`` and ``S**2 = S(S+1)``."""
    spin = operators.spin_operators(local_dim)
    s = spin.spin
    commutator = spin.x @ spin.y - spin.y @ spin.x
    assert np.allclose(commutator, 1j * spin.z)
    casimir = spin.x @ spin.x + spin.y @ spin.y + spin.z @ spin.z
    assert np.allclose(casimir, s * (s + 1) * spin.identity)


def test_spin_one_basis():
    """The spin-1 basis is ordered ``|+1>, |0>, |-1>``."""
    spin = operators.spin_operators(3)
    assert np.allclose(spin.z, np.diag([1, 0, -1]))
    assert np.allclose(spin.plus @ [0, 1, 0], [np.sqrt(2), 0, 0])


def test_embed_orders_sites():
    """The first support site is the most significant tensor factor."""
    spin = operators.spin_operators(3)
    chain = lattice.Lattice.chain(2)
    term = operators.LocalTerm((1, 0), np.kron(spin.z, spin.x))
    embedded = operators.embed(term, chain).toarray()
    assert np.allclose(embedded, np.kron(spin.x, spin.z))


def test_site_operator_sum():
    """Total magnetization of two spin-1 sites."""
    spin = operators.spin_operators(3)
    total = operators.site_operator_sum(spin.z, lattice.Lattice.chain(2))
    assert np.allclose(
        total.diagonal().real, [2, 1, 0, 1, 0, -1, 0, -1, -2]
    )


def test_term_norm_and_spread():
    """Norm and spread of a single-site term."""
    term = operators.LocalTerm((0,), operators.spin_operators(3).z)
    assert term.norm == pytest.approx(1.0)
    assert term.spread == pytest.approx(2.0)
    assert term.local_dim == 3
    assert term.scaled(2.0).norm == pytest.approx(2.0)


@pytest.mark.parametrize(
    "support, matrix, error",
    [
        ((0,), [[0, 1], [0, 0]], exceptions.ModelError),
        ((0, 0), np.eye(4), exceptions.ModelError),
        ((), np.eye(1), exceptions.ModelError),
        ((0,), np.ones((2, 3)), exceptions.DimensionError),
    ],
)
def test_invalid_terms(support, matrix, error):
    """Reject non-Hermitian, repeated-site, empty and non-square terms."""
    with pytest.raises(error):
        operators.LocalTerm(support, matrix)


def test_embed_rejects_other_local_dimension():
    """A qubit term does not fit a spin-1 lattice."""
    term = operators.LocalTerm((0,), np.diag([1.0, -1.0]))
    with pytest.raises(exceptions.DimensionError):
        operators.embed(term, lattice.Lattice.chain(2))


def test_is_hermitian_sparse():
    """Sparse matrices are checked without densifying."""
    spin = operators.spin_operators(3)
    chain = lattice.Lattice.chain(3)
    assert operators.is_hermitian(operators.site_operator(spin.x, 1, chain))
    rotated = operators.site_operator(spin.x, 1, chain) * 1j
    assert not operators.is_hermitian(rotated)
