"""Verify site numbering, bonds and boundaries of hypercubic lattices."""
import pytest

from revivalkit import exceptions
from revivalkit import lattice

BONDS = [
    (lattice.Lattice.chain(4), [(0, 1), (1, 2), (2, 3)]),
    (
        lattice.Lattice.chain(4, periodic=True),
        [(0, 1), (1, 2), (2, 3), (3, 0)],
    ),
    (lattice.Lattice.chain(2, periodic=True), [(0, 1)]),
    (lattice.Lattice.chain(1, periodic=True), []),
    (lattice.Lattice((2, 2)), [(0, 2), (0, 1), (1, 3), (2, 3)]),
]


@pytest.mark.parametrize("lat, expected", BONDS)
def test_bonds(lat, expected):
    """Each bond is listed once, owned by the site it leaves forward."""
    assert lat.bonds() == expected


@pytest.mark.parametrize(
    "lat, sites, expected",
    [
        (lattice.Lattice.chain(6, periodic=True), (0, 1, 2), 2),
        (lattice.Lattice.chain(6), (0, 1, 2), 1),
        (lattice.Lattice.chain(6), (0, 1, 2, 3, 4, 5), 0),
        (lattice.Lattice((3, 3)), (4,), 4),
    ],
)
def test_boundary_size(lat, sites, expected):
    """Count the bonds leaving a region."""
    assert lat.boundary_size(sites) == expected


def test_coordinates_round_trip():
    """Sites are numbered row-major with the last axis fastest."""
    lat = lattice.Lattice((3, 4))
    assert lat.coordinates(7) == (1, 3)
    assert all(lat.site(lat.coordinates(s)) == s for s in range(lat.size))


def test_sizes():
    """Size, spatial dimension and Hilbert dimension."""
    lat = lattice.Lattice((2, 3), (True, False), local_dim=3)
    assert lat.size == 6
    assert lat.dimension == 2
    assert lat.hilbert_dimension == 3 ** 6


@pytest.mark.parametrize(
    "lat, bipartite",
    [
        (lattice.Lattice.chain(5), True),
        (lattice.Lattice.chain(5, periodic=True), False),
        (lattice.Lattice.chain(6, periodic=True), True),
        (lattice.Lattice((4, 3), (True, True)), False),
    ],
)
def test_bipartite(lat, bipartite):
    """Odd periodic axes break the two-colouring."""
    assert lat.is_bipartite is bipartite


def test_connected_sets():
    """Connectivity follows the bonds, including wrap-around ones."""
    ring = lattice.Lattice.chain(5, periodic=True)
    assert ring.is_connected((4, 0))
    assert not lattice.Lattice.chain(5).is_connected((4, 0))
    assert ring.neighbours(0) == [1, 4]


@pytest.mark.parametrize(
    "extents, periodic, local_dim",
    [
        ((), None, 3),
        ((0,), None, 3),
        ((3,), None, 1),
        ((3,), (True, False), 3),
    ],
)
def test_invalid_lattices(extents, periodic, local_dim):
    """Reject empty, degenerate or inconsistent lattices."""
    with pytest.raises(exceptions.ModelError):
        lattice.Lattice(extents, periodic, local_dim)


def test_site_out_of_range():
    """Coordinates outside the box are rejected."""
    lat = lattice.Lattice.chain(3)
    with pytest.raises(exceptions.ModelError):
        lat.site((3,))
    with pytest.raises(exceptions.ModelError):
        lat.coordinates(-1)
