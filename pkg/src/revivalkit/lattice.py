"""Regular hypercubic lattices and their site bookkeeping."""
import itertools
import math
import typing

import attr
import numpy as np

from revivalkit import _common_types as _ct
from revivalkit import exceptions

L = typing.TypeVar("L", bound="Lattice")


def _positive_extents(
    instance: "Lattice",
    attribute: "attr.Attribute[typing.Any]",
    value: typing.Tuple[int, ...],
) -> None:
    if not value:
        raise exceptions.ModelError("a lattice needs at least one axis")
    if any(extent < 1 for extent in value):
        raise exceptions.ModelError(
            f"lattice extents must be positive, got {value}"
        )


def _local_dim(
    instance: "Lattice", attribute: "attr.Attribute[typing.Any]", value: int
) -> None:
    if value < 2:
        raise exceptions.ModelError(
            f"local dimension must be at least 2, got {value}"
        )


def _int_tuple(value: typing.Iterable[int]) -> typing.Tuple[int, ...]:
    return tuple(int(v) for v in value)


def _bool_tuple(
    value: typing.Optional[typing.Iterable[bool]],
) -> typing.Optional[typing.Tuple[bool, ...]]:
    if value is None:
        return None
    return tuple(bool(v) for v in value)


@attr.s(frozen=True)
class Lattice:
    """A D-dimensional box of ``N`` sites, each carrying ``d`` levels.

    Sites are numbered in row-major order over ``extents``, so site 0 sits at
    the origin and the last axis varies fastest. The same order is used for
    the tensor factors of every state vector: site 0 is the most significant
    digit of a basis index.
    """

    extents: typing.Tuple[int, ...] = attr.ib(
        converter=_int_tuple, validator=_positive_extents
    )
    periodic: typing.Tuple[bool, ...] = attr.ib(
        default=None, converter=_bool_tuple
    )
    local_dim: int = attr.ib(default=3, converter=int, validator=_local_dim)

    def __attrs_post_init__(self: L) -> None:
        """Default to open boundaries and check the axis counts agree."""
        if self.periodic is None:
            object.__setattr__(
                self, "periodic", (False,) * len(self.extents)
            )
        if len(self.periodic) != len(self.extents):
            raise exceptions.ModelError(
                f"{len(self.extents)} extents but "
                f"{len(self.periodic)} periodicity flags"
            )

    @classmethod
    def chain(
        cls: typing.Type[L],
        length: int,
        periodic: bool = False,
        local_dim: int = 3,
    ) -> L:
        """Create a one-dimensional chain of ``length`` sites."""
        return cls((length,), (periodic,), local_dim)

    @property
    def dimension(self: L) -> int:
        """Spatial dimension D."""
        return len(self.extents)

    @property
    def size(self: L) -> int:
        """Number of sites N."""
        return math.prod(self.extents)

    @property
    def hilbert_dimension(self: L) -> int:
        """Dimension d**N of the many-body space."""
        return int(self.local_dim) ** self.size

    def coordinates(self: L, site: int) -> typing.Tuple[int, ...]:
        """Return the coordinate tuple of ``site``."""
        self._check_site(site)
        return tuple(int(c) for c in np.unravel_index(site, self.extents))

    def site(self: L, coordinates: typing.Sequence[int]) -> int:
        """Return the index of the site at ``coordinates``."""
        if len(coordinates) != self.dimension:
            raise exceptions.ModelError(
                f"expected {self.dimension} coordinates, got {coordinates}"
            )
        for coordinate, extent in zip(coordinates, self.extents):
            if not 0 <= coordinate < extent:
                raise exceptions.ModelError(
                    f"coordinates {tuple(coordinates)} lie outside "
                    f"{self.extents}"
                )
        return int(np.ravel_multi_index(tuple(coordinates), self.extents))

    def sublattice(self: L, site: int) -> int:
        """Return the parity of the coordinate sum of ``site``."""
        return sum(self.coordinates(site)) % 2

    @property
    def is_bipartite(self: L) -> bool:
        """Whether the coordinate parity is a proper two-colouring."""
        return all(
            extent % 2 == 0 or extent == 1 or not periodic
            for extent, periodic in zip(self.extents, self.periodic)
        )

    def _forward(self: L, site: int, axis: int) -> typing.Optional[int]:
        coordinates = list(self.coordinates(site))
        coordinates[axis] += 1
        if coordinates[axis] == self.extents[axis]:
            if not self.periodic[axis]:
                return None
            coordinates[axis] = 0
        neighbour = self.site(coordinates)
        return None if neighbour == site else neighbour

    def bonds(self: L) -> typing.List[typing.Tuple[int, int]]:
        """List nearest-neighbour bonds as ``(owner, neighbour)`` pairs.

        Every bond is owned by the site it leaves in the positive direction.
        A periodic axis of extent 2 contributes its bond once.
        """
        seen: typing.Set[typing.FrozenSet[int]] = set()
        bonds = []
        for site, axis in itertools.product(
            range(self.size), range(self.dimension)
        ):
            neighbour = self._forward(site, axis)
            if neighbour is None:
                continue
            key = frozenset((site, neighbour))
            if key in seen:
                continue
            seen.add(key)
            bonds.append((site, neighbour))
        return bonds

    def neighbours(self: L, site: int) -> typing.List[int]:
        """Return the sites sharing a bond with ``site``."""
        self._check_site(site)
        found = set()
        for a, b in self.bonds():
            if a == site:
                found.add(b)
            elif b == site:
                found.add(a)
        return sorted(found)

    def is_connected(self: L, sites: typing.Iterable[int]) -> bool:
        """Check whether ``sites`` induce a connected set of bonds."""
        remaining = set(sites)
        if len(remaining) <= 1:
            return True
        adjacency: typing.Dict[int, typing.Set[int]] = {
            s: set() for s in remaining
        }
        for a, b in self.bonds():
            if a in remaining and b in remaining:
                adjacency[a].add(b)
                adjacency[b].add(a)
        stack = [next(iter(remaining))]
        reached = set(stack)
        while stack:
            for other in adjacency[stack.pop()] - reached:
                reached.add(other)
                stack.append(other)
        return reached == remaining

    def boundary_size(self: L, sites: _ct.Sites) -> int:
        """Count the bonds with exactly one end inside ``sites``."""
        inside = set(sites)
        return sum((a in inside) != (b in inside) for a, b in self.bonds())

    def _check_site(self: L, site: int) -> None:
        if not 0 <= site < self.size:
            raise exceptions.ModelError(
                f"site {site} is outside a lattice of {self.size} sites"
            )
