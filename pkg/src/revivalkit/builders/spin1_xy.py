"""Declare the spin-1 XY builder and register it."""
import typing

import zope.interface

from revivalkit import lattice as _lattice
from revivalkit import model

from . import interface


@zope.interface.implementer(interface.IModelBuilder)
class Spin1XY:
    """Builder of the spin-1 XY model and its named product states."""

    name = "spin1_xy"

    def build(
        self: "Spin1XY",
        lattice: _lattice.Lattice,
        parameters: typing.Mapping[str, typing.Any],
    ) -> model.Hamiltonian:
        """Read ``J``, ``h_field`` and ``D_aniso`` from ``parameters``."""
        return model.build_spin1_xy(
            lattice,
            float(parameters.get("J", 1.0)),
            float(parameters.get("h_field", 1.0)),
            float(parameters.get("D_aniso", 0.0)),
        )

    def initial_state(
        self: "Spin1XY", lattice: _lattice.Lattice, name: str
    ) -> model.ProductState:
        """Return one of the named product states."""
        return model.named_state(lattice, name)
