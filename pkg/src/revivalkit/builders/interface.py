"""Declare the interface we expect model builders to have."""
import typing

import zope.interface

if typing.TYPE_CHECKING:
    from revivalkit import lattice
    from revivalkit import model


class IModelBuilder(zope.interface.Interface):
    """Interface for a named family of Hamiltonians."""

    name = zope.interface.Attribute("Name the builder is registered under")

    def build(
        lattice: "lattice.Lattice",  # noqa: N805
        parameters: typing.Mapping[str, typing.Any],
    ) -> "model.Hamiltonian":
        """Build the Hamiltonian on ``lattice``.

        :param parameters:
            The model section of the experiment configuration.
        :returns:
            The Hamiltonian with its term bound ``h`` and support size ``b``
        :rtype:
            revivalkit.model.Hamiltonian
        """

    def initial_state(
        lattice: "lattice.Lattice", name: str  # noqa: N805
    ) -> "model.ProductState":
        """Build a named initial state for this model."""
