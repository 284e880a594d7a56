"""Declare the builder reading explicit local terms and register it."""
import pathlib
import typing

import zope.interface

from revivalkit import exceptions
from revivalkit import formats
from revivalkit import lattice as _lattice
from revivalkit import model

from . import interface


@zope.interface.implementer(interface.IModelBuilder)
class TermList:
    """Builder of a Hamiltonian listed term by term in a model file."""

    name = "terms"

    def build(
        self: "TermList",
        lattice: _lattice.Lattice,
        parameters: typing.Mapping[str, typing.Any],
    ) -> model.Hamiltonian:
        """Read the file named by ``terms_file``."""
        path = parameters.get("terms_file")
        if not path:
            raise exceptions.ModelError("the terms model needs a terms_file")
        try:
            text = pathlib.Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise exceptions.ModelError(str(exc)) from exc
        return model.build_from_terms(lattice, formats.load_terms(text))

    def initial_state(
        self: "TermList", lattice: _lattice.Lattice, name: str
    ) -> model.ProductState:
        """Return one of the named product states."""
        return model.named_state(lattice, name)
