"""The interfaces and built-in implementations that construct models."""
import typing

import zope.interface.verify

from revivalkit import exceptions

from . import interface
from . import spin1_xy
from . import terms

_REGISTRY: typing.Dict[str, interface.IModelBuilder] = {}


def register(builder: interface.IModelBuilder) -> None:
    """Make ``builder`` available under its name."""
    zope.interface.verify.verifyObject(interface.IModelBuilder, builder)
    _REGISTRY[builder.name] = builder


def lookup(name: str) -> interface.IModelBuilder:
    """Return the builder registered as ``name``."""
    try:
        return _REGISTRY[name]
    except KeyError:
        raise exceptions.ConfigError(
            f"unknown model {name!r}; choose from {sorted(_REGISTRY)}"
        ) from None


def names() -> typing.List[str]:
    """Names of every registered builder."""
    return sorted(_REGISTRY)


register(spin1_xy.Spin1XY())
register(terms.TermList())
