"""Verify the model builder registry and the built-in builders."""
import pytest
import zope.interface.exceptions

from revivalkit import builders
from revivalkit import exceptions
from revivalkit import formats
from revivalkit import lattice
from revivalkit import model
from revivalkit import operators

RING4 = lattice.Lattice.chain(4, periodic=True)


def test_registry():
    """Both built-in builders are registered."""
    assert builders.names() == ["spin1_xy", "terms"]
    assert builders.lookup("spin1_xy").name == "spin1_xy"
    with pytest.raises(exceptions.ConfigError):
        builders.lookup("heisenberg")


def test_register_checks_the_interface():
    """Objects without the builder interface are refused."""
    with pytest.raises(zope.interface.exceptions.Invalid):
        builders.register(object())


def test_spin1_xy_builder():
    """Parameters come from the model section, with defaults."""
    builder = builders.lookup("spin1_xy")
    hamiltonian = builder.build(RING4, {"J": 1.0, "h_field": 0.5})
    expected = model.build_spin1_xy(RING4, 1.0, 0.5, 0.0)
    assert (hamiltonian.matrix != expected.matrix).nnz == 0
    state = builder.initial_state(RING4, "polarized_up")
    assert state.size == 4


def test_terms_builder(tmp_path):
    """Explicit terms are read from the file named in the section."""
    spin = operators.spin_operators(3)
    terms = [
        operators.LocalTerm((site,), spin.z) for site in range(RING4.size)
    ]
    path = tmp_path / "field.terms"
    path.write_text(formats.dump_terms(terms), encoding="utf-8")
    builder = builders.lookup("terms")
    hamiltonian = builder.build(RING4, {"terms_file": str(path)})
    assert hamiltonian.h == pytest.approx(2.0)
    assert hamiltonian.b == 1
    assert builder.initial_state(RING4, "nematic_neel").size == 4


@pytest.mark.parametrize("terms_file", [None, "/nonexistent/field.terms"])
def test_terms_builder_needs_a_file(terms_file):
    """A missing or unreadable terms file is a model error."""
    with pytest.raises(exceptions.ModelError):
        builders.lookup("terms").build(RING4, {"terms_file": terms_file})
