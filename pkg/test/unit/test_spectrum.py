"""Verify diagonalization and the energy distributions it produces."""
import math

import numpy as np
import pytest

from revivalkit import exceptions
from revivalkit import lattice
from revivalkit import model
from revivalkit import spectrum


def test_neel_distribution_is_binomial(xy4):
    """The Neel state lives on five equally spaced tower levels."""
    dist = xy4.distribution
    assert dist.size == 5
    assert dist.weights == pytest.approx(np.array([1, 4, 6, 4, 1]) / 16)
    assert np.diff(dist.energies) == pytest.approx([2.0] * 4)
    assert dist.energies + dist.shift == pytest.approx(
        [-3.6, -1.6, 0.4, 2.4, 4.4]
    )
    assert dist.discarded == pytest.approx(0.0, abs=1e-10)
    assert dist.site_count == 4
    assert dist.sigma == pytest.approx(2.0)
    assert dist.s == pytest.approx(1.0)


def test_decomposition_is_shifted(xy4):
    """The ground energy sits at zero and the shift is recorded."""
    eig = xy4.eig
    assert eig.energies[0] == 0.0
    assert np.all(np.diff(eig.energies) >= 0)
    assert eig.dimension == 81
    assert eig.shift == eig.hamiltonian.energy_shift
    assert eig.shift < -3.6
    assert sum(c.size for c in eig.clusters()) == 81
    assert eig.cluster_count == len(eig.clusters())


def test_evolve_matches_closed_form(xy4):
    """The return probability of the Neel state is ``cos(t) ** 8``."""
    state = xy4.state.vector()
    for t in (0.0, 0.3, 1.1, math.pi / 2):
        evolved = spectrum.evolve(xy4.eig, state, t)
        assert state.fidelity(evolved) == pytest.approx(
            math.cos(t) ** 8, abs=1e-10
        )


def test_dimension_cap():
    """Dense diagonalization refuses to exceed the cap."""
    hamiltonian = model.build_spin1_xy(
        lattice.Lattice.chain(4, periodic=True), 1.0, 1.0, 0.0
    )
    with pytest.raises(exceptions.DimensionError):
        spectrum.diagonalize(hamiltonian, cap=80)


def test_state_dimension_mismatch(xy4):
    """Coefficients need a state of the matching dimension."""
    with pytest.raises(exceptions.DimensionError):
        spectrum.coefficients(xy4.eig, model.StateVector([1.0, 0.0]))


def test_from_weights_sorts_pairs():
    """Raw pairs are sorted and the moments follow."""
    dist = spectrum.EnergyDistribution.from_weights([2.0, 0.0], [0.25, 0.75])
    assert list(dist.energies) == [0.0, 2.0]
    assert list(dist.weights) == [0.75, 0.25]
    assert dist.term_bound == 2.0
    assert dist.spectral_width == 2.0
    assert dist.mean == pytest.approx(0.5)
    assert dist.sigma == pytest.approx(math.sqrt(0.75))
    assert dist.amplitude(math.pi / 2) == pytest.approx(0.5)


@pytest.mark.parametrize(
    "energies, weights, error",
    [
        ([0.0, 1.0], [0.5, 0.3], exceptions.NormalizationError),
        ([0.0, 1.0], [0.5, 0.3, 0.2], exceptions.DimensionError),
        ([1.0, 0.0], [0.5, 0.5], exceptions.DomainError),
        ([0.0, 0.0], [0.5, 0.5], exceptions.DomainError),
        ([], [], exceptions.NormalizationError),
        ([0.0, 1.0], [1.0, 1e-20], exceptions.NormalizationError),
        ([0.0, 1.0], [1.2, -0.2], exceptions.NormalizationError),
    ],
)
def test_invalid_distributions(energies, weights, error):
    """Malformed distributions are rejected."""
    with pytest.raises(error):
        spectrum.EnergyDistribution(energies, weights, 1, 1.0)


def test_discarded_weight_counts_towards_normalization():
    """Weight below the cut is carried as ``discarded``."""
    dist = spectrum.EnergyDistribution(
        [0.0, 1.0], [0.5, 0.5 - 1e-12], 1, 1.0, discarded=1e-12
    )
    assert dist.total_weight == pytest.approx(1.0)


def test_degenerate_levels_are_merged():
    """Degenerate eigenvectors collapse into one weighted level."""
    hamiltonian = model.build_spin1_xy(
        lattice.Lattice.chain(2), 0.0, 1.0, 0.0
    )
    eig = spectrum.diagonalize(hamiltonian)
    # levels -2, -1 (x2), 0 (x3), 1 (x2), 2
    assert eig.cluster_count == 5
    uniform = model.StateVector.from_unnormalized(np.ones(9))
    dist = spectrum.project_state(eig, uniform)
    assert dist.size == 5
    assert dist.weights == pytest.approx(np.array([1, 2, 3, 2, 1]) / 9)
    assert dist.shift == pytest.approx(-2.0)
