"""Verify the approximate scar states, their entropies and the filter."""
import math

import numpy as np
import pytest

from revivalkit import entanglement
from revivalkit import exceptions
from revivalkit import model
from revivalkit import oracle
from revivalkit import revival
from revivalkit import scars
from revivalkit import spectrum
from revivalkit import verdict


@pytest.fixture(scope="module")
def family(xy4):
    """The three tower states above ``1 / (2 N)`` at tau = pi."""
    dist = xy4.distribution
    event = revival.revival_at(dist, math.pi)
    stats = revival.partition_weights(dist, event, 0.01, 2.0)
    return stats, scars.select_family(xy4.eig, xy4.coeffs, stats)


def test_family_are_tower_levels(family):
    """The family carries the middle binomial weights."""
    stats, states = family
    assert len(states) == 3
    assert [s.weight for s in states] == pytest.approx([0.25, 0.375, 0.25])
    assert [s.l for s in states] == list(stats.qualifying())
    for state in states:
        check = state.residual_check()
        assert state.residual < 1e-8
        assert check.verdict is verdict.Verdict.passed


def test_tower_schmidt_values_match_closed_form(xy4, family):
    """Half-cut Schmidt values of ``|S_n>`` are binomial ratios."""
    _, states = family
    tower = oracle.ScarTower(4)
    region = entanglement.Region.half(xy4.lattice)
    for n, state in zip((1, 2, 3), states):
        spec = entanglement.schmidt_spectrum(
            state.vector, region, xy4.lattice
        )
        expected = oracle.schmidt_values(tower, n, 2)
        assert spec.schmidt_sq[: expected.size] == pytest.approx(
            expected, abs=1e-10
        )
        assert spec.rank == expected.size


def test_empty_window(xy4, family):
    """A window without weight has no state to build."""
    stats, _ = family
    with pytest.raises(exceptions.DomainError):
        scars.build_approx_eigenstate(
            xy4.eig, xy4.coeffs, stats.partition, stats.partition.l_max + 5
        )


def test_dephasing_of_exact_states(xy4, family):
    """Exact eigenstates only pick up their phase."""
    _, states = family
    check = scars.dephasing_check(
        xy4.eig,
        states[1],
        math.pi,
        0.01,
        [0.0, math.pi / 10, math.pi / 2, math.pi],
    )
    assert check.verdict is verdict.Verdict.passed
    assert check.measured == pytest.approx(0.0, abs=1e-8)


def _random_product_state(rng, sites):
    vectors = []
    for _ in range(sites):
        raw = rng.normal(size=3) + 1j * rng.normal(size=3)
        vectors.append(raw / np.linalg.norm(raw))
    return model.ProductState(vectors)


@pytest.mark.parametrize("seed", range(6))
def test_window_states_of_random_product_states(xy4, seed):
    """Residual and dephasing stay within ``delta / tau`` for spread states."""
    rng = np.random.default_rng(seed)
    state = _random_product_state(rng, 4)
    coeffs = spectrum.coefficients(xy4.eig, state)
    dist = spectrum.project_state(xy4.eig, state)
    tau = float(rng.uniform(0.5, 2 * math.pi))
    delta = float(rng.uniform(0.05, 0.8))
    event = revival.revival_at(dist, tau)
    stats = revival.partition_weights(dist, event, delta)
    occupied = [
        int(l)
        for l, p in zip(stats.partition.l_range, stats.peak_weights)
        if p > 1e-12
    ]
    assert occupied
    times = [tau / 10, tau / 2, tau]
    for l in occupied:
        window = scars.build_approx_eigenstate(
            xy4.eig, coeffs, stats.partition, l
        )
        assert window.residual_check().verdict is verdict.Verdict.passed
        check = scars.dephasing_check(xy4.eig, window, tau, delta, times)
        assert check.verdict is verdict.Verdict.passed


@pytest.mark.parametrize(
    "alpha, factor",
    [(2.0, 2.0), (1.5, 3.0), (math.inf, 1.0)],
)
def test_renyi_ceiling(alpha, factor):
    """``alpha / (alpha - 1) (log(c N) + |dA| log chi)``."""
    assert scars.renyi_ceiling(alpha, 2.0, 4, 2.0, 3) == pytest.approx(
        factor * (math.log(8) + 3 * math.log(2))
    )


@pytest.mark.parametrize("alpha, c", [(1.0, 2.0), (0.5, 2.0), (2.0, 1.0)])
def test_renyi_ceiling_domain(alpha, c):
    """alpha and c must exceed one."""
    with pytest.raises(exceptions.DomainError):
        scars.renyi_ceiling(alpha, c, 4, 1.0, 2)


def test_entropy_ceiling_holds_for_family(xy4, family):
    """Every family state stays below the ceiling."""
    _, states = family
    region = entanglement.Region.half(xy4.lattice)
    spectra = [
        entanglement.schmidt_spectrum(s.vector, region, xy4.lattice)
        for s in states
    ]
    for alpha in (2.0, math.inf):
        check = scars.renyi_ceiling_check(spectra, 2.0, 4, 1.0, None, alpha)
        assert check.name == "renyi_ceiling"
        assert check.verdict is verdict.Verdict.passed
        assert len(check.details) == 3
    exact = scars.renyi_ceiling_check(spectra[0], 2.0, 4, 1.0, 2, 2.0, True)
    assert exact.name == "exact_scar_entropy"


def test_fidelity_rank(xy4, family):
    """The overlap with the Neel state is below ``lambda_max``."""
    _, states = family
    region = entanglement.Region.half(xy4.lattice)
    for state in states:
        check = scars.fidelity_rank_check(
            xy4.state, state, region, xy4.lattice, 1.0
        )
        assert check.verdict is verdict.Verdict.passed
        assert check.measured == pytest.approx(state.weight)


def test_filter_reproduces_tower_states(xy4, family):
    """Filtering the Neel state isolates each tower level."""
    _, states = family
    ladder = xy4.distribution.energies
    for i, state in zip((1, 2, 3), states):
        check = scars.filter_projection_check(
            xy4.eig, xy4.state, ladder, i, state.vector
        )
        assert check.verdict is verdict.Verdict.passed
    complete = scars.filter_completeness(xy4.eig, xy4.state, ladder)
    assert complete.verdict is verdict.Verdict.passed
    assert complete.parameters["levels"] == 5


def test_filter_domain(xy4):
    """Ladders must be distinct and indices inside them."""
    with pytest.raises(exceptions.DomainError):
        scars.apply_filter(xy4.eig, xy4.state, [0.0, 0.0], 0)
    with pytest.raises(exceptions.DomainError):
        scars.apply_filter(xy4.eig, xy4.state, [0.0, 2.0], 2)


def test_rank_ceiling(xy4):
    """Filtered states have a rank entropy far below the ceiling."""
    ladder = xy4.distribution.energies
    filtered = scars.apply_filter(xy4.eig, xy4.state, ladder, 2)
    normalized = filtered / np.linalg.norm(filtered)
    region = entanglement.Region.half(xy4.lattice)
    check = scars.rank_ceiling_check(
        normalized, region, xy4.lattice, 1.0, 4, math.pi, 3, 2, 1.0
    )
    assert check.verdict is verdict.Verdict.passed
    assert check.measured == pytest.approx(math.log(3))
    expected = 7 * math.sqrt(4 * math.pi * 2) * math.log(
        16 * math.pi * 9
    )
    assert scars.rank_ceiling(1.0, 4, math.pi, 3, 2, 1.0, 2) == (
        pytest.approx(expected)
    )
