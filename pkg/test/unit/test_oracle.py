"""Verify the closed forms of the spin-1 XY scar tower."""
import fractions
import math
import warnings

import numpy as np
import pytest

from revivalkit import exceptions
from revivalkit import oracle


def test_tower_levels():
    """Energies ``h (2 n - N) + N D`` with binomial weights."""
    tower = oracle.ScarTower(4, h=0.5, D_aniso=0.1)
    assert tower.energies == pytest.approx([-1.6, -0.6, 0.4, 1.4, 2.4])
    assert tower.weights == pytest.approx(np.array([1, 4, 6, 4, 1]) / 16)
    assert tower.mean == pytest.approx(0.4)
    assert tower.sigma == pytest.approx(1.0)
    assert oracle.oracle_mean(tower) == tower.mean
    assert oracle.oracle_sigma(tower) == tower.sigma


def test_exact_weights_sum_to_one():
    """Fractions add up to exactly one."""
    weights = oracle.ScarTower(12).exact_weights()
    assert sum(weights) == fractions.Fraction(1)
    with pytest.raises(exceptions.DomainError):
        oracle.ScarTower(oracle.EXACT_LIMIT + 1).exact_weights()


def test_large_tower_uses_logarithms():
    """Beyond the exact limit the weights still normalize."""
    tower = oracle.ScarTower(200)
    assert not tower.exact
    assert tower.weights.sum() == pytest.approx(1.0)
    assert tower.weights[100] == pytest.approx(
        math.comb(200, 100) / 2 ** 200
    )


def test_distribution():
    """The distribution starts at zero and remembers the shift."""
    dist = oracle.ScarTower(6, D_aniso=0.2).distribution()
    assert dist.energies[0] == 0.0
    assert dist.shift == pytest.approx(-6 + 1.2)
    assert dist.spectral_width == pytest.approx(12.0)
    assert dist.mean + dist.shift == pytest.approx(1.2)
    assert dist.sigma == pytest.approx(math.sqrt(6))


def test_distribution_drops_light_levels():
    """Levels below the weight cut are reported as discarded."""
    dist = oracle.ScarTower(60).distribution(weight_cut=1e-12)
    assert dist.size < 61
    assert dist.discarded > 0
    assert dist.total_weight + dist.discarded == pytest.approx(1.0)


def test_flat_tower():
    """Without a field the tower collapses onto one level."""
    dist = oracle.ScarTower(4, h=0.0, D_aniso=0.5).distribution()
    assert dist.size == 1
    assert dist.shift == pytest.approx(2.0)
    with pytest.raises(exceptions.DomainError):
        oracle.oracle_time_average(oracle.ScarTower(4, h=0.0), math.pi)


@pytest.mark.parametrize("t", [0.0, 0.3, math.pi / 2, 2.0])
def test_fidelity(t):
    """``|cos(h t)| ** N``."""
    tower = oracle.ScarTower(5, h=2.0)
    assert oracle.oracle_fidelity(tower, t) == pytest.approx(
        abs(math.cos(2 * t)) ** 5
    )


def test_single_site_return():
    """``-2 log|cos(h t)|`` vanishes at t = 0."""
    tower = oracle.ScarTower(5, h=2.0)
    assert oracle.oracle_single_site_return(
        tower, math.pi / 8
    ) == pytest.approx(math.log(2))
    assert oracle.oracle_single_site_return(tower, 0.0) == 0.0


@pytest.mark.parametrize(
    "n, N_A, expected",
    [
        (2, 2, [4 / 6, 1 / 6, 1 / 6]),
        (1, 2, [0.5, 0.5]),
        (0, 2, [1.0]),
        (2, 1, [0.5, 0.5]),
    ],
)
def test_schmidt_values(n, N_A, expected):
    """Squared Schmidt values are products of binomials."""
    values = oracle.schmidt_values(oracle.ScarTower(4), n, N_A)
    assert values == pytest.approx(expected)
    assert values.sum() == pytest.approx(1.0)


def test_schmidt_out_of_range_warns():
    """Indices outside the support give zero and a warning."""
    tower = oracle.ScarTower(4)
    with pytest.warns(exceptions.OracleRangeWarning):
        assert oracle.oracle_schmidt(tower, 1, 2, 2) == 0.0
    with pytest.raises(exceptions.DomainError):
        oracle.oracle_schmidt(tower, 5, 2, 0)


@pytest.mark.parametrize(
    "N, n, expected",
    [(4, 2, 4 / 6), (4, 0, 1.0), (8, 4, 36 / 70), (6, 2, 9 / 15)],
)
def test_lambda_max(N, n, expected):
    """``binom(N/2, n/2) ** 2 / binom(N, n)`` at the half cut."""
    tower = oracle.ScarTower(N)
    value = oracle.oracle_lambda_max(tower, n)
    assert value == pytest.approx(expected)
    assert value == pytest.approx(oracle.max_schmidt(tower, n, N // 2))


@pytest.mark.parametrize(
    "N, n, N_A",
    [(5, 2, None), (4, 1, None), (4, 6, None), (4, 2, 1)],
)
def test_lambda_max_domain(N, n, N_A):
    """Odd N, odd n and other cuts fall outside the formula."""
    with pytest.raises(exceptions.DomainError):
        oracle.oracle_lambda_max(oracle.ScarTower(N), n, N_A)


@pytest.mark.parametrize("N", [1, 4, 10])
def test_time_average(N):
    """Agrees with the average of the squared binomial weights."""
    tower = oracle.ScarTower(N)
    expected = float((tower.weights ** 2).sum())
    assert oracle.oracle_time_average(tower, 3 * math.pi) == pytest.approx(
        expected
    )


def test_time_average_needs_a_period():
    """T must be a positive multiple of ``pi / |h|``."""
    tower = oracle.ScarTower(4, h=2.0)
    assert oracle.oracle_time_average(tower, math.pi / 2) == pytest.approx(
        0.2734375
    )
    for T in (1.0, 0.0):
        with pytest.raises(exceptions.DomainError):
            oracle.oracle_time_average(tower, T)


def test_sinf_asymptotic():
    """The large-N min-entropy grows like ``log(N) / 2``."""
    value = oracle.oracle_sinf_asymptotic(100, 0.5)
    assert value == pytest.approx(
        0.5 * math.log(100) + 0.5 * math.log(math.pi / 8)
    )
    tower = oracle.ScarTower(400)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        exact = -math.log(oracle.oracle_lambda_max(tower, 200))
    assert exact == pytest.approx(
        oracle.oracle_sinf_asymptotic(400, 0.5), abs=0.01
    )
    for b in (0.0, 1.0):
        with pytest.raises(exceptions.DomainError):
            oracle.oracle_sinf_asymptotic(10, b)


def test_invalid_tower():
    """A tower needs at least one site."""
    with pytest.raises(exceptions.ModelError):
        oracle.ScarTower(0)
