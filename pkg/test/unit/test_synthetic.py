"""Run the inequalities over large seeded families of synthetic spectra."""
import math

import numpy as np
import pytest

from revivalkit import dynamics
from revivalkit import revival
from revivalkit import synthetic
from revivalkit import verdict

SEED = 20240917


def test_suite_is_reproducible():
    """The same seed yields the same cases."""
    first = list(synthetic.suite(SEED, 20))
    second = list(synthetic.suite(SEED, 20))
    assert len(first) == 20
    for (a, tau_a, delta_a), (b, tau_b, delta_b) in zip(first, second):
        assert np.array_equal(a.energies, b.energies)
        assert np.array_equal(a.weights, b.weights)
        assert (tau_a, delta_a) == (tau_b, delta_b)


def test_suite_cases_are_valid():
    """Every case is a normalized distribution with usable parameters."""
    for dist, tau, delta in synthetic.suite(SEED, 200):
        assert dist.total_weight == pytest.approx(1.0)
        assert dist.energies[0] == 0.0
        assert tau > 0
        assert 0 < delta <= math.pi


def test_jittered_ladder_revives():
    """A ladder without jitter returns exactly at ``2 pi / spacing``."""
    rng = np.random.default_rng(SEED)
    dist = synthetic.jittered_ladder(rng, 9, 1.5, 0.0)
    event = revival.revival_at(dist, 2 * math.pi / 1.5)
    assert event.epsilon < 1e-12
    assert dist.weights == pytest.approx(
        [math.comb(8, k) / 256 for k in range(9)]
    )


def test_peak_weight_holds_on_a_thousand_spectra():
    """The in-window weight bound never fails."""
    result = synthetic.peak_weight_suite(SEED, 1000)
    assert result.verdict is not verdict.Verdict.failed
    assert len(result.details) == 1000
    assert result.parameters == {"seed": SEED, "cases": 1000}


def test_cascade_holds_on_synthetic_spectra():
    """``F(m tau) >= 1 - m sqrt(2 eps)`` for every case."""
    m_max = 10
    for dist, tau, _ in synthetic.suite(SEED, 1000):
        reach = m_max * tau
        spread = float(np.abs(dist.energies - dist.mean).max())
        steps = max(3000, math.ceil(reach * spread / 0.02))
        times = np.linspace(0.0, reach, steps + 1)
        series = dynamics.survival_amplitude(dist, times)
        event = revival.revival_at(dist, tau)
        rows = revival.cascade_check(series, event, m_max)
        assert all(row.ok for row in rows), [r.to_dict() for r in rows]
