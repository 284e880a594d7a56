"""Verify revival detection, the window partition and the count bounds."""
import math

import numpy as np
import pytest

from revivalkit import dynamics
from revivalkit import exceptions
from revivalkit import oracle
from revivalkit import revival
from revivalkit import spectrum
from revivalkit import statistics
from revivalkit import verdict


def _tower_stats(N=8, delta=0.01, c=2.0, K_assumed=0.0):
    dist = oracle.ScarTower(N).distribution()
    event = revival.revival_at(dist, math.pi)
    return revival.partition_weights(dist, event, delta, c, K_assumed)


def test_detects_tower_revivals():
    """``|cos t| ** 6`` revives at pi and 2 pi on a 2001 point grid."""
    dist = oracle.ScarTower(6).distribution()
    times = np.linspace(0.0, 2 * math.pi, 2001)
    series = dynamics.survival_amplitude(dist, times)
    events = revival.detect_revivals(series, 0.01)
    assert [e.tau for e in events] == pytest.approx([math.pi, 2 * math.pi])
    assert all(e.epsilon < 1e-10 for e in events)
    assert events[0].fidelity == pytest.approx(1.0)


def test_flat_fidelity_reports_one_event():
    """A constant F yields the first positive grid time."""
    dist = spectrum.EnergyDistribution([0.0], [1.0], 1, 1.0)
    series = dynamics.survival_amplitude(dist, np.linspace(0.0, 1.0, 11))
    events = revival.detect_revivals(series, 0.01)
    assert len(events) == 1
    assert events[0].tau == pytest.approx(0.1)


@pytest.mark.parametrize("threshold", [0.0, 1.0, -0.1])
def test_detect_rejects_threshold(threshold):
    """The threshold must lie strictly between 0 and 1."""
    dist = spectrum.EnergyDistribution([0.0], [1.0], 1, 1.0)
    series = dynamics.survival_amplitude(dist, [0.0, 0.1])
    with pytest.raises(exceptions.DomainError):
        revival.detect_revivals(series, threshold)


@pytest.mark.parametrize(
    "tau, epsilon",
    [(0.0, 0.1), (-1.0, 0.1), (1.0, -0.1), (1.0, 1.5)],
)
def test_invalid_events(tau, epsilon):
    """Events need a positive time and a deficit in [0, 1]."""
    with pytest.raises(exceptions.DomainError):
        revival.RevivalEvent(tau, epsilon, 0.0)


@pytest.mark.parametrize(
    "epsilon, delta, expected",
    [
        (0.01, 0.2, 1 - 0.01 / (1 - math.cos(0.2))),
        (0.0, 0.5, 1.0),
        (0.1, math.pi, 0.95),
        (0.0, 0.0, 1.0),
        (0.1, 0.0, -math.inf),
    ],
)
def test_peak_weight_bound(epsilon, delta, expected):
    """``1 - eps / (1 - cos delta)`` with the perfect-revival limit."""
    assert revival.peak_weight_bound(epsilon, delta) == pytest.approx(
        expected
    )


def test_peak_weight_bound_rejects_delta():
    """delta outside [0, pi] is a domain error."""
    with pytest.raises(exceptions.DomainError):
        revival.peak_weight_bound(0.01, 4.0)


def test_partition_centres_and_membership():
    """Windows sit at ``(2 pi l - alpha) / tau`` with half-width delta/tau."""
    event = revival.RevivalEvent(math.pi, 0.0, 0.5)
    partition = revival.IntervalPartition.build(event, 0.2, 10.0)
    assert partition.center(3) == pytest.approx((6 * math.pi - 0.5) / math.pi)
    assert partition.half_width == pytest.approx(0.2 / math.pi)
    assert partition.n_max == pytest.approx(5.0)
    centre = partition.center(3)
    assert partition.contains(centre + 0.9 * partition.half_width, 3)
    assert not partition.contains(centre + 1.1 * partition.half_width, 3)
    assert not partition.contains(centre, 4)
    assert partition.l_min <= 0
    assert partition.center(partition.l_max) >= 10.0


def test_tower_window_count():
    """Five of the nine tower windows exceed ``1 / (c N)``."""
    stats = _tower_stats()
    assert list(stats.qualifying()) == [2, 3, 4, 5, 6]
    assert stats.N_c_delta == 5
    assert stats.in_peak_total == pytest.approx(1.0)
    assert stats.gap_total == pytest.approx(0.0, abs=1e-12)
    assert stats.weight(4) == pytest.approx(70 / 256)
    assert stats.weight(100) == 0.0
    assert stats.threshold == pytest.approx(1 / 16)
    assert stats.rows().shape == (stats.partition.l_range.size, 4)
    assert stats.peak_weight_check().verdict is verdict.Verdict.passed
    assert stats.window_count_check().verdict is verdict.Verdict.passed


def test_tower_peak_count_bound():
    """The count bound holds with the fitted Gaussian-comparison constant."""
    family = [oracle.ScarTower(n).distribution() for n in (4, 6, 8, 10)]
    K = statistics.fit_berry_esseen_constant(family).constant
    stats = _tower_stats(K_assumed=K)
    check = stats.peak_count_check()
    assert check.verdict is verdict.Verdict.passed
    assert 0 < check.bound < 5
    # without the correction term the bound overshoots the ladder
    assert _tower_stats().peak_count_check().verdict is (
        verdict.Verdict.failed
    )


def test_peak_count_not_applicable_for_eigenstates():
    """A single level has no spread and the count bound does not apply."""
    dist = spectrum.EnergyDistribution([0.0], [1.0], 4, 1.0)
    event = revival.revival_at(dist, 1.0)
    stats = revival.partition_weights(dist, event, 0.1, 2.0)
    check = stats.peak_count_check()
    assert check.verdict is verdict.Verdict.vacuous
    assert "reason" in check.parameters


def test_perfect_revival_count():
    """Zero-width windows at a perfect revival use the exact-level count."""
    family = [oracle.ScarTower(n).distribution() for n in (4, 6, 8, 10)]
    K = statistics.fit_berry_esseen_constant(family).constant
    stats = _tower_stats(delta=0.0, K_assumed=K)
    assert stats.perfect
    assert stats.N_c_delta == 5
    check = stats.peak_count_check()
    assert check.verdict is verdict.Verdict.passed
    assert check.bound == pytest.approx(
        revival.perfect_revival_count_bound(8, 1.0, math.pi, 2.0, K)
    )
    assert check.parameters["perfect"] is True
    unconstrained = _tower_stats(delta=0.0).peak_count_check()
    assert unconstrained.verdict is verdict.Verdict.vacuous
    assert unconstrained.bound == math.inf


def test_zero_width_windows_need_a_perfect_revival():
    """Without a perfect revival zero-width windows bound nothing."""
    dist = oracle.ScarTower(8).distribution()
    event = revival.RevivalEvent(math.pi, 0.01, 0.0)
    stats = revival.partition_weights(dist, event, 0.0, 2.0, 1.0)
    assert not stats.perfect
    check = stats.peak_count_check()
    assert check.verdict is verdict.Verdict.vacuous
    assert "reason" in check.parameters


def test_peak_count_bound_values():
    """The bound follows the closed form and turns vacuous."""
    value = revival.peak_count_bound(
        8, 1.0, math.pi, 2.0, 0.01, 0.0, 1.0, 0.5
    )
    expected = math.sqrt(8) * 0.75 / (0.01 / math.pi + 0.5 * math.log(8) ** 2)
    assert value == pytest.approx(expected)
    vacuous = revival.peak_count_bound(
        8, 1.0, math.pi, 2.0, 0.2, 0.5, 1.0, 0.5
    )
    assert vacuous < 0


@pytest.mark.parametrize(
    "args",
    [
        (8, 1.0, math.pi, 1.0, 0.1, 0.0, 1.0, 0.0),
        (8, 1.0, math.pi, 2.0, 0.0, 0.0, 1.0, 0.0),
        (8, 1.0, math.pi, 2.0, 0.1, 0.0, 0.0, 0.0),
        (8, 1.0, math.pi, 2.0, 0.1, 0.0, 1.0, -1.0),
    ],
)
def test_peak_count_bound_domain(args):
    """c, delta, s and K outside their ranges are rejected."""
    with pytest.raises(exceptions.DomainError):
        revival.peak_count_bound(*args)


def test_perfect_revival_count_bound():
    """Infinite without a correction, finite with one."""
    assert revival.perfect_revival_count_bound(8, 1.0, math.pi, 2.0, 0.0) == (
        math.inf
    )
    assert revival.perfect_revival_count_bound(
        8, 1.0, math.pi, 2.0, 1.0
    ) == pytest.approx(math.sqrt(8) * 0.75 / math.log(8) ** 2)
    with pytest.raises(exceptions.DomainError):
        revival.perfect_revival_count_bound(8, 1.0, math.pi, 1.0, 1.0)


def test_suggested_parameters():
    """``c = 2 h tau / pi`` and ``delta = 2 sqrt(eps)`` capped at pi."""
    c, delta = revival.suggested_parameters(0.01, 1.0, math.pi)
    assert c == pytest.approx(2.0)
    assert delta == pytest.approx(0.2)
    assert revival.suggested_parameters(4.0, 1.0, 1.0)[1] == math.pi
    assert revival.default_c(1.0, math.pi) == pytest.approx(2.0)


def test_interval_weight_check_with_fitted_constant():
    """The fitted constant is the smallest one every window meets."""
    stats = _tower_stats()
    K = revival.fit_interval_weight_constant([stats])
    assert K > 0
    passing = revival.interval_weight_check(stats, K)
    assert passing.verdict is verdict.Verdict.passed
    assert passing.slack == pytest.approx(0.0, abs=1e-12)
    failing = revival.interval_weight_check(stats, 0.5 * K)
    assert failing.verdict is verdict.Verdict.failed
    with pytest.raises(exceptions.DomainError):
        revival.interval_weight_bound(0.1, 0.0, 1.0, 4, 1.0)


def test_cascade_holds_on_tower():
    """``F(m tau) >= 1 - m sqrt(2 eps)`` along the tower series."""
    dist = oracle.ScarTower(4).distribution()
    times = np.linspace(0.0, 3.2 * math.pi, 3201)
    series = dynamics.survival_amplitude(dist, times)
    event = revival.revival_at(dist, math.pi * 1.01)
    rows = revival.cascade_check(series, event, 3)
    assert [r.parameters["m"] for r in rows] == [1, 2, 3]
    assert all(r.verdict is verdict.Verdict.passed for r in rows)
    with pytest.raises(exceptions.GridError):
        revival.cascade_check(series, event, 4)
    with pytest.raises(exceptions.DomainError):
        revival.cascade_check(series, event, 0)


def test_interpolate_fidelity():
    """Interpolation is exact on grid points and close in between."""
    dist = oracle.ScarTower(4).distribution()
    times = np.linspace(0.0, math.pi, 1001)
    series = dynamics.survival_amplitude(dist, times)
    assert revival.interpolate_fidelity(series, times[300]) == pytest.approx(
        series.F_values[300]
    )
    t = 0.5 * (times[300] + times[301])
    assert revival.interpolate_fidelity(series, t) == pytest.approx(
        abs(math.cos(t)) ** 4, abs=1e-6
    )
