"""Seeded synthetic energy distributions for the property suites."""
import logging
import math
import typing

import numpy as np

from revivalkit import revival
from revivalkit import spectrum
from revivalkit import verdict

logger = logging.getLogger(__name__)

#: Smallest raw weight drawn before normalizing
WEIGHT_FLOOR = 1e-3
#: Longest ladder whose binomial weights all stay above the weight cut
MAX_RUNGS = 40


def _normalized(raw: typing.Any) -> typing.Any:
    return raw / raw.sum()


def random_distribution(
    rng: np.random.Generator,
    max_levels: int = 200,
    width: float = 10.0,
) -> spectrum.EnergyDistribution:
    """Uniform levels on ``[0, width]`` with random weights."""
    levels = int(rng.integers(1, max_levels + 1))
    energies = np.unique(rng.uniform(0.0, width, size=levels))
    energies = energies - energies[0]
    weights = _normalized(rng.random(energies.size) + WEIGHT_FLOOR)
    site_count = int(rng.integers(2, 40))
    return spectrum.EnergyDistribution(
        energies,
        weights,
        site_count,
        width / site_count,
        spectral_width=width,
    )


def jittered_ladder(
    rng: np.random.Generator,
    rungs: int,
    spacing: float,
    jitter: float,
) -> spectrum.EnergyDistribution:
    """Binomial weights on a ladder whose rungs are displaced at random.

    A small ``jitter`` gives near-perfect revivals at ``2 pi / spacing``.
    """
    n = np.arange(rungs)
    energies = n * spacing + rng.uniform(-jitter, jitter, size=rungs)
    energies = np.sort(energies)
    energies = energies - energies[0]
    if np.any(np.diff(energies) <= 0):
        energies = n * spacing
    weights = np.array(
        [math.comb(rungs - 1, k) for k in range(rungs)], dtype=float
    )
    weights = _normalized(weights)
    site_count = max(rungs - 1, 1)
    width = float(energies[-1]) + 2 * jitter
    return spectrum.EnergyDistribution(
        energies,
        weights,
        site_count,
        width / site_count if width > 0 else 1.0,
        spectral_width=width,
    )


def suite(
    seed: int, count: int, max_levels: int = 200
) -> typing.Iterator[
    typing.Tuple[spectrum.EnergyDistribution, float, float]
]:
    """Yield ``(distribution, tau, delta)`` cases reproducibly.

    Even cases are random spectra, odd ones jittered ladders sampled near
    their revival time.
    """
    rng = np.random.default_rng(seed)
    for case in range(count):
        if case % 2 == 0:
            dist = random_distribution(rng, max_levels)
            tau = float(rng.uniform(0.05, 5.0))
        else:
            rungs = int(rng.integers(2, min(max_levels, MAX_RUNGS) + 1))
            spacing = float(rng.uniform(0.5, 2.0))
            dist = jittered_ladder(
                rng, rungs, spacing, float(rng.uniform(0.0, 1e-2))
            )
            tau = 2 * math.pi / spacing * float(rng.uniform(0.98, 1.02))
        delta = float(rng.uniform(0.05, math.pi))
        yield dist, tau, delta
    logger.debug("generated %d synthetic cases from seed %d", count, seed)


def peak_weight_suite(
    seed: int, count: int, max_levels: int = 200
) -> verdict.CheckResult:
    """Check the in-window weight bound on every case of :func:`suite`."""
    rows = []
    for dist, tau, delta in suite(seed, count, max_levels):
        event = revival.revival_at(dist, tau)
        stats = revival.partition_weights(dist, event, delta)
        rows.append(stats.peak_weight_check())
    return verdict.CheckResult.aggregate(
        "peak_weight", rows, {"seed": seed, "cases": count}
    )
