"""Shared fixtures: small spin-1 XY chains diagonalized once per session."""
import math

import pytest

from revivalkit import config
from revivalkit import pipeline


def xy_config(
    sites: int, periodic: bool = True, **analysis: object
) -> config.ExperimentConfig:
    """Default experiment on a chain of ``sites`` spin-1 sites."""
    return config.ExperimentConfig.from_dict(
        {
            "lattice": {"extents": [sites], "periodic": [periodic]},
            "analysis": {"tau": math.pi, **analysis},
        }
    )


@pytest.fixture(scope="session")
def xy4() -> pipeline.Prepared:
    """Nematic Neel state on a periodic chain of 4 sites."""
    return pipeline.prepare(xy_config(4))


@pytest.fixture(scope="session")
def xy6() -> pipeline.Prepared:
    """Nematic Neel state on a periodic chain of 6 sites."""
    return pipeline.prepare(xy_config(6))


@pytest.fixture(scope="session")
def make_config():
    """Expose :func:`xy_config` to the tests."""
    return xy_config
