"""Verify the experiment configuration and its overrides."""
import argparse
import math

import pytest

from revivalkit import checks
from revivalkit import config
from revivalkit import exceptions


def test_defaults():
    """The default experiment is the six-site periodic Neel chain."""
    cfg = config.ExperimentConfig()
    assert cfg.lattice.extents == (6,)
    assert cfg.lattice.periodic == (True,)
    assert cfg.model.name == "spin1_xy"
    assert cfg.state.name == "nematic_neel"
    assert cfg.time.steps == 2001
    assert cfg.time.t_max == pytest.approx(2 * math.pi)
    assert cfg.analysis.alphas == (1.5, 2.0, math.inf)
    assert cfg.analysis.tau is None
    assert cfg.seed == 0


def test_yaml_round_trip():
    """A rendered configuration reads back equal with the same hash."""
    cfg = config.ExperimentConfig.from_dict(
        {
            "lattice": {"extents": [2, 2], "periodic": [False, False]},
            "analysis": {"regions": [[0, 1], [2]], "tau": 3.0},
            "seed": 11,
        }
    )
    again = config.ExperimentConfig.from_yaml(cfg.to_yaml())
    assert again == cfg
    assert again.config_hash == cfg.config_hash
    assert again.analysis.regions == ((0, 1), (2,))
    assert len(cfg.config_hash) == 64


def test_hash_tracks_changes():
    """Any changed field changes the hash."""
    base = config.ExperimentConfig()
    changed = base.with_overrides({"model.D_aniso": "0.2"})
    assert changed.model.D_aniso == 0.2
    assert changed.config_hash != base.config_hash


def test_empty_yaml_gives_defaults():
    """An empty document is the default configuration."""
    assert config.ExperimentConfig.from_yaml("") == (
        config.ExperimentConfig()
    )


@pytest.mark.parametrize(
    "text",
    [
        "- 1\n- 2\n",
        "colour: blue\n",
        "model: 3\n",
        "model: {spin: 1}\n",
        "model: [unclosed\n",
        "analysis: {threshold: 1.5}\n",
        "analysis: {tau: -1}\n",
        "lattice: {extents: [4, 4], periodic: [true]}\n",
        "lattice: {extents: [0]}\n",
        "state: {name: null}\n",
        "time: {steps: 1}\n",
        "output: {replace: maybe}\n",
        "analysis: {constants: conditional}\n",
        "analysis: {checks: [everything]}\n",
    ],
)
def test_invalid_configurations(text):
    """Malformed documents raise ConfigError."""
    with pytest.raises(exceptions.ConfigError):
        config.ExperimentConfig.from_yaml(text).policy()


def test_overrides():
    """Raw command-line strings are converted per field."""
    cfg = config.ExperimentConfig().with_overrides(
        {
            "lattice.extents": "4",
            "analysis.alphas": "2, inf",
            "analysis.regions": "0,1;2,3",
            "analysis.tau": "none",
            "output.replace": "yes",
            "seed": "5",
        }
    )
    assert cfg.lattice.extents == (4,)
    assert cfg.analysis.alphas == (2.0, math.inf)
    assert cfg.analysis.regions == ((0, 1), (2, 3))
    assert cfg.analysis.tau is None
    assert cfg.output.replace is True
    assert cfg.seed == 5


@pytest.mark.parametrize("key", ["colour.red", "model", "model."])
def test_unknown_override(key):
    """Overrides must name a section and a field."""
    with pytest.raises(exceptions.ConfigError):
        config.ExperimentConfig().with_overrides({key: "1"})


def test_command_line_flags():
    """Every field gets a flag and only given flags become overrides."""
    parser = argparse.ArgumentParser()
    config.add_arguments(parser)
    args = parser.parse_args(
        ["--lattice-extents", "4", "--analysis-K-assumed", "0.5"]
    )
    assert config.overrides_from(args) == {
        "lattice.extents": "4",
        "analysis.K_assumed": "0.5",
    }


def test_load(tmp_path):
    """Configurations are read from YAML files."""
    path = tmp_path / "experiment.yaml"
    path.write_text("lattice: {extents: [4]}\nseed: 3\n", encoding="utf-8")
    cfg = config.ExperimentConfig.load(path)
    assert cfg.lattice.extents == (4,)
    assert cfg.seed == 3
    with pytest.raises(exceptions.ConfigError):
        config.ExperimentConfig.load(tmp_path / "missing.yaml")


def test_policy():
    """The analysis section selects groups and constants."""
    cfg = config.ExperimentConfig().with_overrides(
        {
            "analysis.checks": "revival,cascade",
            "analysis.constants": "conditional",
            "analysis.K_assumed": "0.4",
            "analysis.K_prime": "0.2",
        }
    )
    policy = cfg.policy()
    assert policy.checks == checks.Checks.revival | checks.Checks.cascade
    assert policy.constants is checks.ConstantMode.conditional
    assert policy.K_assumed == 0.4
    assert policy.K_prime == 0.2
