"""Verify the check groups and the verification policy."""
import pytest

from revivalkit import checks
from revivalkit import exceptions

Checks = checks.Checks


def test_all_groups():
    """``all`` enables every group and every report entry."""
    policy = checks.VerificationPolicy.default()
    assert policy.checks == Checks.all()
    assert Checks.from_names(["revival", "all"]) == Checks.all()
    names = policy.names()
    assert names[0] == "peak_weight"
    assert names[-1] == "observable_ladder"
    assert len(names) == len(set(names))
    assert all(policy.enabled(group) for group in Checks)


def test_selected_groups():
    """Only the named groups run, in report order."""
    policy = checks.VerificationPolicy(Checks.from_names(["cascade", "scars"]))
    assert policy.names() == ["cascade", "residual", "dephasing"]
    assert not policy.enabled(Checks.revival)


def test_unknown_group():
    """Unknown group names raise ConfigError."""
    with pytest.raises(exceptions.ConfigError):
        Checks.from_names(["revival", "magic"])


@pytest.mark.parametrize(
    "value, expected",
    [
        ("fit", checks.ConstantMode.fit),
        (checks.ConstantMode.conditional, checks.ConstantMode.conditional),
    ],
)
def test_constant_mode(value, expected):
    """Modes convert from their text."""
    assert checks.ConstantMode.from_value(value) is expected


def test_constant_mode_rejects_unknown():
    """Anything but fit and conditional is a configuration error."""
    with pytest.raises(exceptions.ConfigError):
        checks.ConstantMode.from_value("guess")


def test_conditional_needs_constants():
    """Conditional mode requires both constants."""
    with pytest.raises(exceptions.ConfigError):
        checks.VerificationPolicy(constants="conditional", K_assumed=0.5)
    policy = checks.VerificationPolicy(
        constants="conditional", K_assumed=0.5, K_prime=0.1
    )
    assert str(policy.constants) == "conditional"
