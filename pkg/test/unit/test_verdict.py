"""Verify the verdict rules and the verification report."""
import math

import pytest

from revivalkit import verdict

Verdict = verdict.Verdict


@pytest.mark.parametrize(
    "measured, bound, expected",
    [
        (0.5, 0.4, Verdict.passed),
        (0.4, 0.4, Verdict.passed),
        (0.4 - 1e-12, 0.4, Verdict.passed),
        (0.3, 0.4, Verdict.failed),
        (5.0, 0.0, Verdict.vacuous),
        (5.0, -2.0, Verdict.vacuous),
        (5.0, math.inf, Verdict.vacuous),
        (5.0, -math.inf, Verdict.vacuous),
    ],
)
def test_lower(measured, bound, expected):
    """Lower bounds that are not positive and finite are vacuous."""
    result = verdict.CheckResult.lower("lower", measured, bound)
    assert result.verdict is expected
    assert result.slack == measured - bound


@pytest.mark.parametrize(
    "measured, bound, expected",
    [
        (0.3, 0.4, Verdict.passed),
        (0.4 + 1e-12, 0.4, Verdict.passed),
        (0.5, 0.4, Verdict.failed),
        (1e9, math.inf, Verdict.vacuous),
        (0.0, 0.0, Verdict.passed),
    ],
)
def test_upper(measured, bound, expected):
    """Upper bounds are vacuous only at plus infinity."""
    assert verdict.CheckResult.upper("upper", measured, bound).verdict is (
        expected
    )


def test_tolerance_override():
    """A zero tolerance makes the comparison strict."""
    result = verdict.CheckResult.upper(
        "strict", 0.4 + 1e-12, 0.4, tolerance=0.0
    )
    assert result.verdict is Verdict.failed


def test_aggregate():
    """Any failed row fails; all-vacuous rows stay vacuous."""
    ok = verdict.CheckResult.lower("row", 1.0, 0.5)
    tight = verdict.CheckResult.lower("row", 0.6, 0.5)
    bad = verdict.CheckResult.lower("row", 0.1, 0.5)
    empty = verdict.CheckResult.lower("row", 0.1, -1.0)

    passed = verdict.CheckResult.aggregate("rows", [ok, tight, empty])
    assert passed.verdict is Verdict.passed
    assert passed.measured == 0.6
    assert len(passed.details) == 3

    assert verdict.CheckResult.aggregate("rows", [ok, bad]).verdict is (
        Verdict.failed
    )
    assert verdict.CheckResult.aggregate("rows", [empty]).verdict is (
        Verdict.vacuous
    )
    missing = verdict.CheckResult.aggregate("rows", [])
    assert missing.verdict is Verdict.vacuous
    assert missing.parameters["reason"] == "no cases"


def test_to_dict_replaces_infinities():
    """Infinite and nan values are written as null."""
    result = verdict.CheckResult.upper("upper", 1.0, math.inf)
    rendered = result.to_dict()
    assert rendered["bound"] is None
    assert rendered["slack"] is None
    assert rendered["verdict"] == "VACUOUS"
    assert verdict.CheckResult.not_applicable("na", "why").to_dict()[
        "measured"
    ] is None


@pytest.mark.parametrize(
    "text, expected",
    [("PASS", Verdict.passed), ("fail", Verdict.failed)],
)
def test_from_string(text, expected):
    """Report text converts back to the enum."""
    assert Verdict.from_value(text) is expected
    assert str(expected) == text.upper()


def test_from_string_rejects_unknown():
    """Unknown verdicts raise ValueError."""
    with pytest.raises(ValueError):
        Verdict.from_string("maybe")


def test_report():
    """Reports look entries up by name and derive the exit status."""
    good = verdict.CheckResult.lower("peak_weight", 1.0, 0.5)
    bad = verdict.CheckResult.upper("window_count", 9, 5)
    report = verdict.VerificationReport([good], "0.1.0", "abc")
    assert report.exit_status == 0
    assert report.entry("peak_weight") is good
    with pytest.raises(KeyError):
        report.entry("cascade")
    failing = verdict.VerificationReport([good, bad], "0.1.0", "abc")
    assert failing.failed == [bad]
    assert failing.exit_status == 1
    assert [e["name"] for e in failing.to_dict()["entries"]] == [
        "peak_weight",
        "window_count",
    ]


def test_report_rejects_duplicates():
    """Each check is reported at most once."""
    entry = verdict.CheckResult.lower("cascade", 1.0, 0.5)
    with pytest.raises(ValueError):
        verdict.VerificationReport([entry, entry], "0.1.0", "abc")
