"""Verdicts for machine-checked inequalities and the aggregated report."""
import enum
import math
import typing

import attr

#: Absolute slack granted to every inequality to absorb rounding
TOLERANCE = 1e-10

V = typing.TypeVar("V", bound="Verdict")
CR = typing.TypeVar("CR", bound="CheckResult")


@enum.unique
class Verdict(enum.Enum):
    """Outcome of a single bound check."""

    passed = "PASS"
    failed = "FAIL"
    #: The bound holds for trivial reasons (e.g. a negative lower bound)
    vacuous = "VACUOUS"

    def __str__(self: V) -> str:
        """Return the value of the enum instead of a repr."""
        return str(self.value)

    @classmethod
    def from_value(
        cls: typing.Type[V], verdict: typing.Union[str, "Verdict"]
    ) -> V:
        """Convert value to a Verdict value."""
        if isinstance(verdict, cls):
            return verdict
        return cls.from_string(typing.cast(str, verdict))

    @classmethod
    def from_string(cls: typing.Type[V], verdict: str) -> V:
        """Convert the text used in reports back to the Verdict value."""
        for member in cls:
            if member.value == verdict.upper():
                return member
        raise ValueError(f"unknown verdict {verdict!r}")


def _verdict_from_value(value: typing.Union[str, Verdict]) -> Verdict:
    return Verdict.from_value(value)


def _finite_or_none(value: float) -> typing.Optional[float]:
    if value is None or math.isfinite(value):
        return value
    return None


@attr.s(frozen=True)
class CheckResult:
    """The measured side, the bound side and the verdict of one check."""

    #: Name of the checked statement, e.g. ``peak_weight``
    name: str = attr.ib()
    measured: float = attr.ib()
    bound: float = attr.ib()
    verdict: Verdict = attr.ib(converter=_verdict_from_value)
    #: Distance to violation; negative slack means the check failed
    slack: float = attr.ib()
    parameters: typing.Mapping[str, typing.Any] = attr.ib(factory=dict)
    details: typing.Tuple["CheckResult", ...] = attr.ib(
        default=(), converter=tuple
    )

    @classmethod
    def upper(
        cls: typing.Type[CR],
        name: str,
        measured: float,
        bound: float,
        parameters: typing.Optional[typing.Mapping[str, typing.Any]] = None,
        *,
        tolerance: float = TOLERANCE,
    ) -> CR:
        """Check ``measured <= bound`` within ``tolerance``."""
        slack = bound - measured
        if math.isinf(bound) and bound > 0:
            verdict = Verdict.vacuous
        elif slack >= -tolerance:
            verdict = Verdict.passed
        else:
            verdict = Verdict.failed
        return cls(name, measured, bound, verdict, slack, parameters or {})

    @classmethod
    def lower(
        cls: typing.Type[CR],
        name: str,
        measured: float,
        bound: float,
        parameters: typing.Optional[typing.Mapping[str, typing.Any]] = None,
        *,
        tolerance: float = TOLERANCE,
    ) -> CR:
        """Check ``measured >= bound``.

        Non-positive bounds hold trivially and an infinite bound carries no
        information, so both are vacuous.
        """
        slack = measured - bound
        if bound <= 0 or math.isinf(bound):
            verdict = Verdict.vacuous
        elif slack >= -tolerance:
            verdict = Verdict.passed
        else:
            verdict = Verdict.failed
        return cls(name, measured, bound, verdict, slack, parameters or {})

    @classmethod
    def not_applicable(
        cls: typing.Type[CR],
        name: str,
        reason: str,
        parameters: typing.Optional[typing.Mapping[str, typing.Any]] = None,
    ) -> CR:
        """Record a check whose hypothesis does not hold for this input."""
        params = dict(parameters or {})
        params["reason"] = reason
        return cls(name, math.nan, math.nan, Verdict.vacuous, math.nan, params)

    @classmethod
    def aggregate(
        cls: typing.Type[CR],
        name: str,
        results: typing.Sequence["CheckResult"],
        parameters: typing.Optional[typing.Mapping[str, typing.Any]] = None,
    ) -> CR:
        """Fold many rows of one check into a single entry.

        The entry fails if any row fails and is vacuous only if every row is.
        Its measured value, bound and slack are taken from the row closest
        to violation.
        """
        if not results:
            return cls.not_applicable(name, "no cases", parameters)
        decisive = [r for r in results if r.verdict is not Verdict.vacuous]
        if not decisive:
            worst = results[0]
            verdict = Verdict.vacuous
        else:
            worst = min(decisive, key=lambda r: r.slack)
            failed = any(r.verdict is Verdict.failed for r in decisive)
            verdict = Verdict.failed if failed else Verdict.passed
        return cls(
            name,
            worst.measured,
            worst.bound,
            verdict,
            worst.slack,
            parameters or {},
            details=tuple(results),
        )

    @property
    def ok(self: CR) -> bool:
        """Whether the check did not fail."""
        return self.verdict is not Verdict.failed

    def to_dict(self: CR) -> typing.Dict[str, typing.Any]:
        """Render the result for the JSON reports."""
        rendered: typing.Dict[str, typing.Any] = {
            "name": self.name,
            "measured": _finite_or_none(self.measured),
            "bound": _finite_or_none(self.bound),
            "verdict": str(self.verdict),
            "slack": _finite_or_none(self.slack),
            "parameters": dict(self.parameters),
        }
        if self.details:
            rendered["details"] = [d.to_dict() for d in self.details]
        return rendered


VR = typing.TypeVar("VR", bound="VerificationReport")


def _unique_names(
    instance: "VerificationReport",
    attribute: "attr.Attribute[typing.Any]",
    value: typing.Tuple[CheckResult, ...],
) -> None:
    names = [entry.name for entry in value]
    if len(names) != len(set(names)):
        raise ValueError(f"checks reported more than once: {names}")


@attr.s(frozen=True)
class VerificationReport:
    """Every enabled check of one experiment, exactly once each."""

    entries: typing.Tuple[CheckResult, ...] = attr.ib(
        converter=tuple, validator=_unique_names
    )
    version: str = attr.ib()
    config_hash: str = attr.ib()

    @property
    def failed(self: VR) -> typing.List[CheckResult]:
        """Entries whose verdict is FAIL."""
        return [e for e in self.entries if e.verdict is Verdict.failed]

    @property
    def exit_status(self: VR) -> int:
        """Return 1 if any non-vacuous bound check failed, else 0."""
        return 1 if self.failed else 0

    def entry(self: VR, name: str) -> CheckResult:
        """Look up the entry of one check by name."""
        for entry in self.entries:
            if entry.name == name:
                return entry
        raise KeyError(name)

    def to_dict(self: VR) -> typing.Dict[str, typing.Any]:
        """Render the report for JSON export."""
        return {
            "version": self.version,
            "config_hash": self.config_hash,
            "entries": [e.to_dict() for e in self.entries],
        }
