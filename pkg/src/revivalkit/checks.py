"""Policies selecting which bound checks a verification runs."""
import enum
import typing

import attr

from revivalkit import exceptions


class Checks(enum.IntFlag):
    """Groups of checks a verification can run.

    * ``revival`` covers the in-window weight, the window count and its
      lower bound, and the per-window ceiling

    * ``cascade`` checks the fidelity at multiples of a revival time

    * ``scars`` builds the approximate eigenstates and checks their residual
      and dephasing

    * ``entanglement`` runs the entropy ceilings, the fidelity-rank
      inequality and the entropy orderings on every scar state

    * ``filter`` applies the ladder filter and bounds the rank entropy of
      its output
    """

    revival = 1
    cascade = 2
    scars = 4
    entanglement = 8
    filter = 16
    fidelity_average = 32
    berry_esseen = 64
    observable_ladder = 128
    # next - 256

    @classmethod
    def all(cls) -> "Checks":
        """Every group."""
        value = cls(0)
        for member in cls:
            value |= member
        return value

    @classmethod
    def from_names(cls, names: typing.Iterable[str]) -> "Checks":
        """Combine groups given by name; ``all`` selects every group."""
        value = cls(0)
        for name in names:
            if name == "all":
                return cls.all()
            try:
                value |= cls[name]
            except KeyError:
                raise exceptions.ConfigError(
                    f"unknown check group {name!r}"
                ) from None
        return value


#: Report entries produced by each group, in report order
CHECK_NAMES: typing.Mapping[Checks, typing.Tuple[str, ...]] = {
    Checks.revival: (
        "peak_weight",
        "peak_count",
        "window_count",
        "interval_weight",
    ),
    Checks.cascade: ("cascade",),
    Checks.scars: ("residual", "dephasing"),
    Checks.entanglement: (
        "renyi_ceiling",
        "exact_scar_entropy",
        "fidelity_rank",
        "renyi_monotonicity",
        "min_entropy",
    ),
    Checks.filter: (
        "filter_projection",
        "filter_completeness",
        "rank_ceiling",
    ),
    Checks.fidelity_average: ("fidelity_average", "revival_duration"),
    Checks.berry_esseen: ("berry_esseen", "berry_esseen_trend"),
    Checks.observable_ladder: ("observable_ladder",),
}


CM = typing.TypeVar("CM", bound="ConstantMode")


@enum.unique
class ConstantMode(enum.Enum):
    """How the unknown constants of the Gaussian-comparison bounds are set."""

    #: Fit the smallest constants that make the measured family comply
    fit = "fit"
    #: Take the constants from the configuration and check against them
    conditional = "conditional"

    def __str__(self: CM) -> str:
        """Return the value of the enum instead of a repr."""
        return str(self.value)

    @classmethod
    def from_value(
        cls: typing.Type[CM], mode: typing.Union[str, "ConstantMode"]
    ) -> CM:
        """Convert value to a ConstantMode value."""
        if isinstance(mode, cls):
            return mode
        try:
            return cls(mode)
        except ValueError:
            raise exceptions.ConfigError(
                f"constant mode must be 'fit' or 'conditional', not {mode!r}"
            ) from None


P = typing.TypeVar("P", bound="VerificationPolicy")


@attr.s(frozen=True)
class VerificationPolicy:
    """Logic that determines which checks run and how constants are set."""

    checks: Checks = attr.ib(default=Checks.all())
    constants: ConstantMode = attr.ib(
        default=ConstantMode.fit, converter=ConstantMode.from_value
    )
    #: K of the window ceiling and the count bound in conditional mode
    K_assumed: typing.Optional[float] = attr.ib(default=None)
    #: K' of the time-average ceiling in conditional mode
    K_prime: typing.Optional[float] = attr.ib(default=None)

    def __attrs_post_init__(self: P) -> None:
        """Conditional mode needs both constants."""
        if self.constants is ConstantMode.conditional and (
            self.K_assumed is None or self.K_prime is None
        ):
            raise exceptions.ConfigError(
                "conditional mode needs K_assumed and K_prime"
            )

    @classmethod
    def default(cls: typing.Type[P]) -> P:
        """Return the default policy."""
        return cls()

    def enabled(self: P, group: Checks) -> bool:
        """Whether a group of checks runs."""
        return bool(self.checks & group)

    def names(self: P) -> typing.List[str]:
        """Every report entry the policy produces, in report order."""
        return [
            name
            for group, names in CHECK_NAMES.items()
            if self.enabled(group)
            for name in names
        ]
