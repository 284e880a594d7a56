"""Experiment configuration, its YAML form and its command-line flags."""
import argparse
import hashlib
import json
import logging
import math
import pathlib
import typing

import attr
import yaml

from revivalkit import checks
from revivalkit import exceptions

logger = logging.getLogger(__name__)

EC = typing.TypeVar("EC", bound="ExperimentConfig")
LS = typing.TypeVar("LS", bound="LatticeSection")
StS = typing.TypeVar("StS", bound="StateSection")
TS = typing.TypeVar("TS", bound="TimeSection")

_TRUE = ("1", "true", "yes", "on")
_FALSE = ("0", "false", "no", "off")


def _optional(
    convert: typing.Callable[[typing.Any], typing.Any]
) -> typing.Callable[[typing.Any], typing.Any]:
    def converter(value: typing.Any) -> typing.Any:
        if value is None or (
            isinstance(value, str) and value.lower() in ("", "none", "null")
        ):
            return None
        return convert(value)

    return converter


def _bool(value: typing.Any) -> bool:
    if isinstance(value, str):
        if value.lower() in _TRUE:
            return True
        if value.lower() in _FALSE:
            return False
        raise ValueError(f"not a boolean: {value!r}")
    return bool(value)


def _items(value: typing.Any, sep: str = ",") -> typing.List[typing.Any]:
    if isinstance(value, str):
        return [v.strip() for v in value.split(sep) if v.strip()]
    return list(value)


def _ints(value: typing.Any) -> typing.Tuple[int, ...]:
    return tuple(int(v) for v in _items(value))


def _bools(value: typing.Any) -> typing.Tuple[bool, ...]:
    return tuple(_bool(v) for v in _items(value))


def _floats(value: typing.Any) -> typing.Tuple[float, ...]:
    return tuple(float(v) for v in _items(value))


def _strings(value: typing.Any) -> typing.Tuple[str, ...]:
    return tuple(str(v) for v in _items(value))


def _regions(value: typing.Any) -> typing.Tuple[typing.Tuple[int, ...], ...]:
    """Regions as ``0,1,2;3,4`` on the command line or nested lists."""
    return tuple(_ints(region) for region in _items(value, ";"))


def _field(
    default: typing.Any,
    converter: typing.Callable[[typing.Any], typing.Any],
    help: str,
    validator: typing.Any = None,
) -> typing.Any:
    return attr.ib(
        default=default,
        converter=converter,
        validator=validator,
        metadata={"help": help},
    )


def _positive(
    instance: typing.Any, attribute: "attr.Attribute[typing.Any]", value: float
) -> None:
    if value is not None and not value > 0:
        raise exceptions.ConfigError(
            f"{attribute.name} must be positive, got {value!r}"
        )


def _probability(
    instance: typing.Any, attribute: "attr.Attribute[typing.Any]", value: float
) -> None:
    if not 0 < value < 1:
        raise exceptions.ConfigError(
            f"{attribute.name} must lie in (0, 1), got {value!r}"
        )


@attr.s(frozen=True)
class ModelSection:
    """Which Hamiltonian to build."""

    name: str = _field("spin1_xy", str, "registered model builder")
    J: float = _field(1.0, float, "nearest-neighbour XY coupling")
    h_field: float = _field(1.0, float, "uniform field along z")
    D_aniso: float = _field(0.1, float, "single-ion anisotropy")
    terms_file: typing.Optional[str] = _field(
        None, _optional(str), "explicit local terms for the 'terms' model"
    )
    dimension_cap: int = _field(
        20000, int, "largest dense dimension to diagonalize", _positive
    )


@attr.s(frozen=True)
class LatticeSection:
    """Shape of the lattice."""

    extents: typing.Tuple[int, ...] = _field(
        (6,), _ints, "sites along each axis, e.g. 4,4"
    )
    periodic: typing.Tuple[bool, ...] = _field(
        (True,), _bools, "periodic boundary per axis, e.g. true,false"
    )
    local_dim: int = _field(3, int, "dimension of each site", _positive)

    def __attrs_post_init__(self: LS) -> None:
        """Match periodicity with extents."""
        if not self.extents or min(self.extents) < 1:
            raise exceptions.ConfigError(
                f"extents must be positive, got {self.extents}"
            )
        if len(self.periodic) != len(self.extents):
            raise exceptions.ConfigError(
                "periodic needs one flag per lattice axis"
            )


@attr.s(frozen=True)
class StateSection:
    """The initial state."""

    name: typing.Optional[str] = _field(
        "nematic_neel", _optional(str), "named initial state"
    )
    amplitudes_file: typing.Optional[str] = _field(
        None, _optional(str), "file of 're im' amplitudes, one per row"
    )

    def __attrs_post_init__(self: StS) -> None:
        """Exactly one way of giving the state."""
        if (self.name is None) == (self.amplitudes_file is None):
            raise exceptions.ConfigError(
                "give either a state name or an amplitudes file"
            )


@attr.s(frozen=True)
class TimeSection:
    """Uniform grid ``0 .. t_max`` in units of 1/h."""

    t_max: float = _field(2 * math.pi, float, "end of the grid", _positive)
    steps: int = _field(2001, int, "number of grid points")

    def __attrs_post_init__(self: TS) -> None:
        """A grid needs t = 0 and one later point."""
        if self.steps < 2:
            raise exceptions.ConfigError(
                f"the grid needs two or more points, got {self.steps}"
            )


@attr.s(frozen=True)
class AnalysisSection:
    """Parameters of the revival analysis and of the bound checks."""

    threshold: float = _field(
        0.01, float, "largest fidelity deficit counted as a revival",
        _probability,
    )
    tau: typing.Optional[float] = _field(
        None, _optional(float), "revival time; the first one found if unset",
        _positive,
    )
    delta: typing.Optional[float] = _field(
        None, _optional(float), "window half-width in phase, 2 sqrt(eps)"
    )
    c: typing.Optional[float] = _field(
        None, _optional(float), "count threshold 1/(cN), c = 2 h tau / pi"
    )
    m_max: int = _field(10, int, "largest multiple of tau in the cascade")
    alphas: typing.Tuple[float, ...] = _field(
        (1.5, 2.0, math.inf), _floats, "Renyi orders; inf is the min-entropy"
    )
    chi: float = _field(1.0, float, "rank growth of the initial state")
    regions: typing.Tuple[typing.Tuple[int, ...], ...] = _field(
        (), _regions, "regions as 0,1,2;3,4; the half cut if unset"
    )
    rank_cut: float = _field(1e-12, float, "cut of the rank entropy")
    weight_cut: float = _field(1e-14, float, "smallest weight kept")
    T_values: typing.Tuple[float, ...] = _field(
        (10 * math.pi,), _floats, "averaging windows of the fidelity"
    )
    constants: str = _field(
        "fit", str, "'fit' or 'conditional' unknown constants"
    )
    K_assumed: typing.Optional[float] = _field(
        None, _optional(float), "window and count constant"
    )
    K_prime: typing.Optional[float] = _field(
        None, _optional(float), "time-average constant"
    )
    checks: typing.Tuple[str, ...] = _field(
        ("all",), _strings, "check groups to run"
    )
    family_sizes: typing.Tuple[int, ...] = _field(
        (), _ints, "tower sizes compared with the state; 4,6,8,10 if unset"
    )


@attr.s(frozen=True)
class OutputSection:
    """Where artifacts go."""

    directory: str = _field("results", str, "output directory")
    stem: str = _field("experiment", str, "common name of the artifacts")
    replace: bool = _field(False, _bool, "overwrite differing artifacts")


SECTIONS: typing.Mapping[str, typing.Type[typing.Any]] = {
    "model": ModelSection,
    "lattice": LatticeSection,
    "state": StateSection,
    "time": TimeSection,
    "analysis": AnalysisSection,
    "output": OutputSection,
}


def _build(
    section: str, cls: typing.Type[typing.Any], values: typing.Any
) -> typing.Any:
    if values is None:
        values = {}
    if not isinstance(values, dict):
        raise exceptions.ConfigError(f"section {section!r} must be a mapping")
    known = {f.name for f in attr.fields(cls)}
    unknown = sorted(set(values) - known)
    if unknown:
        raise exceptions.ConfigError(
            f"unknown fields in {section!r}: {', '.join(unknown)}"
        )
    try:
        return cls(**values)
    except (TypeError, ValueError) as exc:
        raise exceptions.ConfigError(f"section {section!r}: {exc}") from exc


@attr.s(frozen=True)
class ExperimentConfig:
    """Everything needed to rerun one experiment."""

    model: ModelSection = attr.ib(factory=ModelSection)
    lattice: LatticeSection = attr.ib(factory=LatticeSection)
    state: StateSection = attr.ib(factory=StateSection)
    time: TimeSection = attr.ib(factory=TimeSection)
    analysis: AnalysisSection = attr.ib(factory=AnalysisSection)
    output: OutputSection = attr.ib(factory=OutputSection)
    seed: int = attr.ib(default=0, converter=int)

    @classmethod
    def from_dict(
        cls: typing.Type[EC], mapping: typing.Mapping[str, typing.Any]
    ) -> EC:
        """Build a configuration, rejecting unknown sections and fields."""
        unknown = sorted(set(mapping) - set(SECTIONS) - {"seed"})
        if unknown:
            raise exceptions.ConfigError(
                f"unknown sections: {', '.join(unknown)}"
            )
        sections = {
            name: _build(name, section, mapping.get(name))
            for name, section in SECTIONS.items()
        }
        try:
            return cls(seed=mapping.get("seed", 0), **sections)
        except (TypeError, ValueError) as exc:
            raise exceptions.ConfigError(str(exc)) from exc

    def to_dict(self: EC) -> typing.Dict[str, typing.Any]:
        """Plain mappings and lists, as written to YAML."""
        return typing.cast(typing.Dict[str, typing.Any], attr.asdict(self))

    @classmethod
    def from_yaml(cls: typing.Type[EC], text: str) -> EC:
        """Parse a YAML document."""
        try:
            mapping = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            raise exceptions.ConfigError(f"invalid YAML: {exc}") from exc
        if mapping is None:
            mapping = {}
        if not isinstance(mapping, dict):
            raise exceptions.ConfigError("the configuration must be a mapping")
        return cls.from_dict(mapping)

    @classmethod
    def load(
        cls: typing.Type[EC], path: typing.Union[str, pathlib.Path]
    ) -> EC:
        """Read a YAML configuration file."""
        try:
            text = pathlib.Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise exceptions.ConfigError(str(exc)) from exc
        return cls.from_yaml(text)

    def to_yaml(self: EC) -> str:
        """Render the configuration with sorted keys."""
        return typing.cast(
            str,
            yaml.safe_dump(
                self.to_dict(), sort_keys=True, default_flow_style=False
            ),
        )

    @property
    def config_hash(self: EC) -> str:
        """SHA-256 of the canonical JSON rendering."""
        canonical = json.dumps(
            self.to_dict(), sort_keys=True, separators=(",", ":")
        )
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    def with_overrides(
        self: EC, overrides: typing.Mapping[str, typing.Any]
    ) -> EC:
        """Apply ``section.field`` overrides given as raw values."""
        mapping = self.to_dict()
        for dotted, value in overrides.items():
            if dotted == "seed":
                mapping["seed"] = value
                continue
            section, _, field = dotted.partition(".")
            if section not in SECTIONS or not field:
                raise exceptions.ConfigError(f"unknown setting {dotted!r}")
            mapping[section][field] = value
        return type(self).from_dict(mapping)

    def policy(self: EC) -> checks.VerificationPolicy:
        """The verification policy described by the analysis section."""
        analysis = self.analysis
        return checks.VerificationPolicy(
            checks.Checks.from_names(analysis.checks),
            analysis.constants,
            analysis.K_assumed,
            analysis.K_prime,
        )


def _flag(section: str, field: str) -> str:
    return f"--{section}-{field.replace('_', '-')}"


def add_arguments(parser: argparse.ArgumentParser) -> None:
    """Add one ``--section-field`` flag per configuration field."""
    group = parser.add_argument_group("configuration overrides")
    for section, cls in SECTIONS.items():
        for field in attr.fields(cls):
            group.add_argument(
                _flag(section, field.name),
                dest=f"{section}.{field.name}",
                default=None,
                metavar=field.name.upper(),
                help=field.metadata.get("help"),
            )
    group.add_argument(
        "--seed",
        dest="seed",
        default=None,
        help="seed of the synthetic spectrum suites",
    )


def overrides_from(args: argparse.Namespace) -> typing.Dict[str, typing.Any]:
    """Collect the flags that were given on the command line."""
    keys = [
        f"{section}.{field.name}"
        for section, cls in SECTIONS.items()
        for field in attr.fields(cls)
    ] + ["seed"]
    values = vars(args)
    return {key: values[key] for key in keys if values.get(key) is not None}
