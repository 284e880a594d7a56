"""Build, diagonalize, analyze and verify one experiment end to end."""
import logging
import math
import pathlib
import typing

import attr
import numpy as np

import revivalkit
from revivalkit import _common_types as _ct
from revivalkit import builders
from revivalkit import checks
from revivalkit import config as _config
from revivalkit import dynamics
from revivalkit import entanglement
from revivalkit import exceptions
from revivalkit import formats
from revivalkit import lattice as _lattice
from revivalkit import model
from revivalkit import observable
from revivalkit import operators
from revivalkit import oracle
from revivalkit import revival
from revivalkit import scars
from revivalkit import spectrum
from revivalkit import statistics
from revivalkit import storage as _storage
from revivalkit import universal
from revivalkit import verdict

logger = logging.getLogger(__name__)

#: Most ladder levels the filter polynomial is evaluated over
MAX_FILTER_LEVELS = 64
#: Fractions of tau at which the dephasing inequality is sampled
DEPHASING_FRACTIONS = (0.1, 0.5, 1.0)
#: Tower sizes compared with the state when none are configured
TOWER_FAMILY = (4, 6, 8, 10)
#: Short times over which the single-site return exponent is fitted
SHORT_TIMES = (1e-3, 2e-3, 4e-3, 7e-3, 1e-2)

AR = typing.TypeVar("AR", bound="AnalysisResult")
OR = typing.TypeVar("OR", bound="OracleRow")

Kind = _storage.ArtifactKind


@attr.s(frozen=True, eq=False)
class Prepared:
    """A built model with its eigenbasis and the initial state expanded."""

    config: _config.ExperimentConfig = attr.ib()
    lattice: _lattice.Lattice = attr.ib()
    hamiltonian: model.Hamiltonian = attr.ib()
    state: model.StateLike = attr.ib()
    eig: spectrum.EigenDecomposition = attr.ib()
    coeffs: _ct.ComplexArray = attr.ib(repr=False)
    distribution: spectrum.EnergyDistribution = attr.ib()


def storage_for(cfg: _config.ExperimentConfig) -> _storage.Storage:
    """The directory storage named by the output section."""
    return _storage.Storage(_storage.Directory(cfg.output.directory))


def build_lattice(cfg: _config.ExperimentConfig) -> _lattice.Lattice:
    """The lattice described by the configuration."""
    section = cfg.lattice
    return _lattice.Lattice(
        section.extents, section.periodic, section.local_dim
    )


def build_state(
    cfg: _config.ExperimentConfig,
    lattice: _lattice.Lattice,
    builder: builders.interface.IModelBuilder,
) -> model.StateLike:
    """The named initial state, or the one read from an amplitudes file."""
    if cfg.state.amplitudes_file is not None:
        path = pathlib.Path(cfg.state.amplitudes_file)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise exceptions.ConfigError(str(exc)) from exc
        return model.StateVector(formats.load_amplitudes(text))
    return builder.initial_state(lattice, typing.cast(str, cfg.state.name))


def prepare(cfg: _config.ExperimentConfig) -> Prepared:
    """Build the model and the state, diagonalize and project."""
    lattice = build_lattice(cfg)
    builder = builders.lookup(cfg.model.name)
    hamiltonian = builder.build(lattice, attr.asdict(cfg.model))
    state = build_state(cfg, lattice, builder)
    logger.info(
        "diagonalizing %s on %s (dimension %d)",
        cfg.model.name,
        lattice.extents,
        hamiltonian.dimension,
    )
    eig = spectrum.diagonalize(hamiltonian, cap=cfg.model.dimension_cap)
    coeffs = spectrum.coefficients(eig, state)
    dist = spectrum.project_state(eig, state, cfg.analysis.weight_cut)
    logger.info(
        "state spreads over %d levels, sigma=%.6g", dist.size, dist.sigma
    )
    return Prepared(
        cfg, lattice, eig.hamiltonian, state, eig, coeffs, dist
    )


def time_grid(cfg: _config.ExperimentConfig) -> _ct.RealArray:
    """Uniform grid from 0 to ``t_max``."""
    return typing.cast(
        _ct.RealArray, np.linspace(0.0, cfg.time.t_max, cfg.time.steps)
    )


@attr.s(frozen=True, eq=False)
class SimulationResult:
    """Output of :func:`run_simulate`."""

    prepared: Prepared = attr.ib()
    series: dynamics.SurvivalSeries = attr.ib()
    artifacts: typing.Tuple[_storage.Artifact, ...] = attr.ib(converter=tuple)


def run_simulate(
    cfg: _config.ExperimentConfig,
    store: typing.Optional[_storage.Storage] = None,
) -> SimulationResult:
    """Write the spectrum file and the survival CSV of an experiment."""
    store = store or storage_for(cfg)
    prepared = prepare(cfg)
    series = dynamics.survival_amplitude(prepared.distribution, time_grid(cfg))
    artifacts = store.store(
        cfg.output.stem,
        {
            Kind.config: cfg.to_yaml(),
            Kind.spectrum: formats.dump_spectrum(prepared.distribution),
            Kind.survival: formats.dump_survival(series),
        },
        replace=cfg.output.replace,
    )
    return SimulationResult(prepared, series, artifacts)


def import_spectrum(
    path: typing.Union[str, pathlib.Path],
    store: typing.Optional[_storage.Storage] = None,
    stem: typing.Optional[str] = None,
    replace: bool = False,
) -> spectrum.EnergyDistribution:
    """Read a spectrum file and, given a storage, keep a canonical copy."""
    try:
        text = pathlib.Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise exceptions.ParsingError(str(exc)) from exc
    dist = formats.load_spectrum(text)
    if store is not None and stem is not None:
        store.store(
            stem, {Kind.spectrum: formats.dump_spectrum(dist)}, replace
        )
    return dist


def export(
    store: _storage.Storage,
    stem: str,
    kind: _storage.ArtifactKind,
    destination: typing.Optional[typing.Union[str, pathlib.Path]] = None,
) -> str:
    """Return a stored artifact and copy it to ``destination`` if given."""
    content = store.read(stem, kind)
    if destination is not None:
        try:
            pathlib.Path(destination).write_text(content, encoding="utf-8")
        except OSError as exc:
            raise exceptions.StorageBackendError(str(exc)) from exc
    return content


def _select_event(
    cfg: _config.ExperimentConfig,
    dist: spectrum.EnergyDistribution,
    series: dynamics.SurvivalSeries,
) -> typing.Tuple[
    typing.List[revival.RevivalEvent], typing.Optional[revival.RevivalEvent]
]:
    events = revival.detect_revivals(series, cfg.analysis.threshold)
    if cfg.analysis.tau is not None:
        return events, revival.revival_at(dist, cfg.analysis.tau)
    return events, (events[0] if events else None)


def _lattice_dimension(cfg: _config.ExperimentConfig) -> int:
    return len(cfg.lattice.extents)


@attr.s(frozen=True, eq=False)
class AnalysisResult:
    """Revivals of a distribution and the peak statistics of one of them."""

    distribution: spectrum.EnergyDistribution = attr.ib()
    series: dynamics.SurvivalSeries = attr.ib()
    events: typing.Tuple[revival.RevivalEvent, ...] = attr.ib(converter=tuple)
    event: typing.Optional[revival.RevivalEvent] = attr.ib()
    stats: typing.Optional[revival.PeakStatistics] = attr.ib()
    checks: typing.Tuple[verdict.CheckResult, ...] = attr.ib(converter=tuple)

    def to_dict(self: AR) -> typing.Dict[str, typing.Any]:
        """Render the revival report."""
        return {
            "events": [attr.asdict(e) for e in self.events],
            "selected": (
                None if self.event is None else attr.asdict(self.event)
            ),
            "parameters": (
                {} if self.stats is None else self.stats.parameters()
            ),
            "N_c_delta": (
                None if self.stats is None else self.stats.N_c_delta
            ),
            "checks": [c.to_dict() for c in self.checks],
        }


def analyze_distribution(
    cfg: _config.ExperimentConfig,
    dist: spectrum.EnergyDistribution,
    K_assumed: float = 0.0,
) -> AnalysisResult:
    """Detect revivals and measure the window weights of the selected one."""
    series = dynamics.survival_amplitude(dist, time_grid(cfg))
    events, event = _select_event(cfg, dist, series)
    if event is None:
        logger.warning(
            "no revival above %.6g on the grid", 1 - cfg.analysis.threshold
        )
        return AnalysisResult(dist, series, events, None, None, ())
    c_default, delta_default = revival.suggested_parameters(
        event.epsilon, dist.term_bound, event.tau
    )
    delta = cfg.analysis.delta if cfg.analysis.delta is not None else (
        delta_default
    )
    c = cfg.analysis.c if cfg.analysis.c is not None else c_default
    stats = revival.partition_weights(
        dist, event, delta, c, K_assumed, _lattice_dimension(cfg)
    )
    results = [
        stats.peak_weight_check(),
        stats.peak_count_check(),
        stats.window_count_check(),
        _cascade(cfg, series, event),
    ]
    logger.info(
        "revival at tau=%.6g with eps=%.3g: %d windows above 1/(cN)",
        event.tau,
        event.epsilon,
        stats.N_c_delta,
    )
    return AnalysisResult(dist, series, events, event, stats, results)


def run_analyze(
    cfg: _config.ExperimentConfig,
    store: typing.Optional[_storage.Storage] = None,
) -> AnalysisResult:
    """Analyze the stored spectrum; no diagonalization is needed."""
    store = store or storage_for(cfg)
    stem = cfg.output.stem
    dist = formats.load_spectrum(store.read(stem, Kind.spectrum))
    result = analyze_distribution(cfg, dist, count_constant(cfg, dist))
    contents = {Kind.report: formats.dump_json(result.to_dict())}
    if result.stats is not None:
        contents[Kind.peaks] = formats.dump_peaks(result.stats.rows())
    store.store(f"{stem}.revival", contents, replace=cfg.output.replace)
    return result


def _cascade(
    cfg: _config.ExperimentConfig,
    series: dynamics.SurvivalSeries,
    event: typing.Optional[revival.RevivalEvent],
) -> verdict.CheckResult:
    if event is None:
        return verdict.CheckResult.not_applicable("cascade", "no revival")
    reach = int(math.floor(series.t_max / event.tau * (1 + 1e-12)))
    m_max = min(cfg.analysis.m_max, reach)
    if m_max < 1:
        return verdict.CheckResult.not_applicable(
            "cascade", "the grid ends before tau"
        )
    return verdict.CheckResult.aggregate(
        "cascade",
        revival.cascade_check(series, event, m_max),
        {"m_max": m_max},
    )


def count_constant(
    cfg: _config.ExperimentConfig, dist: spectrum.EnergyDistribution
) -> float:
    """The peak-count constant: fitted, or the configured one."""
    policy = cfg.policy()
    if policy.constants is checks.ConstantMode.conditional:
        return typing.cast(float, policy.K_assumed)
    return _berry_esseen(cfg, dist)[1]


def _missing(
    names: typing.Iterable[str], reason: str
) -> typing.List[verdict.CheckResult]:
    return [verdict.CheckResult.not_applicable(n, reason) for n in names]


def _is_tower(cfg: _config.ExperimentConfig) -> bool:
    return (
        cfg.model.name == "spin1_xy"
        and cfg.state.name == "nematic_neel"
        and cfg.state.amplitudes_file is None
    )


def _berry_esseen(
    cfg: _config.ExperimentConfig, dist: spectrum.EnergyDistribution
) -> typing.Tuple[typing.List[verdict.CheckResult], float]:
    names = checks.CHECK_NAMES[checks.Checks.berry_esseen]
    if dist.sigma <= 0:
        return _missing(names, "the state is an eigenstate"), 0.0
    family = [dist]
    if _is_tower(cfg):
        family += [
            oracle.ScarTower(n, cfg.model.h_field, cfg.model.D_aniso)
            .distribution()
            for n in cfg.analysis.family_sizes or TOWER_FAMILY
            if n != dist.site_count
        ]
    fit = statistics.fit_berry_esseen_constant(family)
    return [fit.check(), fit.trend()], fit.constant


def _fidelity_average(
    cfg: _config.ExperimentConfig,
    policy: checks.VerificationPolicy,
    analysis: AnalysisResult,
) -> typing.List[verdict.CheckResult]:
    dist, D = analysis.distribution, _lattice_dimension(cfg)
    if dist.sigma <= 0 or dist.site_count < 2:
        return _missing(
            checks.CHECK_NAMES[checks.Checks.fidelity_average],
            "needs a spread-out energy on two or more sites",
        )
    averages = [
        universal.time_average_fidelity(dist, T, D)
        for T in cfg.analysis.T_values
    ]
    if policy.constants is checks.ConstantMode.fit:
        K_prime = universal.fit_average_constant(averages)
    else:
        K_prime = typing.cast(float, policy.K_prime)
    average = verdict.CheckResult.aggregate(
        "fidelity_average",
        [universal.average_fidelity_check(a, K_prime) for a in averages],
        {"K_prime": K_prime},
    )
    event = analysis.event
    if event is None or event.fidelity <= 0:
        duration = verdict.CheckResult.not_applicable(
            "revival_duration", "no revival"
        )
    else:
        measured = universal.revival_duration(
            analysis.series, event, event.fidelity
        )
        duration = universal.revival_duration_check(
            event,
            measured,
            event.fidelity,
            dist.sigma,
            dist.site_count,
            K_prime,
            D,
        )
    return [average, duration]


def _revival_group(
    policy: checks.VerificationPolicy,
    analysis: AnalysisResult,
    lattice_dimension: int,
) -> typing.List[verdict.CheckResult]:
    stats = analysis.stats
    names = checks.CHECK_NAMES[checks.Checks.revival]
    if stats is None:
        return _missing(names, "no revival")
    results = [
        stats.peak_weight_check(),
        stats.peak_count_check(),
        stats.window_count_check(),
    ]
    if stats.sigma <= 0 or stats.site_count < 2:
        results.append(
            verdict.CheckResult.not_applicable(
                "interval_weight", "needs a spread-out energy"
            )
        )
        return results
    if policy.constants is checks.ConstantMode.fit:
        K = revival.fit_interval_weight_constant([stats], lattice_dimension)
    else:
        K = typing.cast(float, policy.K_assumed)
    results.append(revival.interval_weight_check(stats, K, lattice_dimension))
    return results


def _regions(
    cfg: _config.ExperimentConfig, lattice: _lattice.Lattice
) -> typing.List[entanglement.Region]:
    if cfg.analysis.regions:
        return [
            entanglement.Region.from_sites(lattice, sites)
            for sites in cfg.analysis.regions
        ]
    if lattice.extents[0] < 2:
        return []
    return [entanglement.Region.half(lattice)]


def _is_perfect(event: typing.Optional[revival.RevivalEvent]) -> bool:
    return event is not None and event.epsilon <= revival.PERFECT_REVIVAL_TOL


def _exact_family(
    prepared: Prepared,
    event: revival.RevivalEvent,
    c: float,
    lattice_dimension: int,
) -> typing.List[scars.ApproxEigenstate]:
    exact = revival.partition_weights(
        prepared.distribution,
        event,
        0.0,
        c,
        lattice_dimension=lattice_dimension,
    )
    return scars.select_family(prepared.eig, prepared.coeffs, exact)


def _entanglement_group(
    cfg: _config.ExperimentConfig,
    prepared: Prepared,
    analysis: AnalysisResult,
    family: typing.Sequence[scars.ApproxEigenstate],
    regions: typing.Sequence[entanglement.Region],
) -> typing.List[verdict.CheckResult]:
    names = checks.CHECK_NAMES[checks.Checks.entanglement]
    stats, event = analysis.stats, analysis.event
    if stats is None or event is None or not family or not regions:
        return _missing(names, "no scar states or no region")
    N, chi = prepared.lattice.size, cfg.analysis.chi
    alphas = [a for a in cfg.analysis.alphas if a > 1]
    spectra = {
        (approx.l, index): entanglement.schmidt_spectrum(
            approx.vector, region, prepared.lattice, cfg.analysis.rank_cut
        )
        for approx in family
        for index, region in enumerate(regions)
    }

    def per_region(
        states: typing.Sequence[scars.ApproxEigenstate], exact: bool
    ) -> verdict.CheckResult:
        name = "exact_scar_entropy" if exact else "renyi_ceiling"
        rows = []
        for index, region in enumerate(regions):
            specs = [
                entanglement.schmidt_spectrum(
                    a.vector, region, prepared.lattice, cfg.analysis.rank_cut
                )
                for a in states
            ]
            rows.extend(
                scars.renyi_ceiling_check(
                    specs, stats.c, N, chi, None, a, exact
                )
                for a in alphas
            )
        return verdict.CheckResult.aggregate(name, rows, {"c": stats.c})

    if stats.c <= 1 or not alphas:
        ceiling = verdict.CheckResult.not_applicable(
            "renyi_ceiling", "needs c > 1 and an order above 1"
        )
        exact = verdict.CheckResult.not_applicable(
            "exact_scar_entropy", "needs c > 1 and an order above 1"
        )
    else:
        ceiling = per_region(family, False)
        if _is_perfect(event):
            exact_states = _exact_family(
                prepared, event, stats.c, _lattice_dimension(cfg)
            )
            exact = per_region(exact_states, True)
        else:
            exact = verdict.CheckResult.not_applicable(
                "exact_scar_entropy", "the revival is not perfect"
            )

    rank = verdict.CheckResult.aggregate(
        "fidelity_rank",
        [
            scars.fidelity_rank_check(
                prepared.state, approx, region, prepared.lattice, chi
            )
            for approx in family
            for region in regions
        ],
    )
    orders = sorted(set(cfg.analysis.alphas) | {1.0})
    monotone = verdict.CheckResult.aggregate(
        "renyi_monotonicity",
        [entanglement.monotonicity_check(s, orders) for s in spectra.values()],
    )
    finite = [a for a in alphas if not math.isinf(a)]
    min_entropy = verdict.CheckResult.aggregate(
        "min_entropy",
        [
            entanglement.min_entropy_check(s, a)
            for s in spectra.values()
            for a in finite
        ],
    )
    return [ceiling, exact, rank, monotone, min_entropy]


def _filter_group(
    cfg: _config.ExperimentConfig,
    prepared: Prepared,
    event: typing.Optional[revival.RevivalEvent],
    regions: typing.Sequence[entanglement.Region],
) -> typing.List[verdict.CheckResult]:
    names = checks.CHECK_NAMES[checks.Checks.filter]
    dist = prepared.distribution
    if not _is_perfect(event) or dist.size > MAX_FILTER_LEVELS:
        return _missing(names, "needs a perfect revival on a short ladder")
    event = typing.cast(revival.RevivalEvent, event)
    ladder = dist.energies
    partition = revival.IntervalPartition.build(
        event, 0.0, dist.spectral_width, ladder
    )
    nearest, _ = partition.locate(ladder)
    projections = []
    filtered_states = []
    for i, l in enumerate(nearest):
        target = scars.build_approx_eigenstate(
            prepared.eig, prepared.coeffs, partition, int(l)
        )
        projections.append(
            scars.filter_projection_check(
                prepared.eig, prepared.state, ladder, i, target.vector
            )
        )
        filtered_states.append(
            model.StateVector.from_unnormalized(
                scars.apply_filter(prepared.eig, prepared.state, ladder, i)
            )
        )
    hamiltonian = prepared.hamiltonian
    if hamiltonian.h <= 0 or not regions:
        rank = verdict.CheckResult.not_applicable(
            "rank_ceiling", "needs a non-zero Hamiltonian and a region"
        )
    else:
        rank = verdict.CheckResult.aggregate(
            "rank_ceiling",
            [
                scars.rank_ceiling_check(
                    state,
                    region,
                    prepared.lattice,
                    hamiltonian.h,
                    hamiltonian.site_count,
                    event.tau,
                    prepared.lattice.local_dim,
                    hamiltonian.b,
                    cfg.analysis.chi,
                    cfg.analysis.rank_cut,
                )
                for state in filtered_states
                for region in regions
            ],
        )
    return [
        verdict.CheckResult.aggregate("filter_projection", projections),
        scars.filter_completeness(prepared.eig, prepared.state, ladder),
        rank,
    ]


def _observable_group(
    prepared: Prepared, event: typing.Optional[revival.RevivalEvent]
) -> typing.List[verdict.CheckResult]:
    if not _is_perfect(event):
        return _missing(("observable_ladder",), "the revival is not perfect")
    event = typing.cast(revival.RevivalEvent, event)
    spin = operators.spin_operators(prepared.lattice.local_dim)
    magnetization = operators.site_operator_sum(spin.z, prepared.lattice)
    spec = observable.observable_spectrum(
        prepared.coeffs, prepared.eig, magnetization
    )
    return [observable.ladder_check(spec, event.tau)]


def verify(
    cfg: _config.ExperimentConfig,
    dist: spectrum.EnergyDistribution,
    prepared: typing.Optional[Prepared] = None,
) -> verdict.VerificationReport:
    """Run every check the policy enables, each reported exactly once.

    Without ``prepared`` only the checks that need nothing but the energy
    distribution are evaluated; the rest are reported as vacuous.
    """
    policy = cfg.policy()
    D = _lattice_dimension(cfg)
    be_results, _ = _berry_esseen(cfg, dist)
    analysis = analyze_distribution(cfg, dist, count_constant(cfg, dist))
    event = analysis.event

    groups: typing.Dict[checks.Checks, typing.List[verdict.CheckResult]] = {
        checks.Checks.revival: _revival_group(policy, analysis, D),
        checks.Checks.cascade: [_cascade(cfg, analysis.series, event)],
        checks.Checks.berry_esseen: be_results,
    }
    if policy.enabled(checks.Checks.fidelity_average):
        groups[checks.Checks.fidelity_average] = _fidelity_average(
            cfg, policy, analysis
        )

    eigen_groups = (
        checks.Checks.scars,
        checks.Checks.entanglement,
        checks.Checks.filter,
        checks.Checks.observable_ladder,
    )
    if prepared is None:
        for group in eigen_groups:
            groups[group] = _missing(
                checks.CHECK_NAMES[group], "needs eigenstates"
            )
    else:
        regions = _regions(cfg, prepared.lattice)
        family: typing.List[scars.ApproxEigenstate] = []
        if analysis.stats is not None:
            family = scars.select_family(
                prepared.eig, prepared.coeffs, analysis.stats
            )
        if not family or event is None or analysis.stats is None:
            groups[checks.Checks.scars] = _missing(
                checks.CHECK_NAMES[checks.Checks.scars], "no scar states"
            )
        else:
            times = [f * event.tau for f in DEPHASING_FRACTIONS]
            groups[checks.Checks.scars] = [
                verdict.CheckResult.aggregate(
                    "residual", [a.residual_check() for a in family]
                ),
                verdict.CheckResult.aggregate(
                    "dephasing",
                    [
                        scars.dephasing_check(
                            prepared.eig,
                            a,
                            event.tau,
                            analysis.stats.delta,
                            times,
                        )
                        for a in family
                    ],
                ),
            ]
        if policy.enabled(checks.Checks.entanglement):
            groups[checks.Checks.entanglement] = _entanglement_group(
                cfg, prepared, analysis, family, regions
            )
        if policy.enabled(checks.Checks.filter):
            groups[checks.Checks.filter] = _filter_group(
                cfg, prepared, event, regions
            )
        if policy.enabled(checks.Checks.observable_ladder):
            groups[checks.Checks.observable_ladder] = _observable_group(
                prepared, event
            )

    entries = [
        result
        for group in checks.CHECK_NAMES
        if policy.enabled(group)
        for result in groups[group]
    ]
    for entry in entries:
        if entry.verdict is verdict.Verdict.failed:
            logger.warning(
                "%s failed: measured %.6g against bound %.6g",
                entry.name,
                entry.measured,
                entry.bound,
            )
    return verdict.VerificationReport(
        entries, revivalkit.__version__, cfg.config_hash
    )


def entropy_tables(
    cfg: _config.ExperimentConfig, prepared: Prepared
) -> typing.Tuple[typing.Dict[str, typing.Any], typing.Dict[str, str]]:
    """Entropies of every scar state and their Schmidt tables by stem."""
    analysis = analyze_distribution(cfg, prepared.distribution)
    if analysis.stats is None:
        return {"states": []}, {}
    family = scars.select_family(
        prepared.eig, prepared.coeffs, analysis.stats
    )
    orders = sorted(set(cfg.analysis.alphas) | {0.0, 1.0})
    rows = []
    tables = {}
    for approx in family:
        for index, region in enumerate(_regions(cfg, prepared.lattice)):
            spec = entanglement.schmidt_spectrum(
                approx.vector, region, prepared.lattice, cfg.analysis.rank_cut
            )
            rows.append(
                {
                    "l": approx.l,
                    "energy": approx.energy,
                    "weight": approx.weight,
                    **entanglement.renyi_report(spec, orders).to_dict(),
                }
            )
            stem = f"{cfg.output.stem}.l{approx.l}.r{index}"
            tables[stem] = formats.dump_schmidt(spec.schmidt_sq)
    return {"states": rows}, tables


def run_verify(
    cfg: _config.ExperimentConfig,
    store: typing.Optional[_storage.Storage] = None,
    spectrum_only: bool = False,
) -> verdict.VerificationReport:
    """Verify the bounds on the stored spectrum of an experiment.

    Unless ``spectrum_only`` is set the model is rebuilt so the checks on
    eigenstates can run as well.
    """
    store = store or storage_for(cfg)
    stem = cfg.output.stem
    dist = formats.load_spectrum(store.read(stem, Kind.spectrum))
    prepared = None if spectrum_only else prepare(cfg)
    if prepared is not None:
        dist = prepared.distribution
    report = verify(cfg, dist, prepared)
    store.store(
        stem,
        {Kind.report: formats.dump_json(report.to_dict())},
        replace=True,
    )
    if prepared is not None and cfg.policy().enabled(
        checks.Checks.entanglement
    ):
        payload, tables = entropy_tables(cfg, prepared)
        store.store(
            f"{stem}.entropy",
            {Kind.report: formats.dump_json(payload)},
            replace=True,
        )
        for table_stem, table in tables.items():
            store.store(table_stem, {Kind.schmidt: table}, replace=True)
    logger.info(
        "%d checks, %d failed", len(report.entries), len(report.failed)
    )
    return report


@attr.s(frozen=True)
class OracleRow:
    """One quantity computed both numerically and in closed form."""

    quantity: str = attr.ib()
    case: str = attr.ib()
    numeric: float = attr.ib()
    oracle: float = attr.ib()

    @property
    def delta(self: OR) -> float:
        """Absolute difference of the two values."""
        return abs(self.numeric - self.oracle)

    def to_dict(self: OR) -> typing.Dict[str, typing.Any]:
        """Render the row for the comparison report."""
        return {**attr.asdict(self), "delta": self.delta}


def _return_rows(
    prepared: Prepared, tower: oracle.ScarTower
) -> typing.List[OracleRow]:
    state = typing.cast(model.ProductState, prepared.state)
    t = math.pi / (4 * abs(tower.h))
    closed = oracle.oracle_single_site_return(tower, t)
    rows = [
        OracleRow(
            "single_site_return",
            f"x={site}",
            universal.single_site_return(prepared.eig, state, site, t),
            closed,
        )
        for site in range(tower.N)
    ]
    ks = [
        universal.single_site_return(prepared.eig, state, 0, tau)
        for tau in SHORT_TIMES
    ]
    closed_ks = [
        oracle.oracle_single_site_return(tower, tau) for tau in SHORT_TIMES
    ]
    rows.append(
        OracleRow(
            "return_exponent",
            "x=0",
            universal.return_exponent(SHORT_TIMES, ks),
            universal.return_exponent(SHORT_TIMES, closed_ks),
        )
    )
    sizes = sorted(set(TOWER_FAMILY) | {tower.N})
    fidelities = [
        abs(
            dynamics.amplitude_at(
                prepared.distribution
                if n == tower.N
                else oracle.ScarTower(n, tower.h, tower.D_aniso)
                .distribution(),
                t,
            )
        )
        for n in sizes
    ]
    decay = universal.fidelity_decay(sizes, fidelities)
    rows.append(OracleRow("decay_rate", f"t={t:.6g}", decay.rate, closed))
    return rows


def oracle_rows(prepared: Prepared) -> typing.List[OracleRow]:
    """Compare the diagonalized tower with its closed forms."""
    cfg = prepared.config
    if not _is_tower(cfg) or prepared.lattice.dimension != 1:
        raise exceptions.ConfigError(
            "closed forms exist for the nematic Neel state of a spin-1 XY "
            "chain only"
        )
    h, N = cfg.model.h_field, prepared.lattice.size
    tower = oracle.ScarTower(N, h, cfg.model.D_aniso)
    dist = prepared.distribution
    rows = [
        OracleRow(
            "mean", "", dist.mean + dist.shift, oracle.oracle_mean(tower)
        ),
        OracleRow("sigma", "", dist.sigma, oracle.oracle_sigma(tower)),
    ]

    series = dynamics.survival_amplitude(dist, time_grid(cfg))
    expected = np.array(
        [oracle.oracle_fidelity(tower, t) for t in series.times]
    )
    worst = int(np.abs(series.F_values - expected).argmax())
    rows.append(
        OracleRow(
            "fidelity",
            f"t={series.times[worst]:.6g}",
            float(series.F_values[worst]),
            float(expected[worst]),
        )
    )

    for T in cfg.analysis.T_values:
        try:
            closed = oracle.oracle_time_average(tower, T)
        except exceptions.DomainError:
            continue
        average = universal.time_average_fidelity(dist, T).average
        rows.append(OracleRow("time_average", f"T={T:.6g}", average, closed))

    if h == 0:
        return rows
    rows.extend(_return_rows(prepared, tower))
    event = revival.revival_at(dist, math.pi / abs(h))
    partition = revival.IntervalPartition.build(
        event, 0.0, dist.spectral_width, dist.energies
    )
    region = entanglement.Region.half(prepared.lattice) if N > 1 else None
    shifted = tower.energies - dist.shift
    nearest, _ = partition.locate(shifted)
    for n in range(N + 1):
        weight = float(tower.weights[n])
        if weight <= dist.weight_cut:
            continue
        state = scars.build_approx_eigenstate(
            prepared.eig, prepared.coeffs, partition, int(nearest[n])
        )
        rows.append(OracleRow("weight", f"n={n}", state.weight, weight))
        if region is None:
            continue
        N_A = len(region.sites)
        values = entanglement.schmidt_spectrum(
            state.vector, region, prepared.lattice
        ).schmidt_sq
        closed_values = oracle.schmidt_values(tower, n, N_A)
        for k, value in enumerate(closed_values):
            rows.append(
                OracleRow("schmidt", f"n={n},k={k}", float(values[k]), value)
            )
        if N % 2 == 0 and n % 2 == 0:
            rows.append(
                OracleRow(
                    "lambda_max",
                    f"n={n}",
                    float(values[0]),
                    oracle.oracle_lambda_max(tower, n, N_A),
                )
            )
    return rows


def run_oracle_compare(
    cfg: _config.ExperimentConfig,
    store: typing.Optional[_storage.Storage] = None,
) -> typing.List[OracleRow]:
    """Tabulate numeric against closed-form values and store the table."""
    store = store or storage_for(cfg)
    rows = oracle_rows(prepare(cfg))
    payload = {
        "rows": [r.to_dict() for r in rows],
        "max_delta": max((r.delta for r in rows), default=0.0),
    }
    store.store(
        f"{cfg.output.stem}.oracle",
        {Kind.report: formats.dump_json(payload)},
        replace=True,
    )
    return rows
