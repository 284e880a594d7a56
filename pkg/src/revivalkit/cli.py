"""Command line entry point."""
import argparse
import logging
import sys
import typing

from revivalkit import __version__
from revivalkit import config as _config
from revivalkit import exceptions
from revivalkit import formats
from revivalkit import pipeline
from revivalkit import storage as _storage
from revivalkit import verdict

logger = logging.getLogger(__name__)

#: Exit status for invalid input, configuration or storage
EXIT_INVALID = 2

Handler = typing.Callable[[_config.ExperimentConfig, argparse.Namespace], int]


def _simulate(cfg: _config.ExperimentConfig, args: argparse.Namespace) -> int:
    result = pipeline.run_simulate(cfg)
    for artifact in result.artifacts:
        print(artifact.filename)
    return 0


def _exit_for(results: typing.Iterable[verdict.CheckResult]) -> int:
    failed = any(r.verdict is verdict.Verdict.failed for r in results)
    return 1 if failed else 0


def _analyze(cfg: _config.ExperimentConfig, args: argparse.Namespace) -> int:
    result = pipeline.run_analyze(cfg)
    sys.stdout.write(formats.dump_json(result.to_dict()))
    return _exit_for(result.checks)


def _verify(cfg: _config.ExperimentConfig, args: argparse.Namespace) -> int:
    report = pipeline.run_verify(cfg, spectrum_only=args.spectrum_only)
    for entry in report.entries:
        print(f"{entry.name:<22} {entry.verdict!s:<8} {entry.slack:.6g}")
    return report.exit_status


def _oracle(cfg: _config.ExperimentConfig, args: argparse.Namespace) -> int:
    for row in pipeline.run_oracle_compare(cfg):
        print(
            f"{row.quantity:<13} {row.case:<14} {row.numeric:.15g} "
            f"{row.oracle:.15g} {row.delta:.3g}"
        )
    return 0


def _import(cfg: _config.ExperimentConfig, args: argparse.Namespace) -> int:
    dist = pipeline.import_spectrum(
        args.path,
        pipeline.storage_for(cfg),
        cfg.output.stem,
        cfg.output.replace,
    )
    print(
        f"{dist.size} levels, N={dist.site_count}, "
        f"mean={dist.mean:.6g}, sigma={dist.sigma:.6g}"
    )
    return 0


def _export(cfg: _config.ExperimentConfig, args: argparse.Namespace) -> int:
    kind = _storage.ArtifactKind.from_name(args.kind)
    stem = args.stem or cfg.output.stem
    content = pipeline.export(
        pipeline.storage_for(cfg), stem, kind, args.destination
    )
    if args.destination is None:
        sys.stdout.write(content)
    return 0


def build_parser() -> argparse.ArgumentParser:
    """Parser with one subcommand per pipeline stage."""
    parser = argparse.ArgumentParser(
        prog="revivalkit",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--config",
        dest="config",
        default=None,
        help="YAML experiment configuration; defaults apply without one",
    )
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument(
        "--verbose", "-v", action="store_true", help="log progress details"
    )
    verbosity.add_argument(
        "--quiet", "-q", action="store_true", help="log errors only"
    )
    _config.add_arguments(common)

    commands = parser.add_subparsers(dest="command", required=True)
    simulate = commands.add_parser(
        "simulate",
        parents=[common],
        help="diagonalize and write the spectrum and survival files",
    )
    simulate.set_defaults(handler=_simulate)
    analyze = commands.add_parser(
        "analyze",
        parents=[common],
        help="detect revivals in a stored spectrum",
    )
    analyze.set_defaults(handler=_analyze)
    verify = commands.add_parser(
        "verify-bounds",
        parents=[common],
        help="check every enabled bound and write the report",
    )
    verify.add_argument(
        "--spectrum-only",
        action="store_true",
        help="skip the checks that need eigenstates",
    )
    verify.set_defaults(handler=_verify)
    compare = commands.add_parser(
        "oracle-compare",
        parents=[common],
        help="compare the spin-1 XY tower with its closed forms",
    )
    compare.set_defaults(handler=_oracle)
    imported = commands.add_parser(
        "import-spectrum",
        parents=[common],
        help="validate a spectrum file and store it under the output stem",
    )
    imported.add_argument("path", help="spectrum file to read")
    imported.set_defaults(handler=_import)
    export = commands.add_parser(
        "export", parents=[common], help="print or copy a stored artifact"
    )
    export.add_argument(
        "kind",
        choices=[kind.name for kind in _storage.ArtifactKind],
        help="artifact to export",
    )
    export.add_argument(
        "--stem", default=None, help="experiment stem; the output stem"
    )
    export.add_argument(
        "--to", dest="destination", default=None, help="file to write"
    )
    export.set_defaults(handler=_export)
    return parser


def _configure_logging(args: argparse.Namespace) -> None:
    level = logging.INFO if args.verbose else logging.WARNING
    if args.quiet:
        level = logging.ERROR
    logging.basicConfig(
        level=level, format="%(levelname)s %(name)s: %(message)s"
    )


def load_config(args: argparse.Namespace) -> _config.ExperimentConfig:
    """The configuration file, if any, with command line overrides."""
    if args.config is None:
        cfg = _config.ExperimentConfig()
    else:
        cfg = _config.ExperimentConfig.load(args.config)
    return cfg.with_overrides(_config.overrides_from(args))


def main(argv: typing.Optional[typing.Sequence[str]] = None) -> int:
    """Run one subcommand and return its exit status.

    0 means every check passed or was vacuous, 1 that a bound was violated
    and 2 that the input could not be used.
    """
    args = build_parser().parse_args(argv)
    _configure_logging(args)
    handler = typing.cast(Handler, args.handler)
    try:
        return handler(load_config(args), args)
    except exceptions.RevivalKitError as exc:
        logger.error("%s", exc)
        print(f"revivalkit: {exc}", file=sys.stderr)
        return EXIT_INVALID
