"""Exit statuses and output of the command line."""
import math

import pytest

from revivalkit import __main__
from revivalkit import __version__
from revivalkit import cli


@pytest.fixture
def flags(tmp_path):
    """Four periodic sites with results under ``tmp_path``."""
    return [
        "--output-directory",
        str(tmp_path),
        "--lattice-extents",
        "4",
        "--analysis-tau",
        repr(math.pi),
    ]


def test_version(capsys):
    """``--version`` prints the package version."""
    with pytest.raises(SystemExit) as exc:
        cli.main(["--version"])
    assert exc.value.code == 0
    assert __version__ in capsys.readouterr().out


def test_subcommand_is_required():
    """Running without a subcommand is a usage error."""
    with pytest.raises(SystemExit) as exc:
        cli.main([])
    assert exc.value.code == 2


def test_simulate_and_analyze(flags, tmp_path, capsys):
    """Both stages succeed on the four-site tower."""
    assert cli.main(["simulate", *flags]) == 0
    out = capsys.readouterr().out
    assert "experiment.spectrum.txt" in out
    assert (tmp_path / "experiment.survival.csv").is_file()
    assert cli.main(["analyze", *flags]) == 0
    assert '"N_c_delta"' in capsys.readouterr().out
    assert (tmp_path / "experiment.revival.report.json").is_file()


def test_verify_spectrum_only(flags, capsys):
    """Every line names a check and a verdict."""
    assert cli.main(["simulate", *flags]) == 0
    capsys.readouterr()
    assert cli.main(["verify-bounds", "--spectrum-only", *flags]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].split()[0] == "peak_weight"
    assert all(line.split()[1] in {"PASS", "VACUOUS"} for line in lines)


def test_bound_violation_exits_one(flags):
    """A peak-count bound without its constant overshoots the ladder."""
    assert cli.main(["simulate", *flags]) == 0
    conditional = [
        "--analysis-constants",
        "conditional",
        "--analysis-K-assumed",
        "0",
        "--analysis-K-prime",
        "0",
        "--analysis-delta",
        "0.01",
    ]
    assert cli.main(["analyze", *flags, *conditional]) == 1


def test_missing_spectrum_exits_two(flags, capsys):
    """Analyzing before simulating is an input error."""
    assert cli.main(["analyze", *flags]) == 2
    err = capsys.readouterr().err
    assert any(line.startswith("revivalkit: ") for line in err.splitlines())


def test_invalid_override_exits_two(flags):
    """Out-of-range configuration values are input errors."""
    assert cli.main(["simulate", *flags, "--analysis-threshold", "2"]) == 2


def test_config_file(tmp_path):
    """A YAML file configures the run and flags override it."""
    path = tmp_path / "xy.yaml"
    path.write_text(
        "lattice:\n  extents: [4]\n  periodic: [false]\n"
        f"output:\n  directory: {tmp_path}\n  stem: chain\n"
    )
    argv = ["simulate", "--config", str(path), "--output-stem", "open4"]
    assert cli.main(argv) == 0
    assert (tmp_path / "open4.spectrum.txt").is_file()
    assert not (tmp_path / "chain.spectrum.txt").exists()


def test_import_and_export(flags, tmp_path, capsys):
    """A file imported under the output stem can be exported again."""
    source = tmp_path / "two.txt"
    source.write_text("# N: 1\n0 0.5\n2 0.5\n")
    assert cli.main(["import-spectrum", str(source), *flags]) == 0
    assert capsys.readouterr().out.startswith("2 levels, N=1")
    assert cli.main(["export", "spectrum", *flags]) == 0
    printed = capsys.readouterr().out
    assert printed.startswith("# revivalkit_spectrum: 1")
    target = tmp_path / "copy.txt"
    argv = ["export", "spectrum", "--to", str(target), *flags]
    assert cli.main(argv) == 0
    assert target.read_text() == printed


def test_oracle_compare(flags, capsys):
    """The comparison table starts with the mean energy."""
    assert cli.main(["oracle-compare", *flags]) == 0
    assert capsys.readouterr().out.startswith("mean")


def test_thread_count_is_exported():
    """``REVIVALKIT_THREADS`` sets every BLAS variable."""
    environ = {"REVIVALKIT_THREADS": "2"}
    __main__.export_threads(environ)
    for variable in __main__.THREAD_VARIABLES:
        assert environ[variable] == "2"
    untouched = {}
    __main__.export_threads(untouched)
    assert untouched == {}
