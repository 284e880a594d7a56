"""Text formats for spectra, time series, tables and model descriptions.

Spectrum files start with ``# key: value`` header lines followed by one
``E_j w_j`` row per distinct energy, both written with 17 significant
digits so a file read back reproduces the distribution bit for bit. Every
parse error names the 1-based line it was found on.
"""
import io
import json
import logging
import re
import typing

import attr
import numpy as np

from revivalkit import _common_types as _ct
from revivalkit import dynamics
from revivalkit import exceptions
from revivalkit import operators
from revivalkit import spectrum

logger = logging.getLogger(__name__)

#: Version written into the header of spectrum files
SPECTRUM_FORMAT = "1"
#: ``printf`` format keeping every bit of a double
FLOAT_FORMAT = "%.17g"

SURVIVAL_COLUMNS = ("t", "re_f", "im_f", "F", "alpha")
PEAK_COLUMNS = ("l", "center", "p", "counted")
SCHMIDT_COLUMNS = ("k", "lambda")


@attr.s(frozen=True)
class Grammar:
    """Container of regular expressions both raw and compiled for parsing."""

    digit = "0-9"
    sign = "[-+]?"
    mantissa = f"(?:[{digit}]+(?:\\.[{digit}]*)?|\\.[{digit}]+)"
    exponent = f"(?:[eE]{sign}[{digit}]+)"
    number = f"{sign}(?:{mantissa}{exponent}?|inf|nan)"
    separator = "(?:\\s*,\\s*|\\s+)"

    key = "[A-Za-z_][A-Za-z0-9_]*"
    header_line = f"#\\s*(?P<key>{key})\\s*:\\s*(?P<value>.*?)\\s*"
    comment_line = "#.*"
    spectrum_row = (
        f"\\s*(?P<energy>{number}){separator}(?P<weight>{number})\\s*"
    )
    number_row = f"\\s*{number}(?:{separator}{number})*\\s*"
    site_list = f"[{digit}]+(?:\\s+[{digit}]+)*"
    term_line = f"\\s*term\\s+(?P<support>{site_list})\\s*"

    # Pre-compiled version of the above grammar
    number_re = re.compile(number)
    header_line_re = re.compile(header_line)
    comment_line_re = re.compile(comment_line)
    spectrum_row_re = re.compile(spectrum_row)
    number_row_re = re.compile(number_row)
    term_line_re = re.compile(term_line)


def _lines(text: str) -> typing.Iterator[typing.Tuple[int, str]]:
    """Yield non-blank lines with their 1-based number."""
    for row, line in enumerate(text.splitlines(), start=1):
        if line.strip():
            yield row, line


def _numbers(line: str, row: int) -> typing.List[float]:
    if not Grammar.number_row_re.fullmatch(line):
        raise exceptions.ParsingError(f"malformed numeric row {line!r}", row)
    return [float(v) for v in Grammar.number_re.findall(line)]


def dump_spectrum(dist: spectrum.EnergyDistribution) -> str:
    """Render a distribution as a spectrum file."""
    header = {
        "revivalkit_spectrum": SPECTRUM_FORMAT,
        "N": str(dist.site_count),
        "h": FLOAT_FORMAT % dist.term_bound,
        "shift": FLOAT_FORMAT % dist.shift,
        "spectral_width": FLOAT_FORMAT % dist.spectral_width,
        "weight_cut": FLOAT_FORMAT % dist.weight_cut,
        "discarded": FLOAT_FORMAT % dist.discarded,
        "convention": "f(t) = sum_j w_j exp(-i E_j t), ground energy 0",
    }
    lines = [f"# {key}: {value}" for key, value in header.items()]
    lines.extend(
        f"{FLOAT_FORMAT % e} {FLOAT_FORMAT % w}"
        for e, w in zip(dist.energies, dist.weights)
    )
    return "\n".join(lines) + "\n"


def _header_float(
    header: typing.Mapping[str, typing.Tuple[str, int]],
    key: str,
    default: typing.Optional[float],
) -> typing.Optional[float]:
    if key not in header:
        return default
    value, row = header[key]
    try:
        return float(value)
    except ValueError:
        raise exceptions.ParsingError(
            f"header {key!r} is not a number: {value!r}", row
        ) from None


def load_spectrum(text: str) -> spectrum.EnergyDistribution:
    """Parse a spectrum file.

    Weights must lie in (0, 1] and energies must increase strictly from row
    to row. A file whose weights do not add up to one (with the discarded
    weight from the header) is rejected by the distribution itself.
    """
    header: typing.Dict[str, typing.Tuple[str, int]] = {}
    energies: typing.List[float] = []
    weights: typing.List[float] = []
    for row, line in _lines(text):
        match = Grammar.header_line_re.fullmatch(line)
        if match:
            header[match.group("key")] = (match.group("value"), row)
            continue
        if Grammar.comment_line_re.fullmatch(line):
            continue
        match = Grammar.spectrum_row_re.fullmatch(line)
        if not match:
            raise exceptions.ParsingError(
                f"expected 'energy weight', got {line!r}", row
            )
        energy = float(match.group("energy"))
        weight = float(match.group("weight"))
        if not np.isfinite(energy):
            raise exceptions.ParsingError(
                f"energy {energy!r} is not finite", row
            )
        if weight < 0:
            raise exceptions.ParsingError(f"negative weight {weight!r}", row)
        if not 0 < weight <= 1:
            raise exceptions.ParsingError(
                f"weight {weight!r} outside (0, 1]", row
            )
        if energies and energy <= energies[-1]:
            raise exceptions.ParsingError(
                f"energy {energy!r} does not exceed {energies[-1]!r}", row
            )
        energies.append(energy)
        weights.append(weight)
    if not energies:
        raise exceptions.ParsingError("the spectrum file holds no rows")

    if "N" not in header:
        raise exceptions.ParsingError("the header does not give N")
    site_count = _header_float(header, "N", None)
    if site_count is None or site_count < 1 or site_count != int(site_count):
        raise exceptions.ParsingError(
            f"N must be a positive integer, got {site_count!r}",
            header.get("N", ("", 0))[1],
        )
    dist = spectrum.EnergyDistribution.from_weights(
        energies,
        weights,
        site_count=int(site_count),
        term_bound=_header_float(header, "h", None),
        weight_cut=_header_float(header, "weight_cut", 0.0),
        discarded=_header_float(header, "discarded", 0.0),
        shift=_header_float(header, "shift", 0.0),
        spectral_width=_header_float(header, "spectral_width", None),
    )
    logger.debug("read a spectrum of %d levels", dist.size)
    return dist


def _table(columns: typing.Sequence[str], rows: _ct.ArrayLike) -> str:
    buffer = io.StringIO()
    np.savetxt(
        buffer,
        np.atleast_2d(np.asarray(rows, dtype=float)),
        fmt=FLOAT_FORMAT,
        delimiter=",",
        header=",".join(columns),
        comments="",
    )
    return buffer.getvalue()


def _read_table(
    text: str, columns: typing.Sequence[str]
) -> _ct.RealArray:
    lines = list(_lines(text))
    if not lines:
        raise exceptions.ParsingError("the table is empty")
    row, head = lines[0]
    found = tuple(name.strip() for name in head.split(","))
    if found != tuple(columns):
        raise exceptions.ParsingError(
            f"expected columns {','.join(columns)}, got {head!r}", row
        )
    values = []
    for row, line in lines[1:]:
        numbers = _numbers(line, row)
        if len(numbers) != len(columns):
            raise exceptions.ParsingError(
                f"expected {len(columns)} values, got {len(numbers)}", row
            )
        values.append(numbers)
    return typing.cast(
        _ct.RealArray,
        np.array(values, dtype=float).reshape(-1, len(columns)),
    )


def dump_survival(series: dynamics.SurvivalSeries) -> str:
    """Render ``(t, Re f, Im f, F, alpha)`` as CSV."""
    return _table(SURVIVAL_COLUMNS, series.rows())


def load_survival(text: str) -> dynamics.SurvivalSeries:
    """Read a survival CSV back into a series."""
    table = _read_table(text, SURVIVAL_COLUMNS)
    t, re_f, im_f, F, alpha = table.T
    return dynamics.SurvivalSeries(t, re_f + 1j * im_f, F, alpha)


def dump_peaks(rows: _ct.ArrayLike) -> str:
    """Render the ``(l, center, p, counted)`` peak table as CSV."""
    return _table(PEAK_COLUMNS, rows)


def dump_schmidt(values: _ct.ArrayLike) -> str:
    """Render squared Schmidt values as ``(k, lambda)`` CSV."""
    values = np.asarray(values, dtype=float)
    return _table(
        SCHMIDT_COLUMNS, np.column_stack([np.arange(values.size), values])
    )


def load_schmidt(text: str) -> _ct.RealArray:
    """Read the squared Schmidt values of a ``(k, lambda)`` CSV."""
    return typing.cast(
        _ct.RealArray, _read_table(text, SCHMIDT_COLUMNS)[:, 1]
    )


def dump_json(payload: typing.Mapping[str, typing.Any]) -> str:
    """Render a report with sorted keys so reruns compare equal."""
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def load_amplitudes(text: str) -> _ct.ComplexArray:
    """Parse one ``re im`` pair per basis state, in lattice order."""
    amplitudes = []
    for row, line in _lines(text):
        if Grammar.comment_line_re.fullmatch(line):
            continue
        numbers = _numbers(line, row)
        if len(numbers) != 2:
            raise exceptions.ParsingError(
                f"expected 're im', got {len(numbers)} values", row
            )
        amplitudes.append(complex(numbers[0], numbers[1]))
    if not amplitudes:
        raise exceptions.ParsingError("the amplitude file holds no rows")
    return typing.cast(
        _ct.ComplexArray, np.array(amplitudes, dtype=complex)
    )


def dump_amplitudes(amplitudes: _ct.ArrayLike) -> str:
    """Render amplitudes as ``re im`` rows."""
    values = np.asarray(amplitudes, dtype=complex)
    return "".join(
        f"{FLOAT_FORMAT % a.real} {FLOAT_FORMAT % a.imag}\n" for a in values
    )


def _finish_term(
    support: typing.Tuple[int, ...],
    rows: typing.List[typing.List[complex]],
    row: int,
) -> operators.LocalTerm:
    size = len(rows)
    if any(len(r) != size for r in rows):
        raise exceptions.ParsingError(
            f"the matrix of term {support} is not square", row
        )
    try:
        return operators.LocalTerm(support, np.array(rows, dtype=complex))
    except exceptions.ModelError as exc:
        raise exceptions.ParsingError(str(exc), row) from exc


def load_terms(text: str) -> typing.List[operators.LocalTerm]:
    """Parse an explicit list of local terms.

    Each term opens with ``term i j ...`` naming its support, followed by
    the rows of its matrix; a row lists ``re im`` pairs left to right, so a
    ``d**k`` matrix has ``2 d**k`` numbers per row. The first support site
    is the most significant tensor factor and the local basis is ordered
    ``|+1>, |0>, |-1>`` for spin 1.
    """
    terms: typing.List[operators.LocalTerm] = []
    support: typing.Optional[typing.Tuple[int, ...]] = None
    rows: typing.List[typing.List[complex]] = []
    opened = 0
    for row, line in _lines(text):
        if Grammar.comment_line_re.fullmatch(line.strip()):
            continue
        match = Grammar.term_line_re.fullmatch(line)
        if match:
            if support is not None:
                terms.append(_finish_term(support, rows, opened))
            support = tuple(int(s) for s in match.group("support").split())
            rows = []
            opened = row
            continue
        if support is None:
            raise exceptions.ParsingError(
                "matrix row before any 'term' line", row
            )
        numbers = _numbers(line, row)
        if len(numbers) % 2:
            raise exceptions.ParsingError(
                "a matrix row needs complex pairs 're im'", row
            )
        rows.append(
            [complex(r, i) for r, i in zip(numbers[::2], numbers[1::2])]
        )
    if support is not None:
        terms.append(_finish_term(support, rows, opened))
    logger.debug("read %d local terms", len(terms))
    return terms


def dump_terms(terms: typing.Iterable[operators.LocalTerm]) -> str:
    """Render local terms in the format read by :func:`load_terms`."""
    lines = []
    for term in terms:
        lines.append("term " + " ".join(str(s) for s in term.support))
        for matrix_row in term.matrix:
            lines.append(
                " ".join(
                    f"{FLOAT_FORMAT % v.real} {FLOAT_FORMAT % v.imag}"
                    for v in matrix_row
                )
            )
    return "\n".join(lines) + "\n"
