"""Allow ``python -m revivalkit``."""
import os
import sys
import typing

#: BLAS thread variables set from ``REVIVALKIT_THREADS``
THREAD_VARIABLES = (
    "OMP_NUM_THREADS",
    "OPENBLAS_NUM_THREADS",
    "MKL_NUM_THREADS",
)


def export_threads(environ: typing.MutableMapping[str, str]) -> None:
    """Copy the thread count to the BLAS variables if it is set."""
    threads = environ.get("REVIVALKIT_THREADS")
    if threads:
        for variable in THREAD_VARIABLES:
            environ[variable] = threads


def main() -> int:
    """Set the thread count before numpy loads, then run the CLI."""
    export_threads(os.environ)
    from revivalkit import cli

    return cli.main()


if __name__ == "__main__":
    sys.exit(main())
