"""The ``plots`` command line: CSV exports in, PNG figures out.

Exit codes match the engine's convention: 0 success, 1 usage error,
2 malformed input data, 3 I/O error.
"""

import argparse
import sys

from .csvdata import EmptyCsv, MissingColumn
from .render import PlotJob, render_all

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_IO = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="plots", description=__doc__)
    parser.add_argument("--metrics", required=True, help="path to metrics.csv")
    parser.add_argument("--coverage", required=True, help="path to coverage.csv")
    parser.add_argument("--out", required=True, help="directory for the PNG files")
    parser.add_argument("--window", type=int, default=50,
                        help="moving-average window (default 50)")
    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        job = PlotJob(
            metrics_path=args.metrics,
            coverage_path=args.coverage,
            out_dir=args.out,
            window=args.window,
        )
        for path in render_all(job):
            print(f"wrote {path}")
        return EXIT_OK
    except _UsageError as exc:
        print(f"plots: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        if isinstance(exc, (MissingColumn, EmptyCsv)):
            print(f"plots: bad input data: {exc}", file=sys.stderr)
            return EXIT_PARSE
        print(f"plots: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"plots: i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
