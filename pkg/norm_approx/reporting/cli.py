"""Command-line front end.

Tables and curves go to stdout as CSV, the coverage summary and fitted
parameters as JSON; diagnostics go to stderr through `logging`.

Exit codes: 0 on success, 1 when a validation check fails, 2 on usage
errors (including arguments outside the domain of an operation).
"""
import argparse
import json
import logging
import sys
from typing import IO, List, Optional, Sequence

from norm_approx.core.datastructures import family_names
from norm_approx.core.datastructures.params import NormFamily
from norm_approx.core.errors import NormApproxError
from norm_approx.reporting.tables import (
    RunSettings,
    coverage_report,
    evaluate_vector,
    fit_report,
    mre_curve,
    opcount_checks,
    table3,
    table4,
    write_csv,
    write_opcounts,
)

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_USAGE = 2

_log = logging.getLogger(__name__)


class UsageError(Exception):
    """Raised for arguments the parser accepted but the command cannot."""


def parse_schedule(text: str) -> List[int]:
    """Parses a schedule such as ``2^16..2^24``, ``2^16,2^18`` or
    ``65536,131072``.

    A range ``2^a..2^b`` expands to every power of two in between.
    """

    def size(token: str) -> int:
        token = token.strip()
        if token.startswith("2^"):
            return 1 << int(token[2:])
        return int(token)

    out: List[int] = []
    for part in text.split(","):
        if ".." in part:
            lo, hi = (s.strip() for s in part.split(".."))
            if not (lo.startswith("2^") and hi.startswith("2^")):
                raise argparse.ArgumentTypeError(
                    f"ranges must be powers of two: {part!r}"
                )
            a, b = int(lo[2:]), int(hi[2:])
            out.extend(1 << k for k in range(a, b + 1))
        else:
            out.append(size(part))
    return out


def _schedule_arg(text: str) -> List[int]:
    try:
        return parse_schedule(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"invalid schedule {text!r}") from e


def _size_arg(text: str) -> int:
    sizes = _schedule_arg(text)
    if len(sizes) != 1:
        raise argparse.ArgumentTypeError(f"expected one size, got {text!r}")
    return sizes[0]


def _family_arg(text: str) -> NormFamily:
    try:
        return NormFamily.parse(text)
    except KeyError as e:
        choices = ", ".join(sorted(family_names.family_aliases))
        raise argparse.ArgumentTypeError(
            f"unknown family {text!r}; choose from {choices}"
        ) from e


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="norm-approx",
        description="Euclidean norm approximations and their errors.",
    )
    parser.add_argument("--seed", type=int, help="root random seed")
    parser.add_argument(
        "--threads", type=int, help="worker threads (default 1)"
    )
    parser.add_argument(
        "--full-precision",
        action="store_true",
        default=None,
        help="print 17 significant digits",
    )
    parser.add_argument("--config", help="YAML file with run settings")
    parser.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=0,
        help="log progress to stderr (twice for debug output)",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("eval", help="evaluate one approximation")
    p.add_argument("--family", type=_family_arg, required=True)
    p.add_argument("values", type=float, nargs="+")

    p = commands.add_parser("fit-ab", help="fit (a, b) for a D_inf + b D_1")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--fit-samples", type=int)

    p = commands.add_parser("table3", help="errors of the minimax families")
    p.add_argument("--schedule", type=_schedule_arg)
    p.add_argument("--tol", type=float)
    p.add_argument(
        "--check-from",
        type=_size_arg,
        help="smallest sample size that may count as converged",
    )
    p.add_argument("--nmin", type=int, default=2)
    p.add_argument("--nmax", type=int, default=10)

    p = commands.add_parser(
        "table4", help="least-squares family, fixed budget vs converged"
    )
    p.add_argument("--schedule", type=_schedule_arg)
    p.add_argument("--tol", type=float)
    p.add_argument("--fit-samples", type=int)
    p.add_argument("--check-from", type=_size_arg)
    p.add_argument("--budget", type=int, dest="fixed_budget")
    p.add_argument("--raw-gaussian", action="store_true")
    p.add_argument("--nmin", type=int, default=2)
    p.add_argument("--nmax", type=int, default=10)

    p = commands.add_parser("mre-curve", help="analytic MRE versus n")
    p.add_argument("--nmax", type=int, default=100)

    p = commands.add_parser("coverage", help="sphere covering estimates")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--budget", type=int, default=100_000)

    p = commands.add_parser("opcounts", help="check the operation counts")
    p.add_argument("--n", type=int, required=True)
    return parser


def _settings(args: argparse.Namespace) -> RunSettings:
    settings = RunSettings()
    if args.config:
        with open(args.config) as f:
            settings = RunSettings.from_yaml(f.read())
    return settings.replace(
        seed=args.seed,
        threads=args.threads,
        full_precision=args.full_precision,
        schedule=getattr(args, "schedule", None),
        tol=getattr(args, "tol", None),
        fit_samples=getattr(args, "fit_samples", None),
        fixed_budget=getattr(args, "fixed_budget", None),
        check_from=getattr(args, "check_from", None),
    )


def _dimensions(args: argparse.Namespace) -> range:
    if args.nmin < 2 or args.nmax < args.nmin:
        raise UsageError(f"invalid dimension range {args.nmin}..{args.nmax}")
    return range(args.nmin, args.nmax + 1)


def _print_json(data: object, out: IO[str]) -> None:
    json.dump(data, out, indent=2)
    out.write("\n")


def run(args: argparse.Namespace, out: IO[str]) -> int:
    settings = _settings(args)
    if settings.threads < 1:
        raise UsageError("--threads must be at least 1")
    command = args.command
    if command == "eval":
        result = evaluate_vector(args.values, args.family, settings)
        for key, value in result.items():
            out.write(f"{key} {'' if value is None else repr(value)}\n")
    elif command == "fit-ab":
        _print_json(fit_report(args.n, settings), out)
    elif command == "table3":
        write_csv(
            table3(settings, _dimensions(args)), out, settings.full_precision
        )
    elif command == "table4":
        rows = table4(settings, _dimensions(args), args.raw_gaussian)
        write_csv(rows, out, settings.full_precision)
    elif command == "mre-curve":
        if args.nmax < 2:
            raise UsageError("--nmax must be at least 2")
        write_csv(mre_curve(args.nmax), out, settings.full_precision)
    elif command == "coverage":
        _print_json(coverage_report(args.n, args.epsilon, args.budget), out)
    else:
        assert command == "opcounts"
        if args.n < 2:
            raise UsageError("--n must be at least 2")
        checks = opcount_checks(args.n, settings.seed)
        write_opcounts(checks, out)
        failed = [c for c in checks if not c.matches]
        for check in failed:
            _log.error(
                "%s: counted %s, expected %s",
                check.norm,
                check.counted.as_tuple(),
                check.expected.as_tuple(),
            )
        if failed:
            return EXIT_MISMATCH
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = {0: logging.WARNING, 1: logging.INFO}.get(
        args.verbose, logging.DEBUG
    )
    logging.basicConfig(
        stream=sys.stderr,
        level=level,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return run(args, sys.stdout)
    except (UsageError, NormApproxError, KeyError, ValueError, OSError) as e:
        # domain errors raised by the library stem from flag or config
        # values
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"{parser.prog}: error: {e}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
