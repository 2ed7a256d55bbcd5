"""Command line front end.

Subcommands: weights, wce, search, fib, conjecture and plotdata. Exit codes
are 0 on success, 2 for invalid input and 3 when two independent evaluations
of the same quantity disagree.
"""

from __future__ import annotations

import argparse
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable, Optional, Sequence

import pandas as pd
from pydantic import ValidationError

from .config import (
    JOBS_ENV,
    RunConfig,
    KorobovConvention,
    Scheme,
    closed_form_rtol,
    configure_logging,
    decomposition_rtol,
    fibonacci_halves_rtol,
    resolve_jobs,
)
from .errors import DomainError, InputError, NumericalConsistencyError
from .formats import (
    BREAKDOWN_COLUMNS,
    CLOSED_FORM_COLUMNS,
    CONJECTURE_COLUMNS,
    FIBONACCI_COLUMNS,
    write_frame,
    write_text,
)
from .kernels import Kernel, ProductWeights
from .numtheory import is_prime, require_prime
from .rules import LatticeRule, build_rule
from .search import fibonacci_lattice, fibonacci_rule, plot_frame, reproduce_table, table_frame
from .wce import (
    WceBreakdown,
    check_closed_form_size,
    check_conjecture,
    conjecture_deviations,
    korobov_scale,
    mixture_bounds_s2,
    mixture_term_s2,
    wce_decomposition,
    wce_generic,
    wce_korobov_lattice,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INCONSISTENT = 3

# conjecture deviations are flagged above this multiple of N
conjecture_tolerance = 1e-10


def parse_int_list(text: str) -> tuple[list[int], bool]:
    """Parse ``a,b,c`` or ``a..b``; the flag tells whether a range was given."""
    text = text.strip()
    try:
        if ".." in text:
            lo, hi = (int(part) for part in text.split("..", 1))
            if hi < lo:
                raise InputError(f"empty range {text!r}")
            return list(range(lo, hi + 1)), True
        return [int(part) for part in text.split(",") if part.strip()], False
    except ValueError as exc:
        raise InputError(f"cannot read integer list {text!r}") from exc


def parse_float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise InputError(f"cannot read weights {text!r}") from exc


def expand_primes(text: str) -> list[int]:
    """Prime moduli from a list or range; ranges keep only their primes."""
    values, is_range = parse_int_list(text)
    if is_range:
        return [N for N in values if N >= 3 and is_prime(N)]
    for N in values:
        if N < 3:
            raise DomainError(f"N = {N} must be an odd prime")
        require_prime(N)
    return values


def expand_moduli(text: str) -> list[int]:
    values, is_range = parse_int_list(text)
    if is_range:
        return [N for N in values if N >= 3]
    for N in values:
        if N < 3:
            raise DomainError(f"N = {N} must be at least 3")
    return values


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG")
    common.add_argument("--output", type=Path, default=None, help="write to this file instead of stdout")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--jobs", type=int, default=None, help=f"worker threads ({JOBS_ENV} wins when set)")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = argparse.ArgumentParser(
        prog="vmlattice",
        description="Vertex modified rank-1 lattice rules: weights, worst-case errors and generator search.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    weights = commands.add_parser("weights", parents=[common], help="corner weights of a vertex modified rule")
    wce = commands.add_parser("wce", parents=[common], help="worst-case error breakdown of one rule")
    for sub in (weights, wce):
        sub.add_argument("--N", required=True, type=int)
        sub.add_argument("--z", required=True, help="generating vector, e.g. 1,8")
        sub.add_argument("--s", type=int, default=None)
        sub.add_argument("--scheme", choices=[s.value for s in Scheme], default=Scheme.optimal.value)
    wce.add_argument("--gamma", default="1", help="product weights, one value or one per dimension")

    search = commands.add_parser("search", parents=[common], help="best generator (1, z) for prime N")
    search.add_argument("--N", required=True, help="primes as a,b,c or a range a..b")
    search.add_argument("--gamma", default="1")
    search.add_argument("--full", action="store_true", help="emit every generator, not only the best")

    fib = commands.add_parser("fib", parents=[common], help="optimal rules on Fibonacci lattices")
    fib.add_argument("--k", required=True, help="indices as a,b,c or a range a..b")
    fib.add_argument("--gamma", default="1")

    conjecture = commands.add_parser("conjecture", parents=[common], help="compare the double sums for z and z^-1")
    conjecture.add_argument("--N", required=True)
    conjecture.add_argument("--z", type=int, default=None, help="check a single generator")

    plot = commands.add_parser("plotdata", parents=[common], help="optimal errors next to reference rates")
    plot.add_argument("--N", required=True)
    plot.add_argument("--gamma", default="1")
    return parser


def _run_config(args: argparse.Namespace) -> RunConfig:
    settings = {
        "command": args.command,
        "output": args.output,
        "format": args.format,
        "jobs": resolve_jobs(args.jobs),
    }
    if hasattr(args, "gamma"):
        settings["gamma"] = parse_float_list(args.gamma)
    if args.command in ("weights", "wce"):
        z, _ = parse_int_list(args.z)
        settings.update(N=(args.N,), z=tuple(z), s=args.s, scheme=args.scheme)
    elif args.command in ("search", "plotdata"):
        settings.update(N=tuple(expand_primes(args.N)), full=getattr(args, "full", False))
    elif args.command == "conjecture":
        settings.update(N=tuple(expand_moduli(args.N)), z=None if args.z is None else (args.z,))
    elif args.command == "fib":
        settings["k"] = tuple(parse_int_list(args.k)[0])
    return RunConfig(**settings)


def _lattice(config: RunConfig) -> LatticeRule:
    return LatticeRule(z=config.z, N=config.N[0])


def _gamma(config: RunConfig, s: int = 2) -> ProductWeights:
    return ProductWeights.broadcast(config.gamma_vector(s), s)


def _fan_out(config: RunConfig, task: Callable, items: Sequence) -> list:
    with ThreadPoolExecutor(max_workers=config.jobs) as executor:
        return list(executor.map(task, items))


def cmd_weights(config: RunConfig) -> int:
    rule = _lattice(config)
    if config.scheme is Scheme.plain:
        raise InputError("the plain scheme has no vertex weights; use trapezoidal or optimal")
    weighted = build_rule(rule, config.scheme)
    if config.format == "json":
        write_text(weighted.to_json() + "\n", config.output)
        return EXIT_OK
    rows = [
        {**{f"a{j + 1}": bit for j, bit in enumerate(a)}, "w": w}
        for a, w in weighted.vertex_weights.items()
    ]
    write_frame(pd.DataFrame(rows), config.output, config.format)
    return EXIT_OK


def _breakdown_row(breakdown: WceBreakdown) -> dict:
    return {**breakdown.model_dump(), "wce": breakdown.wce}


def cmd_wce(config: RunConfig) -> int:
    rule = _lattice(config)
    gamma = _gamma(config, rule.s)
    weighted = build_rule(rule, config.scheme)
    breakdown = wce_decomposition(weighted, gamma)
    oracle = wce_generic(weighted, Kernel.usobolev1, gamma) ** 2
    if not math.isclose(breakdown.sq_total, oracle, rel_tol=decomposition_rtol, abs_tol=1e-15):
        raise NumericalConsistencyError(
            f"decomposition total {breakdown.sq_total!r} differs from the kernel oracle {oracle!r}"
        )
    row = _breakdown_row(breakdown)
    columns = list(BREAKDOWN_COLUMNS)
    if rule.s == 2 and config.scheme is Scheme.optimal:
        pair = mixture_term_s2(rule, gamma)
        lower, upper = mixture_bounds_s2(rule, gamma)
        closed = breakdown.sq_korobov + pair.total
        sq_korobov_table = wce_korobov_lattice(rule, gamma.scaled(korobov_scale(KorobovConvention.table))) ** 2
        agrees = math.isclose(closed, breakdown.sq_total, rel_tol=closed_form_rtol) and lower < pair.total < upper
        if not agrees:
            logger.warning("closed form %.6e disagrees with the decomposition %.6e", closed, breakdown.sq_total)
        row.update(
            closed_form_mixture=pair.total,
            mixture_lower=lower,
            mixture_upper=upper,
            closed_form_agrees=agrees,
            sq_korobov_table=sq_korobov_table,
            sq_total_table=sq_korobov_table + pair.total,
        )
        columns += CLOSED_FORM_COLUMNS
    write_frame(pd.DataFrame([row], columns=columns), config.output, config.format)
    return EXIT_OK


def cmd_search(config: RunConfig) -> int:
    if not config.N:
        raise InputError("no prime N to search")
    results = reproduce_table(config.N, _gamma(config), jobs=config.jobs, full=config.full)
    write_frame(table_frame(results, full=config.full), config.output, config.format)
    return EXIT_OK


def cmd_fib(config: RunConfig) -> int:
    if not config.k:
        raise InputError("no Fibonacci index given")
    gamma = _gamma(config)
    for k in config.k:
        check_closed_form_size(fibonacci_lattice(k).N)

    def evaluate(k: int) -> dict:
        rule = fibonacci_lattice(k)
        breakdown = fibonacci_rule(k, gamma)
        pair = mixture_term_s2(rule, gamma)
        return {
            "k": k,
            "N": rule.N,
            "z": rule.z[1],
            **_breakdown_row(breakdown),
            "halves_equal": math.isclose(pair.term_w1, pair.term_w2, rel_tol=fibonacci_halves_rtol),
        }

    rows = _fan_out(config, evaluate, config.k)
    write_frame(pd.DataFrame(rows, columns=FIBONACCI_COLUMNS), config.output, config.format)
    return EXIT_OK


def cmd_conjecture(config: RunConfig) -> int:
    if not config.N:
        raise InputError("no N to check")
    def sweep(N: int) -> dict:
        if config.z is not None:
            deviation, count = check_conjecture(config.z[0], N), 1
        else:
            deviations = conjecture_deviations(N)
            deviation, count = float(deviations.max()), len(deviations)
        tolerance = conjecture_tolerance * N
        return {
            "N": N,
            "generators": count,
            "max_deviation": deviation,
            "tolerance": tolerance,
            "passed": deviation < tolerance,
        }

    rows = _fan_out(config, sweep, config.N)
    failed = [row["N"] for row in rows if not row["passed"]]
    if failed:
        logger.warning("double sums differ beyond tolerance for N in %s", failed)
    write_frame(pd.DataFrame(rows, columns=CONJECTURE_COLUMNS), config.output, config.format)
    return EXIT_OK


def cmd_plotdata(config: RunConfig) -> int:
    if not config.N:
        raise InputError("no prime N in the requested list")
    results = reproduce_table(config.N, _gamma(config), jobs=config.jobs)
    write_frame(plot_frame(results), config.output, config.format)
    return EXIT_OK


COMMANDS: dict[str, Callable[[RunConfig], int]] = {
    "weights": cmd_weights,
    "wce": cmd_wce,
    "search": cmd_search,
    "fib": cmd_fib,
    "conjecture": cmd_conjecture,
    "plotdata": cmd_plotdata,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_INPUT
    configure_logging(args.verbose)
    try:
        config = _run_config(args)
        logger.info("running %s with %s", config.command, config.model_dump(exclude={"command"}))
        return COMMANDS[config.command](config)
    except (InputError, ValidationError) as exc:
        logger.error("%s", exc)
        return EXIT_INPUT
    except NumericalConsistencyError as exc:
        logger.error("numerical consistency check failed: %s", exc)
        return EXIT_INCONSISTENT
