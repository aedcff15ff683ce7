"""Command line interface

Usage::

    chebsl solve --problem my_problem.txt --n 64 --count 10
    chebsl example --example 2 --d 10 --count 30
    chebsl table 4
    chebsl eigenfunction --example 3 --index 1 --samples 101

All commands write CSV to standard output or ``--out``. Exit status is 0 on
success, 2 when a requested eigenvalue is missing or not converged (rows are
still written) and 1 on errors.

"""

from __future__ import annotations

import logging
import re
import sys
from argparse import ArgumentParser, Namespace
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterator, NoReturn, Sequence

from chebsl.assemble import assemble
from chebsl.eigen import DEFAULT_TOL, BoolArray, Spectrum, certify, settled, solve
from chebsl.errors import ChebslError, ExprSyntaxError, ProblemError
from chebsl.expr import Expr, parse
from chebsl.grid import Domain
from chebsl.interp import eigenfunction, sample
from chebsl.problem import BUILTIN_EXAMPLES, BoundaryCondition, SLProblem, builtin
from chebsl.reference import FIRST_INDEX, reference_value, relative_error
from chebsl.version import __version__

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_ERROR, EXIT_UNCONVERGED = 0, 1, 2

MIN_GRID_ORDER = 8
DEFAULT_GRID_ORDER = {1: 256, 2: 256, 3: 128}
DEFAULT_FILE_GRID_ORDER = 64
DEFAULT_TRUNCATION = 10.0
DEFAULT_COUNT = 10
DEFAULT_SAMPLES = 101


@dataclass(frozen=True)
class TableBlock:
    """One grid order and the eigenvalue indices reported at it."""

    n_grid: int
    indices: range
    large: bool = False


@dataclass(frozen=True)
class TableSetting:
    example: int
    blocks: tuple[TableBlock, ...]
    d_truncation: float | None = None


TABLE_SETTINGS = {
    1: TableSetting(1, (TableBlock(256, range(1, 41)),)),
    2: TableSetting(
        1,
        (
            TableBlock(500, range(100, 451, 50)),
            TableBlock(1000, range(500, 951, 50), large=True),
        ),
    ),
    3: TableSetting(2, (TableBlock(256, range(30)),), d_truncation=10.0),
    4: TableSetting(3, (TableBlock(128, range(1, 31)),)),
}

PROBLEM_KEYS = (
    "p",
    "q",
    "w",
    "a",
    "b",
    "bc_left_c",
    "bc_left_d",
    "bc_right_c",
    "bc_right_d",
    "label",
)
REQUIRED_KEYS = ("p", "q", "w", "a", "b")
KEY_VALUE_RE = re.compile(r"\s*(?P<key>\w+)\s*=\s*(?P<value>.*?)\s*$")


@dataclass(frozen=True)
class RunConfig:
    """Validated command line settings."""

    command: str
    problem_file: Path | None = None
    example: int | None = None
    d_truncation: float | None = None
    n_grid: int | None = None
    count: int = DEFAULT_COUNT
    tol: float = DEFAULT_TOL
    out: Path | None = None
    samples: int = DEFAULT_SAMPLES
    index: int | None = None
    table: int | None = None
    large: bool = False
    verbosity: int = 0


def positive_int(text: str) -> int:
    """Parse a strictly positive integer.

    >>> positive_int("3")
    3

    """
    value = int(text)
    if value < 1:
        message = f"Expected a positive integer, got {text}"
        raise ValueError(message)
    return value


def grid_order(text: str) -> int:
    """Parse a collocation order ``N >= 8``."""
    value = int(text)
    if value < MIN_GRID_ORDER:
        message = f"Grid order must be at least {MIN_GRID_ORDER}, got {text}"
        raise ValueError(message)
    return value


def positive_float(text: str) -> float:
    """Parse a strictly positive real, ``inf`` included.

    >>> positive_float("1e-8")
    1e-08

    """
    value = float(text)
    if not value > 0:
        message = f"Expected a positive number, got {text}"
        raise ValueError(message)
    return value


def sample_count(text: str) -> int:
    """Parse a sample count m >= 2."""
    value = int(text)
    if value < 2:  # noqa: PLR2004
        message = f"Need at least 2 samples, got {text}"
        raise ValueError(message)
    return value


def example_id(text: str) -> int:
    value = int(text)
    if value not in BUILTIN_EXAMPLES:
        message = f"Expected one of {BUILTIN_EXAMPLES}, got {text}"
        raise ValueError(message)
    return value


def table_id(text: str) -> int:
    value = int(text)
    if value not in TABLE_SETTINGS:
        message = f"Expected one of {tuple(TABLE_SETTINGS)}, got {text}"
        raise ValueError(message)
    return value


class _ArgumentParser(ArgumentParser):
    """Argument parser which reports usage errors with exit status 1."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _add_problem_arguments(parser: ArgumentParser, *, allow_file: bool) -> None:
    source = parser.add_mutually_exclusive_group(required=True)
    if allow_file:
        source.add_argument("--problem", type=Path, help="Problem definition file.")
    source.add_argument("--example", type=example_id, help="Bundled example 1, 2 or 3.")
    parser.add_argument(
        "--d",
        type=positive_float,
        dest="d_truncation",
        help=f"Half-width d of example 2's interval (default {DEFAULT_TRUNCATION:g}).",
    )
    parser.add_argument(
        "--n", type=grid_order, dest="n_grid", help="Collocation order N."
    )
    parser.add_argument(
        "--tol",
        type=positive_float,
        default=DEFAULT_TOL,
        help=f"Convergence tolerance between N and 2N (default {DEFAULT_TOL:g}).",
    )


def _add_output_argument(parser: ArgumentParser) -> None:
    parser.add_argument("--out", type=Path, help="Write CSV here instead of stdout.")


def build_parser() -> ArgumentParser:
    parser = _ArgumentParser(
        prog="chebsl",
        description="Sturm-Liouville eigenvalues by Chebyshev collocation.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=0,
        dest="verbosity",
        help="Log progress to stderr (repeat for debug output).",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    solve_parser = commands.add_parser("solve", help="Solve a problem.")
    _add_problem_arguments(solve_parser, allow_file=True)
    solve_parser.add_argument("--count", type=positive_int, default=DEFAULT_COUNT)
    _add_output_argument(solve_parser)

    example_parser = commands.add_parser(
        "example", help="Solve a bundled example and compare with its reference."
    )
    _add_problem_arguments(example_parser, allow_file=False)
    example_parser.add_argument("--count", type=positive_int, default=DEFAULT_COUNT)
    _add_output_argument(example_parser)

    table_parser = commands.add_parser("table", help="Regenerate a reference table.")
    table_parser.add_argument("table", type=table_id, help="Table 1, 2, 3 or 4.")
    table_parser.add_argument(
        "--large", action="store_true", help="Include the N=1000 block of table 2."
    )
    _add_output_argument(table_parser)

    function_parser = commands.add_parser(
        "eigenfunction", help="Sample a normalized eigenfunction."
    )
    _add_problem_arguments(function_parser, allow_file=False)
    function_parser.add_argument("--index", type=int, required=True, help="Mode n.")
    function_parser.add_argument(
        "--samples", type=sample_count, default=DEFAULT_SAMPLES, help="Points m."
    )
    _add_output_argument(function_parser)
    return parser


def parse_arguments(argv: Sequence[str] | None = None) -> RunConfig:
    """Parse command line arguments into a :class:`RunConfig`."""
    namespace: Namespace = build_parser().parse_args(argv)
    settings = vars(namespace)
    problem_file = settings.pop("problem", None)
    return RunConfig(problem_file=problem_file, **settings)


def _constant(key: str, text: str) -> float:
    expression = parse(text)
    if expression.depends_on_x():
        message = f"Value of {key!r} must not depend on x: {text}"
        raise ProblemError(message)
    return expression.evaluate(0.0)


def _boundary_condition(values: dict[str, str], side: str) -> BoundaryCondition:
    c_key, d_key = f"bc_{side}_c", f"bc_{side}_d"
    if c_key not in values and d_key not in values:
        return BoundaryCondition.dirichlet()
    return BoundaryCondition(
        _constant(c_key, values.get(c_key, "0")),
        _constant(d_key, values.get(d_key, "0")),
    )


def read_problem_values(lines: Iterator[str], source: str) -> dict[str, str]:
    """Collect ``key = value`` pairs, skipping blank lines and ``#`` comments."""
    values: dict[str, str] = {}
    for line_number, line in enumerate(lines, start=1):
        content = line.split("#", 1)[0]
        if not content.strip():
            continue
        match = KEY_VALUE_RE.match(content)
        if not match:
            message = f"{source}:{line_number}: expected 'key = value', got {line!r}"
            raise ProblemError(message)
        key, value = match.group("key"), match.group("value")
        if key not in PROBLEM_KEYS:
            message = f"{source}:{line_number}: unknown key {key!r}"
            raise ProblemError(message)
        if key in values:
            message = f"{source}:{line_number}: duplicate key {key!r}"
            raise ProblemError(message)
        values[key] = value
    return values


def load_problem_file(path: Path) -> SLProblem:
    """Read a problem definition file.

    The keys are ``p``, ``q``, ``w`` (expressions in ``x``), ``a``, ``b``
    (constant expressions such as ``pi/2``), ``bc_left_c``, ``bc_left_d``,
    ``bc_right_c``, ``bc_right_d`` (default: Dirichlet) and ``label``.

    """
    with path.open(encoding="utf-8") as problem_file:
        values = read_problem_values(iter(problem_file), str(path))
    missing = [key for key in REQUIRED_KEYS if key not in values]
    if missing:
        message = f"{path}: missing key {missing[0]!r}"
        raise ProblemError(message)
    try:
        coefficients: dict[str, Expr] = {key: parse(values[key]) for key in "pqw"}
    except ExprSyntaxError:
        # re-parse key by key so the message names the offending key
        for key in "pqw":
            try:
                parse(values[key])
            except ExprSyntaxError as exc_info:
                message = f"{path}: invalid expression for {key!r}: {exc_info}"
                raise ProblemError(message) from exc_info
        raise
    try:
        domain = Domain(_constant("a", values["a"]), _constant("b", values["b"]))
        bc_left = _boundary_condition(values, "left")
        bc_right = _boundary_condition(values, "right")
    except ExprSyntaxError as exc_info:
        message = f"{path}: invalid constant: {exc_info}"
        raise ProblemError(message) from exc_info
    return SLProblem(
        p=coefficients["p"],
        q=coefficients["q"],
        w=coefficients["w"],
        domain=domain,
        bc_left=bc_left,
        bc_right=bc_right,
        label=values.get("label", path.stem),
    )


def _problem(config: RunConfig) -> SLProblem:
    if config.problem_file is not None:
        if config.d_truncation is not None:
            message = "--d only applies to example 2, not to a problem file"
            raise ProblemError(message)
        return load_problem_file(config.problem_file)
    if config.example == 2:  # noqa: PLR2004
        d = DEFAULT_TRUNCATION if config.d_truncation is None else config.d_truncation
        return builtin(2, d)
    if config.example is None:
        message = "Either a problem file or an example is required"
        raise ProblemError(message)
    return builtin(config.example, config.d_truncation)


def _grid_order(config: RunConfig) -> int:
    if config.n_grid is not None:
        return config.n_grid
    if config.example is not None:
        return DEFAULT_GRID_ORDER[config.example]
    return DEFAULT_FILE_GRID_ORDER


def _first_index(config: RunConfig) -> int:
    return FIRST_INDEX[config.example] if config.example is not None else 1


def format_number(value: float) -> str:
    """Format a real with 15 significant digits.

    >>> format_number(20.79228845522)
    '2.07922884552200E+01'

    """
    return f"{value:.14E}"


def _format_flag(flag: bool) -> str:  # noqa: FBT001
    return "true" if flag else "false"


@contextmanager
def _output(config: RunConfig) -> Iterator[IO[str]]:
    if config.out is None:
        yield sys.stdout
        return
    with config.out.open("w", encoding="utf-8", newline="") as out_file:
        yield out_file


def _write_row(stream: IO[str], fields: Sequence[str]) -> None:
    stream.write(",".join(fields) + "\n")


def cmd_solve(config: RunConfig) -> int:
    """Print ``n,lambda,residual,converged`` for the requested eigenvalues."""
    prob = _problem(config)
    spectrum = certify(prob, _grid_order(config), config.tol)
    first = _first_index(config)
    shown = min(config.count, len(spectrum))
    with _output(config) as stream:
        _write_row(stream, ("n", "lambda", "residual", "converged"))
        for k in range(shown):
            _write_row(
                stream,
                (
                    str(first + k),
                    format_number(spectrum.eigenvalues[k]),
                    format_number(spectrum.residuals[k]),
                    _format_flag(bool(spectrum.converged[k])),
                ),
            )
    return _convergence_status(spectrum, config.count)


def cmd_example(config: RunConfig) -> int:
    """Print a bundled example's eigenvalues next to its reference values."""
    prob = _problem(config)
    example = config.example
    if example is None:
        message = "The example command needs --example"
        raise ProblemError(message)
    spectrum = certify(prob, _grid_order(config), config.tol)
    first = _first_index(config)
    shown = min(config.count, len(spectrum))
    with _output(config) as stream:
        _write_row(
            stream, ("n", "lambda", "lambda_reference", "relative_error", "converged")
        )
        for k in range(shown):
            computed = float(spectrum.eigenvalues[k])
            reference = reference_value(example, first + k).value
            _write_row(
                stream,
                (
                    str(first + k),
                    format_number(computed),
                    format_number(reference),
                    format_number(relative_error(reference, computed)),
                    _format_flag(bool(spectrum.converged[k])),
                ),
            )
    return _convergence_status(spectrum, config.count)


def _convergence_status(spectrum: Spectrum, count: int) -> int:
    if count > len(spectrum):
        logger.warning(
            "Only %d eigenvalues available, %d requested", len(spectrum), count
        )
        return EXIT_UNCONVERGED
    unconverged = int((~spectrum.converged[:count]).sum())
    if unconverged:
        logger.warning("%d of %d eigenvalues did not converge", unconverged, count)
        return EXIT_UNCONVERGED
    return EXIT_OK


def _solve_block(
    prob: SLProblem, block: TableBlock, tol: float
) -> tuple[Spectrum, BoolArray]:
    """Solve a table block at ``N`` and flag the rows that agree at ``2N``."""
    spectrum = solve(assemble(prob, block.n_grid))
    finer = solve(assemble(prob, 2 * block.n_grid))
    return spectrum, settled(spectrum, finer, tol)


def cmd_table(config: RunConfig) -> int:
    """Regenerate one of the reference tables as CSV.

    Every row is also checked at twice the block's grid order. Rows that do not
    settle are still written, but logged and reported with exit status 2.

    """
    if config.table is None:
        message = "The table command needs a table number"
        raise ProblemError(message)
    setting = TABLE_SETTINGS[config.table]
    prob = builtin(setting.example, setting.d_truncation)
    blocks = [block for block in setting.blocks if config.large or not block.large]
    skipped = len(setting.blocks) - len(blocks)
    if skipped:
        logger.info("Skipping %d large block(s), pass --large to include them", skipped)
    with ThreadPoolExecutor() as executor:
        solved = list(
            executor.map(lambda block: _solve_block(prob, block, config.tol), blocks)
        )
    first = FIRST_INDEX[setting.example]
    rows = []
    status = EXIT_OK
    for block, (spectrum, flags) in zip(blocks, solved):
        unsettled = []
        for n in block.indices:
            position = n - first
            if position >= len(spectrum):
                message = (
                    f"Eigenvalue n={n} is not available at N={block.n_grid}"
                    f" ({len(spectrum)} eigenvalues)"
                )
                raise ProblemError(message)
            if position >= flags.size or not flags[position]:
                unsettled.append(n)
            computed = float(spectrum.eigenvalues[position])
            reference = reference_value(setting.example, n).value
            rows.append(
                (
                    str(n),
                    format_number(computed),
                    format_number(reference),
                    format_number(relative_error(reference, computed)),
                )
            )
        if unsettled:
            logger.warning(
                "Table %d: eigenvalues n=%s did not settle between N=%d and N=%d",
                config.table,
                ", ".join(map(str, unsettled)),
                block.n_grid,
                2 * block.n_grid,
            )
            status = EXIT_UNCONVERGED
    with _output(config) as stream:
        _write_row(
            stream, ("n", "lambda_computed", "lambda_reference", "relative_error")
        )
        for row in rows:
            _write_row(stream, row)
    return status


def cmd_eigenfunction(config: RunConfig) -> int:
    """Print ``x,y`` samples of a normalized, converged eigenfunction."""
    prob = _problem(config)
    if config.index is None:
        message = "The eigenfunction command needs --index"
        raise ProblemError(message)
    first = _first_index(config)
    position = config.index - first
    if position < 0:
        message = f"Mode indices of {prob.label!r} start at {first}, got {config.index}"
        raise ProblemError(message)
    n_grid = _grid_order(config)
    spectrum = certify(prob, n_grid, config.tol)
    if position >= len(spectrum) or not spectrum.converged[position]:
        logger.error(
            "Eigenfunction n=%d of %r is not converged at N=%d",
            config.index,
            prob.label,
            n_grid,
        )
        return EXIT_UNCONVERGED
    mode = eigenfunction(spectrum, position, prob.w, config.index)
    with _output(config) as stream:
        _write_row(stream, ("x", "y"))
        for x, y in sample(mode, config.samples):
            _write_row(stream, (format_number(x), format_number(y)))
    return EXIT_OK


COMMAND_HANDLERS = {
    "solve": cmd_solve,
    "example": cmd_example,
    "table": cmd_table,
    "eigenfunction": cmd_eigenfunction,
}


def run(config: RunConfig) -> int:
    """Execute a parsed command and return its exit status."""
    try:
        return COMMAND_HANDLERS[config.command](config)
    except (ChebslError, OSError) as exc_info:
        logger.error("%s", exc_info)  # noqa: TRY400
        return EXIT_ERROR


def setup_logging(verbosity: int) -> None:
    level = max(logging.DEBUG, logging.WARNING - 10 * verbosity)
    logging.basicConfig(
        level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s"
    )
    logging.captureWarnings(True)


def main(argv: Sequence[str] | None = None) -> int:
    config = parse_arguments(argv)
    setup_logging(config.verbosity)
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
