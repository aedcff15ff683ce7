"""Tests for the `chebsl.cli` module."""

import math
from pathlib import Path
from textwrap import dedent

import pytest

from chebsl.cli import (
    EXIT_ERROR,
    EXIT_OK,
    EXIT_UNCONVERGED,
    RunConfig,
    example_id,
    format_number,
    grid_order,
    load_problem_file,
    main,
    parse_arguments,
    positive_float,
    positive_int,
    read_problem_values,
    sample_count,
)
from chebsl.errors import ProblemError
from chebsl.problem import BoundaryCondition
from chebsl.reference import wkb_example1
from chebsl.version import __version__

QUARTER_WAVE = """\
# -y'' = lambda y with y(0) = 0 and y'(pi/2) = 0
p = 1
q = 0
w = 1
a = 0
b = pi/2   # constant expressions are allowed
bc_right_c = 0
bc_right_d = 1
label = quarter wave
"""


# relative error column of the published quartic-oscillator table, n = 0..28
TABLE_3_ERRORS = [
    2.22819357e-01,
    1.27276454e-02,
    5.62580945e-03,
    2.86096488e-03,
    1.73783391e-03,
    1.16526648e-03,
    8.35108750e-04,
    6.27635889e-04,
    4.88838943e-04,
    3.91451162e-04,
    3.20504552e-04,
    2.67228676e-04,
    2.26208751e-04,
    1.93955319e-04,
    1.68137682e-04,
    1.47151101e-04,
    1.29861467e-04,
    1.15448907e-04,
    1.03308819e-04,
    9.29874451e-05,
    8.41388726e-05,
    7.64956746e-05,
    6.98484745e-05,
    6.40314563e-05,
    5.89119257e-05,
    5.43826775e-05,
    5.03563379e-05,
    4.67611207e-05,
    4.35376048e-05,
]


def _rows(text):
    """Split CSV output into a header and rows of fields."""
    lines = text.splitlines()
    return lines[0].split(","), [line.split(",") for line in lines[1:]]


@pytest.fixture
def quarter_wave_file(tmp_path):
    path = tmp_path / "quarter.txt"
    path.write_text(QUARTER_WAVE, encoding="utf-8")
    return path


@pytest.mark.parametrize(
    ("converter", "text", "expect"),
    [
        (positive_int, "3", 3),
        (positive_int, "0", ValueError),
        (positive_int, "1.5", ValueError),
        (grid_order, "8", 8),
        (grid_order, "7", ValueError),
        (positive_float, "1e-8", 1e-8),
        (positive_float, "inf", math.inf),
        (positive_float, "0", ValueError),
        (positive_float, "nan", ValueError),
        (sample_count, "2", 2),
        (sample_count, "1", ValueError),
        (example_id, "2", 2),
        (example_id, "4", ValueError),
    ],
)
def test_argument_converters(converter, text, expect):
    if expect is ValueError:
        with pytest.raises(ValueError):
            converter(text)
    else:
        assert converter(text) == expect


def test_parse_arguments_solve():
    config = parse_arguments(
        ["-vv", "solve", "--problem", "prob.txt", "--n", "32", "--count", "3"]
    )

    assert config == RunConfig(
        command="solve",
        problem_file=Path("prob.txt"),
        n_grid=32,
        count=3,
        verbosity=2,
    )


def test_parse_arguments_table():
    config = parse_arguments(["table", "2", "--large"])

    assert config.command == "table"
    assert config.table == 2
    assert config.large


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["solve"],
        ["solve", "--problem", "a.txt", "--example", "1"],
        ["example", "--problem", "a.txt"],
        ["solve", "--example", "1", "--n", "4"],
        ["table", "5"],
        ["eigenfunction", "--example", "3"],
        ["eigenfunction", "--example", "3", "--index", "1", "--samples", "1"],
    ],
)
def test_usage_errors_exit_1(argv, capsys):
    with pytest.raises(SystemExit) as exc_info:
        main(argv)

    assert exc_info.value.code == EXIT_ERROR
    assert "error:" in capsys.readouterr().err


def test_version(capsys):
    with pytest.raises(SystemExit) as exc_info:
        main(["--version"])

    assert exc_info.value.code == 0
    assert capsys.readouterr().out.strip() == __version__


def test_format_number():
    assert format_number(20.79228845522) == "2.07922884552200E+01"
    assert format_number(-0.5) == "-5.00000000000000E-01"


def test_read_problem_values_skips_comments_and_blanks():
    lines = iter(["# comment\n", "\n", "p = 1 + x  # trailing\n", "  q=0\n"])

    assert read_problem_values(lines, "test") == {"p": "1 + x", "q": "0"}


@pytest.mark.parametrize(
    ("lines", "match"),
    [
        (["p 1\n"], "test:1: expected 'key = value'"),
        (["p = 1\n", "r = 2\n"], "test:2: unknown key 'r'"),
        (["p = 1\n", "p = 2\n"], "test:2: duplicate key 'p'"),
    ],
)
def test_read_problem_values_errors(lines, match):
    with pytest.raises(ProblemError, match=match):
        read_problem_values(iter(lines), "test")


def test_load_problem_file(quarter_wave_file):
    prob = load_problem_file(quarter_wave_file)

    assert prob.label == "quarter wave"
    assert prob.domain.b == pytest.approx(math.pi / 2)
    assert prob.bc_left == BoundaryCondition.dirichlet()
    assert prob.bc_right == BoundaryCondition(0.0, 1.0)


def test_load_problem_file_label_defaults_to_name(tmp_path):
    path = tmp_path / "plain.txt"
    path.write_text("p = 1\nq = 0\nw = 1\na = 0\nb = 1\n", encoding="utf-8")

    assert load_problem_file(path).label == "plain"


@pytest.mark.parametrize(
    ("content", "match"),
    [
        ("p = 1\nq = 0\nw = 1\na = 0\n", "missing key 'b'"),
        ("p = 1\nq = 0 +\nw = 1\na = 0\nb = 1\n", "invalid expression for 'q'"),
        ("p = 1\nq = 0\nw = 1\na = 0\nb = 1 + x\n", "must not depend on x"),
        ("p = 1\nq = 0\nw = 1\na = 0\nb = pi(\n", "invalid constant"),
        ("p = 1\nq = 0\nw = 1\na = 1\nb = 0\n", "a < b"),
        ("p = 1\nq = 0\nw = x\na = 0\nb = 1\n", "Coefficient w"),
        (
            "p = 1\nq = 0\nw = 1\na = 0\nb = 1\nbc_left_c = 0\nbc_left_d = 0\n",
            "must not both be zero",
        ),
    ],
)
def test_load_problem_file_errors(tmp_path, content, match):
    path = tmp_path / "bad.txt"
    path.write_text(content, encoding="utf-8")

    with pytest.raises(ProblemError, match=match):
        load_problem_file(path)


def test_solve_problem_file(quarter_wave_file, capsys):
    result = main(["solve", "--problem", str(quarter_wave_file), "--n", "32"])

    header, rows = _rows(capsys.readouterr().out)
    assert result == EXIT_OK
    assert header == ["n", "lambda", "residual", "converged"]
    assert len(rows) == 10
    assert [row[0] for row in rows[:3]] == ["1", "2", "3"]
    lambdas = [float(row[1]) for row in rows[:3]]
    assert lambdas == pytest.approx([1.0, 9.0, 25.0], rel=1e-10)
    assert all(row[3] == "true" for row in rows)


def test_solve_is_deterministic(quarter_wave_file, capsys):
    argv = ["solve", "--problem", str(quarter_wave_file), "--n", "16"]
    main(argv)
    first = capsys.readouterr().out
    main(argv)

    assert capsys.readouterr().out == first


def test_solve_rejects_d_with_problem_file(quarter_wave_file, caplog):
    result = main(["solve", "--problem", str(quarter_wave_file), "--d", "5"])

    assert result == EXIT_ERROR
    assert "--d only applies to example 2" in caplog.text



def test_solve_unconverged_exit_2(capsys):
    result = main(["solve", "--example", "3", "--n", "16", "--count", "15"])

    _, rows = _rows(capsys.readouterr().out)
    assert result == EXIT_UNCONVERGED
    assert 10 <= len(rows) <= 15
    assert rows[0][3] == "true"
    assert rows[-1][3] == "false"


def test_solve_more_than_available_exit_2(capsys):
    result = main(["solve", "--example", "3", "--n", "8", "--count", "50"])

    _, rows = _rows(capsys.readouterr().out)
    assert result == EXIT_UNCONVERGED
    assert len(rows) <= 7


def test_solve_missing_file_exit_1(tmp_path, caplog):
    result = main(["solve", "--problem", str(tmp_path / "missing.txt")])

    assert result == EXIT_ERROR
    assert "missing.txt" in caplog.text


def test_solve_writes_out_file(tmp_path, capsys):
    out = tmp_path / "spectrum.csv"

    result = main(
        ["solve", "--example", "3", "--n", "32", "--count", "2", "--out", str(out)]
    )

    assert result == EXIT_OK
    assert capsys.readouterr().out == ""
    header, rows = _rows(out.read_text(encoding="utf-8"))
    assert header == ["n", "lambda", "residual", "converged"]
    assert len(rows) == 2


def test_example_command(capsys):
    result = main(["example", "--example", "3", "--n", "64", "--count", "1"])

    header, rows = _rows(capsys.readouterr().out)
    assert result == EXIT_OK
    assert header == ["n", "lambda", "lambda_reference", "relative_error", "converged"]
    assert rows[0][0] == "1"
    assert rows[0][1].startswith("2.07922884552")
    assert float(rows[0][3]) <= 1e-9
    assert rows[0][4] == "true"


def test_example_2_starts_at_zero(capsys):
    result = main(["example", "--example", "2", "--n", "128", "--count", "2"])

    _, rows = _rows(capsys.readouterr().out)
    assert result == EXIT_OK
    assert [row[0] for row in rows] == ["0", "1"]
    assert float(rows[0][1]) == pytest.approx(1.0603620904849, rel=1e-8)
    assert float(rows[0][2]) == pytest.approx(0.8671453264848, rel=1e-12)


def test_example_rejects_d_for_example_1(caplog):
    result = main(["example", "--example", "1", "--d", "5"])

    assert result == EXIT_ERROR
    assert "takes no d" in caplog.text


def test_table_1(capsys):
    result = main(["table", "1"])

    header, rows = _rows(capsys.readouterr().out)
    assert result == EXIT_OK
    assert header == ["n", "lambda_computed", "lambda_reference", "relative_error"]
    assert [int(row[0]) for row in rows] == list(range(1, 41))
    assert float(rows[0][1]) == pytest.approx(0.001744014, rel=1e-6)
    assert float(rows[0][3]) == pytest.approx(0.075082675, abs=1e-3)
    assert float(rows[39][1]) == pytest.approx(3.016682151, rel=1e-7)


def test_table_2_without_large_block(capsys, caplog):
    result = main(["table", "2"])

    _, rows = _rows(capsys.readouterr().out)
    assert result == EXIT_UNCONVERGED
    assert [int(row[0]) for row in rows] == list(range(100, 451, 50))
    # modes well inside the resolution of N=500 follow the WKB asymptotics
    for row in rows[:2]:
        assert float(row[2]) == pytest.approx(wkb_example1(int(row[0])))
        assert float(row[3]) <= 1e-4
    # the top rows are beyond that resolution and drift between N=500 and N=1000
    assert "300, 350, 400, 450 did not settle between N=500 and N=1000" in caplog.text


@pytest.mark.slow
def test_table_2_large_block(capsys):
    result = main(["table", "2", "--large"])

    _, rows = _rows(capsys.readouterr().out)
    assert result == EXIT_UNCONVERGED
    assert [int(row[0]) for row in rows] == [
        *range(100, 451, 50),
        *range(500, 951, 50),
    ]
    lambdas = [float(row[1]) for row in rows[8:]]
    assert lambdas == sorted(lambdas)


def test_table_3(capsys):
    result = main(["table", "3"])

    _, rows = _rows(capsys.readouterr().out)
    assert result == EXIT_OK
    assert [int(row[0]) for row in rows] == list(range(30))
    assert float(rows[0][1]) == pytest.approx(1.0603620904849, rel=1e-8)
    assert float(rows[28][1]) == pytest.approx(190.229238652464, rel=1e-7)
    assert float(rows[28][2]) == pytest.approx(190.220956887619, rel=1e-12)
    errors = [float(row[3]) for row in rows]
    assert errors[:29] == pytest.approx(TABLE_3_ERRORS, rel=1e-2)
    # the WKB levels become more accurate as n grows
    assert all(later < earlier for earlier, later in zip(errors[1:], errors[2:]))


def test_table_4(capsys):
    result = main(["table", "4"])

    _, rows = _rows(capsys.readouterr().out)
    assert result == EXIT_OK
    assert [int(row[0]) for row in rows] == list(range(1, 31))
    assert max(float(row[3]) for row in rows) <= 1e-9


def test_eigenfunction_example_3(capsys):
    result = main(
        ["eigenfunction", "--example", "3", "--index", "1", "--samples", "11"]
    )

    header, rows = _rows(capsys.readouterr().out)
    assert result == EXIT_OK
    assert header == ["x", "y"]
    points = [(float(x), float(y)) for x, y in rows]
    assert len(points) == 11
    assert points[0] == (0.0, 0.0)
    assert points[-1] == (1.0, 0.0)
    # the ground state has no interior sign change
    assert all(y > 0 for _, y in points[1:-1])


def test_eigenfunction_example_2_parity(capsys):
    result = main(
        [
            "eigenfunction",
            "--example",
            "2",
            "--index",
            "4",
            "--n",
            "128",
            "--samples",
            "41",
        ]
    )

    _, rows = _rows(capsys.readouterr().out)
    ys = [float(y) for _, y in rows]
    assert result == EXIT_OK
    assert ys == pytest.approx(ys[::-1], abs=1e-6)


def test_eigenfunction_unconverged_exit_2(capsys):
    result = main(["eigenfunction", "--example", "3", "--index", "7", "--n", "8"])

    assert result == EXIT_UNCONVERGED
    assert capsys.readouterr().out == ""


def test_eigenfunction_index_below_first(caplog):
    result = main(["eigenfunction", "--example", "3", "--index", "0"])

    assert result == EXIT_ERROR
    assert "start at 1" in caplog.text


def test_problem_file_matches_builtin(tmp_path, capsys):
    path = tmp_path / "weighted.txt"
    path.write_text("p = 1\nq = 0\nw = (x+pi)^4\na = 0\nb = pi\n", encoding="utf-8")

    main(["solve", "--problem", str(path), "--n", "32", "--count", "3"])
    from_file = capsys.readouterr().out
    main(["solve", "--example", "1", "--n", "32", "--count", "3"])

    assert capsys.readouterr().out == from_file


def test_eigenfunction_example_1_ground_state(capsys):
    result = main(
        ["eigenfunction", "--example", "1", "--index", "1", "--samples", "51"]
    )

    _, rows = _rows(capsys.readouterr().out)
    ys = [float(y) for _, y in rows]
    assert result == EXIT_OK
    assert all(y > 0 for y in ys[1:-1])
