import pytest

from gapless_mec.core import SolutionPair
from gapless_mec.io import FormatError, format_mec, format_solution, parse_mec, parse_solution

from conftest import fm


def test_round_trip():
    M = fm("01-", "-10", "111")
    assert parse_mec(format_mec(M)) == M


def test_header_checked():
    with pytest.raises(FormatError) as exc:
        parse_mec("3\n01\n")
    assert exc.value.line == 1


def test_row_count_checked():
    with pytest.raises(FormatError):
        parse_mec("2 2\n01\n")


def test_bad_symbol_position():
    with pytest.raises(FormatError) as exc:
        parse_mec("2 3\n010\n0x1\n")
    assert (exc.value.line, exc.value.column) == (3, 2)


def test_gap_position():
    with pytest.raises(FormatError) as exc:
        parse_mec("1 4\n-0-1\n")
    assert (exc.value.line, exc.value.column) == (2, 3)


def test_empty_row():
    with pytest.raises(FormatError):
        parse_mec("1 2\n--\n")


def test_solution_round_trip():
    sol = SolutionPair("010", "101", "AAB", 3)
    assert parse_solution(format_solution(sol)) == sol


def test_solution_bad_cost_line():
    with pytest.raises(FormatError):
        parse_solution("0\n1\nA\ncosts 2\n")
