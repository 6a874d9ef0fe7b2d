import pytest

from app.services.errors import InputParseError, InputValidationError
from app.services.pvalue_loader import load_pvalues


def _write(tmp_path, text, name="p.txt"):
    path = tmp_path / name
    path.write_text(text)
    return path


def test_one_value_per_line(tmp_path):
    p = load_pvalues(_write(tmp_path, "0.01\n0.5\n1\n0\n"))
    assert p.values == [0.01, 0.5, 1.0, 0.0]


def test_pvalue_header_is_skipped(tmp_path):
    p = load_pvalues(_write(tmp_path, "pvalue\n0.2\n0.3\n"))
    assert p.values == [0.2, 0.3]


def test_blank_lines_are_ignored(tmp_path):
    p = load_pvalues(_write(tmp_path, "0.2\n\n0.3\n"))
    assert p.m == 2


def test_table_with_header(tmp_path):
    path = _write(tmp_path, "gene,pvalue,score\na,0.01,3\nb,0.5,1\n", "table.csv")
    assert load_pvalues(path).values == [0.01, 0.5]
    with pytest.raises(InputValidationError):
        load_pvalues(path, column="score")
    with pytest.raises(InputParseError):
        load_pvalues(path, column="qvalue")


def test_table_column_by_position(tmp_path):
    path = _write(tmp_path, "1,0.01\n2,0.02\n", "table.csv")
    assert load_pvalues(path, column=2).values == [0.01, 0.02]
    with pytest.raises(InputParseError):
        load_pvalues(path)
    with pytest.raises(InputParseError):
        load_pvalues(path, column=3)


def test_non_numeric_entry_reports_its_line(tmp_path):
    with pytest.raises(InputParseError) as exc:
        load_pvalues(_write(tmp_path, "0.1\n0.2\nabc\n"))
    assert exc.value.line == 3
    assert "line 3" in str(exc.value)


def test_ragged_rows_report_their_line(tmp_path):
    with pytest.raises(InputParseError) as exc:
        load_pvalues(_write(tmp_path, "0.1\n0.2,0.3\n"))
    assert exc.value.line == 2


def test_out_of_range_values_are_all_listed(tmp_path):
    with pytest.raises(InputValidationError) as exc:
        load_pvalues(_write(tmp_path, "0.1\n1.5\n-0.2\n0.3\n"))
    assert exc.value.offenders == ["line 2=1.5", "line 3=-0.2"]


def test_empty_file(tmp_path):
    with pytest.raises(InputValidationError):
        load_pvalues(_write(tmp_path, ""))
    with pytest.raises(InputValidationError):
        load_pvalues(_write(tmp_path, "pvalue\n", "header_only.txt"))


def test_missing_file(tmp_path):
    with pytest.raises(InputParseError):
        load_pvalues(tmp_path / "absent.txt")
