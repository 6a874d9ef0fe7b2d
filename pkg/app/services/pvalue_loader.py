# services/pvalue_loader.py
"""
P-value file loader: one p-value per line with an optional "pvalue" header,
or a comma-separated table with a column selected by name or 1-based position.
"""
import re
from pathlib import Path
from typing import List, Optional, Union
import logging

import pandas as pd

from ..schemas.pvalue_schemas import PValueSet
from .errors import InputParseError, InputValidationError

logger = logging.getLogger(__name__)

DEFAULT_COLUMN = "pvalue"
_PANDAS_LINE = re.compile(r"line (\d+)")


def _is_number(text: str) -> bool:
    try:
        float(text)
    except (TypeError, ValueError):
        return False
    return True


def _read_table(path: Path) -> pd.DataFrame:
    try:
        return pd.read_csv(path, header=None, dtype=str, skip_blank_lines=False, skipinitialspace=True)
    except pd.errors.EmptyDataError:
        raise InputValidationError(f"{path}: no p-values found")
    except pd.errors.ParserError as e:
        match = _PANDAS_LINE.search(str(e))
        line = int(match.group(1)) if match else None
        raise InputParseError(f"{path}: inconsistent number of fields", line=line)


def _select_column(table: pd.DataFrame, header: Optional[List[str]], column: Optional[Union[str, int]], path: Path) -> int:
    """Position (0-based) of the p-value column"""
    width = table.shape[1]
    if column is not None:
        text = str(column).strip()
        if header is not None and text in header:
            return header.index(text)
        if text.isdigit() and 1 <= int(text) <= width:
            return int(text) - 1
        raise InputParseError(f"{path}: column {column!r} not found")
    if header is not None and DEFAULT_COLUMN in header:
        return header.index(DEFAULT_COLUMN)
    if width == 1:
        return 0
    raise InputParseError(f"{path}: {width} columns and no '{DEFAULT_COLUMN}' header; select one with --column")


def load_pvalues(path: Union[str, Path], column: Optional[Union[str, int]] = None) -> PValueSet:
    """
    Parse a p-value file. Malformed entries raise InputParseError with the
    1-based line number; values outside [0, 1] raise InputValidationError
    listing every offender.
    """
    path = Path(path)
    if not path.exists():
        raise InputParseError(f"{path}: file not found")

    table = _read_table(path)
    table = table[table.notna().any(axis=1)]
    if table.empty:
        raise InputValidationError(f"{path}: no p-values found")

    first = [str(v).strip() if pd.notna(v) else "" for v in table.iloc[0]]
    header = None
    non_numeric = not all(_is_number(v) for v in first if v)
    if non_numeric and (
        table.shape[1] > 1
        or first[0].lower() == DEFAULT_COLUMN
        or (column is not None and str(column).strip() in first)
    ):
        header = first
    position = _select_column(table, header, column, path)
    body = table.iloc[1:] if header is not None else table

    values: List[float] = []
    offenders: List[str] = []
    for row_index, raw in body.iloc[:, position].items():
        line = int(row_index) + 1
        text = "" if pd.isna(raw) else str(raw).strip()
        if not text or not _is_number(text):
            raise InputParseError(f"{path}: not a number: {text!r}", line=line)
        value = float(text)
        if not 0.0 <= value <= 1.0:
            offenders.append(f"line {line}={text}")
        values.append(value)

    if not values:
        raise InputValidationError(f"{path}: no p-values found")
    if offenders:
        raise InputValidationError(f"{path}: p-values outside [0, 1]", offenders)

    logger.info(f"Loaded {len(values)} p-values from {path}")
    return PValueSet(values=values)
