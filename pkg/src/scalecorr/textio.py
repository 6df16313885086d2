"""Tab-delimited text serialization used by every stage.

All floats are written with 17 significant digits so that a written value
round-trips bit-exactly and re-runs produce byte-identical files.
"""

import numpy as np

from .errors import DataError

DELIM = "\t"


def fmt(x) -> str:
    """Render a float with 17 significant digits."""
    return f"{float(x):.17g}"


def write_matrix(path, row_labels, col_labels, matrix, corner="date",
                 formatter=fmt):
    """Write a labelled matrix: header row of column labels, first column of
    row labels."""
    matrix = np.asarray(matrix)
    with open(path, "w", newline="\n") as fh:
        fh.write(DELIM.join([corner] + list(col_labels)) + "\n")
        for label, row in zip(row_labels, matrix):
            fh.write(DELIM.join([str(label)] + [formatter(v) for v in row]) + "\n")


def read_matrix(path, parser=float):
    """Read a labelled matrix written by :func:`write_matrix`.

    Returns (row_labels, col_labels, matrix).
    """
    with open(path) as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    if not lines:
        raise DataError(f"{path}: empty file")
    header = lines[0].split(DELIM)
    col_labels = header[1:]
    row_labels = []
    rows = []
    for i, ln in enumerate(lines[1:], start=2):
        parts = ln.split(DELIM)
        if len(parts) != len(header):
            raise DataError(f"{path}: line {i} has {len(parts)} fields, "
                            f"expected {len(header)}")
        row_labels.append(parts[0])
        try:
            rows.append([parser(v) for v in parts[1:]])
        except ValueError as exc:
            raise DataError(f"{path}: line {i}: {exc}") from exc
    return row_labels, col_labels, np.array(rows)


def write_table(path, header, rows):
    """Write a plain table with a header row; values pre-formatted as str."""
    with open(path, "w", newline="\n") as fh:
        fh.write(DELIM.join(header) + "\n")
        for row in rows:
            fh.write(DELIM.join(str(v) for v in row) + "\n")


def write_keyvalues(path, pairs):
    """Write an ordered key<TAB>value file."""
    with open(path, "w", newline="\n") as fh:
        for key, value in pairs:
            fh.write(f"{key}{DELIM}{value}\n")


def read_keyvalues(path):
    pairs = {}
    with open(path) as fh:
        for ln in fh:
            ln = ln.rstrip("\n")
            if not ln.strip():
                continue
            key, _, value = ln.partition(DELIM)
            pairs[key] = value
    return pairs
