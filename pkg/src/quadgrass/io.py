"""Plain-text matrix and fragment files, JSON reports and CSV traces.

Matrix files: a header line "rows cols" followed by ``rows`` lines of
``cols`` whitespace-separated decimals. Blank lines and lines starting with
``#`` are ignored. Fragment files: one 0-based index per line.
"""

import csv
import json
import logging
from pathlib import Path

import numpy as np

from .errors import DimensionError, ParseError, ValidationError

log = logging.getLogger(__name__)

SYM_WARN = 1e-8
SYM_HARD = 1e-4


def _content_lines(path):
    text = Path(path).read_text()
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if stripped and not stripped.startswith("#"):
            yield lineno, line


def _parse_float(path, lineno, line, token, start):
    col = line.index(token, start) + 1
    try:
        return float(token), col
    except ValueError:
        raise ParseError(path, lineno, col, f"not a number: {token!r}") from None


def read_matrix(path):
    """Parse a (possibly rectangular) matrix file."""
    lines = list(_content_lines(path))
    if not lines:
        raise ParseError(path, 1, 1, "empty file, expected header 'rows cols'")
    lineno, header = lines[0]
    parts = header.split()
    if len(parts) != 2:
        raise ParseError(path, lineno, 1, f"header must be 'rows cols', got {header.strip()!r}")
    try:
        rows, cols = int(parts[0]), int(parts[1])
    except ValueError:
        raise ParseError(path, lineno, 1, f"non-integer header {header.strip()!r}") from None
    if rows < 1 or cols < 1:
        raise ParseError(path, lineno, 1, f"invalid shape {rows}x{cols}")
    body = lines[1:]
    if len(body) != rows:
        at = body[rows][0] if len(body) > rows else (body[-1][0] + 1 if body else lineno + 1)
        raise ParseError(path, at, 1, f"expected {rows} rows, found {len(body)}")
    X = np.empty((rows, cols))
    for i, (ln, line) in enumerate(body):
        tokens = line.split()
        if len(tokens) != cols:
            col = len(line) - len(line.lstrip()) + 1
            raise ParseError(path, ln, col, f"row {i} has {len(tokens)} entries, expected {cols}")
        pos = 0
        for j, tok in enumerate(tokens):
            X[i, j], col = _parse_float(path, ln, line, tok, pos)
            pos = col - 1 + len(tok)
        if not np.all(np.isfinite(X[i])):
            raise ParseError(path, ln, 1, "non-finite entry")
    return X


def load_matrix(path, warn=SYM_WARN, hard=SYM_HARD):
    """Load a symmetric matrix; mild asymmetry is symmetrized with a warning."""
    X = read_matrix(path)
    if X.shape[0] != X.shape[1]:
        raise DimensionError(f"{path}: matrix is {X.shape[0]}x{X.shape[1]}, expected square")
    asym = np.linalg.norm(X - X.T) / max(np.linalg.norm(X), np.finfo(float).tiny)
    if asym > hard:
        raise ValidationError(f"{path}: relative asymmetry {asym:.3e} exceeds {hard:g}")
    if asym > warn:
        log.warning("%s: relative asymmetry %.3e, symmetrizing", path, asym)
    return 0.5 * (X + X.T)


def write_matrix(path, X):
    X = np.atleast_2d(np.asarray(X, dtype=float))
    with open(path, "w") as fh:
        fh.write(f"{X.shape[0]} {X.shape[1]}\n")
        for row in X:
            fh.write(" ".join(f"{v:.17g}" for v in row) + "\n")


def load_fragment(path):
    idx = []
    for lineno, line in _content_lines(path):
        tok = line.strip()
        try:
            idx.append(int(tok))
        except ValueError:
            col = line.index(tok) + 1
            raise ParseError(path, lineno, col, f"expected a 0-based integer index, got {tok!r}") from None
    if not idx:
        raise ParseError(path, 1, 1, "fragment file lists no indices")
    return idx


def write_fragment(path, indices):
    Path(path).write_text("".join(f"{int(i)}\n" for i in indices))


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def write_json(path, payload):
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, default=_jsonable)
        fh.write("\n")


TRACE_COLUMNS = ("iter", "J", "residual", "alpha")


def write_trace(path, trace, method=None):
    """CSV trace. ``alpha`` holds each solver's step column (damping, step length or radius)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow((("method",) if method else ()) + TRACE_COLUMNS)
        for row in trace:
            w.writerow(((method,) if method else ()) + _fmt_row(row))


def _fmt_row(row):
    return (str(row.iter), repr(float(row.objective)), repr(float(row.residual)), repr(float(row.step)))


def write_bench(path, reports):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("method",) + TRACE_COLUMNS)
        for rep in reports:
            for row in rep.trace:
                w.writerow((rep.method,) + _fmt_row(row))
