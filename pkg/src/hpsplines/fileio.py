"""Dataset and model file formats.

Datasets are two-column CSV (``x,y``), with an optional header row and
optional third column of weights. Models are JSON documents carrying the
grid, frequency, penalty weight and coefficients; floats are serialized via
``repr`` (shortest round-trip form), so a written model reloads bit-exactly
and rewriting an unchanged model is byte-identical.

All writes go through a temporary file in the target directory followed by
an atomic rename, so readers never observe a half-written file.
"""

import csv
import json
import os
import tempfile

import numpy as np

from .basis import build_knot_grid
from .fitting import FitProblem, HPSplineModel

#: Version stamp of the model JSON layout.
MODEL_FORMAT_VERSION = 1

#: Coefficient normalization tag; identifies pure dilation (no 1/h factor)
#: so penalty weights stay comparable across files.
NORMALIZATION_TAG = 'dilation-eq6'


class DatasetFormatError(ValueError):
    """A dataset file failed to parse.

    Attributes
    ----------
    line : int
        1-based line number of the offending row.
    """

    def __init__(self, line, message):
        self.line = line
        super().__init__(f'line {line}: {message}')


def _atomic_write_text(path, text):
    directory = os.path.dirname(os.path.abspath(path)) or '.'
    fd, tmp = tempfile.mkstemp(dir=directory, prefix='.tmp-', suffix='~')
    try:
        with os.fdopen(fd, 'w', newline='') as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _fmt(value):
    """Shortest decimal that round-trips the float exactly."""
    return repr(float(value))


def read_dataset(path):
    """Parse a CSV dataset into a :class:`FitProblem`.

    Columns are ``x, y`` and optionally ``w``. A first row that does not
    parse as numbers is treated as a header. Blank lines are skipped.

    Raises
    ------
    DatasetFormatError
        With the 1-based line number of the first malformed row.
    """
    xs, ys, ws = [], [], []
    with open(path, newline='') as handle:
        reader = csv.reader(handle)
        for lineno, row in enumerate(reader, start=1):
            cells = [c.strip() for c in row if c.strip() != '']
            if not cells:
                continue
            if len(cells) not in (2, 3):
                raise DatasetFormatError(
                    lineno, f'expected 2 or 3 columns, got {len(cells)}'
                )
            try:
                nums = [float(c) for c in cells]
            except ValueError:
                if lineno == 1:
                    continue  # header row
                raise DatasetFormatError(
                    lineno, f'could not parse numbers from {cells!r}'
                ) from None
            xs.append(nums[0])
            ys.append(nums[1])
            if len(nums) == 3:
                ws.append(nums[2])
            elif ws:
                raise DatasetFormatError(
                    lineno, 'weight column present in some rows but not all'
                )
    if len(xs) < 2:
        raise DatasetFormatError(1, 'need at least two data rows')
    if ws and len(ws) != len(xs):
        raise DatasetFormatError(1, 'weight column present in some rows but not all')
    try:
        return FitProblem(
            np.asarray(xs), np.asarray(ys), np.asarray(ws) if ws else None
        )
    except ValueError as exc:
        raise DatasetFormatError(1, str(exc)) from None


def write_table(path, header, columns, fmt='csv'):
    """Write named columns as CSV or JSON with round-trip float formatting."""
    columns = [np.asarray(c, dtype=np.float64) for c in columns]
    if fmt == 'csv':
        lines = [','.join(header)]
        for row in zip(*columns):
            lines.append(','.join(_fmt(v) for v in row))
        _atomic_write_text(path, '\n'.join(lines) + '\n')
    elif fmt == 'json':
        doc = {
            'columns': list(header),
            'rows': [[float(v) for v in row] for row in zip(*columns)],
        }
        _atomic_write_text(path, _dumps(doc))
    else:
        raise ValueError(f"format must be 'csv' or 'json', got {fmt!r}")


def _dumps(doc):
    # repr-style floats inside json: go through a string substitution-free
    # path by letting json handle floats (json uses repr for floats already).
    return json.dumps(doc, indent=2, sort_keys=True) + '\n'


def save_model(model, path):
    """Serialize a fitted model to JSON (atomic write)."""
    doc = {
        'format_version': MODEL_FORMAT_VERSION,
        'normalization': NORMALIZATION_TAG,
        'alpha': float(model.alpha),
        'lambda': float(model.lam),
        'n': int(model.grid.n),
        'a': float(model.grid.a),
        'b': float(model.grid.b),
        'coefficients': [float(c) for c in model.coefficients],
    }
    _atomic_write_text(path, _dumps(doc))


def load_model(path):
    """Load a model written by :func:`save_model`."""
    with open(path) as handle:
        doc = json.load(handle)
    version = doc.get('format_version')
    if version != MODEL_FORMAT_VERSION:
        raise ValueError(f'unsupported model format version {version!r}')
    tag = doc.get('normalization')
    if tag != NORMALIZATION_TAG:
        raise ValueError(
            f'unsupported normalization {tag!r}; expected {NORMALIZATION_TAG!r}'
        )
    grid = build_knot_grid(doc['a'], doc['b'], doc['n'])
    return HPSplineModel(
        grid,
        float(doc['alpha']),
        float(doc['lambda']),
        np.asarray(doc['coefficients'], dtype=np.float64),
    )
