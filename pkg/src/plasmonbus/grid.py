"""Rectangular two-axis result grids with CSV emission."""

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np


@dataclass
class SweepGrid:
    """Scalar field on the outer product of two sorted axes.

    Missing cells hold NaN in ``values`` and ``True`` in ``failed``; the reason
    is kept in ``errors``.  ``records`` holds per-cell metadata (e.g. the
    optimizer result) keyed by ``(i, j)``.
    """

    x_name: str
    x_values: np.ndarray
    y_name: str
    y_values: np.ndarray
    field_name: str
    values: np.ndarray = None
    failed: np.ndarray = None
    records: dict = field(default_factory=dict)
    errors: dict = field(default_factory=dict)

    def __post_init__(self):
        self.x_values = np.asarray(self.x_values, dtype=float)
        self.y_values = np.asarray(self.y_values, dtype=float)
        if self.x_values.size == 0 or self.y_values.size == 0:
            raise ValueError("grid axes must be nonempty")
        for name, ax in ((self.x_name, self.x_values), (self.y_name, self.y_values)):
            if np.any(np.diff(ax) <= 0):
                raise ValueError(f"axis {name} must be sorted strictly ascending")
        shape = (self.x_values.size, self.y_values.size)
        if self.values is None:
            self.values = np.full(shape, np.nan)
        if self.failed is None:
            self.failed = np.zeros(shape, dtype=bool)

    @property
    def shape(self):
        return self.values.shape

    def set(self, i, j, value, record=None):
        self.values[i, j] = value
        self.failed[i, j] = False
        if record is not None:
            self.records[(i, j)] = record

    def mark_failed(self, i, j, reason):
        self.values[i, j] = np.nan
        self.failed[i, j] = True
        self.errors[(i, j)] = str(reason)

    def cells(self):
        for i, x in enumerate(self.x_values):
            for j, y in enumerate(self.y_values):
                yield i, j, x, y

    def to_csv(self, columns, row_fn, header_lines=()):
        """Render as CSV.

        ``columns`` are the header names; ``row_fn(i, j, x, y)`` returns the row
        values for one cell.  ``header_lines`` are emitted first as ``#`` comments.
        """
        buf = io.StringIO()
        for line in header_lines:
            buf.write(f"# {line}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for i, j, x, y in self.cells():
            writer.writerow([_fmt(v) for v in row_fn(i, j, x, y)])
        return buf.getvalue()


def _fmt(v):
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        return repr(v)
    return v
