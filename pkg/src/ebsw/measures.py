"""Uniform-weight empirical measures and their CSV round-trip IO.

A measure is a set of n support points in R^d with implicit weight 1/n each.
The on-disk format is headerless CSV, one point per row, floats printed in
shortest round-trip decimal form.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .errors import EmptyInputError, MeasureFormatError, MeasureValidationError


@dataclass(frozen=True)
class EmpiricalMeasure:
    """n support points in R^d with uniform weights 1/n.

    The point array is copied on construction and marked read-only, so a
    measure can be shared across threads freely.
    """

    points: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=np.float64, copy=True)
        if pts.ndim != 2:
            raise MeasureValidationError(
                f"points must be a 2-d array of shape (n, d), got ndim={pts.ndim}"
            )
        if pts.shape[0] < 1 or pts.shape[1] < 1:
            raise MeasureValidationError(f"need n >= 1 and d >= 1, got shape {pts.shape}")
        if not np.isfinite(pts).all():
            raise MeasureValidationError("measure contains a non-finite coordinate")
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]


def load_measure(path: str | os.PathLike, format: str = "csv") -> EmpiricalMeasure:
    """Read a measure from a headerless CSV file, one point per row.

    Raises
    ------
    EmptyInputError
        if the file holds no rows.
    MeasureFormatError
        on ragged rows or tokens that do not parse as reals.
    MeasureValidationError
        if any entry is NaN or infinite.
    """
    if format != "csv":
        raise ValueError(f"unsupported measure format: {format!r}")
    with open(path, "r", encoding="ascii") as fh:
        lines = [ln.strip() for ln in fh]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise EmptyInputError(f"no points in {path}")
    rows = []
    width = None
    for i, ln in enumerate(lines):
        toks = ln.split(",")
        if width is None:
            width = len(toks)
        elif len(toks) != width:
            raise MeasureFormatError(
                f"{path}: row {i + 1} has {len(toks)} columns, expected {width}"
            )
        try:
            rows.append([float(t) for t in toks])
        except ValueError as exc:
            raise MeasureFormatError(f"{path}: row {i + 1}: {exc}") from exc
    pts = np.asarray(rows, dtype=np.float64)
    if not np.isfinite(pts).all():
        raise MeasureValidationError(f"{path}: non-finite entry")
    return EmpiricalMeasure(pts)


def save_measure(m: EmpiricalMeasure, path: str | os.PathLike) -> None:
    """Write a measure as headerless CSV; load_measure inverts this exactly."""
    with open(path, "w", encoding="ascii") as fh:
        for row in m.points:
            # repr gives the shortest decimal that round-trips the double
            fh.write(",".join(repr(float(x)) for x in row))
            fh.write("\n")
