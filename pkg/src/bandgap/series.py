"""Finite real-valued sample sequences on integer windows, plus CSV I/O.

A Series stores one float64 value per window index (a vector in 1D, a
row-major matrix in 2D).  The CSV format has a header `t,value` (1D) or
`t1,t2,value` (2D); missing samples are simply absent rows, so writing a
masked series and reading it back reproduces both values and gaps.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import GeometryError, ParameterError
from .masks import Index, IndexWindow, ObservationMask


@dataclass(frozen=True, eq=False)
class Series:
    """Samples indexed by a window; values[offset_of(t)] is the sample at t."""

    window: IndexWindow
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.shape != self.window.shape:
            raise GeometryError(
                f"values shape {values.shape} does not match window shape {self.window.shape}"
            )
        object.__setattr__(self, "values", values)

    @property
    def ndim(self) -> int:
        return self.window.ndim

    def value_at(self, t: Index) -> float:
        if not self.window.contains(t):
            raise GeometryError(f"index {t!r} outside window [{self.window.lo}, {self.window.hi}]")
        return float(self.values[self.window.offset_of(t)])

    def restricted(self, window: IndexWindow) -> "Series":
        """Slice out a sub-window."""
        if window.ndim != self.ndim:
            raise GeometryError("sub-window dimensionality mismatch")
        if not (self.window.contains(window.lo) and self.window.contains(window.hi)):
            raise GeometryError("sub-window is not contained in the series window")
        lo_off = self.window.offset_of(window.lo)
        hi_off = self.window.offset_of(window.hi)
        slicer = tuple(slice(a, b + 1) for a, b in zip(lo_off, hi_off))
        return Series(window=window, values=self.values[slicer])

    @classmethod
    def zeros(cls, window: IndexWindow) -> "Series":
        return cls(window=window, values=np.zeros(window.shape))

    @classmethod
    def from_mapping(cls, window: IndexWindow, mapping) -> "Series":
        """Build from an index->value mapping; absent indices get zero."""
        values = np.zeros(window.shape)
        for t, v in mapping.items():
            if not window.contains(t):
                raise GeometryError(f"index {t!r} outside window")
            values[window.offset_of(t)] = float(v)
        return cls(window=window, values=values)


def _parse_header(fields: list[str]) -> int:
    fields = [f.strip().lower() for f in fields]
    if fields == ["t", "value"]:
        return 1
    if fields == ["t1", "t2", "value"]:
        return 2
    raise ParameterError(f"unrecognized series header {fields!r}; expected t,value or t1,t2,value")


def read_series_csv(path) -> tuple[Series, list[Index]]:
    """Read a series file; returns (series, absent-in-window indices).

    The window is the bounding box of the indices present in the file; any
    in-window index with no row is reported as absent (a gap) and its value
    is zero in the returned series.
    """
    entries: dict[Index, float] = {}
    with open(path, "r", newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        rows = [r for r in reader if r and not r[0].lstrip().startswith("#")]
    if not rows:
        raise ParameterError(f"series file {path} is empty")
    ndim = _parse_header(rows[0])
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != ndim + 1:
            raise ParameterError(f"{path}:{lineno}: expected {ndim + 1} fields, got {len(row)}")
        try:
            idx_parts = tuple(int(v) for v in row[:ndim])
            value = float(row[ndim])
        except ValueError as exc:
            raise ParameterError(f"{path}:{lineno}: {exc}") from exc
        t: Index = idx_parts[0] if ndim == 1 else idx_parts
        if t in entries:
            raise ParameterError(f"{path}:{lineno}: duplicate index {t!r}")
        entries[t] = value
    keys = list(entries.keys())
    if ndim == 1:
        window = IndexWindow(min(keys), max(keys))
    else:
        window = IndexWindow(
            (min(k[0] for k in keys), min(k[1] for k in keys)),
            (max(k[0] for k in keys), max(k[1] for k in keys)),
        )
    series = Series.from_mapping(window, entries)
    absent = [t for t in window.indices() if t not in entries]
    return series, absent


def write_series_csv(series: Series, path, mask: ObservationMask | None = None) -> None:
    """Write a series; with a mask, missing entries are omitted (kept absent)."""
    skip = set(mask.missing) if mask is not None else set()
    if mask is not None and mask.window != series.window:
        raise GeometryError("mask and series windows differ")
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        if series.ndim == 1:
            writer.writerow(["t", "value"])
            for t in series.window.indices():
                if t not in skip:
                    writer.writerow([t, repr(series.value_at(t))])
        else:
            writer.writerow(["t1", "t2", "value"])
            for t in series.window.indices():
                if t not in skip:
                    writer.writerow([t[0], t[1], repr(series.value_at(t))])
