"""Minimal ESRI ASCII grid reader and writer.

Files store the northernmost row first; in memory we keep row 0 at the
south edge to match the rest of the package, so both functions flip the
row order at the boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InvalidInputError

_HEADER_KEYS = ("ncols", "nrows", "xllcorner", "yllcorner", "cellsize", "nodata_value")


@dataclass(frozen=True)
class AsciiGrid:
    """One parsed grid: header fields plus data with row 0 at the south."""

    ncols: int
    nrows: int
    xllcorner: float
    yllcorner: float
    cellsize: float
    nodata: float
    data: np.ndarray

    def geometry(self) -> tuple[int, int, float, float, float]:
        return (self.ncols, self.nrows, self.xllcorner, self.yllcorner, self.cellsize)


def read_ascii_grid(path: str | Path) -> AsciiGrid:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InvalidInputError(f"cannot read grid file {path}: {exc}") from exc
    lines = text.splitlines()
    header: dict[str, float] = {}
    body_start = 0
    for i, line in enumerate(lines):
        parts = line.split()
        if len(parts) == 2 and parts[0].lower() in _HEADER_KEYS:
            try:
                header[parts[0].lower()] = float(parts[1])
            except ValueError as exc:
                raise InvalidInputError(f"{path}: bad header line {i + 1}: {line!r}") from exc
            body_start = i + 1
        else:
            break
    for key in _HEADER_KEYS[:5]:
        if key not in header:
            raise InvalidInputError(f"{path}: missing header field {key}")
    ncols = int(header["ncols"])
    nrows = int(header["nrows"])
    if ncols <= 0 or nrows <= 0:
        raise InvalidInputError(f"{path}: non-positive grid shape {nrows}x{ncols}")
    cellsize = header["cellsize"]
    if not (math.isfinite(cellsize) and cellsize > 0.0):
        raise InvalidInputError(f"{path}: non-positive cellsize {cellsize}")
    nodata = header.get("nodata_value", -9999.0)

    try:
        values = np.loadtxt(lines[body_start:], dtype=np.float64, ndmin=2)
    except ValueError as exc:
        raise InvalidInputError(f"{path}: unparseable grid body: {exc}") from exc
    if values.shape != (nrows, ncols):
        raise InvalidInputError(
            f"{path}: body shape {values.shape} does not match header {nrows}x{ncols}"
        )
    # File order is north first; flip so row 0 is the south row.
    data = np.ascontiguousarray(values[::-1, :])
    data.flags.writeable = False
    return AsciiGrid(ncols, nrows, header["xllcorner"], header["yllcorner"], cellsize, nodata, data)


def write_ascii_grid(path: str | Path, grid: AsciiGrid) -> None:
    path = Path(path)
    if grid.data.shape != (grid.nrows, grid.ncols):
        raise InvalidInputError(
            f"grid data shape {grid.data.shape} does not match header "
            f"{grid.nrows}x{grid.ncols}"
        )
    out = [
        f"ncols {grid.ncols}",
        f"nrows {grid.nrows}",
        f"xllcorner {grid.xllcorner!r}",
        f"yllcorner {grid.yllcorner!r}",
        f"cellsize {grid.cellsize!r}",
        f"NODATA_value {grid.nodata!r}",
    ]
    for row in grid.data[::-1, :]:
        out.append(" ".join(_fmt(v) for v in row))
    path.write_text("\n".join(out) + "\n")


def _fmt(v: float) -> str:
    """Shortest exact decimal for a float, integers without a trailing .0."""
    f = float(v)
    if f.is_integer() and abs(f) < 1e15:
        return str(int(f))
    return repr(f)
