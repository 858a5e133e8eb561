"""Financial risk metrics: burned-environment and burned-line losses.

For each line j the engine averages, over its I ignition scenarios, the
environmental loss (burned acres times cost per acre) and the line
reconstruction loss (full length of every affected line times cost per
mile). Season values are averaged, the two components summed, and the
total normalized by the worst line to give the risk metric M in [0, 1].
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import DegenerateNormalizationError, InvalidInputError, TopologyError
from .geo import GridIndex
from .network import GridNetwork, ignitable_lines, line_cells
from .spread import BurnRaster


@dataclass(frozen=True)
class CostParams:
    """Unit damage costs: dollars per burned acre and per line mile."""

    cbe: float = 20_000.0
    cbl: float = 200_000.0

    def __post_init__(self) -> None:
        if not self.cbe > 0:
            raise InvalidInputError(f"cbe must be positive, got {self.cbe}")
        if not self.cbl > 0:
            raise InvalidInputError(f"cbl must be positive, got {self.cbl}")


@dataclass(frozen=True)
class LineRisk:
    """Aggregated loss figures and the normalized metric for one line."""

    line_id: int
    lbe: float
    lbl: float
    wfl: float
    metric: float
    season_acres: tuple[float, ...]
    season_miles: tuple[float, ...]


def seasonal_average(values: Sequence[float]) -> float:
    """Arithmetic mean across seasons."""
    if len(values) == 0:
        raise InvalidInputError("no seasonal values to average")
    return sum(values) / len(values)


def lbe(burned_acres: Sequence[float], costs: CostParams) -> float:
    """Burned-environment loss: acreage cost averaged over ignitions."""
    if len(burned_acres) == 0:
        raise InvalidInputError("lbe needs at least one ignition record")
    return sum(a * costs.cbe for a in burned_acres) / len(burned_acres)


def line_length_miles(n: GridNetwork, line_id: int) -> float:
    br = n.branch(line_id)
    if not br.is_line:
        raise TopologyError(f"branch {line_id} is a {br.kind}, not a line")
    return br.length_miles


def lbl(affected_sets: Sequence[Iterable[int]], n: GridNetwork, costs: CostParams) -> float:
    """Line reconstruction loss: full length of every affected line,
    costed per mile, averaged over ignitions."""
    if len(affected_sets) == 0:
        raise InvalidInputError("lbl needs at least one ignition record")
    total = 0.0
    for ids in affected_sets:
        total += sum(line_length_miles(n, j) * costs.cbl for j in ids)
    return total / len(affected_sets)


def wfl(lbe_dollars: float, lbl_dollars: float) -> float:
    """Total wildfire financial loss for a line."""
    if lbe_dollars < 0 or lbl_dollars < 0:
        raise InvalidInputError("loss components cannot be negative")
    return lbe_dollars + lbl_dollars


def risk_metric(wfl_by_line: Mapping[int, float]) -> dict[int, float]:
    """Normalize per-line losses by the worst line; the argmax gets 1."""
    if not wfl_by_line:
        raise InvalidInputError("no lines to rank")
    for line, v in wfl_by_line.items():
        if v < 0:
            raise InvalidInputError(f"line {line} has negative loss {v}")
    top = max(wfl_by_line.values())
    if top <= 0:
        raise DegenerateNormalizationError(
            "every line has zero loss; the risk metric is undefined"
        )
    return {line: v / top for line, v in wfl_by_line.items()}


def dilate_cells(
    cells: Iterable[GridIndex], buffer_cells: int, nrows: int, ncols: int
) -> set[tuple[int, int]]:
    """Chebyshev dilation of a cell set, clipped to the grid."""
    if buffer_cells < 0:
        raise InvalidInputError(f"buffer_cells must be >= 0, got {buffer_cells}")
    if buffer_cells == 0:
        return {(c.row, c.col) for c in cells}
    span = range(-buffer_cells, buffer_cells + 1)
    out: set[tuple[int, int]] = set()
    for cell in cells:
        for dr in span:
            r = cell.row + dr
            if not 0 <= r < nrows:
                continue
            for dc in span:
                c = cell.col + dc
                if 0 <= c < ncols:
                    out.add((r, c))
    return out


def affected_lines(b: BurnRaster, n: GridNetwork, buffer_cells: int = 0) -> set[int]:
    """Ids of lines whose (dilated) corridor touches any burned cell."""
    out: set[int] = set()
    for br in ignitable_lines(n):
        corridor = dilate_cells(
            line_cells(br, b.frame), buffer_cells, b.frame.nrows, b.frame.ncols
        )
        if any(b.status[r, c] for r, c in corridor):
            out.add(br.id)
    return out


def rank_lines(
    season_acres: Mapping[int, Sequence[float]],
    season_miles: Mapping[int, Sequence[float]],
    costs: CostParams,
) -> list[LineRisk]:
    """Build per-line risk records from per-season means, sorted by metric.

    season_acres[j] and season_miles[j] hold, for line j, the per-season
    mean burned acres and mean affected line miles (already averaged over
    ignitions). Sorting is by metric descending, then line id.
    """
    if set(season_acres) != set(season_miles):
        raise InvalidInputError("acre and mile tables cover different line sets")
    lbe_by = {j: costs.cbe * seasonal_average(v) for j, v in season_acres.items()}
    lbl_by = {j: costs.cbl * seasonal_average(v) for j, v in season_miles.items()}
    wfl_by = {j: wfl(lbe_by[j], lbl_by[j]) for j in lbe_by}
    metric = risk_metric(wfl_by)
    records = [
        LineRisk(
            line_id=j,
            lbe=lbe_by[j],
            lbl=lbl_by[j],
            wfl=wfl_by[j],
            metric=metric[j],
            season_acres=tuple(season_acres[j]),
            season_miles=tuple(season_miles[j]),
        )
        for j in season_acres
    ]
    records.sort(key=lambda rec: (-rec.metric, rec.line_id))
    return records
