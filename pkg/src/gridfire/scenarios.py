"""Scenario matrix construction and batch execution.

A study enumerates one fire scenario per (ignitable line, ignition point,
season). Scenarios are independent: the batch runner may execute them in
process or across a worker pool, but results always come back in spec
order and are bit-identical regardless of worker count. A scenario that
fails for a domain reason (say, an ignition point on rock) contributes a
zeroed result with a warning instead of aborting the batch, so per-line
averages keep their fixed denominator I.
"""

from __future__ import annotations

import math
import multiprocessing
from bisect import bisect_right
from dataclasses import dataclass, field
from datetime import datetime, timedelta
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import GridFireError, InvalidInputError, OutOfBoundsError
from .geo import GridIndex, PlanarPoint, RasterFrame
from .landscape import LandscapeRaster, cell_acreage
from .network import Branch, GridNetwork, ignitable_lines, line_cells
from .risk import CostParams, LineRisk, dilate_cells, lbl, rank_lines
from .spread import IgnitionSpec, SpreadEngine, SpreadParams, burned_area_acres
from .weather import WeatherSeries, season_starts

RESULTS_HEADER = "line_id,season,ignition_idx,burned_cells,burned_acres,affected_line_ids,affected_miles"

PLACEMENTS = ("even", "seeded-random")


@dataclass(frozen=True)
class StudyConfig:
    """Everything that defines a study besides the input datasets."""

    ignitions_per_line: int = 3
    seasons: tuple[datetime, ...] = field(default_factory=lambda: season_starts(2022))
    duration_hours: float = 24.0
    placement: str = "even"
    seed: int = 0
    spread: SpreadParams = field(default_factory=SpreadParams)
    costs: CostParams = field(default_factory=CostParams)
    buffer_cells: int = 0
    line_ids: Optional[tuple[int, ...]] = None

    def __post_init__(self) -> None:
        if self.ignitions_per_line < 1:
            raise InvalidInputError(f"ignitions_per_line must be >= 1, got {self.ignitions_per_line}")
        if not self.seasons:
            raise InvalidInputError("seasons must be non-empty")
        if not self.duration_hours > 0:
            raise InvalidInputError(f"duration {self.duration_hours} h must be positive")
        if self.placement not in PLACEMENTS:
            raise InvalidInputError(f"placement must be one of {PLACEMENTS}, got {self.placement!r}")
        if self.buffer_cells < 0:
            raise InvalidInputError(f"buffer_cells must be >= 0, got {self.buffer_cells}")
        object.__setattr__(self, "seasons", tuple(self.seasons))
        if self.line_ids is not None:
            object.__setattr__(self, "line_ids", tuple(self.line_ids))


@dataclass(frozen=True)
class ScenarioResult:
    line_id: int
    ignition_index: int
    season_index: int
    burned_cell_count: int
    burned_acres: float
    affected_line_ids: frozenset[int]
    affected_miles: float
    warning: Optional[str] = None


def place_ignitions(
    b: Branch, count: int, placement: str, seed: int, frame: RasterFrame
) -> list[GridIndex]:
    """Ignition cells along a line's route.

    `even` picks arc-length fractions k/(count+1); `seeded-random` draws
    `count` uniform fractions from a PRNG keyed by (seed, line id), sorted.
    Points are snapped to their containing cell; duplicate cells are kept,
    since each ignition index is its own scenario.
    """
    if count < 1:
        raise InvalidInputError(f"ignition count must be >= 1, got {count}")
    if placement not in PLACEMENTS:
        raise InvalidInputError(f"placement must be one of {PLACEMENTS}, got {placement!r}")
    if not b.is_line:
        raise InvalidInputError(f"branch {b.id} is a {b.kind}, not a line")

    pts = [frame.to_planar(p) for p in b.route]
    seg_len = [math.hypot(q.x - p.x, q.y - p.y) for p, q in zip(pts, pts[1:])]
    cum = [0.0]
    for s in seg_len:
        cum.append(cum[-1] + s)
    total = cum[-1]
    if total <= 0.0:
        raise InvalidInputError(f"line {b.id} has zero planar length")

    if placement == "even":
        fracs = [k / (count + 1) for k in range(1, count + 1)]
    else:
        rng = np.random.default_rng(np.random.SeedSequence([seed, b.id]))
        fracs = sorted(float(f) for f in rng.random(count))

    cells = []
    for f in fracs:
        target = f * total
        i = min(bisect_right(cum, target), len(seg_len)) - 1
        t = (target - cum[i]) / seg_len[i] if seg_len[i] > 0 else 0.0
        p, q = pts[i], pts[i + 1]
        point = PlanarPoint(p.x + t * (q.x - p.x), p.y + t * (q.y - p.y))
        cells.append(frame.cell_of(point))
    return cells


def build_matrix(n: GridNetwork, cfg: StudyConfig, frame: RasterFrame) -> list[IgnitionSpec]:
    """Full scenario list, ordered by (line id, season index, ignition index)."""
    lines = ignitable_lines(n)
    if cfg.line_ids is not None:
        wanted = set(cfg.line_ids)
        known = {b.id for b in lines}
        missing = wanted - known
        if missing:
            raise InvalidInputError(f"line_ids {sorted(missing)} are not ignitable lines")
        lines = [b for b in lines if b.id in wanted]
    specs = []
    for b in lines:
        cells = place_ignitions(b, cfg.ignitions_per_line, cfg.placement, cfg.seed, frame)
        for start in cfg.seasons:
            for idx, cell in enumerate(cells, start=1):
                specs.append(
                    IgnitionSpec(
                        line_id=b.id,
                        ignition_index=idx,
                        cell=cell,
                        start=start,
                        duration_hours=cfg.duration_hours,
                    )
                )
    return specs


@dataclass
class _BatchContext:
    engine: SpreadEngine
    wx: WeatherSeries
    alpha: float
    corridor_idx: dict[int, np.ndarray]
    length_miles: dict[int, float]
    season_index: dict[datetime, int]


_CTX: Optional[_BatchContext] = None


def _run_one(ctx: _BatchContext, spec: IgnitionSpec) -> ScenarioResult:
    season = ctx.season_index[spec.start]
    try:
        burn = ctx.engine.run(spec, ctx.wx)
    except GridFireError as exc:
        return ScenarioResult(
            line_id=spec.line_id,
            ignition_index=spec.ignition_index,
            season_index=season,
            burned_cell_count=0,
            burned_acres=0.0,
            affected_line_ids=frozenset(),
            affected_miles=0.0,
            warning=f"scenario failed: {exc}",
        )
    flat = burn.status.ravel()
    affected = frozenset(
        lid for lid, idx in ctx.corridor_idx.items() if bool(flat[idx].any())
    )
    return ScenarioResult(
        line_id=spec.line_id,
        ignition_index=spec.ignition_index,
        season_index=season,
        burned_cell_count=burn.burned_cell_count(),
        burned_acres=burned_area_acres(burn, ctx.alpha),
        affected_line_ids=affected,
        affected_miles=sum(ctx.length_miles[j] for j in affected),
        warning=burn.warning,
    )


def _worker(spec: IgnitionSpec) -> ScenarioResult:
    assert _CTX is not None, "batch context missing in worker"
    return _run_one(_CTX, spec)


def run_batch(
    specs: Sequence[IgnitionSpec],
    land: LandscapeRaster,
    wx: WeatherSeries,
    n: GridNetwork,
    cfg: StudyConfig,
    workers: int = 1,
) -> list[ScenarioResult]:
    """Execute every scenario; results in spec order, one per spec.

    Input problems that would poison the whole batch (weather coverage,
    out-of-raster ignitions or routes) are raised before any simulation.
    Per-scenario domain failures become zeroed results with warnings.
    """
    global _CTX
    if not specs:
        return []
    frame = land.frame
    for spec in specs:
        r, c = spec.cell.row, spec.cell.col
        if not (0 <= r < frame.nrows and 0 <= c < frame.ncols):
            raise OutOfBoundsError(
                f"ignition cell ({r}, {c}) of line {spec.line_id} outside raster"
            )
    epochs = math.ceil(cfg.duration_hours)
    for start in sorted({s.start for s in specs}):
        wx.at(start)
        wx.at(start + timedelta(hours=epochs - 1))

    corridor_idx: dict[int, np.ndarray] = {}
    length_miles: dict[int, float] = {}
    for br in ignitable_lines(n):
        cells = dilate_cells(
            line_cells(br, frame), cfg.buffer_cells, frame.nrows, frame.ncols
        )
        flat = np.fromiter(
            (r * frame.ncols + c for r, c in sorted(cells)), dtype=np.int64, count=len(cells)
        )
        corridor_idx[br.id] = flat
        length_miles[br.id] = br.length_miles

    season_index = {start: i for i, start in enumerate(cfg.seasons)}
    for spec in specs:
        if spec.start not in season_index:
            raise InvalidInputError(
                f"spec start {spec.start.isoformat()} not among configured seasons"
            )

    ctx = _BatchContext(
        engine=SpreadEngine(land, cfg.spread),
        wx=wx,
        alpha=cell_acreage(land),
        corridor_idx=corridor_idx,
        length_miles=length_miles,
        season_index=season_index,
    )

    if workers <= 1:
        return [_run_one(ctx, spec) for spec in specs]

    _CTX = ctx
    try:
        mp = multiprocessing.get_context("fork")
    except ValueError:
        _CTX = None
        return [_run_one(ctx, spec) for spec in specs]
    try:
        chunk = max(1, len(specs) // (workers * 4))
        with mp.Pool(processes=workers) as pool:
            return pool.map(_worker, specs, chunksize=chunk)
    finally:
        _CTX = None


def write_results(results: Sequence[ScenarioResult], path: str | Path) -> None:
    rows = [RESULTS_HEADER]
    for r in results:
        ids = ";".join(str(j) for j in sorted(r.affected_line_ids))
        rows.append(
            f"{r.line_id},{r.season_index},{r.ignition_index},"
            f"{r.burned_cell_count},{r.burned_acres!r},{ids},{r.affected_miles!r}"
        )
    Path(path).write_text("\n".join(rows) + "\n")


def read_results(path: str | Path) -> list[ScenarioResult]:
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise InvalidInputError(f"cannot read results file {path}: {exc}") from exc
    if not lines or lines[0].strip() != RESULTS_HEADER:
        raise InvalidInputError(f"{path}: expected header {RESULTS_HEADER!r}")
    out = []
    for i, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 7:
            raise InvalidInputError(f"{path}: row {i}: expected 7 fields, got {len(parts)}")
        try:
            ids = frozenset(int(t) for t in parts[5].split(";") if t)
            out.append(
                ScenarioResult(
                    line_id=int(parts[0]),
                    season_index=int(parts[1]),
                    ignition_index=int(parts[2]),
                    burned_cell_count=int(parts[3]),
                    burned_acres=float(parts[4]),
                    affected_line_ids=ids,
                    affected_miles=float(parts[6]),
                )
            )
        except ValueError as exc:
            raise InvalidInputError(f"{path}: row {i}: {exc}") from exc
    if not out:
        raise InvalidInputError(f"{path}: results file holds no scenario rows")
    return out


def season_tables(
    results: Sequence[ScenarioResult],
) -> tuple[dict[int, list[float]], dict[int, list[list[frozenset[int]]]]]:
    """Per-line per-season mean acres, and per-season affected-set lists.

    Returns (acres, sets): acres[j][s] is the mean burned acreage over the
    ignitions of line j in season s; sets[j][s] is the list of per-ignition
    affected-line-id sets, for feeding the reconstruction-loss formula.
    """
    if not results:
        raise InvalidInputError("no scenario results to aggregate")
    n_seasons = max(r.season_index for r in results) + 1
    lines = sorted({r.line_id for r in results})
    acres: dict[int, list[float]] = {}
    sets: dict[int, list[list[frozenset[int]]]] = {}
    for j in lines:
        acres[j] = []
        sets[j] = []
        for s in range(n_seasons):
            rows = [r for r in results if r.line_id == j and r.season_index == s]
            if not rows:
                raise InvalidInputError(f"line {j} has no scenarios for season {s}")
            acres[j].append(sum(r.burned_acres for r in rows) / len(rows))
            sets[j].append([r.affected_line_ids for r in rows])
    return acres, sets


def assess_results(
    results: Sequence[ScenarioResult], n: GridNetwork, costs: CostParams
) -> list[LineRisk]:
    """LineRisk records computed from raw scenario results via the loss
    formulas (environment loss from acreage, reconstruction loss from the
    affected sets and network line lengths)."""
    acres, sets = season_tables(results)
    season_miles = {
        j: [lbl(per_season, n, costs) / costs.cbl for per_season in sets[j]]
        for j in sets
    }
    return rank_lines(acres, season_miles, costs)
