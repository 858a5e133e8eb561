"""Landscape raster: eight terrain/fuel layers plus the fuel catalog.

The layer set mirrors the common 8-band landscape file (elevation, slope,
aspect, fuel model, and four canopy descriptors). All layers are loaded and
validated; the surface spread model consumes fuel, slope, and aspect, while
the canopy layers ride along so the data path exists for later work.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import Mapping

import numpy as np
from scipy.ndimage import uniform_filter1d

from .asciigrid import AsciiGrid, read_ascii_grid, write_ascii_grid
from .errors import (
    CatalogError,
    InconsistentRasterError,
    InvalidInputError,
    MissingLayerError,
)
from .geo import GeoPoint, RasterFrame

ACRES_PER_SQUARE_METER = 0.000247105381

LAYER_FILES = {
    "elevation": "elevation.asc",
    "slope": "slope.asc",
    "aspect": "aspect.asc",
    "fuel": "fuel.asc",
    "canopy_cover": "canopy_cover.asc",
    "canopy_height": "canopy_height.asc",
    "canopy_base": "canopy_base.asc",
    "canopy_density": "canopy_density.asc",
}

CATALOG_HEADER = ["id", "name", "burnable", "base_ros_m_min", "wind_coeff", "wind_exp", "moisture_exp"]


@dataclass(frozen=True)
class FuelModel:
    """Spread parameters for one fuel class.

    base_ros is the rate of spread in m/min at zero wind, zero slope, and
    the reference humidity; wind_coeff and wind_exp shape the wind response
    (head/back ratio 1 + k_w * speed**b); moisture_exp controls humidity
    sensitivity.
    """

    id: int
    name: str
    burnable: bool
    base_ros: float
    wind_coeff: float
    wind_exp: float
    moisture_exp: float

    def __post_init__(self) -> None:
        if self.base_ros < 0:
            raise InvalidInputError(f"fuel {self.id}: negative base_ros {self.base_ros}")
        if self.burnable != (self.base_ros > 0):
            raise InvalidInputError(
                f"fuel {self.id}: burnable flag disagrees with base_ros {self.base_ros}"
            )
        for label, v in (("wind_coeff", self.wind_coeff),
                         ("wind_exp", self.wind_exp),
                         ("moisture_exp", self.moisture_exp)):
            if not (math.isfinite(v) and v >= 0):
                raise InvalidInputError(f"fuel {self.id}: {label} must be finite and >= 0, got {v}")


@dataclass(frozen=True)
class FuelCatalog:
    """Immutable id -> FuelModel map with a designated non-burnable id."""

    models: Mapping[int, FuelModel]
    non_burnable_id: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "models", MappingProxyType(dict(self.models)))
        nb = self.models.get(self.non_burnable_id)
        if nb is None:
            raise CatalogError(f"non-burnable id {self.non_burnable_id} missing from catalog")
        if nb.burnable:
            raise CatalogError(f"designated non-burnable fuel {self.non_burnable_id} is burnable")

    def lookup(self, fuel_id: int) -> FuelModel:
        try:
            return self.models[fuel_id]
        except KeyError:
            raise CatalogError(f"fuel id {fuel_id} not in catalog") from None

    def __contains__(self, fuel_id: int) -> bool:
        return fuel_id in self.models


def default_catalog() -> FuelCatalog:
    """Four-entry engine default: grass, shrub, timber litter, non-burnable.

    The numbers are deliberately round reference values, meant to be
    overridden by a catalog file when real fuel data is available.
    """
    models = {
        0: FuelModel(0, "nonburnable", False, 0.0, 0.0, 0.0, 0.0),
        1: FuelModel(1, "grass", True, 15.0, 0.4, 1.0, 1.0),
        2: FuelModel(2, "shrub", True, 8.0, 0.3, 1.0, 1.2),
        3: FuelModel(3, "timber_litter", True, 2.0, 0.15, 1.0, 1.5),
    }
    return FuelCatalog(models=models, non_burnable_id=0)


def load_catalog(path: str | Path) -> FuelCatalog:
    """Read a fuel catalog CSV (id,name,burnable,base_ros_m_min,...)."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise CatalogError(f"cannot read catalog {path}: {exc}") from exc
    reader = csv.DictReader(text.splitlines())
    if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != CATALOG_HEADER:
        raise CatalogError(f"{path}: expected header {','.join(CATALOG_HEADER)}")
    models: dict[int, FuelModel] = {}
    for i, row in enumerate(reader, start=2):
        try:
            fid = int(row["id"])
            model = FuelModel(
                id=fid,
                name=row["name"].strip(),
                burnable=_parse_flag(row["burnable"]),
                base_ros=float(row["base_ros_m_min"]),
                wind_coeff=float(row["wind_coeff"]),
                wind_exp=float(row["wind_exp"]),
                moisture_exp=float(row["moisture_exp"]),
            )
        except (ValueError, InvalidInputError, TypeError) as exc:
            raise CatalogError(f"{path}: bad catalog row {i}: {exc}") from exc
        if fid in models:
            raise CatalogError(f"{path}: duplicate fuel id {fid} at row {i}")
        models[fid] = model
    non_burnable = [m.id for m in models.values() if not m.burnable]
    if not non_burnable:
        raise CatalogError(f"{path}: catalog has no non-burnable entry")
    return FuelCatalog(models=models, non_burnable_id=min(non_burnable))


def write_catalog(catalog: FuelCatalog, path: str | Path) -> None:
    rows = [",".join(CATALOG_HEADER)]
    for fid in sorted(catalog.models):
        m = catalog.models[fid]
        rows.append(
            f"{m.id},{m.name},{1 if m.burnable else 0},"
            f"{m.base_ros!r},{m.wind_coeff!r},{m.wind_exp!r},{m.moisture_exp!r}"
        )
    Path(path).write_text("\n".join(rows) + "\n")


def _parse_flag(s: str) -> bool:
    v = s.strip().lower()
    if v in ("1", "true", "yes"):
        return True
    if v in ("0", "false", "no"):
        return False
    raise ValueError(f"bad flag value {s!r}")


@dataclass(frozen=True)
class LandscapeRaster:
    """Validated eight-layer study raster. Row 0 is the south edge.

    Arrays are read-only; the raster is shared across scenario workers
    without copying.
    """

    frame: RasterFrame
    elevation: np.ndarray
    slope: np.ndarray
    aspect: np.ndarray
    fuel: np.ndarray
    canopy_cover: np.ndarray
    canopy_height: np.ndarray
    canopy_base: np.ndarray
    canopy_density: np.ndarray
    catalog: FuelCatalog = field(default_factory=default_catalog)

    def __post_init__(self) -> None:
        shape = (self.frame.nrows, self.frame.ncols)
        for name in ("elevation", "slope", "aspect", "fuel", "canopy_cover",
                     "canopy_height", "canopy_base", "canopy_density"):
            arr = getattr(self, name)
            if arr.shape != shape:
                raise InconsistentRasterError(
                    f"layer {name} shape {arr.shape} does not match frame {shape}"
                )
            frozen = np.ascontiguousarray(arr)
            frozen.flags.writeable = False
            object.__setattr__(self, name, frozen)
        if not np.all((self.slope >= 0.0) & (self.slope < 90.0)):
            raise InvalidInputError("slope values outside [0, 90)")
        if not np.all((self.aspect >= 0.0) & (self.aspect < 360.0)):
            raise InvalidInputError("aspect values outside [0, 360)")
        if not np.all((self.canopy_cover >= 0.0) & (self.canopy_cover <= 100.0)):
            raise InvalidInputError("canopy cover outside [0, 100]")
        present = np.unique(self.fuel)
        for fid in present:
            if int(fid) not in self.catalog:
                raise CatalogError(f"fuel id {int(fid)} not in catalog")

    @property
    def nrows(self) -> int:
        return self.frame.nrows

    @property
    def ncols(self) -> int:
        return self.frame.ncols

    @property
    def cell_size(self) -> float:
        return self.frame.cell_size

    def burnable_mask(self) -> np.ndarray:
        """Boolean grid, True where the cell's fuel model can carry fire."""
        burnable_ids = [fid for fid, m in self.catalog.models.items() if m.burnable]
        return np.isin(self.fuel, burnable_ids)


def cell_acreage(r: LandscapeRaster) -> float:
    """Acres covered by one cell: the cell area times the m² to acre ratio."""
    return r.cell_size * r.cell_size * ACRES_PER_SQUARE_METER


def load_landscape(directory: str | Path, catalog: FuelCatalog | None = None) -> LandscapeRaster:
    """Load the eight layer files from a directory into one raster.

    All files must agree on grid geometry. Cells flagged NODATA in any
    layer are forced to the non-burnable fuel with zeroed terrain and
    canopy, which keeps fire from crossing unknown ground.
    """
    directory = Path(directory)
    if catalog is None:
        catalog = default_catalog()
    grids: dict[str, AsciiGrid] = {}
    for layer, fname in LAYER_FILES.items():
        fpath = directory / fname
        if not fpath.exists():
            raise MissingLayerError(f"missing landscape layer file {fpath}")
        grids[layer] = read_ascii_grid(fpath)

    ref_name, ref = "elevation", grids["elevation"]
    for layer, g in grids.items():
        if g.geometry() != ref.geometry():
            raise InconsistentRasterError(
                f"layer {layer} header {g.geometry()} does not match "
                f"{ref_name} header {ref.geometry()}"
            )

    frame = RasterFrame(
        nrows=ref.nrows,
        ncols=ref.ncols,
        origin=GeoPoint(ref.yllcorner, ref.xllcorner),
        cell_size=ref.cellsize,
    )

    nodata_mask = np.zeros((ref.nrows, ref.ncols), dtype=bool)
    values: dict[str, np.ndarray] = {}
    for layer, g in grids.items():
        mask = g.data == g.nodata
        nodata_mask |= mask
        values[layer] = np.where(mask, 0.0, g.data)

    fuel = np.rint(values["fuel"]).astype(np.int64)
    fuel[nodata_mask] = catalog.non_burnable_id
    for layer in ("elevation", "slope", "aspect",
                  "canopy_cover", "canopy_height", "canopy_base", "canopy_density"):
        values[layer] = np.where(nodata_mask, 0.0, values[layer])

    return LandscapeRaster(
        frame=frame,
        elevation=values["elevation"],
        slope=values["slope"],
        aspect=values["aspect"],
        fuel=fuel,
        canopy_cover=values["canopy_cover"],
        canopy_height=values["canopy_height"],
        canopy_base=values["canopy_base"],
        canopy_density=values["canopy_density"],
        catalog=catalog,
    )


def write_landscape(r: LandscapeRaster, directory: str | Path, nodata: float = -9999.0) -> None:
    """Write the eight layer files for a raster (inverse of load_landscape)."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for layer, fname in LAYER_FILES.items():
        data = getattr(r, "fuel" if layer == "fuel" else layer).astype(np.float64)
        grid = AsciiGrid(
            ncols=r.ncols,
            nrows=r.nrows,
            xllcorner=r.frame.origin.lon,
            yllcorner=r.frame.origin.lat,
            cellsize=r.cell_size,
            nodata=nodata,
            data=data,
        )
        write_ascii_grid(directory / fname, grid)


@dataclass(frozen=True)
class SynthSpec:
    """Recipe for a deterministic synthetic landscape.

    Elevation is base + linear gradient + optional smoothed random relief.
    Slope and aspect are either given uniform values or derived from the
    elevation surface by central differences. Fuel is one uniform id, or a
    seeded patch mosaic when fuel_mix is set.
    """

    nrows: int
    ncols: int
    cell_size: float = 30.0
    origin: GeoPoint = GeoPoint(37.85, -120.10)
    seed: int = 0
    elevation_base: float = 800.0
    elevation_gradient: tuple[float, float] = (0.0, 0.0)  # dz/dx east, dz/dy north (m per m)
    elevation_relief: float = 0.0
    slope_deg: float | None = None
    aspect_deg: float | None = None
    fuel_id: int = 1
    fuel_mix: tuple[tuple[int, float], ...] | None = None
    patch_cells: float = 10.0
    canopy_cover: float = 35.0
    canopy_height: float = 12.0
    canopy_base: float = 2.0
    canopy_density: float = 0.12


def synth_landscape(spec: SynthSpec, catalog: FuelCatalog | None = None) -> LandscapeRaster:
    """Build a LandscapeRaster from a SynthSpec, bit-reproducible per seed."""
    if spec.nrows <= 0 or spec.ncols <= 0:
        raise InvalidInputError(f"raster shape {spec.nrows}x{spec.ncols} not positive")
    if spec.cell_size <= 0:
        raise InvalidInputError(f"cell size {spec.cell_size} not positive")
    if catalog is None:
        catalog = default_catalog()
    frame = RasterFrame(spec.nrows, spec.ncols, spec.origin, spec.cell_size)

    y = (np.arange(spec.nrows, dtype=np.float64)[:, None] + 0.5) * spec.cell_size
    x = (np.arange(spec.ncols, dtype=np.float64)[None, :] + 0.5) * spec.cell_size
    gx, gy = spec.elevation_gradient
    elevation = spec.elevation_base + gx * x + gy * y + np.zeros((spec.nrows, spec.ncols))
    if spec.elevation_relief > 0.0:
        elevation = elevation + spec.elevation_relief * _smooth_field(
            spec.nrows, spec.ncols, spec.patch_cells, spec.seed, stream=1
        )

    if spec.slope_deg is not None:
        slope = np.full((spec.nrows, spec.ncols), float(spec.slope_deg))
    else:
        slope = _slope_from_elevation(elevation, spec.cell_size)
    if spec.aspect_deg is not None:
        aspect = np.full((spec.nrows, spec.ncols), float(spec.aspect_deg))
    else:
        aspect = _aspect_from_elevation(elevation, spec.cell_size)

    if spec.fuel_mix is None:
        fuel = np.full((spec.nrows, spec.ncols), int(spec.fuel_id), dtype=np.int64)
    else:
        fuel = _patch_mosaic(spec)

    const = lambda v: np.full((spec.nrows, spec.ncols), float(v))
    return LandscapeRaster(
        frame=frame,
        elevation=elevation,
        slope=slope,
        aspect=aspect,
        fuel=fuel,
        canopy_cover=const(spec.canopy_cover),
        canopy_height=const(spec.canopy_height),
        canopy_base=const(spec.canopy_base),
        canopy_density=const(spec.canopy_density),
        catalog=catalog,
    )


def _slope_from_elevation(elevation: np.ndarray, cell_size: float) -> np.ndarray:
    dzdy, dzdx = np.gradient(elevation, cell_size)
    return np.degrees(np.arctan(np.hypot(dzdx, dzdy)))


def _aspect_from_elevation(elevation: np.ndarray, cell_size: float) -> np.ndarray:
    """Compass direction the terrain faces (downslope); 0 where flat."""
    dzdy, dzdx = np.gradient(elevation, cell_size)
    aspect = np.degrees(np.arctan2(-dzdx, -dzdy)) % 360.0
    flat = (dzdx == 0.0) & (dzdy == 0.0)
    return np.where(flat, 0.0, aspect)


def _smooth_field(nrows: int, ncols: int, scale_cells: float, seed: int, stream: int) -> np.ndarray:
    """Smoothed standard-normal-ish field in [-1, 1], deterministic per seed."""
    rng = np.random.default_rng(np.random.SeedSequence([seed, stream]))
    raw = rng.standard_normal((nrows, ncols))
    k = max(1, int(round(scale_cells)))
    for axis in (0, 1):
        raw = uniform_filter1d(raw, size=k, axis=axis, mode="nearest")
    peak = np.max(np.abs(raw))
    return raw / peak if peak > 0 else raw


def _patch_mosaic(spec: SynthSpec) -> np.ndarray:
    """Carve one smooth field into patches whose area fractions match the
    fuel_mix weights (quantile thresholds keep the split exact)."""
    assert spec.fuel_mix is not None
    ids = [fid for fid, _ in spec.fuel_mix]
    weights = np.array([w for _, w in spec.fuel_mix], dtype=np.float64)
    if np.any(weights <= 0):
        raise InvalidInputError("fuel_mix weights must be positive")
    field = _smooth_field(spec.nrows, spec.ncols, spec.patch_cells, spec.seed, stream=100)
    order = np.argsort(field.ravel(), kind="stable")
    n = order.size
    cuts = np.round(np.cumsum(weights / weights.sum()) * n).astype(np.int64)
    cuts[-1] = n
    flat = np.empty(n, dtype=np.int64)
    start = 0
    for fid, stop in zip(ids, cuts):
        flat[order[start:stop]] = fid
        start = stop
    return flat.reshape(spec.nrows, spec.ncols)
