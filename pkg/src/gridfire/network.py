"""Transmission network: buses, branches, routes, and corridor cells.

Branches come in two kinds. Lines carry a geographic route (a polyline of
at least two points) and are the only branches that can ignite fires or be
damaged by them. Links are zero-geography branches (transformers and the
like) with no route and no spatial footprint.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .errors import GeometryError, InvalidInputError, TopologyError
from .geo import GeoPoint, GridIndex, RasterFrame, polyline_length_miles, traverse_cells

ROUTE_ENDPOINT_TOL_DEG = 1e-6


@dataclass(frozen=True)
class Bus:
    id: int
    location: GeoPoint


@dataclass(frozen=True)
class Branch:
    """One network branch. Lines have a route; links have an empty one."""

    id: int
    kind: str
    from_bus: int
    to_bus: int
    route: tuple[GeoPoint, ...] = ()
    length_miles: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in ("line", "link"):
            raise InvalidInputError(f"branch {self.id}: unknown kind {self.kind!r}")

    @property
    def is_line(self) -> bool:
        return self.kind == "line"


@dataclass(frozen=True)
class GridNetwork:
    buses: tuple[Bus, ...]
    branches: tuple[Branch, ...]

    def __post_init__(self) -> None:
        bus_ids = [b.id for b in self.buses]
        if len(set(bus_ids)) != len(bus_ids):
            raise TopologyError("duplicate bus ids")
        branch_ids = [b.id for b in self.branches]
        if len(set(branch_ids)) != len(branch_ids):
            raise TopologyError("duplicate branch ids")
        by_id = {b.id: b for b in self.buses}
        for br in self.branches:
            for end in (br.from_bus, br.to_bus):
                if end not in by_id:
                    raise TopologyError(f"branch {br.id} references missing bus {end}")
            if br.is_line:
                if len(br.route) < 2:
                    raise GeometryError(f"line {br.id} has {len(br.route)} route points, needs 2+")
                if br.length_miles <= 0.0:
                    raise GeometryError(f"line {br.id} has non-positive length {br.length_miles}")
                for bus_id, pt in ((br.from_bus, br.route[0]), (br.to_bus, br.route[-1])):
                    loc = by_id[bus_id].location
                    if (abs(loc.lat - pt.lat) > ROUTE_ENDPOINT_TOL_DEG
                            or abs(loc.lon - pt.lon) > ROUTE_ENDPOINT_TOL_DEG):
                        raise GeometryError(
                            f"line {br.id} route endpoint ({pt.lat}, {pt.lon}) does not "
                            f"coincide with bus {bus_id} at ({loc.lat}, {loc.lon})"
                        )
            else:
                if br.route:
                    raise GeometryError(f"link {br.id} must not carry a route")

    def bus(self, bus_id: int) -> Bus:
        for b in self.buses:
            if b.id == bus_id:
                return b
        raise TopologyError(f"no bus {bus_id}")

    def branch(self, branch_id: int) -> Branch:
        for b in self.branches:
            if b.id == branch_id:
                return b
        raise TopologyError(f"no branch {branch_id}")


def ignitable_lines(n: GridNetwork) -> list[Branch]:
    """All line-kind branches in ascending id order."""
    return sorted((b for b in n.branches if b.is_line), key=lambda b: b.id)


def line_cells(b: Branch, frame: RasterFrame) -> list[GridIndex]:
    """Raster cells crossed by a line's route, deduplicated in route order."""
    if not b.is_line:
        raise InvalidInputError(f"branch {b.id} is a {b.kind}, not a line")
    planar = [frame.to_planar(p) for p in b.route]
    seen: dict[GridIndex, None] = {}
    for p, q in zip(planar, planar[1:]):
        for cell in traverse_cells(p, q, frame):
            seen.setdefault(cell, None)
    return list(seen)


def load_network(path: str | Path) -> GridNetwork:
    """Read the network JSON (buses, branches with routes) and validate it."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except OSError as exc:
        raise InvalidInputError(f"cannot read network file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"{path}: invalid JSON: {exc}") from exc
    try:
        buses = tuple(
            Bus(id=int(b["id"]), location=GeoPoint(float(b["lat"]), float(b["lon"])))
            for b in raw["buses"]
        )
        branches = []
        for br in raw["branches"]:
            route = tuple(
                GeoPoint(float(lat), float(lon)) for lat, lon in br.get("route", [])
            )
            branches.append(
                Branch(
                    id=int(br["id"]),
                    kind=str(br["kind"]),
                    from_bus=int(br["from"]),
                    to_bus=int(br["to"]),
                    route=route,
                    length_miles=polyline_length_miles(route) if route else 0.0,
                )
            )
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInputError(f"{path}: malformed network record: {exc!r}") from exc
    return GridNetwork(buses=buses, branches=tuple(branches))


def write_network(n: GridNetwork, path: str | Path) -> None:
    doc = {
        "buses": [{"id": b.id, "lat": b.location.lat, "lon": b.location.lon} for b in n.buses],
        "branches": [],
    }
    for br in n.branches:
        rec: dict = {"id": br.id, "kind": br.kind, "from": br.from_bus, "to": br.to_bus}
        if br.is_line:
            rec["route"] = [[p.lat, p.lon] for p in br.route]
        doc["branches"].append(rec)
    Path(path).write_text(json.dumps(doc, indent=1) + "\n")
