"""Fire spread engine: directional ROS model, travel-time propagation."""

import math
from datetime import datetime, timedelta, timezone

import numpy as np
import pytest

from gridfire.errors import CoverageError, OutOfBoundsError
from gridfire.geo import GeoPoint, GridIndex, RasterFrame
from gridfire.landscape import LandscapeRaster, SynthSpec, default_catalog, synth_landscape
from gridfire.spread import (
    IgnitionSpec,
    SpreadEngine,
    SpreadParams,
    burned_area_acres,
    directional_ros,
    moisture_factor,
    simulate_spread,
    slope_factor,
    wind_factor,
)
from gridfire.weather import HOUR, WeatherSample, WeatherSeries

ORIGIN = GeoPoint(37.85, -120.10)
T0 = datetime(2022, 7, 1, 12, 0, tzinfo=timezone.utc)

GRASS = default_catalog().lookup(1)


def const_wx(hours=30, ws=0.0, wdir=0.0, rh=30.0, start=T0):
    return WeatherSeries(tuple(
        WeatherSample(start + h * HOUR, ws, wdir, 20.0, rh) for h in range(hours)
    ))


def flat_land(n=33, fuel=1, cell=30.0, seed=0):
    return synth_landscape(SynthSpec(
        nrows=n, ncols=n, cell_size=cell, origin=ORIGIN, seed=seed,
        slope_deg=0.0, aspect_deg=0.0, fuel_id=fuel,
    ))


def custom_land(fuel, cell=30.0, slope=None, aspect=None):
    fuel = np.asarray(fuel, dtype=np.int64)
    nrows, ncols = fuel.shape
    frame = RasterFrame(nrows=nrows, ncols=ncols, origin=ORIGIN, cell_size=cell)
    z = np.zeros((nrows, ncols))
    return LandscapeRaster(
        frame=frame,
        elevation=z.copy(),
        slope=z.copy() if slope is None else np.asarray(slope, dtype=float),
        aspect=z.copy() if aspect is None else np.asarray(aspect, dtype=float),
        fuel=fuel,
        canopy_cover=z.copy(),
        canopy_height=z.copy(),
        canopy_base=z.copy(),
        canopy_density=z.copy(),
        catalog=default_catalog(),
    )


# ----------------------------------------------------------------- ROS model


def test_ros_all_factors_unity():
    w = WeatherSample(T0, 0.0, 0.0, 20.0, 30.0)
    for theta in (0.0, 45.0, 137.0, 270.0):
        assert directional_ros(GRASS, 0.0, 0.0, w, theta) == GRASS.base_ros


def test_ros_grass_head_and_back():
    # wind 5 m/s, flat, RH at reference: head = 15*(1+0.4*5) = 45 m/min
    w = WeatherSample(T0, 5.0, 180.0, 20.0, 30.0)  # from south, blowing north
    head = directional_ros(GRASS, 0.0, 0.0, w, 0.0)  # travel north
    back = directional_ros(GRASS, 0.0, 0.0, w, 180.0)
    assert head == pytest.approx(45.0, rel=1e-12)
    ecc = math.sqrt(1.0 - 1.0 / 9.0)
    assert ecc == pytest.approx(0.9428090415820634, rel=1e-12)
    assert back == pytest.approx(45.0 * (1 - ecc) / (1 + ecc), rel=1e-12)
    assert back == pytest.approx(1.3246763185286738, rel=1e-9)
    assert abs(back - 1.325) < 1e-3


def test_ros_maximal_toward_wind():
    w = WeatherSample(T0, 4.0, 200.0, 20.0, 30.0)
    wind_to = (200.0 + 180.0) % 360.0
    at_head = directional_ros(GRASS, 0.0, 0.0, w, wind_to)
    for theta in np.linspace(0.0, 359.0, 60):
        assert directional_ros(GRASS, 0.0, 0.0, w, float(theta)) <= at_head + 1e-12


def test_ros_nonburnable_zero():
    rock = default_catalog().lookup(0)
    w = WeatherSample(T0, 5.0, 0.0, 20.0, 20.0)
    assert directional_ros(rock, 10.0, 90.0, w, 45.0) == 0.0


def test_slope_factor_geometry():
    # aspect 270 (downslope faces west) -> upslope toward east (90)
    up = slope_factor(30.0, 270.0, 90.0)
    assert up == pytest.approx(1.0 + 0.3 * math.tan(math.radians(30.0)), rel=1e-12)
    assert slope_factor(30.0, 270.0, 270.0) == 1.0  # downhill: no boost
    assert slope_factor(30.0, 270.0, 0.0) == pytest.approx(1.0, abs=1e-12)  # across
    assert slope_factor(0.0, 0.0, 123.0) == 1.0


def test_moisture_factor_clamps():
    assert moisture_factor(30.0, 1.0) == 1.0
    assert moisture_factor(1.0, 2.0) == 3.0  # (30/1)^2 clamped to 3
    assert moisture_factor(100.0, 3.0) == pytest.approx(0.1)  # clamped floor
    assert moisture_factor(0.0, 1.0) == 3.0  # rh guarded below 1


def test_wind_factor_eccentricity_cap():
    # strong wind pushes ecc past the cap
    params = SpreadParams()
    h = 1.0 + GRASS.wind_coeff * 20.0 ** GRASS.wind_exp
    raw_ecc = math.sqrt(1.0 - 1.0 / h**2)
    assert raw_ecc > 0.95
    w = WeatherSample(T0, 20.0, 180.0, 20.0, 30.0)
    head = directional_ros(GRASS, 0.0, 0.0, w, 0.0)
    back = directional_ros(GRASS, 0.0, 0.0, w, 180.0)
    assert head / back == pytest.approx((1 + 0.95) / (1 - 0.95), rel=1e-9)


# ------------------------------------------------------------- propagation


def ignite(cell, duration, line_id=1):
    return IgnitionSpec(line_id=line_id, ignition_index=1, cell=cell,
                        start=T0, duration_hours=duration)


def test_tiny_duration_burns_only_ignition_cell():
    land = flat_land(9)
    b = simulate_spread(ignite(GridIndex(4, 4), 1e-4), land, const_wx())
    assert b.arrival[4, 4] == 0.0
    assert b.status.sum() == 1
    assert b.warning is None


def test_circular_growth_zero_wind():
    land = flat_land(96)
    minutes = 60.0
    b = simulate_spread(ignite(GridIndex(48, 48), minutes / 60.0), land, const_wx())
    burned_m2 = b.status.sum() * 30.0 * 30.0
    expected = math.pi * (15.0 * minutes) ** 2
    assert abs(burned_m2 - expected) / expected < 0.12


def test_zero_fuel_barrier_blocks_fire():
    fuel = np.ones((5, 5), dtype=int)
    fuel[2, :] = 0  # full non-burnable middle row
    land = custom_land(fuel)
    b = simulate_spread(ignite(GridIndex(0, 2), 48.0), land, const_wx(hours=50))
    burned_rows = sorted(set(np.nonzero(b.status)[0].tolist()))
    assert burned_rows == [0, 1]
    assert not b.status[land.fuel == 0].any()


def test_nonburnable_cells_never_burn():
    land = synth_landscape(SynthSpec(
        nrows=48, ncols=48, cell_size=30.0, origin=ORIGIN, seed=3,
        slope_deg=5.0, aspect_deg=90.0,
        fuel_mix=((1, 0.5), (2, 0.2), (3, 0.1), (0, 0.2)), patch_cells=4.0,
    ))
    r, c = np.argwhere(land.fuel == 1)[0]
    b = simulate_spread(ignite(GridIndex(int(r), int(c)), 8.0), land,
                        const_wx(ws=3.0, wdir=225.0, rh=25.0))
    assert not b.status[land.fuel == 0].any()


def test_rotational_symmetry_zero_wind():
    land = flat_land(41)
    b = simulate_spread(ignite(GridIndex(20, 20), 0.5), land, const_wx())
    s = b.status
    for k in (1, 2, 3):
        np.testing.assert_array_equal(s, np.rot90(s, k))


def test_wind_bias_head_to_back_ratio():
    # wind from the south at 1 m/s: H = 1.4, ratio (1+e)/(1-e) ~ 5.66
    land = flat_land(112)
    b = simulate_spread(ignite(GridIndex(56, 56), 1.0), land,
                        const_wx(ws=1.0, wdir=180.0))
    rows = np.nonzero(b.status.any(axis=1))[0]
    up = rows.max() - 56
    down = 56 - rows.min()
    assert up >= down
    h = 1.0 + 0.4 * 1.0
    ecc = math.sqrt(1.0 - 1.0 / h**2)
    theory = (1.0 + ecc) / (1.0 - ecc)
    assert abs(up / down - theory) / theory < 0.15


def test_duration_monotone_pair():
    land = synth_landscape(SynthSpec(
        nrows=40, ncols=40, cell_size=30.0, origin=ORIGIN, seed=11,
        fuel_mix=((1, 0.6), (3, 0.3), (0, 0.1)), patch_cells=5.0,
        slope_deg=8.0, aspect_deg=180.0,
    ))
    r, c = np.argwhere(land.fuel == 1)[0]
    short = simulate_spread(ignite(GridIndex(int(r), int(c)), 0.7), land,
                            const_wx(ws=2.0, wdir=90.0, rh=40.0))
    long = simulate_spread(ignite(GridIndex(int(r), int(c)), 3.0), land,
                           const_wx(ws=2.0, wdir=90.0, rh=40.0))
    assert np.all(long.status[short.status])
    assert long.status.sum() > short.status.sum()


def test_nonburnable_ignition_warns_and_burns_nothing():
    fuel = np.ones((6, 6), dtype=int)
    fuel[3, 3] = 0
    land = custom_land(fuel)
    b = simulate_spread(ignite(GridIndex(3, 3), 2.0, line_id=17), land, const_wx())
    assert b.status.sum() == 0
    assert np.all(np.isinf(b.arrival))
    assert "non-burnable" in b.warning and "17" in b.warning


def test_out_of_bounds_ignition():
    land = flat_land(8)
    with pytest.raises(OutOfBoundsError):
        simulate_spread(ignite(GridIndex(8, 0), 1.0), land, const_wx())


def test_weather_coverage_checked_up_front():
    land = flat_land(8)
    with pytest.raises(CoverageError):
        simulate_spread(ignite(GridIndex(4, 4), 6.0), land, const_wx(hours=3))


def test_determinism_same_inputs():
    land = synth_landscape(SynthSpec(
        nrows=32, ncols=32, cell_size=30.0, origin=ORIGIN, seed=5,
        fuel_mix=((1, 0.7), (0, 0.3)), patch_cells=3.0,
        slope_deg=0.0, aspect_deg=0.0,
    ))
    r, c = np.argwhere(land.fuel == 1)[0]
    ig = ignite(GridIndex(int(r), int(c)), 1.5)
    wx = const_wx(ws=4.0, wdir=300.0, rh=22.0)
    a = simulate_spread(ig, land, wx)
    b = simulate_spread(ig, land, wx)
    np.testing.assert_array_equal(a.arrival, b.arrival)
    np.testing.assert_array_equal(a.status, b.status)


def test_burn_raster_invariants():
    land = flat_land(25)
    dur = 0.4
    b = simulate_spread(ignite(GridIndex(12, 12), dur), land, const_wx())
    finite = np.isfinite(b.arrival)
    np.testing.assert_array_equal(b.status, b.arrival <= dur * 60.0)
    assert finite[b.status].all()
    assert b.arrival[12, 12] == 0.0


def test_burned_area_acres():
    land = flat_land(25)
    b = simulate_spread(ignite(GridIndex(12, 12), 1e-4), land, const_wx())
    alpha = 30.0 * 30.0 * 0.000247105381
    assert burned_area_acres(b, alpha) == pytest.approx(alpha)
    empty = simulate_spread(ignite(GridIndex(12, 12), 1e-4),
                            custom_land(np.zeros((25, 25), dtype=int)), const_wx())
    assert burned_area_acres(empty, alpha) == 0.0


# ----------------------------------------------------- edge cost consistency


def test_edge_costs_match_scalar_model():
    land = synth_landscape(SynthSpec(
        nrows=16, ncols=16, cell_size=30.0, origin=ORIGIN, seed=9,
        fuel_mix=((1, 0.4), (2, 0.3), (3, 0.2), (0, 0.1)), patch_cells=3.0,
        elevation_relief=60.0,
    ))
    w = WeatherSample(T0, 3.5, 240.0, 18.0, 45.0)
    params = SpreadParams()
    eng = SpreadEngine(land, params)
    src, dst, minutes = eng.edge_costs(w)
    cat = land.catalog
    rng = np.random.default_rng(0)
    ncols = land.frame.ncols
    for k in rng.choice(len(src), size=200, replace=False):
        rs, cs = divmod(int(src[k]), ncols)
        rd, cd = divmod(int(dst[k]), ncols)
        dr, dc = rd - rs, cd - cs
        theta = math.degrees(math.atan2(dc, dr)) % 360.0
        dist = math.hypot(dr, dc) * 30.0
        ros_s = directional_ros(cat.lookup(int(land.fuel[rs, cs])),
                                float(land.slope[rs, cs]), float(land.aspect[rs, cs]),
                                w, theta, params)
        ros_d = directional_ros(cat.lookup(int(land.fuel[rd, cd])),
                                float(land.slope[rd, cd]), float(land.aspect[rd, cd]),
                                w, theta, params)
        if ros_s <= 0.0 or ros_d <= 0.0:
            expect = math.inf
        else:
            expect = dist * 0.5 * (1.0 / ros_s + 1.0 / ros_d)
            if expect > dist / params.min_ros:
                expect = math.inf
        got = float(minutes[k])
        if math.isinf(expect):
            assert math.isinf(got)
        else:
            assert got == pytest.approx(expect, rel=1e-9), (rs, cs, rd, cd)


# ------------------------------------------------------------ oracle checks


def bellman_ford_arrival(land, w, start_cell, params):
    """Exhaustive relaxation over the engine's own edge list."""
    eng = SpreadEngine(land, params)
    src, dst, minutes = eng.edge_costs(w)
    keep = np.isfinite(minutes)
    edges = list(zip(src[keep].tolist(), dst[keep].tolist(), minutes[keep].tolist()))
    n = land.frame.nrows * land.frame.ncols
    dist = [math.inf] * n
    dist[start_cell.row * land.frame.ncols + start_cell.col] = 0.0
    for _ in range(n):
        changed = False
        for s, d, m in edges:
            nd = dist[s] + m
            if nd < dist[d]:
                dist[d] = nd
                changed = True
        if not changed:
            break
    return np.array(dist).reshape(land.frame.nrows, land.frame.ncols)


@pytest.mark.parametrize("seed,duration", [(0, 0.5), (1, 2.0), (2, 6.0), (3, 1.0)])
def test_arrival_equals_bellman_ford(seed, duration):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(8, 21))
    land = synth_landscape(SynthSpec(
        nrows=n, ncols=n, cell_size=30.0, origin=ORIGIN, seed=seed,
        fuel_mix=((1, 0.45), (2, 0.25), (3, 0.15), (0, 0.15)),
        patch_cells=3.0,
        slope_deg=float(rng.uniform(0, 20)), aspect_deg=float(rng.uniform(0, 360)),
    ))
    w = WeatherSample(T0, float(rng.uniform(0, 6)), float(rng.uniform(0, 360)),
                      20.0, float(rng.uniform(15, 80)))
    wx = WeatherSeries(tuple(
        WeatherSample(T0 + h * HOUR, w.wind_speed, w.wind_dir_from, w.temperature,
                      w.rel_humidity) for h in range(int(duration) + 2)
    ))
    burnable = np.argwhere(land.fuel != 0)
    r, c = burnable[rng.integers(len(burnable))]
    cell = GridIndex(int(r), int(c))

    params = SpreadParams()
    oracle = bellman_ford_arrival(land, w, cell, params)
    got = simulate_spread(ignite(cell, duration), land, wx, params)

    horizon = duration * 60.0
    within = oracle <= horizon
    np.testing.assert_array_equal(got.status, within)
    assert np.all(got.arrival[within] == oracle[within])
    assert np.all(np.isinf(got.arrival[~within]))
