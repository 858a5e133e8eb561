"""Command-line front end.

Four subcommands cover the whole workflow:

    synth     write the bundled study inputs (landscape layers, fuel catalog,
              network, hourly weather, reference tables) plus a ready-to-run
              study.ini into --out
    simulate  run the scenario batch described by a config file and write
              results.csv + run_meta.json
    assess    turn scenario results (or the shipped reference tables, via
              --from-tables) into loss tables, a ranking, and plot data
    report    print a human-readable summary of an assess output directory

Exit codes: 0 success, 2 usage or input error, 3 unexpected internal error.
All commands are deterministic given the same inputs and seed; nothing
wall-clock dependent is written to output files.
"""

from __future__ import annotations

import argparse
import configparser
import hashlib
import json
import sys
import time
import traceback
from datetime import datetime, timezone
from pathlib import Path

from .errors import GridFireError, InvalidInputError
from .fixtures import (
    SEASON_LABELS,
    STUDY_CELL_M,
    STUDY_NROWS,
    ieee30_network,
    study_landscape,
    study_weather,
    write_reference_tables,
)
from .landscape import default_catalog, load_catalog, load_landscape, write_catalog, write_landscape
from .network import ignitable_lines, load_network, write_network
from .risk import CostParams, LineRisk, rank_lines, seasonal_average
from .scenarios import StudyConfig, assess_results, build_matrix, read_results, run_batch, write_results
from .spread import SpreadParams
from .weather import TIMESTAMP_FORMAT, load_weather, season_starts, write_weather

SECTIONS = ("paths", "study", "spread", "costs")

DEFAULT_INI = """\
[paths]
landscape_dir = landscape
fuel_catalog = fuel_catalog.csv
network = network.json
weather = weather.csv

[study]
ignitions_per_line = 3
duration_hours = 24.0
placement = even
seed = {seed}
year = {year}
ignition_hour = 12
buffer_cells = 0

[spread]
neighborhood = 16
humidity_ref_pct = 30.0
min_ros_m_min = 0.01
max_eccentricity = 0.95

[costs]
cbe_per_acre = 20000.0
cbl_per_mile = 200000.0
"""


def _read_config(path, overrides, require):
    """Parse an ini file plus any --set section.key=value overrides."""
    cp = configparser.ConfigParser()
    p = Path(path)
    if p.is_file():
        cp.read(p)
    elif require:
        raise InvalidInputError(f"config file not found: {p}")
    for s in SECTIONS:
        if not cp.has_section(s):
            cp.add_section(s)
    for item in overrides:
        key, sep, value = item.partition("=")
        if not sep or "." not in key:
            raise InvalidInputError(f"--set expects section.key=value, got {item!r}")
        section, _, option = key.partition(".")
        if not cp.has_section(section):
            cp.add_section(section)
        cp.set(section.strip(), option.strip(), value.strip())
    return cp


def _config_digest(cp, seed):
    items = []
    for s in sorted(cp.sections()):
        for k in sorted(cp.options(s)):
            items.append(f"{s}.{k}={cp.get(s, k)}")
    items.append(f"effective_seed={seed}")
    return hashlib.sha256("\n".join(items).encode()).hexdigest()


def _seasons_from_config(cp):
    raw = cp.get("study", "seasons", fallback="").strip()
    if raw:
        out = []
        for tok in raw.split(","):
            out.append(datetime.strptime(tok.strip(), TIMESTAMP_FORMAT).replace(tzinfo=timezone.utc))
        return tuple(out)
    year = cp.getint("study", "year", fallback=2022)
    hour = cp.getint("study", "ignition_hour", fallback=12)
    return season_starts(year, hour)


def _study_from_config(cp, seed_override):
    seed = cp.getint("study", "seed", fallback=0)
    if seed_override is not None:
        seed = seed_override
    raw_ids = cp.get("study", "line_ids", fallback="").strip()
    line_ids = tuple(int(t) for t in raw_ids.split(",") if t.strip()) or None
    spread = SpreadParams(
        neighborhood=cp.getint("spread", "neighborhood", fallback=16),
        humidity_ref=cp.getfloat("spread", "humidity_ref_pct", fallback=30.0),
        min_ros=cp.getfloat("spread", "min_ros_m_min", fallback=0.01),
        max_eccentricity=cp.getfloat("spread", "max_eccentricity", fallback=0.95),
    )
    costs = CostParams(
        cbe=cp.getfloat("costs", "cbe_per_acre", fallback=20_000.0),
        cbl=cp.getfloat("costs", "cbl_per_mile", fallback=200_000.0),
    )
    return StudyConfig(
        ignitions_per_line=cp.getint("study", "ignitions_per_line", fallback=3),
        seasons=_seasons_from_config(cp),
        duration_hours=cp.getfloat("study", "duration_hours", fallback=24.0),
        placement=cp.get("study", "placement", fallback="even"),
        seed=seed,
        spread=spread,
        costs=costs,
        buffer_cells=cp.getint("study", "buffer_cells", fallback=0),
        line_ids=line_ids,
    )


def _resolve(base, value):
    p = Path(value)
    return p if p.is_absolute() else base / p


def _paths_from_config(cp, config_path):
    base = Path(config_path).resolve().parent
    return {
        "landscape_dir": _resolve(base, cp.get("paths", "landscape_dir", fallback="landscape")),
        "fuel_catalog": _resolve(base, cp.get("paths", "fuel_catalog", fallback="fuel_catalog.csv")),
        "network": _resolve(base, cp.get("paths", "network", fallback="network.json")),
        "weather": _resolve(base, cp.get("paths", "weather", fallback="weather.csv")),
    }


# ---------------------------------------------------------------- commands


def cmd_synth(args):
    cp = _read_config(args.config, args.overrides, require=False)
    seed = cp.getint("study", "seed", fallback=0)
    year = cp.getint("study", "year", fallback=2022)
    if args.seed is not None:
        seed = args.seed
    if args.year is not None:
        year = args.year

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    size = args.size if args.size is not None else STUDY_NROWS
    cell = args.cell_size if args.cell_size is not None else STUDY_CELL_M
    land = study_landscape(seed=seed, nrows=size, ncols=size, cell_size=cell)
    net = ieee30_network(width_m=size * cell, height_m=size * cell)
    wx = study_weather(year=year, seed=seed)

    write_landscape(land, out / "landscape")
    write_catalog(land.catalog, out / "fuel_catalog.csv")
    write_network(net, out / "network.json")
    write_weather(wx, out / "weather.csv")
    write_reference_tables(out)
    (out / "study.ini").write_text(DEFAULT_INI.format(seed=seed, year=year))

    n_lines = len(ignitable_lines(net))
    print(f"wrote study inputs to {out} ({size}x{size} at {cell:g} m, "
          f"{n_lines} ignitable lines, seed {seed})")
    return 0


def cmd_simulate(args):
    cp = _read_config(args.config, args.overrides, require=True)
    paths = _paths_from_config(cp, args.config)
    cfg = _study_from_config(cp, args.seed)

    catalog = load_catalog(paths["fuel_catalog"]) if paths["fuel_catalog"].is_file() else default_catalog()
    land = load_landscape(paths["landscape_dir"], catalog=catalog)
    net = load_network(paths["network"])
    wx = load_weather(paths["weather"])

    specs = build_matrix(net, cfg, land.frame)
    t0 = time.perf_counter()
    results = run_batch(specs, land, wx, net, cfg, workers=args.workers)
    elapsed = time.perf_counter() - t0

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_results(results, out / "results.csv")

    warnings = [r.warning for r in results if r.warning]
    meta = {
        "config_sha256": _config_digest(cp, cfg.seed),
        "scenarios": len(results),
        "lines": len({r.line_id for r in results}),
        "seasons": [s.strftime(TIMESTAMP_FORMAT) for s in cfg.seasons],
        "workers": args.workers,
        "warnings": warnings,
    }
    (out / "run_meta.json").write_text(json.dumps(meta, indent=1, sort_keys=True) + "\n")

    print(f"{len(results)} scenarios in {elapsed:.1f} s -> {out / 'results.csv'}"
          + (f" ({len(warnings)} warnings, see run_meta.json)" if warnings else ""))
    return 0


def _season_labels(n):
    if n == len(SEASON_LABELS):
        return SEASON_LABELS
    return tuple(f"season{i}" for i in range(n))


def _write_table(path, records, attr):
    n_seasons = len(getattr(records[0], attr))
    header = "line_id," + ",".join(_season_labels(n_seasons)) + ",avg"
    rows = [header]
    for rec in sorted(records, key=lambda r: r.line_id):
        vals = [float(v) for v in getattr(rec, attr)]
        rows.append(f"{rec.line_id}," + ",".join(repr(v) for v in vals)
                    + f",{seasonal_average(vals)!r}")
    Path(path).write_text("\n".join(rows) + "\n")


def _read_table(path):
    """Read a line_id,<season...>,avg CSV into {line_id: [season values]}."""
    lines = Path(path).read_text().splitlines()
    if not lines or not lines[0].startswith("line_id,"):
        raise InvalidInputError(f"{path}: expected header starting with line_id,")
    cols = lines[0].split(",")[1:]
    n_seasons = len(cols) - 1 if cols and cols[-1] == "avg" else len(cols)
    if n_seasons < 1:
        raise InvalidInputError(f"{path}: no season columns in header")
    table = {}
    for lineno, row in enumerate(lines[1:], start=2):
        if not row.strip():
            continue
        parts = row.split(",")
        try:
            j = int(parts[0])
            vals = [float(x) for x in parts[1:1 + n_seasons]]
        except (ValueError, IndexError):
            raise InvalidInputError(f"{path} row {lineno}: malformed table row {row!r}") from None
        if len(vals) != n_seasons:
            raise InvalidInputError(f"{path} row {lineno}: expected {n_seasons} season values")
        table[j] = vals
    if not table:
        raise InvalidInputError(f"{path}: no data rows")
    return table


def cmd_assess(args):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    if args.from_tables:
        acres_path, miles_path = args.from_tables
        cp = _read_config(args.config, args.overrides, require=False)
        costs = CostParams(
            cbe=cp.getfloat("costs", "cbe_per_acre", fallback=20_000.0),
            cbl=cp.getfloat("costs", "cbl_per_mile", fallback=200_000.0),
        )
        acres = _read_table(acres_path)
        miles = _read_table(miles_path)
        records = rank_lines(acres, miles, costs)
    else:
        cp = _read_config(args.config, args.overrides, require=True)
        paths = _paths_from_config(cp, args.config)
        cfg = _study_from_config(cp, args.seed)
        results = read_results(args.results)
        net = load_network(paths["network"])
        records = assess_results(results, net, cfg.costs)

    _write_table(out / "table_acres.csv", records, "season_acres")
    _write_table(out / "table_miles.csv", records, "season_miles")

    risk_rows = ["line_id,lbe,lbl,wfl,metric,rank"]
    plot_rows = ["line_id,metric"]
    for rank, rec in enumerate(records, start=1):
        risk_rows.append(f"{rec.line_id},{rec.lbe!r},{rec.lbl!r},{rec.wfl!r},{rec.metric!r},{rank}")
        plot_rows.append(f"{rec.line_id},{rec.metric!r}")
    (out / "risk.csv").write_text("\n".join(risk_rows) + "\n")
    (out / "plot_metric.csv").write_text("\n".join(plot_rows) + "\n")

    top = records[0]
    print(f"assessed {len(records)} lines -> {out / 'risk.csv'} "
          f"(top: line {top.line_id}, metric {top.metric:.3f})")
    return 0


def cmd_report(args):
    rdir = Path(args.report_dir)
    risk_path = rdir / "risk.csv"
    acres_path = rdir / "table_acres.csv"
    if not risk_path.is_file():
        raise InvalidInputError(f"missing report file: {risk_path}")
    if not acres_path.is_file():
        raise InvalidInputError(f"missing report file: {acres_path}")

    rows = []
    lines = risk_path.read_text().splitlines()
    if not lines or lines[0] != "line_id,lbe,lbl,wfl,metric,rank":
        raise InvalidInputError(f"{risk_path}: unexpected header")
    for lineno, row in enumerate(lines[1:], start=2):
        if not row.strip():
            continue
        parts = row.split(",")
        try:
            rows.append((int(parts[0]), float(parts[1]), float(parts[2]),
                         float(parts[3]), float(parts[4]), int(parts[5])))
        except (ValueError, IndexError):
            raise InvalidInputError(f"{risk_path} row {lineno}: malformed row") from None
    if not rows:
        raise InvalidInputError(f"{risk_path}: no data rows")
    rows.sort(key=lambda r: r[5])

    acres = _read_table(acres_path)
    n_seasons = len(next(iter(acres.values())))
    labels = _season_labels(n_seasons)
    col_means = [sum(v[s] for v in acres.values()) / len(acres) for s in range(n_seasons)]

    top_n = rows[:args.top]
    print(f"risk ranking, top {len(top_n)} of {len(rows)} lines")
    print(f"{'rank':>4} {'line':>5} {'metric':>8} {'wfl_usd':>15} {'lbe_usd':>15} {'lbl_usd':>15}")
    for j, lbe_d, lbl_d, wfl_d, metric, rank in top_n:
        print(f"{rank:>4} {j:>5} {metric:>8.4f} {wfl_d:>15,.0f} {lbe_d:>15,.0f} {lbl_d:>15,.0f}")

    print()
    print("mean burned acres per line by season:")
    for label, mean in zip(labels, col_means):
        print(f"  {label:<8} {mean:>10.1f}")
    peak = max(range(n_seasons), key=lambda s: col_means[s])
    mild = min(range(n_seasons), key=lambda s: col_means[s])
    print(f"peak season {labels[peak]}, mildest {labels[mild]}")
    if "summer" in labels and "winter" in labels:
        winter_mean = col_means[labels.index("winter")]
        if winter_mean > 0.0:
            ratio = col_means[labels.index("summer")] / winter_mean
            print(f"summer/winter mean burned-area ratio: {ratio:.2f}")
    return 0


# ---------------------------------------------------------------- entry


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default="study.ini", metavar="PATH",
                        help="ini config file (default: study.ini)")
    common.add_argument("--out", default=".", metavar="DIR",
                        help="output directory (default: current directory)")
    common.add_argument("--seed", type=int, default=None,
                        help="override the config seed")
    common.add_argument("--workers", type=int, default=1,
                        help="worker processes for the scenario batch")
    common.add_argument("--set", dest="overrides", action="append", default=[],
                        metavar="SECTION.KEY=VALUE",
                        help="override a single config value (repeatable)")

    parser = argparse.ArgumentParser(
        prog="gridfire",
        description="Grid-ignited wildfire risk engine: synthesize study inputs, "
                    "simulate ignition scenarios, and rank transmission lines.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", parents=[common], help="write study input fixtures")
    p.add_argument("--size", type=int, default=None, help="grid rows and columns")
    p.add_argument("--cell-size", type=float, default=None, help="cell size in meters")
    p.add_argument("--year", type=int, default=None, help="weather year")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("simulate", parents=[common], help="run the scenario batch")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("assess", parents=[common], help="compute losses and ranking")
    p.add_argument("--results", default="results.csv", metavar="PATH",
                   help="scenario results CSV from simulate")
    p.add_argument("--from-tables", nargs=2, metavar=("ACRES_CSV", "MILES_CSV"),
                   help="assess published per-season tables directly, skipping simulation")
    p.set_defaults(func=cmd_assess)

    p = sub.add_parser("report", parents=[common], help="print an assessment summary")
    p.add_argument("report_dir", help="directory written by assess")
    p.add_argument("--top", type=int, default=10, help="ranking rows to print")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (GridFireError, configparser.Error) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except Exception:
        traceback.print_exc()
        return 3


if __name__ == "__main__":
    sys.exit(main())
