"""Hourly weather series: loading, validation, and seasonal windows."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from pathlib import Path

from .errors import CoverageError, InvalidInputError, InvalidSampleError, MalformedSeriesError

HOUR = timedelta(hours=1)
WEATHER_HEADER = ["timestamp_utc", "wind_speed_ms", "wind_dir_from_deg", "temp_c", "rh_pct"]
TIMESTAMP_FORMAT = "%Y-%m-%dT%H:%MZ"


@dataclass(frozen=True)
class WeatherSample:
    """One hourly observation. Wind direction is meteorological (FROM)."""

    timestamp: datetime
    wind_speed: float
    wind_dir_from: float
    temperature: float
    rel_humidity: float

    def __post_init__(self) -> None:
        if self.timestamp.tzinfo is None:
            raise InvalidSampleError(f"timestamp {self.timestamp} is naive, expected UTC")
        for label, v in (("wind_speed", self.wind_speed),
                         ("wind_dir_from", self.wind_dir_from),
                         ("temperature", self.temperature),
                         ("rel_humidity", self.rel_humidity)):
            if not math.isfinite(v):
                raise InvalidSampleError(f"non-finite {label} {v} at {self.timestamp}")
        if self.wind_speed < 0:
            raise InvalidSampleError(f"negative wind speed {self.wind_speed} at {self.timestamp}")
        if not 0.0 <= self.wind_dir_from < 360.0:
            raise InvalidSampleError(
                f"wind direction {self.wind_dir_from} outside [0, 360) at {self.timestamp}"
            )
        if not 0.0 <= self.rel_humidity <= 100.0:
            raise InvalidSampleError(
                f"relative humidity {self.rel_humidity} outside [0, 100] at {self.timestamp}"
            )


@dataclass(frozen=True)
class WeatherSeries:
    """Strictly hourly, gap-free sequence of samples."""

    samples: tuple[WeatherSample, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "samples", tuple(self.samples))
        if not self.samples:
            raise MalformedSeriesError("weather series is empty")
        for prev, cur in zip(self.samples, self.samples[1:]):
            if cur.timestamp <= prev.timestamp:
                raise MalformedSeriesError(
                    f"timestamps not strictly increasing at {cur.timestamp}"
                )
            if cur.timestamp - prev.timestamp != HOUR:
                raise MalformedSeriesError(
                    f"gap of {cur.timestamp - prev.timestamp} before {cur.timestamp}, "
                    "expected exactly one hour"
                )

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def start(self) -> datetime:
        return self.samples[0].timestamp

    @property
    def end(self) -> datetime:
        """First instant after the last sample's hour."""
        return self.samples[-1].timestamp + HOUR

    def at(self, instant: datetime) -> WeatherSample:
        """Sample whose hour contains the instant."""
        if instant.tzinfo is None:
            raise InvalidInputError(f"instant {instant} is naive, expected UTC")
        offset = instant - self.start
        idx = math.floor(offset / HOUR)
        if not 0 <= idx < len(self.samples):
            raise CoverageError(
                f"instant {instant.isoformat()} outside series coverage "
                f"[{self.start.isoformat()}, {self.end.isoformat()})"
            )
        return self.samples[idx]


def window(s: WeatherSeries, start: datetime, hours: int) -> WeatherSeries:
    """Contiguous slice of exactly `hours` samples starting at `start`.

    `start` must coincide with a sample timestamp and the whole window
    must be covered.
    """
    if hours <= 0:
        raise InvalidInputError(f"window length {hours} must be positive")
    if start.tzinfo is None:
        raise InvalidInputError(f"window start {start} is naive, expected UTC")
    offset = start - s.start
    steps = offset / HOUR
    if steps != int(steps):
        raise CoverageError(
            f"window start {start.isoformat()} does not align with hourly samples "
            f"beginning {s.start.isoformat()}"
        )
    idx = int(steps)
    if idx < 0 or idx + hours > len(s.samples):
        raise CoverageError(
            f"window [{start.isoformat()}, {(start + hours * HOUR).isoformat()}) not covered by "
            f"series [{s.start.isoformat()}, {s.end.isoformat()})"
        )
    return WeatherSeries(samples=s.samples[idx:idx + hours])


def season_starts(year: int, hour: int = 12) -> tuple[datetime, datetime, datetime, datetime]:
    """Seasonal ignition instants: Jan 1, Apr 1, Jul 1, Oct 1 at the given hour UTC."""
    if not 0 <= hour <= 23:
        raise InvalidInputError(f"ignition hour {hour} outside [0, 23]")
    return tuple(
        datetime(year, month, 1, hour, 0, tzinfo=timezone.utc) for month in (1, 4, 7, 10)
    )


def load_weather(path: str | Path) -> WeatherSeries:
    """Read the hourly weather CSV (see WEATHER_HEADER for columns)."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InvalidInputError(f"cannot read weather file {path}: {exc}") from exc
    reader = csv.DictReader(text.splitlines())
    if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != WEATHER_HEADER:
        raise InvalidSampleError(f"{path}: expected header {','.join(WEATHER_HEADER)}")
    samples = []
    for i, row in enumerate(reader, start=2):
        try:
            ts = datetime.strptime(row["timestamp_utc"].strip(), TIMESTAMP_FORMAT)
        except (ValueError, AttributeError) as exc:
            raise InvalidSampleError(f"{path}: row {i}: bad timestamp: {exc}") from exc
        ts = ts.replace(tzinfo=timezone.utc)
        try:
            sample = WeatherSample(
                timestamp=ts,
                wind_speed=float(row["wind_speed_ms"]),
                wind_dir_from=float(row["wind_dir_from_deg"]),
                temperature=float(row["temp_c"]),
                rel_humidity=float(row["rh_pct"]),
            )
        except InvalidSampleError as exc:
            raise InvalidSampleError(f"{path}: row {i}: {exc}") from exc
        except (ValueError, TypeError) as exc:
            raise InvalidSampleError(f"{path}: row {i}: {exc}") from exc
        samples.append(sample)
    return WeatherSeries(samples=tuple(samples))


def write_weather(s: WeatherSeries, path: str | Path) -> None:
    rows = [",".join(WEATHER_HEADER)]
    for smp in s.samples:
        ts = smp.timestamp.astimezone(timezone.utc).strftime(TIMESTAMP_FORMAT)
        rows.append(
            f"{ts},{smp.wind_speed!r},{smp.wind_dir_from!r},"
            f"{smp.temperature!r},{smp.rel_humidity!r}"
        )
    Path(path).write_text("\n".join(rows) + "\n")
