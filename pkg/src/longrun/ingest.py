"""Data acquisition: CSV loading, a FRED HTTP client with an on-disk
cache, and manifest-driven assembly of an aligned dataset.

CSV files use a ``date,value`` header with ``YYYY-MM`` dates.  Remote
series come from the FRED observations endpoint; every successful
response is cached on disk keyed by (series code, window) so that
reruns are offline-reproducible and a warm cache never touches the
network.  The API key is always supplied by the caller or the
``FRED_API_KEY`` environment variable, never stored in a manifest.

A manifest is a small TOML file naming each series (id, source,
path or code, transform) plus the analysis window; ``materialize``
loads, transforms, aligns, and windows everything in one step and
returns the series set together with a deterministic provenance
report.
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

import numpy as np

from .series import (
    AlignmentError,
    MonthIndex,
    TimeSeries,
    align,
    log_level,
    window,
    yoy_growth,
)

__all__ = [
    "IngestError",
    "ParseError",
    "GapError",
    "TransportError",
    "AuthenticationError",
    "SeriesEntry",
    "DatasetManifest",
    "Dataset",
    "load_csv",
    "save_csv",
    "fetch_fred",
    "read_manifest",
    "materialize",
]

FRED_URL = "https://api.stlouisfed.org/fred/series/observations"
API_KEY_ENV = "FRED_API_KEY"

TRANSFORMS = ("log", "yoy", "none")
SOURCES = ("csv", "fred")


class IngestError(Exception):
    """Base class for data-acquisition failures."""


class ParseError(IngestError):
    """A row could not be parsed; the message names file and line."""


class GapError(IngestError):
    """A monthly series has a hole; the message names the month."""


class TransportError(IngestError):
    """An HTTP request failed; carries the status code."""

    def __init__(self, status: int, message: str):
        super().__init__(f"HTTP {status}: {message}")
        self.status = status


class AuthenticationError(IngestError):
    """The service rejected the API key."""


def load_csv(
    path: str | Path,
    date_column: str = "date",
    value_column: str = "value",
    id: str | None = None,
) -> TimeSeries:
    """Read one monthly series from a ``date,value`` CSV file.

    Rows are sorted by date before validation; duplicate months and
    gaps are errors, as are unparseable dates or values (reported with
    their line number).  Lines starting with ``#`` and blank lines are
    skipped.  The series id defaults to the file stem.
    """
    path = Path(path)
    if id is None:
        id = path.stem
    rows: list[tuple[MonthIndex, float, int]] = []
    with open(path, newline="", encoding="utf-8") as fh:
        header: list[str] | None = None
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            cells = next(csv.reader([line]))
            if header is None:
                header = [c.strip() for c in cells]
                for col in (date_column, value_column):
                    if col not in header:
                        raise ParseError(
                            f"{path}: header {header} has no column {col!r}"
                        )
                di, vi = header.index(date_column), header.index(value_column)
                continue
            if len(cells) != len(header):
                raise ParseError(
                    f"{path}:{lineno}: expected {len(header)} cells, got {len(cells)}"
                )
            try:
                month = MonthIndex.parse(cells[di].strip())
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: {exc}") from None
            try:
                value = float(cells[vi])
            except ValueError:
                raise ParseError(
                    f"{path}:{lineno}: value {cells[vi]!r} is not a number"
                ) from None
            rows.append((month, value, lineno))
    if header is None:
        raise ParseError(f"{path}: empty file")
    if not rows:
        raise ParseError(f"{path}: no data rows")

    rows.sort(key=lambda r: r[0])
    months = [r[0] for r in rows]
    for prev, cur in zip(months, months[1:]):
        step = cur.months_since(prev)
        if step == 0:
            raise ParseError(f"{path}: duplicate rows for {prev}")
        if step > 1:
            raise GapError(f"{path}: series {id!r} is missing {prev.shift(1)}")
    values = np.array([r[1] for r in rows])
    return TimeSeries(id, months[0], values)


def save_csv(s: TimeSeries, path: str | Path) -> None:
    """Write a series as ``date,value`` rows that round-trip exactly."""
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write("date,value\n")
        for t in range(len(s)):
            fh.write(f"{s.month_at(t)},{float(s.values[t])!r}\n")


def _default_transport(url: str, params: dict) -> tuple[int, str]:
    import requests

    resp = requests.get(url, params=params, timeout=60)
    return resp.status_code, resp.text


def _cache_path(cache_dir: Path, code: str, start: MonthIndex, end: MonthIndex) -> Path:
    return cache_dir / f"{code}_{start}_{end}.json"


def fetch_fred(
    series_code: str,
    api_key: str,
    window: tuple[MonthIndex, MonthIndex],
    cache_dir: str | Path | None = None,
    transport=None,
) -> TimeSeries:
    """Fetch one monthly series from the FRED observations endpoint.

    Responses are cached on disk keyed by (code, window); a warm cache
    answers without any network traffic.  The cache write is atomic
    (write to a temporary file, then rename), so concurrent fetches
    never expose partial files.  ``transport`` may be any callable
    ``(url, params) -> (status, body)`` and exists for testing.
    """
    start, end = window
    if start > end:
        raise ValueError(f"window start {start} is after end {end}")
    if cache_dir is None:
        cache_dir = Path(
            os.environ.get("LONGRUN_CACHE_DIR", "~/.cache/longrun")
        ).expanduser()
    cache_dir = Path(cache_dir)
    cache_file = _cache_path(cache_dir, series_code, start, end)

    if cache_file.exists():
        body = cache_file.read_text(encoding="utf-8")
    else:
        if not api_key:
            raise AuthenticationError(
                f"no API key: set {API_KEY_ENV} or pass api_key"
            )
        if transport is None:
            transport = _default_transport
        status, body = transport(
            FRED_URL,
            {
                "series_id": series_code,
                "api_key": api_key,
                "file_type": "json",
                "frequency": "m",
                "observation_start": f"{start}-01",
                "observation_end": f"{end}-01",
            },
        )
        if status != 200:
            message = ""
            try:
                message = json.loads(body).get("error_message", "")
            except (json.JSONDecodeError, AttributeError):
                message = body[:200]
            if "api_key" in message:
                raise AuthenticationError(message)
            raise TransportError(status, message or "request failed")
        cache_dir.mkdir(parents=True, exist_ok=True)
        tmp = cache_file.with_suffix(".tmp")
        tmp.write_text(body, encoding="utf-8")
        os.replace(tmp, cache_file)

    return _parse_fred_body(series_code, body, start, end)


def _parse_fred_body(
    code: str, body: str, start: MonthIndex, end: MonthIndex
) -> TimeSeries:
    try:
        payload = json.loads(body)
        observations = payload["observations"]
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise ParseError(f"series {code!r}: malformed response ({exc})") from None

    by_month: dict[MonthIndex, float] = {}
    for obs in observations:
        month = MonthIndex.parse(obs["date"][:7])
        if obs["value"] == ".":
            raise GapError(f"series {code!r}: no observation for {month}")
        by_month[month] = float(obs["value"])

    n = end.months_since(start) + 1
    values = np.empty(n)
    for t in range(n):
        month = start.shift(t)
        if month not in by_month:
            raise GapError(f"series {code!r}: no observation for {month}")
        values[t] = by_month[month]
    return TimeSeries(code, start, values)


@dataclass(frozen=True)
class SeriesEntry:
    """One manifest line: where a series comes from and how to transform it."""

    id: str
    source: str
    ref: str
    transform: str = "none"

    def __post_init__(self) -> None:
        if self.source not in SOURCES:
            raise ValueError(
                f"entry {self.id!r}: source must be one of {SOURCES}, "
                f"got {self.source!r}"
            )
        if self.transform not in TRANSFORMS:
            raise ValueError(
                f"entry {self.id!r}: transform must be one of {TRANSFORMS}, "
                f"got {self.transform!r}"
            )


@dataclass(frozen=True)
class DatasetManifest:
    """A named set of series sources plus the analysis window."""

    entries: tuple[SeriesEntry, ...]
    window: tuple[MonthIndex, MonthIndex]

    def __post_init__(self) -> None:
        ids = [e.id for e in self.entries]
        if len(set(ids)) != len(ids):
            raise ValueError(f"duplicate series ids in manifest: {ids}")
        if not self.entries:
            raise ValueError("manifest has no series entries")
        if self.window[0] > self.window[1]:
            raise ValueError(
                f"window start {self.window[0]} is after end {self.window[1]}"
            )


def read_manifest(path: str | Path) -> DatasetManifest:
    """Parse a manifest TOML file.

    Expected shape::

        [window]
        start = "2002-07"
        end   = "2015-10"

        [[series]]
        id = "DJUSBM"
        source = "csv"
        path = "djusbm.csv"        # relative to the manifest file
        transform = "log"

        [[series]]
        id = "I"
        source = "fred"
        code = "CPIAUCSL"
        transform = "yoy"
    """
    path = Path(path)
    with open(path, "rb") as fh:
        doc = tomllib.load(fh)
    try:
        win = (
            MonthIndex.parse(doc["window"]["start"]),
            MonthIndex.parse(doc["window"]["end"]),
        )
    except KeyError as exc:
        raise ParseError(f"{path}: manifest is missing [window] {exc}") from None
    entries = []
    for i, raw in enumerate(doc.get("series", [])):
        try:
            source = raw["source"]
            ref = raw["path"] if source == "csv" else raw["code"]
            entries.append(
                SeriesEntry(
                    id=raw["id"],
                    source=source,
                    ref=ref,
                    transform=raw.get("transform", "none"),
                )
            )
        except KeyError as exc:
            raise ParseError(
                f"{path}: series entry {i + 1} is missing key {exc}"
            ) from None
    return DatasetManifest(entries=tuple(entries), window=win)


@dataclass(frozen=True)
class Dataset:
    """Aligned, windowed series keyed by manifest id, plus provenance."""

    series: dict
    report: str

    def __getitem__(self, id: str) -> TimeSeries:
        return self.series[id]


def materialize(
    manifest: DatasetManifest,
    base_dir: str | Path = ".",
    api_key: str | None = None,
    cache_dir: str | Path | None = None,
    transport=None,
) -> Dataset:
    """Load, transform, align, and window every manifest entry.

    CSV paths resolve relative to ``base_dir``.  The effective window is
    the intersection of the manifest window with every transformed
    series; an empty intersection is an error, and no values are ever
    imputed.  The provenance report is plain text and deterministic, so
    two runs with a warm cache produce identical bytes.
    """
    base_dir = Path(base_dir)
    if api_key is None:
        api_key = os.environ.get(API_KEY_ENV, "")

    loaded: list[TimeSeries] = []
    lines = ["# series provenance", ""]
    for entry in manifest.entries:
        if entry.source == "csv":
            raw = load_csv(base_dir / entry.ref, id=entry.id)
        else:
            raw = fetch_fred(
                entry.ref, api_key, manifest.window,
                cache_dir=cache_dir, transport=transport,
            )
        n_raw = len(raw)
        if entry.transform == "log":
            ts = log_level(raw)
        elif entry.transform == "yoy":
            ts = yoy_growth(raw)
        else:
            ts = raw
        ts = TimeSeries(entry.id, ts.start, ts.values)
        loaded.append(ts)
        lines.append(
            f"{entry.id}: source={entry.source} ref={entry.ref} "
            f"transform={entry.transform} rows={n_raw} "
            f"transformed_rows={len(ts)}"
        )

    aligned = align(loaded)
    lo = max(aligned[0].start, manifest.window[0])
    hi = min(aligned[0].end, manifest.window[1])
    if lo > hi:
        raise AlignmentError(
            f"empty window: common sample {aligned[0].start}..{aligned[0].end} "
            f"does not meet manifest window "
            f"{manifest.window[0]}..{manifest.window[1]}"
        )
    final = {s.id: window(s, lo, hi) for s in aligned}
    lines.append("")
    lines.append(f"window: {lo}..{hi} ({hi.months_since(lo) + 1} months)")
    return Dataset(series=final, report="\n".join(lines) + "\n")
