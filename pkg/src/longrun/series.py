"""Monthly time-series containers and deterministic transforms.

Everything downstream (trend extraction, unit-root and cointegration
tests, short-run dynamics) operates on :class:`TimeSeries` objects:
an identifier, a start month, and a contiguous float vector.  Keeping
the calendar explicit here means the statistical code never has to
reason about dates, only about aligned arrays.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "MonthIndex",
    "TimeSeries",
    "AlignmentError",
    "log_level",
    "yoy_growth",
    "diff",
    "align",
    "window",
]

_MONTH_RE = re.compile(r"^(\d{4})-(\d{2})$")
_LABEL_RE = re.compile(r"^(\d{4})M(\d{1,2})$")


class AlignmentError(ValueError):
    """Raised when series cannot be placed on a common monthly window."""


@dataclass(frozen=True, order=True)
class MonthIndex:
    """A calendar month, the atomic time unit of every series.

    Supports ordering, month arithmetic via :meth:`shift` and
    :meth:`months_since`, and round-trips through the ``YYYY-MM``
    interchange format used by the CSV loader.
    """

    year: int
    month: int

    def __post_init__(self) -> None:
        if not 1 <= self.month <= 12:
            raise ValueError(f"month must be in 1..12, got {self.month}")

    @classmethod
    def parse(cls, text: str) -> "MonthIndex":
        """Parse ``YYYY-MM`` (e.g. ``2002-07``) or ``YYYYMmm`` (e.g. ``2002M7``)."""
        m = _MONTH_RE.match(text.strip()) or _LABEL_RE.match(text.strip())
        if m is None:
            raise ValueError(f"unrecognized month {text!r}, expected YYYY-MM")
        return cls(int(m.group(1)), int(m.group(2)))

    def shift(self, months: int) -> "MonthIndex":
        """Return the month ``months`` steps ahead (negative steps back)."""
        base = self.year * 12 + (self.month - 1) + months
        return MonthIndex(base // 12, base % 12 + 1)

    def months_since(self, other: "MonthIndex") -> int:
        """Signed number of months from ``other`` to ``self``."""
        return (self.year - other.year) * 12 + (self.month - other.month)

    def __str__(self) -> str:
        return f"{self.year:04d}-{self.month:02d}"

    @property
    def label(self) -> str:
        """Compact report form, e.g. ``2009M12``."""
        return f"{self.year:d}M{self.month:d}"


@dataclass(frozen=True)
class TimeSeries:
    """An immutable monthly series: identifier, start month, values.

    Values are stored as a read-only float64 vector with no gaps; the
    month of ``values[i]`` is ``start.shift(i)``.  Construction rejects
    NaN and infinite entries so that downstream numerics never see
    silent missing data.
    """

    id: str
    start: MonthIndex
    values: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        arr = np.asarray(self.values, dtype=float).copy()
        if arr.ndim != 1:
            raise ValueError(f"series {self.id!r}: values must be 1-D")
        if arr.size == 0:
            raise ValueError(f"series {self.id!r}: empty series")
        bad = np.flatnonzero(~np.isfinite(arr))
        if bad.size:
            raise ValueError(
                f"series {self.id!r}: non-finite value at {self.start.shift(int(bad[0]))}"
            )
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return self.values.size

    @property
    def end(self) -> MonthIndex:
        """Month of the final observation."""
        return self.start.shift(len(self) - 1)

    def month_at(self, i: int) -> MonthIndex:
        """Month of ``values[i]`` (supports negative indexing)."""
        if not -len(self) <= i < len(self):
            raise IndexError(f"series {self.id!r}: index {i} out of range")
        return self.start.shift(i % len(self))

    def months(self) -> list[MonthIndex]:
        """All observation months, in order."""
        return [self.start.shift(i) for i in range(len(self))]

    def with_values(self, values: np.ndarray, start: MonthIndex | None = None) -> "TimeSeries":
        """Same identifier, new data (used by transforms)."""
        return TimeSeries(self.id, self.start if start is None else start, values)


def log_level(s: TimeSeries) -> TimeSeries:
    """Natural log of a strictly positive level series.

    Raises a domain error naming the first offending month if any value
    is zero or negative.
    """
    bad = np.flatnonzero(s.values <= 0.0)
    if bad.size:
        i = int(bad[0])
        raise ValueError(
            f"series {s.id!r}: log of non-positive value {s.values[i]!r} at {s.month_at(i)}"
        )
    return s.with_values(np.log(s.values))


def yoy_growth(s: TimeSeries, mode: str = "yoy") -> TimeSeries:
    """Percent growth of a positive level series.

    ``mode="yoy"`` (default) is the 12-month rate 100*(v_t/v_{t-12} - 1);
    the first 12 observations are consumed and the start month shifts
    forward by a year.  ``mode="mom_annualized"`` compounds the one-month
    rate instead: 100*((v_t/v_{t-1})**12 - 1), shifting the start by one
    month.
    """
    bad = np.flatnonzero(s.values <= 0.0)
    if bad.size:
        i = int(bad[0])
        raise ValueError(
            f"series {s.id!r}: growth of non-positive value at {s.month_at(i)}"
        )
    v = s.values
    if mode == "yoy":
        if len(s) <= 12:
            raise ValueError(
                f"series {s.id!r}: yoy growth needs more than 12 observations, got {len(s)}"
            )
        out = 100.0 * (v[12:] / v[:-12] - 1.0)
        return s.with_values(out, start=s.start.shift(12))
    if mode == "mom_annualized":
        if len(s) < 2:
            raise ValueError(f"series {s.id!r}: growth needs at least 2 observations")
        out = 100.0 * ((v[1:] / v[:-1]) ** 12 - 1.0)
        return s.with_values(out, start=s.start.shift(1))
    raise ValueError(f"unknown growth mode {mode!r}")


def diff(s: TimeSeries) -> TimeSeries:
    """First difference; start shifts forward one month."""
    if len(s) < 2:
        raise ValueError(f"series {s.id!r}: diff needs at least 2 observations")
    return s.with_values(np.diff(s.values), start=s.start.shift(1))


def align(series: list[TimeSeries]) -> list[TimeSeries]:
    """Trim all series to their common (intersection) window.

    Raises :class:`AlignmentError` when the windows do not overlap.
    Aligning already-aligned series returns equal series (idempotent).
    """
    if not series:
        return []
    lo = max(s.start for s in series)
    hi = min(s.end for s in series)
    if hi < lo:
        spans = ", ".join(f"{s.id}: {s.start}..{s.end}" for s in series)
        raise AlignmentError(f"no common window across series ({spans})")
    return [window(s, lo, hi) for s in series]


def window(s: TimeSeries, start: MonthIndex, end: MonthIndex) -> TimeSeries:
    """Restrict a series to the inclusive window [start, end].

    The window must lie inside the observed span.
    """
    if end < start:
        raise AlignmentError(f"window end {end} precedes start {start}")
    i = start.months_since(s.start)
    j = end.months_since(s.start)
    if i < 0 or j >= len(s):
        raise AlignmentError(
            f"series {s.id!r} spans {s.start}..{s.end}, cannot window to {start}..{end}"
        )
    return s.with_values(s.values[i : j + 1], start=start)
