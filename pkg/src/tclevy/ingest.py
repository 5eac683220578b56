"""Tick CSV ingestion, binning to log-returns and trade counts, descriptive statistics.

Input files carry the header ``timestamp,price,trade_count``.  Timestamps
are epoch milliseconds or ISO-8601 strings, detected from the first row
and required to be uniform within the file.
"""
from __future__ import annotations

import csv
from dataclasses import asdict, dataclass
from datetime import datetime, timezone

import numpy as np

from .errors import DataError

HEADER = ("timestamp", "price", "trade_count")
MS_PER_HOUR = 3_600_000


@dataclass(frozen=True)
class TickData:
    timestamps: np.ndarray  # int64 epoch ms
    prices: np.ndarray
    trade_counts: np.ndarray
    source: str = ""

    def __len__(self):
        return len(self.timestamps)


def _parse_iso(text: str) -> int:
    text = text.strip()
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    dt = datetime.fromisoformat(text)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return int(round(dt.timestamp() * 1000))


def _is_int(text: str) -> bool:
    text = text.strip()
    return text.lstrip("-").isdigit()


def read_ticks(path) -> TickData:
    ts, prices, counts = [], [], []
    iso = None
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot open {path}: {exc.strerror}") from None
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        if tuple(h.strip() for h in header) != HEADER:
            raise DataError(f"{path}:1: expected header {','.join(HEADER)}, got {','.join(header)}")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 3:
                raise DataError(f"{path}:{lineno}: expected 3 fields, got {len(row)}")
            stamp, price, count = row
            if iso is None:
                iso = not _is_int(stamp)
            try:
                if iso:
                    if _is_int(stamp):
                        raise ValueError("epoch timestamp in an ISO-8601 file")
                    t = _parse_iso(stamp)
                else:
                    if not _is_int(stamp):
                        raise ValueError("ISO-8601 timestamp in an epoch-ms file")
                    t = int(stamp)
                p = float(price)
                c = int(count)
            except ValueError as exc:
                raise DataError(f"{path}:{lineno}: unparseable row: {exc}") from None
            if not (np.isfinite(p) and p > 0):
                raise DataError(f"{path}:{lineno}: price must be positive")
            if c < 0:
                raise DataError(f"{path}:{lineno}: trade_count must be nonnegative")
            if ts and t <= ts[-1]:
                raise DataError(f"{path}:{lineno}: timestamps are not strictly increasing")
            ts.append(t)
            prices.append(p)
            counts.append(c)
    if not ts:
        raise DataError(f"{path}: no tick rows")
    return TickData(np.array(ts, dtype=np.int64), np.array(prices), np.array(counts, dtype=np.int64),
                    str(path))


@dataclass(frozen=True)
class CleaningReport:
    rows_read: int
    days: int
    bins_total: int
    bins_dropped: int

    @property
    def bins_retained(self) -> int:
        return self.bins_total - self.bins_dropped


@dataclass(frozen=True)
class BinnedSeries:
    bin_start: np.ndarray  # int64 epoch ms
    returns: np.ndarray
    trade_counts: np.ndarray
    report: CleaningReport

    def __len__(self):
        return len(self.bin_start)


def bin_ticks(ticks: TickData, bin_minutes: float, day_gap_hours: float = 4.0) -> BinnedSeries:
    """Per-bin log-returns and trade counts with the last bin of every trading day dropped.

    A gap above ``day_gap_hours`` between ticks starts a new trading day.
    Bins are aligned to multiples of the bin width since the epoch and run
    from the day's first tick to its last; empty bins carry the previous
    close (return 0, no trades).  The first bin's return is measured from
    the day's first price.
    """
    if not (bin_minutes > 0):
        raise DataError("bin width must be positive")
    width = int(round(bin_minutes * 60_000))
    ts, px, tc = ticks.timestamps, ticks.prices, ticks.trade_counts
    cuts = np.flatnonzero(np.diff(ts) > day_gap_hours * MS_PER_HOUR) + 1
    starts, rets, counts = [], [], []
    total = dropped = 0
    for lo, hi in zip(np.concatenate(([0], cuts)), np.concatenate((cuts, [len(ts)]))):
        b = ts[lo:hi] // width
        bins = np.arange(b[0], b[-1] + 1)
        last = np.searchsorted(b, bins, side="right") - 1
        close = px[lo:hi][last]
        prev = np.concatenate(([px[lo]], close[:-1]))
        n_day = np.bincount(b - b[0], weights=tc[lo:hi], minlength=len(bins))
        total += len(bins)
        dropped += 1
        starts.append(bins[:-1] * width)
        rets.append(np.log(close[:-1] / prev[:-1]))
        counts.append(n_day[:-1])
    report = CleaningReport(len(ts), len(starts), total, dropped)
    return BinnedSeries(np.concatenate(starts).astype(np.int64), np.concatenate(rets),
                        np.concatenate(counts), report)


def ingest(path, bin_minutes: float, day_gap_hours: float = 4.0) -> BinnedSeries:
    return bin_ticks(read_ticks(path), bin_minutes, day_gap_hours)


def align(a: BinnedSeries, b: BinnedSeries):
    """Bins present in both series, as (bin_start, returns1, returns2, counts1, counts2)."""
    common, ia, ib = np.intersect1d(a.bin_start, b.bin_start, assume_unique=True,
                                    return_indices=True)
    if common.size == 0:
        raise DataError("the two inputs share no bins")
    return common, a.returns[ia], b.returns[ib], a.trade_counts[ia], b.trade_counts[ib]


@dataclass(frozen=True)
class Stats:
    mean: float
    stdev: float
    min: float
    max: float
    median: float
    m2: float
    m3: float
    m4: float

    def as_dict(self):
        return asdict(self)


def stats_report(series) -> Stats:
    """Descriptive statistics; m2..m4 are central sample moments, stdev uses ddof=1."""
    x = np.asarray(series, dtype=float).reshape(-1)
    if x.size == 0:
        raise DataError("statistics of an empty series")
    dev = x - x.mean()
    return Stats(
        mean=float(x.mean()),
        stdev=float(x.std(ddof=1)) if x.size > 1 else float("nan"),
        min=float(x.min()),
        max=float(x.max()),
        median=float(np.median(x)),
        m2=float(np.mean(dev ** 2)),
        m3=float(np.mean(dev ** 3)),
        m4=float(np.mean(dev ** 4)),
    )


def write_stats_csv(path, rows: dict) -> None:
    fields = list(Stats.__dataclass_fields__)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["variable", *fields])
        for name, st in rows.items():
            w.writerow([name, *(format(getattr(st, f), ".17g") for f in fields)])
