"""Synthetic tick files drawn from the model, for round-trip experiments.

One model path with per-bin intensities is simulated over all trading
days at once and cut into sessions.  Every jump of margin k becomes a tick
in file k carrying trade_count = max(1, round(jump)) and the price
P0 * exp(X_k).  Each session also gets zero-count anchor ticks at every
bin start and one millisecond before the close, so that every session
spans the same bins and no intraday gap looks like a session break.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

from .series import BivModelParams, simulate_series

DAY_MS = 86_400_000


@dataclass(frozen=True)
class SessionLayout:
    days: int
    bins_per_day: int = 13
    bin_minutes: float = 30.0
    start: str = "2020-01-06T09:30:00+00:00"

    @property
    def bin_ms(self) -> int:
        return int(round(self.bin_minutes * 60_000))

    @property
    def total_bins(self) -> int:
        return self.days * self.bins_per_day

    def open_ms(self) -> np.ndarray:
        t0 = int(datetime.fromisoformat(self.start).astimezone(timezone.utc).timestamp() * 1000)
        return t0 + DAY_MS * np.arange(self.days, dtype=np.int64)


def synthetic_ticks(params: BivModelParams, layout: SessionLayout, seed: int, p0=(100.0, 100.0),
                    truncation_r=None):
    """Two tick tables (timestamps, prices, trade_counts) from one simulated path.

    ``params`` holds per-bin intensities.
    """
    series = simulate_series(params.scaled(layout.total_bins), truncation_r, seed)
    sub = series.subordinator
    marks = sub.marks
    order = np.argsort(marks, kind="stable")
    bin_pos = marks[order] * layout.total_bins
    day = np.minimum((bin_pos // layout.bins_per_day).astype(np.int64), layout.days - 1)
    offset_ms = np.floor((bin_pos - day * layout.bins_per_day) * layout.bin_ms).astype(np.int64)
    opens = layout.open_ms()
    close_ms = layout.bins_per_day * layout.bin_ms - 1
    offset_ms = np.clip(offset_ms, 1, close_ms - 2)

    out = []
    for k, (jumps, zterms, mu, sigma) in enumerate((
            (sub.jump1, series.z1_terms, params.mu1, params.sigma1),
            (sub.jump2, series.z2_terms, params.mu2, params.sigma2))):
        j = jumps[order]
        x = np.cumsum(mu * j + sigma * zterms[order])
        keep = j > 0
        t = opens[day[keep]] + offset_ms[keep]
        logp = np.log(p0[k]) + x[keep]
        cnt = np.maximum(1, np.rint(j[keep])).astype(np.int64)
        out.append(_with_anchors(layout, opens, close_ms, day[keep], t, logp, cnt, np.log(p0[k])))
    return tuple(out)


def _with_anchors(layout, opens, close_ms, day, t, logp, cnt, logp0):
    grid = layout.bin_ms * np.arange(layout.bins_per_day, dtype=np.int64)
    grid = np.append(grid, close_ms)
    ts, lp, tc = [], [], []
    last = logp0
    bounds = np.searchsorted(day, np.arange(layout.days + 1))
    for d in range(layout.days):
        lo, hi = bounds[d], bounds[d + 1]
        anchors = opens[d] + grid
        i = lo
        prev = -1
        for a in anchors:
            while i < hi and t[i] < a:
                prev = max(int(t[i]), prev + 1)
                ts.append(prev)
                lp.append(logp[i])
                tc.append(int(cnt[i]))
                last = logp[i]
                i += 1
            prev = max(int(a), prev + 1)
            ts.append(prev)
            lp.append(last)
            tc.append(0)
    return np.array(ts, dtype=np.int64), np.exp(np.array(lp)), np.array(tc, dtype=np.int64)


def write_ticks_csv(path, timestamps, prices, trade_counts) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["timestamp", "price", "trade_count"])
        for t, p, c in zip(timestamps, prices, trade_counts):
            w.writerow([int(t), format(float(p), ".17g"), int(c)])


def write_synthetic_pair(path1, path2, params: BivModelParams, layout: SessionLayout, seed: int,
                         truncation_r=None) -> None:
    a, b = synthetic_ticks(params, layout, seed, truncation_r=truncation_r)
    write_ticks_csv(path1, *a)
    write_ticks_csv(path2, *b)
