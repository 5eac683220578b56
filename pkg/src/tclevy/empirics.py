"""Nonparametric tail integrals and the empirical Lévy copula.

For increments D_k of step ``delta_n``:

    U_hat(x) = #{k : D_k >= x} / (n delta_n)
    F_hat(x1, x2) = #{k : U1_hat(D1_k) <= x1 and U2_hat(D2_k) <= x2}

U_hat is decreasing, so the count picks bins where both increments are
large; scaled by 1/(n delta_n) it estimates the Lévy copula at tail
coordinates (x1, x2).
"""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import DataError, DomainError


@dataclass(frozen=True)
class IncrementPanel:
    delta_n: float
    increments1: np.ndarray
    increments2: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.increments1, dtype=float).reshape(-1)
        b = np.asarray(self.increments2, dtype=float).reshape(-1)
        if a.size == 0 or a.shape != b.shape:
            raise DataError("increment lists must be nonempty and of equal length")
        if not (self.delta_n > 0):
            raise DataError("sampling step must be positive")
        object.__setattr__(self, "increments1", a)
        object.__setattr__(self, "increments2", b)
        object.__setattr__(self, "delta_n", float(self.delta_n))

    @property
    def n(self) -> int:
        return self.increments1.size

    @classmethod
    def from_paths(cls, values1, values2, delta_n: float) -> "IncrementPanel":
        """Panel of first differences of two paths sampled every ``delta_n``."""
        return cls(delta_n, np.diff(values1), np.diff(values2))

    def _increments(self, margin: int) -> np.ndarray:
        if margin == 1:
            return self.increments1
        if margin == 2:
            return self.increments2
        raise ValueError("margin index must be 1 or 2")


def _tail_counts(increments: np.ndarray, x) -> np.ndarray:
    srt = np.sort(increments)
    return srt.size - np.searchsorted(srt, x, side="left")


def empirical_tail(panel: IncrementPanel, margin: int, x):
    x_arr = np.asarray(x, dtype=float)
    if np.any(~(x_arr > 0)):
        raise DomainError("empirical tail integral is evaluated at x > 0 only")
    out = _tail_counts(panel._increments(margin), x_arr) / (panel.n * panel.delta_n)
    return float(out) if out.ndim == 0 else out


def tail_transform(panel: IncrementPanel, margin: int) -> np.ndarray:
    """U_hat evaluated at each bin's own increment (zeros and negatives included)."""
    inc = panel._increments(margin)
    return _tail_counts(inc, inc) / (panel.n * panel.delta_n)


def empirical_levy_copula(panel: IncrementPanel, x1, x2, normalized: bool = True) -> float:
    u1 = tail_transform(panel, 1)
    u2 = tail_transform(panel, 2)
    count = int(np.count_nonzero((u1 <= x1) & (u2 <= x2)))
    return count / (panel.n * panel.delta_n) if normalized else float(count)


def copula_surface_grid(panel: IncrementPanel, grid1, grid2) -> np.ndarray:
    """Normalized F_hat on the product grid; M[i, j] = F_hat(grid1[i], grid2[j])."""
    g1 = np.asarray(grid1, dtype=float).reshape(-1)
    g2 = np.asarray(grid2, dtype=float).reshape(-1)
    if g1.size == 0 or g2.size == 0:
        raise DomainError("surface grids must be nonempty")
    u1 = tail_transform(panel, 1)
    u2 = tail_transform(panel, 2)
    below1 = u1[None, :] <= g1[:, None]
    below2 = u2[None, :] <= g2[:, None]
    counts = below1.astype(np.int64) @ below2.T.astype(np.int64)
    return counts / (panel.n * panel.delta_n)


def write_surface_csv(path, grid1, grid2, matrix) -> None:
    """Long-format surface, header ``x1,x2,F_hat``, 17 significant digits."""
    matrix = np.asarray(matrix, dtype=float)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x1", "x2", "F_hat"])
        for i, a in enumerate(grid1):
            for j, b in enumerate(grid2):
                w.writerow([format(float(a), ".17g"), format(float(b), ".17g"),
                            format(float(matrix[i, j]), ".17g")])


def read_surface_csv(path):
    """Inverse of ``write_surface_csv``: (grid1, grid2, matrix)."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise DataError(f"{path}: empty surface file")
    x1 = [float(r["x1"]) for r in rows]
    x2 = [float(r["x2"]) for r in rows]
    g1 = list(dict.fromkeys(x1))
    g2 = list(dict.fromkeys(x2))
    m = np.array([float(r["F_hat"]) for r in rows]).reshape(len(g1), len(g2))
    return np.array(g1), np.array(g2), m
