"""Series representation of the subordinated Brownian pair and model paths.

    Z1(s) = sum_i sqrt(U1^(-1)(Gamma_i)) * G1_i * 1{R_i <= s}
    Z2(s) = sum_i G2_i * sqrt(U2^(-1)(h*(Gamma_i, G3_i))) * 1{R_i <= s}
    X_k(s) = mu_k * T_k(s) + sigma_k * Z_k(s)

Z and T of one seed share Gamma, R and G3, so they are the coupled pair of
a single experiment.  Paths live on [0, 1].
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from .copula import HomogeneousLevyCopula
from .errors import DomainError, ParameterDomainError
from .subordinator import (
    ExpCppParams,
    JumpSeries,
    _series_from_draws,
    default_truncation,
    draw_series,
    step_values,
)


@dataclass(frozen=True)
class BivModelParams:
    margin1: ExpCppParams
    margin2: ExpCppParams
    copula: HomogeneousLevyCopula
    mu1: float = 0.0
    mu2: float = 0.0
    sigma1: float = 1.0
    sigma2: float = 1.0

    def __post_init__(self):
        for name in ("sigma1", "sigma2"):
            val = float(getattr(self, name))
            if not (np.isfinite(val) and val > 0):
                raise ParameterDomainError(f"{name} must be positive, got {val!r}")
            object.__setattr__(self, name, val)
        for name in ("mu1", "mu2"):
            object.__setattr__(self, name, float(getattr(self, name)))

    def scaled(self, horizon: float) -> "BivModelParams":
        """Model over ``horizon`` time units mapped onto [0, 1]: lam_k -> lam_k * horizon."""
        return BivModelParams(self.margin1.scaled(horizon), self.margin2.scaled(horizon),
                              self.copula, self.mu1, self.mu2, self.sigma1, self.sigma2)

    def default_truncation(self) -> float:
        return default_truncation(self.margin1, self.margin2, self.copula)


def check_grid(grid) -> np.ndarray:
    grid = np.asarray(grid, dtype=float).reshape(-1)
    if grid.size == 0:
        raise DomainError("time grid is empty")
    if np.any(~((grid >= 0) & (grid <= 1))):
        raise DomainError("time grid must lie in [0, 1]")
    if np.any(np.diff(grid) <= 0):
        raise DomainError("time grid must be strictly increasing")
    return grid


@dataclass(frozen=True)
class SamplePath:
    """Two coordinates of a process evaluated on a grid of [0, 1]."""

    grid: np.ndarray
    values1: np.ndarray
    values2: np.ndarray

    def __post_init__(self):
        grid = check_grid(self.grid)
        v1 = np.asarray(self.values1, dtype=float)
        v2 = np.asarray(self.values2, dtype=float)
        if v1.shape != grid.shape or v2.shape != grid.shape:
            raise ValueError("path values must match the grid length")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values1", v1)
        object.__setattr__(self, "values2", v2)


@dataclass(frozen=True)
class ModelSeries:
    """Coupled series for (T1, T2) and (Z1, Z2) drawn from one seed."""

    subordinator: JumpSeries
    g1: np.ndarray
    g2: np.ndarray

    @property
    def marks(self) -> np.ndarray:
        return self.subordinator.marks

    @property
    def z1_terms(self) -> np.ndarray:
        return np.sqrt(self.subordinator.jump1) * self.g1

    @property
    def z2_terms(self) -> np.ndarray:
        return self.g2 * np.sqrt(self.subordinator.jump2)

    def mark_grid(self) -> np.ndarray:
        """Jump marks of active terms plus the endpoints 0 and 1."""
        s = self.subordinator
        return np.unique(np.concatenate(([0.0, 1.0], s.marks[s.active])))

    def subordinator_path(self, grid=None) -> SamplePath:
        return subordinator_path(self.subordinator, self.mark_grid() if grid is None else grid)

    def bm_path(self, grid=None) -> SamplePath:
        grid = check_grid(self.mark_grid() if grid is None else grid)
        return SamplePath(grid, step_values(self.marks, self.z1_terms, grid),
                          step_values(self.marks, self.z2_terms, grid))


def subordinator_path(series: JumpSeries, grid) -> SamplePath:
    grid = check_grid(grid)
    return SamplePath(grid, step_values(series.marks, series.jump1, grid),
                      step_values(series.marks, series.jump2, grid))


def simulate_series(params: BivModelParams, truncation_r: float | None, seed: int) -> ModelSeries:
    r = params.default_truncation() if truncation_r is None else float(truncation_r)
    draws = draw_series(seed, r)
    sub = _series_from_draws(params.margin1, params.margin2, params.copula, draws, r)
    return ModelSeries(sub, ndtri(draws.u_g1), ndtri(draws.u_g2))


def simulate_tc_bm(params: BivModelParams, truncation_r: float | None, seed: int,
                   grid=None) -> SamplePath:
    """(Z1, Z2) on ``grid``; ``grid=None`` uses the jump marks plus 0 and 1."""
    if grid is not None:
        grid = check_grid(grid)
    return simulate_series(params, truncation_r, seed).bm_path(grid)


def assemble_model_path(params: BivModelParams, z: SamplePath, t: SamplePath) -> SamplePath:
    """X_k = mu_k T_k + sigma_k Z_k on the common grid of ``z`` and ``t``."""
    if z.grid.shape != t.grid.shape or not np.array_equal(z.grid, t.grid):
        raise DomainError("subordinator and Brownian paths are on different marks")
    return SamplePath(z.grid,
                      params.mu1 * t.values1 + params.sigma1 * z.values1,
                      params.mu2 * t.values2 + params.sigma2 * z.values2)


def simulate_model_paths(params: BivModelParams, truncation_r: float | None, seed: int,
                         grid=None):
    """(T, Z, X) sample paths of one seed on a shared grid."""
    series = simulate_series(params, truncation_r, seed)
    grid = series.mark_grid() if grid is None else check_grid(grid)
    t = series.subordinator_path(grid)
    z = series.bm_path(grid)
    return t, z, assemble_model_path(params, z, t)


def replicate(fn, seeds, workers: int = 1) -> list:
    """``[fn(seed) for seed in seeds]``, optionally on a thread pool.

    Results come back in seed order whatever the worker count.
    """
    seeds = list(seeds)
    if workers <= 1 or len(seeds) <= 1:
        return [fn(s) for s in seeds]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, seeds))


def terminal_values(params: BivModelParams, seeds, truncation_r: float | None = None,
                    workers: int = 1) -> dict[str, np.ndarray]:
    """Values at s = 1 of T, Z and X for each seed."""
    r = params.default_truncation() if truncation_r is None else truncation_r

    def one(seed):
        ms = simulate_series(params, r, seed)
        sub = ms.subordinator
        return (sub.jump1.sum(), sub.jump2.sum(), ms.z1_terms.sum(), ms.z2_terms.sum())

    out = np.array(replicate(one, seeds, workers), dtype=float).reshape(-1, 4)
    t1, t2, z1, z2 = out.T
    return {
        "T1": t1, "T2": t2, "Z1": z1, "Z2": z2,
        "X1": params.mu1 * t1 + params.sigma1 * z1,
        "X2": params.mu2 * t2 + params.sigma2 * z2,
    }
