"""Compound-Poisson subordinator margins and the dependent pair (T1, T2).

Margins are CPPs with intensity ``lam`` and Exp(``theta``) jump sizes, so the
tail integral is U(x) = lam * exp(-theta x) and its generalized inverse is

    U^(-1)(y) = -log(y / lam) / theta   for y <= lam,   0 otherwise.

The pair is generated from one sequence of standard Poisson arrivals
Gamma_1 < Gamma_2 < ...:  jump1_i = U1^(-1)(Gamma_i) and
jump2_i = U2^(-1)(h*(Gamma_i, G3_i)) with G3_i ~ p*, both placed at the
uniform time mark R_i.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .copula import HomogeneousLevyCopula
from .errors import DomainError, ParameterDomainError

# Relative intensity of second-margin jumps the default truncation may drop.
DEFAULT_MISSED_TOL = 1e-2
_MAX_R_FACTOR = 1000.0


@dataclass(frozen=True)
class ExpCppParams:
    """CPP margin: ``lam`` jumps per unit time, mean jump size 1/``theta``."""

    lam: float
    theta: float

    def __post_init__(self):
        for name in ("lam", "theta"):
            val = float(getattr(self, name))
            if not (np.isfinite(val) and val > 0):
                raise ParameterDomainError(f"{name} must be positive and finite, got {val!r}")
            object.__setattr__(self, name, val)

    def scaled(self, horizon: float) -> "ExpCppParams":
        """Same margin observed over ``horizon`` time units, mapped onto [0, 1]."""
        return ExpCppParams(self.lam * horizon, self.theta)

    def tail_integral(self, x):
        x = np.asarray(x, dtype=float)
        if np.any(~(x > 0)):
            raise DomainError("tail integral is evaluated at x > 0 only")
        out = self.lam * np.exp(-self.theta * x)
        return float(out) if out.ndim == 0 else out

    def tail_inverse(self, y):
        y = np.asarray(y, dtype=float)
        if np.any(~(y > 0)):
            raise DomainError("generalized tail inverse needs y > 0")
        with np.errstate(divide="ignore"):
            out = np.where(y < self.lam, -np.log(y / self.lam) / self.theta, 0.0)
        return float(out) if out.ndim == 0 else out


def tail_integral(p: ExpCppParams, x):
    return p.tail_integral(x)


def tail_inverse(p: ExpCppParams, y):
    return p.tail_inverse(y)


def lambda_parallel(p1: ExpCppParams, p2: ExpCppParams, c: HomogeneousLevyCopula) -> float:
    """Intensity of simultaneous jumps, F(lam1, lam2)."""
    return float(c.value(p1.lam, p2.lam))


def dependent_tail_split(p1: ExpCppParams, p2: ExpCppParams, c: HomogeneousLevyCopula,
                         x, which: int):
    """Split U_which(x) into the part carried by joint jumps and the solo part."""
    if which == 1:
        u = np.asarray(p1.tail_integral(x))
        dep = np.asarray(c.value(u, p2.lam))
    elif which == 2:
        u = np.asarray(p2.tail_integral(x))
        dep = np.asarray(c.value(p1.lam, u))
    else:
        raise ValueError("margin index must be 1 or 2")
    dep = np.minimum(dep, u)
    indep = u - dep
    if dep.ndim == 0:
        return float(dep), float(indep)
    return dep, indep


def missed_intensity(p2: ExpCppParams, c: HomogeneousLevyCopula, r: float) -> float:
    """Expected rate of T2 jumps carried by arrivals beyond ``r``: lam2 - F(r, lam2)."""
    return float(p2.lam - c.value(r, p2.lam))


def default_truncation(p1: ExpCppParams, p2: ExpCppParams, c: HomogeneousLevyCopula,
                       tol: float = DEFAULT_MISSED_TOL) -> float:
    """Smallest doubling of max(lam1, lam2) + 10 that keeps the dropped T2 rate below tol*lam2.

    Margin 1 is exact once r >= lam1, but T2 solo jumps keep arriving at every
    Gamma_i since G3_i can be small.  Capped at 1000 * max(lam).
    """
    base = max(p1.lam, p2.lam)
    r = base + 10.0
    cap = _MAX_R_FACTOR * base + 10.0
    while r < cap and missed_intensity(p2, c, r) > tol * p2.lam:
        r *= 2.0
    return min(r, cap)


class SeriesDraws(NamedTuple):
    gamma: np.ndarray
    u_mark: np.ndarray
    u_g1: np.ndarray
    u_g2: np.ndarray
    u_g3: np.ndarray


def _open_uniform(gen: np.random.Generator, n: int) -> np.ndarray:
    # Generator.random() returns k * 2**-53; shifting by half a step keeps (0, 1) open.
    return gen.random(n) + 2.0 ** -54


def draw_series(seed: int, truncation_r: float) -> SeriesDraws:
    """All randomness of one series realization, truncated to Gamma_i < r.

    The root seed spawns four substreams: exponential gaps, G1, the (G2, G3)
    pairs and the time marks R.  Every stream is consumed one double per
    draw in term order, so raising r appends terms and never alters the
    ones already drawn.
    """
    if not (truncation_r > 0):
        raise DomainError("truncation level must be positive")
    gaps_ss, g1_ss, g23_ss, mark_ss = np.random.SeedSequence(int(seed)).spawn(4)
    gaps_gen = np.random.default_rng(gaps_ss)

    # Fixed chunk size: the running sums must not depend on r.
    chunk = 256
    total = 0.0
    pieces = []
    while True:
        e = -np.log1p(-gaps_gen.random(chunk))
        g = total + np.cumsum(e)
        pieces.append(g)
        total = g[-1]
        if total >= truncation_r:
            break
    gamma = np.concatenate(pieces)
    n = int(np.searchsorted(gamma, truncation_r, side="left"))
    gamma = gamma[:n]

    u_g1 = _open_uniform(np.random.default_rng(g1_ss), n)
    g23 = _open_uniform(np.random.default_rng(g23_ss), 2 * n).reshape(n, 2)
    u_mark = np.random.default_rng(mark_ss).random(n)
    return SeriesDraws(gamma, u_mark, u_g1, g23[:, 0].copy(), g23[:, 1].copy())


class BivJumpRecord(NamedTuple):
    r: float
    gamma: float
    jump1: float
    jump2: float


@dataclass(frozen=True)
class JumpSeries:
    """Truncated series of a (T1, T2) realization, in arrival order.

    Terms with both jumps zero stay in the arrays for audit; ``active``
    masks them out of path assembly.  Iterating yields BivJumpRecord.
    """

    gamma: np.ndarray
    marks: np.ndarray
    jump1: np.ndarray
    jump2: np.ndarray
    g3: np.ndarray
    truncation_r: float
    truncated: bool = False
    missed_intensity: tuple = field(default=(0.0, 0.0))

    def __len__(self):
        return len(self.gamma)

    def __getitem__(self, i):
        return BivJumpRecord(float(self.marks[i]), float(self.gamma[i]),
                             float(self.jump1[i]), float(self.jump2[i]))

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    @property
    def active(self) -> np.ndarray:
        return (self.jump1 > 0) | (self.jump2 > 0)


def _series_from_draws(p1, p2, c, draws: SeriesDraws, r: float) -> JumpSeries:
    gamma = draws.gamma
    g3 = np.asarray(c.pstar_sample(draws.u_g3), dtype=float)
    jump1 = np.asarray(p1.tail_inverse(gamma), dtype=float)
    jump2 = np.asarray(p2.tail_inverse(c.hstar(gamma, g3)), dtype=float)
    return JumpSeries(
        gamma=gamma, marks=draws.u_mark, jump1=jump1, jump2=jump2, g3=g3,
        truncation_r=float(r),
        truncated=bool(r < p1.lam or r < p2.lam),
        missed_intensity=(max(p1.lam - r, 0.0), missed_intensity(p2, c, r)),
    )


def simulate_biv_subordinator(p1: ExpCppParams, p2: ExpCppParams, c: HomogeneousLevyCopula,
                              truncation_r: float | None, seed: int) -> JumpSeries:
    """Series simulation of the dependent CPP pair on [0, 1].

    ``T_k(s) = sum_i jump_k[i] * 1{R_i <= s}``; ``series.subordinator_path``
    materializes it on a grid.
    ``truncation_r=None`` picks ``default_truncation``.
    """
    r = default_truncation(p1, p2, c) if truncation_r is None else float(truncation_r)
    return _series_from_draws(p1, p2, c, draw_series(seed, r), r)


def step_values(marks: np.ndarray, terms: np.ndarray, grid: np.ndarray) -> np.ndarray:
    """Right-continuous evaluation of sum_i terms_i * 1{marks_i <= s} on ``grid``."""
    order = np.argsort(marks, kind="stable")
    cum = np.concatenate(([0.0], np.cumsum(terms[order])))
    idx = np.searchsorted(marks[order], grid, side="right")
    return cum[idx]

