"""Positive Lévy copulas on [0, inf]^2.

Every copula here is homogeneous, F(ku, kv) = k F(u, v), which fixes the
pair used by the series representation:

    f*(u, x) = x / u,        h*(u, y) = u * y,
    p*-CDF(z) = dF/du(1, z).

Arguments may be numpy arrays; scalar inputs return Python floats.
Infinity is an accepted argument and follows limit conventions
(x / inf = 0, inf ** -delta = 0).
"""
from __future__ import annotations

import abc
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from .errors import DomainError, ParameterDomainError

DELTA_MIN = 1e-8
DELTA_MAX = 1e8


def _out(x):
    x = np.asarray(x, dtype=float)
    return float(x) if x.ndim == 0 else x


def _log(x):
    with np.errstate(divide="ignore"):
        return np.log(np.asarray(x, dtype=float))


def _check_nonneg(*args):
    for a in args:
        a = np.asarray(a, dtype=float)
        if np.any(np.isnan(a)) or np.any(a < 0):
            raise DomainError("copula arguments must be nonnegative")


class HomogeneousLevyCopula(abc.ABC):
    """Interface shared by Clayton and mixture copulas."""

    @abc.abstractmethod
    def value(self, u, v): ...

    @abc.abstractmethod
    def log_partial_u(self, u, v): ...

    @abc.abstractmethod
    def log1m_partial_u(self, u, v):
        """log(1 - dF/du), kept separate for accuracy when dF/du is near 1."""

    @abc.abstractmethod
    def log_mixed_partial(self, u, v): ...

    @abc.abstractmethod
    def pstar_sample(self, q): ...

    @abc.abstractmethod
    def swapped(self) -> "HomogeneousLevyCopula":
        """The copula with its arguments exchanged, G(u, v) = F(v, u)."""

    def partial_u(self, u, v):
        u = np.asarray(u, dtype=float)
        _check_nonneg(u, v)
        if np.any(u == 0):
            raise DomainError("dF/du is undefined at u = 0")
        return _out(np.exp(self.log_partial_u(u, v)))

    def partial_v(self, u, v):
        return self.swapped().partial_u(v, u)

    def log1m_partial_v(self, u, v):
        return self.swapped().log1m_partial_u(v, u)

    def mixed_partial(self, u, v):
        _check_nonneg(u, v)
        return _out(np.exp(self.log_mixed_partial(u, v)))

    def pstar_cdf(self, z):
        z = np.asarray(z, dtype=float)
        pos = z > 0
        out = np.zeros_like(z)
        if np.any(pos):
            out[pos] = np.exp(self.log_partial_u(np.ones_like(z[pos]), z[pos]))
        return _out(out)

    def pstar_density(self, z):
        """p*(z) by central finite difference of the p*-CDF."""
        z = np.asarray(z, dtype=float)
        h = np.maximum(1e-6, 1e-6 * np.abs(z))
        return _out((np.asarray(self.pstar_cdf(z + h)) - np.asarray(self.pstar_cdf(z - h))) / (2 * h))

    @staticmethod
    def fstar(u, x):
        u = np.asarray(u, dtype=float)
        if np.any(u <= 0):
            raise DomainError("f*(u, x) requires u > 0")
        return _out(np.asarray(x, dtype=float) / u)

    @staticmethod
    def hstar(u, y):
        u = np.asarray(u, dtype=float)
        y = np.asarray(y, dtype=float)
        if np.any(u <= 0) or np.any(y <= 0):
            raise DomainError("h*(u, y) requires u > 0 and y > 0")
        return _out(u * y)


@dataclass(frozen=True)
class ClaytonCopula(HomogeneousLevyCopula):
    """F(u, v) = (u^-delta + v^-delta)^(-1/delta)."""

    delta: float

    def __post_init__(self):
        d = float(self.delta)
        if not (DELTA_MIN <= d <= DELTA_MAX):
            raise ParameterDomainError(
                f"Clayton delta must lie in [{DELTA_MIN:g}, {DELTA_MAX:g}], got {self.delta!r}"
            )
        object.__setattr__(self, "delta", d)

    def value(self, u, v):
        _check_nonneg(u, v)
        d = self.delta
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        s = np.logaddexp(-d * _log(u), -d * _log(v))
        out = np.exp(-s / d)
        # uniform margins hold exactly, not up to rounding
        out = np.where(np.isinf(v), u, np.where(np.isinf(u), v, out))
        return _out(out)

    def log_partial_u(self, u, v):
        d = self.delta
        t = d * (_log(u) - _log(v))
        return -((1 + d) / d) * np.logaddexp(0.0, t)

    def log1m_partial_u(self, u, v):
        with np.errstate(divide="ignore"):
            return np.log(-np.expm1(self.log_partial_u(u, v)))

    def log_mixed_partial(self, u, v):
        d = self.delta
        lu, lv = _log(u), _log(v)
        with np.errstate(invalid="ignore"):
            out = (np.log1p(d) - (d + 1) * (lu + lv)
                   - (1 / d + 2) * np.logaddexp(-d * lu, -d * lv))
        return np.where(np.isnan(out), -np.inf, out)

    def swapped(self):
        return self

    def pstar_cdf(self, z):
        z = np.asarray(z, dtype=float)
        d = self.delta
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.exp(-((1 + d) / d) * np.logaddexp(0.0, -d * _log(np.maximum(z, 0.0))))
        return _out(np.where(z > 0, out, 0.0))

    def pstar_sample(self, q):
        """Inverse of the p*-CDF: z = (q^(-delta/(1+delta)) - 1)^(-1/delta)."""
        q = np.asarray(q, dtype=float)
        if np.any(~((q > 0) & (q < 1))):
            raise DomainError("p* inverse CDF needs q strictly inside (0, 1)")
        d = self.delta
        w = np.expm1(-(d / (1 + d)) * np.log(q))
        return _out(np.exp(-np.log(w) / d))


@dataclass(frozen=True)
class MixtureCopula(HomogeneousLevyCopula):
    """Convex combination sum_r beta_r F_r of homogeneous Lévy copulas."""

    components: tuple = field()

    def __post_init__(self):
        comps = tuple((float(w), c) for w, c in self.components)
        if not comps:
            raise ParameterDomainError("mixture needs at least one component")
        weights = np.array([w for w, _ in comps])
        if np.any(~(weights > 0)) or np.any(weights > 1):
            raise ParameterDomainError("mixture weights must lie in (0, 1]")
        if abs(weights.sum() - 1.0) > 1e-12:
            raise ParameterDomainError(f"mixture weights sum to {weights.sum()!r}, not 1")
        for _, c in comps:
            if not isinstance(c, HomogeneousLevyCopula):
                raise ParameterDomainError(f"{c!r} is not a homogeneous Lévy copula")
        object.__setattr__(self, "components", comps)

    @property
    def weights(self):
        return np.array([w for w, _ in self.components])

    def value(self, u, v):
        return _out(sum(w * np.asarray(c.value(u, v)) for w, c in self.components))

    def _logmix(self, terms):
        logw = np.log(self.weights)
        stacked = np.stack([lw + np.asarray(t, dtype=float) for lw, t in zip(logw, terms)])
        return logsumexp(stacked, axis=0)

    def log_partial_u(self, u, v):
        return self._logmix(c.log_partial_u(u, v) for _, c in self.components)

    def log1m_partial_u(self, u, v):
        return self._logmix(c.log1m_partial_u(u, v) for _, c in self.components)

    def log_mixed_partial(self, u, v):
        return self._logmix(c.log_mixed_partial(u, v) for _, c in self.components)

    def swapped(self):
        return MixtureCopula(tuple((w, c.swapped()) for w, c in self.components))

    def pstar_sample(self, q):
        """Draws from the mixture p* with a single uniform.

        The bin [c_{k-1}, c_k) of cumulative weights picks component k and the
        position inside that bin, rescaled to (0, 1), drives its inverse CDF.
        This is a valid sampler but not the inverse of the mixture CDF.
        """
        q = np.asarray(q, dtype=float)
        if np.any(~((q > 0) & (q < 1))):
            raise DomainError("p* sampler needs q strictly inside (0, 1)")
        w = self.weights
        upper = np.cumsum(w)
        k = np.minimum(np.searchsorted(upper, q, side="right"), len(w) - 1)
        lower = upper[k] - w[k]
        inner = np.clip((q - lower) / w[k], np.nextafter(0.0, 1.0), np.nextafter(1.0, 0.0))
        out = np.empty_like(q)
        for j, (_, c) in enumerate(self.components):
            sel = k == j
            if np.any(sel):
                out[sel] = c.pstar_sample(inner[sel])
        return _out(out)


def copula_value(c: HomogeneousLevyCopula, u, v):
    return c.value(u, v)


def copula_partial_u(c: HomogeneousLevyCopula, u, v):
    return c.partial_u(u, v)


def copula_mixed_partial(c: HomogeneousLevyCopula, u, v):
    return c.mixed_partial(u, v)


def pstar_cdf(c: HomogeneousLevyCopula, z):
    return c.pstar_cdf(z)


def pstar_sample(c: HomogeneousLevyCopula, uniform):
    return c.pstar_sample(uniform)


def fstar(c: HomogeneousLevyCopula, u, x):
    return c.fstar(u, x)


def hstar(c: HomogeneousLevyCopula, u, y):
    return c.hstar(u, y)
