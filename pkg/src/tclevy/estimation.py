"""Parametric fitting: MLE for the Clayton-coupled CPP pair and moment fit of (mu, sigma^2).

Parameters are ordered (lam1, lam2, theta1, theta2, delta) throughout.
The joint-jump intensity F(lam1, lam2; delta) is always derived from the
other parameters, never fitted on its own.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np
from scipy.optimize import minimize

from .copula import ClaytonCopula, HomogeneousLevyCopula
from .errors import DataError, DomainError, ParameterDomainError


class CppCopulaParams(NamedTuple):
    lam1: float
    lam2: float
    theta1: float
    theta2: float
    delta: float

    def check(self) -> "CppCopulaParams":
        if not all(np.isfinite(p) and p > 0 for p in self):
            raise ParameterDomainError(f"all parameters must be positive, got {tuple(self)}")
        return self


@dataclass(frozen=True)
class PairedJumpData:
    """Jumps of the pair observed on [0, horizon].

    ``joint`` holds simultaneous jumps as an (n, 2) array; ``solo1`` and
    ``solo2`` the jumps of one margin only.
    """

    joint: np.ndarray
    solo1: np.ndarray = field(default_factory=lambda: np.empty(0))
    solo2: np.ndarray = field(default_factory=lambda: np.empty(0))
    horizon: float = 1.0

    def __post_init__(self):
        joint = np.asarray(self.joint, dtype=float).reshape(-1, 2)
        solo1 = np.asarray(self.solo1, dtype=float).reshape(-1)
        solo2 = np.asarray(self.solo2, dtype=float).reshape(-1)
        for arr in (joint, solo1, solo2):
            if np.any(~(arr > 0)) or np.any(~np.isfinite(arr)):
                raise DataError("jump sizes must be positive and finite")
        if not (self.horizon > 0):
            raise DataError("observation horizon must be positive")
        object.__setattr__(self, "joint", joint)
        object.__setattr__(self, "solo1", solo1)
        object.__setattr__(self, "solo2", solo2)
        object.__setattr__(self, "horizon", float(self.horizon))

    @property
    def n_joint(self) -> int:
        return len(self.joint)

    @property
    def has_solo(self) -> bool:
        return len(self.solo1) > 0 or len(self.solo2) > 0

    @property
    def n_jumps(self) -> tuple[int, int]:
        return self.n_joint + len(self.solo1), self.n_joint + len(self.solo2)

    def is_degenerate(self) -> bool:
        x1 = np.concatenate((self.joint[:, 0], self.solo1))
        x2 = np.concatenate((self.joint[:, 1], self.solo2))
        return len(x1) < 2 or len(x2) < 2 or np.ptp(x1) == 0 or np.ptp(x2) == 0


@dataclass(frozen=True)
class ExponentialJumps:
    """Jump-size law with density theta * exp(-theta x) on x > 0."""

    def logpdf(self, x, theta):
        return np.log(theta) - theta * np.asarray(x)

    def logsf(self, x, theta):
        return -theta * np.asarray(x)


EXPONENTIAL = ExponentialJumps()


def classify_jumps(inc1, inc2, horizon: float, threshold1: float | None = None,
                   threshold2: float | None = None, percentile: float = 10.0) -> PairedJumpData:
    """Joint and solo jumps from binned increments of the two subordinators.

    A margin jumps in a bin when its increment exceeds its threshold c; a
    missing threshold defaults to the ``percentile``-th percentile of that
    margin's positive increments.
    """
    inc1 = np.asarray(inc1, dtype=float)
    inc2 = np.asarray(inc2, dtype=float)
    if inc1.shape != inc2.shape:
        raise DataError("increment series differ in length")

    def default(inc):
        pos = inc[inc > 0]
        if pos.size == 0:
            raise DataError("no positive increments to classify")
        return float(np.percentile(pos, percentile))

    c1 = default(inc1) if threshold1 is None else float(threshold1)
    c2 = default(inc2) if threshold2 is None else float(threshold2)
    j1 = inc1 > c1
    j2 = inc2 > c2
    both = j1 & j2
    return PairedJumpData(
        joint=np.column_stack((inc1[both], inc2[both])),
        solo1=inc1[j1 & ~j2],
        solo2=inc2[j2 & ~j1],
        horizon=horizon,
    )


def loglik_clayton_exp(data: PairedJumpData, params) -> float:
    """Closed-form log-likelihood for joint jumps only, exponential margins, Clayton copula.

    ln L = n ln((1+d) th1 th2 (l1 l2)^(d+1)) - lam_par T - (1+d)(th1 sum x + th2 sum y)
           - (1/d + 2) sum ln(l1^d e^(-th1 d x) + l2^d e^(-th2 d y))
    """
    lam1, lam2, th1, th2, d = CppCopulaParams(*params).check()
    if data.n_joint == 0:
        raise DataError("likelihood needs at least one joint jump")
    if data.has_solo:
        raise DataError("closed form assumes every jump is joint; use loglik_general")
    x, y = data.joint[:, 0], data.joint[:, 1]
    n = data.n_joint
    lam_par = ClaytonCopula(d).value(lam1, lam2)
    head = n * (math.log1p(d) + math.log(th1) + math.log(th2)
                + (d + 1) * (math.log(lam1) + math.log(lam2)))
    tail = np.logaddexp(d * (math.log(lam1) - th1 * x), d * (math.log(lam2) - th2 * y))
    return float(head - lam_par * data.horizon
                 - (1 + d) * (th1 * x.sum() + th2 * y.sum())
                 - (1 / d + 2) * tail.sum())


def loglik_general(data: PairedJumpData, params, margin1=EXPONENTIAL, margin2=EXPONENTIAL,
                   copula_family: Callable[[float], HomogeneousLevyCopula] = ClaytonCopula) -> float:
    """ln(I1 I2 I3) for the pair, with solo jumps and arbitrary jump laws.

    The solo intensities are lam_k - F(lam1, lam2).  With no solo jumps this
    equals ``loglik_clayton_exp`` minus (lam1 + lam2 - 2 F(lam1, lam2)) T, the
    log-probability of observing no solo jump, which the closed form omits.
    """
    lam1, lam2, th1, th2, d = CppCopulaParams(*params).check()
    if data.n_joint + len(data.solo1) + len(data.solo2) == 0:
        raise DataError("likelihood needs at least one jump")
    c = copula_family(d)
    T = data.horizon
    lam_par = float(c.value(lam1, lam2))
    lam_perp1 = lam1 - lam_par
    lam_perp2 = lam2 - lam_par

    ll = 0.0
    if len(data.solo1):
        xs = data.solo1
        u = lam1 * np.exp(margin1.logsf(xs, th1))
        ll += len(xs) * math.log(lam1) + np.sum(margin1.logpdf(xs, th1) + c.log1m_partial_u(u, lam2))
    ll -= lam_perp1 * T
    if len(data.solo2):
        ys = data.solo2
        v = lam2 * np.exp(margin2.logsf(ys, th2))
        ll += len(ys) * math.log(lam2) + np.sum(margin2.logpdf(ys, th2) + c.log1m_partial_v(lam1, v))
    ll -= lam_perp2 * T
    if data.n_joint:
        x, y = data.joint[:, 0], data.joint[:, 1]
        u = lam1 * np.exp(margin1.logsf(x, th1))
        v = lam2 * np.exp(margin2.logsf(y, th2))
        ll += data.n_joint * (math.log(lam1) + math.log(lam2)) + np.sum(
            margin1.logpdf(x, th1) + margin2.logpdf(y, th2) + c.log_mixed_partial(u, v))
    ll -= lam_par * T
    return float(ll)


def loglik(data: PairedJumpData, params) -> float:
    """The applicable likelihood: closed form when all jumps are joint."""
    if data.has_solo or data.n_joint == 0:
        return loglik_general(data, params)
    return loglik_clayton_exp(data, params)


@dataclass(frozen=True)
class FitResult:
    params: CppCopulaParams
    loglik: float
    converged: bool
    iterations: int
    degenerate: bool = False
    message: str = ""


def initial_guess(data: PairedJumpData) -> CppCopulaParams:
    """Jump counts over the horizon, inverse mean jump sizes and delta = 1."""
    n1, n2 = data.n_jumps
    x1 = np.concatenate((data.joint[:, 0], data.solo1))
    x2 = np.concatenate((data.joint[:, 1], data.solo2))
    if n1 == 0 or n2 == 0:
        raise DataError("each margin needs at least one jump to initialize the fit")
    return CppCopulaParams(n1 / data.horizon, n2 / data.horizon,
                           1.0 / x1.mean(), 1.0 / x2.mean(), 1.0)


def mle_fit(data: PairedJumpData, init=None, space: str = "log", max_iter: int = 5000,
            xatol: float = 1e-8, restarts: int = 3) -> FitResult:
    """Maximize the log-likelihood with Nelder-Mead.

    ``space="log"`` searches over log-parameters; ``"raw"`` over the
    parameters themselves with an infinite penalty outside the domain.
    Convergence means the simplex shrank below ``xatol`` (in the search
    coordinates) before ``max_iter`` iterations.  The search is restarted
    from its own optimum up to ``restarts`` times, which guards against the
    simplex collapsing early.
    """
    if space not in ("log", "raw"):
        raise ValueError("space must be 'log' or 'raw'")
    start = initial_guess(data) if init is None else CppCopulaParams(*init).check()
    degenerate = data.is_degenerate()

    if space == "log":
        to_params = np.exp
        x0 = np.log(np.asarray(start, dtype=float))
    else:
        def to_params(z):
            return z
        x0 = np.asarray(start, dtype=float)

    def objective(z):
        try:
            val = loglik(data, to_params(z))
        except (ParameterDomainError, DomainError):
            return np.inf
        return -val if np.isfinite(val) else np.inf

    total_iter = 0
    best = None
    for _ in range(restarts + 1):
        res = minimize(objective, x0, method="Nelder-Mead",
                       options={"maxiter": max(max_iter - total_iter, 1), "xatol": xatol,
                                "fatol": np.inf, "adaptive": False})
        total_iter += int(res.nit)
        improved = best is None or res.fun < best.fun - 1e-10
        if best is None or res.fun <= best.fun:
            best = res
        x0 = best.x
        if not improved or total_iter >= max_iter:
            break

    params = CppCopulaParams(*(float(p) for p in to_params(best.x)))
    converged = bool(best.success) and total_iter < max_iter and np.isfinite(best.fun)
    return FitResult(params=params, loglik=float(-best.fun), converged=converged,
                     iterations=total_iter, degenerate=degenerate,
                     message="degenerate data: all jumps identical" if degenerate else str(best.message))


@dataclass(frozen=True)
class MomentFit:
    mu: float
    sigma2: float
    negative_variance: bool


def mom_fit(returns, p, t: float = 1.0) -> MomentFit:
    """Method-of-moments (mu, sigma^2) for Y = mu T + sigma W(T), T a CPP(lam, Exp(theta)).

    Inverts E[Y] = mu lam t / theta and
    Var[Y] = sigma^2 lam t / theta + 2 mu^2 lam t / theta^2.
    A negative variance estimate is returned as-is with a warning.
    """
    y = np.asarray(returns, dtype=float).reshape(-1)
    if y.size < 2:
        raise DataError("method of moments needs at least two returns")
    if not (t > 0):
        raise DomainError("sampling interval t must be positive")
    lam, theta = p.lam, p.theta
    mean = y.mean()
    var = y.var(ddof=1)
    clock_mean = lam * t / theta
    mu = mean / clock_mean
    sigma2 = (var - 2 * mu * mu * lam * t / theta ** 2) / clock_mean
    negative = bool(sigma2 < 0)
    if negative:
        warnings.warn(f"moment estimate of sigma^2 is negative ({sigma2:.3g})", RuntimeWarning,
                      stacklevel=2)
    return MomentFit(float(mu), float(sigma2), negative)
