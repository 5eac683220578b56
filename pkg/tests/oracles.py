"""Reference computations that share no code path with the package.

Everything here is written from the closed forms directly (plain math and
root finding), so tests comparing against it are two-route checks.
"""
import math

import numpy as np
from scipy.optimize import brentq


def clayton(u, v, d):
    if u == 0 or v == 0:
        return 0.0
    if math.isinf(u):
        return v
    if math.isinf(v):
        return u
    return (u ** -d + v ** -d) ** (-1.0 / d)


def clayton_du(u, v, d):
    # (v/u)^(d+1) / (1 + (v/u)^d)^((1+d)/d)
    r = v / u
    if r > 1:
        # same quantity divided through by r^(d+1)
        return (r ** -d + 1) ** (-(1 + d) / d)
    return r ** (d + 1) / (1 + r ** d) ** ((1 + d) / d)


def bisect_inverse(f, q, lo=1e-300, hi=1e300, tol=1e-15):
    """Root of f(z) = q for increasing f by bisection in log space."""
    llo, lhi = math.log(lo), math.log(hi)
    for _ in range(400):
        mid = 0.5 * (llo + lhi)
        if f(math.exp(mid)) < q:
            llo = mid
        else:
            lhi = mid
        if lhi - llo < tol:
            break
    return math.exp(0.5 * (llo + lhi))


def sample_joint_jumps(lam1, lam2, th1, th2, d, horizon, seed):
    """Simultaneous jumps of the Clayton-coupled exponential CPP pair on [0, horizon].

    (A, B) = (U1(X), U2(Y)) has distribution function F(a, b) / F(lam1, lam2)
    on (0, lam1] x (0, lam2]; A is drawn from its margin, then B from the
    conditional law dF/du(a, b) / dF/du(a, lam2), both by root finding.
    """
    rng = np.random.default_rng(seed)
    lam_par = clayton(lam1, lam2, d)
    n = rng.poisson(lam_par * horizon)
    out = np.empty((n, 2))
    for i in range(n):
        qa, qb = rng.random(2)
        a = brentq(lambda s: clayton(s, lam2, d) / lam_par - qa, 1e-30, lam1, xtol=1e-14, rtol=1e-14)
        top = clayton_du(a, lam2, d)
        b = brentq(lambda s: clayton_du(a, s, d) / top - qb, 1e-30, lam2, xtol=1e-14, rtol=1e-14)
        out[i, 0] = -math.log(a / lam1) / th1
        out[i, 1] = -math.log(b / lam2) / th2
    return out


def loglik_clayton_exp_loop(joint, lam1, lam2, th1, th2, d, horizon):
    """Closed-form joint-jump log-likelihood evaluated term by term."""
    n = len(joint)
    lam_par = clayton(lam1, lam2, d)
    total = n * math.log((1 + d) * th1 * th2 * (lam1 * lam2) ** (d + 1)) - lam_par * horizon
    for x, y in joint:
        total -= (1 + d) * (th1 * x + th2 * y)
        total += (-1 / d - 2) * math.log(lam1 ** d * math.exp(-th1 * d * x)
                                         + lam2 ** d * math.exp(-th2 * d * y))
    return total


def cpp_terminal(lam, theta, n, seed):
    """T(1) of a CPP(lam, Exp(theta)) drawn by count-then-sizes."""
    rng = np.random.default_rng(seed)
    counts = rng.poisson(lam, n)
    out = np.zeros(n)
    pos = counts > 0
    out[pos] = rng.gamma(counts[pos], 1.0 / theta)
    return out


def ks_critical(n, m, alpha=0.01):
    """Asymptotic two-sample Kolmogorov-Smirnov critical value."""
    c = math.sqrt(-0.5 * math.log(alpha / 2))
    return c * math.sqrt((n + m) / (n * m))
