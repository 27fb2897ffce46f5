"""Constants attached to the slope theta = g/n.

The chain is theta -> h -> lambda: h in (0, 1/4] solves d(h) = (1 - 2 theta)/6,
lambda = h / (1 + 8h)^{3/2}, and f integrates -log lambda.  Everything here is
double precision; scipy supplies the root finder and the quadrature.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.optimize import brentq

from .errors import DomainError, NoConvergence, QuadratureFailure

LAMBDA_C = 1.0 / (12.0 * math.sqrt(3.0))
F_AT_0 = math.log(12.0 * math.sqrt(3.0))
F_AT_HALF = math.log(6.0) - 1.0

# below this theta the integral is skipped and f(0) returned with a warning
THETA_FLOOR = 1e-8
QUAD_TOL = 1e-8


def _log_ratio(h: float, s: float) -> float:
    """log((1+s)/(1-s)) for s = sqrt(1-4h), written to survive h -> 0."""
    return 2.0 * math.log1p(s) - math.log(4.0 * h)


def d_of_h(h: float) -> float:
    if not 0.0 < h <= 0.25:
        raise DomainError(f"d_of_h needs 0 < h <= 1/4, got {h}")
    s = math.sqrt(max(0.0, 1.0 - 4.0 * h))
    if s < 1e-4:
        # log((1+s)/(1-s)) / s = 2 (1 + s^2/3 + s^4/5 + ...)
        ratio = 2.0 * (1.0 + s * s / 3.0 + s**4 / 5.0)
        return h * ratio / (1.0 + 8.0 * h)
    return h * _log_ratio(h, s) / ((1.0 + 8.0 * h) * s)


def lambda_of_h(h: float) -> float:
    return h / (1.0 + 8.0 * h) ** 1.5


@lru_cache(maxsize=1 << 16)
def h_of_theta(theta: float) -> float:
    if not 0.0 <= theta < 0.5:
        raise DomainError(f"h_of_theta needs 0 <= theta < 1/2, got {theta}")
    if theta == 0.0:
        return 0.25
    target = (1.0 - 2.0 * theta) / 6.0
    try:
        h = brentq(lambda x: d_of_h(x) - target, 1e-300, 0.25,
                   xtol=1e-300, rtol=1e-15, maxiter=500)
    except (RuntimeError, ValueError) as exc:
        raise NoConvergence(f"no root for theta={theta}: {exc}") from exc
    if abs(d_of_h(h) - target) > 1e-12:
        raise NoConvergence(f"residual too large at theta={theta}")
    return h


def lambda_of_theta(theta: float) -> float:
    if theta == 0.5:
        return 0.0
    return lambda_of_h(h_of_theta(theta))


def _neg_log_lambda_at_inverse(t: float) -> float:
    return -math.log(lambda_of_theta(1.0 / t))


@lru_cache(maxsize=4096)
def _f_with_error(theta: float) -> tuple[float, float]:
    with warnings.catch_warnings():
        # roundoff warnings are judged by the returned error estimate instead
        warnings.simplefilter("ignore", IntegrationWarning)
        integral, err = quad(_neg_log_lambda_at_inverse, 2.0, 1.0 / theta,
                             epsabs=1e-13, epsrel=1e-13, limit=1000)
    err *= theta
    if not math.isfinite(integral) or err > QUAD_TOL:
        raise QuadratureFailure(f"f({theta}): error estimate {err:.2e}")
    return 2.0 * theta * math.log(12.0 * theta / math.e) + theta * integral, err


def f_of_theta(theta: float) -> float:
    """Exponential growth rate f(theta); exact at both endpoints."""
    if not 0.0 <= theta <= 0.5:
        raise DomainError(f"f_of_theta needs 0 <= theta <= 1/2, got {theta}")
    if theta == 0.0:
        return F_AT_0
    if theta == 0.5:
        return F_AT_HALF
    if theta < THETA_FLOOR:
        warnings.warn(f"theta={theta} below {THETA_FLOOR}; returning f(0)", stacklevel=2)
        return F_AT_0
    return _f_with_error(float(theta))[0]


def f_prime(theta: float, step: float = 1e-3) -> float:
    """Richardson-extrapolated central difference of f."""
    step = min(step, theta / 4.0, (0.5 - theta) / 4.0)
    if step <= 0:
        raise DomainError(f"f_prime needs 0 < theta < 1/2, got {theta}")

    def central(k):
        return (f_of_theta(theta + k) - f_of_theta(theta - k)) / (2.0 * k)

    return (4.0 * central(step / 2.0) - central(step)) / 3.0


def f_second(theta: float) -> float:
    """Closed form of f'' in terms of h = h_of_theta(theta)."""
    if not 0.0 < theta < 0.5:
        raise DomainError(f"f_second needs 0 < theta < 1/2, got {theta}")
    h = h_of_theta(theta)
    s = math.sqrt(1.0 - 4.0 * h)
    denom = 3.0 * h * (-(1.0 + 8.0 * h) * s + (1.0 - 2.0 * h + 16.0 * h * h) * _log_ratio(h, s))
    return -2.0 * (1.0 + 6.0 * h + 128.0 * h**3) * s / denom


def conjecture_constants(theta: float) -> tuple[float, float, float]:
    """(m, D, D') with D = 1/log(1/m) and D' = 3D."""
    if not 0.0 < theta < 0.5:
        raise DomainError(f"conjecture_constants needs 0 < theta < 1/2, got {theta}")
    h = h_of_theta(theta)
    m = (1.0 - 2.0 * h - math.sqrt(1.0 - 4.0 * h)) / (2.0 * h)
    D = 1.0 / math.log(1.0 / m)
    return m, D, 3.0 * D


def max_abs_f_prime(lo: float, hi: float, tol: float = 1e-4, start: int = 8,
                    max_points: int = 1025) -> float:
    """max |f'| on [lo, hi] over a grid doubled until the maximum moves < tol."""
    pts = start
    best = max(abs(f_prime(x)) for x in np.linspace(lo, hi, pts + 1))
    while pts < max_points:
        pts *= 2
        new = max(abs(f_prime(x)) for x in np.linspace(lo, hi, pts + 1)[1::2])
        new = max(new, best)
        if abs(new - best) < tol:
            return new
        best = new
    raise NoConvergence(f"max |f'| on [{lo}, {hi}] not stable after {pts} points")


def max_f(points: int = 400) -> float:
    """max f on [0, 1/2]: uniform grid, a log-spaced grid near 0, both endpoints."""
    grid = np.concatenate([np.linspace(0.0, 0.5, points + 1), np.geomspace(1e-5, 0.05, points // 4)])
    return max(f_of_theta(float(x)) for x in grid)


@lru_cache(maxsize=1)
def _max_f_cached() -> float:
    return max_f()


def proof_constants(theta: float) -> tuple[float, float, float, float, float, float]:
    """(a, b, b', delta, K, max|f'| on [theta/4, theta/2 + 1/4])."""
    if not 0.0 < theta < 0.5:
        raise DomainError(f"proof_constants needs 0 < theta < 1/2, got {theta}")
    mfp = max_abs_f_prime(theta / 4.0, theta / 2.0 + 0.25)
    a = lambda_of_theta(theta / 2.0 + 0.25) ** 2 * math.exp(-mfp)
    b = _max_f_cached() + 2.0 * mfp
    b_prime = b + 2.0 * math.log(6.0)
    delta = theta / (4.0 * (b_prime + math.log(2.0)))
    return a, b, b_prime, delta, 20.0 / theta, mfp


@dataclass(frozen=True)
class ThetaConstants:
    theta: float
    h: float
    lam: float
    f: float
    f_second: float
    m: float
    D: float
    D_prime: float
    a: float
    b: float
    b_prime: float
    delta: float
    K: float
    max_abs_fprime: float

    def to_dict(self) -> dict:
        out = asdict(self)
        out["lambda"] = out.pop("lam")
        return out


def theta_constants(theta: float) -> ThetaConstants:
    h = h_of_theta(theta)
    m, D, Dp = conjecture_constants(theta)
    a, b, bp, delta, K, mfp = proof_constants(theta)
    return ThetaConstants(theta, h, lambda_of_h(h), f_of_theta(theta), f_second(theta),
                          m, D, Dp, a, b, bp, delta, K, mfp)
