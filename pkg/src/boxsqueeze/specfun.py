"""Certified-accuracy special functions: the theta function and Gaussian tails.

The theta function used throughout is

    theta(x, tau) = sum_k exp(-pi tau k^2 + 2 pi i k x),   tau > 0,

real and strictly positive for real x.  For tau >= 1 the defining series
converges in a handful of terms; for tau < 1 the modular identity

    theta(x/(i tau), 1/tau) = sqrt(tau) exp(pi x^2 / tau) theta(x, tau)

turns it into the rapidly convergent Gaussian-comb form
sum_k exp(-pi (k - x)^2 / tau) / sqrt(tau).  Both branches carry an explicit
geometric bound on the dropped tail.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import erfc

from .errors import InvalidGamma, InvalidTau

SQRT_PI = float(np.sqrt(np.pi))

# exp(-_LOG_CUT) is far below double roundoff relative to the leading term
_LOG_CUT = 42.0


def lattice_distance(x):
    """Distance from x to the nearest integer, ties rounded to even.

    Always in [0, 1/2]; vectorized.
    """
    x = np.asarray(x, dtype=float)
    return np.abs(x - np.round(x))


def _theta_direct(x, tau):
    """Defining series; efficient for tau >= 1.  Returns (value, tail bound)."""
    x = np.asarray(x, dtype=float)
    kmax = int(np.ceil(np.sqrt(_LOG_CUT / (np.pi * tau)))) + 1
    k = np.arange(1, kmax + 1)
    weights = np.exp(-np.pi * tau * k**2)
    val = 1.0 + 2.0 * np.cos(2.0 * np.pi * np.multiply.outer(x, k)) @ weights
    # tail: 2 sum_{k>kmax} e^{-pi tau k^2} <= 2 e^{-pi tau (kmax+1)^2} / (1 - r)
    ratio = np.exp(-np.pi * tau * (2 * kmax + 3))
    tail = 2.0 * np.exp(-np.pi * tau * (kmax + 1) ** 2) / (1.0 - ratio)
    return val, tail


def _theta_comb(x, tau):
    """Gaussian-comb form (modular dual); efficient for tau < 1."""
    x = np.asarray(x, dtype=float)
    m = int(np.ceil(np.sqrt(_LOG_CUT * tau / np.pi))) + 1
    base = np.round(x)
    offs = np.arange(-m, m + 1)
    z = np.add.outer(base, offs) - x[..., None]
    val = np.exp(-np.pi * z**2 / tau).sum(axis=-1) / np.sqrt(tau)
    # dropped combs are at distance >= m + 1/2 from x
    edge = (m + 0.5) ** 2
    ratio = np.exp(-np.pi * (2 * m + 2) / tau)
    tail = 2.0 * np.exp(-np.pi * edge / tau) / np.sqrt(tau) / (1.0 - ratio)
    return val, tail


def theta_eval(x, tau: float):
    """theta(x, tau) for real x (scalar or array) and tau > 0."""
    val, _ = theta_eval_with_bound(x, tau)
    return val


def theta_eval_with_bound(x, tau: float):
    """theta(x, tau) together with a certified absolute truncation bound.

    Branch crossover at tau = 1: the defining series above, the Gaussian
    comb below.  Either way <= ~20 terms reach full double precision.
    """
    if not tau > 0.0:
        raise InvalidTau(f"tau must be positive, got {tau}")
    scalar = np.isscalar(x) or np.ndim(x) == 0
    if tau >= 1.0:
        val, tail = _theta_direct(x, tau)
    else:
        val, tail = _theta_comb(x, tau)
    if scalar:
        return float(val), float(tail)
    return val, tail


def _gauss_partial_moment(x: float, gamma: float, order: int) -> float:
    """int_x^infty t^order exp(-gamma t^2) dt for order in 0..4 (closed form)."""
    u = np.sqrt(gamma) * x
    e = np.exp(-gamma * x * x)
    phi = 0.5 * SQRT_PI * erfc(u)  # int_u^inf e^{-t^2} dt
    if order == 0:
        return float(phi / np.sqrt(gamma))
    if order == 1:
        return float(e / (2.0 * gamma))
    if order == 2:
        # the differentiation identity: int_x^inf t^2 e^{-t^2} = (Phi(x) + x e^{-x^2}) / 2
        return float((x * e + phi / np.sqrt(gamma)) / (2.0 * gamma))
    if order == 3:
        return float(e * (gamma * x * x + 1.0) / (2.0 * gamma**2))
    if order == 4:
        i2 = (x * e + phi / np.sqrt(gamma)) / (2.0 * gamma)
        return float(x**3 * e / (2.0 * gamma) + 1.5 * i2 / gamma)
    raise ValueError(f"order {order} not supported")


def gaussian_tail(x: float, gamma: float, order: int = 0) -> float:
    """Gaussian tail integral int_x^infty t^order exp(-gamma t^2) dt.

    order 0 is the plain tail; order 2 goes through the closed identity
    I2(x) = (Phi(x) - x Phi'(x)) / 2 with Phi(x) = int_x^inf e^{-t^2} dt,
    rescaled for general gamma.  x may be negative.
    """
    if not gamma > 0.0:
        raise InvalidGamma(f"gamma must be positive, got {gamma}")
    if order not in (0, 2):
        raise ValueError("order must be 0 or 2")
    return _gauss_partial_moment(float(x), float(gamma), order)


@dataclass(frozen=True)
class ThetaAsymptotics:
    """Leading terms and remainder magnitudes of the small-tau theta estimates.

    Verification targets only; nothing in the computational path uses them.
    ``pointwise_leading``/``pointwise_bound`` are callables of x; the rest
    are numbers.  The mean-x target is exactly zero at a = 0 by symmetry.
    """

    tau: float
    a: float
    pointwise_leading: Callable[[np.ndarray], np.ndarray]
    pointwise_bound: Callable[[np.ndarray], np.ndarray]
    k2_sum_leading: float
    k2_sum_bound: float
    mean_x_leading: float
    mean_x_bound: float
    x2_leading: float
    x2_bound: float


def theta_asymptotic_oracles(tau: float, a: float = 0.0) -> ThetaAsymptotics:
    """Reference values for the four small-tau estimates (|a| < 1/2)."""
    if not tau > 0.0:
        raise InvalidTau(f"tau must be positive, got {tau}")
    if not abs(a) < 0.5:
        raise ValueError(f"|a| must be < 1/2, got {a}")
    edge = np.exp(-(2.0 * np.pi / tau) * (0.5 - abs(a)) ** 2)
    return ThetaAsymptotics(
        tau=tau,
        a=a,
        pointwise_leading=lambda x: np.exp(-np.pi * lattice_distance(x) ** 2 / tau)
        / np.sqrt(tau),
        pointwise_bound=lambda x: np.exp(
            -np.pi * (1.0 - lattice_distance(x)) ** 2 / tau
        )
        / np.sqrt(tau),
        k2_sum_leading=1.0 / (2.0 * np.pi * tau**1.5),
        k2_sum_bound=np.exp(-np.pi / tau) / (2.0 * np.pi * tau**1.5),
        mean_x_leading=0.0,
        mean_x_bound=float(edge),
        x2_leading=np.sqrt(tau / 2.0) / (4.0 * np.pi),
        x2_bound=float(edge),
    )


def theta_k2_sum(tau: float) -> float:
    """sum_k k^2 exp(-pi tau k^2) by direct summation (machine accurate)."""
    if not tau > 0.0:
        raise InvalidTau(f"tau must be positive, got {tau}")
    kmax = int(np.ceil(np.sqrt((_LOG_CUT + 20.0) / (np.pi * tau)))) + 2
    k = np.arange(1, kmax + 1, dtype=float)
    return float(2.0 * np.sum(k**2 * np.exp(-np.pi * tau * k**2)))
