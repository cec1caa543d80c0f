"""Momentum-coefficient series: storage, normalization, truncation, evaluation.

Coefficients are stored densely over a contiguous integer range
[k_min, k_min + len - 1] (explicit offset); the plane-wave basis is
phi_k(x) = exp(i pi k x / l) / sqrt(2 l) with momentum p_k = pi hbar k / l.

``tail_bound`` is a certified upper bound on the *momentum-weighted* tail
sum_{k outside range} (1 + k^2) |a_k|^2.  It is 0 for exactly finite series,
finite for all supported families, and +inf for diagnostic fixtures that do
not lie in the domain of the momentum operator.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Union

import numpy as np

from .errors import NoFiniteTail, NonSummable, OutOfDomain, ZeroSeries
from .geometry import IntervalGeometry
from .specfun import _gauss_partial_moment

_CHUNK = 512  # x-chunk size for the evaluation matrix


@dataclass(frozen=True)
class SpectralSeries:
    coefficients: np.ndarray
    k_min: int
    tail_bound: float = 0.0

    def __post_init__(self):
        coeff = np.array(self.coefficients, dtype=complex)
        coeff.setflags(write=False)
        object.__setattr__(self, "coefficients", coeff)
        if coeff.ndim != 1 or coeff.size == 0:
            raise ZeroSeries("coefficient array must be 1-d and non-empty")

    @property
    def k_values(self) -> np.ndarray:
        return np.arange(self.k_min, self.k_min + self.coefficients.size)

    @property
    def truncation_k(self) -> int:
        return int(max(abs(self.k_min), abs(self.k_min + self.coefficients.size - 1)))

    @property
    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.coefficients) ** 2))

    def coefficient(self, k: int) -> complex:
        i = k - self.k_min
        if 0 <= i < self.coefficients.size:
            return complex(self.coefficients[i])
        return 0.0j


def series_from_map(coeffs: dict[int, complex], tail_bound: float = 0.0) -> SpectralSeries:
    """Convenience constructor from a {k: a_k} mapping."""
    ks = sorted(coeffs)
    k_min, k_max = ks[0], ks[-1]
    arr = np.zeros(k_max - k_min + 1, dtype=complex)
    for k, v in coeffs.items():
        arr[k - k_min] = v
    return SpectralSeries(arr, k_min, tail_bound)


def normalize_series(series: SpectralSeries) -> SpectralSeries:
    """Rescale so sum |a_k|^2 = 1; phases untouched, tail bound rescaled."""
    nsq = series.norm_sq
    if nsq == 0.0:
        raise ZeroSeries("cannot normalize an all-zero series")
    scale = 1.0 / np.sqrt(nsq)
    return SpectralSeries(
        series.coefficients * scale, series.k_min, series.tail_bound / nsq
    )


@dataclass(frozen=True)
class GaussianDecay:
    """Squared-magnitude model |a_k|^2 = mass_scale * exp(-(k-center)^2 / (2 sigma^2))."""

    mass_scale: float
    center: float
    sigma: float


def _gaussian_weighted_tail(decay: GaussianDecay, K: int, weight_power: int) -> float:
    """Certified bound on sum_{|k|>K} (1 + k^p) |a_k|^2 for Gaussian decay.

    Uses f(K+1) + int_{K+1}^inf f on each side (valid once f decreases),
    with the integral in closed form via one-sided Gaussian moments.  The
    lower tail k <= -(K+1) is the upper tail of the center-reflected decay
    (the weight is even in k).
    """
    from math import comb

    gamma = 1.0 / (2.0 * decay.sigma**2)
    p = weight_power

    def upper(k0: float, c: float) -> float:
        # sum over k >= k0 of (1 + k^p) e^{-gamma (k - c)^2}
        u0 = k0 - c
        total = _gauss_partial_moment(u0, gamma, 0)
        for j in range(p + 1):
            total += comb(p, j) * c ** (p - j) * _gauss_partial_moment(u0, gamma, j)
        total += (1.0 + k0**p) * np.exp(-gamma * (k0 - c) ** 2)
        return total

    both = upper(K + 1, decay.center) + upper(K + 1, -decay.center)
    return float(decay.mass_scale * both)


def choose_truncation(
    decay: Union[GaussianDecay, Callable[[int], float]],
    tol: float,
    weight_power: int = 4,
    k_max: int = 200000,
) -> tuple[int, float]:
    """Smallest K with a certified sum_{|k|>K} (1 + k^p) |a_k|^2 < tol.

    Gaussian-decay models get the analytic tail bound; a callable
    k -> |a_k|^2 falls back to direct outward summation with a geometric
    remainder certificate (requires the weighted terms to settle into a
    ratio < 1, as every log-concave-tailed family does).

    Returns (K, certified_bound).  Raises :class:`NoFiniteTail` if the
    certificate cannot reach ``tol`` by ``k_max``.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    if isinstance(decay, GaussianDecay):
        # monotone tail needs (t - c) t > p sigma^2 past the turning point of
        # the polynomial-times-Gaussian weight, for both centers +-c
        c = abs(decay.center)
        turn = 0.5 * (c + np.sqrt(c * c + 4.0 * weight_power * decay.sigma**2))
        k_lo = int(np.ceil(turn)) + 1
        lo, hi = k_lo, None
        k = max(k_lo, 1)
        while k <= k_max:
            if _gaussian_weighted_tail(decay, k, weight_power) < tol:
                hi = k
                break
            k = max(k + 1, int(k * 1.25))
        if hi is None:
            raise NoFiniteTail(f"certified Gaussian tail stays >= {tol} up to K={k_max}")
        while hi > k_lo and _gaussian_weighted_tail(decay, hi - 1, weight_power) < tol:
            hi -= 1
        return hi, _gaussian_weighted_tail(decay, hi, weight_power)

    # direct-summation fallback
    sq = decay
    run = 0
    zero_run = 0
    last_nonzero = 0
    prev = None
    k = 0
    while k < k_max:
        k += 1
        term = (1.0 + float(k) ** weight_power) * (sq(k) + sq(-k))
        if term == 0.0:
            zero_run += 1
            if zero_run >= 16:  # exact finite support
                return last_nonzero, 0.0
        else:
            zero_run = 0
            last_nonzero = k
        if prev is not None and prev > 0 and term > 0:
            ratio = term / prev
            run = run + 1 if ratio < 0.9 else 0
            if run >= 8:
                rem = term * ratio / (1.0 - min(ratio, 0.9))
                if rem + term < tol:
                    # K = k keeps everything up to k; remainder starts at k+1
                    return k, rem + term
        prev = term
    raise NoFiniteTail(
        f"weighted tail shows no certified decay below {tol} up to K={k_max}"
    )


def evaluate_series(series: SpectralSeries, geometry: IntervalGeometry, x):
    """psi(x) = (1/sqrt(2l)) sum a_k exp(i pi k x / l), vectorized over x."""
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    xs = np.atleast_1d(x)
    k = series.k_values
    out = np.empty(xs.size, dtype=complex)
    coef = series.coefficients
    w = np.pi / geometry.l
    for i0 in range(0, xs.size, _CHUNK):
        sl = slice(i0, min(i0 + _CHUNK, xs.size))
        out[sl] = np.exp(1j * w * np.outer(xs[sl], k)) @ coef
    out /= np.sqrt(2.0 * geometry.l)
    return out[0] if scalar else out


def series_domain_check(geometry: IntervalGeometry, x) -> None:
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    lim = geometry.l * (1.0 + 1e-12)
    if np.any(np.abs(xs) > lim):
        raise OutOfDomain(f"position outside [-l, l] with l = {geometry.l}")


def abs_sum_bound(series: SpectralSeries) -> float:
    """Certified upper bound on sum_k |a_k| including the tail.

    Cauchy-Schwarz on the tail: sum_{tail} |a_k| <= sqrt(tail_bound * sum 1/(1+k^2))
    <= sqrt(tail_bound * pi).
    """
    head = float(np.sum(np.abs(series.coefficients)))
    if not np.isfinite(series.tail_bound):
        return np.inf
    return head + float(np.sqrt(series.tail_bound * np.pi))


def boundary_values(series: SpectralSeries, geometry: IntervalGeometry) -> tuple[complex, complex]:
    """(psi(-l), psi(l)) via the uniformly convergent series.

    Every basis mode is 2l-periodic, so the two values coincide identically;
    the shared value (1/sqrt(2l)) sum (-1)^k a_k is reported at both ends.
    """
    if not np.isfinite(abs_sum_bound(series)):
        raise NonSummable("sum |a_k| (with tail bound) diverges; no uniform boundary limit")
    signs = np.where(series.k_values % 2 == 0, 1.0, -1.0)
    v = complex(np.sum(signs * series.coefficients) / np.sqrt(2.0 * geometry.l))
    return v, v


@dataclass(frozen=True)
class EnergySeries:
    """Coefficients b_n, n = 1..N, over the infinite-well sine eigenbasis."""

    coefficients: np.ndarray  # b_n at index n-1
    geometry: IntervalGeometry
    truncation_error: float = 0.0

    def __post_init__(self):
        coeff = np.array(self.coefficients, dtype=complex)
        coeff.setflags(write=False)
        object.__setattr__(self, "coefficients", coeff)

    @property
    def n_values(self) -> np.ndarray:
        return np.arange(1, self.coefficients.size + 1)

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.geometry.energy_level(self.n_values)

    @property
    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.coefficients) ** 2))
