"""Builders for the squeezed-state families on the interval.

Four constructions:

* mollified truncated Gaussians (smooth cutoff at the walls),
* theta states (Gaussian momentum coefficients, closed form via theta),
* discretized-density packets (bin masses of a scaled momentum density),
* well-adapted states (antisymmetrized image of a doubled-interval state,
  vanishing at both walls with rapidly decaying sine-basis coefficients).

All builders return :class:`~boxsqueeze.states.StateDescriptor` objects
with the momentum series populated; theta and Gaussian families also carry
closed-form position evaluators and analytic derivatives.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.special import ndtr, wofz

from .errors import (
    DensityNotEven,
    DensityNotMonotone,
    EpsilonTooLarge,
    InfiniteSecondMoment,
    NoFiniteTail,
    TargetTooCloseToWall,
    ValidationError,
)
from .geometry import ClassicalTarget, IntervalGeometry
from .quadrature import integrate_real, merge_breakpoints
from .series import GaussianDecay, SpectralSeries, choose_truncation
from .specfun import theta_eval
from .states import StateDescriptor, WellAdaptedData

# ---------------------------------------------------------------------------
# momentum densities
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DensityCertificate:
    grid_half_width: float
    even_defect: float
    monotone_defect: float
    mass_defect: float
    mean_defect: float
    ok: bool


@dataclass(frozen=True)
class DensitySpec:
    """Even, peaked, non-increasing momentum density with finite variance.

    ``cdf`` and ``tail_moments`` (V -> partial moments of orders 0..2 over
    q > V) unlock exact bin masses and certified truncation tails; both are
    optional and fall back to quadrature.
    """

    phi: Callable[[np.ndarray], np.ndarray]
    second_moment: float
    peak_value: float
    cdf: Optional[Callable[[np.ndarray], np.ndarray]] = None
    tail_moments: Optional[Callable[[float], tuple]] = None
    name: str = "custom"
    smooth: bool = False  # twice continuously differentiable with small phi''
    monotone_certificate: DensityCertificate = None

    def __post_init__(self):
        if not (np.isfinite(self.second_moment) and self.second_moment > 0):
            raise InfiniteSecondMoment(
                f"second moment must be finite and positive, got {self.second_moment}"
            )
        cert = _certify_density(self.phi, self.second_moment, self.peak_value, self.cdf)
        object.__setattr__(self, "monotone_certificate", cert)

    def bin_mass(self, lo, hi):
        """int_lo^hi phi, exact via the CDF when available."""
        if self.cdf is not None:
            return self.cdf(hi) - self.cdf(lo)
        lo = np.atleast_1d(lo)
        hi = np.atleast_1d(hi)
        out = np.empty(lo.shape)
        for i in range(lo.size):
            out[i], _ = integrate_real(self.phi, lo.flat[i], hi.flat[i], tol=1e-15)
        return out if out.size > 1 else float(out[0])

    def tails(self, v: float) -> tuple:
        """(M0, M1, M2): int_v^inf q^j phi(q) dq for j = 0, 1, 2."""
        if self.tail_moments is not None:
            return self.tail_moments(v)
        sigma = np.sqrt(self.second_moment)
        hi = max(v + 8.0 * sigma, 16.0 * sigma)
        m0, _ = integrate_real(self.phi, v, hi, tol=1e-14)
        m1, _ = integrate_real(lambda q: q * self.phi(q), v, hi, tol=1e-14)
        m2, _ = integrate_real(lambda q: q * q * self.phi(q), v, hi, tol=1e-14)
        # everything beyond hi is controlled by the (finite) second moment
        rem = self.second_moment / hi**2
        return m0 + rem, m1 + rem * hi, m2 + rem * hi**2


def _certify_density(phi, second_moment, peak_value, cdf) -> DensityCertificate:
    sigma = float(np.sqrt(second_moment))
    half = 8.0 * sigma
    q = np.linspace(0.0, half, 10_000)
    fwd = np.asarray(phi(q), dtype=float)
    bwd = np.asarray(phi(-q), dtype=float)
    scale = max(peak_value, 1e-300)
    even_defect = float(np.max(np.abs(fwd - bwd))) / scale
    monotone_defect = float(np.max(np.maximum(np.diff(fwd), 0.0))) / scale
    if even_defect > 1e-10:
        raise DensityNotEven(f"sampled evenness defect {even_defect:.3e}")
    if monotone_defect > 1e-10:
        raise DensityNotMonotone(f"sampled non-increase defect {monotone_defect:.3e}")
    peak_sampled = float(np.asarray(phi(np.zeros(1)))[0])
    if abs(peak_sampled - peak_value) > 1e-10 * scale:
        raise ValidationError("peak_value does not match phi(0)")
    if cdf is not None:
        w = 2048.0 * sigma
        mass = float(cdf(w) - cdf(-w))
        allowance = 1e-9 + second_moment / w**2
    else:
        mass, _ = integrate_real(phi, -half, half, tol=1e-12)
        grow, _ = integrate_real(phi, half, 4 * half, tol=1e-12)
        # beyond 4*half only the second-moment Chebyshev remainder is known
        allowance = 2.0 * grow + 2.0 * second_moment / (4 * half) ** 2
    mass_defect = abs(mass - 1.0)
    mean, _ = integrate_real(lambda t: t * phi(t), -half, half, tol=1e-12)
    mean_defect = abs(mean)
    if mass_defect > 1e-6 + allowance:
        raise ValidationError(f"density mass {mass} (allowance {allowance:.2e}) far from 1")
    if mean_defect > 1e-10:
        raise ValidationError(f"density mean {mean:.3e} not zero")
    return DensityCertificate(
        grid_half_width=half,
        even_defect=even_defect,
        monotone_defect=monotone_defect,
        mass_defect=mass_defect,
        mean_defect=mean_defect,
        ok=True,
    )


def gaussian_density() -> DensitySpec:
    """Standard normal: phi(q) = exp(-q^2/2)/sqrt(2 pi), Delta q^2 = 1."""
    inv = 1.0 / np.sqrt(2.0 * np.pi)

    def tails(v):
        m0 = ndtr(-v)
        m1 = inv * np.exp(-0.5 * v * v)
        m2 = v * m1 + m0
        return float(m0), float(m1), float(m2)

    return DensitySpec(
        phi=lambda q: inv * np.exp(-0.5 * np.asarray(q, float) ** 2),
        second_moment=1.0,
        peak_value=inv,
        cdf=lambda q: ndtr(np.asarray(q, float)),
        tail_moments=tails,
        name="gaussian",
        smooth=True,
    )


def laplace_density() -> DensitySpec:
    """Symmetrized exponential with unit variance (scale b = 1/sqrt(2))."""
    b = 1.0 / np.sqrt(2.0)

    def phi(q):
        return np.exp(-np.abs(np.asarray(q, float)) / b) / (2.0 * b)

    def cdf(q):
        q = np.asarray(q, float)
        e = 0.5 * np.exp(-np.abs(q) / b)
        return np.where(q < 0, e, 1.0 - e)

    def tails(v):
        # valid for v >= 0, which is how truncation uses it
        e = 0.5 * np.exp(-v / b)
        return float(e), float(e * (v + b)), float(e * (v * v + 2 * v * b + 2 * b * b))

    return DensitySpec(
        phi=phi,
        second_moment=1.0,
        peak_value=1.0 / (2.0 * b),
        cdf=cdf,
        tail_moments=tails,
        name="laplace",
    )


def triangular_density() -> DensitySpec:
    """Triangular on [-w, w] with unit variance (w = sqrt(6)); compact support."""
    w = np.sqrt(6.0)

    def phi(q):
        q = np.abs(np.asarray(q, float))
        return np.maximum(0.0, 1.0 - q / w) / w

    def cdf(q):
        q = np.clip(np.asarray(q, float), -w, w)
        pos = 0.5 + q / w - q * np.abs(q) / (2 * w * w)
        return pos

    def tails(v):
        if v >= w:
            return 0.0, 0.0, 0.0
        m0 = (w - v) ** 2 / (2 * w * w)
        m1 = (w - v) ** 2 * (w + 2 * v) / (6 * w * w)
        m2 = (w - v) ** 3 * (w + 3 * v) / (12 * w * w) + (w - v) ** 2 * v * v / (2 * w * w)
        return float(m0), float(m1), float(m2)

    return DensitySpec(
        phi=phi,
        second_moment=1.0,
        peak_value=1.0 / w,
        cdf=cdf,
        tail_moments=tails,
        name="triangular",
    )


BUILTIN_DENSITIES = {
    "gaussian": gaussian_density,
    "laplace": laplace_density,
    "triangular": triangular_density,
}


# ---------------------------------------------------------------------------
# mollifier
# ---------------------------------------------------------------------------

_BUMP_NORM: Optional[float] = None  # int_0^1 exp(-1/t) dt


def _bump_norm() -> float:
    global _BUMP_NORM
    if _BUMP_NORM is None:
        _BUMP_NORM, _ = integrate_real(
            lambda t: np.exp(-1.0 / np.maximum(t, 1e-300)), 0.0, 1.0, tol=1e-15
        )
    return _BUMP_NORM


@dataclass(frozen=True)
class MollifierSpec:
    """Smooth cutoff eta = indicator([-l+2e, l-2e]) * bump, with derivatives.

    eta == 1 on [-l+3e, l-3e] and == 0 outside [-l+e, l-e]; eta' is the
    difference of two bump evaluations (closed convolution form).
    """

    epsilon: float
    l: float
    c_eps: float
    eta: Callable
    eta_prime: Callable
    eta_double_prime: Callable
    omega: Callable
    omega_prime: Callable
    breakpoints: tuple


def build_mollifier(geometry: IntervalGeometry, epsilon: float) -> MollifierSpec:
    eps = float(epsilon)
    l = geometry.l
    if not eps > 0:
        raise EpsilonTooLarge("epsilon must be positive")
    if 3.0 * eps >= l:
        raise EpsilonTooLarge(f"3*eps = {3 * eps} must stay below l = {l}")
    j = _bump_norm()
    c_eps = 1.0 / (2.0 * eps * j)
    l2 = l - 2.0 * eps

    def omega(s):
        s = np.asarray(s, float)
        inside = np.abs(s) < eps
        out = np.zeros_like(s)
        ss = np.abs(s[inside])
        out[inside] = c_eps * np.exp(-eps / (eps - ss))
        return out

    def omega_prime(s):
        s = np.asarray(s, float)
        inside = (np.abs(s) < eps) & (s != 0.0)
        out = np.zeros_like(s)
        ss = s[inside]
        out[inside] = (
            c_eps
            * np.exp(-eps / (eps - np.abs(ss)))
            * (-eps * np.sign(ss) / (eps - np.abs(ss)) ** 2)
        )
        return out

    def _half_cdf(v: float) -> float:
        # Omega(v*eps) in bump units: int_{-1}^{v} exp(-1/(1-|t|)) dt / (2 j)
        if v <= -1.0:
            return 0.0
        if v >= 1.0:
            return 1.0
        if v <= 0.0:
            g, _ = integrate_real(
                lambda t: np.exp(-1.0 / np.maximum(t, 1e-300)), 0.0, 1.0 + v, tol=1e-15
            )
            return g / (2.0 * j)
        g, _ = integrate_real(
            lambda t: np.exp(-1.0 / np.maximum(t, 1e-300)), 0.0, 1.0 - v, tol=1e-15
        )
        return 1.0 - g / (2.0 * j)

    def eta(x):
        x = np.asarray(x, float)
        out = np.zeros_like(x)
        out[np.abs(x) <= l - 3.0 * eps] = 1.0
        trans = (np.abs(x) > l - 3.0 * eps) & (np.abs(x) < l - eps)
        for i in np.nonzero(trans.ravel())[0]:
            u = abs(x.flat[i]) - l2  # in (-eps, eps)
            out.flat[i] = 1.0 - _half_cdf(u / eps)
        return out

    def eta_prime(x):
        x = np.asarray(x, float)
        return omega(x + l2) - omega(x - l2)

    def eta_double_prime(x):
        x = np.asarray(x, float)
        return omega_prime(x + l2) - omega_prime(x - l2)

    bps = (-l + eps, -l + 2 * eps, -l + 3 * eps, l - 3 * eps, l - 2 * eps, l - eps)
    return MollifierSpec(
        epsilon=eps,
        l=l,
        c_eps=c_eps,
        eta=eta,
        eta_prime=eta_prime,
        eta_double_prime=eta_double_prime,
        omega=omega,
        omega_prime=omega_prime,
        breakpoints=bps,
    )


# ---------------------------------------------------------------------------
# truncated-Gaussian family
# ---------------------------------------------------------------------------

_FFT_N = 32768


def _series_derivatives(series: SpectralSeries, geometry: IntervalGeometry):
    """Term-wise differentiated series evaluator: x -> (psi', psi'')."""
    k = series.k_values
    w = np.pi / geometry.l
    c1 = series.coefficients * (1j * w * k)
    c2 = series.coefficients * (-((w * k) ** 2))
    amp = 1.0 / np.sqrt(2.0 * geometry.l)

    def deriv(x):
        xs = np.atleast_1d(np.asarray(x, float))
        ph = np.exp(1j * w * np.outer(xs, k))
        return amp * (ph @ c1), amp * (ph @ c2)

    return deriv


def _project_fft(psi_vals: np.ndarray, geometry: IntervalGeometry) -> np.ndarray:
    """Momentum coefficients from uniform samples over [-l, l).

    For a C^1 state vanishing with its derivative at the walls the grid
    projection is the discrete orthogonal projection; aliasing is pushed
    below roundoff by the sample count.  Returns a_k for k in
    (-N/2, N/2] in fftshift-free indexing handled by the caller.
    """
    n = psi_vals.size
    f = np.fft.fft(psi_vals) / n
    k = np.fft.fftfreq(n, d=1.0 / n).astype(int)  # 0, 1, ..., -1
    signs = np.where(k % 2 == 0, 1.0, -1.0)
    return np.sqrt(2.0 * geometry.l) * signs * f, k


def build_truncated_gaussian(
    geometry: IntervalGeometry,
    target: ClassicalTarget,
    beta: float,
    epsilon: float,
    keep_floor: float = 4e-15,
) -> StateDescriptor:
    """Mollified Gaussian psi ~ exp(-(x-x*)^2/4b^2 + i x p*/hbar) eta(x).

    Coefficients below ``keep_floor`` times the peak magnitude are dropped
    from the stored series; their measured weighted mass goes into the
    tail bound.
    """
    l, hbar = geometry.l, geometry.hbar
    if not beta > 0:
        raise ValidationError("beta must be positive")
    moll = build_mollifier(geometry, epsilon)
    if abs(target.x_star) >= l - 3.0 * epsilon:
        raise TargetTooCloseToWall(
            f"|x*| = {abs(target.x_star)} >= l - 3 eps = {l - 3 * epsilon}"
        )

    pref = (2.0 * np.pi * beta**2) ** -0.25
    xs_, ps_ = target.x_star, target.p_star

    def gauss(x):
        x = np.asarray(x, float)
        return pref * np.exp(-((x - xs_) ** 2) / (4.0 * beta**2) + 1j * x * ps_ / hbar)

    def gauss_d1(x):
        x = np.asarray(x, float)
        return gauss(x) * (-(x - xs_) / (2.0 * beta**2) + 1j * ps_ / hbar)

    def gauss_d2(x):
        x = np.asarray(x, float)
        lin = -(x - xs_) / (2.0 * beta**2) + 1j * ps_ / hbar
        return gauss(x) * (lin * lin - 1.0 / (2.0 * beta**2))

    peak_bps = tuple(xs_ + c * beta for c in (-30, -10, -3, -1, 0, 1, 3, 10, 30))
    bps = merge_breakpoints(moll.breakpoints, (b for b in peak_bps if abs(b) < l))

    norm_sq, nerr = integrate_real(
        lambda x: np.abs(gauss(x)) ** 2 * moll.eta(x) ** 2,
        -l,
        l,
        tol=1e-15,
        breakpoints=bps,
    )
    b_norm = 1.0 / np.sqrt(norm_sq)

    def psi(x):
        return b_norm * gauss(x) * moll.eta(x)

    def deriv(x):
        x = np.asarray(x, float)
        e, e1, e2 = moll.eta(x), moll.eta_prime(x), moll.eta_double_prime(x)
        g, g1, g2 = gauss(x), gauss_d1(x), gauss_d2(x)
        return b_norm * (g1 * e + g * e1), b_norm * (g2 * e + 2 * g1 * e1 + g * e2)

    grid = -l + (2.0 * l / _FFT_N) * np.arange(_FFT_N)
    a_all, k_all = _project_fft(psi(grid), geometry)
    w_all = (1.0 + k_all.astype(float) ** 2) * np.abs(a_all) ** 2

    # keep the contiguous range of coefficients above the projection noise
    # floor (with margin); everything dropped is measured into the tail bound
    mags = np.abs(a_all)
    kept = mags > keep_floor * mags.max()
    k_kept = k_all[kept]
    k_lo = max(int(k_kept.min()) - 4, int(k_all.min()))
    k_hi = min(int(k_kept.max()) + 4, int(k_all.max()))
    dropped = max(0.0, float(w_all.sum() - w_all[(k_all >= k_lo) & (k_all <= k_hi)].sum()))

    # beyond-grid allowance from the observed high-k envelope ~ C/k^3
    edge = (np.abs(k_all) > _FFT_N // 4) & (np.abs(k_all) <= _FFT_N // 2)
    c3 = float(np.max(np.abs(a_all[edge]) * np.abs(k_all[edge]).astype(float) ** 3))
    beyond = 16.0 * c3**2 / (3.0 * (_FFT_N // 2) ** 3)
    tail_bound = dropped + beyond

    sel = np.argsort(k_all)
    k_sorted = k_all[sel]
    a_sorted = a_all[sel]
    inside = (k_sorted >= k_lo) & (k_sorted <= k_hi)
    series = SpectralSeries(a_sorted[inside], k_lo, tail_bound)

    return StateDescriptor(
        family="gauss",
        target=target,
        geometry=geometry,
        series=series,
        position_evaluator=psi,
        params={
            "beta": float(beta),
            "epsilon": float(epsilon),
            "b_norm": float(b_norm),
            "width_hint": float(beta),
            "mollifier": moll,
        },
        derivatives=deriv,
        breakpoints=bps,
    )


def sharp_cut_gaussian_fixture(
    geometry: IntervalGeometry, target: ClassicalTarget, beta: float, K: int = 512
) -> StateDescriptor:
    """Hard-truncated Gaussian: the negative fixture outside D(p^2).

    Its coefficients decay like 1/k (x* or p* nonzero) or 1/k^2 (centred),
    so the momentum-weighted tail bound is infinite by construction.  Not a
    supported family; used to exercise divergence diagnostics.
    """
    l, hbar = geometry.l, geometry.hbar
    pref = (2.0 * np.pi * beta**2) ** -0.25
    xs_, ps_ = target.x_star, target.p_star
    span = 0.5 * (
        _erf_real((l - xs_) / (np.sqrt(2.0) * beta))
        + _erf_real((l + xs_) / (np.sqrt(2.0) * beta))
    )
    norm = 1.0 / np.sqrt(span)

    def psi(x):
        x = np.asarray(x, float)
        return norm * pref * np.exp(
            -((x - xs_) ** 2) / (4.0 * beta**2) + 1j * x * ps_ / hbar
        )

    k = np.arange(-K, K + 1)
    c = ps_ / hbar - np.pi * k / l
    z_hi = (l - xs_) / (2.0 * beta)
    z_lo = (-l - xs_) / (2.0 * beta)
    vals = _scaled_erf(z_hi, c * beta) - _scaled_erf(z_lo, c * beta)
    coeff = (
        norm
        * pref
        / np.sqrt(2.0 * l)
        * np.exp(1j * c * xs_)
        * beta
        * np.sqrt(np.pi)
        * vals
    )
    series = SpectralSeries(coeff, -K, np.inf)
    return StateDescriptor(
        family="sharpcut",
        target=target,
        geometry=geometry,
        series=series,
        position_evaluator=psi,
        params={"beta": float(beta), "width_hint": float(beta)},
    )


def _erf_real(x):
    from scipy.special import erf

    return erf(x)


def _scaled_erf(xr, b):
    """exp(-b^2) * erf(xr - i b), numerically stable for large |b|.

    Uses the Faddeeva function: for xr >= 0,
    exp(-b^2) erf(xr - i b) = exp(-b^2) - exp(-xr^2 + 2 i xr b) w(b + i xr),
    and erf(-z) = -erf(z) with erf(conj z) = conj(erf z) handles xr < 0:
    E(xr, b) = -conj(E(-xr, b)).
    """
    xr_b, b_b = np.broadcast_arrays(np.asarray(xr, float), np.asarray(b, float))
    flat_x, flat_b = xr_b.ravel(), b_b.ravel()
    res = np.empty(flat_x.size, dtype=complex)
    for i in range(flat_x.size):
        x_, b_ = float(flat_x[i]), float(flat_b[i])
        ax = abs(x_)
        val = np.exp(-b_ * b_) - np.exp(-ax * ax + 2j * ax * b_) * wofz(b_ + 1j * ax)
        res[i] = val if x_ >= 0 else -np.conj(val)
    return res.reshape(xr_b.shape)


# ---------------------------------------------------------------------------
# theta family
# ---------------------------------------------------------------------------


def _theta_raw_coefficients(
    geometry: IntervalGeometry, target: ClassicalTarget, alpha: float, tol: float = 1e-28
):
    """Real symmetric coefficients A exp(-(k - k_bar)^2 / 4 alpha^2) and k range."""
    a_norm = 1.0 / np.sqrt(theta_eval(0.0, 1.0 / (2.0 * np.pi * alpha**2)))
    kb = target.k_bar
    big_k, bound = choose_truncation(
        GaussianDecay(a_norm**2, float(kb), float(alpha)), tol, weight_power=2
    )
    k = np.arange(-big_k, big_k + 1)
    raw = a_norm * np.exp(-((k - kb) ** 2) / (4.0 * alpha**2))
    return k, raw, bound, a_norm


def build_theta_state(
    geometry: IntervalGeometry, target: ClassicalTarget, alpha: float
) -> StateDescriptor:
    """Theta-function state: Gaussian momentum weights, exact normalization.

    A_alpha comes from A^2 theta(0, 1/(2 pi alpha^2)) = 1 (no asymptotic
    shortcut); the closed-form position profile is
    (A/sqrt(2l)) theta((x - x*)/(2l), 1/(4 pi alpha^2)) e^{i pi k_bar (x-x*)/l}.
    """
    if not alpha > 0:
        raise ValidationError("alpha must be positive")
    l = geometry.l
    k, raw, tail_bound, a_norm = _theta_raw_coefficients(geometry, target, alpha)
    phases = np.exp(-1j * np.pi * k * target.x_star / l)
    series = SpectralSeries(raw * phases, int(k[0]), tail_bound)

    tau = 1.0 / (4.0 * np.pi * alpha**2)
    kb = target.k_bar
    xs_ = target.x_star
    amp = a_norm / np.sqrt(2.0 * l)

    def psi(x):
        x = np.asarray(x, float)
        return amp * theta_eval((x - xs_) / (2.0 * l), tau) * np.exp(
            1j * np.pi * kb * (x - xs_) / l
        )

    width = l / (2.0 * np.pi * alpha)
    bps = merge_breakpoints(
        (xs_ + c * width for c in (-30, -10, -3, -1, 0, 1, 3, 10, 30) if abs(xs_ + c * width) < l),
    )
    return StateDescriptor(
        family="theta",
        target=target,
        geometry=geometry,
        series=series,
        position_evaluator=psi,
        params={
            "alpha": float(alpha),
            "a_norm": float(a_norm),
            "width_hint": float(width),
        },
        derivatives=_series_derivatives(series, geometry),
        breakpoints=bps,
    )


# ---------------------------------------------------------------------------
# discretized-density family
# ---------------------------------------------------------------------------


def _disc_raw_coefficients(
    geometry: IntervalGeometry,
    target: ClassicalTarget,
    density: DensitySpec,
    alpha: float,
    tol: float = 1e-14,
    j_max: int = 500000,
):
    """Symmetric bin-mass coefficients sqrt(m_j) around k_bar, plus tail bound."""
    s = np.pi / (geometry.l * alpha)
    kb = target.k_bar

    def weighted_tail(j: int) -> float:
        v = s * (j + 0.5)
        m0, m1, m2 = density.tails(v)
        # sum_{|j'|>j} (1 + k^2) m_{j'} with k = kb + j'; both sides bounded
        # through partial moments of phi (j' <= q/s + 1/2 inside each bin)
        quad = (m2 / s**2) + m1 / s + 0.25 * m0
        lin = abs(kb) * 2.0 * (m1 / s + 0.5 * m0)
        return 2.0 * ((1.0 + kb * kb) * m0 + quad + lin)

    j = max(8, int(2.0 * alpha * geometry.l * np.sqrt(density.second_moment)))
    while weighted_tail(j) >= tol:
        j = int(j * 1.4) + 1
        if j > j_max:
            raise NoFiniteTail(f"discretized tail stays >= {tol} up to J={j_max}")
    while j > 1 and weighted_tail(j - 1) < tol:
        j -= 1
    bound = weighted_tail(j)

    jj = np.arange(0, j + 1)
    masses = np.asarray(density.bin_mass(s * (jj - 0.5), s * (jj + 0.5)), dtype=float)
    masses = np.maximum(masses, 0.0)
    half = np.sqrt(masses)
    raw = np.concatenate([half[:0:-1], half])  # mirror: j = -J..J
    k = np.arange(kb - j, kb + j + 1)
    return k, raw, float(bound)


def build_discretized_state(
    geometry: IntervalGeometry,
    target: ClassicalTarget,
    density: DensitySpec,
    alpha: float,
) -> StateDescriptor:
    """Wave packet from an arbitrary even momentum density.

    a_k = sqrt(bin mass of the alpha-scaled density around k_bar); the
    symmetry a_{k_bar+j} = a_{k_bar-j} is enforced by computing one side
    and mirroring.
    """
    if not alpha > 0:
        raise ValidationError("alpha must be positive")
    k, raw, tail_bound = _disc_raw_coefficients(geometry, target, density, alpha)
    l = geometry.l
    phases = np.exp(-1j * np.pi * k * target.x_star / l)
    series = SpectralSeries(raw * phases, int(k[0]), tail_bound)

    from .series import evaluate_series

    def psi(x):
        return evaluate_series(series, geometry, np.asarray(x, float))

    width = 1.0 / (2.0 * alpha * max(np.sqrt(density.second_moment), 1e-12))
    xs_ = target.x_star
    bps = merge_breakpoints(
        (xs_ + c * width for c in (-30, -10, -3, -1, 0, 1, 3, 10, 30) if abs(xs_ + c * width) < l),
    )
    return StateDescriptor(
        family="disc",
        target=target,
        geometry=geometry,
        series=series,
        position_evaluator=psi,
        params={
            "alpha": float(alpha),
            "density": density.name,
            "density_spec": density,
            "delta_q2": float(density.second_moment),
            "phi_peak": float(density.peak_value),
            "width_hint": float(width),
        },
        derivatives=_series_derivatives(series, geometry),
        breakpoints=bps,
    )


# ---------------------------------------------------------------------------
# well-adapted family
# ---------------------------------------------------------------------------


def build_well_adapted(
    geometry: IntervalGeometry,
    target: ClassicalTarget,
    inner: str = "theta",
    alpha: float = 4.0,
    density: Optional[DensitySpec] = None,
    j_cap: int = 8192,
) -> StateDescriptor:
    """Antisymmetrized doubled-interval state vanishing at both walls.

    A packet is built on the doubled interval [-2l, 2l] at (x* + l, p*) and
    its mirror image (target (-x*-l, -p*), same argument) is subtracted:
    the difference restricted to [-l, l] is an exact sine series over the
    well eigenbasis, so both walls vanish identically and the energy
    coefficients inherit the packet's fast decay.  The result is
    renormalized over [-l, l] and the pre-normalization norm recorded.
    """
    doubled = geometry.doubled()
    x0 = target.x_star + geometry.l
    inner_target = ClassicalTarget.make(doubled, x0, target.p_star)
    if inner == "theta":
        k2, raw, raw_tail, _ = _theta_raw_coefficients(doubled, inner_target, alpha)
    elif inner == "disc":
        if density is None:
            raise ValidationError("discretized inner family needs a density")
        k2, raw, raw_tail = _disc_raw_coefficients(doubled, inner_target, density, alpha)
    else:
        raise ValidationError(f"inner family must be 'theta' or 'disc', got {inner!r}")

    # momentum coefficients of the doubled state: c_k = raw_k e^{-i pi k x0 / (2l)}
    c = raw * np.exp(-1j * np.pi * k2 * x0 / (2.0 * geometry.l))
    kmax = int(max(abs(k2[0]), abs(k2[-1])))
    full = np.zeros(2 * kmax + 1, dtype=complex)
    full[k2 + kmax] = c
    ks = np.arange(-kmax, kmax + 1)
    g_all = full - full[::-1]  # g_k = c_k - c_{-k}
    g = g_all[kmax + 1 :]  # n = 1..kmax
    prenorm = float(np.sqrt(np.sum(np.abs(g) ** 2)))
    if prenorm == 0.0:
        raise ValidationError("antisymmetrization annihilated the state")

    l = geometry.l
    gn = g / prenorm

    def psi(x):
        xs = np.asarray(x, float)
        scalar = xs.ndim == 0
        xv = np.atleast_1d(xs)
        n = np.arange(1, gn.size + 1)
        sines = np.sin(np.outer(xv + l, n) * (np.pi / (2.0 * l)))
        out = (1j / np.sqrt(l)) * (sines @ gn)
        return out[0] if scalar else out

    # interval momentum coefficients:
    # a_j = (-1)^j [ g_{2j}/sqrt(2) + (i sqrt(2)/pi) sum_{odd k} g_k/(k-2j) ] / prenorm
    odd_mask = ks % 2 != 0
    k_odd = ks[odd_mask].astype(float)
    g_odd = g_all[odd_mask]

    j_cap = max(j_cap, 2 * kmax + 32)
    js = np.arange(-j_cap, j_cap + 1)
    even_part = np.zeros(js.size, dtype=complex)
    in_range = np.abs(2 * js) <= kmax
    even_part[in_range] = g_all[2 * js[in_range] + kmax] / np.sqrt(2.0)
    denom = k_odd[None, :] - 2.0 * js[:, None]
    odd_part = (1j * np.sqrt(2.0) / np.pi) * (1.0 / denom) @ g_odd
    signs = np.where(js % 2 == 0, 1.0, -1.0)
    a_j = signs * (even_part + odd_part) / prenorm

    # Certified (1+j^2)-weighted tail for |j| > j_cap.  Since sum_odd g_k = 0,
    # sum g_k/(k-2j) = -S1/(4j^2) + sum g_k k^2 / (4j^2 (k-2j)) with
    # S1 = sum_odd k g_k, so |a_j| <= (sqrt2/pi)(|S1| + M2/(2|j|-kmax))/(4j^2).
    # Small inflation covers the inner family's own (Gaussian) coefficient tail.
    pad = 4.0 * np.sqrt(max(raw_tail, 0.0))
    s1 = (abs(np.sum(k_odd * g_odd)) + pad * (kmax + 1)) / prenorm
    m2 = (float(np.sum(k_odd**2 * np.abs(g_odd))) + pad * (kmax + 1) ** 2) / prenorm
    tail = (1.0 / np.pi**2) * (
        s1**2 / j_cap + m2**2 / ((2.0 * (j_cap + 1) - kmax) ** 2 * j_cap)
    )
    series = SpectralSeries(a_j, -j_cap, float(tail))

    return StateDescriptor(
        family="well",
        target=target,
        geometry=geometry,
        series=series,
        position_evaluator=psi,
        params={
            "inner": inner,
            "alpha": float(alpha),
            "density": density.name if density is not None else None,
            "prenorm": prenorm,
            "k_bar_doubled": inner_target.k_bar,
            "width_hint": float(l / (2.0 * np.pi * alpha)) if inner == "theta" else 1.0 / (2.0 * alpha),
        },
        well_data=WellAdaptedData(g=gn, prenorm=prenorm),
        breakpoints=(target.x_star,),
    )
