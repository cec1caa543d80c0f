"""Verifiers for the explicit finite-alpha bounds and asymptotic estimates.

Everything here computes both sides of an inequality (or a measured value
and its leading asymptotic term) through independent routes and reports
margins; nothing is asserted silently.  Remainders written as O(.) in the
source estimates carry unknown constants, so residual checks use a slack
factor together with a monotone-decay requirement along parameter ladders.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import AtSingularity, NotMonotone, ValidationError
from .families import DensitySpec, build_discretized_state, build_theta_state, build_truncated_gaussian
from .geometry import ClassicalTarget, IntervalGeometry
from .moments import momentum_moments, position_moments
from .quadrature import integrate_real
from .specfun import theta_asymptotic_oracles, theta_eval, theta_k2_sum
from .states import StateDescriptor

RESIDUAL_SLACK = 100.0  # absorbs the unknown constants in O(.) remainders


# ---------------------------------------------------------------------------
# Theorem-3 bounds for the discretized family
# ---------------------------------------------------------------------------


def _sine_kernel_integral(a: float, tol: float = 1e-12) -> float:
    """int_{-1}^{1} (y-a)^2 / sin^2(pi (y-a) / 2) dy (removable zero at y=a)."""

    def f(y):
        u = y - a
        s = np.sin(0.5 * np.pi * u)
        out = np.empty_like(u)
        small = np.abs(u) < 1e-8
        out[small] = (2.0 / np.pi) ** 2
        out[~small] = u[~small] ** 2 / s[~small] ** 2
        return out

    val, _ = integrate_real(f, -1.0, 1.0, tol=tol, breakpoints=(a,))
    return val


@dataclass(frozen=True)
class Thm3Report:
    alpha: float
    measured_dstar_x2: float
    x_bound: float
    x_margin: float
    measured_meanx_dev: float
    meanx_bound: float
    meanx_margin: float
    envelope_max_ratio: float
    envelope_ok: bool
    measured_product: float  # dx^2 * dp
    product_bound: float
    product_margin: float
    mean_p: float
    mean_p_expected: float


def thm3_bounds(state: StateDescriptor, grid_points: int = 201) -> Thm3Report:
    """Explicit position/mean/envelope/product bounds for a discretized state."""
    if state.family != "disc":
        raise ValidationError("thm3_bounds applies to discretized-density states")
    geometry, target = state.geometry, state.target
    l, hbar = geometry.l, geometry.hbar
    alpha = state.params["alpha"]
    density: DensitySpec = state.params["density_spec"]
    phi0 = density.peak_value
    dq = np.sqrt(density.second_moment)

    kernel = _sine_kernel_integral(target.x_star / l)
    x_bound = (9.0 * np.pi * phi0 * l / (2.0 * alpha)) * kernel

    pos = position_moments(state)
    mom = momentum_moments(state)

    cos2 = np.cos(0.5 * np.pi * target.x_star / l) ** 2
    meanx_bound = (abs(target.x_star) / (alpha * l)) * 18.0 * np.pi * phi0 / cos2
    meanx_dev = abs(pos.mean_x - target.x_star)

    # pointwise envelope 3 sqrt(pi phi(0) / (2 alpha l^2)) / |sin(pi (x-x*)/2l)|
    xs = np.linspace(-l, l, grid_points)
    xs = xs[np.abs(xs - target.x_star) > 1e-9 * l]
    vals = np.abs(state.position_evaluator(xs))
    env = 3.0 * np.sqrt(np.pi * phi0 / (2.0 * alpha * l * l)) / np.abs(
        np.sin(0.5 * np.pi * (xs - target.x_star) / l)
    )
    ratio = float(np.max(vals / env))

    delta = 1.0 / 6.0 + (np.pi / l) * phi0 / (3.0 * alpha)
    product_bound = (
        4.5
        * np.pi
        * l
        * hbar
        * phi0
        * dq
        * kernel
        * np.sqrt(1.0 + (np.pi / (l * alpha * dq)) ** 2 * delta)
    )
    measured_product = pos.dx2 * np.sqrt(mom.dp2)

    return Thm3Report(
        alpha=float(alpha),
        measured_dstar_x2=pos.dstar_x2,
        x_bound=float(x_bound),
        x_margin=float(x_bound - pos.dstar_x2),
        measured_meanx_dev=meanx_dev,
        meanx_bound=float(meanx_bound),
        meanx_margin=float(meanx_bound - meanx_dev),
        envelope_max_ratio=ratio,
        envelope_ok=bool(ratio <= 1.0 + 1e-10),
        measured_product=float(measured_product),
        product_bound=float(product_bound),
        product_margin=float(product_bound - measured_product),
        mean_p=mom.mean_p,
        mean_p_expected=float(geometry.momentum_quantum * target.k_bar),
    )


def nanoscale_projection(
    density: DensitySpec,
    l: float,
    hbar: float,
    dx_target: float,
) -> dict:
    """The worked large-alpha consequence of the position bound.

    Solves the Delta*x^2 bound for the alpha that forces Delta x <= dx_target
    at x* = 0, then reports the momentum scale hbar alpha Delta q this costs.
    Pure bound arithmetic; no state is built.
    """
    kernel = _sine_kernel_integral(0.0)
    alpha_needed = 9.0 * np.pi * density.peak_value * l * kernel / (2.0 * dx_target**2)
    dp_scale = hbar * alpha_needed * np.sqrt(density.second_moment)
    return {
        "kernel_integral": kernel,
        "alpha_needed": float(alpha_needed),
        "dp_scale": float(dp_scale),
    }


# ---------------------------------------------------------------------------
# Appendix-C momentum discretization window
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LemCReport:
    alpha: float
    delta: float  # measured  Delta p^2 (about the lattice mean) - (hbar alpha dq)^2
    lower: float
    upper: float
    inside: bool
    refined_residual: float  # delta - (pi hbar / l)^2 / 12


def lemC_window(state: StateDescriptor) -> LemCReport:
    """Window containment for Delta p^2 - (hbar alpha Delta q)^2.

    The source estimate centres the second moment on the lattice target
    (p* = pi hbar k_bar / l, its proof's no-loss reduction), which for this
    symmetric family is exactly the variance about the mean.
    """
    if state.family != "disc":
        raise ValidationError("lemC_window applies to discretized-density states")
    geometry = state.geometry
    l, hbar = geometry.l, geometry.hbar
    alpha = state.params["alpha"]
    density: DensitySpec = state.params["density_spec"]
    mom = momentum_moments(state)
    reference = (hbar * alpha * np.sqrt(density.second_moment)) ** 2
    delta = mom.dp2 - reference
    unit2 = (np.pi * hbar / l) ** 2
    phi_l0 = (np.pi / l) * density.peak_value
    half_width = 1.0 + 2.0 * phi_l0 / alpha
    lower = -unit2 * half_width / 12.0
    upper = unit2 * half_width / 6.0
    return LemCReport(
        alpha=float(alpha),
        delta=float(delta),
        lower=float(lower),
        upper=float(upper),
        inside=bool(lower <= delta <= upper),
        refined_residual=float(delta - unit2 / 12.0),
    )


def lemC_ladder(
    geometry: IntervalGeometry,
    target: ClassicalTarget,
    density: DensitySpec,
    alphas: Sequence[float],
) -> dict:
    """Window reports along an alpha ladder plus the refined-residual slope."""
    reports = [
        lemC_window(build_discretized_state(geometry, target, density, a)) for a in alphas
    ]
    res = np.array([abs(r.refined_residual) for r in reports])
    la = np.log(np.asarray(alphas, float))
    slope = float(np.polyfit(la, np.log(np.maximum(res, 1e-300)), 1)[0])
    return {"reports": reports, "slope": slope}


# ---------------------------------------------------------------------------
# Appendix-D cosine-sum bound
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LemDReport:
    chi: float
    bound: float
    ok: bool
    form: str


def lemD_bound(a: Sequence[float], x: float, form: str = "two-sided") -> LemDReport:
    """Cosine-sum bound for a monotone non-increasing nonnegative sequence.

    ``form='one-sided'`` checks the partial-sum object of the source proof,
    chi = sum_{k>=0} a_k cos(kx) against a_0 / |sin(x/2)|; ``'two-sided'``
    checks the symmetric reading chi = sum_{k in Z} a_{|k|} cos(kx) against
    the factor-3 variant used downstream (2 S - a_0 picks up 2/|sin| + 1).
    """
    arr = np.asarray(a, dtype=float)
    if arr.size == 0 or not np.any(arr):
        raise NotMonotone("sequence must be nonzero")
    if np.any(arr < 0) or np.any(np.diff(arr) > 1e-15 * max(arr[0], 1e-300)):
        raise NotMonotone("sequence must be nonnegative and non-increasing")
    s = np.sin(0.5 * x)
    if abs(s) < 1e-12:
        raise AtSingularity(f"x = {x} is too close to a multiple of 2 pi")
    k = np.arange(arr.size, dtype=float)
    one_sided = float(np.sum(arr * np.cos(k * x)))
    if form == "one-sided":
        chi = one_sided
        bound = arr[0] / abs(s)
    elif form == "two-sided":
        chi = 2.0 * one_sided - arr[0]
        bound = 3.0 * arr[0] / abs(s)
    else:
        raise ValidationError(f"unknown form {form!r}")
    return LemDReport(
        chi=chi, bound=float(bound), ok=bool(abs(chi) <= bound * (1.0 + 1e-12)), form=form
    )


# ---------------------------------------------------------------------------
# asymptotic residual ladders
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ResidualRow:
    parameter: float
    quantity: str
    measured: float
    leading: float
    residual: float
    bound: float
    ok: bool


def _row(parameter, quantity, measured, leading, bound) -> ResidualRow:
    residual = measured - leading
    return ResidualRow(
        parameter=float(parameter),
        quantity=quantity,
        measured=float(measured),
        leading=float(leading),
        residual=float(residual),
        bound=float(bound),
        ok=bool(abs(residual) <= RESIDUAL_SLACK * bound + 1e-13),
    )


def thm1_residuals(
    geometry: IntervalGeometry,
    target: ClassicalTarget,
    betas: Sequence[float],
    epsilon: float,
) -> list[ResidualRow]:
    """Truncated-Gaussian asymptotics: means, widths, and the product."""
    l, hbar = geometry.l, geometry.hbar
    gap = l - abs(target.x_star) - 3.0 * epsilon
    rows: list[ResidualRow] = []
    for beta in betas:
        st = build_truncated_gaussian(geometry, target, beta, epsilon)
        pos = position_moments(st)
        mom = momentum_moments(st)
        expo = np.exp(-(gap**2) / (2.0 * beta**2))
        rows.append(_row(beta, "mean_x", pos.mean_x, target.x_star, beta * expo))
        rows.append(_row(beta, "mean_p", mom.mean_p, target.p_star, 1e-12 * max(abs(target.p_star), hbar / l)))
        rows.append(_row(beta, "dstar_x2", pos.dstar_x2, beta**2, beta * expo))
        rows.append(
            _row(beta, "dstar_p2", mom.dstar_p2, (hbar / (2.0 * beta)) ** 2, beta**-3 * expo)
        )
        rows.append(
            _row(
                beta,
                "product2",
                pos.dx2 * mom.dp2,
                hbar**2 / 4.0,
                expo / beta,
            )
        )
    return rows


def thm2_residuals(
    geometry: IntervalGeometry, target: ClassicalTarget, alphas: Sequence[float]
) -> list[ResidualRow]:
    """Theta-family asymptotics: means, widths, and the product."""
    l, hbar = geometry.l, geometry.hbar
    rows: list[ResidualRow] = []
    for alpha in alphas:
        st = build_theta_state(geometry, target, alpha)
        pos = position_moments(st)
        mom = momentum_moments(st)
        edge = np.exp(-2.0 * (np.pi * alpha * (1.0 - abs(target.x_star) / l)) ** 2)
        rows.append(_row(alpha, "mean_x", pos.mean_x, target.x_star, l * edge / alpha))
        rows.append(
            _row(
                alpha,
                "dstar_x2",
                pos.dstar_x2,
                (l / (2.0 * np.pi * alpha)) ** 2,
                l * l * edge / alpha,
            )
        )
        rows.append(
            _row(
                alpha,
                "dstar_p2_rel",
                mom.dstar_p2 / (np.pi * hbar * alpha / l) ** 2,
                1.0,
                np.exp(-2.0 * (np.pi * alpha) ** 2) + 1e-15,
            )
        )
        rows.append(
            _row(
                alpha,
                "product2",
                pos.dx2 * mom.dp2,
                hbar**2 / 4.0,
                hbar**2 * alpha * edge,
            )
        )
    return rows


def lemB_residuals(taus: Sequence[float], a: float = 0.0) -> list[ResidualRow]:
    """Small-tau theta asymptotics against direct summation / quadrature."""
    rows: list[ResidualRow] = []
    for tau in taus:
        oracle = theta_asymptotic_oracles(tau, a)
        k2 = theta_k2_sum(tau)
        # the exact modular correction is (1/(2 pi tau^{3/2})) sum' e^{-pi k^2/tau}
        # - (1/tau^{5/2}) sum k^2 e^{-pi k^2/tau}; its magnitude carries the
        # tau^{-5/2} prefactor, which dominates the stated tau^{-3/2} form
        k2_bound = 2.0 * np.exp(-np.pi / tau) * (tau**-2.5 + 1.0 / (2 * np.pi * tau**1.5))
        rows.append(_row(tau, "k2_sum", k2, oracle.k2_sum_leading, k2_bound))

        lo, hi = -0.5 - a, 0.5 - a
        mean_x, _ = integrate_real(
            lambda y: y * theta_eval(y, tau) ** 2, lo, hi, tol=1e-13, breakpoints=(0.0,)
        )
        rows.append(_row(tau, "mean_x", mean_x, 0.0, oracle.mean_x_bound))
        x2, _ = integrate_real(
            lambda y: y * y * theta_eval(y, tau) ** 2, lo, hi, tol=1e-13, breakpoints=(0.0,)
        )
        rows.append(_row(tau, "x2", x2, oracle.x2_leading, oracle.x2_bound + 1e-15))
    return rows


def residuals_monotone(rows: Sequence[ResidualRow], floor: float = 1e-14) -> bool:
    """Residuals shrink along the ladder, allowing a roundoff-floor plateau."""
    by_q: dict[str, list[ResidualRow]] = {}
    for r in rows:
        by_q.setdefault(r.quantity, []).append(r)
    for series in by_q.values():
        res = [abs(r.residual) for r in series]
        for prev, cur in zip(res[:-1], res[1:]):
            if cur > max(prev * (1.0 + 1e-9), floor):
                return False
    return True


def asymptotic_residuals(family: str, parameters: Sequence[float], **kw) -> list[ResidualRow]:
    """Dispatch: family in {'gauss', 'theta', 'lemB'} with its ladder."""
    if family == "gauss":
        return thm1_residuals(kw["geometry"], kw["target"], parameters, kw["epsilon"])
    if family == "theta":
        return thm2_residuals(kw["geometry"], kw["target"], parameters)
    if family == "lemB":
        return lemB_residuals(parameters, kw.get("a", 0.0))
    raise ValidationError(f"no asymptotic ladder for family {family!r}")
