"""State descriptors: a built state with its series and closed-form evaluators."""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Any, Callable, Mapping, Optional

import numpy as np

from .errors import OutOfDomain
from .geometry import ClassicalTarget, IntervalGeometry
from .series import SpectralSeries, evaluate_series, series_from_map
from .series import boundary_values as _series_boundary


@dataclass(frozen=True)
class WellAdaptedData:
    """Doubled-interval antisymmetrized coefficients g_n (n >= 1).

    The state restricted to [-l, l] is exactly
    (i/sqrt(l)) sum_{n>=1} g_n sin(pi n (x + l) / (2l)) / prenorm,
    so its well-basis coefficients are b_n = i (-1)^n g_n / prenorm.
    """

    g: np.ndarray  # g_n for n = 1..len(g)
    prenorm: float

    def __post_init__(self):
        arr = np.array(self.g, dtype=complex)
        arr.setflags(write=False)
        object.__setattr__(self, "g", arr)


@dataclass(frozen=True)
class StateDescriptor:
    """A constructed interval state.

    ``position_evaluator`` is the closed form where one exists (theta and
    truncated-Gaussian families, and the well-adapted difference of two
    closed forms); otherwise it sums the series.  ``derivatives``, when
    present, returns (psi', psi'') for the derivative-quadrature momentum
    route.  ``params`` records family parameters and normalization
    constants.  All fields are immutable; instances are safe to share.
    """

    family: str
    target: ClassicalTarget
    geometry: IntervalGeometry
    series: SpectralSeries
    position_evaluator: Callable[[np.ndarray], np.ndarray]
    params: Mapping[str, Any] = field(default_factory=dict)
    derivatives: Optional[Callable[[np.ndarray], tuple]] = None
    well_data: Optional[WellAdaptedData] = None
    breakpoints: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "params", MappingProxyType(dict(self.params)))

    def checked(self, x):
        xs = np.asarray(x, dtype=float)
        if np.any(np.abs(np.atleast_1d(xs)) > self.geometry.l * (1.0 + 1e-12)):
            raise OutOfDomain(f"|x| > l = {self.geometry.l}")
        return xs


def evaluate_wave(state: StateDescriptor, x):
    """psi(x) from the truncated momentum series (error <= tail of sum|a_k|)."""
    xs = state.checked(x)
    return evaluate_series(state.series, state.geometry, xs)


def evaluate_closed_form(state: StateDescriptor, x):
    """psi(x) from the closed-form evaluator (falls back to the series)."""
    xs = state.checked(x)
    return state.position_evaluator(xs)


def boundary_values(state: StateDescriptor):
    """(psi(-l), psi(l)) via the series; identical by 2l-periodicity."""
    return _series_boundary(state.series, state.geometry)


def momentum_eigenstate(geometry: IntervalGeometry, k0: int) -> StateDescriptor:
    """The plane wave phi_k0: a momentum eigenstate with Delta p = 0."""
    target = ClassicalTarget.make(geometry, 0.0, geometry.momentum_level(k0))
    series = series_from_map({int(k0): 1.0 + 0.0j})
    w = np.pi * k0 / geometry.l
    amp = 1.0 / np.sqrt(2.0 * geometry.l)

    def psi(x):
        return amp * np.exp(1j * w * np.asarray(x, dtype=float))

    def deriv(x):
        xs = np.asarray(x, dtype=float)
        base = amp * np.exp(1j * w * xs)
        return (1j * w) * base, -(w * w) * base

    return StateDescriptor(
        family="eigen",
        target=target,
        geometry=geometry,
        series=series,
        position_evaluator=psi,
        params={"k0": int(k0)},
        derivatives=deriv,
    )
