"""Interval geometry, unit policy, and classical phase-space targets."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

HBAR_SI = 1.054571817e-34  # J*s, CODATA


@dataclass(frozen=True)
class IntervalGeometry:
    """Half-length l, Planck constant and mass, with a unit-mode tag.

    ``dimensionless`` fixes hbar = m = 1 (l defaults to 1 but may differ,
    e.g. along a large-interval ladder); ``si`` leaves all three free.
    The library itself is unit-agnostic given (l, hbar, m).
    """

    l: float = 1.0
    hbar: float = 1.0
    mass: float = 1.0
    unit_mode: str = "dimensionless"

    def __post_init__(self):
        if not (self.l > 0 and self.hbar > 0 and self.mass > 0):
            raise ValidationError(
                f"l, hbar, mass must be positive (got {self.l}, {self.hbar}, {self.mass})"
            )
        if self.unit_mode not in ("dimensionless", "si"):
            raise ValidationError(f"unknown unit_mode {self.unit_mode!r}")
        if self.unit_mode == "dimensionless" and not (
            self.hbar == 1.0 and self.mass == 1.0
        ):
            raise ValidationError("dimensionless mode requires hbar = mass = 1")

    @classmethod
    def si(cls, l: float, mass: float) -> "IntervalGeometry":
        return cls(l=l, hbar=HBAR_SI, mass=mass, unit_mode="si")

    @property
    def momentum_quantum(self) -> float:
        """Spacing pi*hbar/l of the momentum lattice."""
        return np.pi * self.hbar / self.l

    def momentum_level(self, k):
        return self.momentum_quantum * np.asarray(k, dtype=float)

    def energy_level(self, n):
        """Infinite-well eigenvalue (hbar^2/2m) (pi n / 2l)^2."""
        n = np.asarray(n, dtype=float)
        return (self.hbar**2 / (2.0 * self.mass)) * (np.pi * n / (2.0 * self.l)) ** 2

    def doubled(self) -> "IntervalGeometry":
        """Interval of twice the half-length (image construction helper)."""
        mode = self.unit_mode
        return IntervalGeometry(l=2.0 * self.l, hbar=self.hbar, mass=self.mass, unit_mode=mode)


def nearest_integer(x: float) -> int:
    """Nearest integer with ties rounded to even (consistent everywhere)."""
    return int(round(x))


@dataclass(frozen=True)
class ClassicalTarget:
    """Classical phase-space point (x*, p*) plus its momentum-lattice data.

    k_star = (l/pi)(p*/hbar) is the target in lattice units and k_bar is
    the nearest integer to it, so |k_bar - k_star| <= 1/2 always holds.
    """

    x_star: float
    p_star: float
    k_star: float
    k_bar: int

    @classmethod
    def make(cls, geometry: IntervalGeometry, x_star: float, p_star: float) -> "ClassicalTarget":
        if not abs(x_star) < geometry.l:
            raise ValidationError(
                f"|x*| = {abs(x_star)} must be < l = {geometry.l}"
            )
        k_star = (geometry.l / np.pi) * (p_star / geometry.hbar)
        return cls(
            x_star=float(x_star),
            p_star=float(p_star),
            k_star=float(k_star),
            k_bar=nearest_integer(k_star),
        )
