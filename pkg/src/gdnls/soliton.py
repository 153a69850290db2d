"""Closed-form construction of the solitary-wave family.

The traveling waves of i u_t + u_xx + i |u|^{2 sigma} u_x = 0 are
e^{i omega t} phi(x - c t) with a positive amplitude profile times a gauge
phase.  The amplitude is

    amp(x) = [ (sigma+1)(4 omega - c^2)
               / (2 sqrt(omega) cosh(sigma kappa x) - c) ]^(1/(2 sigma)),

kappa = sqrt(4 omega - c^2), and the phase is

    Theta(x) = (c/2) x - (1/(2 sigma + 2)) * int_{-inf}^{x} amp(y)^{2 sigma} dy.

Profiles decay like exp(-kappa |x| / 2); boxes are sized so the tails sit
below 1e-15 at the boundary and the periodic truncation is harmless.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import numerics
from .errors import DomainViolation, TruncationTooSmall
from .numerics import Field, Grid, improper_integral, spectral_derivative


@dataclass(frozen=True)
class SolitonParams:
    """Family parameters (sigma, omega, c) with existence guards.

    The wave exists for omega > 0, c^2 < 4 omega (strict) and the formulas
    are used for sigma in (0, 2), endpoints excluded. The stability
    classification machinery additionally requires sigma in (1, 2).
    """

    sigma: float
    omega: float
    c: float

    def __post_init__(self):
        if not (0.0 < self.sigma < 2.0):
            raise DomainViolation(f"sigma must lie in (0, 2), got {self.sigma}")
        if not self.omega > 0.0:
            raise DomainViolation(f"omega must be positive, got {self.omega}")
        if not self.c * self.c < 4.0 * self.omega:
            raise DomainViolation(
                f"need c^2 < 4*omega, got c={self.c}, omega={self.omega}")

    @property
    def kappa(self) -> float:
        """Decay-rate parameter sqrt(4*omega - c^2)."""
        return float(np.sqrt(4.0 * self.omega - self.c * self.c))

    @property
    def a0(self) -> float:
        """(sigma - 1) * sqrt(omega), the mass-to-momentum ratio at criticality."""
        return (self.sigma - 1.0) * float(np.sqrt(self.omega))

    def with_shift(self, d_omega: float = 0.0, d_c: float = 0.0) -> "SolitonParams":
        return SolitonParams(self.sigma, self.omega + d_omega, self.c + d_c)


def default_grid(params: SolitonParams, n: int = 4096, tail: float = 36.0) -> Grid:
    """Box sized so kappa*L/2 >= tail (amplitude tail below e^-tail)."""
    return Grid(2.0 * tail / params.kappa, n)


def amplitude(params: SolitonParams, x) -> np.ndarray:
    """Positive amplitude profile evaluated at x (scalar or array)."""
    x = np.asarray(x, dtype=float)
    s, om, c = params.sigma, params.omega, params.c
    kap = params.kappa
    denom = 2.0 * np.sqrt(om) * np.cosh(s * kap * x) - c
    return ((s + 1.0) * kap * kap / denom) ** (1.0 / (2.0 * s))


def amplitude_power(params: SolitonParams, x) -> np.ndarray:
    """amp(x)^{2 sigma}, the density entering the gauge phase."""
    x = np.asarray(x, dtype=float)
    s, om, c = params.sigma, params.omega, params.c
    kap = params.kappa
    return (s + 1.0) * kap * kap / (2.0 * np.sqrt(om) * np.cosh(s * kap * x) - c)


def phase_derivative(params: SolitonParams, x) -> np.ndarray:
    """Theta'(x) = c/2 - amp^{2 sigma}(x) / (2 sigma + 2)."""
    return params.c / 2.0 - amplitude_power(params, x) / (2.0 * params.sigma + 2.0)


def phase(params: SolitonParams, x: float, tol: float = 1e-12) -> float:
    """Gauge phase Theta(x) with the integral started at -inf.

    The half-line integral is evaluated by adaptive quadrature using
    int_{-inf}^{x} f = int_0^inf f(x - t) dt.
    """
    x = float(x)
    res = improper_integral(lambda t: amplitude_power(params, x - t), tol)
    return params.c / 2.0 * x - res.value / (2.0 * params.sigma + 2.0)


def soliton_field(params: SolitonParams, grid: Grid) -> Field:
    """Complex profile amp*exp(i Theta) sampled on the grid.

    Theta uses the spectral antiderivative of amp^{2 sigma} anchored at the
    left edge, standing in for the -inf limit; the tail correction is below
    1e-15 under the default box rule.
    """
    amp = amplitude(params, grid.x)
    boundary = float(amp[0])
    if boundary > 1e-12:
        raise TruncationTooSmall(
            f"soliton amplitude {boundary:.2e} at the box edge exceeds 1e-12; "
            f"increase L (currently {grid.L:g})")
    dens = Field(grid, amplitude_power(params, grid.x))
    cumulative = numerics.fourier_antiderivative(dens)
    theta = params.c / 2.0 * grid.x - np.real(cumulative) / (2.0 * params.sigma + 2.0)
    return Field(grid, amp * np.exp(1j * theta))


def stationary_equation_residual(u: Field, params: SolitonParams) -> Field:
    """Pointwise residual of -u'' + omega u + i c u' - i |u|^{2 sigma} u'."""
    d1 = spectral_derivative(u, 1)
    d2 = spectral_derivative(u, 2)
    s = params.sigma
    vals = (-d2.values + params.omega * u.values + 1j * params.c * d1.values
            - 1j * np.abs(u.values) ** (2 * s) * d1.values)
    return Field(u.grid, vals)


def elliptic_residual(params: SolitonParams, grid: Grid) -> float:
    """L2 norm of the stationary-equation residual of the sampled profile."""
    phi = soliton_field(params, grid)
    return numerics.l2_norm(stationary_equation_residual(phi, params))


def perturbation_direction(params: SolitonParams, grid: Grid,
                           delta1: float) -> Field:
    """Initial data phi + delta1*(-a0*phi + i*phi_x) for instability runs."""
    phi = soliton_field(params, grid)
    dphi = spectral_derivative(phi, 1)
    return Field(grid, phi.values + delta1 * (-params.a0 * phi.values
                                              + 1j * dphi.values))
