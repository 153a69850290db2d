"""Localized virial functionals and the growth checks they support.

The cutoff is odd, equals x on |x| <= R, ramps with a quintic on R < |x| < 2R
and plateaus at 3R/2 for |x| >= 2R. Its slope stays in [0, 1] and |phi_R|
<= 2R, which is what every estimate uses. (A plateau *value* of 2R reached
at |x| = 2R is impossible with slope <= 1: the ramp would need mean slope 1
with endpoint slopes 1 and 0.)

Two rate checks are kept deliberately separate:
  * virial_rate_check uses a FIXED cutoff center, where the exact transport
    identities hold verbatim;
  * rate_decomposition_check uses the MOVING center y(t) from modulation,
    where the growth decomposition A(u0) + b1*lam^2 + remainder applies.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .conserved import ConservedSet, action, conserved_set
from .critical import CriticalData
from .errors import CutoffTooLarge, InsufficientSampling
from .numerics import Field, Grid, spectral_derivative
from .soliton import SolitonParams


def _ramp(t: np.ndarray) -> np.ndarray:
    return 2.0 * t - 2.0 * t**3 + t**4


def _ramp_d(t: np.ndarray) -> np.ndarray:
    return 2.0 - 6.0 * t**2 + 4.0 * t**3


def _ramp_d3(t: np.ndarray) -> np.ndarray:
    return -12.0 + 24.0 * t


class Cutoff:
    """Smooth odd cutoff with identity core and analytic derivatives.

    Piecewise: x on |x| <= R; R + (R/2)*ramp((|x|-R)/R) on the ramp;
    3R/2 beyond 2R. The quintic ramp matches value/slope at both ends with
    zero curvature there, so the profile is C^2 and the third derivative is
    piecewise continuous, which the rate identities tolerate.
    """

    def __init__(self, radius: float, grid: Grid):
        if 2.0 * radius > 0.9 * grid.L:
            raise CutoffTooLarge(
                f"2R = {2 * radius:g} exceeds 0.9*L = {0.9 * grid.L:g}")
        if not radius > 0:
            raise CutoffTooLarge("radius must be positive")
        self.R = float(radius)
        self.grid = grid
        self.plateau = 1.5 * self.R

    def value(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        a = np.abs(x)
        t = np.clip((a - self.R) / self.R, 0.0, 1.0)
        mag = np.where(a <= self.R, a, self.R + 0.5 * self.R * _ramp(t))
        return np.sign(x) * np.where(a >= 2.0 * self.R, self.plateau, mag)

    def deriv(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        a = np.abs(x)
        t = np.clip((a - self.R) / self.R, 0.0, 1.0)
        d = np.where(a <= self.R, 1.0, 0.5 * _ramp_d(t))
        return np.where(a >= 2.0 * self.R, 0.0, d)

    def third(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        a = np.abs(x)
        inside = (a > self.R) & (a < 2.0 * self.R)
        t = np.clip((a - self.R) / self.R, 0.0, 1.0)
        return np.where(inside, _ramp_d3(t) / (2.0 * self.R**2), 0.0)

    def shifted(self, y: float):
        """(value, deriv, third) sampled at grid nodes recentered at y.

        Evaluated analytically at (x - y) wrapped into the box; exact, and
        free of the spectral ringing a C^2 profile would produce under
        FFT-based shifting.
        """
        xs = (self.grid.x - y + self.grid.L) % (2.0 * self.grid.L) - self.grid.L
        return self.value(xs), self.deriv(xs), self.third(xs)


class PeriodicWeight:
    """Smooth odd periodic weight (L/pi) sin(pi x / L) for identity checks.

    The transport identities hold for every smooth weight; on the periodic
    box the ramp-plateau cutoff is not smooth across the period boundary, so
    once radiation wraps around, rate checks against it pick up an unmodeled
    boundary flux. This weight matches x near the origin, is exactly
    periodic, and keeps the identities closed to quadrature accuracy for as
    long as the run lasts.
    """

    def __init__(self, grid: Grid):
        self.grid = grid
        self.R = grid.L / np.pi  # identity-slope scale, for reporting

    def value(self, x):
        g = self.grid
        return (g.L / np.pi) * np.sin(np.pi * np.asarray(x, dtype=float) / g.L)

    def deriv(self, x):
        return np.cos(np.pi * np.asarray(x, dtype=float) / self.grid.L)

    def third(self, x):
        g = self.grid
        return -(np.pi / g.L) ** 2 * np.cos(np.pi * np.asarray(x, dtype=float) / g.L)

    def shifted(self, y: float):
        xs = self.grid.x - y
        return self.value(xs), self.deriv(xs), self.third(xs)


def default_radius(crit: CriticalData, delta1: float, grid: Grid) -> float:
    """R = 10/(b2*delta1) capped at 0.45*L.

    The uncapped prescription follows the growth argument, but already at
    delta1 = 1e-2 it exceeds any desk-scale box, and the R-dependent
    remainder is exponentially small in R (soliton tails), so the cap
    binds harmlessly.
    """
    return min(10.0 / (crit.b2 * delta1), 0.45 * grid.L)


def localized_mass(u: Field, y: float, cutoff: Cutoff) -> float:
    """I1 = int phi_R(x - y) |u|^2 dx."""
    w, _, _ = cutoff.shifted(y)
    return float(np.sum(w * np.abs(u.values) ** 2)) * u.grid.dx


def localized_momentum(u: Field, y: float, cutoff: Cutoff) -> float:
    """I2 = int phi_R(x - y) Im(u conj(u_x)) dx."""
    w, _, _ = cutoff.shifted(y)
    du = spectral_derivative(u, 1).values
    return float(np.sum(w * np.imag(u.values * np.conj(du)))) * u.grid.dx


def virial_composite(u: Field, lam: float, y: float, crit: CriticalData,
                     coupling: float, cutoff: Cutoff) -> float:
    """I = -sqrt(omega) I1 + I2 + 2*coupling*(M(phi)+P(phi))*lam."""
    ctilde = 2.0 * coupling * (crit.mass + crit.momentum)
    return (-np.sqrt(crit.omega) * localized_mass(u, y, cutoff)
            + localized_momentum(u, y, cutoff) + ctilde * lam)


def composite_bound(u: Field, crit: CriticalData, coupling: float,
                    cutoff: Cutoff, lam: float) -> float:
    """A priori bound 2R(||u||^2 + ||u|| ||u_x||) + |Ctilde| |lam|."""
    du = spectral_derivative(u, 1)
    nu = float(np.sqrt(np.sum(np.abs(u.values) ** 2) * u.grid.dx))
    ndu = float(np.sqrt(np.sum(np.abs(du.values) ** 2) * u.grid.dx))
    ctilde = 2.0 * coupling * (crit.mass + crit.momentum)
    return 2.0 * cutoff.R * (nu**2 + nu * ndu) + abs(ctilde * lam)


@dataclass
class CheckReport:
    name: str
    passed: bool
    tolerance: float
    details: dict = dc_field(default_factory=dict)


def virial_rate_samples(u: Field, sigma: float, cutoff: Cutoff,
                        center: float = 0.0) -> dict:
    """Instantaneous values of both transport identities at a fixed center.

    Returns the two weighted integrals together with the right-hand sides
    of their exact time-derivative identities:

        d/dt int w |u|^2        = -2 Im int w' u conj(u_x)
                                  + 1/(sigma+1) int w' |u|^{2s+2}
        d/dt int w Im(u conj(u_x)) = -2 int w' |u_x|^2 + (1/2) int w''' |u|^2
                                  + Im int w' |u|^{2s} u conj(u_x)
    """
    w, wd, w3 = cutoff.shifted(center)
    dx = u.grid.dx
    v = u.values
    du = spectral_derivative(u, 1).values
    dens = np.imag(v * np.conj(du))
    absv2 = np.abs(v) ** 2
    q1 = float(np.sum(w * absv2)) * dx
    q2 = float(np.sum(w * dens)) * dx
    rhs1 = (-2.0 * float(np.sum(wd * dens)) * dx
            + float(np.sum(wd * np.abs(v) ** (2 * sigma + 2))) * dx / (sigma + 1.0))
    rhs2 = (-2.0 * float(np.sum(wd * np.abs(du) ** 2)) * dx
            + 0.5 * float(np.sum(w3 * absv2)) * dx
            + float(np.sum(wd * np.abs(v) ** (2 * sigma) * dens)) * dx)
    return {"q1": q1, "q2": q2, "rhs1": rhs1, "rhs2": rhs2}


def virial_rate_check(times, samples, max_spacing: float = 1e-2) -> CheckReport:
    """Compare central-difference rates of q1, q2 against their identities.

    The mismatch is reported relative to the largest right-hand-side
    magnitude of each identity; the time-difference error dominates and
    shrinks quadratically with the record spacing.
    """
    times = np.asarray(times, dtype=float)
    if len(times) < 5:
        raise InsufficientSampling("need at least 5 records")
    spacing = float(np.max(np.diff(times)))
    if spacing > max_spacing * (1.0 + 1e-9):
        raise InsufficientSampling(
            f"record spacing {spacing:g} exceeds {max_spacing:g}")
    mism = {}
    for key, rhs_key in (("q1", "rhs1"), ("q2", "rhs2")):
        q = np.array([s[key] for s in samples])
        rhs = np.array([s[rhs_key] for s in samples])
        dq = np.gradient(q, times)
        scale = max(np.abs(rhs).max(), 1e-30)
        # interior points only: one-sided ends are first-order
        mism[key] = float(np.abs(dq[1:-1] - rhs[1:-1]).max() / scale)
    worst = max(mism.values())
    return CheckReport(name="virial_rate_check", passed=worst <= 1e-4,
                       tolerance=1e-4,
                       details={"mismatch_q1": mism["q1"],
                                "mismatch_q2": mism["q2"],
                                "max_mismatch": worst,
                                "record_spacing": spacing})


def a_functional(u0: Field, params: SolitonParams,
                 phi_set: ConservedSet, phi_action: float) -> float:
    """A(u0) = (2 c sqrt(w) + 4 w) dM + (4 sqrt(w) - 2 c) dP - 4 dS."""
    cs = conserved_set(u0, params.sigma)
    s_u0 = action(u0, params)
    rt = float(np.sqrt(params.omega))
    return ((2.0 * params.c * rt + 4.0 * params.omega) * (cs.M - phi_set.M)
            + (4.0 * rt - 2.0 * params.c) * (cs.P - phi_set.P)
            - 4.0 * (s_u0 - phi_action))


def a_functional_leading_coefficient(crit: CriticalData) -> float:
    """Leading coefficient of A(u0)/delta1 at the critical speed.

    Equals 8 omega^(3/2) (1 - z0) sigma (2 - sigma) M(phi) = 2*b2. The
    (1 - z0) factor comes from (4 sqrt(omega) - 2c) at c = 2 z0 sqrt(omega).
    """
    return 2.0 * crit.b2


def rate_decomposition_check(times, i_values, lam_values, eps_h1_values,
                             a_u0: float, crit: CriticalData, delta1: float,
                             radius: float,
                             applicable: bool = True) -> CheckReport:
    """Fit I'(t) against A(u0) + b1 lam^2 with remainder |lam| eps + eps^2 + 1/R.

    Reports the fitted remainder constant, the fraction of records where
    I'(t) >= b2 delta1 / 4 + b1 lam^2 / 2, and the fraction where
    I'(t) >= b2 delta1 / 4 alone. Marked not applicable on non-critical
    (stable-branch) runs, where the growth decomposition has no content.
    """
    if not applicable:
        return CheckReport(name="rate_decomposition_check", passed=True,
                           tolerance=float("nan"),
                           details={"applicable": False,
                                    "note": "stable-branch run; growth "
                                            "decomposition not applicable"})
    times = np.asarray(times, dtype=float)
    i_vals = np.asarray(i_values, dtype=float)
    lams = np.asarray(lam_values, dtype=float)
    epss = np.asarray(eps_h1_values, dtype=float)
    if len(times) < 5:
        raise InsufficientSampling("need at least 5 records")
    rate = np.gradient(i_vals, times)
    predicted = a_u0 + crit.b1 * lams**2
    resid = rate - predicted
    basis = np.abs(lams) * epss + epss**2 + 1.0 / radius
    coef = float(np.dot(np.abs(resid), basis) / np.dot(basis, basis))
    thr_full = 0.25 * crit.b2 * delta1 + 0.5 * crit.b1 * lams**2
    thr_base = 0.25 * crit.b2 * delta1
    inner_slice = slice(1, -1)
    frac_full = float(np.mean(rate[inner_slice] >= thr_full[inner_slice]))
    frac_base = float(np.mean(rate[inner_slice] >= thr_base))
    return CheckReport(
        name="rate_decomposition_check",
        passed=frac_base >= 0.95,
        tolerance=0.95,
        details={"applicable": True,
                 "fitted_remainder_constant": coef,
                 "fraction_above_full_threshold": frac_full,
                 "fraction_above_base_threshold": frac_base,
                 "a_u0": a_u0, "b1": crit.b1, "b2": crit.b2,
                 "max_abs_residual": float(np.abs(resid).max()),
                 "radius": radius})
