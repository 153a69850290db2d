"""Stability-threshold machinery for exponents 1 < sigma < 2.

The borderline speed is c = 2 z0 sqrt(omega), where z0(sigma) is the root of

    F(z) = (sigma-1)^2 [int_0^inf (cosh y - z)^(-1/sigma) dy]^2
           - [int_0^inf (cosh y - z)^(-1/sigma-1) (z cosh y - 1) dy]^2.

At that speed the 2x2 Hessian of the action restricted to the family
degenerates; this module computes the root, closed forms for mass and
momentum, the Hessian and its null direction, the tangent field along the
family, and the derived constants (kappa0, b1, b2) that drive the
instability experiments.

Root range note: z0 is located by a sign-change scan over (-0.999, 0.999).
The root is positive for sigma below roughly 1.55 and negative above, so a
scan restricted to (0, 1) finds nothing for the larger exponents.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from .errors import (Kappa0Mismatch, NoConvergence, NoSignChange,
                     NotDegenerate, RootNotUnique, SymmetryViolation)
from .numerics import (Field, Grid, directional_second_derivative,
                       improper_integral, parameter_derivative)
from .soliton import SolitonParams, soliton_field


def _integral_to_scaled_tol(fn, tol: float):
    """improper_integral, accepting tol relative to the result's magnitude.

    Large cosh-power integrals near the existence boundary cannot certify a
    small absolute error (the per-panel estimates carry an eps*|value|
    rounding floor); magnitude-relative accuracy is what the identity suite
    needs anyway.
    """
    try:
        return improper_integral(fn, tol)
    except NoConvergence as exc:
        if (exc.value is not None and exc.est_error is not None
                and exc.est_error <= tol * max(1.0, abs(exc.value))):
            from .numerics import QuadratureResult
            return QuadratureResult(value=exc.value, est_error=exc.est_error,
                                    evaluations=0)
        raise


def threshold_function(sigma: float, z: float, tol: float = 1e-12) -> float:
    """The degeneracy indicator F(z); its root in (-1, 1) marks criticality.

    Accepts sigma in [1, 2) and z in (-1, 1); at sigma = 1 the first term
    vanishes and F(0) = -1.
    """
    if not (1.0 <= sigma < 2.0):
        raise ValueError(f"sigma must lie in [1, 2), got {sigma}")
    if not (-1.0 < z < 1.0):
        raise ValueError(f"z must lie in (-1, 1), got {z}")
    p = 1.0 / sigma
    i1 = _integral_to_scaled_tol(lambda y: (np.cosh(y) - z) ** (-p), tol)
    i2 = _integral_to_scaled_tol(
        lambda y: (np.cosh(y) - z) ** (-p - 1.0) * (z * np.cosh(y) - 1.0), tol)
    return (sigma - 1.0) ** 2 * i1.value ** 2 - i2.value ** 2


@lru_cache(maxsize=64)
def critical_speed_ratio(sigma: float, tol: float = 1e-10,
                         scan_points: int = 1000) -> float:
    """Root z0 of the threshold function, |F(z0)| <= tol.

    A sign-change scan over (-0.999, 0.999) brackets the root, then a
    bisection/secant hybrid polishes it. Raises NoSignChange if no bracket
    exists and RootNotUnique if the scan sees several sign changes.
    """
    if not (1.0 < sigma < 2.0):
        raise ValueError(f"sigma must lie in (1, 2), got {sigma}")
    quad_tol = 1e-12
    zs = np.linspace(-0.999, 0.999, scan_points)
    vals = np.array([threshold_function(sigma, z, quad_tol) for z in zs])
    sign_flips = [
        (zs[i], zs[i + 1])
        for i in range(len(zs) - 1)
        if vals[i] == 0.0 or vals[i] * vals[i + 1] < 0.0
    ]
    if not sign_flips:
        raise NoSignChange(f"no sign change of F on (-0.999, 0.999) for sigma={sigma}")
    if len(sign_flips) > 1:
        raise RootNotUnique(
            f"{len(sign_flips)} sign changes for sigma={sigma}", brackets=sign_flips)
    a, b = sign_flips[0]
    z0 = brentq(lambda z: threshold_function(sigma, z, quad_tol), a, b, xtol=1e-13)
    resid = threshold_function(sigma, z0, quad_tol)
    if abs(resid) > tol:
        raise NoConvergence(
            f"|F(z0)| = {abs(resid):.2e} > {tol:g} at z0 = {z0} (sigma={sigma})")
    return float(z0)


def critical_speed(sigma: float, omega: float) -> float:
    """The borderline speed 2*z0*sqrt(omega)."""
    return 2.0 * critical_speed_ratio(sigma) * float(np.sqrt(omega))


def critical_params(sigma: float, omega: float) -> SolitonParams:
    return SolitonParams(sigma, omega, critical_speed(sigma, omega))


def stable_control_speed(sigma: float, omega: float) -> float:
    """A speed safely inside the stable range c < 2 z0 sqrt(omega).

    Half the critical speed when z0 > 0 (then it sits between 0 and the
    critical point); for z0 < 0 half the critical speed lands on the
    unstable side, so the midpoint of (-2 sqrt(omega), 2 z0 sqrt(omega)) is
    used instead.
    """
    z0 = critical_speed_ratio(sigma)
    root = float(np.sqrt(omega))
    if z0 > 0:
        return z0 * root  # = 0.5 * (2 z0 sqrt(omega))
    return root * (z0 - 1.0)


def classify_speed(params: SolitonParams) -> str:
    """Stability classification of (sigma, omega, c) for sigma in (1, 2)."""
    z0 = critical_speed_ratio(params.sigma)
    cc = 2.0 * z0 * np.sqrt(params.omega)
    tol = 1e-9 * max(1.0, abs(cc))
    if abs(params.c - cc) <= tol:
        return "critical"
    return "stable" if params.c < cc else "unstable"


# ---------------------------------------------------------------------------
# Closed forms for mass and momentum
# ---------------------------------------------------------------------------

@dataclass
class AppendixScalars:
    """Scalars behind the closed-form mass/momentum expressions.

    kappa = sqrt(4 omega - c^2); kappa_tilde the bookkeeping prefactor
    2^(1/sigma - 2) sigma^-1 (1+sigma)^(1/sigma) kappa^(2/sigma - 2)
    omega^(-1/(2 sigma) - 1/2); f = (sigma+1) kappa^2 / (2 sqrt(omega));
    alpha[n] = int_0^inf (cosh(sigma kappa x) - c/(2 sqrt(omega)))^(-1/sigma - n) dx
    for n = 0, 1, 2.
    """

    kappa: float
    kappa_tilde: float
    f: float
    alpha: np.ndarray


def appendix_scalars(params: SolitonParams, tol: float = 1e-12) -> AppendixScalars:
    s, om, c = params.sigma, params.omega, params.c
    kap = params.kappa
    kt = (2.0 ** (1.0 / s - 2.0) / s * (1.0 + s) ** (1.0 / s)
          * kap ** (2.0 / s - 2.0) * om ** (-1.0 / (2.0 * s) - 0.5))
    f = (s + 1.0) * kap * kap / (2.0 * np.sqrt(om))
    z = c / (2.0 * np.sqrt(om))
    alphas = []
    for n in range(3):
        res = _integral_to_scaled_tol(
            lambda x, n=n: (np.cosh(s * kap * x) - z) ** (-1.0 / s - n), tol)
        alphas.append(res.value)
    return AppendixScalars(kappa=kap, kappa_tilde=kt, f=f, alpha=np.array(alphas))


def mass_momentum_closed_form(params: SolitonParams,
                              tol: float = 1e-12) -> tuple[float, float]:
    """(M, P) of the profile from the half-line cosh-power integrals.

    M = f^(1/sigma) alpha_0 and
    P = f^(1/sigma) (kappa^2 alpha_1 - 2 sqrt(omega) c alpha_0) / (4 sqrt(omega)).
    """
    sc = appendix_scalars(params, tol)
    s, om, c = params.sigma, params.omega, params.c
    fpow = sc.f ** (1.0 / s)
    m = fpow * sc.alpha[0]
    p = fpow / (4.0 * np.sqrt(om)) * (-2.0 * np.sqrt(om) * c * sc.alpha[0]
                                      + sc.kappa ** 2 * sc.alpha[1])
    return float(m), float(p)


def _closed_m(params: SolitonParams):
    sig = params.sigma
    return lambda om, c: mass_momentum_closed_form(SolitonParams(sig, om, c))[0]


def _closed_p(params: SolitonParams):
    sig = params.sigma
    return lambda om, c: mass_momentum_closed_form(SolitonParams(sig, om, c))[1]


def action_hessian(params: SolitonParams, rtol: float = 1e-6) -> np.ndarray:
    """2x2 Hessian of the action on the family, entries by finite differences.

    Rows/columns order (omega, c):
        [[d_omega M, d_omega P],
         [d_c M,     d_c P   ]].
    Symmetry d_c M = d_omega P is asserted to rtol*scale and then enforced by
    averaging the two off-diagonal estimates.
    """
    at = (params.omega, params.c)
    gm, gp = _closed_m(params), _closed_p(params)
    dwm = parameter_derivative(gm, at, "omega").value
    dwp = parameter_derivative(gp, at, "omega").value
    dcm = parameter_derivative(gm, at, "c").value
    dcp = parameter_derivative(gp, at, "c").value
    scale = max(abs(dwm), abs(dwp), abs(dcm), abs(dcp), 1e-30)
    if abs(dcm - dwp) > rtol * scale:
        raise SymmetryViolation(
            f"|d_c M - d_omega P| = {abs(dcm - dwp):.2e} exceeds {rtol:g}*{scale:.2e}")
    off = 0.5 * (dcm + dwp)
    return np.array([[dwm, off], [off, dcp]])


@dataclass(frozen=True)
class EigenDirection:
    """Null direction (mu, nu) of the degenerate Hessian, normalized nu = 1."""

    mu: float
    nu: float = 1.0

    def as_tuple(self) -> tuple[float, float]:
        return (self.mu, self.nu)


def eigen_direction(params: SolitonParams, rtol: float = 1e-6) -> EigenDirection:
    """Zero-eigenvalue direction of the action Hessian at (near-)critical speed.

    Raises NotDegenerate unless the smallest singular value is well below the
    largest. The direction is normalized to nu = 1 (valid since mu/nu equals
    sqrt(omega) on the critical curve, forcing nu != 0); residuals of both
    the direct and the transposed null systems are checked against
    rtol * scale.
    """
    h = action_hessian(params)
    svals = np.linalg.svd(h, compute_uv=False)
    if svals[-1] > 1e-3 * svals[0]:
        raise NotDegenerate(
            f"Hessian not degenerate at (omega, c)=({params.omega:g}, {params.c:g}): "
            f"singular values {svals}")
    w, v = np.linalg.eigh(h)
    null = v[:, int(np.argmin(np.abs(w)))]
    if abs(null[1]) < 1e-12:
        raise NotDegenerate("null direction has nu ~ 0; cannot normalize nu = 1")
    mu = float(null[0] / null[1])
    scale = float(np.abs(h).max()) * max(abs(mu), 1.0)
    direct = h @ np.array([mu, 1.0])
    if np.abs(direct).max() > rtol * scale:
        raise NotDegenerate(
            f"null residual {np.abs(direct).max():.2e} exceeds {rtol:g}*{scale:.2e}")
    return EigenDirection(mu=mu)


def family_tangent_field(params: SolitonParams, grid: Grid,
                         direction: EigenDirection,
                         h: float | None = None) -> Field:
    """Tangent field psi = mu d_omega phi + nu d_c phi by central differences.

    Richardson-extrapolated finite difference of the sampled profile along
    lam -> (omega + lam mu, c + lam nu).
    """
    if h is None:
        h = 1e-3 * max(1.0, abs(params.omega))
    mu, nu = direction.mu, direction.nu

    def fam(lam: float) -> np.ndarray:
        p = params.with_shift(lam * mu, lam * nu)
        return soliton_field(p, grid).values

    d_h = (fam(h) - fam(-h)) / (2.0 * h)
    d_h2 = (fam(h / 2) - fam(-h / 2)) / h
    return Field(grid, (4.0 * d_h2 - d_h) / 3.0)


@dataclass
class CriticalData:
    """Constants of the critical point for one (sigma, omega).

    kappa0 is extracted twice: from the directional second derivative of the
    mass (divided by z0) and of the momentum (divided by -sqrt(omega)); the
    stored value is their mean. b1 = 2 kappa0 omega (1 - z0^2).
    b2 = 4 omega^(3/2) (1 - z0) sigma (2 - sigma) M(phi): half the leading
    coefficient of the initial-data functional A(u0)/delta1, including the
    (1 - z0) factor that the coefficient acquires from 4 sqrt(omega) - 2c
    at c = 2 z0 sqrt(omega).
    """

    sigma: float
    omega: float
    z0: float
    c_crit: float
    a0: float
    mu: float
    nu: float
    mass: float
    momentum: float
    kappa0: float
    kappa0_from_mass: float
    kappa0_from_momentum: float
    b1: float
    b2: float


def critical_constants(sigma: float, omega: float,
                       mismatch_tol: float = 1e-2) -> CriticalData:
    """Assemble CriticalData at c = 2 z0 sqrt(omega).

    Raises Kappa0Mismatch when the two kappa0 extractions disagree beyond
    mismatch_tol relative (signals a finite-difference step or quadrature
    problem).
    """
    z0 = critical_speed_ratio(sigma)
    cc = 2.0 * z0 * float(np.sqrt(omega))
    params = SolitonParams(sigma, omega, cc)
    direction = eigen_direction(params)
    mu, nu = direction.mu, direction.nu
    mass, momentum = mass_momentum_closed_form(params)
    at = (omega, cc)
    d2m = directional_second_derivative(_closed_m(params), at, (mu, nu)).value
    d2p = directional_second_derivative(_closed_p(params), at, (mu, nu)).value
    k0_mass = d2m / z0
    k0_mom = d2p / (-float(np.sqrt(omega)))
    rel = abs(k0_mass - k0_mom) / max(abs(k0_mom), 1e-30)
    if rel > mismatch_tol:
        raise Kappa0Mismatch(
            f"kappa0 extractions disagree by {rel:.2e} relative "
            f"({k0_mass:.6g} vs {k0_mom:.6g})")
    k0 = 0.5 * (k0_mass + k0_mom)
    b1 = 2.0 * k0 * omega * (1.0 - z0 * z0)
    b2 = 4.0 * omega * float(np.sqrt(omega)) * (1.0 - z0) * sigma * (2.0 - sigma) * mass
    return CriticalData(
        sigma=sigma, omega=omega, z0=z0, c_crit=cc, a0=params.a0,
        mu=mu, nu=nu, mass=mass, momentum=momentum,
        kappa0=k0, kappa0_from_mass=k0_mass, kappa0_from_momentum=k0_mom,
        b1=b1, b2=b2)
