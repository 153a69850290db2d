"""Discrete conserved functionals and the distance to the soliton orbit.

Conventions (real inner product <u,v> = Re int u conj(v) dx):

    M(u) = (1/2) ||u||_L2^2
    P(u) = (1/2) Im int u conj(u_x) dx
    E(u) = (1/2) ||u_x||^2 - (1/(2 sigma + 2)) Im int |u|^{2 sigma} u conj(u_x) dx
    J(u) = Im int |u|^{2 sigma} u conj(u_x) dx
    S_{omega,c}(u) = E + omega*M + c*P
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonFiniteInput
from .numerics import Field, h1_norm, l2_norm, spectral_derivative, translate
from .soliton import SolitonParams, soliton_field


@dataclass
class ConservedSet:
    M: float
    P: float
    E: float
    J: float


def conserved_set(u: Field, sigma: float) -> ConservedSet:
    """Evaluate M, P, E and the auxiliary J on one field."""
    if not u.is_finite():
        raise NonFiniteInput("conserved_set: field contains NaN or Inf")
    dx = u.grid.dx
    du = spectral_derivative(u, 1).values
    v = u.values
    m = 0.5 * float(np.sum(np.abs(v) ** 2)) * dx
    p = 0.5 * float(np.imag(np.sum(v * np.conj(du)))) * dx
    j = float(np.imag(np.sum(np.abs(v) ** (2 * sigma) * v * np.conj(du)))) * dx
    e = 0.5 * float(np.sum(np.abs(du) ** 2)) * dx - j / (2.0 * sigma + 2.0)
    return ConservedSet(M=m, P=p, E=e, J=j)


def action(u: Field, params: SolitonParams) -> float:
    """S_{omega,c}(u) = E + omega*M + c*P."""
    cs = conserved_set(u, params.sigma)
    return cs.E + params.omega * cs.M + params.c * cs.P


def q_functional(u: Field, sigma: float, mu: float, nu: float) -> float:
    """Q_{mu,nu}(u) = mu*M(u) + nu*P(u)."""
    cs = conserved_set(u, sigma)
    return mu * cs.M + nu * cs.P


def lp_power_norm(u: Field, sigma: float) -> float:
    """int |u|^{2 sigma + 2} dx by the rectangle rule."""
    if not u.is_finite():
        raise NonFiniteInput("lp_power_norm: field contains NaN or Inf")
    return float(np.sum(np.abs(u.values) ** (2 * sigma + 2))) * u.grid.dx


@dataclass
class OrbitFit:
    distance: float
    theta: float
    y: float


def _h1_pairing_spectrum(u: Field, ref: Field) -> np.ndarray:
    """Per-mode complex H1 pairing weights: uh * conj(refh) * (1 + k^2)."""
    g = u.grid
    w = 1.0 + g._k_odd**2
    return np.fft.fft(u.values) * np.conj(np.fft.fft(ref.values)) * w


def orbit_distance(u: Field, params: SolitonParams,
                   reference: Field | None = None) -> OrbitFit:
    """min over (theta, y) of ||u - e^{i theta} phi(. - y)||_H1.

    For fixed y the optimal theta is the argument of the complex H1 pairing
    <u, phi(.-y)>; y is located by an FFT cross-correlation over grid shifts
    and refined by golden-section search within one cell, evaluating the
    pairing of spectrally shifted profiles.
    """
    if not u.is_finite():
        raise NonFiniteInput("orbit_distance: field contains NaN or Inf")
    g = u.grid
    ref = reference if reference is not None else soliton_field(params, g)
    base = _h1_pairing_spectrum(u, ref)
    dx, n = g.dx, g.N
    # pairing(y) = (dx/N) * sum_k base_k e^{i k y}; grid values via one IFFT
    corr = np.fft.ifft(base) * dx
    m = int(np.argmax(np.abs(corr)))
    y0 = m * dx

    def pairing(y: float) -> complex:
        return complex(np.sum(base * np.exp(1j * g.k * y)) * dx / n)

    gr = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = y0 - dx, y0 + dx
    c1 = b - gr * (b - a)
    c2 = a + gr * (b - a)
    f1, f2 = -abs(pairing(c1)), -abs(pairing(c2))
    for _ in range(40):
        if f1 < f2:
            b, c2, f2 = c2, c1, f1
            c1 = b - gr * (b - a)
            f1 = -abs(pairing(c1))
        else:
            a, c1, f1 = c1, c2, f2
            c2 = a + gr * (b - a)
            f2 = -abs(pairing(c2))
    y_opt = 0.5 * (a + b)
    # Newton polish on d/dy |pairing|^2 = 0: the bare |pairing| is too flat
    # near its maximum to localize y below ~sqrt(eps), but its derivative is
    # cancellation-free and pins y to machine precision.
    ik = 1j * g.k
    for _ in range(6):
        ph = np.exp(1j * g.k * y_opt)
        p0 = complex(np.sum(base * ph) * dx / n)
        if abs(p0) < 1e-14:
            break
        p1 = complex(np.sum(base * ik * ph) * dx / n)
        p2 = complex(np.sum(base * ik * ik * ph) * dx / n)
        s = 2.0 * (p0.conjugate() * p1).real
        s_prime = 2.0 * (abs(p1) ** 2 + (p0.conjugate() * p2).real)
        if s_prime >= 0.0:
            break
        step_y = -s / s_prime
        y_opt += step_y
        if abs(step_y) < 1e-15 * max(1.0, abs(y_opt)):
            break
    pv = pairing(y_opt)
    theta = float(np.angle(pv))
    diff = u.values - np.exp(1j * theta) * translate(ref, y_opt).values
    dist = h1_norm(Field(g, diff))
    # wrap y into [-L, L)
    y_opt = (y_opt + g.L) % (2.0 * g.L) - g.L
    return OrbitFit(distance=dist, theta=theta, y=y_opt)


__all__ = [
    "ConservedSet", "OrbitFit", "conserved_set", "action", "q_functional",
    "lp_power_norm", "orbit_distance", "h1_norm", "l2_norm",
]
