"""Modulation decomposition u = e^{i theta} (phi_lam + eps)(. - y).

phi_lam denotes the family member at (omega + lam*mu, c + lam*nu). The three
parameters solve the orthogonality system

    <eps, i phi_lam> = <eps, d_x phi_lam> = <eps, J'(phi_lam)> = 0

by Newton iteration with an analytically assembled 3x3 Jacobian (inner
products of eps and lambda-derivatives of the family). Tracking along a
trajectory warm-starts each solve from the previous state and unwraps theta
and y continuously.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .conserved import orbit_distance
from .critical import EigenDirection
from .errors import NewtonDiverged, OutsideTube
from .linop import apply_J_prime, apply_S_double_prime
from .numerics import Field, Grid, h1_norm, inner, l2_norm, spectral_derivative, translate
from .soliton import SolitonParams, soliton_field

TUBE_FRACTION = 0.1     # refuse decomposition beyond this multiple of ||phi||_H1
RESIDUAL_RTOL = 1e-9


@dataclass
class ModulationState:
    theta: float
    y: float
    lam: float
    eps: Field
    residuals: np.ndarray
    converged: bool
    iterations: int

    @property
    def eps_h1(self) -> float:
        return h1_norm(self.eps)


def _family(params: SolitonParams, direction: EigenDirection, lam: float,
            grid: Grid) -> Field:
    p = params.with_shift(lam * direction.mu, lam * direction.nu)
    return soliton_field(p, grid)


def decompose(u: Field, params: SolitonParams, direction: EigenDirection,
              guess: ModulationState | tuple[float, float, float] | None = None,
              max_iter: int = 25, check_tube: bool = True) -> ModulationState:
    """Solve the three orthogonality conditions for (theta, y, lam).

    Raises OutsideTube when the orbit distance exceeds 10% of ||phi||_H1 and
    NewtonDiverged (best iterate attached) when the iteration stalls.
    """
    grid = u.grid
    phi0 = soliton_field(params, grid)
    fit = None
    if check_tube or guess is None:
        fit = orbit_distance(u, params, reference=phi0)
    if check_tube:
        radius = TUBE_FRACTION * h1_norm(phi0)
        if fit.distance > radius:
            raise OutsideTube(
                f"orbit distance {fit.distance:.3e} exceeds modulation radius "
                f"{radius:.3e}", distance=fit.distance, radius=radius)
    if guess is None:
        # seed (theta, y) from the orbit fit; Newton from the origin can
        # overshoot lambda badly for order-one phase/translation offsets
        th, y, lam = fit.theta, fit.y, 0.0
    elif isinstance(guess, ModulationState):
        th, y, lam = guess.theta, guess.y, guess.lam
    else:
        th, y, lam = guess

    h = 1e-4
    state = None
    for it in range(max_iter):
        phil = _family(params, direction, lam, grid)
        plus = _family(params, direction, lam + h, grid)
        minus = _family(params, direction, lam - h, grid)
        psil = Field(grid, (plus.values - minus.values) / (2.0 * h))
        jl = apply_J_prime(phil, params.sigma)
        djl = Field(grid, (apply_J_prime(plus, params.sigma).values
                           - apply_J_prime(minus, params.sigma).values) / (2.0 * h))
        dphil = spectral_derivative(phil, 1)
        w = Field(grid, np.exp(-1j * th) * translate(u, -y).values)
        eps = w - phil
        c1 = Field(grid, 1j * phil.values)
        residuals = np.array([inner(eps, c1), inner(eps, dphil), inner(eps, jl)])
        scales = np.array([l2_norm(c1), l2_norm(dphil), l2_norm(jl)]) * l2_norm(phil)
        state = ModulationState(theta=th, y=y, lam=lam, eps=eps,
                                residuals=residuals, converged=False,
                                iterations=it)
        if np.all(np.abs(residuals) <= RESIDUAL_RTOL * scales):
            state.converged = True
            return state
        dw = spectral_derivative(w, 1)
        minus_iw = Field(grid, -1j * w.values)
        jac = np.zeros((3, 3))
        for row, cf in enumerate((c1, dphil, jl)):
            jac[row, 0] = inner(minus_iw, cf)
            jac[row, 1] = inner(dw, cf)
        ipsil = Field(grid, 1j * psil.values)
        dpsil = spectral_derivative(psil, 1)
        jac[0, 2] = inner(Field(grid, -psil.values), c1) + inner(eps, ipsil)
        jac[1, 2] = inner(Field(grid, -psil.values), dphil) + inner(eps, dpsil)
        jac[2, 2] = inner(Field(grid, -psil.values), jl) + inner(eps, djl)
        try:
            delta = np.linalg.solve(jac, -residuals)
        except np.linalg.LinAlgError as exc:
            raise NewtonDiverged(f"singular modulation Jacobian: {exc}",
                                 state=state) from None
        # backtrack the lambda step while it would leave the existence region
        for _ in range(8):
            lam_new = lam + delta[2]
            om_new = params.omega + lam_new * direction.mu
            c_new = params.c + lam_new * direction.nu
            if om_new > 0 and c_new**2 < 4.0 * om_new:
                break
            delta = 0.5 * delta
        else:
            raise NewtonDiverged("lambda step cannot stay inside c^2 < 4*omega",
                                 state=state)
        th, y, lam = th + delta[0], y + delta[1], lam + delta[2]
    raise NewtonDiverged(
        f"no convergence in {max_iter} iterations; residuals {state.residuals}",
        state=state)


class Tracker:
    """Warm-started decomposition along a trajectory.

    update(t, u) returns the ModulationState at time t with theta and y
    unwrapped continuously (2*pi and box-period branches chosen nearest the
    previous record).
    """

    def __init__(self, params: SolitonParams, direction: EigenDirection,
                 grid: Grid):
        self.params = params
        self.direction = direction
        self.grid = grid
        self._last: ModulationState | None = None

    def update(self, t: float, u: Field) -> ModulationState:
        guess = self._last
        state = decompose(u, self.params, self.direction, guess=guess)
        if self._last is not None:
            period = 2.0 * self.grid.L
            state.theta += 2.0 * np.pi * round(
                (self._last.theta - state.theta) / (2.0 * np.pi))
            state.y += period * round((self._last.y - state.y) / period)
        self._last = state
        return state


def track(times, fields, params: SolitonParams, direction: EigenDirection):
    """Decompose a whole series of fields; returns list of ModulationState.

    Stops at the first OutsideTube and returns the states up to the exit
    (the exit itself is the experimental signal, available from the length).
    """
    tracker = Tracker(params, direction, fields[0].grid)
    states = []
    for t, u in zip(times, fields):
        try:
            states.append(tracker.update(t, u))
        except OutsideTube:
            break
    return states


def finite_difference_rates(times, values):
    """Central-difference d/dt of a sampled scalar series (one-sided ends)."""
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    return np.gradient(values, times)


def coupling_constant(params: SolitonParams, grid: Grid,
                      direction: EigenDirection) -> float:
    """Translation-rate coupling C = -<i psi, -a0 phi + i phi_x>
    / (2 (a0^2 - omega) M(phi))."""
    from .conserved import conserved_set
    from .critical import family_tangent_field

    phi = soliton_field(params, grid)
    psi = family_tangent_field(params, grid, direction)
    dphi = spectral_derivative(phi, 1)
    direction_field = Field(grid, -params.a0 * phi.values + 1j * dphi.values)
    mass = conserved_set(phi, params.sigma).M
    pairing = inner(Field(grid, 1j * psi.values), direction_field)
    return -pairing / (2.0 * (params.a0**2 - params.omega) * mass)


def translation_rate_field(params: SolitonParams, grid: Grid) -> Field:
    """The field S''(phi)(-a0 phi + i phi_x) / (2 (a0^2 - omega) M(phi))
    paired with eps in the translation-rate identity."""
    from .conserved import conserved_set

    phi = soliton_field(params, grid)
    dphi = spectral_derivative(phi, 1)
    direction_field = Field(grid, -params.a0 * phi.values + 1j * dphi.values)
    mass = conserved_set(phi, params.sigma).M
    image = apply_S_double_prime(direction_field, phi, params)
    return Field(grid, image.values / (2.0 * (params.a0**2 - params.omega) * mass))
