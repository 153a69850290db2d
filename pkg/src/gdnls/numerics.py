"""Shared numerical infrastructure.

Uniform periodic grid with Fourier-collocation calculus, discrete inner
products and norms, adaptive Gauss-Kronrod quadrature for improper integrals
on (0, inf), and Richardson-extrapolated finite differences in the
(omega, c) parameter plane.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainViolation, GridMismatch, NoConvergence, NonFiniteInput


class Grid:
    """Uniform periodic grid on [-L, L) with N points (N a power of two).

    Attributes
    ----------
    L : float
        Half-length of the spatial domain.
    N : int
        Number of collocation points, power of two, >= 16.
    dx : float
        Spacing 2L/N.
    x : ndarray
        Nodes x_j = -L + j*dx.
    k : ndarray
        Wavenumbers in the standard 2*pi-periodic FFT ordering.
    """

    def __init__(self, half_length: float, n: int):
        if n < 16 or (n & (n - 1)) != 0:
            raise ValueError(f"N must be a power of two >= 16, got {n}")
        if not half_length > 0:
            raise ValueError(f"half_length must be positive, got {half_length}")
        self.L = float(half_length)
        self.N = int(n)
        self.dx = 2.0 * self.L / self.N
        self.x = -self.L + self.dx * np.arange(self.N)
        self.k = 2.0 * np.pi * np.fft.fftfreq(self.N, d=self.dx)
        self.nyquist_index = self.N // 2
        # first-derivative symbol: Nyquist zeroed (odd-order derivatives)
        self._k_odd = self.k.copy()
        self._k_odd[self.nyquist_index] = 0.0

    def dealias_mask(self, fraction: float = 2.0 / 3.0) -> np.ndarray:
        """Boolean mask keeping |k| <= fraction * k_max."""
        kmax = np.abs(self.k).max()
        return np.abs(self.k) <= fraction * kmax

    def __eq__(self, other):
        return (
            isinstance(other, Grid)
            and self.N == other.N
            and self.L == other.L
        )

    def __hash__(self):
        return hash((self.L, self.N))

    def __repr__(self):
        return f"Grid(L={self.L:g}, N={self.N})"


@dataclass
class Field:
    """Complex-valued samples of a function on a periodic grid."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != (self.grid.N,):
            raise ValueError(
                f"values shape {self.values.shape} does not match grid N={self.grid.N}"
            )

    def copy(self) -> "Field":
        return Field(self.grid, self.values.copy())

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.values)))

    def __add__(self, other):
        _check_same_grid(self, other)
        return Field(self.grid, self.values + other.values)

    def __sub__(self, other):
        _check_same_grid(self, other)
        return Field(self.grid, self.values - other.values)

    def __mul__(self, scalar):
        return Field(self.grid, self.values * scalar)

    __rmul__ = __mul__


@dataclass
class QuadratureResult:
    value: float
    est_error: float
    evaluations: int


@dataclass
class DerivativeResult:
    value: float
    est_error: float


def _check_same_grid(f: Field, g: Field):
    if f.grid != g.grid:
        raise GridMismatch(f"fields on different grids: {f.grid} vs {g.grid}")


def _check_finite(f: Field, who: str):
    if not f.is_finite():
        raise NonFiniteInput(f"{who}: field contains NaN or Inf")


def spectral_derivative(f: Field, order: int) -> Field:
    """Fourier-collocation derivative of integer order 1, 2, or 3.

    Odd-order derivatives zero the Nyquist mode; exact for trigonometric
    polynomials within the resolved band.
    """
    if order not in (1, 2, 3):
        raise ValueError(f"order must be 1, 2, or 3, got {order}")
    _check_finite(f, "spectral_derivative")
    g = f.grid
    kk = g._k_odd if order % 2 == 1 else g.k
    fh = np.fft.fft(f.values)
    return Field(g, np.fft.ifft((1j * kk) ** order * fh))


def inner(f: Field, g: Field) -> float:
    """Real L2 inner product Re sum f_j conj(g_j) dx (periodic rectangle rule)."""
    _check_same_grid(f, g)
    return float(np.real(np.sum(f.values * np.conj(g.values))) * f.grid.dx)


def integral(f: Field) -> complex:
    """Rectangle-rule integral of f over the box."""
    return complex(np.sum(f.values) * f.grid.dx)


def l2_norm(f: Field) -> float:
    return float(np.sqrt(np.sum(np.abs(f.values) ** 2) * f.grid.dx))


def h1_norm(f: Field) -> float:
    """H1 norm (||f||^2 + ||f_x||^2)^(1/2) with the spectral derivative."""
    _check_finite(f, "h1_norm")
    fh = np.fft.fft(f.values)
    w = 1.0 + f.grid._k_odd**2
    return float(np.sqrt(np.sum(w * np.abs(fh) ** 2) * f.grid.dx / f.grid.N))


def translate(f: Field, y: float) -> Field:
    """Spectral translation: returns the samples of f(x - y)."""
    fh = np.fft.fft(f.values)
    return Field(f.grid, np.fft.ifft(fh * np.exp(-1j * f.grid.k * y)))


def fourier_antiderivative(f: Field) -> np.ndarray:
    """Cumulative integral A(x) = int_{-L}^{x} f dy at spectral accuracy.

    The zero mean is integrated analytically as mean*(x+L); the rest via
    division by ik, anchored so A(-L) = 0. Real input gives real output.
    """
    g = f.grid
    vals = f.values
    mean = vals.mean()
    fh = np.fft.fft(vals - mean)
    with np.errstate(divide="ignore", invalid="ignore"):
        ah = np.where(g.k != 0.0, fh / np.where(g.k != 0.0, 1j * g.k, 1.0), 0.0)
    osc = np.fft.ifft(ah)
    out = mean * (g.x - g.x[0]) + (osc - osc[0])
    if np.isrealobj(f.values) or np.abs(vals.imag).max() == 0.0:
        return np.real(out)
    return out


# ---------------------------------------------------------------------------
# Adaptive Gauss-Kronrod quadrature on (0, inf)
# ---------------------------------------------------------------------------

# QUADPACK 15-point Kronrod / 7-point Gauss constants (positive half).
_XGK = np.array([
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.0,
])
_WGK = np.array([
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728,
])
_WG = np.array([
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469,
])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])           # 15 ascending nodes
_WK = np.concatenate([_WGK[:-1], _WGK[::-1]])                # Kronrod weights
_WG_FULL = np.zeros(15)
_WG_FULL[1:14:2] = np.concatenate([_WG[:-1], _WG[::-1]])     # Gauss weights


def _gk15(fn, a: float, b: float):
    """One Gauss-Kronrod 7-15 panel on [a, b]: (kronrod, |kronrod - gauss|)."""
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    fx = fn(mid + half * _NODES)
    resk = half * float(np.dot(_WK, fx))
    resg = half * float(np.dot(_WG_FULL, fx))
    return resk, abs(resk - resg)


def _adaptive_gk(fn, a: float, b: float, tol: float, max_panels: int):
    """Bisection-adaptive GK15 on [a, b] seeded with a dyadically graded
    partition, so features near the left endpoint are never skipped when b
    is many orders of magnitude larger. Returns (value, error, evaluations)."""
    cuts = [a]
    step_edge = max(1.0, abs(a))
    while a + step_edge < b:
        cuts.append(a + step_edge)
        step_edge *= 2.0
    cuts.append(b)
    heap = []
    total_val = total_err = 0.0
    count = 0
    serial = 0
    for pa, pb in zip(cuts[:-1], cuts[1:]):
        resk, err = _gk15(fn, pa, pb)
        count += 1
        total_val += resk
        total_err += err
        heapq.heappush(heap, (-err, serial, pa, pb, resk, err))
        serial += 1
    while total_err > tol and count < max_panels:
        _, _, pa, pb, pval, perr = heapq.heappop(heap)
        pm = 0.5 * (pa + pb)
        if pm - pa < 1e-15 * max(abs(pa), 1.0):
            # panel width at rounding floor; put it back and give up
            heapq.heappush(heap, (-perr, serial, pa, pb, pval, perr))
            break
        lk, le = _gk15(fn, pa, pm)
        rk, re = _gk15(fn, pm, pb)
        count += 2
        total_val += lk + rk - pval
        total_err += le + re - perr
        heapq.heappush(heap, (-le, serial, pa, pm, lk, le)); serial += 1
        heapq.heappush(heap, (-re, serial, pm, pb, rk, re)); serial += 1
    return total_val, total_err, 15 * count


_TAIL_CAP = 350.0  # exp(-y/2) is ~1e-76 here; also keeps sinh(y) finite


def improper_integral(integrand: Callable[[np.ndarray], np.ndarray],
                      tol: float,
                      max_panels: int = 4000) -> QuadratureResult:
    """Integrate a vectorized integrand over (0, inf) to absolute tolerance.

    The integrand must decay at least exponentially with rate >= 1/2 (all
    cosh-power integrands used here do). The integral is mapped through
    y = asinh(t), which turns the exponential tail into a polynomial one,
    then evaluated by bisection-adaptive Gauss-Kronrod on a finite interval.

    The cutoff is selected in the original variable: scan y upward until the
    integrand magnitude stays below tol*1e-3 across a probe window; the
    remaining tail is bounded by 4*probe_max (valid for decay rate >= 1/2)
    and folded into est_error. A cutoff criterion applied after the asinh
    substitution would not bound the tail for decay rates below 1, so the
    scan happens before substitution.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    evals = 0
    tiny = tol * 1e-3
    y_cut = None
    tail_bound = 0.0
    y = 8.0
    while y <= _TAIL_CAP:
        probe = np.array([y, 1.25 * y, 1.5 * y])
        vals = np.abs(np.asarray(integrand(probe), dtype=float))
        evals += 3
        if not np.all(np.isfinite(vals)):
            raise NoConvergence(
                f"integrand not finite near y={y:g}; outside the decay class")
        if vals.max() <= tiny:
            y_cut = 1.5 * y
            tail_bound = 4.0 * float(vals.max())
            break
        y *= 1.5
    if y_cut is None:
        raise NoConvergence(
            f"no cutoff with |integrand| <= {tiny:g} found below y={_TAIL_CAP:g}")

    def transformed(t):
        t = np.asarray(t, dtype=float)
        return np.asarray(integrand(np.arcsinh(t)), dtype=float) / np.hypot(1.0, t)

    gk_tol = max(tol - tail_bound, 0.5 * tol)
    value, err, n = _adaptive_gk(transformed, 0.0, float(np.sinh(y_cut)),
                                 gk_tol, max_panels)
    evals += n
    est = err + tail_bound
    if est > tol:
        raise NoConvergence(
            f"estimated error {est:.3e} exceeds tol {tol:.3e} "
            f"after {n // 15} panels", value=value, est_error=est)
    return QuadratureResult(value=value, est_error=est, evaluations=evals)


# ---------------------------------------------------------------------------
# Finite differences in the (omega, c) parameter plane
# ---------------------------------------------------------------------------

_WHICH = ("omega", "c", "omega_omega", "omega_c", "c_c")


def _inside(omega: float, c: float) -> bool:
    return omega > 0 and c * c < 4.0 * omega


def _stencil_points(omega, c, which, h):
    if which == "omega":
        return [(omega + s * hh, c) for hh in (h, h / 2) for s in (-1, 1)]
    if which == "c":
        return [(omega, c + s * hh) for hh in (h, h / 2) for s in (-1, 1)]
    if which == "omega_omega":
        return [(omega + s * hh, c) for hh in (h, h / 2) for s in (-1, 0, 1)]
    if which == "c_c":
        return [(omega, c + s * hh) for hh in (h, h / 2) for s in (-1, 0, 1)]
    if which == "omega_c":
        return [(omega + s1 * hh, c + s2 * hh)
                for hh in (h, h / 2) for s1 in (-1, 1) for s2 in (-1, 1)]
    raise ValueError(f"which must be one of {_WHICH}, got {which!r}")


def parameter_derivative(g: Callable[[float, float], float],
                         at: tuple[float, float],
                         which: str,
                         h: float | None = None) -> DerivativeResult:
    """Richardson-extrapolated central difference of g(omega, c).

    One extrapolation level: value = (4*D_{h/2} - D_h)/3 with the two-level
    difference as error estimate. The default step is 1e-3*max(1, |omega|)
    for first derivatives and 1e-2 for second derivatives; the step shrinks
    by factors of 4 (up to three times) if the stencil would leave the
    existence region c^2 < 4*omega.
    """
    omega, c = at
    if not _inside(omega, c):
        raise DomainViolation(f"(omega, c)=({omega:g}, {c:g}) outside c^2 < 4*omega")
    if which not in _WHICH:
        raise ValueError(f"which must be one of {_WHICH}, got {which!r}")
    first = which in ("omega", "c")
    if h is None:
        h = 1e-3 * max(1.0, abs(omega)) if first else 1e-2
    for _ in range(4):
        if all(_inside(*pt) for pt in _stencil_points(omega, c, which, h)):
            break
        h *= 0.25
    else:
        raise DomainViolation(
            f"stencil for {which} at ({omega:g}, {c:g}) leaves c^2 < 4*omega")

    def diff(hh: float) -> float:
        if which == "omega":
            return (g(omega + hh, c) - g(omega - hh, c)) / (2 * hh)
        if which == "c":
            return (g(omega, c + hh) - g(omega, c - hh)) / (2 * hh)
        if which == "omega_omega":
            return (g(omega + hh, c) - 2 * g(omega, c) + g(omega - hh, c)) / hh**2
        if which == "c_c":
            return (g(omega, c + hh) - 2 * g(omega, c) + g(omega, c - hh)) / hh**2
        return (g(omega + hh, c + hh) - g(omega + hh, c - hh)
                - g(omega - hh, c + hh) + g(omega - hh, c - hh)) / (4 * hh**2)

    d_h = diff(h)
    d_h2 = diff(h / 2)
    value = (4.0 * d_h2 - d_h) / 3.0
    return DerivativeResult(value=value, est_error=abs(d_h2 - d_h) / 3.0)


def directional_second_derivative(g: Callable[[float, float], float],
                                  at: tuple[float, float],
                                  direction: tuple[float, float],
                                  h: float = 1e-2) -> DerivativeResult:
    """Second derivative of lam -> g(omega + lam*mu, c + lam*nu) at lam = 0."""
    omega, c = at
    mu, nu = direction
    if not _inside(omega, c):
        raise DomainViolation(f"(omega, c)=({omega:g}, {c:g}) outside c^2 < 4*omega")

    def gl(lam: float) -> float:
        om2, c2 = omega + lam * mu, c + lam * nu
        if not _inside(om2, c2):
            raise DomainViolation(
                f"lambda stencil point ({om2:g}, {c2:g}) leaves c^2 < 4*omega")
        return g(om2, c2)

    def diff(hh: float) -> float:
        return (gl(hh) - 2 * gl(0.0) + gl(-hh)) / hh**2

    d_h = diff(h)
    d_h2 = diff(h / 2)
    value = (4.0 * d_h2 - d_h) / 3.0
    return DerivativeResult(value=value, est_error=abs(d_h2 - d_h) / 3.0)
