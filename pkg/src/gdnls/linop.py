"""Linearized machinery around a sampled soliton.

The second variation of the action at the profile phi,

    H f = -f'' + omega f + i c f' - i sigma |phi|^{2s-2} conj(phi) phi_x f
          - i sigma |phi|^{2s-2} phi phi_x conj(f) - i |phi|^{2s} f',

contains a conjugate term, so it is only R-linear. All linear algebra here
therefore works on the 2N-real-dimensional representation (Re f, Im f).
The assembled matrix is symmetric for band-limited fields (the asymmetric
parts of the collocation operator live at aliasing level); it is explicitly
symmetrized before eigenvalue work.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import eigh
from scipy.sparse.linalg import LinearOperator, lobpcg

from .errors import EigenFailure, NonFiniteInput
from .numerics import Field, Grid, inner, l2_norm, spectral_derivative
from .soliton import SolitonParams

DENSE_CAP = 2048  # largest N assembled densely (8M-entry real matrices)


def apply_S_prime(u: Field, params: SolitonParams) -> Field:
    """Action gradient: -u'' - i|u|^{2s} u' + omega u + i c u'."""
    if not u.is_finite():
        raise NonFiniteInput("apply_S_prime: field contains NaN or Inf")
    d1 = spectral_derivative(u, 1).values
    d2 = spectral_derivative(u, 2).values
    s = params.sigma
    vals = (-d2 - 1j * np.abs(u.values) ** (2 * s) * d1
            + params.omega * u.values + 1j * params.c * d1)
    return Field(u.grid, vals)


def apply_S_double_prime(f: Field, base: Field, params: SolitonParams) -> Field:
    """Second variation at the profile `base` applied to f (R-linear)."""
    if not f.is_finite():
        raise NonFiniteInput("apply_S_double_prime: field contains NaN or Inf")
    phi = base.values
    dphi = spectral_derivative(base, 1).values
    d1 = spectral_derivative(f, 1).values
    d2 = spectral_derivative(f, 2).values
    s = params.sigma
    absphi = np.abs(phi)
    pow2sm2 = absphi ** (2 * s - 2)
    pow2s = absphi ** (2 * s)
    vals = (-d2 + params.omega * f.values + 1j * params.c * d1
            - 1j * s * pow2sm2 * np.conj(phi) * dphi * f.values
            - 1j * s * pow2sm2 * phi * dphi * np.conj(f.values)
            - 1j * pow2s * d1)
    return Field(f.grid, vals)


def apply_J_prime(u: Field, sigma: float) -> Field:
    """Gradient of the auxiliary functional: 2(sigma+1) i |u|^{2s} u_x."""
    if not u.is_finite():
        raise NonFiniteInput("apply_J_prime: field contains NaN or Inf")
    d1 = spectral_derivative(u, 1).values
    return Field(u.grid, 2.0 * (sigma + 1.0) * 1j
                 * np.abs(u.values) ** (2 * sigma) * d1)


# ---------------------------------------------------------------------------
# 2N real representation
# ---------------------------------------------------------------------------

def field_to_real(f: Field) -> np.ndarray:
    return np.concatenate([np.real(f.values), np.imag(f.values)])


def real_to_field(v: np.ndarray, grid: Grid) -> Field:
    n = grid.N
    return Field(grid, v[:n] + 1j * v[n:])


def assemble_operator(base: Field, params: SolitonParams) -> np.ndarray:
    """Dense symmetric 2N x 2N matrix of the second variation.

    Built by applying the operator to the 2N real basis vectors and
    symmetrizing; eigenvalues of this matrix are the discrete L2 spectrum.
    """
    grid = base.grid
    n = grid.N
    phi = base.values
    dphi = spectral_derivative(base, 1).values
    s = params.sigma
    absphi = np.abs(phi)
    a_pot = -1j * s * absphi ** (2 * s - 2) * np.conj(phi) * dphi
    b_pot = -1j * s * absphi ** (2 * s - 2) * phi * dphi
    w_pot = absphi ** (2 * s)
    k = grid.k
    k_odd = grid._k_odd
    out = np.empty((2 * n, 2 * n))
    eye = np.eye(n)
    block = 128
    for j0 in range(0, n, block):
        cols = eye[:, j0:j0 + block]
        for part, offset in ((cols, 0), (1j * cols, n)):
            fh = np.fft.fft(part, axis=0)
            d1 = np.fft.ifft(1j * k_odd[:, None] * fh, axis=0)
            d2 = np.fft.ifft(-(k[:, None] ** 2) * fh, axis=0)
            r = (-d2 + params.omega * part + 1j * params.c * d1
                 + a_pot[:, None] * part + b_pot[:, None] * np.conj(part)
                 - 1j * w_pot[:, None] * d1)
            out[:n, offset + j0:offset + j0 + cols.shape[1]] = np.real(r)
            out[n:, offset + j0:offset + j0 + cols.shape[1]] = np.imag(r)
    return 0.5 * (out + out.T)


def _h1_gram(grid: Grid) -> np.ndarray:
    """Dense 2N x 2N matrix of (1 - d_xx) in the real representation."""
    n = grid.N
    w = 1.0 + grid.k ** 2
    f = np.fft.ifft(w[:, None] * np.fft.fft(np.eye(n), axis=0), axis=0)
    blockm = np.real(f)
    out = np.zeros((2 * n, 2 * n))
    out[:n, :n] = blockm
    out[n:, n:] = blockm
    return 0.5 * (out + out.T)


def spectrum(base: Field, params: SolitonParams, k: int = 8):
    """k smallest eigenvalues of the discretized second variation.

    Dense symmetric solve for N <= 2048; LOBPCG with an (1 - d_xx)^-1
    preconditioner on larger grids. Returns (eigenvalues, eigenfields).
    """
    if k < 4:
        raise ValueError("need k >= 4 eigenvalues")
    grid = base.grid
    n = grid.N
    if n <= DENSE_CAP:
        mat = assemble_operator(base, params)
        try:
            vals, vecs = eigh(mat, subset_by_index=[0, k - 1])
        except np.linalg.LinAlgError as exc:  # pragma: no cover
            raise EigenFailure(str(exc)) from exc
    else:
        dphi = spectral_derivative(base, 1).values
        s = params.sigma
        absphi = np.abs(base.values)
        a_pot = -1j * s * absphi ** (2 * s - 2) * np.conj(base.values) * dphi
        b_pot = -1j * s * absphi ** (2 * s - 2) * base.values * dphi
        w_pot = absphi ** (2 * s)
        kk, k_odd = grid.k, grid._k_odd

        def act(v):
            f = v[:n] + 1j * v[n:]
            fh = np.fft.fft(f)
            d1 = np.fft.ifft(1j * k_odd * fh)
            d2 = np.fft.ifft(-(kk ** 2) * fh)
            r = (-d2 + params.omega * f + 1j * params.c * d1
                 + a_pot * f + b_pot * np.conj(f) - 1j * w_pot * d1)
            return np.concatenate([np.real(r), np.imag(r)])

        def sym_act(v):
            # symmetrized action: (A + A^T)/2 via the conjugate trick is not
            # available matrix-free; the raw action is symmetric to aliasing
            # level on the resolved band, which LOBPCG tolerates.
            return act(v)

        def precond(v):
            f = v[:n] + 1j * v[n:]
            r = np.fft.ifft(np.fft.fft(f) / (1.0 + kk ** 2))
            return np.concatenate([np.real(r), np.imag(r)])

        op = LinearOperator((2 * n, 2 * n), matvec=sym_act)
        pre = LinearOperator((2 * n, 2 * n), matvec=precond)
        rng = np.random.default_rng(7)
        x0 = rng.standard_normal((2 * n, k))
        try:
            vals, vecs = lobpcg(op, x0, M=pre, largest=False, tol=1e-9,
                                maxiter=400)
        except Exception as exc:  # pragma: no cover
            raise EigenFailure(str(exc)) from exc
        order = np.argsort(vals)
        vals, vecs = vals[order], vecs[:, order]
    fields = [real_to_field(vecs[:, i] / np.sqrt(grid.dx), grid)
              for i in range(len(vals))]
    return np.asarray(vals, dtype=float), fields


def negative_count(eigenvalues: np.ndarray, scale_tol: float = 1e-4) -> int:
    """Count eigenvalues below -scale_tol * spectral_scale."""
    scale = float(np.abs(eigenvalues).max())
    return int(np.sum(eigenvalues < -scale_tol * scale))


def kernel_correlation(eigenvalues: np.ndarray, fields, targets,
                       scale_tol: float = 1e-4) -> list[float]:
    """Projection norm of each (normalized) target onto the near-zero span.

    The discrete kernel pair can mix the two symmetry directions, so each
    target is compared against the span of all near-zero eigenfields.
    """
    scale = float(np.abs(eigenvalues).max())
    idx = [i for i, ev in enumerate(eigenvalues) if abs(ev) <= scale_tol * scale]
    if not idx:
        return [0.0 for _ in targets]
    cols = np.stack([field_to_real(fields[i]) for i in idx], axis=1)
    q, _ = np.linalg.qr(cols)
    out = []
    for t in targets:
        v = field_to_real(t)
        v = v / np.linalg.norm(v)
        out.append(float(np.linalg.norm(q.T @ v)))
    return out


def coercivity_constant(base: Field, params: SolitonParams,
                        constraints=None) -> float:
    """Smallest of <H eps, eps> / ||eps||_H1^2 on the constrained subspace.

    The subspace is the L2-orthogonal complement of {i phi, phi_x, J'(phi)}
    (or of the supplied constraint fields); the minimum comes from the
    generalized symmetric eigenproblem against the H1 Gram matrix.
    """
    grid = base.grid
    n = grid.N
    if n > DENSE_CAP:
        raise EigenFailure(
            f"coercivity_constant requires a dense assembly (N <= {DENSE_CAP})")
    if constraints is None:
        constraints = (
            Field(grid, 1j * base.values),
            spectral_derivative(base, 1),
            apply_J_prime(base, params.sigma),
        )
    mat = assemble_operator(base, params)
    gram = _h1_gram(grid)
    cols = np.stack([field_to_real(f) / np.linalg.norm(field_to_real(f))
                     for f in constraints], axis=1)
    q, _ = np.linalg.qr(cols, mode="complete")
    null = q[:, cols.shape[1]:]
    a_proj = null.T @ mat @ null
    b_proj = null.T @ gram @ null
    try:
        vals = eigh(a_proj, b_proj, subset_by_index=[0, 0], eigvals_only=True)
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise EigenFailure(str(exc)) from exc
    return float(vals[0])


def self_adjointness_defect(base: Field, params: SolitonParams,
                            f: Field, g: Field) -> float:
    """|<Hf, g> - <f, Hg>| / (||f|| ||g||) for one pair of fields."""
    hf = apply_S_double_prime(f, base, params)
    hg = apply_S_double_prime(g, base, params)
    return abs(inner(hf, g) - inner(f, hg)) / (l2_norm(f) * l2_norm(g))
