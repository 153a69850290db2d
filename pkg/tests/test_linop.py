"""Linearized-operator identities, spectrum structure, and coercivity."""

import numpy as np
import pytest

from gdnls import (SolitonParams, apply_J_prime, apply_S_double_prime,
                   apply_S_prime, coercivity_constant, conserved_set,
                   default_grid, h1_norm, inner, l2_norm,
                   soliton_field, spectral_derivative, spectrum)
from gdnls.linop import (kernel_correlation, negative_count,
                         self_adjointness_defect)
from gdnls.numerics import Field
from gdnls.soliton import stationary_equation_residual
from conftest import make_smooth_random


@pytest.fixture(scope="module")
def fine_setup(canonical_params):
    grid = default_grid(canonical_params, 4096)
    phi = soliton_field(canonical_params, grid)
    return canonical_params, grid, phi


@pytest.fixture(scope="module")
def critical_setup(crit15):
    from gdnls import eigen_direction, family_tangent_field
    p = SolitonParams(1.5, 1.0, crit15.c_crit)
    grid = default_grid(p, 2048)
    phi = soliton_field(p, grid)
    d = eigen_direction(p)
    psi = family_tangent_field(p, grid, d)
    return p, grid, phi, d, psi


class TestGradient:
    def test_soliton_is_zero(self, fine_setup):
        p, grid, phi = fine_setup
        assert l2_norm(apply_S_prime(phi, p)) <= 1e-8

    def test_matches_profile_residual_route(self, fine_setup):
        p, grid, phi = fine_setup
        a = apply_S_prime(phi, p)
        b = stationary_equation_residual(phi, p)
        np.testing.assert_allclose(a.values, b.values, atol=1e-14)

    def test_zero_field(self, fine_setup):
        p, grid, _ = fine_setup
        z = apply_S_prime(Field(grid, np.zeros(grid.N)), p)
        assert np.abs(z.values).max() == 0.0

    def test_linear_symbol_on_plane_wave(self, fine_setup):
        p, grid, _ = fine_setup
        k0 = np.pi / grid.L * 8
        u = Field(grid, np.exp(1j * k0 * grid.x))
        full = apply_S_prime(u, p)
        du = spectral_derivative(u, 1)
        nonlinear = Field(grid, -1j * np.abs(u.values) ** (2 * p.sigma) * du.values)
        linear = Field(grid, full.values - nonlinear.values)
        symbol = k0**2 + p.omega - p.c * k0
        np.testing.assert_allclose(linear.values, symbol * u.values, atol=1e-10)


class TestSecondVariation:
    def test_action_on_profile(self, fine_setup):
        p, grid, phi = fine_setup
        lhs = apply_S_double_prime(phi, phi, p)
        dphi = spectral_derivative(phi, 1)
        rhs = -2 * p.sigma * 1j * np.abs(phi.values) ** (2 * p.sigma) * dphi.values
        assert l2_norm(Field(grid, lhs.values - rhs)) <= 1e-7

    def test_action_on_rotated_derivative(self, fine_setup):
        p, grid, phi = fine_setup
        dphi = spectral_derivative(phi, 1)
        lhs = apply_S_double_prime(Field(grid, 1j * dphi.values), phi, p)
        rhs = -2 * p.sigma * p.omega * np.abs(phi.values) ** (2 * p.sigma) * phi.values
        assert l2_norm(Field(grid, lhs.values - rhs)) <= 1e-7

    def test_gauge_mode_in_kernel(self, fine_setup):
        p, grid, phi = fine_setup
        out = apply_S_double_prime(Field(grid, 1j * phi.values), phi, p)
        assert l2_norm(out) <= 1e-7 * l2_norm(phi)

    def test_finite_difference_consistency(self, fine_setup):
        p, grid, phi = fine_setup
        rng = np.random.default_rng(5)
        f = make_smooth_random(grid, rng)
        errs = []
        for h in (1e-2, 1e-3):
            plus = Field(grid, phi.values + h * f.values)
            minus = Field(grid, phi.values - h * f.values)
            fd = Field(grid, (apply_S_prime(plus, p).values
                              - apply_S_prime(minus, p).values) / (2 * h))
            errs.append(l2_norm(Field(grid, fd.values
                                      - apply_S_double_prime(f, phi, p).values)))
        assert errs[0] / errs[1] == pytest.approx(100.0, rel=0.3)

    def test_self_adjointness_random_pairs(self, canonical_params,
                                           canonical_grid, canonical_phi):
        rng = np.random.default_rng(42)
        worst = 0.0
        for _ in range(20):
            f = make_smooth_random(canonical_grid, rng)
            g = make_smooth_random(canonical_grid, rng)
            worst = max(worst, self_adjointness_defect(
                canonical_phi, canonical_params, f, g))
        assert worst <= 1e-8


class TestAuxGradient:
    def test_zero(self, canonical_grid):
        out = apply_J_prime(Field(canonical_grid, np.zeros(canonical_grid.N)), 1.5)
        assert np.abs(out.values).max() == 0.0

    def test_relation_to_second_variation(self, fine_setup):
        p, grid, phi = fine_setup
        jp = apply_J_prime(phi, p.sigma)
        s2 = apply_S_double_prime(phi, phi, p)
        combo = Field(grid, jp.values + (p.sigma + 1) / p.sigma * s2.values)
        assert l2_norm(combo) <= 1e-7

    def test_gradient_against_functional_difference(self, canonical_params,
                                                    canonical_grid,
                                                    canonical_phi):
        rng = np.random.default_rng(9)
        v = make_smooth_random(canonical_grid, rng)
        sig = canonical_params.sigma

        def j_of(u):
            return conserved_set(u, sig).J

        errs = []
        for h in (1e-3, 1e-4):
            plus = Field(canonical_grid, canonical_phi.values + h * v.values)
            minus = Field(canonical_grid, canonical_phi.values - h * v.values)
            fd = (j_of(plus) - j_of(minus)) / (2 * h)
            errs.append(abs(fd - inner(apply_J_prime(canonical_phi, sig), v)))
        assert errs[1] <= errs[0] / 50  # O(h^2)


@pytest.fixture(scope="module")
def spec_result(canonical_params):
    grid = default_grid(canonical_params, 1024)
    phi = soliton_field(canonical_params, grid)
    evals, efields = spectrum(phi, canonical_params, k=8)
    return canonical_params, grid, phi, evals, efields


@pytest.fixture(scope="module")
def coercivity_setup(crit15):
    p = SolitonParams(1.5, 1.0, crit15.c_crit)
    grid = default_grid(p, 1024)
    phi = soliton_field(p, grid)
    return p, grid, phi


class TestSpectrum:
    def test_exactly_one_negative(self, spec_result):
        _, _, _, evals, _ = spec_result
        assert negative_count(evals, scale_tol=1e-6) == 1

    def test_two_near_zero_modes_match_symmetries(self, spec_result):
        p, grid, phi, evals, efields = spec_result
        corr = kernel_correlation(
            evals, efields,
            [Field(grid, 1j * phi.values), spectral_derivative(phi, 1)])
        assert min(corr) > 0.999

    def test_degenerate_direction_rayleigh_quotient(self, critical_setup):
        p, grid, phi, d, psi = critical_setup
        q = inner(apply_S_double_prime(psi, phi, p), psi)
        assert abs(q) <= 1e-6 * h1_norm(psi) ** 2

    def test_tangent_maps_to_minus_q_gradient(self, critical_setup):
        p, grid, phi, d, psi = critical_setup
        lhs = apply_S_double_prime(psi, phi, p)
        dphi = spectral_derivative(phi, 1)
        rhs = -(d.mu * phi.values + d.nu * 1j * dphi.values)
        assert l2_norm(Field(grid, lhs.values - rhs)) <= 1e-5


class TestModulationJacobianIdentity:
    def test_determinant_formula(self, critical_setup):
        p, grid, phi, d, psi = critical_setup
        cs = conserved_set(phi, p.sigma)
        dphi = spectral_derivative(phi, 1)
        jp = apply_J_prime(phi, p.sigma)
        iphi = Field(grid, 1j * phi.values)
        m = np.array([
            [-2 * cs.M, -2 * cs.P, -inner(psi, iphi)],
            [2 * cs.P, p.omega * 2 * cs.M, -inner(psi, dphi)],
            [0.0, 0.0, -inner(jp, psi)],
        ])
        # rows use ||phi||^2 = 2M and ||phi_x||^2 = 2 omega M
        det = float(np.linalg.det(m))
        expected = (4 * p.sigma * (2 - p.sigma) * p.omega * cs.M**2
                    * inner(jp, psi))
        assert det == pytest.approx(expected, rel=1e-5)


class TestCoercivity:
    def test_positive_at_critical(self, coercivity_setup):
        p, grid, phi = coercivity_setup
        val = coercivity_constant(phi, p)
        assert val > 0

    def test_negative_without_aux_constraint(self, coercivity_setup):
        p, grid, phi = coercivity_setup
        constraints = (Field(grid, 1j * phi.values), spectral_derivative(phi, 1))
        val = coercivity_constant(phi, p, constraints=constraints)
        assert val <= 0

    def test_invariant_under_constraint_rescaling(self, coercivity_setup):
        p, grid, phi = coercivity_setup
        base = (Field(grid, 1j * phi.values), spectral_derivative(phi, 1),
                apply_J_prime(phi, p.sigma))
        scaled = tuple(Field(grid, c * f.values)
                       for c, f in zip((2.0, -0.3, 17.0), base))
        v1 = coercivity_constant(phi, p, constraints=base)
        v2 = coercivity_constant(phi, p, constraints=scaled)
        assert v1 == pytest.approx(v2, abs=1e-10)
