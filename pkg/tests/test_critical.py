"""Threshold root, closed forms, Hessian degeneracy, and critical constants."""

import numpy as np
import pytest

from gdnls import (NotDegenerate, SolitonParams, action_hessian,
                   appendix_scalars, classify_speed, conserved_set,
                   critical_params, critical_speed_ratio, default_grid,
                   eigen_direction, family_tangent_field, inner, l2_norm,
                   mass_momentum_closed_form, soliton_field,
                   threshold_function)
from gdnls.numerics import Field, directional_second_derivative

# Frozen by an independent bisection oracle: scipy.integrate.quad at
# epsabs=1e-13 feeding scipy.optimize.brentq at xtol=1e-14 on the same
# displayed integrals.
Z0_ORACLE = {
    1.2: 0.718148207267,
    1.5: 0.061830263243,
    1.8: -0.589820887255,
}


class TestThresholdFunction:
    def test_sign_near_dnls_limit(self):
        assert threshold_function(1.0 + 1e-6, 0.0) < 0

    def test_dnls_value_at_zero(self):
        # first bracket vanishes at sigma=1; second is (int sech^2 * (-1))^2 = 1
        assert threshold_function(1.0, 0.0) == pytest.approx(-1.0, abs=1e-10)

    def test_continuous_scan_no_nan(self):
        zs = np.linspace(-0.99, 0.99, 199)
        vals = np.array([threshold_function(1.5, z, 1e-10) for z in zs])
        assert np.all(np.isfinite(vals))


class TestCriticalSpeedRatio:
    @pytest.mark.parametrize("sigma", [1.2, 1.5, 1.8])
    def test_matches_independent_oracle(self, sigma):
        assert critical_speed_ratio(sigma) == pytest.approx(
            Z0_ORACLE[sigma], abs=1e-9)

    @pytest.mark.parametrize("sigma", [1.2, 1.8])
    def test_root_in_open_interval(self, sigma):
        z0 = critical_speed_ratio(sigma)
        assert -1.0 < z0 < 1.0

    def test_residual_small(self):
        z0 = critical_speed_ratio(1.5)
        assert abs(threshold_function(1.5, z0)) <= 1e-10

    def test_determinant_vanishes_at_root(self, crit15):
        p = SolitonParams(1.5, 1.0, crit15.c_crit)
        h = action_hessian(p)
        det = float(np.linalg.det(h))
        scale = abs(h[0, 0] * h[1, 1])
        assert abs(det) <= 1e-4 * scale

    def test_determinant_sign_change_across_root(self, crit15):
        eps = 0.05
        h_lo = action_hessian(SolitonParams(1.5, 1.0, crit15.c_crit - eps))
        h_hi = action_hessian(SolitonParams(1.5, 1.0, crit15.c_crit + eps))
        assert np.linalg.det(h_lo) * np.linalg.det(h_hi) < 0

    def test_classification(self, crit15):
        assert classify_speed(SolitonParams(1.5, 1.0, 0.0)) == "stable"
        assert classify_speed(SolitonParams(1.5, 1.0, crit15.c_crit)) == "critical"
        assert classify_speed(SolitonParams(1.5, 1.0, 1.0)) == "unstable"


class TestAppendixScalars:
    def test_dnls_values(self):
        p = SolitonParams(1.0, 1.0, 0.0)
        sc = appendix_scalars(p)
        assert sc.kappa == pytest.approx(2.0)
        assert sc.f == pytest.approx(4.0)
        # alpha_0 = int_0^inf sech(2x) dx = pi/4
        assert sc.alpha[0] == pytest.approx(np.pi / 4, abs=1e-11)

    def test_mass_from_scalars_matches_grid(self):
        p = SolitonParams(1.0, 1.0, 0.0)
        sc = appendix_scalars(p)
        grid = default_grid(p, 2048)
        m_grid = conserved_set(soliton_field(p, grid), p.sigma).M
        assert sc.f ** (1.0 / p.sigma) * sc.alpha[0] == pytest.approx(
            m_grid, rel=1e-8)

    def test_positivity(self):
        sc = appendix_scalars(SolitonParams(1.7, 0.8, -0.9))
        assert sc.kappa > 0 and sc.kappa_tilde > 0 and sc.f > 0
        assert np.all(sc.alpha > 0)


class TestClosedFormMassMomentum:
    @pytest.mark.parametrize("sigma", [1.2, 1.5, 1.8])
    @pytest.mark.parametrize("omega", [0.5, 1.0, 2.0])
    @pytest.mark.parametrize("frac", [-0.5, 0.0, 0.5])
    def test_agrees_with_grid_quadrature(self, sigma, omega, frac):
        p = SolitonParams(sigma, omega, frac * 2.0 * np.sqrt(omega))
        m_cf, p_cf = mass_momentum_closed_form(p)
        grid = default_grid(p, 2048)
        cs = conserved_set(soliton_field(p, grid), sigma)
        assert m_cf == pytest.approx(cs.M, rel=1e-8)
        assert p_cf == pytest.approx(cs.P, rel=1e-8)

    def test_zero_speed_momentum_positive(self):
        p = SolitonParams(1.5, 1.0, 0.0)
        sc = appendix_scalars(p)
        _, mom = mass_momentum_closed_form(p)
        expected = sc.f ** (1 / p.sigma) * sc.kappa**2 * sc.alpha[1] / (4 * np.sqrt(p.omega))
        assert mom == pytest.approx(expected, rel=1e-12)
        assert mom > 0

    @pytest.mark.parametrize("sigma", [1.2, 1.5, 1.8])
    def test_momentum_mass_ratio_at_critical(self, sigma):
        p = critical_params(sigma, 1.0)
        m, mom = mass_momentum_closed_form(p)
        assert mom == pytest.approx(p.a0 * m, rel=1e-7)


class TestHessian:
    def test_cross_derivative_symmetry(self):
        p = SolitonParams(1.5, 1.0, 0.5)
        h = action_hessian(p)
        assert h[0, 1] == pytest.approx(h[1, 0], rel=1e-12)
        # independent check of d_c P = omega * d_omega M
        assert h[1, 1] == pytest.approx(p.omega * h[0, 0], rel=1e-6)

    def test_nondegenerate_at_stable_speed(self):
        with pytest.raises(NotDegenerate):
            eigen_direction(SolitonParams(1.5, 1.0, 0.5))


class TestEigenDirection:
    def test_ratio_is_sqrt_omega(self, crit15):
        d = eigen_direction(SolitonParams(1.5, 1.0, crit15.c_crit))
        assert d.mu / d.nu == pytest.approx(np.sqrt(1.0), abs=1e-5)

    def test_transposed_system_residual(self, crit15):
        p = SolitonParams(1.5, 1.0, crit15.c_crit)
        d = eigen_direction(p)
        h = action_hessian(p)
        # transposed null system uses the symmetric partner entries
        r1 = d.mu * h[0, 0] + d.nu * h[1, 0]
        r2 = d.mu * h[0, 1] + d.nu * h[1, 1]
        scale = np.abs(h).max() * max(abs(d.mu), 1.0)
        assert abs(r1) <= 1e-6 * scale
        assert abs(r2) <= 1e-6 * scale

    def test_omega_scaling_doubles_ratio(self):
        d1 = eigen_direction(critical_params(1.5, 1.0))
        d4 = eigen_direction(critical_params(1.5, 4.0))
        assert d4.mu / d4.nu == pytest.approx(2.0 * d1.mu / d1.nu, rel=1e-5)


@pytest.fixture(scope="module")
def tangent_setup(crit15):
    p = SolitonParams(1.5, 1.0, crit15.c_crit)
    grid = default_grid(p, 2048)
    phi = soliton_field(p, grid)
    d = eigen_direction(p)
    psi = family_tangent_field(p, grid, d)
    return p, grid, phi, d, psi


class TestFamilyTangent:
    def test_mass_gradient_orthogonal(self, tangent_setup):
        p, grid, phi, d, psi = tangent_setup
        tol = 1e-6 * l2_norm(phi) * l2_norm(psi)
        assert abs(inner(phi, psi)) <= tol

    def test_momentum_gradient_orthogonal(self, tangent_setup):
        from gdnls import spectral_derivative
        p, grid, phi, d, psi = tangent_setup
        p_grad = Field(grid, 1j * spectral_derivative(phi, 1).values)
        tol = 1e-6 * l2_norm(p_grad) * l2_norm(psi)
        assert abs(inner(p_grad, psi)) <= tol

    def test_aux_gradient_pairing(self, tangent_setup):
        from gdnls import apply_J_prime
        p, grid, phi, d, psi = tangent_setup
        cs = conserved_set(phi, p.sigma)
        lhs = inner(apply_J_prime(phi, p.sigma), psi)
        rhs = 4 * d.mu * cs.M + 2 * d.nu * cs.P
        assert rhs != 0
        assert lhs == pytest.approx(rhs, rel=1e-5)


class TestCriticalConstants:
    def test_positivity_and_agreement(self, crit15):
        assert crit15.kappa0 > 0
        assert crit15.b1 > 0
        assert crit15.b2 > 0
        rel = abs(crit15.kappa0_from_mass - crit15.kappa0_from_momentum) / abs(
            crit15.kappa0_from_momentum)
        assert rel <= 1e-3

    def test_momentum_direction_second_derivative_negative(self, crit15):
        # the momentum directional second derivative equals -kappa0*sqrt(omega)
        assert crit15.kappa0_from_momentum > 0
        p = critical_params(1.5, 1.0)
        gp = lambda om, c: mass_momentum_closed_form(SolitonParams(1.5, om, c))[1]
        d2p = directional_second_derivative(gp, (1.0, crit15.c_crit),
                                            (crit15.mu, crit15.nu)).value
        assert d2p < 0

    def test_b1_matches_direct_lambda_second_derivative(self, crit15):
        # b1 = (1/(2s+2)) d^2/dlam^2 [-sqrt(w) ||phi_lam||_{2s+2}^{2s+2}
        #                              + (s-1) J(phi_lam)] at lam = 0
        sig, om = 1.5, 1.0
        p = critical_params(sig, om)
        mu, nu = crit15.mu, crit15.nu

        def combo(lam):
            q = SolitonParams(sig, om + lam * mu, p.c + lam * nu)
            grid = default_grid(q, 2048)
            phi = soliton_field(q, grid)
            from gdnls import lp_power_norm
            cs = conserved_set(phi, sig)
            return (-np.sqrt(om) * lp_power_norm(phi, sig)
                    + (sig - 1.0) * cs.J) / (2.0 * sig + 2.0)

        h = 1e-2
        d2 = (combo(h) - 2 * combo(0.0) + combo(-h)) / h**2
        d2_fine = (combo(h / 2) - 2 * combo(0.0) + combo(-h / 2)) / (h / 2) ** 2
        richardson = (4 * d2_fine - d2) / 3
        assert richardson == pytest.approx(crit15.b1, rel=1e-3)

    def test_implicit_root_scaling_in_omega(self, crit15):
        # recomputing the degenerate speed from det = 0 at other omega gives
        # the same z0 = c/(2 sqrt(omega))
        from scipy.optimize import brentq
        for om in (0.5, 2.0):
            det = lambda c: float(np.linalg.det(
                action_hessian(SolitonParams(1.5, om, c))))
            guess = 2.0 * crit15.z0 * np.sqrt(om)
            lo, hi = guess - 0.2 * np.sqrt(om), guess + 0.2 * np.sqrt(om)
            c_root = brentq(det, lo, hi, xtol=1e-10)
            assert c_root / (2.0 * np.sqrt(om)) == pytest.approx(
                crit15.z0, abs=1e-5)


class TestDeterminantScanUniqueness:
    def test_single_sign_change(self):
        sigma, omega = 1.5, 1.0
        cmax = 2.0 * np.sqrt(omega)
        cs = np.linspace(-0.95 * cmax, 0.95 * cmax, 101)
        dets = np.array([
            float(np.linalg.det(action_hessian(SolitonParams(sigma, omega, c))))
            for c in cs])
        flips = int(np.sum(dets[:-1] * dets[1:] < 0))
        assert flips == 1
