"""Numerical laboratory for solitary waves of the generalized derivative NLS
equation i u_t + u_xx + i |u|^{2 sigma} u_x = 0."""

__version__ = "0.1.0"

from .conserved import (ConservedSet, OrbitFit, action, conserved_set,
                        lp_power_norm, orbit_distance, q_functional)
from .critical import (AppendixScalars, CriticalData, EigenDirection,
                       action_hessian, appendix_scalars, classify_speed,
                       critical_constants, critical_params, critical_speed,
                       critical_speed_ratio, eigen_direction,
                       family_tangent_field, mass_momentum_closed_form,
                       threshold_function)
from .errors import (BlowupDetected, CutoffTooLarge, DomainViolation,
                     EigenFailure, GdnlsError, GridMismatch,
                     InsufficientSampling, Kappa0Mismatch, NewtonDiverged,
                     NoConvergence, NonFiniteInput, NoSignChange,
                     NotDegenerate, OutsideTube, RootNotUnique, StepTooLarge,
                     SymmetryViolation, TruncationTooSmall)
from .evolve import EvolveConfig, IntegrationResult, Stepper, integrate, step
from .linop import (apply_J_prime, apply_S_double_prime, apply_S_prime,
                    coercivity_constant, spectrum)
from .modulation import (ModulationState, Tracker, coupling_constant,
                         decompose, track)
from .numerics import (DerivativeResult, Field, Grid, QuadratureResult,
                       h1_norm, improper_integral, inner, l2_norm,
                       parameter_derivative, spectral_derivative, translate)
from .soliton import (SolitonParams, amplitude, default_grid,
                      elliptic_residual, perturbation_direction, phase,
                      phase_derivative, soliton_field)
from .virial import (CheckReport, Cutoff, a_functional,
                     a_functional_leading_coefficient, composite_bound,
                     default_radius, localized_mass, localized_momentum,
                     rate_decomposition_check, virial_composite,
                     virial_rate_check, virial_rate_samples)
