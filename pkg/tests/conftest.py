"""Shared fixtures: canonical parameter points, cached solitons, and the
session-scoped instability runs that the acceptance criteria share."""

import numpy as np
import pytest

from gdnls import (SolitonParams, critical_constants, default_grid,
                   soliton_field)

CANONICAL = (1.5, 1.0, 0.5)

# 3x3x3 acceptance sweep: sigma, omega, c/(2 sqrt(omega))
SWEEP_SIGMAS = (1.2, 1.5, 1.8)
SWEEP_OMEGAS = (0.5, 1.0, 2.0)
SWEEP_FRACTIONS = (-0.5, 0.0, 0.5)


def sweep_points():
    for s in SWEEP_SIGMAS:
        for om in SWEEP_OMEGAS:
            for fr in SWEEP_FRACTIONS:
                yield SolitonParams(s, om, fr * 2.0 * np.sqrt(om))


@pytest.fixture(scope="session")
def canonical_params():
    return SolitonParams(*CANONICAL)


@pytest.fixture(scope="session")
def canonical_grid(canonical_params):
    return default_grid(canonical_params, n=2048)


@pytest.fixture(scope="session")
def canonical_phi(canonical_params, canonical_grid):
    return soliton_field(canonical_params, canonical_grid)


@pytest.fixture(scope="session")
def fine_grid(canonical_params):
    return default_grid(canonical_params, n=4096)


@pytest.fixture(scope="session")
def crit15():
    return critical_constants(1.5, 1.0)


@pytest.fixture(scope="session")
def crit12():
    return critical_constants(1.2, 1.0)


@pytest.fixture(scope="session")
def crit18():
    return critical_constants(1.8, 1.0)


def make_smooth_random(grid, rng, modes=24, scale=1.0):
    """Random band-limited complex field (the operator's natural domain)."""
    coeffs = np.zeros(grid.N, dtype=complex)
    idx = np.concatenate([np.arange(0, modes + 1), np.arange(-modes, 0)])
    coeffs[idx] = rng.standard_normal(len(idx)) + 1j * rng.standard_normal(len(idx))
    from gdnls.numerics import Field
    vals = np.fft.ifft(coeffs) * grid.N / np.sqrt(2 * modes + 1)
    return Field(grid, scale * vals)
