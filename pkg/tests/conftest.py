"""Shared fixtures and independent oracles for the test suite."""

import numpy as np
import pytest

from frnse.grid import GridSpec
from frnse.kernel import KernelSpec, default_radius


def box_integral(X, Y, Z):
    """Closed form of the integral of 1/|x| over the box [0,X]x[0,Y]x[0,Z].

    Standard antiderivative (each term is elementary); used as an oracle for
    the near-field cell weights, independent of any quadrature in the
    package.
    """
    r = np.sqrt(X * X + Y * Y + Z * Z)
    return (
        X * Y * np.log((Z + r) / np.hypot(X, Y))
        + Y * Z * np.log((X + r) / np.hypot(Y, Z))
        + Z * X * np.log((Y + r) / np.hypot(Z, X))
        - X * X / 2.0 * np.arctan(Y * Z / (X * r))
        - Y * Y / 2.0 * np.arctan(Z * X / (Y * r))
        - Z * Z / 2.0 * np.arctan(X * Y / (Z * r))
    )


def unit_cube_average():
    """Average of 1/|x| over the unit cube centered at the origin."""
    return 8.0 * box_integral(0.5, 0.5, 0.5)


def radial_multiplier_oracle(k, r_lo, r_hi, samples=200001):
    """Numeric integral of e^{-ik.x}/|x| over the shell r_lo < |x| <= r_hi.

    Uses the radial reduction int = (4 pi / k) * int_{r_lo}^{r_hi} sin(kr) dr
    evaluated by composite trapezoid on a fine grid — deliberately naive and
    independent of the closed forms in the package.
    """
    r = np.linspace(r_lo, r_hi, samples)
    if k == 0.0:
        return float(np.trapezoid(4.0 * np.pi * r, r))
    vals = 4.0 * np.pi * np.sin(k * r) / k
    return float(np.trapezoid(vals, r))


@pytest.fixture
def gspec8():
    return GridSpec(8, 1.6)


@pytest.fixture
def gspec16():
    return GridSpec(16, 1.6)


@pytest.fixture
def gspec32():
    return GridSpec(32, 1.6)


@pytest.fixture
def kfull():
    return KernelSpec("full", R=default_radius(1.6))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
