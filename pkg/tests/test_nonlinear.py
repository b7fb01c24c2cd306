import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from frnse.grid import (GridSpec, inner, l2_norm, laplacian,
                        random_band_limited)
from frnse.kernel import KernelSpec, apply_kernel, default_radius
from frnse.nonlinear import (PhysParams, ball_field, big_g1, density, g1, g2,
                             lipschitz_growth, lipschitz_probe,
                             nonlinear_part, potential, rhs)

R16 = default_radius(1.6)


def test_params_validation():
    with pytest.raises(ValueError):
        PhysParams(0.0, 1.0)
    with pytest.raises(ValueError):
        PhysParams(1.0, -0.5)
    assert PhysParams(1.0, 0.0).free().alpha2 == 0.0


def test_density_and_terms(gspec8, rng, kfull):
    psi = random_band_limited(gspec8, rng)
    rho = density(psi)
    assert np.allclose(rho.values, np.abs(psi.values) ** 2)
    pot = potential(psi, kfull)
    assert np.array_equal(g1(psi, kfull).values, psi.values * pot.values)
    G1 = big_g1(psi, kfull)
    # the direct quadrature, no clamp
    direct = gspec8.h**3 * float(np.sum(rho.values.real * pot.values.real))
    assert G1 == pytest.approx(direct, rel=1e-12)
    assert G1 >= 0.0
    assert np.array_equal(g2(psi, kfull).values, G1 * psi.values)


def test_nonlinear_part_shortcuts(gspec8, rng, kfull):
    psi = random_band_limited(gspec8, rng)
    # alpha2 = 0: exactly zero
    z = nonlinear_part(psi, PhysParams(1.0, 0.0), kfull)
    assert not np.any(z.values)
    # otherwise alpha2 * (g1 - g2) with one kernel application
    n = nonlinear_part(psi, PhysParams(1.0, 2.0), kfull)
    ref = 2.0 * (g1(psi, kfull).values - g2(psi, kfull).values)
    assert np.allclose(n.values, ref, rtol=1e-13, atol=1e-16)


def test_rhs_free_case(gspec8, rng, kfull):
    psi = random_band_limited(gspec8, rng)
    free = rhs(psi, PhysParams(0.7, 0.0), kfull)
    assert np.allclose(free.values, 0.7j * laplacian(psi).values,
                       rtol=1e-13, atol=1e-16)


@settings(max_examples=20, deadline=None)
@given(st.floats(min_value=0.1, max_value=3.0),
       st.floats(min_value=0.0, max_value=2 * np.pi))
def test_homogeneity(mag, phase):
    # |c psi|^2 = |c|^2 |psi|^2 makes the three terms homogeneous of exact
    # degree 3 (g1), 4 (G1), and 5 (g2) — grid identities, not asymptotics
    spec = GridSpec(8, 1.6)
    kspec = KernelSpec("full", R=R16)
    psi = random_band_limited(spec, np.random.default_rng(42))
    c = mag * np.exp(1j * phase)
    scaled = c * psi
    assert l2_norm(g1(scaled, kspec)) == pytest.approx(
        mag**3 * l2_norm(g1(psi, kspec)), rel=1e-10)
    assert big_g1(scaled, kspec) == pytest.approx(
        mag**4 * big_g1(psi, kspec), rel=1e-10)
    assert l2_norm(g2(scaled, kspec)) == pytest.approx(
        mag**5 * l2_norm(g2(psi, kspec)), rel=1e-10)


def test_balance_identity(gspec8, rng, kfull):
    # Re <psi, rhs(psi)> = alpha2 G1 (1 - ||psi||^2): the linear part is
    # skew-adjoint and g1 contributes exactly G1
    psi = random_band_limited(gspec8, rng)
    params = PhysParams(1.3, 0.8)
    val = inner(psi, rhs(psi, params, kfull)).real
    expected = 0.8 * big_g1(psi, kfull) * (1.0 - l2_norm(psi) ** 2)
    scale = max(abs(expected), 1.0)
    assert abs(val - expected) < 1e-11 * scale


def test_truncated_g1_dominated(gspec16, rng):
    # the inner-kernel term is pointwise dominated by the full one for any
    # nonnegative density (dropping a nonnegative kernel piece only shrinks)
    psi = random_band_limited(gspec16, rng)
    full = np.abs(g1(psi, KernelSpec("full", R=R16)).values)
    trunc = np.abs(g1(psi, KernelSpec("inner", R=R16, a=0.3)).values)
    assert float(np.max(trunc - full)) <= 1e-12 * float(np.max(full))


def test_ball_field_is_linear_in_M(gspec8):
    f1 = ball_field(gspec8, np.random.default_rng(9), 1.0)
    f2 = ball_field(gspec8, np.random.default_rng(9), 2.0)
    assert np.allclose(f2.values, 2.0 * f1.values, rtol=1e-12, atol=1e-15)


def test_lipschitz_probe_exact_scaling(gspec8, kfull):
    # same seed => pairs at radius M are exactly M times the pairs at 1, so
    # the ratio scales by M^2 for g1 and M^4 for g2 — exact, not fitted
    r1 = lipschitz_probe("g1_in_L2", 1.0, pairs=6, seed=3, gspec=gspec8, kspec=kfull)
    r2 = lipschitz_probe("g1_in_L2", 2.0, pairs=6, seed=3, gspec=gspec8, kspec=kfull)
    assert r2.max_ratio == pytest.approx(4.0 * r1.max_ratio, rel=1e-9)
    q1 = lipschitz_probe("g2_in_L2", 1.0, pairs=6, seed=3, gspec=gspec8, kspec=kfull)
    q2 = lipschitz_probe("g2_in_L2", 2.0, pairs=6, seed=3, gspec=gspec8, kspec=kfull)
    assert q2.max_ratio == pytest.approx(16.0 * q1.max_ratio, rel=1e-9)


def test_lipschitz_growth_slopes(gspec8, kfull):
    reports, slope_g1 = lipschitz_growth("g1_in_L2", (0.5, 1.0, 2.0), pairs=5,
                                         seed=0, gspec=gspec8, kspec=kfull)
    assert slope_g1 == pytest.approx(2.0, abs=1e-8)
    assert all(np.isfinite(r.fit_slope) for r in reports)
    _, slope_g2 = lipschitz_growth("g2_in_L2", (0.5, 1.0, 2.0), pairs=5,
                                   seed=0, gspec=gspec8, kspec=kfull)
    assert slope_g2 == pytest.approx(4.0, abs=1e-8)


def test_probe_rejects_unknown():
    with pytest.raises(ValueError):
        lipschitz_probe("g3", 1.0, gspec=GridSpec(8, 1.6),
                        kspec=KernelSpec("full", R=R16))
