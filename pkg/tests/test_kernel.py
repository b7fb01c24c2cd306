import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import radial_multiplier_oracle, unit_cube_average
from frnse.grid import Field, GridSpec, l2_norm, random_band_limited
from frnse.kernel import (CUBE_AVG, KernelSpec, apply_kernel,
                          coulomb_multiplier, default_radius,
                          direct_convolution_oracle, kernel_table,
                          tail_norm_bound, tail_norm_estimate)

R16 = default_radius(1.6)


def test_spec_validation():
    with pytest.raises(ValueError):
        KernelSpec("full", R=R16, a=0.1)
    with pytest.raises(ValueError):
        KernelSpec("inner", R=R16)  # needs a
    with pytest.raises(ValueError):
        KernelSpec("tail", R=R16, a=R16 * 2)
    with pytest.raises(ValueError):
        KernelSpec("sideways", R=R16)
    with pytest.raises(ValueError):
        KernelSpec("full", R=-1.0)


def test_cube_average_constant():
    # closed-form box integral, fully independent of the package quadrature
    assert CUBE_AVG == pytest.approx(unit_cube_average(), rel=1e-14)


def test_multiplier_against_radial_quadrature():
    full = KernelSpec("full", R=2.8)
    inner = KernelSpec("inner", R=2.8, a=0.3)
    tail = KernelSpec("tail", R=2.8, a=0.3)
    for k in (0.4, 2.0, 9.0):
        assert coulomb_multiplier(full, np.array(k)) == pytest.approx(
            radial_multiplier_oracle(k, 0.0, 2.8), rel=1e-7)
        assert coulomb_multiplier(inner, np.array(k)) == pytest.approx(
            radial_multiplier_oracle(k, 0.3, 2.8), rel=1e-7)
        assert coulomb_multiplier(tail, np.array(k)) == pytest.approx(
            radial_multiplier_oracle(k, 0.0, 0.3), rel=1e-7)


def test_multiplier_k_zero_limits():
    full = KernelSpec("full", R=2.0)
    inner = KernelSpec("inner", R=2.0, a=0.5)
    tail = KernelSpec("tail", R=2.0, a=0.5)
    assert coulomb_multiplier(full, np.array(0.0)) == pytest.approx(2 * np.pi * 4.0)
    assert coulomb_multiplier(inner, np.array(0.0)) == pytest.approx(
        2 * np.pi * (4.0 - 0.25))
    assert coulomb_multiplier(tail, np.array(0.0)) == pytest.approx(2 * np.pi * 0.25)


@settings(max_examples=40, deadline=None)
@given(st.floats(min_value=1e-6, max_value=80.0))
def test_full_multiplier_nonnegative(k):
    # 4 pi (1 - cos kR)/k^2 >= 0 for every wavenumber
    spec = KernelSpec("full", R=2.8)
    assert coulomb_multiplier(spec, np.array(k)) >= 0.0


def test_table_additivity(gspec16):
    full = kernel_table(gspec16, KernelSpec("full", R=R16))
    inner = kernel_table(gspec16, KernelSpec("inner", R=R16, a=0.3))
    tail = kernel_table(gspec16, KernelSpec("tail", R=R16, a=0.3))
    assert np.array_equal(inner + tail, full)


def test_table_values(gspec16):
    # off-center entries are h^3/|d|; the center is the cube-averaged weight
    table = kernel_table(gspec16, KernelSpec("full", R=R16))
    h = gspec16.h
    assert table.shape == (32, 32, 32)
    assert table[0, 0, 0] == pytest.approx(CUBE_AVG * h * h)
    assert table[1, 0, 0] == pytest.approx(h**3 / h)
    assert table[3, 2, 1] == pytest.approx(h**3 / (h * np.sqrt(14.0)))
    # index 2n-1 is the -h displacement: the table is even in d
    assert table[31, 0, 0] == table[1, 0, 0]
    assert table[0, 31, 2] == table[0, 1, 2]


def test_radius_guard(gspec16):
    with pytest.raises(ValueError):
        kernel_table(gspec16, KernelSpec("full", R=1.0))


def test_tail_zero_dc_near_analytic(gspec16, gspec32):
    # DFT at k=0 of the tail table is its row sum, a staircase quadrature of
    # the integral 2 pi a^2; it converges to the analytic value but can land
    # on either side of it (lattice fluctuations), so assert proximity at a
    # resolution-dependent accuracy rather than domination
    for gspec, cap in ((gspec16, 0.2), (gspec32, 0.03)):
        for a in (0.3, 0.45):
            tab = kernel_table(gspec, KernelSpec("tail", R=R16, a=a))
            dc = float(np.sum(tab))
            assert abs(dc - tail_norm_bound(a)) <= cap * tail_norm_bound(a)


def test_sub_resolution_tail_vanishes(gspec16):
    # a below h/2: no cell center is inside the ball and the self-cell rule
    # assigns zero weight, so inner == full exactly
    a = gspec16.h / 4.0
    inner = kernel_table(gspec16, KernelSpec("inner", R=R16, a=a))
    full = kernel_table(gspec16, KernelSpec("full", R=R16))
    assert np.array_equal(inner, full)
    tail = kernel_table(gspec16, KernelSpec("tail", R=R16, a=a))
    assert not np.any(tail)


def test_apply_matches_direct_oracle(gspec8, rng):
    rho = np.abs(random_band_limited(gspec8, rng).values) ** 2
    dens = Field(gspec8, rho)
    for kspec in (KernelSpec("full", R=R16),
                  KernelSpec("inner", R=R16, a=0.4),
                  KernelSpec("tail", R=R16, a=0.4)):
        fast = apply_kernel(kspec, dens)
        slow = direct_convolution_oracle(kspec, dens)
        rel = l2_norm(fast - slow) / l2_norm(slow)
        assert rel < 1e-10


def test_apply_real_and_positive(gspec16, rng):
    rho = np.abs(random_band_limited(gspec16, rng).values) ** 2
    out = apply_kernel(KernelSpec("full", R=R16), Field(gspec16, rho))
    assert np.isrealobj(out.values) or np.max(np.abs(out.values.imag)) == 0.0
    # Newton potential of a nonnegative density is nonnegative
    assert float(np.min(out.values.real)) > -1e-12


def test_oracle_size_guard(gspec32, rng):
    dens = Field(gspec32, np.ones((32, 32, 32)))
    with pytest.raises(ValueError):
        direct_convolution_oracle(KernelSpec("full", R=R16), dens)


def test_tail_norm_estimate_below_bound(gspec32):
    # resolved radii only (a >= 2h); the power-iteration estimate must sit
    # under 2 pi a^2
    for a in (0.4, 0.2):
        est = tail_norm_estimate(gspec32, a, trials=8, seed=0, iters=120)
        assert est <= tail_norm_bound(a)
        assert est > 0.5 * tail_norm_bound(a)  # and not vacuously small


def test_tail_norm_estimate_warns_unresolved(gspec16):
    with pytest.warns(UserWarning):
        tail_norm_estimate(gspec16, gspec16.h / 2.0, trials=2, seed=0, iters=10)


def test_tail_norm_bound_validation():
    with pytest.raises(ValueError):
        tail_norm_bound(0.0)
    assert tail_norm_bound(0.3) == pytest.approx(2.0 * np.pi * 0.09)
