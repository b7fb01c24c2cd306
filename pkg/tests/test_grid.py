import numpy as np
import pytest
import warnings
from hypothesis import given, settings, strategies as st

from frnse.grid import (Field, GridSpec, boundary_decay, from_spectral,
                        gaussian_field, h1_norm, inner, l2_norm, laplacian,
                        lp_norm, make_grid, norm, random_band_limited,
                        scaled_gaussian, to_spectral, zero_field)


def test_spec_validation():
    with pytest.raises(ValueError):
        GridSpec(1, 1.6)
    with pytest.raises(ValueError):
        GridSpec(8, -1.0)
    with pytest.raises(ValueError):
        GridSpec(8.5, 1.0)
    s = GridSpec(16, 1.6)
    assert s.h == pytest.approx(0.1)
    assert s.volume == pytest.approx(1.6**3)


def test_grid_wavenumbers(gspec16):
    g = make_grid(gspec16)
    # first positive mode is 2 pi / L
    assert g.k[1] == pytest.approx(2.0 * np.pi / 1.6)
    assert g.ksq.shape == (16, 16, 16)
    assert g.ksq[0, 0, 0] == 0.0


def test_field_shape_and_ops(gspec8, rng):
    flat = rng.standard_normal(8**3) + 1j * rng.standard_normal(8**3)
    f = Field(gspec8, flat)
    assert f.values.shape == (8, 8, 8)
    g = Field(gspec8, rng.standard_normal((8, 8, 8)))
    s = f + g - g
    assert np.allclose(s.values, f.values, atol=1e-14)
    assert np.allclose((2.0 * f).values, (f * 2.0).values)
    with pytest.raises(ValueError):
        Field(gspec8, np.zeros((4, 4, 4)))
    with pytest.raises(ValueError):
        f + Field(GridSpec(8, 2.0), np.zeros((8, 8, 8)))
    assert not f.values.flags.writeable


def test_spectral_round_trip(gspec16, rng):
    f = random_band_limited(gspec16, rng)
    back = from_spectral(gspec16, to_spectral(f))
    assert np.max(np.abs(back.values - f.values)) < 1e-13


def test_plane_wave_norms(gspec16):
    # e^{ik.x} with k = 2pi/L * (1,2,0): L2 norm sqrt(V), H1 = sqrt(V(1+k^2))
    g = make_grid(gspec16)
    xg, yg, zg = np.meshgrid(g.x, g.x, g.x, indexing="ij")
    k = 2.0 * np.pi / 1.6 * np.array([1.0, 2.0, 0.0])
    pw = Field(gspec16, np.exp(1j * (k[0] * xg + k[1] * yg + k[2] * zg)))
    V = gspec16.volume
    ksq = float(k @ k)
    assert l2_norm(pw) == pytest.approx(np.sqrt(V), rel=1e-12)
    assert h1_norm(pw) == pytest.approx(np.sqrt(V * (1.0 + ksq)), rel=1e-12)
    lap = laplacian(pw)
    assert np.max(np.abs(lap.values + ksq * pw.values)) < 1e-9


def test_parseval(gspec16, rng):
    # quadrature L2 norm equals the spectral H1 norm with the (1+k^2) weight
    # dropped; cross-checks the normalization of to_spectral
    f = random_band_limited(gspec16, rng)
    coeffs = to_spectral(f)
    spectral = np.sqrt(gspec16.volume * np.sum(np.abs(coeffs) ** 2))
    quadrature = np.sqrt(gspec16.h**3 * np.sum(np.abs(f.values) ** 2))
    assert spectral == pytest.approx(quadrature, rel=1e-12)
    assert l2_norm(f) == pytest.approx(quadrature, rel=1e-12)


def test_norm_dispatch(gspec8, rng):
    f = random_band_limited(gspec8, rng)
    assert norm(f) == l2_norm(f)
    assert norm(f, "H1") == h1_norm(f)
    assert norm(f, "Lp", p=2.0) == pytest.approx(l2_norm(f), rel=1e-12)
    with pytest.raises(ValueError):
        norm(f, "Lp", p=0.5)
    with pytest.raises(ValueError):
        norm(f, "L3")


@settings(max_examples=25, deadline=None)
@given(st.floats(min_value=-3.0, max_value=3.0, allow_nan=False),
       st.floats(min_value=-3.0, max_value=3.0, allow_nan=False))
def test_norm_scaling(re, im):
    spec = GridSpec(8, 1.6)
    rng = np.random.default_rng(7)
    f = random_band_limited(spec, rng)
    c = complex(re, im)
    for nrm in (l2_norm, h1_norm, lambda x: lp_norm(x, 3.0)):
        assert nrm(c * f) == pytest.approx(abs(c) * nrm(f), rel=1e-10, abs=1e-12)


def test_inner_product(gspec8, rng):
    f = random_band_limited(gspec8, rng)
    g = random_band_limited(gspec8, rng)
    ip = inner(f, g)
    assert inner(g, f) == pytest.approx(np.conj(ip), rel=1e-12)
    assert inner(f, f).real == pytest.approx(l2_norm(f) ** 2, rel=1e-12)
    # conjugate-linear in the first slot
    assert inner(1j * f, g) == pytest.approx(-1j * ip, rel=1e-12)


def test_band_limited_band(gspec16, rng):
    f = random_band_limited(gspec16, rng, band_fraction=0.5)
    coeffs = to_spectral(f)
    m = np.fft.fftfreq(16, d=1.0 / 16)  # integer mode numbers
    outside = np.abs(m) > 0.5 * 16 / 2
    mask = outside[:, None, None] | outside[None, :, None] | outside[None, None, :]
    assert np.max(np.abs(coeffs[mask])) < 1e-15
    assert l2_norm(f) > 0


def test_gaussian_field(gspec32):
    f = gaussian_field(gspec32, 0.12)
    assert float(np.max(np.abs(f.values))) == pytest.approx(1.0)
    assert boundary_decay(f) < 1e-8
    with pytest.raises(ValueError):
        gaussian_field(gspec32, -0.1)


def test_scaled_gaussian_targets(gspec32):
    f = scaled_gaussian(gspec32, 0.12, l2_target=1.0)
    assert l2_norm(f) == pytest.approx(1.0, rel=1e-12)
    g = scaled_gaussian(gspec32, 0.12, h1_target=0.5)
    assert h1_norm(g) == pytest.approx(0.5, rel=1e-12)
    with pytest.raises(ValueError):
        scaled_gaussian(gspec32, 0.12, l2_target=1.0, h1_target=1.0)


def test_scaled_gaussian_warns_when_cramped():
    spec = GridSpec(16, 1.6)
    with pytest.warns(UserWarning):
        scaled_gaussian(spec, 0.3, l2_target=1.0)


def test_zero_field(gspec8):
    z = zero_field(gspec8)
    assert l2_norm(z) == 0.0
    assert z.is_finite()


def test_min_image_center(gspec32):
    # a bump centered at the box corner wraps around: all eight corners high
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        f = gaussian_field(gspec32, 0.12, center=(0.0, 0.0, 0.0))
    v = np.abs(f.values)
    assert v[0, 0, 0] == pytest.approx(1.0)
    assert v[-1, -1, -1] > 0.5  # one grid step away across the seam
