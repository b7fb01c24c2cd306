"""Periodic-box discretization: coordinates, wavenumbers, transforms, norms.

Transform convention, fixed project-wide: ``to_spectral`` returns coefficients
F such that f(x) = sum_k F(k) exp(i k.x); the inverse carries the n^3 factor,
so ``from_spectral(spec, to_spectral(f))`` recovers f up to round-off.
Quadrature is the trapezoid rule on the periodic grid, i.e. h^3 times the sum
of sample values, which makes Parseval exact up to round-off.
"""

import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic box: n points per axis, edge length L."""

    n: int
    L: float

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or isinstance(self.n, bool):
            raise ValueError(f"n must be an integer, got {self.n!r}")
        if self.n < 2:
            raise ValueError(f"n must be >= 2, got {self.n}")
        if not np.isfinite(self.L) or self.L <= 0:
            raise ValueError(f"L must be positive and finite, got {self.L}")
        object.__setattr__(self, "L", float(self.L))

    @property
    def h(self):
        return self.L / self.n

    @property
    def volume(self):
        return self.L**3


class Grid:
    """Coordinate and wavenumber tables for a GridSpec (built by make_grid)."""

    def __init__(self, spec):
        self.spec = spec
        n, L = spec.n, spec.L
        self.h = spec.h
        self.volume = spec.volume
        self.x = np.arange(n) * self.h
        # wavenumbers (2*pi/L)*m with m in {0,..,n/2-1, -n/2,..,-1}
        self.k = 2.0 * np.pi * np.fft.fftfreq(n, d=self.h)
        kx, ky, kz = np.meshgrid(self.k, self.k, self.k, indexing="ij")
        self.ksq = kx**2 + ky**2 + kz**2
        self.ksq.setflags(write=False)


@lru_cache(maxsize=32)
def make_grid(spec):
    """Return the (cached) Grid for a GridSpec."""
    return Grid(spec)


@dataclass(frozen=True)
class Field:
    """Complex samples on a periodic grid.

    Values are stored as an (n, n, n) C-ordered array; the flat index
    convention is idx = (ix*n + iy)*n + iz, i.e. exactly ``values.ravel()``.
    Fields are immutable after construction; arithmetic returns new fields.
    """

    spec: GridSpec
    values: np.ndarray

    def __post_init__(self):
        n = self.spec.n
        v = np.asarray(self.values, dtype=np.complex128)
        if v.shape == (n * n * n,):
            v = v.reshape(n, n, n)
        if v.shape != (n, n, n):
            raise ValueError(f"values shape {v.shape} incompatible with n={n}")
        v = np.ascontiguousarray(v)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    # -- convenience arithmetic -------------------------------------------
    def _check(self, other):
        if self.spec != other.spec:
            raise ValueError("grid mismatch")

    def __add__(self, other):
        self._check(other)
        return Field(self.spec, self.values + other.values)

    def __sub__(self, other):
        self._check(other)
        return Field(self.spec, self.values - other.values)

    def __mul__(self, scalar):
        return Field(self.spec, self.values * scalar)

    __rmul__ = __mul__

    def is_finite(self):
        return bool(np.isfinite(self.values.view(np.float64)).all())


def zero_field(spec):
    return Field(spec, np.zeros((spec.n,) * 3, dtype=np.complex128))


def to_spectral(f):
    """Forward transform; returns coefficients F with f(x) = sum F(k) e^{ik.x}."""
    n = f.spec.n
    return np.fft.fftn(f.values) / n**3


def from_spectral(spec, coeffs):
    """Inverse of to_spectral."""
    n = spec.n
    return Field(spec, np.fft.ifftn(np.asarray(coeffs)) * n**3)


def norm(f, which="L2", p=None):
    """Grid norm: which in {"L2", "H1", "Lp"}; Lp requires p >= 1.

    L2 and Lp use the h^3-weighted sample sum; H1 adds the spectral gradient,
    ||f||_H1^2 = ||f||_L2^2 + ||grad f||_L2^2.
    """
    h3 = f.spec.h**3
    if which == "L2":
        return float(np.sqrt(h3 * np.sum(np.abs(f.values) ** 2)))
    if which == "Lp":
        if p is None or p < 1:
            raise ValueError(f"Lp norm requires p >= 1, got {p}")
        return float((h3 * np.sum(np.abs(f.values) ** p)) ** (1.0 / p))
    if which == "H1":
        g = make_grid(f.spec)
        coeffs = to_spectral(f)
        return float(
            np.sqrt(f.spec.volume * np.sum((1.0 + g.ksq) * np.abs(coeffs) ** 2))
        )
    raise ValueError(f"unknown norm {which!r}")


def l2_norm(f):
    return norm(f, "L2")


def h1_norm(f):
    return norm(f, "H1")


def lp_norm(f, p):
    return norm(f, "Lp", p=p)


def inner(f, g):
    """L2 inner product <f, g> = h^3 sum conj(f) g (conjugate-linear in f)."""
    f._check(g)
    return complex(f.spec.h**3 * np.sum(np.conj(f.values) * g.values))


def laplacian(f):
    """Spectral Laplacian."""
    g = make_grid(f.spec)
    return from_spectral(f.spec, to_spectral(f) * (-g.ksq))


def random_band_limited(spec, rng, band_fraction=2.0 / 3.0):
    """Random complex Gaussian field with the top wavenumbers zeroed.

    Modes with per-axis index magnitude above band_fraction * n/2 are removed
    so spectral derivatives stay well resolved.
    """
    n = spec.n
    coeffs = rng.standard_normal((n, n, n)) + 1j * rng.standard_normal((n, n, n))
    m = np.abs(np.fft.fftfreq(n, d=1.0 / n))  # per-axis index magnitude
    cut = band_fraction * (n / 2.0)
    keep = m <= cut
    mask = (
        keep[:, None, None] & keep[None, :, None] & keep[None, None, :]
    )
    coeffs = np.where(mask, coeffs, 0.0)
    return from_spectral(spec, coeffs)


def gaussian_field(spec, sigma, center=None, amplitude=1.0):
    """Gaussian bump exp(-|x-c|^2 / (2 sigma^2)) with minimum-image distance.

    Default center is the middle of the box.
    """
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    g = make_grid(spec)
    L = spec.L
    if center is None:
        center = (L / 2.0, L / 2.0, L / 2.0)
    r2 = 0.0
    axes = []
    for c in center:
        d = (g.x - c + L / 2.0) % L - L / 2.0
        axes.append(d)
    dx, dy, dz = np.meshgrid(*axes, indexing="ij")
    r2 = dx**2 + dy**2 + dz**2
    return Field(spec, amplitude * np.exp(-r2 / (2.0 * sigma**2)).astype(complex))


def scaled_gaussian(spec, sigma, center=None, l2_target=None, h1_target=None):
    """Gaussian bump rescaled to a target L2 or H1 norm (at most one).

    Warns when the bump has not decayed below 1e-8 (relative) at the box
    boundary — the usual sign that the box is too small for free-space
    comparisons.
    """
    if l2_target is not None and h1_target is not None:
        raise ValueError("give at most one of l2_target / h1_target")
    f = gaussian_field(spec, sigma, center=center)
    decay = boundary_decay(f)
    if decay > 1e-8:
        warnings.warn(
            f"initial bump only decays to {decay:.2e} of its peak at the box "
            "boundary; increase L or decrease sigma",
            stacklevel=2,
        )
    if l2_target is not None:
        return f * (l2_target / norm(f, "L2"))
    if h1_target is not None:
        return f * (h1_target / norm(f, "H1"))
    return f


def boundary_decay(f):
    """Max |f| on the six boundary faces relative to max |f| overall.

    Used by runners to warn when a box is too small for decaying data.
    """
    a = np.abs(f.values)
    peak = a.max()
    if peak == 0.0:
        return 0.0
    edge = max(
        a[0, :, :].max(),
        a[:, 0, :].max(),
        a[:, :, 0].max(),
    )
    return float(edge / peak)
