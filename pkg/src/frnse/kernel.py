"""Newton kernel 1/|x| on the box: truncated variants, FFT apply, oracles.

Three radial variants are supported, all with compact support of radius R:

* ``full``   -- 1/|x| on |x| <= R,
* ``inner``  -- 1/|x| on a < |x| <= R (singularity removed),
* ``tail``   -- 1/|x| on 0 < |x| <= a (the part the inner variant removes),

so full = inner + tail identically. R must cover the box diameter
(R >= sqrt(3) L): then zero-padding the grid 2x per axis makes the circular
FFT convolution agree with the free-space convolution for sources inside the
box, with no periodic images.

The discrete operator is defined by a sampled real-space table: cell j gets
weight h^3 / |d_j| at the centered displacement d_j, and the singular
self-cell gets the exact cell average of 1/|x| (CUBE_AVG * h^2).  The tail
variant's self-cell weight interpolates between 0 (ball smaller than the
cell's inscribed radius) and the full cell average (ball covers the cell),
via quadrature of 1/|x| over the cell-ball intersection in between; the
inner self-weight is the complement, so additivity is exact by construction.
The direct-summation oracle sums exactly the same table, which makes the
FFT-vs-direct comparison a round-off-level test rather than a
discretization-error test.

Note the truncation radius only resolves 1/|x| faithfully once a is a couple
of grid spacings; for a < 2h the discrete tail operator can exceed the
continuum bound 2*pi*a^2 because a single cell carries the whole ball.
"""

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .grid import Field, l2_norm, lp_norm, make_grid, random_band_limited

#: Average of 1/|u| over the unit cube centered at the origin; the self-cell
#: of the sampled kernel is CUBE_AVG * h^2 = h^3 * (CUBE_AVG / h).
CUBE_AVG = 2.3800773639795523

VARIANTS = ("full", "inner", "tail")


@dataclass(frozen=True)
class KernelSpec:
    """Radial kernel selection: variant, support radius R, truncation radius a.

    ``a`` is required (positive, below R) for the inner and tail variants and
    must be omitted/zero for the full kernel.
    """

    variant: str
    R: float
    a: float = 0.0

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if not np.isfinite(self.R) or self.R <= 0:
            raise ValueError(f"R must be positive and finite, got {self.R}")
        if self.variant == "full":
            if self.a:
                raise ValueError("full kernel takes no truncation radius")
        else:
            if not np.isfinite(self.a) or not 0 < self.a < self.R:
                raise ValueError(
                    f"truncated variants need 0 < a < R, got a={self.a}, R={self.R}"
                )
        object.__setattr__(self, "R", float(self.R))
        object.__setattr__(self, "a", float(self.a))


def default_radius(L):
    """Smallest support radius that covers the box diameter."""
    return math.sqrt(3.0) * L


def coulomb_multiplier(kspec, k):
    """Fourier transform of the radially truncated kernel at wavenumber k.

    Closed forms (radial integral of 4*pi*sin(kr)/k over the support):

        full:   4*pi*(1 - cos kR)/k^2,        k=0 -> 2*pi*R^2
        inner:  4*pi*(cos ka - cos kR)/k^2,   k=0 -> 2*pi*(R^2 - a^2)
        tail:   4*pi*(1 - cos ka)/k^2,        k=0 -> 2*pi*a^2

    Accepts scalar or array k; returns matching shape.
    """
    k = np.asarray(k, dtype=float)
    R, a = kspec.R, kspec.a
    ksq = np.where(k == 0.0, 1.0, k * k)
    if kspec.variant == "full":
        num = 4.0 * np.pi * (1.0 - np.cos(k * R))
        at0 = 2.0 * np.pi * R**2
    elif kspec.variant == "inner":
        num = 4.0 * np.pi * (np.cos(k * a) - np.cos(k * R))
        at0 = 2.0 * np.pi * (R**2 - a**2)
    else:
        num = 4.0 * np.pi * (1.0 - np.cos(k * a))
        at0 = 2.0 * np.pi * a**2
    out = np.where(k == 0.0, at0, num / ksq)
    if out.ndim == 0:
        return float(out)
    return out


def _tail_self_weight(a, h):
    """Integral of 1/|x| over (cell of side h) ∩ (ball of radius a), centered.

    Exact limits on both sides: 0 when the ball misses every point of the
    cell interior quadrature (a < h/2, inscribed radius), and the full cell
    average CUBE_AVG*h^2 once the ball covers the cell (a >= sqrt(3)h/2).
    The intermediate regime is a midpoint quadrature, clamped into the
    mathematically required range.
    """
    if a < h / 2.0:
        return 0.0
    if a >= math.sqrt(3.0) / 2.0 * h:
        return CUBE_AVG * h**2
    m = 64
    u = ((np.arange(m) + 0.5) / m - 0.5) * h
    ux, uy, uz = np.meshgrid(u, u, u, indexing="ij")
    r = np.sqrt(ux**2 + uy**2 + uz**2)
    integrand = np.where(r <= a, 1.0 / r, 0.0)
    val = integrand.mean() * h**3
    return float(min(max(val, 0.0), min(2.0 * np.pi * a**2, CUBE_AVG * h**2)))


@lru_cache(maxsize=16)
def kernel_table(gspec, kspec):
    """Sampled real-space kernel on the 2x padded grid, FFT index layout.

    Entry [jx, jy, jz] is the convolution weight for the centered displacement
    d = (((j + n) mod 2n) - n) * h per axis, i.e. index = displacement mod 2n.
    Weights: h^3/|d| inside the variant's radial support, the split cell
    average at d = 0, zero elsewhere. Read-only array of shape (2n,)*3.
    """
    n, h, L = gspec.n, gspec.h, gspec.L
    if kspec.R < default_radius(L) * (1.0 - 1e-12):
        raise ValueError(
            f"support radius R={kspec.R} does not cover the box diameter "
            f"{default_radius(L):.6g}; free-space convolution would be wrong"
        )
    N = 2 * n
    j = np.arange(N)
    d = (((j + n) % N) - n) * h
    dx, dy, dz = np.meshgrid(d, d, d, indexing="ij")
    r = np.sqrt(dx**2 + dy**2 + dz**2)
    with np.errstate(divide="ignore"):
        w_full = np.where(r > 0.0, h**3 / np.where(r > 0.0, r, 1.0), 0.0)
    w_full[0, 0, 0] = CUBE_AVG * h**2
    w_full = np.where(r <= kspec.R * (1.0 + 1e-12), w_full, 0.0)
    if kspec.variant == "full":
        out = w_full
    else:
        a = kspec.a
        w_tail = np.where((r > 0.0) & (r <= a), w_full, 0.0)
        w_tail[0, 0, 0] = _tail_self_weight(a, h)
        if kspec.variant == "tail":
            out = w_tail
        else:
            out = w_full - w_tail
    out.setflags(write=False)
    return out


@lru_cache(maxsize=16)
def kernel_multiplier(gspec, kspec):
    """DFT of kernel_table (the multiplier the FFT apply path uses)."""
    mult = np.fft.fftn(np.asarray(kernel_table(gspec, kspec)))
    mult.setflags(write=False)
    return mult


def apply_kernel(kspec, density):
    """Free-space convolution of the density with the selected kernel.

    Pads the grid 2x per axis, multiplies in Fourier space by the table's
    DFT, and crops back. Linear in the density; real densities give real
    output (the round-off imaginary part is dropped).
    """
    spec = density.spec
    n = spec.n
    mult = kernel_multiplier(spec, kspec)
    vals = density.values
    real_in = bool(np.all(vals.imag == 0.0))
    padded = np.zeros((2 * n,) * 3, dtype=np.complex128)
    padded[:n, :n, :n] = vals
    conv = np.fft.ifftn(np.fft.fftn(padded) * mult)[:n, :n, :n]
    if real_in:
        conv = conv.real.astype(np.complex128)
    return Field(spec, conv)


def direct_convolution_oracle(kspec, density, force=False):
    """Brute-force O(n^6) free-space convolution over the same sampled table.

    Reference implementation for apply_kernel: sums the identical per-cell
    weights pair by pair, so agreement is limited only by FFT round-off.
    Guarded to n <= 16 unless force=True.
    """
    spec = density.spec
    n = spec.n
    if n > 16 and not force:
        raise ValueError(f"direct oracle is O(n^6); n={n} > 16 (pass force=True)")
    table = np.asarray(kernel_table(spec, kspec))
    rho = density.values
    idx = np.arange(n)
    dmod = (idx[:, None] - idx[None, :]) % (2 * n)  # (x, y) -> displacement index
    out = np.empty((n, n, n), dtype=np.complex128)
    for x1 in range(n):
        part = table[dmod[x1]]  # (y1, j2, j3)
        part = part[:, dmod, :]  # (y1, x2, y2, j3)
        part = part[..., dmod]  # (y1, x2, y2, x3, y3)
        out[x1] = np.einsum("abcde,ace->bd", part, rho)
    return Field(spec, out)


def tail_norm_bound(a):
    """Analytic Schur bound 2*pi*a^2 on the tail operator norm."""
    if a <= 0:
        raise ValueError(f"truncation radius must be positive, got {a}")
    return 2.0 * np.pi * a**2


def tail_norm_estimate(gspec, a, p=2.0, trials=32, seed=0, R=None, iters=200):
    """Empirical lower estimate of the L^p operator norm of the tail kernel.

    For p = 2 runs power iteration on the (symmetric, positivity-preserving)
    restricted operator, starting from a seeded nonnegative field; for other
    p it maximizes ||T f||_p / ||f||_p over seeded random band-limited trial
    fields. Either way the result is a lower estimate and must sit below
    tail_norm_bound(a). Warns when the grid cannot resolve the ball (h >= a).
    """
    if p <= 1:
        raise ValueError(f"need p > 1, got {p}")
    if gspec.h >= a:
        warnings.warn(
            f"truncation radius a={a} at or below grid spacing h={gspec.h}; "
            "the discrete tail operator is degenerate and the estimate is vacuous",
            stacklevel=2,
        )
    if R is None:
        R = default_radius(gspec.L)
    kspec = KernelSpec("tail", R=R, a=a)
    rng = np.random.default_rng(seed)
    if p == 2.0:
        f = Field(gspec, np.abs(rng.standard_normal((gspec.n,) * 3)) + 0.1)
        est = 0.0
        for _ in range(iters):
            g = apply_kernel(kspec, f)
            nrm = l2_norm(g)
            if nrm == 0.0:
                return 0.0
            new_est = nrm / l2_norm(f)
            if abs(new_est - est) <= 1e-13 * max(est, 1.0):
                est = new_est
                break
            est = new_est
            f = g * (1.0 / nrm)
        return float(est)
    best = 0.0
    for _ in range(trials):
        f = random_band_limited(gspec, rng)
        denom = lp_norm(f, p)
        if denom == 0.0:
            continue
        best = max(best, lp_norm(apply_kernel(kspec, f), p) / denom)
    return float(best)
