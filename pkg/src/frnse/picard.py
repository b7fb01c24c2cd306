"""Fixed-point construction of solutions via the Duhamel map.

A trajectory on uniform nodes t_j = j T/m is mapped to

    t_j  ->  e^{i a1 t_j Lap} phi
             + integral_0^{t_j} e^{i a1 (t_j - s) Lap}
                   [ a2 g1(psi(s)) - a2 g2(psi(s)) ] ds,

the time integral evaluated by a fixed quadrature over the nodes s <= t_j.
Iterating this map from the free trajectory converges, for small horizons,
at the super-geometric rate delta_k ~ (C T)^k / k!; contraction_report fits
C from successive increments and checks the factorial envelope.

All integrals are computed in the interaction picture: the integrand is
pulled back to s = 0 (W(s) = e^{-i a1 s Lap} N(psi(s))), prefix-integrated
once per node, then pushed forward, so each node costs two propagator
applications regardless of m.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DivergenceDetected, NonConvergence
from .grid import Field, h1_norm, zero_field
from .kernel import KernelSpec
from .nonlinear import PhysParams, nonlinear_part
from .propagate import free_evolve, free_trajectory
from .trajectory import Trajectory, sup_h1_distance

QUAD_RULES = ("trapezoid", "simpson")


@dataclass(frozen=True)
class PicardConfig:
    """Fixed-point solve setup: horizon T, m uniform steps, quadrature rule,
    iteration budget and sup-node H^1 stopping increment."""

    T: float
    m: int
    kspec: KernelSpec
    params: PhysParams
    quad: str = "simpson"
    max_iter: int = 25
    tol: float = 1e-10

    def __post_init__(self):
        if not np.isfinite(self.T) or self.T <= 0:
            raise ValueError(f"T must be positive, got {self.T}")
        if not isinstance(self.m, (int, np.integer)) or self.m < 2:
            raise ValueError(f"m must be an integer >= 2, got {self.m}")
        if self.quad not in QUAD_RULES:
            raise ValueError(f"quad must be one of {QUAD_RULES}, got {self.quad!r}")
        if self.quad == "simpson" and self.m % 2:
            raise ValueError(f"simpson quadrature needs even m, got {self.m}")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        object.__setattr__(self, "T", float(self.T))

    @property
    def times(self):
        return np.linspace(0.0, self.T, self.m + 1)


def _prefix_integrals(W, dt, quad):
    """Running integrals P_j = integral_0^{t_j} W ds from node samples.

    trapezoid: classic running trapezoid, O(dt^2).
    simpson: composite Simpson on even nodes; odd nodes are closed with a
    third-order backward (Adams-Moulton) step, except node 1 which uses the
    quadratic through the first three samples. Uniformly O(dt^4).
    """
    m = len(W) - 1
    P = [np.zeros_like(W[0])]
    if quad == "trapezoid":
        for j in range(1, m + 1):
            P.append(P[j - 1] + (dt / 2.0) * (W[j - 1] + W[j]))
        return P
    for j in range(1, m + 1):
        if j == 1:
            P.append((dt / 12.0) * (5.0 * W[0] + 8.0 * W[1] - W[2]))
        elif j % 2 == 0:
            P.append(P[j - 2] + (dt / 3.0) * (W[j - 2] + 4.0 * W[j - 1] + W[j]))
        else:
            P.append(
                P[j - 1]
                + (dt / 24.0)
                * (9.0 * W[j] + 19.0 * W[j - 1] - 5.0 * W[j - 2] + W[j - 3])
            )
    return P


def duhamel_map(traj, phi, cfg):
    """One application of the Duhamel map to a trajectory.

    Node 0 of the output is phi itself (zero integral, identity propagator).
    With alpha2 = 0 the integrand vanishes and the output is the free
    trajectory of phi regardless of the input.
    """
    times = cfg.times
    if len(traj) != cfg.m + 1 or not np.allclose(traj.times, times, atol=1e-12):
        raise ValueError("trajectory nodes do not match the configuration")
    if phi.spec != traj.spec:
        raise ValueError("grid mismatch between phi and trajectory")
    a1 = cfg.params.alpha1
    if cfg.params.alpha2 == 0.0:
        return Trajectory(times, free_trajectory(phi, times, a1))
    W = [
        free_evolve(nonlinear_part(f, cfg.params, cfg.kspec), -t, a1).values
        for t, f in zip(times, traj.fields)
    ]
    P = _prefix_integrals(W, cfg.T / cfg.m, cfg.quad)
    out = [
        free_evolve(Field(phi.spec, phi.values + Pj), t, a1)
        for t, Pj in zip(times, P)
    ]
    return Trajectory(times, out)


@dataclass(frozen=True)
class ConvergenceReport:
    """Per-iteration increments delta_k = sup_j ||psi^{k+1}_j - psi^k_j||_H1,
    the post-convergence fixed-point residual, and ball bookkeeping.

    phi_h1 is the H^1 norm of the initial datum (proxy for the contraction
    ball radius); ball_excursion is the largest sup-node H^1 distance any
    iterate reached from the free trajectory.
    """

    increments: tuple
    residual: float
    converged: bool
    iterations: int
    phi_h1: float
    ball_excursion: float
    left_ball: bool
    T: float


def picard_solve(phi, cfg, init="free"):
    """Iterate the Duhamel map to its fixed point.

    init: "free" (default) starts from the free trajectory of phi — the
    center of the contraction ball; "zero" starts from the zero trajectory;
    a Trajectory instance is used as given.

    Returns (trajectory, report). Raises NonConvergence (with the report
    attached) when max_iter is exhausted with the increment still above tol
    — the standard signal that the horizon T is too large for contraction —
    and DivergenceDetected on NaN/overflow.
    """
    times = cfg.times
    a1 = cfg.params.alpha1
    free_fields = free_trajectory(phi, times, a1)
    if isinstance(init, Trajectory):
        cur = init
        if len(cur) != cfg.m + 1 or cur.spec != phi.spec:
            raise ValueError("given initializer does not match the configuration")
    elif init == "free":
        cur = Trajectory(times, free_fields)
    elif init == "zero":
        cur = Trajectory(times, [zero_field(phi.spec) for _ in times])
    else:
        raise ValueError(f"unknown initializer {init!r}")

    phi_h1 = h1_norm(phi)
    increments = []
    excursion = 0.0
    converged = False
    for _ in range(cfg.max_iter):
        # overflow on a diverging iterate is expected and reported below
        with np.errstate(over="ignore", invalid="ignore"):
            new = duhamel_map(cur, phi, cfg)
        if not new.is_finite():
            raise DivergenceDetected("non-finite field during fixed-point iteration")
        delta = sup_h1_distance(new.fields, cur.fields)
        increments.append(float(delta))
        excursion = max(excursion, sup_h1_distance(new.fields, free_fields))
        cur = new
        if delta < cfg.tol:
            converged = True
            break

    left_ball = excursion > phi_h1 > 0.0
    if left_ball:
        warnings.warn(
            f"iterates left the H^1 ball around the free trajectory "
            f"(excursion {excursion:.3e} > ||phi||_H1 {phi_h1:.3e})",
            stacklevel=2,
        )
    if converged:
        residual = float(sup_h1_distance(duhamel_map(cur, phi, cfg).fields, cur.fields))
    else:
        residual = increments[-1]
    report = ConvergenceReport(
        increments=tuple(increments),
        residual=residual,
        converged=converged,
        iterations=len(increments),
        phi_h1=float(phi_h1),
        ball_excursion=float(excursion),
        left_ball=left_ball,
        T=cfg.T,
    )
    if not converged:
        raise NonConvergence(
            f"increment {increments[-1]:.3e} still above tol {cfg.tol:.1e} after "
            f"{cfg.max_iter} iterations; horizon T={cfg.T} too large for contraction?",
            report=report,
        )
    return cur, report


@dataclass(frozen=True)
class ContractionReport:
    """Fit of the contraction rate against the factorial envelope.

    C_fit solves delta_{k+1}/delta_k ~ C T/(k+1) in the median; envelope_ok
    says whether delta_k <= 1.25 * delta_0 (C_fit T)^k / k! held for every
    usable increment; ratios_decreasing allows 25% noise headroom.
    """

    C_fit: float
    ratios: tuple
    envelope_ok: bool
    ratios_decreasing: bool
    increments_decreasing: bool
    degenerate: bool
    used: int


def contraction_report(report):
    """Analyze a ConvergenceReport's increments against (C T)^k / k! decay.

    A first increment at round-off level means the initializer was already
    the fixed point (e.g. the free case alpha2 = 0): that degenerate case is
    reported as such rather than fitted. Otherwise at least 3 increments
    above the round-off floor are required.
    """
    inc = report.increments
    if not inc:
        raise ValueError("report holds no increments")
    if inc[0] <= max(1e-14 * max(report.phi_h1, 1.0), 0.0):
        return ContractionReport(
            C_fit=0.0,
            ratios=(),
            envelope_ok=True,
            ratios_decreasing=True,
            increments_decreasing=True,
            degenerate=True,
            used=len(inc),
        )
    floor = 1e-13 * inc[0]
    usable = []
    for d in inc:
        if d <= floor:
            break
        usable.append(d)
    if len(usable) < 3:
        raise ValueError(
            f"need at least 3 increments above the round-off floor, got {len(usable)}"
        )
    ratios = tuple(usable[k + 1] / usable[k] for k in range(len(usable) - 1))
    C_fit = float(np.median([(k + 1) * r for k, r in enumerate(ratios)]) / report.T)
    ct = C_fit * report.T
    envelope_ok = all(
        usable[k] <= 1.25 * usable[0] * ct**k / math.factorial(k)
        for k in range(1, len(usable))
    )
    ratios_decreasing = all(
        ratios[k + 1] <= 1.25 * ratios[k] for k in range(len(ratios) - 1)
    )
    increments_decreasing = all(
        usable[k + 1] <= usable[k] for k in range(1, len(usable) - 1)
    )
    return ContractionReport(
        C_fit=C_fit,
        ratios=ratios,
        envelope_ok=envelope_ok,
        ratios_decreasing=ratios_decreasing,
        increments_decreasing=increments_decreasing,
        degenerate=False,
        used=len(usable),
    )
