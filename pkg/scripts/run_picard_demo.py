"""Fixed-point iteration on small data: print the increment ladder and the
fitted contraction constant, then cross-check the factorial envelope.
"""

import math

from frnse.grid import GridSpec, scaled_gaussian, h1_norm
from frnse.kernel import KernelSpec, default_radius
from frnse.nonlinear import PhysParams
from frnse.picard import PicardConfig, picard_solve, contraction_report

N = 32
L = 1.6
SIGMA = 0.12
H1_TARGET = 0.5
T = 0.25
M = 64


def main():
    gspec = GridSpec(N, L)
    kspec = KernelSpec("full", R=default_radius(L))
    params = PhysParams(1.0, 1.0)
    phi = scaled_gaussian(gspec, SIGMA, h1_target=H1_TARGET)

    print("=" * 60)
    print(f"picard iteration: {N}^3 grid, |phi|_H1 = {h1_norm(phi):.3f}, "
          f"T = {T}, m = {M} simpson nodes")
    print("=" * 60)

    cfg = PicardConfig(T=T, m=M, kspec=kspec, params=params,
                       quad="simpson", tol=1e-12)
    traj, report = picard_solve(phi, cfg)

    for k, inc in enumerate(report.increments):
        print(f"  iteration {k + 1}: sup-node H1 increment {inc:.6e}")
    print(f"converged: {report.converged} after {report.iterations} iterations")
    print(f"fixed-point residual: {report.residual:.3e}")
    print(f"ball excursion: {report.ball_excursion:.3e} "
          f"(initial H1 norm {report.phi_h1:.3f})")

    con = contraction_report(report)
    print("-" * 60)
    print(f"fitted contraction constant C: {con.C_fit:.4f}  "
          f"(C*T = {con.C_fit * report.T:.3e})")
    print(f"increments decreasing: {con.increments_decreasing}")
    print(f"ratios decreasing:     {con.ratios_decreasing}")
    print(f"factorial envelope ok: {con.envelope_ok}")
    d0 = report.increments[0]
    CT = con.C_fit * report.T
    for k in range(1, len(report.increments)):
        env = 1.25 * d0 * CT ** k / math.factorial(k)
        print(f"  k={k}: increment {report.increments[k]:.3e}  "
              f"envelope {env:.3e}")


if __name__ == "__main__":
    main()
