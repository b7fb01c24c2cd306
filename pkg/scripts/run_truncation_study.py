"""Truncated-kernel solutions vs the full-kernel solution.

Solves the fixed point once per inner radius a and reports the sup-node H1
distance E(a) to the full-kernel solution; E(a) should shrink as a does.
"""

from frnse.experiments import truncation_convergence
from frnse.grid import GridSpec, scaled_gaussian
from frnse.kernel import KernelSpec, default_radius
from frnse.nonlinear import PhysParams
from frnse.picard import PicardConfig

N = 32
L = 1.6
A_LIST = (0.4, 0.2, 0.1)


def main():
    gspec = GridSpec(N, L)
    kspec = KernelSpec("full", R=default_radius(L))
    params = PhysParams(0.05, 1.0)
    phi = scaled_gaussian(gspec, 0.13, l2_target=0.5)
    cfg = PicardConfig(T=0.15, m=32, kspec=kspec, params=params,
                       quad="simpson", tol=1e-12)

    print("=" * 60)
    print(f"truncation study: {N}^3, h = {gspec.h:.4f}, a in {A_LIST}")
    print("=" * 60)
    table, slope, rows = truncation_convergence(phi, cfg, A_LIST)
    print(f"{'a':>8}  {'E(a) sup-node H1 distance':>28}")
    for a, err in table:
        print(f"{a:8.3f}  {err:28.6e}")
    print(f"log-log slope: {slope:.3f}")
    for r in rows:
        mark = "info" if r.kind == "info" else ("pass" if r.passed else "FAIL")
        print(f"  {mark}  {r.check}: {r.measured:.6g}")


if __name__ == "__main__":
    main()
