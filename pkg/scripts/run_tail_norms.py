"""Tail-kernel operator norms: measured L2 -> L2 norm vs the 2*pi*a^2 bound.

The measured norm should track the bound from below and scale like a^2.
"""

from frnse.experiments import kernel_norm_study
from frnse.grid import GridSpec

N = 32
L = 1.6
A_LIST = (0.4, 0.3, 0.2, 0.15, 0.1)


def main():
    gspec = GridSpec(N, L)
    print("=" * 60)
    print(f"tail operator norms: {N}^3 grid, h = {gspec.h:.4f}")
    print("=" * 60)
    table, rows = kernel_norm_study(gspec, A_LIST, p=2.0, trials=32, seed=0)
    print(f"{'a':>8}  {'bound 2*pi*a^2':>16}  {'measured':>12}  {'ratio':>8}")
    for a, bound, est in table:
        print(f"{a:8.3f}  {bound:16.6f}  {est:12.6f}  {est / bound:8.4f}")
    for r in rows:
        mark = "info" if r.kind == "info" else ("pass" if r.passed else "FAIL")
        print(f"  {mark}  {r.check}: measured {r.measured:.6g}")


if __name__ == "__main__":
    main()
