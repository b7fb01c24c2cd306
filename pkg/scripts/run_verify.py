"""Run the full property-check battery and print every row.

Usage: python scripts/run_verify.py [quick] [seed]
"""

import sys
import time

from frnse.experiments import VerifyPlan, verify_battery


def main():
    quick = "quick" in sys.argv[1:]
    seed = 0
    for arg in sys.argv[1:]:
        if arg.isdigit():
            seed = int(arg)
    plan = VerifyPlan.default(seed=seed)
    if quick:
        plan = plan.quick()

    print("=" * 64)
    print(f"property-check battery  (grid {plan.gspec.n}^3, seed {seed}, "
          f"{'quick' if quick else 'full'} scale)")
    print("=" * 64)
    t0 = time.time()
    result = verify_battery(plan)
    elapsed = time.time() - t0

    width = max(len(r.check) for r in result.rows)
    for r in result.rows:
        if r.kind == "info":
            print(f"  {r.check:<{width}}  info   {r.measured:12.6g}  {r.detail}")
        else:
            mark = "pass" if r.passed else "FAIL"
            print(f"  {r.check:<{width}}  {mark}   {r.measured:12.6g}  "
                  f"(threshold {r.threshold:g})")

    failing = result.failing()
    print("=" * 64)
    print(f"{len(result.rows)} checks, {len(failing)} failing, "
          f"{elapsed:.1f} s")
    for r in failing:
        print(f"  failing: {r.check}  ({r.detail})")
    return 1 if failing else 0


if __name__ == "__main__":
    sys.exit(main())
