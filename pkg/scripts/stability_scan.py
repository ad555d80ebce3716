"""Stability threshold of ``D(r0) x N`` over r0, with mu1 from the numerical oracle.

    python3 scripts/stability_scan.py --m 2 --n 2 --resolution 16
"""

import argparse
import math

import numpy as np

from isoprod import geometry


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--m", type=int, default=2)
    ap.add_argument("--n", type=int, default=2)
    ap.add_argument("--resolution", type=int, default=16)
    ap.add_argument("--points", type=int, default=12)
    args = ap.parse_args(argv)

    est = geometry.mu1_oracle(geometry.RoundSphere(args.n), args.resolution)
    print(f"# mu1(S^{args.n}) = {est.value:.10g} (+/- {est.error_estimate:.2e}), exact {args.n}")
    print("r0,threshold_lambda")
    v_n = 1.0  # the threshold does not depend on the volume of N
    for r0 in np.linspace(math.pi / (args.points + 1), math.pi / 2, args.points):
        rep = geometry.stability_report(geometry.CylinderSpec(args.m, args.n, r0, v_n, 1.0), est.value)
        print(f"{r0:.6f},{rep.threshold_lambda:.10g}")


if __name__ == "__main__":
    main()
