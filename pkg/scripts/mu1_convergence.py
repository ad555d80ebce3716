"""Observed convergence of the mu1 oracle under mesh refinement."""

import math

from isoprod import geometry

CASES = [
    (geometry.RoundSphere(2), 2.0, (4, 8, 16, 32)),
    (geometry.RoundSphere(3, 2.0), 0.75, (16, 32, 64, 128)),
    (geometry.FlatTorus(2, 1.0), (2 * math.pi) ** 2, (16, 32, 64, 128)),
]

if __name__ == "__main__":
    for manifold, exact, levels in CASES:
        prev = None
        for k in levels:
            err = abs(geometry._mu1_at(manifold, k) - exact)
            order = "" if prev is None else f"  order {math.log2(prev / err):.2f}"
            print(f"{manifold!s:40} res {k:4d}  rel err {err / exact:.3e}{order}")
            prev = err
