"""Model-strip value against volume, next to the cylinder value ``f``.

For each lam prints ``lam, v/V, model, certified, f, model/f``.  Below the
crossover the optimum stops being the cylinder and ``model/f`` drops under 1.

    python3 scripts/model_profile_curve.py --m 2 --n 2 --lams 0.5,1,2 --points 16
"""

import argparse
import csv
import sys

import numpy as np

from isoprod import bounds, model_strip, profiles


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--m", type=int, default=2)
    ap.add_argument("--n", type=int, default=2)
    ap.add_argument("--lams", default="0.5,1,2,4")
    ap.add_argument("--points", type=int, default=16)
    ap.add_argument("--grid", type=int, default=200)
    args = ap.parse_args(argv)

    phi, psi = profiles.sphere_profile(args.m), profiles.sphere_profile(args.n)
    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["lambda", "v_frac", "model", "certified", "f_upper", "ratio"])
    grid = (args.grid, args.grid)
    for lam in (float(x) for x in args.lams.split(",")):
        cfg = model_strip.StripConfig(args.m, args.n, phi, psi, lam)
        for frac in np.linspace(0.5 / args.points, 0.5, args.points):
            v = frac * cfg.total_area
            model = model_strip.minimize_perimeter(cfg, v, grid).value
            low = model_strip.certified_lower_bound(cfg, v, grid)
            f = bounds.f_upper(cfg, v)
            out.writerow([bounds.fmt(x) for x in (lam, frac, model, low, f, model / f)])


if __name__ == "__main__":
    main()
