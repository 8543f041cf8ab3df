"""Minimal extension constant of p_*(d/db) across dyadic x0 on one polar wedge.

Prints one row per scale and the fitted growth exponent next to m/n - 1.
"""
from __future__ import annotations

import argparse
import warnings

from polarwedge.cli import parse_germ
from polarwedge.polar import polar_wedge_system
from polarwedge.strat import classify_witness


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--germ", default="z^2 - y^3 - x^2*y^2")
    ap.add_argument("--scales", default="4:12")
    ap.add_argument("--trunc", type=int, default=24)
    args = ap.parse_args()
    lo, hi = (int(v) for v in args.scales.split(":"))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        S = polar_wedge_system(parse_germ(args.germ), args.trunc)
    v = classify_witness(S, scales=(lo, hi), force_witness=True)
    if not v.rows:
        print(f"{v.verdict}: {v.reason}")
        return
    print(f"wedge {v.branch}: n = {v.n}, m = {v.m}, predicted exponent {v.predicted_exponent}")
    print(f"{'x0':>12} {'base':>12} {'extension':>12} {'ratio':>12}")
    for r in v.rows:
        print(f"{float(r.x0):12.4e} {float(r.base_constant):12.4e} {float(r.extension_constant):12.4e} "
              f"{float(r.ratio):12.4e}")
    print(f"fitted exponent {v.fit.describe()}")


if __name__ == "__main__":
    main()
