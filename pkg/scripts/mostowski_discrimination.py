"""Best (M1)-(M3) constants per scale, with and without the polar curve as a stratum."""
from __future__ import annotations

import argparse
import time
import warnings

from polarwedge.cli import parse_germ
from polarwedge.polar import polar_wedge_system
from polarwedge.strat import filtration_from_system, mostowski_check, plane_filtration


def report(rep) -> None:
    print(f"-- {rep.filtration}: {rep.verdict} ({rep.chains} chains, {rep.rejected} rejected)")
    print(f"{'s':>10} " + " ".join(f"{k:>11}" for k in rep.constants))
    for i, s in enumerate(rep.scales):
        print(f"{s:10.3e} " + " ".join(f"{rep.constants[k][i]:11.4e}" for k in rep.constants))
    for k, fit in rep.fits.items():
        print(f"   {k}: {fit.describe()}")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--germ", default="z^2 - y^3 - x^2*y^2")
    ap.add_argument("--scales", default="4:20")
    ap.add_argument("--chain-c", type=float, default=2.0)
    ap.add_argument("--plane", action="store_true", help="run the plane z = 0 instead")
    args = ap.parse_args()
    lo, hi = (int(v) for v in args.scales.split(":"))
    t0 = time.perf_counter()
    if args.plane:
        report(mostowski_check(plane_filtration(), None, args.chain_c, (lo, hi), rerun_c=None))
    else:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            S = polar_wedge_system(parse_germ(args.germ))
        for with_polar in (False, True):
            filt = filtration_from_system(S, with_polar=with_polar)
            report(mostowski_check(filt, S, args.chain_c, (lo, hi), rerun_c=None))
    print(f"elapsed {time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    main()
