"""Exponents, key identity orders and distance-ratio ranges over a germ corpus."""
from __future__ import annotations

import argparse
import time
import warnings

from polarwedge.assumptions import exact_checks
from polarwedge.cli import parse_germ
from polarwedge.metric import verify_distance_formulas
from polarwedge.polar import key_identity_residual, polar_wedge_system

DEFAULT = [
    "z^2 - y^3 - x^2*y^2",
    "z^2 - x^2 - y^2",
    "z^2 - y^3 - (1 + t)*x*y^2",
    "3*x^3 - 3*x^2*y + 3*x*y^2 - 2*x*z^2 - y^3 + z^2",
]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("germs", nargs="*", default=DEFAULT)
    ap.add_argument("--pairs", type=int, default=1000)
    ap.add_argument("--trunc", type=int, default=24)
    args = ap.parse_args()
    warnings.simplefilter("ignore")
    for text in args.germs:
        t0 = time.perf_counter()
        f = parse_germ(text)
        checks = ", ".join(f"{v.name}={v.status}" for v in exact_checks(f, args.trunc))
        S = polar_wedge_system(f, args.trunc)
        print(f"{text}\n  assumptions: {checks}")
        print(f"  n = {S.n}; singular locus: {S.singular_locus_text()}")
        for br in S.branches:
            ki = key_identity_residual(br, S.F, S.FZ, args.trunc)
            print(f"  {br.describe()}; key identity order {ki.order} ({'exact' if ki.exact else 'numeric'})")
        if S.polar:
            rep = verify_distance_formulas(S, pairs=args.pairs)
            for s in rep.stats:
                print(f"  formula {s.formula} {s.pair}: [{s.ratio_min:.3g}, {s.ratio_max:.3g}] "
                      f"over {s.count}, failures {s.failures}")
        print(f"  {time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    main()
