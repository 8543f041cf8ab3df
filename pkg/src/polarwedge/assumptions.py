"""Checks of the transversality and equisingularity hypotheses on a germ family.

Exact checks (tangent cone, discriminant transversality, Newton-process
uniformity) are deterministic.  The limit-tangent check samples points and is
labelled HEURISTIC in every verdict it produces.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np

from .algebra import AlgebraError, MPoly, Q, discriminant, shear
from .polar import (
    PolarError,
    build_polar_system,
    germ_params,
    reduce_discriminant,
)
from .puiseux import (
    PuiseuxError,
    compare_types,
    equisingularity_type,
    newton_puiseux_param,
)


@dataclass
class Verdict:
    name: str
    status: str  # pass | fail | undecided
    provenance: str = "exact"  # exact | heuristic | fitted
    detail: str = ""
    data: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def line(self) -> str:
        tag = " [HEURISTIC]" if self.provenance == "heuristic" else ""
        return f"{self.name}: {self.status.upper()}{tag} {self.detail}".rstrip()


def _at_zero_params(f: MPoly) -> MPoly:
    ps = germ_params(f)
    return f.subs({p: 0 for p in ps}) if ps else f


# ---------------------------------------------------------------------------
# Exact checks


def check_tangent_cone(f: MPoly) -> Verdict:
    """The z-axis is not in the tangent cone of the central fibre."""
    f0 = _at_zero_params(f)
    if f0.is_zero():
        return Verdict("tangent_cone", "fail", detail="central fibre is identically zero")
    if not is_zero_at_origin(f0):
        return Verdict("tangent_cone", "fail", detail="germ does not pass through the origin")
    low = f0.lowest_form().with_vars(("x", "y", "z"))
    d = low.total_degree()
    value = low.terms.get((0, 0, d), Q(0))
    ok = value != 0
    return Verdict("tangent_cone", "pass" if ok else "fail",
                   detail=f"lowest form of degree {d} takes value {value} at (0,0,1)",
                   data={"degree": d, "value": str(value)})


def is_zero_at_origin(f: MPoly) -> bool:
    return f.constant_term() == 0


def central_discriminant(f: MPoly) -> MPoly:
    f0 = _at_zero_params(f).with_vars(("x", "y", "z"))
    if f0.degree("z") < 2:
        return MPoly.const(Q(1), ("x", "y"))
    try:
        return discriminant(f0, "z").with_vars(("x", "y"))
    except AlgebraError as exc:
        if "non-reduced" in str(exc):
            return MPoly.zero(("x", "y"))
        raise


def check_discriminant_transversality(f: MPoly | None = None, delta0: MPoly | None = None) -> Verdict:
    """ord_y of the discriminant on the y-axis equals its multiplicity at 0."""
    if delta0 is None:
        delta0 = central_discriminant(f)
    delta0 = delta0.with_vars(("x", "y"))
    if delta0.is_zero():
        return Verdict("discriminant_transversality", "fail", detail="non-reduced projection")
    if delta0.constant_term() != 0:
        return Verdict("discriminant_transversality", "pass",
                       detail="discriminant is a unit (no branch locus)", data={"mult": 0, "ord_y": 0})
    mult = delta0.low_degree()
    on_axis = [e[1] for e in delta0.terms if e[0] == 0]
    ord_y = min(on_axis) if on_axis else None
    ok = ord_y == mult
    return Verdict("discriminant_transversality", "pass" if ok else "fail",
                   detail=f"multiplicity {mult}, ord_y on the y-axis {ord_y if ord_y is not None else 'inf'}",
                   data={"mult": mult, "ord_y": ord_y})


# ---------------------------------------------------------------------------
# Equisingularity of a plane-curve family


def _grid_values(eps: Fraction, size: int) -> list[Fraction]:
    if size <= 1:
        return [Fraction(0)]
    half = size // 2
    vals = [Fraction(0)]
    for k in range(half):
        v = eps / 2 ** k
        vals += [v, -v]
    return sorted(vals[:size])


def _mpq(fr: Fraction):
    return Q(fr.numerator, fr.denominator)


def family_equisingularity(curve: MPoly, params: Sequence[str], eps: Fraction = Fraction(1, 4),
                           grid: int = 5, N: int = 24, porder: int = 8) -> Verdict:
    """Two independent tests on a plane curve family c(x, y, params).

    Primary: uniformity of the parameterized Newton process.  Secondary: constancy
    of the equisingularity type over a dyadic grid of exact specializations.
    """
    params = tuple(params)
    primary = newton_puiseux_param(curve, params, N=N, porder=porder)
    try:
        base = equisingularity_type(curve.subs({p: 0 for p in params}) if params else curve, N)
    except PuiseuxError as exc:
        data = {"primary": primary.verdict, "locus": primary.locus_text(),
                "secondary": f"central member: {exc}", "agree": not primary.uniform, "eps": str(eps)}
        if primary.uniform:
            return Verdict("equisingular_family", "undecided",
                           detail="internal tests disagree (Newton process vs grid)", data=data)
        return Verdict("equisingular_family", "fail",
                       detail=f"{primary.verdict}, locus {primary.locus_text()}", data=data)
    points = []
    axes = [_grid_values(eps, grid) for _ in params]
    mults = set()
    differs = []
    undecided = base.undecided
    for combo in (np.array(np.meshgrid(*axes, indexing="ij")).reshape(len(params), -1).T
                  if params else [()]):
        combo = tuple(Fraction(v) for v in combo)
        spec = curve.subs({p: _mpq(v) for p, v in zip(params, combo)}) if params else curve
        points.append(combo)
        if spec.constant_term() != 0:
            differs.append((combo, "curve leaves the origin"))
            continue
        try:
            typ = equisingularity_type(spec, N)
        except PuiseuxError as exc:
            differs.append((combo, str(exc)))
            continue
        mults.add(typ.total_multiplicity)
        cmp = compare_types(base, typ)
        if cmp.startswith("undecided"):
            undecided = True
        elif cmp != "equal":
            differs.append((combo, cmp))
    secondary_ok = not differs
    data = {
        "primary": primary.verdict,
        "locus": primary.locus_text(),
        "secondary": "constant" if secondary_ok else f"differs at {[str(tuple(map(str, c))) for c, _ in differs[:3]]}",
        "secondary_reasons": sorted({r for _, r in differs}),
        "grid_points": len(points),
        "multiplicities": sorted(mults),
        "agree": primary.uniform == secondary_ok,
        "eps": str(eps),
    }
    if undecided and secondary_ok:
        return Verdict("equisingular_family", "undecided", detail="undecided at order N", data=data)
    if primary.uniform != secondary_ok:
        return Verdict("equisingular_family", "undecided",
                       detail="internal tests disagree (Newton process vs grid)", data=data)
    if primary.uniform:
        return Verdict("equisingular_family", "pass", detail="uniform Newton process; grid types constant",
                       data=data)
    return Verdict("equisingular_family", "fail",
                   detail=f"{primary.verdict}, locus {primary.locus_text()}", data=data)


def check_equisingular_pencil(f: MPoly, grid: int = 5, eps: Fraction = Fraction(1, 4), N: int = 24,
                              porder: int = 8) -> Verdict:
    """Equisingularity of the discriminant family of the pencil in (b, t)."""
    params = ("b",) + germ_params(f)
    try:
        _, _, delta = build_polar_system(f)
        factors, notes = reduce_discriminant(delta, params)
    except (AlgebraError, PolarError) as exc:
        return Verdict("equisingular_pencil", "fail", detail=str(exc))
    if not factors:
        return Verdict("equisingular_pencil", "pass", detail="empty discriminant germ")
    prod = MPoly.const(Q(1), ())
    for fac in factors:
        prod = prod * fac.poly
    curve = prod.rename({"X": "x", "Y": "y"})
    v = family_equisingularity(curve, params, eps, grid, N, porder)
    v.name = "equisingular_pencil"
    v.data["notes"] = notes
    return v


# ---------------------------------------------------------------------------
# Limit tangents (sampling heuristic)


def _z_order(f0: MPoly) -> int:
    on_axis = [e[2] for e in f0.with_vars(("x", "y", "z")).terms if e[0] == 0 and e[1] == 0]
    return min(on_axis) if on_axis else f0.degree("z")


def check_no_vertical_limit_tangents(f: MPoly, samples: int = 1000, seed: int = 0,
                                     radii: tuple[int, int] = (4, 20), margin: float = 0.05,
                                     slope_floor: float = -0.01, dps: int = 30) -> Verdict:
    """Sample X_reg near 0 and bound the angle between tangent planes and {x = 0}.

    The angle between the hyperplanes ker(df) and {x = 0} is arccos(|f_x|/|grad f|).
    Passing needs min angle >= margin and a fitted slope of the per-radius minimum
    against log2(1/r) of at least ``slope_floor`` (no decreasing trend).
    """
    f0 = _at_zero_params(f).with_vars(("x", "y", "z"))
    used = set(f0.used_vars())
    if used <= {"x"}:
        return Verdict("vertical_limit_tangents", "fail", "heuristic",
                       detail="surface is the plane x = 0")
    if f0.degree("z") < 1:
        return Verdict("vertical_limit_tangents", "fail", "heuristic", detail="f does not involve z")
    rng = random.Random(seed)
    grads = [f0.diff(v) for v in ("x", "y", "z")]
    zcoeffs = f0.coeff_list("z")
    k = max(1, _z_order(f0))
    lo, hi = radii
    levels = list(range(lo, hi + 1))
    per = max(1, samples // len(levels))
    mins, angles = [], []
    landed = 0
    with mpmath.workdps(dps):
        for lev in levels:
            r = mpmath.mpf(2) ** -lev
            best = math.inf
            for _ in range(per):
                th, ph, ps = (rng.uniform(0, 2 * math.pi) for _ in range(3))
                w = rng.uniform(0.05, 1.0)
                x = r * math.cos(w * math.pi / 2) * mpmath.expj(th)
                y = r * math.sin(w * math.pi / 2) * mpmath.expj(ph)
                cs = [c.evaluate({v: {"x": x, "y": y}[v] for v in c.vars}) if c.vars else
                      mpmath.mpc(complex(c.constant_term())) for c in reversed(zcoeffs)]
                while cs and abs(cs[0]) == 0:
                    cs.pop(0)
                if len(cs) < 2:
                    continue
                try:
                    roots = mpmath.polyroots(cs, maxsteps=200, extraprec=2 * dps)
                except mpmath.libmp.NoConvergence:
                    continue
                bound = min(mpmath.mpf(1) / 2, 8 * r ** (mpmath.mpf(1) / k))
                for z in roots:
                    if abs(z) > bound:
                        continue
                    pt = {"x": x, "y": y, "z": z}
                    g = [gp.evaluate({v: pt[v] for v in gp.vars}) if gp.vars else
                         mpmath.mpc(complex(gp.constant_term())) for gp in grads]
                    norm = mpmath.sqrt(sum(abs(c) ** 2 for c in g))
                    if norm < mpmath.mpf(10) ** (-dps + 5):
                        continue
                    landed += 1
                    ang = float(mpmath.acos(min(1, abs(g[0]) / norm)))
                    angles.append(ang)
                    best = min(best, ang)
            mins.append(best)
    if not landed:
        raise AlgebraError("sampling failed to land on X_reg: no small roots found near the origin")
    xs = np.array([float(lev) for lev, m in zip(levels, mins) if math.isfinite(m)])
    ys = np.array([m for m in mins if math.isfinite(m)])
    slope = float(np.polyfit(xs, ys, 1)[0]) if len(xs) >= 2 else 0.0
    min_angle = float(min(ys))
    ok = min_angle >= margin and slope >= slope_floor
    return Verdict("vertical_limit_tangents", "pass" if ok else "fail", "heuristic",
                   detail=f"min angle {min_angle:.4f} rad (margin {margin}), slope {slope:+.4f} per octave",
                   data={"min_angle": min_angle, "slope": slope, "points": landed, "seed": seed,
                         "per_radius_min": [float(m) for m in mins]})


# ---------------------------------------------------------------------------
# Frame search


@dataclass
class FrameSearch:
    shear: tuple
    germ: MPoly
    verdicts: list
    audit: list

    @property
    def found(self) -> bool:
        return all(v.passed for v in self.verdicts)


def exact_checks(f: MPoly, N: int = 24) -> list[Verdict]:
    out = [check_tangent_cone(f), check_discriminant_transversality(f)]
    if all(v.passed for v in out):
        out.append(check_equisingular_pencil(f, N=N))
    return out


def find_generic_frame(f: MPoly, seed: int = 0, tries: int = 12, N: int = 24,
                       with_heuristic: bool = False) -> FrameSearch:
    """Try the identity frame first, then seeded small shears (x + a z, y + b z)."""
    rng = random.Random(seed)
    candidates = [(Fraction(0), Fraction(0))]
    while len(candidates) < tries:
        a = Fraction(rng.randint(-4, 4), rng.choice((2, 3, 4, 5)))
        b = Fraction(rng.randint(-4, 4), rng.choice((2, 3, 4, 5)))
        if (a, b) not in candidates:
            candidates.append((a, b))
    audit = []
    last = None
    for a, b in candidates:
        g = shear(f, _mpq(a), _mpq(b)) if (a or b) else f
        verdicts = exact_checks(g, N)
        if with_heuristic and all(v.passed for v in verdicts):
            verdicts.append(check_no_vertical_limit_tangents(g, samples=200, seed=seed))
        audit.append(((str(a), str(b)), [v.line() for v in verdicts]))
        last = FrameSearch((a, b), g, verdicts, audit)
        if last.found:
            return last
    return last
