"""Polar system of the pencil of projections, its branches, wedge exponents and contacts.

For a germ f(x, y, z, t) the pencil (x, y, z) -> (x, y - b z) is encoded by the
sheared polynomial F(X, Y, Z, b, t) = f(X, Y + b Z, Z, t).  Branches of the
discriminant of F in Z give Y_i(u, b, t); the fibre coordinate follows from
Z_i = -dY_i/db, and in the original coordinates y_i = Y_i + b Z_i, z_i = Z_i.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Sequence

import mpmath
import sympy as sp

from .algebra import (
    AlgebraError,
    MPoly,
    Q,
    TruncSeries,
    discriminant,
    evaluate_mpoly_on_series,
    format_scalar,
    is_unit_scalar,
    mpoly_from_sympy,
    mpoly_to_sympy,
    subresultant,
    to_mpc,
)
from .puiseux import PuiseuxError, newton_puiseux_param, series_contact

BIG = 1 << 30
WEDGE_VIOLATION = "wedge structure violated"


class PolarError(AlgebraError):
    pass


class DiscriminantWarning(UserWarning):
    pass


def germ_params(f: MPoly) -> tuple[str, ...]:
    return tuple(v for v in f.used_vars() if v not in ("x", "y", "z"))


def restrict_to_line(f: MPoly, direction: Sequence, name: str = "t") -> MPoly:
    """Restrict a multi-parameter family to the line t_k = direction[k] * t."""
    ps = germ_params(f)
    if len(direction) != len(ps):
        raise PolarError(f"line direction needs {len(ps)} entries")
    line = MPoly.var(name, ())
    return f.subs({p: line * MPoly.const(Q(d) if isinstance(d, int) else d, ()) for p, d in zip(ps, direction)})


# ---------------------------------------------------------------------------
# The polar system


def build_polar_system(f: MPoly) -> tuple[MPoly, MPoly, MPoly]:
    """Return (F, dF/dZ, disc_Z F) for the sheared family."""
    params = germ_params(f)
    if len(params) > 1:
        raise PolarError("several parameters: restrict to a line through 0 first")
    if f.degree("z") < 1:
        raise PolarError("projection along z is not finite (f does not involve z)")
    X, Y, Z, b = (MPoly.var(v, ()) for v in ("X", "Y", "Z", "b"))
    sheared = {"x": X, "y": Y + b * Z, "z": Z}
    F = f.subs(sheared)
    FZ = b * f.diff("y").subs(sheared) + f.diff("z").subs(sheared)
    if FZ != F.diff("Z"):
        raise PolarError("chain rule mismatch in the polar equation")
    delta = discriminant(F, "Z")
    return F, FZ, delta


@dataclass
class DiscriminantFactor:
    poly: MPoly  # in X, Y and the parameters
    multiplicity: int


def reduce_discriminant(delta: MPoly, params: tuple) -> tuple[list[DiscriminantFactor], list[str]]:
    """Irreducible factors of the discriminant that pass through the origin.

    Factors free of X and Y (the parameter content) and factors that are units
    at the origin are dropped.  A factor X is a vertical component and is
    dropped with a warning.
    """
    notes: list[str] = []
    gens = [sp.Symbol(v) for v in delta.vars]
    _, facs = sp.factor_list(mpoly_to_sympy(delta), *gens)
    Xs, Ys = sp.Symbol("X"), sp.Symbol("Y")
    out = []
    for fac, mult in facs:
        syms = fac.free_symbols
        if Xs not in syms and Ys not in syms:
            continue
        if sp.expand(fac - Xs) == 0 or sp.expand(fac + Xs) == 0:
            notes.append("discriminant contains the vertical line X = 0; dropped")
            continue
        at_origin = fac.subs({s: 0 for s in syms})
        if at_origin != 0:
            continue
        vs = tuple(v for v in ("X", "Y") + params)
        p = mpoly_from_sympy(sp.expand(fac), [sp.Symbol(v) for v in vs])
        out.append(DiscriminantFactor(_normalize(p, params), int(mult)))
    for msg in notes:
        warnings.warn(msg, DiscriminantWarning, stacklevel=2)
    return out, notes


def _normalize(p: MPoly, params: tuple) -> MPoly:
    """Scale so the lex-leading coefficient of the lowest form at zero parameters is 1."""
    base = p.subs({q: 0 for q in params}) if params else p
    low = base.lowest_form() if not base.is_zero() else p.lowest_form()
    lead = low.sorted_terms()[0][1]
    return p * MPoly.const(Q(1) / lead, ())


# ---------------------------------------------------------------------------
# Branches


@dataclass
class PolarBranch:
    n: int
    Y: TruncSeries
    Z: TruncSeries
    y: TruncSeries
    z: TruncSeries
    kind: str  # "polar" | "singular"
    m: int | None = None  # None marks the singular (infinite) case
    label: str = ""
    own_ram: int = 1
    factor: int = 0
    coeff_field: str = "Q"
    exact: bool = True
    numeric_only: bool = False
    residual_orders: tuple = ()
    certificates: dict = field(default_factory=dict)

    @property
    def m_label(self) -> str:
        return "inf" if self.m is None else str(self.m)

    def describe(self) -> str:
        return f"{self.label}: kind={self.kind} n={self.own_ram} m={self.m_label} field={self.coeff_field}"


def _xseries(n: int, params: tuple, porder: int) -> TruncSeries:
    return TruncSeries.monomial(n, Q(1), n, BIG, params, BIG)


def _bseries(n: int, params: tuple) -> TruncSeries:
    return TruncSeries.monomial(0, Q(1), n, BIG, params, BIG, pexp=(1,) + (0,) * (len(params) - 1))


def evaluate_on_branch(P: MPoly, n: int, Y: TruncSeries, Z: TruncSeries | None, order: int) -> TruncSeries:
    params = Y.params
    assign = {"X": _xseries(n, params, Y.porder), "Y": Y}
    if Z is not None:
        assign["Z"] = Z
    return evaluate_mpoly_on_series(P, assign, params, n, order, Y.porder)


def _window_valuation(s: TruncSeries) -> int:
    v = s.valuation()
    return s.order if v is None else v


def solve_branches(F: MPoly, N: int = 24, porder: int | None = None, FZ: MPoly | None = None,
                   delta: MPoly | None = None, pad: int = 0) -> list[PolarBranch]:
    """Parameterized branches of {F = F'_Z = 0}, lifted to a common ramification."""
    params = ("b",) + tuple(v for v in F.used_vars() if v not in ("X", "Y", "Z", "b"))
    FZ = F.diff("Z") if FZ is None else FZ
    delta = discriminant(F, "Z") if delta is None else delta
    porder = N if porder is None else porder
    work = N + pad
    factors, _ = reduce_discriminant(delta, params)
    raw = []
    for idx, fac in enumerate(factors):
        curve = fac.poly.rename({"X": "x", "Y": "y"})
        res = newton_puiseux_param(curve, params, N=work, porder=porder)
        if not res.uniform:
            raise PolarError(f"discriminant is not equisingular in the parameters: {res.verdict}, "
                             f"locus {res.locus_text()}")
        for br in res.branches:
            raw.append((idx, br))
    if not raw:
        raise PolarError("discriminant has no branch through the origin")
    n = reduce(lcm, (br.ram for _, br in raw), 1)
    out = []
    for idx, br in raw:
        Y = br.series.lift(n // br.ram)
        Y = TruncSeries(Y.terms, n, Y.order, params, porder, Y.exact)
        Z = -Y.diff_param("b")
        y = Y + _bseries(n, params) * Z
        y = y.truncate(Y.order)
        kind = "polar" if (y.depends_on("b") or Z.depends_on("b")) else "singular"
        rf = evaluate_on_branch(F, n, Y, Z, work)
        rz = evaluate_on_branch(FZ, n, Y, Z, work)
        orders = (_window_valuation(rf), _window_valuation(rz))
        numeric_only = not br.exact or min(orders) < N
        if numeric_only and br.exact:
            warnings.warn("Z-recovery failed, branch reported numeric-only", UserWarning, stacklevel=2)
        out.append(PolarBranch(n, Y, Z, y, Z, kind, None, own_ram=br.ram, factor=idx,
                               coeff_field=br.field_label(), exact=br.exact, numeric_only=numeric_only,
                               residual_orders=orders))
    for br in out:
        if br.kind == "polar":
            br.m = wedge_exponent(br)[0]
    out.sort(key=_branch_sort_key)
    counts = {"polar": 0, "singular": 0}
    for br in out:
        counts[br.kind] += 1
        br.label = f"{'P' if br.kind == 'polar' else 'S'}{counts[br.kind]}"
    return out


def _branch_sort_key(br: PolarBranch):
    lead = []
    for (k, e), c in sorted(br.y.terms.items())[:4]:
        v = to_mpc(c, 20)
        lead.append((k, e, round(float(v.real), 12), round(float(v.imag), 12)))
    return (0 if br.kind == "polar" else 1, br.m if br.m is not None else BIG, tuple(lead))


# ---------------------------------------------------------------------------
# Key identity via an independent route


@dataclass
class KeyIdentityResult:
    order: int  # u-order of Z_indep + dY/db inside the known window
    window: int  # u-order up to which the comparison is meaningful
    exact: bool
    route: str
    numeric_max_error: float | None = None

    def passed(self, N: int) -> bool:
        return self.exact and self.order >= N


def subresultant_z(F: MPoly, FZ: MPoly) -> tuple[MPoly, MPoly]:
    """(s10, s11) with S1 = s11 Z + s10, the first subresultant of F and dF/dZ in Z."""
    s10, s11 = subresultant(F, FZ, "Z", 1)
    return s10, s11


def key_identity_residual(branch: PolarBranch, F: MPoly, FZ: MPoly, N: int = 24,
                          s1: tuple | None = None, samples: int = 6) -> KeyIdentityResult:
    """Compare -dY/db with the common root of F and dF/dZ obtained from the first subresultant."""
    s10, s11 = subresultant_z(F, FZ) if s1 is None else s1
    n, Y = branch.n, branch.Y
    order = Y.order
    a = evaluate_on_branch(s10, n, Y, None, order)
    c = evaluate_on_branch(s11, n, Y, None, order)
    if c.is_zero():
        return KeyIdentityResult(0, 0, False, "subresultant degenerate",
                                 _numeric_root_match(branch, F, samples))
    # S1(Z_indep) = 0 pins Z_indep = -s10/s11 over the fraction field; instead of dividing,
    # measure ord(s11*Z + s10) - ord(s11), the u-order of Z_indep - Z.
    Z = -Y.diff_param("b")
    resid = c * Z + a
    shift = c.valuation()
    window = resid.order - shift
    v = resid.valuation()
    got = window if v is None else min(v - shift, window)
    return KeyIdentityResult(got, window, branch.exact and resid.exact, "subresultant",
                             _numeric_root_match(branch, F, samples))


def _numeric_root_match(branch: PolarBranch, F: MPoly, samples: int) -> float | None:
    """Max relative gap between Z_i(u, b) and the nearest double root of F in Z at sampled points."""
    if samples <= 0:
        return None
    params = branch.Y.params
    rng = mpmath.mpf
    worst = 0.0
    dZ = F.diff("Z")
    coeffs = F.coeff_list("Z")
    with mpmath.workdps(40):
        for i in range(samples):
            u = mpmath.mpf(2) ** -(4 + i % 3) * mpmath.expjpi(rng(i) / 7)
            pv = {p: (rng(1) / 16) * (1 + rng(k) / 3) * (-1) ** i for k, p in enumerate(params)}
            yv = branch.Y.evaluate(u, pv)
            zv = branch.Z.evaluate(u, pv)
            vals = {"X": u ** branch.n, "Y": yv, **pv}
            cs = []
            for cpoly in reversed(coeffs):
                full = {v: vals.get(v, 0) for v in cpoly.vars}
                cs.append(cpoly.evaluate(full) if cpoly.vars else to_mpc(cpoly.constant_term()))
            while cs and abs(cs[0]) == 0:
                cs.pop(0)
            if len(cs) < 2:
                continue
            roots = mpmath.polyroots(cs, maxsteps=300, extraprec=120)
            scores = []
            for r in roots:
                full = dict(vals, Z=r)
                g = dZ.evaluate({v: full.get(v, 0) for v in dZ.vars})
                scores.append((abs(g), r))
            _, best = min(scores, key=lambda s: abs(s[1] - zv))
            scale = max(abs(zv), abs(u) ** (branch.n + 1), mpmath.mpf(10) ** -30)
            worst = max(worst, float(abs(best - zv) / scale))
    return worst


# ---------------------------------------------------------------------------
# Wedge exponents


def _split_b(s: TruncSeries, power: int) -> TruncSeries:
    """Terms of b-degree >= power, divided by b**power."""
    out = {}
    for (k, e), c in s.terms.items():
        if e[0] >= power:
            out[(k, (e[0] - power,) + e[1:])] = c
    return TruncSeries(out, s.ram, s.order, s.params, s.porder - power, s.exact)


def _b_degree_terms(s: TruncSeries, deg: int) -> dict:
    return {key: c for key, c in s.terms.items() if key[1][0] == deg}


def wedge_exponent(br: PolarBranch) -> tuple[int | None, dict]:
    """m with z - z|_{b=0} = b u^m psi and y - y|_{b=0} = b^2 u^m phi, plus certificates."""
    params = br.y.params
    zero = (0,) * len(params)
    dz = _split_b(br.z, 1)
    dy = _split_b(br.y, 2)
    linear_y = _b_degree_terms(br.y, 1)
    if dz.is_zero() and dy.is_zero():
        return None, {"singular": True}
    mz = dz.valuation()
    my = dy.valuation()
    psi0 = dz.terms.get((mz, zero), Q(0)) if mz is not None else Q(0)
    phi0 = dy.terms.get((my, zero), Q(0)) if my is not None else Q(0)
    cert = {
        "m_from_z": mz,
        "m_from_y": my,
        "psi_unit": is_unit_scalar(psi0),
        "phi_unit": is_unit_scalar(phi0),
        "no_linear_b_in_y": not linear_y,
        "psi0": format_scalar(psi0),
        "phi0": format_scalar(phi0),
    }
    ok = (mz is not None and mz == my and cert["psi_unit"] and cert["phi_unit"]
          and cert["no_linear_b_in_y"] and mz >= br.n)
    cert["ok"] = ok
    if not ok:
        cert["flag"] = WEDGE_VIOLATION
    return mz, cert


def wedge_exponents(system: "WedgeSystem") -> list[tuple[str, int | None, dict]]:
    out = []
    for br in system.branches:
        if br.kind == "singular":
            out.append((br.label, None, {"singular": True, "ok": True}))
            continue
        m, cert = wedge_exponent(br)
        br.m, br.certificates = m, cert
        out.append((br.label, m, cert))
    return out


# ---------------------------------------------------------------------------
# Contacts


@dataclass
class ContactEntry:
    i: str
    j: str
    k: int | None  # over the common ramification
    certified: bool
    undecided: bool = False


def branch_contact(bi: PolarBranch, bj: PolarBranch) -> ContactEntry:
    c = series_contact(bi.y, bj.y)
    if c.undecided:
        return ContactEntry(bi.label, bj.label, None, False, True)
    k = c.value * bi.n
    if k.denominator != 1:
        raise PolarError("contact is not integral over the common ramification")
    return ContactEntry(bi.label, bj.label, int(k), c.certified)


def _y0_minus_bz0(br: PolarBranch) -> TruncSeries:
    y0 = br.y.specialize({"b": 0})
    z0 = br.z.specialize({"b": 0})
    params = br.y.params
    lift = lambda s: TruncSeries({(k, (0,) + e): c for (k, e), c in s.terms.items()}, br.n, s.order,
                                 params, br.y.porder)
    return lift(y0) - _bseries(br.n, params) * lift(z0)


def contact_matrix(system: "WedgeSystem") -> dict:
    """Pairwise contacts plus the structural checks tied to them."""
    brs = system.branches
    entries = {}
    for a in range(len(brs)):
        for c in range(a + 1, len(brs)):
            e = branch_contact(brs[a], brs[c])
            entries[(brs[a].label, brs[c].label)] = e
    checks = {"Y_structure": {}, "distinct_m_bound": [], "singular_distance": [], "transversal": []}
    for br in brs:
        if br.kind != "polar":
            continue
        diff = br.Y - _y0_minus_bz0(br)
        rest = _split_b(diff, 2)
        low = _b_degree_terms(diff, 0) or _b_degree_terms(diff, 1)
        v = rest.valuation()
        unit = v is not None and is_unit_scalar(rest.terms.get((v, (0,) * len(br.y.params)), Q(0)))
        checks["Y_structure"][br.label] = bool(not low and v == br.m and unit)
    for (li, lj), e in entries.items():
        bi = next(b for b in brs if b.label == li)
        bj = next(b for b in brs if b.label == lj)
        if e.undecided:
            continue
        checks["transversal"].append((li, lj, e.k >= system.n))
        if bi.kind == bj.kind == "polar" and bi.m != bj.m:
            checks["distinct_m_bound"].append((li, lj, e.k <= min(bi.m, bj.m)))
        if {bi.kind, bj.kind} == {"polar", "singular"}:
            pol = bi if bi.kind == "polar" else bj
            checks["singular_distance"].append((pol.label, (bj if pol is bi else bi).label, e.k <= pol.m))
    return {"entries": entries, "checks": checks}


def contact_table(system: "WedgeSystem") -> list[list]:
    labels = [b.label for b in system.branches]
    table = []
    for a in labels:
        row = []
        for c in labels:
            if a == c:
                row.append(None)
                continue
            e = system.contacts["entries"].get((a, c)) or system.contacts["entries"].get((c, a))
            row.append(e.k)
        table.append(row)
    return table


# ---------------------------------------------------------------------------
# Wedge width


def _dominates(series: TruncSeries, eps) -> bool:
    zero = (0,) * len(series.params)
    v = series.valuation()
    if v is None:
        return False
    c0 = abs(to_mpc(series.terms.get((v, zero), Q(0))))
    if c0 == 0:
        return False
    tail = mpmath.mpf(0)
    for (k, e), c in series.terms.items():
        if (k, e) == (v, zero):
            continue
        tail += abs(to_mpc(c)) * eps ** (k - v + sum(e))
    return tail < c0


def wedge_epsilon(branches: list[PolarBranch], max_k: int = 40) -> Fraction:
    """Largest 2^-k <= 1/4 on which every unit certificate keeps its constant term dominant."""
    units = []
    for br in branches:
        if br.kind != "polar":
            continue
        units.append(_split_b(br.z, 1))
        units.append(_split_b(br.y, 2))
    for k in range(2, max_k + 1):
        eps = mpmath.mpf(2) ** -k
        if all(_dominates(s, eps) for s in units):
            return Fraction(1, 2 ** k)
    return Fraction(1, 2 ** max_k)


# ---------------------------------------------------------------------------
# Full system


@dataclass
class WedgeSystem:
    f: MPoly
    F: MPoly
    FZ: MPoly
    delta: MPoly
    branches: list[PolarBranch]
    n: int
    N: int
    porder: int
    epsilon: Fraction
    contacts: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    @property
    def polar(self) -> list[PolarBranch]:
        return [b for b in self.branches if b.kind == "polar"]

    @property
    def singular(self) -> list[PolarBranch]:
        return [b for b in self.branches if b.kind == "singular"]

    def singular_locus_text(self) -> str:
        parts = []
        for br in self.singular:
            if br.y.is_zero() and br.z.is_zero() and br.n == br.own_ram == 1:
                parts.append("x-axis")
            else:
                parts.append(f"(u^{br.n}, {br.y.to_mpoly()}, {br.z.to_mpoly()})")
        return ", ".join(parts) if parts else "empty"


def polar_wedge_system(f: MPoly, N: int = 24, porder: int | None = None, pad: int = 4) -> WedgeSystem:
    """Build and solve the polar system, then compute exponents, contacts and the wedge width."""
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        F, FZ, delta = build_polar_system(f)
        branches = solve_branches(F, N, porder, FZ, delta, pad)
    notes = sorted({str(w.message) for w in caught})
    n = branches[0].n
    system = WedgeSystem(f, F, FZ, delta, branches, n, N, N if porder is None else porder,
                         wedge_epsilon(branches), notes=notes)
    wedge_exponents(system)
    system.contacts = contact_matrix(system)
    return system
