"""Numeric distance geometry on the surface: wedge distances, arc orders, regular wedges."""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import mpmath
import numpy as np
from scipy import optimize, stats

from .algebra import (
    AlgebraError,
    BigComplex,
    MPoly,
    Q,
    TruncSeries,
    discriminant,
    is_unit_scalar,
    to_mpc,
)
from .polar import PolarBranch, WedgeSystem
from .puiseux import series_contact


# ---------------------------------------------------------------------------
# Points and fast series evaluation


@dataclass
class PointSample:
    coords: tuple  # BigComplex per coordinate (x, y, z, t...)
    provenance: dict
    residual: float = 0.0

    def mid(self) -> tuple:
        return tuple(c.mid for c in self.coords)

    def certified(self, tol: float = 1e-20) -> bool:
        return self.residual <= tol


class SeriesEval:
    """Numeric evaluator for a TruncSeries in u with parameter coefficients."""

    def __init__(self, s: TruncSeries, dps: int = 50):
        self.params = s.params
        rows: dict = {}
        for (k, e), c in s.terms.items():
            rows.setdefault(k, []).append((e, to_mpc(c, dps)))
        self.rows = sorted(rows.items())
        self.ram = s.ram

    def __call__(self, u, pvals: Sequence) -> mpmath.mpc:
        acc = mpmath.mpc(0)
        upow = mpmath.mpc(1)
        last = 0
        ppow_cache: dict = {}
        for k, terms in self.rows:
            upow *= u ** (k - last)
            last = k
            coef = mpmath.mpc(0)
            for e, c in terms:
                term = c
                for i, d in enumerate(e):
                    if d:
                        key = (i, d)
                        if key not in ppow_cache:
                            ppow_cache[key] = pvals[i] ** d
                        term *= ppow_cache[key]
                coef += term
            acc += coef * upow
        return acc


def lift_z(f: MPoly, x, y, z0, tvals: dict | None = None, steps: int = 60):
    """Newton-correct z so that (x, y, z) lies on f = 0."""
    tvals = tvals or {}
    fz = f.diff("z")
    z = mpmath.mpc(z0)
    for _ in range(steps):
        vals = {"x": x, "y": y, "z": z, **tvals}
        g = f.evaluate({v: vals.get(v, 0) for v in f.vars})
        d = fz.evaluate({v: vals.get(v, 0) for v in fz.vars})
        if d == 0:
            break
        dz = g / d
        z -= dz
        if abs(dz) <= abs(z) * mpmath.eps * 4 or dz == 0:
            break
    return z


# ---------------------------------------------------------------------------
# Wedges over allowable sectors


@dataclass
class Wedge:
    branch: PolarBranch
    shift: int  # u -> theta**shift * u, theta = exp(2 pi i / n)
    label: str
    _y: SeriesEval = None
    _z: SeriesEval = None

    def prepare(self, dps: int):
        self._y = SeriesEval(self.branch.y, dps)
        self._z = SeriesEval(self.branch.z, dps)
        return self

    @property
    def m(self) -> int | None:
        return self.branch.m

    def point(self, u, b, t=None) -> tuple:
        n = self.branch.n
        uu = u * mpmath.expjpi(mpmath.mpf(2 * self.shift) / n) if self.shift else u
        pv = [b] + ([t] if t is not None and len(self.branch.y.params) > 1 else [])
        pv += [mpmath.mpc(0)] * (len(self.branch.y.params) - len(pv))
        out = (uu ** n, self._y(uu, pv), self._z(uu, pv))
        return out + ((t,) if len(self.branch.y.params) > 1 else ())


def _rotated(s: TruncSeries, shift: int, dps: int) -> dict:
    theta = mpmath.expjpi(mpmath.mpf(2 * shift) / s.ram)
    return {key: to_mpc(c, dps) * theta ** key[0] for key, c in s.terms.items()}


def _numeric_valuation(a: dict, b: dict, order: int, tol) -> int:
    for k in range(order):
        keys = {key for key in a if key[0] == k} | {key for key in b if key[0] == k}
        if any(abs(a.get(key, 0) - b.get(key, 0)) > tol for key in keys):
            return k
    return order


def expand_wedges(system: WedgeSystem, dps: int = 50, kinds=("polar",)) -> list[Wedge]:
    """All distinct wedges: each stored branch rotated by the n-th roots of unity."""
    out: list[Wedge] = []
    seen: list[dict] = []
    tol = mpmath.mpf(10) ** (-dps // 2)
    with mpmath.workdps(dps):
        for br in system.branches:
            if br.kind not in kinds:
                continue
            for s in range(br.n):
                rot = _rotated(br.y, s, dps)
                order = br.y.order
                if any(_numeric_valuation(rot, other, order, tol) >= order for other in seen):
                    continue
                seen.append(rot)
                out.append(Wedge(br, s, f"{br.label}" + (f"^{s}" if s else "")).prepare(dps))
    return out


def wedge_contact(w1: Wedge, w2: Wedge, dps: int = 50) -> int:
    tol = mpmath.mpf(10) ** (-dps // 2)
    with mpmath.workdps(dps):
        a = _rotated(w1.branch.y, w1.shift, dps)
        b = _rotated(w2.branch.y, w2.shift, dps)
    return _numeric_valuation(a, b, min(w1.branch.y.order, w2.branch.y.order), tol)


# ---------------------------------------------------------------------------
# Distance formulas


@dataclass
class FormulaStats:
    formula: str
    pair: str
    count: int
    ratio_min: float
    ratio_max: float
    failures: int
    histogram: list
    c: float

    @property
    def passed(self) -> bool:
        return self.count > 0 and self.failures == 0


@dataclass
class DistanceReport:
    stats: list[FormulaStats]
    seed: int
    eps: Fraction
    excluded: int = 0

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.stats)

    def by_formula(self) -> dict:
        out: dict = {}
        for s in self.stats:
            out.setdefault(s.formula, []).append(s)
        return out


def _norm(p, q) -> mpmath.mpf:
    return mpmath.sqrt(sum(abs(a - b) ** 2 for a, b in zip(p, q)))


class WedgeSampler:
    """Seeded pairs of wedge parameters inside |u|, |b|, |t| <= eps over one allowable sector."""

    def __init__(self, n: int, eps: Fraction, with_t: bool, seed: int = 0, depth: int = 8):
        self.n, self.eps, self.with_t = n, float(eps), with_t
        self.rng = random.Random(seed)
        self.depth = depth

    def _disk(self, r):
        rad = r * math.sqrt(self.rng.random())
        return mpmath.mpc(rad * math.cos(a := self.rng.uniform(0, 2 * math.pi)), rad * math.sin(a))

    def _u(self):
        r = self.eps * 2 ** (-self.depth * self.rng.random())
        arg = self.rng.uniform(0, 0.9 * 2 * math.pi / self.n)
        return mpmath.mpc(r * math.cos(arg), r * math.sin(arg))

    def pair(self) -> tuple:
        mode = self.rng.randrange(4)
        u1 = self._u()
        b1 = self._disk(self.eps)
        t1 = self._disk(self.eps) if self.with_t else None
        if mode == 0:
            u2, b2, t2 = self._u(), self._disk(self.eps), (self._disk(self.eps) if self.with_t else None)
        elif mode == 1:
            u2, b2, t2 = u1, self._disk(self.eps), t1
        elif mode == 2:
            d = 2.0 ** -self.rng.randint(2, 20)
            u2 = u1 * (1 + d * mpmath.expj(self.rng.uniform(-0.5, 0.5)))
            b2 = b1 + self._disk(self.eps) * 2.0 ** -self.rng.randint(0, 12)
            if abs(b2) > self.eps:
                b2 = b2 * (self.eps / abs(b2))
            t2 = t1
        else:
            u2, b2 = u1, b1
            t2 = self._disk(self.eps) if self.with_t else None
            if not self.with_t:
                b2 = self._disk(self.eps)
        return (u1, b1, t1), (u2, b2, t2)


def _rhs(kind: str, a, b, n: int, m: int | None, k: int | None) -> mpmath.mpf:
    (u1, b1, t1), (u2, b2, t2) = a, b
    terms = [abs(u1 ** n - u2 ** n)]
    if t1 is not None:
        terms.append(abs(t1 - t2))
    if kind in ("same-wedge", "equal-exponent"):
        terms.append(abs(b1 - b2) * abs(u1) ** m)
    if kind in ("contact", "equal-exponent"):
        terms.append(abs(u1) ** k)
    return max(terms)


def verify_distance_formulas(system: WedgeSystem, pairs: int = 1000, seed: int = 0, c: float = 10.0,
                             dps: int = 60, eps: Fraction | None = None) -> DistanceReport:
    """Ratios ||p_i - p_j|| / RHS for the three distance formulas over seeded pairs."""
    eps = system.epsilon if eps is None else eps
    with_t = len(system.branches[0].y.params) > 1
    out: list[FormulaStats] = []
    excluded = 0
    with mpmath.workdps(dps):
        wedges = expand_wedges(system, dps)
        n = system.n
        jobs = []
        for w in wedges:
            jobs.append(("same-wedge", w, w, None))
        for i in range(len(wedges)):
            for j in range(len(wedges)):
                if i == j:
                    continue
                wi, wj = wedges[i], wedges[j]
                k = wedge_contact(wi, wj, dps)
                if k <= min(wi.m, wj.m):
                    jobs.append(("contact", wi, wj, k))
                if wi.m == wj.m:
                    jobs.append(("equal-exponent", wi, wj, k))
        for idx, (kind, wi, wj, k) in enumerate(jobs):
            sampler = WedgeSampler(n, eps, with_t, seed + 7919 * idx)
            logs = []
            fails = 0
            count = 0
            while count < pairs:
                a, b = sampler.pair()
                pa, pb = wi.point(*a), wj.point(*b)
                lhs = _norm(pa, pb)
                rhs = _rhs(kind, a, b, n, wi.m, k)
                if lhs == 0 or rhs == 0:
                    excluded += 1
                    continue
                r = float(lhs / rhs)
                count += 1
                logs.append(math.log10(r))
                if not (1 / c <= r <= c):
                    fails += 1
            hist = np.histogram(logs, bins=8, range=(-math.log10(c), math.log10(c)))[0].tolist()
            out.append(FormulaStats(kind, f"{wi.label}-{wj.label}", count, 10 ** min(logs),
                                    10 ** max(logs), fails, hist, c))
    return DistanceReport(out, seed, eps, excluded)


# ---------------------------------------------------------------------------
# Distance to a branch


def dist_to_branch(point: Sequence, branch: PolarBranch, b: complex | None = 0, eps: float = 0.25,
                   dps: int = 50, grid: int = 9) -> tuple[float, float]:
    """Distance from a point (x, y, z[, t]) to a wedge (b free, |b| <= eps) or a curve (b fixed).

    Returns (distance, error estimate).  The minimization starts from every n-th
    root of x and a coarse b-grid, then polishes with Nelder-Mead in relative
    coordinates.
    """
    with mpmath.workdps(dps):
        pt = [to_mpc(v, dps) for v in point]
        n = branch.n
        ys, zs = SeriesEval(branch.y, dps), SeriesEval(branch.z, dps)
        t = pt[3] if len(pt) > 3 else None
        nparam = len(branch.y.params)

        def image(u, bb):
            pv = [bb] + ([t] if nparam > 1 else [])
            return (u ** n, ys(u, pv), zs(u, pv))

        base = [r * mpmath.expjpi(mpmath.mpf(2 * k) / n) for k in range(n)
                for r in [mpmath.root(pt[0], n)]] if pt[0] != 0 else [mpmath.mpc(0)]
        bgrid = [mpmath.mpc(b)] if b is not None else [
            mpmath.mpc(eps * (2 * i / (grid - 1) - 1), eps * (2 * j / (grid - 1) - 1))
            for i in range(grid) for j in range(grid)
            if (2 * i / (grid - 1) - 1) ** 2 + (2 * j / (grid - 1) - 1) ** 2 <= 1]
        best = None
        for u0 in base:
            for b0 in bgrid:
                d = _norm(pt[:3], image(u0, b0))
                if best is None or d < best[0]:
                    best = (d, u0, b0)
        d0, u0, b0 = best
        if d0 == 0:
            return 0.0, 0.0
        scale = d0
        uscale = abs(u0) if u0 != 0 else mpmath.mpf(eps)

        def obj(v):
            u = u0 + uscale * mpmath.mpc(v[0], v[1])
            bb = b0 if b is not None else b0 + eps * mpmath.mpc(v[2], v[3])
            if b is None and abs(bb) > eps:
                bb = bb * (eps / abs(bb))
            return float(_norm(pt[:3], image(u, bb)) / scale)

        x0 = np.zeros(2 if b is not None else 4)
        res = optimize.minimize(obj, x0, method="Nelder-Mead",
                                options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 4000})
        dist = float(scale) * float(res.fun)
        mesh = float(scale) * abs(float(res.fun) - obj(res.x * 0.999))
        return dist, max(mesh, dist * 1e-8)


def dist_to_x_axis(point: Sequence) -> float:
    return float(mpmath.sqrt(abs(mpmath.mpc(point[1])) ** 2 + abs(mpmath.mpc(point[2])) ** 2))


# ---------------------------------------------------------------------------
# Arcs


@dataclass
class ArcGerm:
    """s -> (s**n, y(s), z(s), t(s)); z may be left implicit and lifted onto f = 0."""

    n: int
    y: TruncSeries
    z: TruncSeries | None = None
    t: TruncSeries | None = None
    f: MPoly | None = None
    z_hint: Callable | None = None
    form: str = "x=s^n"

    def __post_init__(self):
        for name, s in (("y", self.y), ("z", self.z)):
            if s is None:
                continue
            for c in s.terms.values():
                if abs(complex(to_mpc(c)).imag) > 0:
                    raise AlgebraError("arc coefficients must be real")
            v = s.valuation()
            if v is not None and v < self.n:
                raise AlgebraError(f"{name}(s) must be O(s^n)")

    def point(self, s) -> tuple:
        s = mpmath.mpf(s)
        x = s ** self.n
        y = self.y.evaluate(s)
        tv = self.t.evaluate(s) if self.t is not None else None
        if self.z is not None:
            z = self.z.evaluate(s)
        else:
            z0 = self.z_hint(s) if self.z_hint else mpmath.mpc(0)
            z = lift_z(self.f, x, y, z0, {"t": tv} if tv is not None else {})
        return (x, y, z) + ((tv,) if tv is not None else ())

    def residual(self, f: MPoly, s) -> float:
        p = self.point(s)
        vals = dict(zip(("x", "y", "z", "t"), p))
        return float(abs(f.evaluate({v: vals.get(v, 0) for v in f.vars})))


@dataclass
class SlopeFit:
    slope: float
    ci: tuple
    scales: list
    values: list

    @property
    def width(self) -> float:
        return self.ci[1] - self.ci[0]


def fit_loglog(scales: Sequence[float], values: Sequence[float], drop_ends: bool = True) -> SlopeFit:
    """Least-squares slope of log2(value) against log2(scale) with a 95% interval."""
    xs = np.log2(np.asarray(scales, dtype=float))
    ys = np.log2(np.asarray(values, dtype=float))
    order = np.argsort(xs)
    xs, ys = xs[order], ys[order]
    if drop_ends and len(xs) > 4:
        xs, ys = xs[1:-1], ys[1:-1]
    res = stats.linregress(xs, ys)
    tq = stats.t.ppf(0.975, max(1, len(xs) - 2))
    half = tq * res.stderr
    return SlopeFit(float(res.slope), (float(res.slope - half), float(res.slope + half)),
                    [float(2 ** v) for v in xs], [float(2 ** v) for v in ys])


@dataclass
class ArcReport:
    fits: dict  # label -> (SlopeFit of dist to C_j, SlopeFit of projected distance)
    exponents: dict  # label -> (l_j, l~_j) in x-units
    verdicts: dict
    status: str


def _spine_distance(point, wedge: Wedge, dps: int) -> tuple[float, float]:
    """(3D distance, projected distance) from a point to the b = 0 spine of a wedge."""
    br = wedge.branch
    with mpmath.workdps(dps):
        x, y = point[0], point[1]
        t = point[3] if len(point) > 3 else None
        u0 = mpmath.root(x, br.n) if x != 0 else mpmath.mpc(0)
        cands = [u0 * mpmath.expjpi(mpmath.mpf(2 * k) / br.n) for k in range(br.n)]
        best_proj = min(abs(y - wedge.point(u, 0, t)[1]) for u in cands)
    d, _ = dist_to_branch(point, br, b=0, dps=dps)
    return d, float(best_proj)


def verify_arc_orders(arc: ArcGerm, system: WedgeSystem, scales: tuple[int, int] = (4, 20),
                      slack: float = 0.3, dps: int = 60) -> ArcReport:
    """Fit dist(arc(s), C_j) ~ s**l_j and the projected analogue; compare with m_j/n."""
    ss = [2.0 ** -k for k in range(scales[0], scales[1] + 1)]
    if len(ss) < 12:
        raise ValueError("need at least 12 dyadic scales")
    fits, exps, verdicts = {}, {}, {}
    status = "pass"
    with mpmath.workdps(dps):
        wedges = expand_wedges(system, dps)
        pts = [arc.point(s) for s in ss]
        for w in wedges:
            d3, dp = [], []
            for p in pts:
                a, b = _spine_distance(p, w, dps)
                d3.append(max(a, 1e-300))
                dp.append(max(b, 1e-300))
            f3, fp = fit_loglog(ss, d3), fit_loglog(ss, dp)
            fits[w.label] = (f3, fp)
            l, lt = f3.slope / arc.n, fp.slope / arc.n
            exps[w.label] = (l, lt)
            bound = w.m / system.n
            unstable = max(f3.width, fp.width) / arc.n > 0.25
            verdicts[w.label] = {
                "lower_bound": l <= bound + slack,
                "order_le_m": l <= bound + slack,
                "projected_equal": abs(l - lt) <= slack,
                "stable": not unstable,
            }
            if unstable:
                status = "inconclusive, refine truncation"
            elif not verdicts[w.label]["lower_bound"] and status == "pass":
                status = "fail"
    return ArcReport(fits, exps, verdicts, status)


# ---------------------------------------------------------------------------
# Regular wedges over a wing


@dataclass
class QuasiWingProbe:
    """q(u, v, t) = (u**n, y(u, t) + u**lt * v, t) over |v| <= eps."""

    n: int
    wing: TruncSeries  # y(u, t), params () or ("t",)
    lt: int
    eps: Fraction = Fraction(1, 8)
    contacts: dict = field(default_factory=dict)  # branch label -> l~_i (over n)
    separations: dict = field(default_factory=dict)  # (tau, nu) -> fitted r

    def wing_contacts(self, system: WedgeSystem) -> dict:
        out = {}
        for br in system.branches:
            spine = br.y.specialize({"b": 0})
            w = self.wing
            if w.params != spine.params:
                w = TruncSeries(w.terms, w.ram, w.order, spine.params, w.porder)
            c = series_contact(w, spine)
            k = None if c.undecided else c.value * self.n
            out[br.label] = k
        self.contacts = out
        return out

    def regular(self, system: WedgeSystem) -> tuple[bool, str]:
        cs = self.wing_contacts(system)
        finite = [k for k in cs.values() if k is not None]
        if not finite:
            return False, "wing coincides with a projected branch"
        ok_max = self.lt == max(finite)
        ok_m = all(cs[b.label] is None or cs[b.label] <= b.m for b in system.polar)
        msg = []
        if not ok_max:
            msg.append(f"l~ = {self.lt} differs from max contact {max(finite)}")
        if not ok_m:
            msg.append("a contact exceeds the wedge exponent")
        return ok_max and ok_m, "; ".join(msg) or "regular"


@dataclass
class ProbeReport:
    disc_order: int | None
    disc_unit: bool
    disc_fit: float | None
    partial_bound: float
    partial_growth: float
    structure_slope: float | None
    separations: dict
    status: str
    detail: str = ""


def _wing_mpoly(wp: QuasiWingProbe) -> MPoly:
    terms = {}
    tp = "t" in wp.wing.params
    for (k, e), c in wp.wing.terms.items():
        terms[(k, e[0] if tp else 0)] = c
    return MPoly(("u", "t"), terms)


def wing_discriminant(f: MPoly, wp: QuasiWingProbe) -> MPoly:
    """disc_z f(u**n, y(u, t) + u**lt v, z, t) as a polynomial in (u, v, t)."""
    u, v = MPoly.var("u", ()), MPoly.var("v", ())
    y = _wing_mpoly(wp) + u ** wp.lt * v
    g = f.subs({"x": u ** wp.n, "y": y})
    if g.degree("z") < 2:
        return MPoly.const(Q(1), ("u", "v"))
    return discriminant(g, "z")


def _unit_dominates(p: MPoly, eps: float) -> bool:
    c0 = p.constant_term()
    if not is_unit_scalar(c0):
        return False
    tail = sum(abs(complex(to_mpc(c))) * eps ** sum(e) for e, c in p.terms.items() if any(e))
    return tail < abs(complex(to_mpc(c0)))


def probe_regular_wedge(f: MPoly, wp: QuasiWingProbe, scales: tuple[int, int] = (4, 16),
                        angles: int = 6, dps: int = 40) -> ProbeReport:
    """Discriminant structure, bounded root partials, and the v-structure of the roots."""
    eps = float(wp.eps)
    dg = wing_discriminant(f, wp)
    dg = dg.with_vars(("u", "v") + tuple(v for v in dg.vars if v not in ("u", "v")))
    if dg.is_zero():
        return ProbeReport(None, False, None, math.inf, math.inf, None, {}, "fail", "wing discriminant vanishes")
    iu = dg.vars.index("u")
    N = min(e[iu] for e in dg.terms)
    unit = MPoly(dg.vars, {e[:iu] + (e[iu] - N,) + e[iu + 1:]: c for e, c in dg.terms.items()})
    disc_unit = _unit_dominates(unit, eps)
    others = [f.diff(v) for v in ("x", "y", "t") if v in f.vars]
    fz = f.diff("z")
    ss = [2.0 ** -k for k in range(scales[0], scales[1] + 1)]
    ws = SeriesEval(wp.wing, dps)
    zc = f.coeff_list("z")
    maxima, dvals, struct = [], [], []
    seps: dict = {}
    collision = False
    with mpmath.workdps(dps):
        for s in ss:
            worst = 0.0
            dmin = math.inf
            sdev = 0.0
            for a in range(angles):
                u = mpmath.mpf(s) * mpmath.expjpi(mpmath.mpf(a) / (angles * wp.n))
                for vv in (0, 0.5, 1.0):
                    v = mpmath.mpf(eps) * vv * mpmath.expjpi(mpmath.mpf(2 * a + 1) / angles)
                    y = ws(u, [0] * len(wp.wing.params)) + u ** wp.lt * v
                    x = u ** wp.n
                    cs = [c.evaluate({k: {"x": x, "y": y}.get(k, 0) for k in c.vars}) if c.vars
                          else mpmath.mpc(complex(c.constant_term())) for c in reversed(zc)]
                    roots = mpmath.polyroots(cs, maxsteps=300, extraprec=2 * dps)
                    roots = sorted(roots, key=lambda r: (float(mpmath.re(r)), float(mpmath.im(r))))
                    for i in range(len(roots)):
                        for j in range(i + 1, len(roots)):
                            gap = abs(roots[i] - roots[j])
                            if gap < mpmath.mpf(2) ** (-mpmath.mp.prec // 2):
                                collision = True
                            seps.setdefault((i, j), []).append((s, float(gap)))
                    for z in roots:
                        pt = {"x": x, "y": y, "z": z}
                        gz = fz.evaluate({k: pt.get(k, 0) for k in fz.vars})
                        if gz == 0:
                            collision = True
                            continue
                        parts = [abs(g.evaluate({k: pt.get(k, 0) for k in g.vars}) / gz) for g in others]
                        worst = max(worst, float(max(parts)))
                    full = {"u": u, "v": v}
                    dv = abs(dg.evaluate({k: full.get(k, 0) for k in dg.vars}))
                    dmin = min(dmin, float(dv))
                    if vv == 1.0 and roots:
                        y0 = ws(u, [0] * len(wp.wing.params))
                        cs0 = [c.evaluate({k: {"x": x, "y": y0}.get(k, 0) for k in c.vars}) if c.vars
                               else mpmath.mpc(complex(c.constant_term())) for c in reversed(zc)]
                        r0 = mpmath.polyroots(cs0, maxsteps=300, extraprec=2 * dps)
                        dev = max(min(abs(r - q) for q in r0) for r in roots)
                        sdev = max(sdev, float(dev / abs(v)))
            maxima.append(max(worst, 1e-300))
            dvals.append(max(dmin, 1e-300))
            struct.append(max(sdev, 1e-300))
    pfit = fit_loglog(ss, maxima)
    dfit = fit_loglog(ss, dvals)
    sfit = fit_loglog(ss, struct)
    sep_fits = {k: fit_loglog([a for a, _ in v], [max(b, 1e-300) for _, b in v]).slope
                for k, v in seps.items() if len({a for a, _ in v}) > 4}
    wp.separations = sep_fits
    bounded = pfit.slope >= -0.1
    status = "pass" if (disc_unit and bounded and not collision) else "fail"
    detail = []
    if not disc_unit:
        detail.append("discriminant is not u^N times a unit on the wedge")
    if not bounded:
        detail.append("root partials grow towards the origin")
    if collision:
        detail.append("root collision inside the wedge")
    return ProbeReport(N, disc_unit, dfit.slope, max(maxima), -pfit.slope, sfit.slope, sep_fits, status,
                       "; ".join(detail))
