"""Stratified Lipschitz vector fields on wedges, the explicit extension, and Mostowski chains."""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import mpmath
import numpy as np

from .algebra import MPoly, Q, TruncSeries, is_zero, to_mpc
from .metric import SeriesEval, SlopeFit, Wedge, expand_wedges, fit_loglog, wedge_contact
from .polar import PolarBranch, WedgeSystem

COMPONENTS = ("alpha", "beta", "delta")
BIG = 1 << 30


class StratError(ValueError):
    pass


class ChainError(StratError):
    """A chain violated its defining inequalities or derived properties."""


# ---------------------------------------------------------------------------
# Growth statistics


@dataclass
class GrowthFit:
    """Growth exponent g of C(s) ~ s**(-g) as s -> 0, with a 95% band."""

    exponent: float
    ci: tuple
    scales: list
    values: list
    tol: float = 0.2

    @property
    def bounded(self) -> bool:
        lo, hi = self.ci
        return self.exponent <= self.tol or lo <= 0.0 <= hi

    @property
    def growing(self) -> bool:
        return not self.bounded

    def describe(self) -> str:
        lo, hi = self.ci
        return f"g = {self.exponent:.3f} [{lo:.3f}, {hi:.3f}]"


def growth_fit(scales: Sequence[float], values: Sequence[float], drop_ends: bool = True,
               tol: float = 0.2) -> GrowthFit:
    vals = [float(v) for v in values]
    positive = [v for v in vals if v > 0 and math.isfinite(v)]
    if not positive:
        return GrowthFit(0.0, (0.0, 0.0), list(scales), vals, tol)
    floor = min(positive)
    vals_f = [v if v > 0 else floor for v in vals]
    fit: SlopeFit = fit_loglog(scales, vals_f, drop_ends)
    lo, hi = fit.ci
    return GrowthFit(-fit.slope, (-hi, -lo), list(scales), vals, tol)


def _mp(v):
    if isinstance(v, Fraction):
        return mpmath.mpf(v.numerator) / v.denominator
    return to_mpc(v) if not isinstance(v, (int, float, mpmath.mpf, mpmath.mpc)) else v


def _vnorm(v) -> mpmath.mpf:
    return mpmath.sqrt(sum(abs(c) ** 2 for c in v))


def _opnorm(mat) -> mpmath.mpf:
    """Spectral norm of a complex matrix (equal to the norm of its real form)."""
    rows = [[mpmath.mpc(c) for c in r] for r in mat]
    big = max((abs(c) for r in rows for c in r), default=mpmath.mpf(0))
    if big == 0:
        return mpmath.mpf(0)
    arr = np.array([[complex(c / big) for c in r] for r in rows])
    return big * mpmath.mpf(float(np.linalg.norm(arr, 2)))


# ---------------------------------------------------------------------------
# Vector fields in wedge coordinates


def _series_at_zero_b(s: TruncSeries) -> TruncSeries:
    """Drop every term with a positive power of b, keeping the parameter layout."""
    return TruncSeries({k: c for k, c in s.terms.items() if k[1][0] == 0}, s.ram, s.order, s.params, s.porder)


def _exact_eval(s: TruncSeries, u, pvals: Sequence):
    acc = Q(0)
    for (k, e), c in s.terms.items():
        term = c * (u ** k if k else 1)
        for val, d in zip(pvals, e):
            if d:
                term = term * val ** d
        acc = acc + term
    return acc


Component = TruncSeries | Callable | None


@dataclass
class WedgeVF:
    """Per-branch coefficients of alpha d/dt + beta d/dx + delta d/db in wedge coordinates.

    Each entry is a TruncSeries in u (x = u**n) over the branch parameters, or a
    callable (u, b, t) -> number for sampled fields; None means identically zero.
    """

    comps: dict  # label -> {"alpha": ..., "beta": ..., "delta": ...}
    name: str = ""
    _cache: dict = field(default_factory=dict, repr=False)

    def component(self, label: str, which: str) -> Component:
        return self.comps.get(label, {}).get(which)

    def evaluate(self, label: str, which: str, u, b, t=None, dps: int = 50):
        c = self.component(label, which)
        if c is None:
            return mpmath.mpc(0)
        if isinstance(c, TruncSeries):
            key = (label, which, dps)
            ev = self._cache.get(key)
            if ev is None:
                ev = self._cache[key] = SeriesEval(c, dps)
            pv = [b] + ([t] if len(c.params) > 1 else [])
            pv += [mpmath.mpc(0)] * (len(c.params) - len(pv))
            return ev(u, pv)
        return mpmath.mpc(c(u, b, t))

    def invariant_violations(self, system: WedgeSystem) -> list[str]:
        """Stratification and well-definedness failures, exact for series entries."""
        out = []
        for br in system.branches:
            for which in COMPONENTS:
                c = self.component(br.label, which)
                if not isinstance(c, TruncSeries):
                    continue
                if which == "beta" and any(k == 0 for k, _ in c.terms):
                    out.append(f"{br.label}: beta(0,b,t) != 0")
                if which == "alpha" and any(k == 0 and e[0] > 0 for k, e in c.terms):
                    out.append(f"{br.label}: alpha(0,b,t) depends on b")
                if which == "delta" and br.kind == "polar" and any(e[0] == 0 for _, e in c.terms):
                    out.append(f"{br.label}: delta(x,0,t) != 0")
        return out

    def __add__(self, other: "WedgeVF") -> "WedgeVF":
        return self.combine(1, other, 1)

    def combine(self, a, other: "WedgeVF", c) -> "WedgeVF":
        out: dict = {}
        for label in set(self.comps) | set(other.comps):
            row = {}
            for which in COMPONENTS:
                p, q = self.component(label, which), other.component(label, which)
                if p is None and q is None:
                    continue
                if not isinstance(p, (TruncSeries, type(None))) or not isinstance(q, (TruncSeries, type(None))):
                    raise StratError("linear combinations need series components")
                terms = [s.scale(Q(w)) for s, w in ((p, a), (q, c)) if s is not None]
                row[which] = terms[0] if len(terms) == 1 else terms[0] + terms[1]
            out[label] = row
        return WedgeVF(out, f"{a}*{self.name}+{c}*{other.name}")

    def same_as(self, other: "WedgeVF") -> int:
        """Number of (branch, component) entries whose series differ; 0 means equal."""
        bad = 0
        for label in set(self.comps) | set(other.comps):
            for which in COMPONENTS:
                p, q = self.component(label, which), other.component(label, which)
                if p is None and q is None:
                    continue
                if p is None or q is None:
                    s = p if p is not None else q
                    bad += 0 if s.is_zero() else 1
                    continue
                bad += 0 if (p - q).is_zero() else 1
        return bad


def _like(br: PolarBranch, terms: dict) -> TruncSeries:
    return TruncSeries(terms, br.n, BIG, br.y.params, BIG)


def _b_exp(br: PolarBranch, power: int = 1) -> tuple:
    return (power,) + (0,) * (len(br.y.params) - 1)


def generator_field(system: WedgeSystem, kind: str) -> WedgeVF:
    """Standard fields: "xdx" (x d/dx), "bdb" (b d/db), "t" (d/dt), "db" (d/db), "zero"."""
    comps = {}
    for br in system.branches:
        zero = (0,) * len(br.y.params)
        row = {}
        if kind == "xdx":
            row["beta"] = _like(br, {(br.n, zero): Q(1)})
        elif kind == "bdb" and br.kind == "polar":
            row["delta"] = _like(br, {(0, _b_exp(br)): Q(1)})
        elif kind == "db" and br.kind == "polar":
            row["delta"] = _like(br, {(0, zero): Q(1)})
        elif kind == "t":
            if len(br.y.params) < 2:
                raise StratError("germ has no parameter t")
            row["alpha"] = _like(br, {(0, zero): Q(1)})
        elif kind not in ("zero", "bdb", "db"):
            raise StratError(f"unknown generator {kind!r}")
        comps[br.label] = row
    return WedgeVF(comps, kind)


# ---------------------------------------------------------------------------
# Single-wedge and two-wedge criteria


@dataclass
class ConditionResult:
    name: str
    constants: list  # per scale
    fit: GrowthFit
    bound: float
    passed: bool
    detail: str = ""

    @property
    def constant(self) -> float:
        return max(self.constants) if self.constants else 0.0


@dataclass
class CriterionReport:
    kind: str
    labels: tuple
    conditions: list
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.conditions)

    def failed(self) -> list[str]:
        return [c.name for c in self.conditions if not c.passed]


def _sector_u(rng: random.Random, n: int, r: float, sector: float = 0.9):
    rad = r * (0.5 + 0.5 * rng.random())
    arg = rng.uniform(0, sector * 2 * math.pi / n)
    return mpmath.mpc(rad * math.cos(arg), rad * math.sin(arg))


def _disk(rng: random.Random, r: float):
    rad = r * math.sqrt(rng.random())
    a = rng.uniform(0, 2 * math.pi)
    return mpmath.mpc(rad * math.cos(a), rad * math.sin(a))


def _condition(name, scales, consts, bound, tol, extra_ok=True, detail="") -> ConditionResult:
    fit = growth_fit(scales, consts, drop_ends=False, tol=tol)
    ok = extra_ok and fit.bounded and max(consts, default=0.0) <= bound
    return ConditionResult(name, consts, fit, bound, ok, detail or fit.describe())


def _rhs24(p1, p2, n: int, m: int | None):
    (u1, b1, t1), (u2, b2, t2) = p1, p2
    out = abs(u1 ** n - u2 ** n)
    if t1 is not None:
        out += abs(t1 - t2)
    if m is not None:
        out += abs(b1 - b2) * abs(u2) ** m
    return out


def vf_criterion_single(vf: WedgeVF, branch: PolarBranch, system: WedgeSystem | None = None,
                        scales: tuple = (4, 12), pairs: int = 48, eps: float | None = None,
                        seed: int = 0, bound: float = 1e3, tol: float = 0.2, dps: int = 40) -> CriterionReport:
    """Difference quotients of alpha, beta and delta*x^(m/n) against the wedge Lipschitz bound.

    Also measures |beta|/|x| and |delta|/|b|.  A condition passes when its
    constant stays below `bound` and does not grow across the scales |x| = 2^-k.
    """
    eps = float(system.epsilon if eps is None and system is not None else (eps or 0.25))
    n, m, label = branch.n, branch.m, branch.label
    with_t = len(branch.y.params) > 1
    rng = random.Random(seed)
    names = ["alpha", "beta", "beta/x"] + (["delta*x^(m/n)", "delta/b"] if branch.kind == "polar" else [])
    consts = {k: [] for k in names}
    sc = []
    notes = []
    violations = [v for v in (vf.invariant_violations(system) if system else []) if v.startswith(label + ":")]
    with mpmath.workdps(dps):
        for k in range(scales[0], scales[1] + 1):
            r = 2.0 ** (-k / n)
            best = dict.fromkeys(names, mpmath.mpf(0))
            for _ in range(pairs):
                mode = rng.randrange(3)
                u2 = _sector_u(rng, n, r)
                u1 = _sector_u(rng, n, r * rng.random()) if mode == 0 else u2 * (1 + 2.0 ** -rng.randint(1, 12) * _disk(rng, 1))
                b1 = _disk(rng, eps) * (2.0 ** -rng.randint(0, 10))
                b2 = b1 if mode == 2 else _disk(rng, eps)
                t1 = _disk(rng, eps) if with_t else None
                t2 = (t1 if mode else _disk(rng, eps)) if with_t else None
                p1, p2 = (u1, b1, t1), (u2, b2, t2)
                rhs = min(_rhs24(p1, p2, n, m), _rhs24(p2, p1, n, m))
                val = {}
                for which in COMPONENTS:
                    val[which] = (vf.evaluate(label, which, *p1, dps=dps), vf.evaluate(label, which, *p2, dps=dps))
                if rhs > 0:
                    best["alpha"] = max(best["alpha"], abs(val["alpha"][0] - val["alpha"][1]) / rhs)
                    best["beta"] = max(best["beta"], abs(val["beta"][0] - val["beta"][1]) / rhs)
                    if m is not None:
                        h1 = val["delta"][0] * u1 ** m
                        h2 = val["delta"][1] * u2 ** m
                        best["delta*x^(m/n)"] = max(best["delta*x^(m/n)"], abs(h1 - h2) / rhs)
                best["beta/x"] = max(best["beta/x"], abs(val["beta"][1]) / abs(u2 ** n))
                if m is not None and b2 != 0:
                    best["delta/b"] = max(best["delta/b"], abs(val["delta"][1]) / abs(b2))
            sc.append(2.0 ** -k)
            for key in names:
                consts[key].append(float(best[key]))
    conds = []
    for key in names:
        ok = True
        detail = ""
        if key == "delta/b" and any("delta(x,0,t)" in v for v in violations):
            ok, detail = False, "not stratified: delta(x,0,t) != 0"
        if key == "beta/x" and any("beta(0,b,t)" in v for v in violations):
            ok, detail = False, "not stratified: beta(0,b,t) != 0"
        conds.append(_condition(key, sc, consts[key], bound, tol, ok, detail))
    if violations:
        notes.extend(violations)
    return CriterionReport("single", (label,), conds, notes)


def vf_criterion_pair(vf_i: WedgeVF, vf_j: WedgeVF | None, system: WedgeSystem,
                      labels: tuple | None = None, scales: tuple = (4, 12), samples: int = 24,
                      eps: float | None = None, seed: int = 0, bound: float = 1e3, tol: float = 0.2,
                      dps: int = 40, check_single: bool = True) -> CriterionReport:
    """Cross-wedge comparison |h_i - h_j|(x,b,t) / |x|^(k_ij/n) at matched samples.

    vf_i lives on the first wedge family and vf_j on the second (vf_j defaults to
    vf_i).  All rotations of both branches are compared over one sector of x.
    """
    vf_j = vf_i if vf_j is None else vf_j
    eps = float(system.epsilon if eps is None else eps)
    if labels is None:
        labels = tuple(b.label for b in system.branches[:2])
    li, lj = labels
    bi = next(b for b in system.branches if b.label == li)
    bj = next(b for b in system.branches if b.label == lj)
    notes = []
    if check_single:
        for vf, br in ((vf_i, bi), (vf_j, bj)):
            rep = vf_criterion_single(vf, br, system, scales, 16, eps, seed, bound, tol, dps)
            if not rep.passed:
                notes.append(f"single-wedge criterion fails on {br.label}: {', '.join(rep.failed())}")
    if notes:
        conds = [ConditionResult("single-wedge", [], GrowthFit(0.0, (0.0, 0.0), [], []), bound, False, notes[0])]
        return CriterionReport("pair", labels, conds, notes)
    n = system.n
    both_polar = bi.kind == bj.kind == "polar"
    m = min(x for x in (bi.m, bj.m) if x is not None) if (bi.m or bj.m) else None
    names = ["alpha", "beta"] + (["delta*x^(m/n)"] if both_polar else [])
    rng = random.Random(seed)
    consts = {k: [] for k in names}
    sc = []
    with mpmath.workdps(dps):
        wi = [w for w in expand_wedges(system, dps, ("polar", "singular")) if w.branch.label == li]
        wj = [w for w in expand_wedges(system, dps, ("polar", "singular")) if w.branch.label == lj]
        combos = [(a, c, wedge_contact(a, c, dps)) for a in wi for c in wj]
        theta = lambda w: mpmath.expjpi(mpmath.mpf(2 * w.shift) / n)
        for k in range(scales[0], scales[1] + 1):
            r = 2.0 ** (-k / n)
            best = dict.fromkeys(names, mpmath.mpf(0))
            for _ in range(samples):
                u = _sector_u(rng, n, r)
                b = _disk(rng, eps)
                t = _disk(rng, eps) if len(bi.y.params) > 1 else None
                for a, c, kij in combos:
                    ua, uc = u * theta(a), u * theta(c)
                    scale = abs(u) ** kij
                    for which in ("alpha", "beta"):
                        d = vf_i.evaluate(li, which, ua, b, t, dps) - vf_j.evaluate(lj, which, uc, b, t, dps)
                        best[which] = max(best[which], abs(d) / scale)
                    if both_polar:
                        hi = vf_i.evaluate(li, "delta", ua, b, t, dps) * ua ** m
                        hj = vf_j.evaluate(lj, "delta", uc, b, t, dps) * uc ** m
                        best["delta*x^(m/n)"] = max(best["delta*x^(m/n)"], abs(hi - hj) / scale)
            sc.append(2.0 ** -k)
            for key in names:
                consts[key].append(float(best[key]))
    conds = [_condition(key, sc, consts[key], bound, tol) for key in names]
    return CriterionReport("pair", labels, conds, [f"k={[c[2] for c in combos]}"])


# ---------------------------------------------------------------------------
# Explicit extension from the spine to a point off the spine


@dataclass
class WedgeVector:
    """A tangent vector at a wedge point in wedge coordinates (d/dt, d/dx, d/db)."""

    alpha: object = Q(0)
    beta: object = Q(0)
    delta: object = Q(0)

    def combine(self, a, other: "WedgeVector", c) -> "WedgeVector":
        return WedgeVector(a * self.alpha + c * other.alpha, a * self.beta + c * other.beta,
                           a * self.delta + c * other.delta)


@dataclass
class WedgePoint:
    label: str
    u: object
    b: object
    t: object = None

    def pvals(self, br: PolarBranch) -> list:
        out = [self.b] + ([self.t if self.t is not None else Q(0)] if len(br.y.params) > 1 else [])
        return out + [Q(0)] * (len(br.y.params) - len(out))


def extend_vf(system: WedgeSystem, q0: WedgePoint, v0: WedgeVector, base_vf: WedgeVF) -> WedgeVF:
    """Extend a field given on the spines (b = 0) to every wedge through one off-spine value.

    beta_j(x,b) = (beta0 - beta_i(x0,0)) (b/b0) x^(m_j/n) / x0^(m_i/n) + beta_j(x,0),
    delta_j(x,b) = delta0 b / b0, and alpha by the same template as beta.  With
    b0 = 0 the result is the b-independent spine field.
    """
    src = next((b for b in system.branches if b.label == q0.label), None)
    if src is None or src.kind != "polar":
        raise StratError(f"{q0.label} is not a polar branch")
    out: dict = {}
    pv = q0.pvals(src)
    pv0 = [Q(0)] + pv[1:]
    for br in system.branches:
        row = {}
        for which in COMPONENTS:
            c = base_vf.component(br.label, which)
            if c is not None and not isinstance(c, TruncSeries):
                raise StratError("extension needs series components on the spine")
            if which != "delta" and c is not None:
                row[which] = _series_at_zero_b(c)
        if br.kind == "polar" and not is_zero(q0.b):
            for which in ("alpha", "beta"):
                base_i = base_vf.component(src.label, which)
                at_q0 = _exact_eval(base_i, q0.u, pv0) if base_i is not None else Q(0)
                coef = (getattr(v0, which) - at_q0) / (q0.b * q0.u ** src.m)
                if not is_zero(coef):
                    extra = _like(br, {(br.m, _b_exp(br)): coef})
                    row[which] = extra if which not in row else row[which] + extra
            if not is_zero(v0.delta):
                row["delta"] = _like(br, {(0, _b_exp(br)): v0.delta / q0.b})
        out[br.label] = row
    return WedgeVF(out, "extension")


def superposition_residual(system: WedgeSystem, q0: WedgePoint, pairs: Sequence, coeffs: tuple) -> int:
    """Compare extend(a v + c w) against a extend(v) + c extend(w); 0 means exact linearity."""
    (v1, f1), (v2, f2) = pairs
    a, c = coeffs
    lhs = extend_vf(system, q0, v1.combine(a, v2, c), f1.combine(a, f2, c))
    rhs = extend_vf(system, q0, v1, f1).combine(a, extend_vf(system, q0, v2, f2), c)
    return lhs.same_as(rhs)


def random_spine_field(system: WedgeSystem, rng: random.Random, degree: int = 6) -> WedgeVF:
    """Random stratified series field with rational coefficients, b-independent."""
    comps = {}
    for br in system.branches:
        zero = (0,) * len(br.y.params)
        row = {
            "beta": _like(br, {(k, zero): Q(rng.randint(-9, 9), rng.randint(1, 9)) for k in range(1, degree)}),
            "alpha": _like(br, {(k, zero): Q(rng.randint(-9, 9), rng.randint(1, 9)) for k in range(degree)}),
        }
        comps[br.label] = row
    return WedgeVF(comps, "random")


def random_wedge_vector(rng: random.Random) -> WedgeVector:
    return WedgeVector(*(Q(rng.randint(-20, 20), rng.randint(1, 12)) for _ in range(3)))


# ---------------------------------------------------------------------------
# isolated-singularity witness


class WedgeMap:
    """Numeric wedge parameterization p(u,b,t) with its u- and b-derivatives."""

    def __init__(self, br: PolarBranch, dps: int = 60):
        self.br, self.n = br, br.n
        self.y, self.z = SeriesEval(br.y, dps), SeriesEval(br.z, dps)
        self.yu, self.zu = SeriesEval(br.y.diff_u(), dps), SeriesEval(br.z.diff_u(), dps)
        self.yb, self.zb = SeriesEval(br.y.diff_param("b"), dps), SeriesEval(br.z.diff_param("b"), dps)

    def _pv(self, b, t):
        pv = [b] + ([t if t is not None else mpmath.mpc(0)] if len(self.br.y.params) > 1 else [])
        return pv + [mpmath.mpc(0)] * (len(self.br.y.params) - len(pv))

    def point(self, u, b, t=None) -> list:
        pv = self._pv(b, t)
        return [u ** self.n, self.y(u, pv), self.z(u, pv)]

    def d_x(self, u, b, t=None) -> list:
        pv = self._pv(b, t)
        dxdu = self.n * u ** (self.n - 1)
        return [mpmath.mpc(1), self.yu(u, pv) / dxdu, self.zu(u, pv) / dxdu]

    def d_b(self, u, b, t=None) -> list:
        pv = self._pv(b, t)
        return [mpmath.mpc(0), self.yb(u, pv), self.zb(u, pv)]


def _hermitian_normal(f: MPoly, point: Sequence, names=("x", "y", "z")) -> list:
    vals = dict(zip(names, point))
    return [mpmath.conj(f.diff(v).evaluate({w: vals.get(w, 0) for w in f.vars})) for v in names]


def minimal_extension_constant(target: Sequence, normal: Sequence, known: Sequence) -> mpmath.mpf:
    """Smallest L such that some v in the tangent hyperplane at `target` obeys |v - v_i| <= L d_i.

    `known` is a list of (point, vector).  The hyperplane is the Hermitian
    orthogonal complement of `normal`.  Handles any number of constraints by
    bisection on L; with two constraints feasibility is exact (two balls).
    """
    nn = _vnorm(normal)
    nu = [c / nn for c in normal]
    data = []
    for pt, vec in known:
        d = _vnorm([a - b for a, b in zip(target, pt)])
        comp = sum(v * mpmath.conj(c) for v, c in zip(vec, nu))
        tang = [v - comp * c for v, c in zip(vec, nu)]
        data.append((d, abs(comp), tang))
    if any(d == 0 for d, _, _ in data):
        raise StratError("target coincides with a known point")

    def feasible(L) -> bool:
        radii = []
        for d, perp, tang in data:
            if L * d < perp:
                return False
            radii.append((mpmath.sqrt((L * d) ** 2 - perp ** 2), tang))
        for a in range(len(radii)):
            for c in range(a + 1, len(radii)):
                ra, ta = radii[a]
                rc, tc = radii[c]
                if _vnorm([x - y for x, y in zip(ta, tc)]) > ra + rc:
                    return False
        if len(radii) > 2:
            return _balls_intersect(radii)
        return True

    if feasible(mpmath.mpf(0)):
        return mpmath.mpf(0)
    hi = mpmath.mpf(1)
    while not feasible(hi):
        hi *= 2
    lo = hi / 2
    while feasible(lo) and lo > mpmath.mpf(10) ** (-mpmath.mp.dps):
        hi, lo = lo, lo / 2
    for _ in range(80):
        mid = (lo + hi) / 2
        lo, hi = (lo, mid) if feasible(mid) else (mid, hi)
    return hi


def _balls_intersect(balls) -> bool:
    """Common point of several balls in C^k, by alternating projections (relative tolerance)."""
    scale = max(r for r, _ in balls) or mpmath.mpf(1)
    v = list(balls[0][1])
    for _ in range(400):
        worst = mpmath.mpf(0)
        for r, c in balls:
            d = _vnorm([a - b for a, b in zip(v, c)])
            if d > r:
                worst = max(worst, (d - r) / scale)
                v = [b + (a - b) * (r / d) for a, b in zip(v, c)]
        if worst < mpmath.mpf(10) ** -12:
            return True
    return False


@dataclass
class WitnessRow:
    x0: float
    base_constant: float  # L on {0, q0}
    extension_constant: float  # minimal L1 at q1
    ratio: float  # C = L_ext / (L + K), K = 0
    linear_system: dict


@dataclass
class WitnessVerdict:
    verdict: str  # "NOT-LIPSCHITZ" | "criterion silent"
    reason: str
    branch: str | None = None
    n: int | None = None
    m: int | None = None
    predicted_exponent: Fraction | None = None
    rows: list = field(default_factory=list)
    fit: GrowthFit | None = None

    @property
    def witness(self) -> bool:
        return bool(self.rows)


def witness_row(system: WedgeSystem, br: PolarBranch, x0, b0, b1, dps: int = 60) -> WitnessRow:
    """Field p_*(d/db) at q0 = p(x0,b0), zero at the origin, extended to q1 = p(x0,b1)."""
    with mpmath.workdps(dps):
        wm = WedgeMap(br, dps)
        u0 = mpmath.root(_mp(x0), br.n)
        b0, b1 = mpmath.mpc(_mp(b0)), mpmath.mpc(_mp(b1))
        q0, q1 = wm.point(u0, b0), wm.point(u0, b1)
        v0 = wm.d_b(u0, b0)
        L = _vnorm(v0) / _vnorm(q0)
        normal = _hermitian_normal(system.f, q1)
        L1 = minimal_extension_constant(q1, normal, [(q0, v0), ([mpmath.mpc(0)] * 3, [mpmath.mpc(0)] * 3)])
        # linear system for v1 = alpha1 p_x + delta1 p_b closest to v0
        A = mpmath.matrix([[a, c] for a, c in zip(wm.d_x(u0, b1), wm.d_b(u0, b1))])
        rhs = mpmath.matrix(v0)
        AH = A.H
        sol = mpmath.lu_solve(AH * A, AH * rhs)
        res = _vnorm([(A * sol - rhs)[i] for i in range(3)])
        lin = {"matrix": [[complex(A[i, j]) for j in range(2)] for i in range(3)],
               "rhs": [complex(c) for c in v0],
               "solution": [complex(sol[0]), complex(sol[1])],
               "residual": float(res),
               "det_yz": complex(A[1, 0] * A[2, 1] - A[1, 1] * A[2, 0])}
        Lext = max(L, L1)
        return WitnessRow(float(x0), float(L), float(L1), float(Lext / L), lin)


def classify_witness(system: WedgeSystem, has_isolated_sing: bool | None = None, scales: tuple = (4, 12),
                    b0=Fraction(1, 8), b1=Fraction(-1, 8), force_witness: bool = False,
                    dps: int = 60) -> WitnessVerdict:
    """Isolated singularity with some m_i > n forces {X minus 0, {0}} to be non-Lipschitz.

    The witness measures the minimal Lipschitz extension constant of p_*(d/db)
    over x0 = 2^-k and fits its growth, predicted to be m/n - 1.
    """
    if has_isolated_sing is None:
        has_isolated_sing = not system.singular
    heavy = [b for b in system.polar if b.m is not None and b.m > b.n]
    if not heavy:
        return WitnessVerdict("criterion silent", "no polar wedge with m > n")
    br = max(heavy, key=lambda b: Fraction(b.m, b.n))
    pred = Fraction(br.m, br.n) - 1
    verdict = WitnessVerdict("NOT-LIPSCHITZ" if has_isolated_sing else "criterion silent",
                            "isolated singularity and m > n" if has_isolated_sing
                            else "singular locus is not isolated",
                            br.label, br.n, br.m, pred)
    if not (has_isolated_sing or force_witness):
        return verdict
    rows = [witness_row(system, br, Fraction(1, 2 ** k), b0, b1, dps) for k in range(scales[0], scales[1] + 1)]
    verdict.rows = rows
    verdict.fit = growth_fit([r.x0 for r in rows], [r.ratio for r in rows], drop_ends=False)
    return verdict


# ---------------------------------------------------------------------------
# Filtrations and chains


def _orthonormal(cols: Sequence) -> list:
    """Hermitian Gram-Schmidt on complex column vectors."""
    basis = []
    for c in cols:
        v = list(c)
        for e in basis:
            ip = sum(a * mpmath.conj(b) for a, b in zip(v, e))
            v = [a - ip * b for a, b in zip(v, e)]
        nv = _vnorm(v)
        if nv > _vnorm(c) * mpmath.mpf(10) ** (-mpmath.mp.dps // 2):
            basis.append([a / nv for a in v])
    return basis


def _proj_from_basis(basis: Sequence, dim: int) -> list:
    return [[sum(e[i] * mpmath.conj(e[j]) for e in basis) for j in range(dim)] for i in range(dim)]


def _matmul(a, b) -> list:
    return [[sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(len(b[0]))] for i in range(len(a))]


def _matsub(a, b) -> list:
    return [[x - y for x, y in zip(r, s)] for r, s in zip(a, b)]


def _identity(dim: int) -> list:
    return [[mpmath.mpc(1 if i == j else 0) for j in range(dim)] for i in range(dim)]


class Stratum:
    """A connected stratum of a filtration; `dim` is the real dimension."""

    label: str
    dim: int

    def distance(self, q) -> tuple:  # (dist to closure, nearest point)
        raise NotImplementedError

    def projector(self, q) -> list:
        raise NotImplementedError


@dataclass
class Hypersurface(Stratum):
    f: MPoly
    names: tuple
    label: str = "X"

    def __post_init__(self):
        self.dim = 2 * (len(self.names) - 1)
        self.grad = [self.f.diff(v) for v in self.names]

    def _vals(self, q):
        vals = dict(zip(self.names, q))
        return {w: vals.get(w, 0) for w in self.f.vars}

    def normal(self, q) -> list:
        v = self._vals(q)
        return [mpmath.conj(g.evaluate(v)) for g in self.grad]

    def value(self, q):
        return self.f.evaluate(self._vals(q))

    def project_onto(self, q, steps: int = 60) -> list:
        """Newton steps along the Hermitian normal until f(q) = 0."""
        q = list(q)
        for _ in range(steps):
            val = self.value(q)
            nrm = self.normal(q)
            nn = sum(abs(c) ** 2 for c in nrm)
            if nn == 0:
                break
            step = [val * c / nn for c in nrm]
            q = [a - s for a, s in zip(q, step)]
            if _vnorm(step) <= _vnorm(q) * mpmath.eps * 16:
                break
        return q

    def projector(self, q) -> list:
        nrm = self.normal(q)
        nn = sum(abs(c) ** 2 for c in nrm)
        d = len(self.names)
        return [[(1 if i == j else 0) - nrm[i] * mpmath.conj(nrm[j]) / nn for j in range(d)] for i in range(d)]


@dataclass
class ParamStratum(Stratum):
    """Image of (u, t...) -> (u^n, y(u,t), z(u,t), t...) from branch series with b = 0."""

    label: str
    n: int
    y: TruncSeries
    z: TruncSeries
    nt: int = 0  # number of t coordinates carried along

    def __post_init__(self):
        self.dim = 2 * (1 + self.nt)
        y0 = _series_at_zero_b(self.y)
        z0 = _series_at_zero_b(self.z)
        self._y, self._z = SeriesEval(y0, mpmath.mp.dps), SeriesEval(z0, mpmath.mp.dps)
        self._yu, self._zu = SeriesEval(y0.diff_u(), mpmath.mp.dps), SeriesEval(z0.diff_u(), mpmath.mp.dps)
        tnames = self.y.params[1:]
        self._yt = [SeriesEval(y0.diff_param(p), mpmath.mp.dps) for p in tnames[: self.nt]]
        self._zt = [SeriesEval(z0.diff_param(p), mpmath.mp.dps) for p in tnames[: self.nt]]
        self.np = len(self.y.params)

    def _pv(self, ts):
        pv = [mpmath.mpc(0)] + list(ts)
        return pv + [mpmath.mpc(0)] * (self.np - len(pv))

    def point(self, u, ts=()) -> list:
        pv = self._pv(ts)
        return [u ** self.n, self._y(u, pv), self._z(u, pv)] + list(ts)

    def jacobian(self, u, ts=()) -> list:
        pv = self._pv(ts)
        cols = [[self.n * u ** (self.n - 1), self._yu(u, pv), self._zu(u, pv)] + [mpmath.mpc(0)] * self.nt]
        for i in range(self.nt):
            col = [mpmath.mpc(0), self._yt[i](u, pv), self._zt[i](u, pv)] + [mpmath.mpc(0)] * self.nt
            col[3 + i] = mpmath.mpc(1)
            cols.append(col)
        return cols

    def distance(self, q) -> tuple:
        ts0 = list(q[3:3 + self.nt])
        best = None
        r = mpmath.root(q[0], self.n) if q[0] != 0 else mpmath.mpc(0)
        for k in range(self.n):
            u = r * mpmath.expjpi(mpmath.mpf(2 * k) / self.n)
            ts = list(ts0)
            for _ in range(80):
                p = self.point(u, ts)
                res = [a - b for a, b in zip(q, p)]
                J = self.jacobian(u, ts)
                A = mpmath.matrix([[col[i] for col in J] for i in range(len(q))])
                rhs = mpmath.matrix(res)
                try:
                    step = mpmath.lu_solve(A.H * A, A.H * rhs)
                except ZeroDivisionError:
                    break
                u += step[0]
                ts = [t + step[1 + i] for i, t in enumerate(ts)]
                if abs(step[0]) <= (abs(u) + mpmath.eps) * mpmath.eps * 16:
                    break
            p = self.point(u, ts)
            d = _vnorm([a - b for a, b in zip(q, p)])
            if best is None or d < best[0]:
                best = (d, p, (u, ts))
        self._last = best[2]
        return best[0], best[1]

    def projector(self, q) -> list:
        d, p = self.distance(q)
        u, ts = self._last
        basis = _orthonormal(self.jacobian(u, ts))
        return _proj_from_basis(basis, len(q))


@dataclass
class LinearStratum(Stratum):
    """The bottom stratum: the origin times the t-space (coordinates from index 3 on)."""

    ambient: int
    nt: int = 0
    label: str = "0"

    def __post_init__(self):
        self.dim = 2 * self.nt

    def distance(self, q) -> tuple:
        p = [mpmath.mpc(0)] * 3 + list(q[3:3 + self.nt])
        return _vnorm([a - b for a, b in zip(q, p)]), p

    def projector(self, q) -> list:
        basis = []
        for i in range(self.nt):
            e = [mpmath.mpc(0)] * self.ambient
            e[3 + i] = mpmath.mpc(1)
            basis.append(e)
        return _proj_from_basis(basis, self.ambient)


@dataclass
class Filtration:
    """Closed sets X^d > ... > X^l given by their strata; indices are real dimensions."""

    top: Hypersurface
    strata: list  # lower strata (ParamStratum / LinearStratum)
    label: str = ""

    @property
    def ambient(self) -> int:
        return len(self.top.names)

    @property
    def real_ambient(self) -> int:
        return 2 * self.ambient

    @property
    def indices(self) -> list:
        return sorted({self.top.dim} | {s.dim for s in self.strata}, reverse=True)

    @property
    def bottom(self) -> int:
        return min(self.indices)

    def dist(self, q, k: int) -> mpmath.mpf:
        """dist(q, X^k) with X^k the union of strata of dimension <= k; dist(., empty) = 1."""
        if k >= self.top.dim:
            return mpmath.mpf(0)
        ds = [s.distance(q)[0] for s in self.strata if s.dim <= k]
        return min(ds) if ds else mpmath.mpf(1)

    def nearest_on(self, q, j: int) -> tuple:
        cands = [(s.distance(q), s) for s in self.strata if s.dim == j]
        (d, p), s = min(cands, key=lambda c: c[0][0])
        return d, p, s

    def below(self, j: int) -> int | None:
        lower = [i for i in self.indices if i < j]
        return max(lower) if lower else None


def filtration_from_system(system: WedgeSystem, with_polar: bool = True, names: tuple | None = None) -> Filtration:
    """X > (singular curves [+ polar spines]) > origin, times the t-space for families."""
    f = system.f
    names = names or tuple(v for v in ("x", "y", "z") if True) + tuple(p for p in f.vars if p not in ("x", "y", "z"))
    nt = len(names) - 3
    top = Hypersurface(f, names)
    strata: list = []
    for br in system.branches:
        if br.kind == "singular" or with_polar:
            strata.append(ParamStratum(br.label, br.n, br.y, br.z, nt))
    strata.append(LinearStratum(len(names), nt))
    tag = "with polar" if with_polar and system.polar else "without polar"
    return Filtration(top, strata, tag)


@dataclass
class Chain:
    c: float
    q: list
    indices: list
    points: list
    strata: list
    dists: dict  # k -> dist(q, X^k)

    def __len__(self):
        return len(self.indices)


def build_chain(filt: Filtration, q, c: float = 2.0, check: bool = True) -> Chain:
    """c-chain at a point q of the top stratum, with the derived properties asserted."""
    if c <= 1:
        raise StratError("chain constant must exceed 1")
    q = list(q)
    dists = {k: filt.dist(q, k) for k in filt.indices}
    dists_below = lambda j: dists[filt.below(j)] if filt.below(j) is not None else mpmath.mpf(1)
    indices, points, strata = [filt.top.dim], [q], [filt.top]
    j = filt.top.dim
    while j != filt.bottom:
        lower = [k for k in filt.indices if k < j]
        chosen = None
        for jm in lower:  # greatest first
            ok = all(dists[k] >= 2 * c * c * dists[jm] for k in filt.indices if k < jm)
            if ok:
                chosen = jm
                break
        d, p, s = filt.nearest_on(q, chosen)
        if _vnorm([a - b for a, b in zip(q, p)]) > c * dists[chosen] * (1 + mpmath.mpf(10) ** -10):
            raise ChainError("nearest point is farther than c * dist")
        indices.append(chosen)
        points.append(p)
        strata.append(s)
        j = chosen
    ch = Chain(c, q, indices, points, strata, dists)
    if check:
        _check_chain(filt, ch, dists_below)
    return ch


def _check_chain(filt: Filtration, ch: Chain, dists_below) -> None:
    n = filt.real_ambient
    c = mpmath.mpf(ch.c)
    slack = 1 + mpmath.mpf(10) ** -8
    for m in range(len(ch) - 1):
        jm, jn = ch.indices[m], ch.indices[m + 1]
        lhs1 = ch.dists[jn]
        if lhs1 > 2 ** n * c ** (2 * n) * dists_below(jm) * slack:
            raise ChainError("property (1) fails")
        step = _vnorm([a - b for a, b in zip(ch.points[m], ch.points[m + 1])])
        if step > 2 ** (n + 1) * c ** (2 * (n + 1)) * dists_below(jm) * slack:
            raise ChainError("property (2) fails")
    for m in range(len(ch)):
        jm = ch.indices[m]
        below = filt.below(jm)
        dq = dists_below(jm)
        dqm = filt.dist(ch.points[m], below) if below is not None else mpmath.mpf(1)
        if 2 * dqm * slack < dq:
            raise ChainError("property (3) fails")


# ---------------------------------------------------------------------------
# Mostowski conditions along scales


@dataclass
class MostowskiSample:
    scale: float
    condition: str
    constant: float
    chain_length: int


@dataclass
class MostowskiReport:
    filtration: str
    c: float
    constants: dict  # condition -> per-scale maxima
    fits: dict  # condition -> GrowthFit
    scales: list
    rejected: int  # ill-conditioned samples
    skipped: int  # companions outside the (M2) radius
    chains: int
    verdict: str
    rerun: "MostowskiReport | None" = None

    @property
    def max_growth(self) -> float:
        return max((f.exponent for f in self.fits.values()), default=0.0)

    def table(self) -> list:
        rows = []
        for cond, vals in self.constants.items():
            for s, v in zip(self.scales, vals):
                rows.append((self.filtration, self.c, cond, s, v))
        return rows


class ChainSampler:
    """Seeded base points at |x| = s with companions q' for (M2)/(M3).

    Base points come from three families: generic points (y ~ s), points close
    to each lower curve stratum, and wedge points p_i(u, b) near each polar
    curve.  Companions are wedge-parameter and tangent-direction neighbours.
    """

    def __init__(self, system: WedgeSystem | None, filt: Filtration, seed: int = 0,
                 angles: int = 2, bvals: Sequence = (Fraction(1, 4), Fraction(1, 16))):
        self.system, self.filt = system, filt
        self.rng = random.Random(seed)
        self.angles = angles
        self.bvals = bvals
        self.maps = [WedgeMap(br, mpmath.mp.dps) for br in (system.polar if system else [])]
        self.nt = filt.ambient - 3

    def _roots_z(self, x, y, ts):
        f = self.filt.top.f
        names = self.filt.top.names
        vals = {"x": x, "y": y, **dict(zip(names[3:], ts))}
        zpoly = f.with_vars(tuple(f.vars))
        zi = zpoly.vars.index("z") if "z" in zpoly.vars else None
        if zi is None:
            return [mpmath.mpc(0)]
        deg = max(e[zi] for e in zpoly.terms)
        coeffs = [mpmath.mpc(0)] * (deg + 1)
        for e, c in zpoly.terms.items():
            term = to_mpc(c, mpmath.mp.dps)
            for v, d in zip(zpoly.vars, e):
                if v != "z" and d:
                    term *= vals.get(v, 0) ** d
            coeffs[deg - e[zi]] += term
        while coeffs and coeffs[0] == 0:
            coeffs.pop(0)
        if len(coeffs) < 2:
            return []
        try:
            return list(mpmath.polyroots(coeffs, maxsteps=200, extraprec=mpmath.mp.prec))
        except mpmath.libmp.NoConvergence:
            return []

    def base_points(self, s) -> list:
        rng = self.rng
        out = []
        for a in range(self.angles):
            th = 2 * math.pi * (a + rng.random()) / self.angles
            x = s * mpmath.expj(th)
            ts = [s * _disk(rng, 1) for _ in range(self.nt)]
            w = _disk(rng, 1)
            for zz in self._roots_z(x, s * w, ts):
                out.append(([x, s * w, zz] + ts, None))
            for st in self.filt.strata:
                if not isinstance(st, ParamStratum):
                    continue
                u = mpmath.root(x, st.n)
                base = st.point(u, ts)
                for rel in (s ** 2 / 4, s ** 3 / 4):
                    y = base[1] + rel * _disk(rng, 1)
                    roots = self._roots_z(x, y, ts)
                    if roots:
                        zz = min(roots, key=lambda r: abs(r - base[2]))
                        out.append(([x, y, zz] + ts, None))
            for wm in self.maps:
                u = mpmath.root(x, wm.n)
                for bv in self.bvals:
                    b = _mp(bv) * mpmath.expj(rng.uniform(0, 2 * math.pi))
                    t = ts[0] if ts else None
                    out.append((wm.point(u, b, t) + ts, (wm, u, b, t)))
        return out

    def companions(self, q, tag, radius) -> list:
        """Points q' on X with |q - q'| <= radius."""
        out = []
        if tag is not None:
            wm, u, b, t = tag
            for eta in (Fraction(1, 4), Fraction(1, 64)):
                e = _mp(eta) * mpmath.expj(self.rng.uniform(0, 2 * math.pi))
                out.append(wm.point(u, b * (1 + e), t) + list(q[3:]))
                out.append(wm.point(u * (1 + e * 2 ** -8), b, t) + list(q[3:]))
        P = self.filt.top.projector(q)
        for rho in (1, 2 ** -6, 2 ** -12):
            v = [_disk(self.rng, 1) for _ in q]
            tv = [sum(P[i][j] * v[j] for j in range(len(q))) for i in range(len(q))]
            nv = _vnorm(tv)
            if nv == 0:
                continue
            out.append([a + radius * rho * 0.9 * b / nv for a, b in zip(q, tv)])
        return out


def _chain_product(ch: Chain, upto: int) -> list:
    mats = [st.projector(p) for st, p in zip(ch.strata[1:upto], ch.points[1:upto])]
    out = mats[0]
    for mtx in mats[1:]:
        out = _matmul(out, mtx)
    return out


def mostowski_check(filt: Filtration, system: WedgeSystem | None = None, c: float = 2.0,
                    scales: tuple = (4, 20), seed: int = 0, dps: int = 60, tol: float = 0.2,
                    rerun_c: float | None = 4.0, sampler: ChainSampler | None = None) -> MostowskiReport:
    """Best constants of (M1), (M2), (M3) per scale s = 2^-k and their growth exponents."""
    conds = ("M1", "M2", "M3")
    consts = {k: [] for k in conds}
    sc = []
    rejected = skipped = 0
    chains = 0
    with mpmath.workdps(dps):
        smp = sampler or ChainSampler(system, filt, seed)
        top = filt.top
        below_top = filt.below(top.dim)
        for k in range(scales[0], scales[1] + 1):
            s = mpmath.mpf(2) ** -k
            best = dict.fromkeys(conds, mpmath.mpf(0))
            for q, tag in smp.base_points(s):
                q = top.project_onto(q)
                dq = filt.dist(q, below_top) if below_top is not None else mpmath.mpf(1)
                if dq < _vnorm(q) * mpmath.mpf(10) ** (-dps // 3) or _vnorm(top.normal(q)) == 0:
                    rejected += 1
                    continue
                try:
                    ch = build_chain(filt, q, c)
                except ChainError:
                    rejected += 1
                    continue
                chains += 1
                P1 = top.projector(q)
                perp = _matsub(_identity(len(q)), P1)
                d2 = _vnorm([a - b for a, b in zip(q, ch.points[1])]) if len(ch) > 1 else None
                prods = {}
                for kk in range(2, len(ch) + 1):
                    prods[kk] = _chain_product(ch, kk)
                    denom_d = filt.dist(q, filt.below(ch.indices[kk - 1])) if filt.below(ch.indices[kk - 1]) is not None else mpmath.mpf(1)
                    lhs = _opnorm(_matmul(perp, prods[kk]))
                    if d2:
                        best["M1"] = max(best["M1"], lhs * denom_d / d2)
                radius = dq / (2 * c)
                for q2 in smp.companions(q, tag, radius):
                    q2 = top.project_onto(q2)
                    dd = _vnorm([a - b for a, b in zip(q, q2)])
                    if dd == 0 or dd > radius:
                        skipped += 1
                        continue
                    diff = _matsub(P1, top.projector(q2))
                    best["M3"] = max(best["M3"], _opnorm(diff) * dq / dd)
                    for kk, prod in prods.items():
                        below = filt.below(ch.indices[kk - 1])
                        denom_d = filt.dist(q, below) if below is not None else mpmath.mpf(1)
                        best["M2"] = max(best["M2"], _opnorm(_matmul(diff, prod)) * denom_d / dd)
            sc.append(float(s))
            for key in conds:
                consts[key].append(float(best[key]))
    fits = {key: growth_fit(sc, consts[key], drop_ends=True, tol=tol) for key in conds}
    verdict = "LIPSCHITZ-CONSISTENT" if all(f.bounded for f in fits.values()) else "NOT-LIPSCHITZ"
    rep = MostowskiReport(filt.label, c, consts, fits, sc, rejected, skipped, chains, verdict)
    if rerun_c is not None:
        rep.rerun = mostowski_check(filt, system, rerun_c, scales, seed, dps, tol, None)
    return rep


def plane_filtration() -> Filtration:
    """X = {z = 0} with the origin as the only lower stratum."""
    zf = MPoly(("x", "y", "z"), {(0, 0, 1): Q(1)})
    return Filtration(Hypersurface(zf, ("x", "y", "z")), [LinearStratum(3)], "plane")


# ---------------------------------------------------------------------------
# Arc-wise extension probe


def pushforward(system: WedgeSystem, vf: WedgeVF, label: str, u, b, t=None, dps: int = 60) -> list:
    """Ambient vector p_*(alpha d/dt + beta d/dx + delta d/db) at p(u, b, t)."""
    br = next(x for x in system.branches if x.label == label)
    wm = WedgeMap(br, dps)
    beta = vf.evaluate(label, "beta", u, b, t, dps)
    delta = vf.evaluate(label, "delta", u, b, t, dps)
    alpha = vf.evaluate(label, "alpha", u, b, t, dps)
    vx, vb = wm.d_x(u, b, t), wm.d_b(u, b, t)
    out = [beta * a + delta * c for a, c in zip(vx, vb)]
    if len(br.y.params) > 1:
        pv = wm._pv(b, t)
        tname = br.y.params[1]
        yt = SeriesEval(br.y.diff_param(tname), dps)(u, pv)
        zt = SeriesEval(br.z.diff_param(tname), dps)(u, pv)
        out = [out[0], out[1] + alpha * yt, out[2] + alpha * zt, alpha]
    return out


@dataclass
class LVERow:
    scale: float
    case: int  # 1: |g - g'| >~ dist(g', lower strata); 2: much smaller
    route: str
    base_constant: float
    bound_K: float
    minimal_constant: float
    given_constant: float | None
    ratio: float  # max(L, L1) / (L + K)


@dataclass
class LVEReport:
    rows: list
    fit: GrowthFit
    status: str

    @property
    def bounded(self) -> bool:
        return self.fit.bounded


def lve_probe(filt: Filtration, gamma: Callable, gamma_p: Callable, base_vf: Callable,
              scales: tuple = (4, 12), c: float = 2.0, extension: Callable | None = None,
              in_wedge: bool = False, dps: int = 60) -> LVEReport:
    """Extension constants of a field on lower strata plus gamma to gamma', one scale at a time.

    gamma, gamma_p: s -> point on the top stratum.  base_vf: point -> vector,
    defined on the lower strata and on gamma.  extension (optional): s -> the
    vector a construction assigns at gamma'(s); its constant is reported next to
    the minimal one.
    """
    rows = []
    status = "ok"
    with mpmath.workdps(dps):
        for k in range(scales[0], scales[1] + 1):
            s = mpmath.mpf(2) ** -k
            g, gp = [mpmath.mpc(v) for v in gamma(s)], [mpmath.mpc(v) for v in gamma_p(s)]
            known = [g]
            for q in (g, gp):
                try:
                    ch = build_chain(filt, q, c)
                    known.extend(ch.points[1:])
                except ChainError:
                    pass
            known.append([mpmath.mpc(0)] * len(g))
            uniq = []
            for p in known:
                if all(_vnorm([a - b for a, b in zip(p, o)]) > 0 for o in uniq):
                    uniq.append(p)
            vals = [[mpmath.mpc(v) for v in base_vf(p)] for p in uniq]
            L = mpmath.mpf(0)
            for a in range(len(uniq)):
                for b in range(a + 1, len(uniq)):
                    d = _vnorm([x - y for x, y in zip(uniq[a], uniq[b])])
                    L = max(L, _vnorm([x - y for x, y in zip(vals[a], vals[b])]) / d)
            K = _vnorm(vals[-1])
            lower = filt.below(filt.top.dim)
            dlow = filt.dist(gp, lower) if lower is not None else mpmath.mpf(1)
            sep = _vnorm([a - b for a, b in zip(g, gp)])
            case = 1 if sep >= dlow / (2 * c) else 2
            if sep == 0:
                L1, given, route = L, None, "identity"
            else:
                data = [(p, v) for p, v in zip(uniq, vals)]
                L1 = minimal_extension_constant(gp, filt.top.normal(gp), data)
                given = None
                if extension is not None:
                    w = [mpmath.mpc(v) for v in extension(s)]
                    given = max(_vnorm([x - y for x, y in zip(w, v)]) / _vnorm([x - y for x, y in zip(gp, p)])
                                for p, v in data)
                if in_wedge:
                    route = "extension formula"
                elif case == 2:
                    route = "tangent template"
                else:
                    route = "requires user-supplied wing"
                    status = route
            denom = L + K if L + K > 0 else mpmath.mpf(1)
            top = max(L, L1, given if given is not None else 0)
            rows.append(LVERow(float(s), case, route, float(L), float(K), float(L1),
                               None if given is None else float(given), float(top / denom)))
    fit = growth_fit([r.scale for r in rows], [r.ratio for r in rows], drop_ends=False)
    return LVEReport(rows, fit, status)


# ---------------------------------------------------------------------------
# Summary report


@dataclass
class StratVerdict:
    name: str
    passed: bool
    provenance: str  # "exact" | "fitted" | "heuristic"
    detail: str = ""


@dataclass
class StratReport:
    verdicts: list
    L: float = 0.0
    K: float = 0.0
    C: float = 0.0
    fits: dict = field(default_factory=dict)
    witness: WitnessVerdict | None = None
    mostowski: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts)


def vf_report(system: WedgeSystem, seed: int = 0, scales: tuple = (4, 12), bound: float = 1e3) -> StratReport:
    """Generator fields on every wedge and pair, one extension, and the witness classifier."""
    verdicts = []
    kinds = ["xdx", "bdb"] + (["t"] if len(system.branches[0].y.params) > 1 else [])
    for kind in kinds:
        g = generator_field(system, kind)
        for br in system.branches:
            rep = vf_criterion_single(g, br, system, scales, seed=seed, bound=bound)
            verdicts.append(StratVerdict(f"single {kind} on {br.label}", rep.passed, "fitted",
                                         "; ".join(f"{c.name}: C={c.constant:.3g}, {c.fit.describe()}" for c in rep.conditions)))
        brs = system.branches
        for a in range(len(brs)):
            for b in range(a + 1, len(brs)):
                rep = vf_criterion_pair(g, None, system, (brs[a].label, brs[b].label), scales, seed=seed,
                                        bound=bound, check_single=False)
                verdicts.append(StratVerdict(f"pair {kind} on {brs[a].label}-{brs[b].label}", rep.passed, "fitted",
                                             "; ".join(f"{c.name}: C={c.constant:.3g}" for c in rep.conditions)))
    out = StratReport(verdicts)
    if system.polar:
        br = system.polar[0]
        q0 = WedgePoint(br.label, Q(1, 16), Q(1, 8))
        base = generator_field(system, "zero")
        ext = extend_vf(system, q0, WedgeVector(delta=q0.b), base)
        rep = vf_criterion_single(ext, br, system, scales, seed=seed, bound=bound)
        out.L, out.K = 1.0, 0.0  # |delta0| / |b0| for the unit field b d/db
        out.C = max(c.constant for c in rep.conditions) / (out.L + out.K)
        verdicts.append(StratVerdict(f"extension through {br.label}(1/16, 1/8)", rep.passed, "fitted",
                                     f"C = {out.C:.3g}"))
        ok = 0 == superposition_residual(system, q0, [(random_wedge_vector(random.Random(seed + i)),
                                                       random_spine_field(system, random.Random(seed + i)))
                                                      for i in range(2)], (Q(2), Q(-3, 5)))
        verdicts.append(StratVerdict("extension superposition", ok, "exact"))
    out.witness = classify_witness(system, force_witness=bool(system.polar and any(
        b.m is not None and b.m > b.n for b in system.polar)))
    if out.witness.fit is not None:
        out.fits["witness"] = out.witness.fit
    return out
