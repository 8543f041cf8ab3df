"""Newton-Puiseux expansion of plane curve germs, optionally with parameters.

Branches are returned as ``x = u**ram, y = y(u)`` with coefficients polynomial
in the parameters (truncated at total degree ``porder``).  Conjugate branches
(u -> theta*u) are stored once.  With parameters the Newton process is checked
for uniformity: every vertex coefficient must be a unit in the parameters and
every edge root must lift to a power series with a constant multiplicity.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Sequence

import mpmath
import sympy as sp

from .algebra import (
    AlgebraError,
    AlgebraicNumber,
    BigComplex,
    MPoly,
    NumberField,
    Q,
    TowerError,
    TruncSeries,
    is_exact,
    is_unit_scalar,
    is_zero,
    scalar_field,
    scalar_inv,
    sorted_roots,
    to_mpc,
)

INF = 1 << 30


class PuiseuxError(AlgebraError):
    pass


class NumericFallbackWarning(UserWarning):
    """A branch needed a second algebraic extension and continued with ball coefficients."""


@dataclass
class PuiseuxBranch:
    ram: int
    series: TruncSeries
    y_order: int | None  # order of y in u (None when y vanishes to the working order)
    field: NumberField | None = None
    exact: bool = True

    @property
    def conjugates(self) -> int:
        return self.ram

    def field_label(self) -> str:
        if not self.exact:
            return "ball"
        return "Q" if self.field is None else self.field.label()


@dataclass
class ParamPuiseuxResult:
    branches: list[PuiseuxBranch]
    uniform: bool
    step: int | None = None
    locus: MPoly | None = None
    reason: str = ""

    @property
    def verdict(self) -> str:
        return "uniform" if self.uniform else f"non-uniform at step {self.step}"

    def locus_text(self) -> str:
        if self.locus is None:
            return ""
        return f"{_normalize_locus(self.locus)} = 0"


def _normalize_locus(p: MPoly) -> MPoly:
    lead = p.sorted_terms()[0][1] if p.terms else Q(1)
    return p * MPoly.const(scalar_inv(lead), p.vars) if is_exact(lead) else p


class NonUniform(Exception):
    def __init__(self, step: int, locus: MPoly, reason: str):
        super().__init__(reason)
        self.step, self.locus, self.reason = step, locus, reason


# ---------------------------------------------------------------------------
# Parameter series helpers (TruncSeries with only the u**0 slot in use)


def _pseries(terms: dict, params, porder) -> TruncSeries:
    return TruncSeries({(0, e): c for e, c in terms.items()}, 1, 1, params, porder)


def _pconst(c, params, porder) -> TruncSeries:
    return TruncSeries.const(c, 1, 1, params, porder)


# ---------------------------------------------------------------------------
# Stage polynomials


class _Stage:
    """Polynomial in (x, y) with parameter-series coefficients: {(j, k, pexp): scalar}."""

    def __init__(self, terms: dict, params: tuple, porder: int):
        self.params = params
        self.porder = porder
        self.terms = {key: c for key, c in terms.items() if not is_zero(c) and sum(key[2]) < porder}

    @classmethod
    def from_mpoly(cls, f: MPoly, x: str, y: str, params: tuple, porder: int) -> "_Stage":
        f = f.with_vars((x, y) + params)
        ix, iy = f.vars.index(x), f.vars.index(y)
        pidx = [f.vars.index(p) for p in params]
        other = [i for i in range(len(f.vars)) if i not in (ix, iy) and i not in pidx]
        terms = {}
        for e, c in f.terms.items():
            if any(e[i] for i in other):
                raise PuiseuxError(f"unexpected variables in curve: {f.used_vars()}")
            terms[(e[iy], e[ix], tuple(e[i] for i in pidx))] = c
        return cls(terms, params, porder)

    def points(self) -> dict:
        pts: dict = {}
        for (j, k, e), c in self.terms.items():
            pts.setdefault((j, k), {})[e] = c
        return pts

    def map_coeffs(self, fn) -> "_Stage":
        return _Stage({k: fn(c) for k, c in self.terms.items()}, self.params, self.porder)

    def fields(self) -> set:
        return {scalar_field(c) for c in self.terms.values()} - {None}

    def exact(self) -> bool:
        return all(is_exact(c) for c in self.terms.values())

    def y_coeff_series(self, order: int) -> list[TruncSeries]:
        deg = max((j for j, _, _ in self.terms), default=0)
        buckets = [dict() for _ in range(deg + 1)]
        for (j, k, e), c in self.terms.items():
            if k < order:
                buckets[j][(k, e)] = c
        return [TruncSeries(b, 1, order, self.params, self.porder) for b in buckets]

    def transform(self, p: int, q: int, c: TruncSeries, shift: int) -> "_Stage":
        """g(x1, y1) = x1**(-shift) f(x1**q, x1**p (c + y1))."""
        deg = max(j for j, _, _ in self.terms)
        cpow = [_pconst(Q(1), self.params, self.porder)]
        for _ in range(deg):
            cpow.append(cpow[-1] * c)
        binom = [[1]]
        for n in range(1, deg + 1):
            row = [1] + [binom[-1][i - 1] + binom[-1][i] for i in range(1, n)] + [1]
            binom.append(row)
        out: dict = {}
        for (j, k, e), a in self.terms.items():
            xk = q * k + p * j - shift
            if xk < 0:
                raise PuiseuxError("Newton polygon bookkeeping error")
            for i in range(j + 1):
                cp = cpow[j - i]
                mult = binom[j][i]
                for (_, ce), cc in cp.terms.items():
                    ne = tuple(a1 + a2 for a1, a2 in zip(e, ce))
                    if sum(ne) >= self.porder:
                        continue
                    key = (i, xk, ne)
                    v = a * cc * mult
                    out[key] = out[key] + v if key in out else v
        return _Stage(out, self.params, self.porder)


def _lower_hull(points: list[tuple[int, int]]) -> list[tuple[int, int]]:
    """Lower-left convex hull of (k, j) points, from the y-axis vertex downwards."""
    pts = sorted(set(points))
    hull: list = []
    for pnt in pts:
        while len(hull) >= 2:
            (k1, j1), (k2, j2) = hull[-2], hull[-1]
            k3, j3 = pnt
            if (k2 - k1) * (j3 - j1) - (j2 - j1) * (k3 - k1) <= 0:
                hull.pop()
            else:
                break
        hull.append(pnt)
    # keep the strictly decreasing part in j
    out = [hull[0]]
    for pnt in hull[1:]:
        if pnt[1] < out[-1][1]:
            out.append(pnt)
        else:
            break
    return out


# ---------------------------------------------------------------------------
# Roots of edge polynomials


def _sympy_generator(fld: NumberField):
    Yv = sp.Symbol("_a")
    g = sp.Poly([sp.Rational(int(c.numerator), int(c.denominator)) for c in reversed(fld.minpoly)], Yv)
    target = fld.generator_value(30)
    for k in range(g.degree()):
        r = sp.CRootOf(g, k)
        val = complex(sp.N(r, 30))
        if abs(val - complex(target)) < 1e-15 * max(1.0, abs(complex(target))) + 1e-20:
            return r, Yv
    raise PuiseuxError("could not match number field embedding")


def _to_sympy_scalar(c, gen=None):
    if isinstance(c, AlgebraicNumber):
        return sum(sp.Rational(int(v.numerator), int(v.denominator)) * gen ** i for i, v in enumerate(c.c))
    return sp.Rational(int(c.numerator), int(c.denominator))


def _from_sympy_scalar(expr, fld: NumberField | None, gen, sym):
    expr = sp.sympify(expr)
    if fld is None:
        r = sp.nsimplify(expr)
        return Q(int(r.p), int(r.q))
    poly = sp.Poly(sp.expand(expr.subs(gen, sym)), sym)
    coeffs = [Q(int(sp.Rational(v).p), int(sp.Rational(v).q)) for v in reversed(poly.all_coeffs())]
    return AlgebraicNumber(fld, coeffs)


def _numeric_roots(coeffs: Sequence, dps: int = 40):
    """Ball roots with multiplicities from numeric coefficients (low->high)."""
    with mpmath.workdps(dps):
        mids = [to_mpc(c, dps) for c in coeffs]
        while mids and abs(mids[-1]) == 0:
            mids.pop()
        rts = mpmath.polyroots(list(reversed(mids)), maxsteps=500, extraprec=200)
        rts = [mpmath.mpc(r) for r in rts]
        tol = mpmath.mpf(10) ** (-dps // 4)
        clusters: list[list] = []
        for r in rts:
            for cl in clusters:
                if abs(cl[0] - r) < tol * max(1, abs(r)):
                    cl.append(r)
                    break
            else:
                clusters.append([r])
        out = []
        for cl in clusters:
            centre = sum(cl) / len(cl)
            spread = max(abs(r - centre) for r in cl) + tol * max(1, abs(centre))
            out.append((BigComplex(centre, spread), len(cl)))
    return out


def _exact_roots(coeffs: Sequence):
    """Nonzero roots of an exact polynomial (low->high) with multiplicities.

    Returns a list of (root, multiplicity).  Roots lie in Q, in the coefficient
    field, or in freshly created simple extensions of Q.  Raises TowerError when
    a root would need an extension of an extension.
    """
    fields = {scalar_field(c) for c in coeffs} - {None}
    if len(fields) > 1:
        raise TowerError("coefficients from several fields")
    fld = next(iter(fields), None)
    Yv = sp.Symbol("_Y")
    gen = None
    if fld is not None:
        gen, sym = _sympy_generator(fld)
    expr = sum(_to_sympy_scalar(c, gen) * Yv ** i for i, c in enumerate(coeffs))
    if fld is None:
        flist = sp.factor_list(sp.Poly(expr, Yv, domain=sp.QQ))[1]
    else:
        dom = sp.QQ.algebraic_field(gen)
        flist = sp.Poly(expr, Yv, domain=dom).factor_list()[1]
    out = []
    for fac, mult in flist:
        deg = fac.degree()
        cs = fac.all_coeffs()
        if deg == 1:
            root = -sp.sympify(cs[1]) / sp.sympify(cs[0])
            if root == 0:
                continue
            out.append((_from_sympy_scalar(root, fld, gen, sym if fld is not None else None), mult))
            continue
        if fld is not None:
            raise TowerError("edge polynomial irreducible over the current field")
        lead = cs[0]
        mono = [Q(int(sp.Rational(v / lead).p), int(sp.Rational(v / lead).q)) for v in reversed(cs)]
        if mono[0] == 0:
            raise PuiseuxError("unexpected zero root in irreducible factor")
        roots = sorted_roots(tuple(mono))
        remaining = set(range(deg))
        while remaining:
            idx = min(remaining)
            nf = NumberField.from_minpoly(mono, idx)
            g_sym, s_sym = _sympy_generator(nf)
            dom2 = sp.QQ.algebraic_field(g_sym)
            facs = sp.Poly(fac.as_expr(), Yv, domain=dom2).factor_list()[1]
            for f2, m2 in facs:
                if f2.degree() != 1:
                    continue
                c2 = f2.all_coeffs()
                r_expr = -sp.sympify(c2[1]) / sp.sympify(c2[0])
                r = _from_sympy_scalar(r_expr, nf, g_sym, s_sym)
                val = r.to_mpc(40)
                hit = min(remaining, key=lambda i: abs(roots[i] - val))
                if abs(roots[hit] - val) < mpmath.mpf(10) ** -20:
                    remaining.discard(hit)
                    out.append((r, mult))
            remaining.discard(idx)
    return out


def _canonical_key(c, q: int):
    v = to_mpc(c, 30)
    arg = float(mpmath.arg(v)) if abs(v) else 0.0
    if arg < -1e-12:
        arg += 2 * float(mpmath.pi)
    if abs(arg - 2 * float(mpmath.pi)) < 1e-12:
        arg = 0.0
    return (round(arg, 9), float(abs(v)))


def _group_conjugates(roots, q: int):
    """Group roots whose q-th powers agree; return one representative per group."""
    groups: list[list] = []
    for r, m in roots:
        w = to_mpc(r, 40) ** q
        for g in groups:
            if abs(g[0][2] - w) < mpmath.mpf(10) ** -18 * max(1, abs(w)):
                g.append((r, m, w))
                break
        else:
            groups.append([(r, m, w)])
    reps = []
    for g in groups:
        r, m, _ = min(g, key=lambda item: _canonical_key(item[0], q))
        reps.append((r, m))
    return reps


# ---------------------------------------------------------------------------
# Core algorithm


def _poly_eval_pseries(coeffs: list[TruncSeries], y: TruncSeries) -> TruncSeries:
    acc = coeffs[-1]
    for c in reversed(coeffs[:-1]):
        acc = acc * y + c
    return acc


def _diff_coeffs(coeffs: list[TruncSeries]) -> list[TruncSeries]:
    return [coeffs[j] * j for j in range(1, len(coeffs))] or [coeffs[0] * 0]


def _lift_param_root(E: list[TruncSeries], c0, mult: int, step: int, params, porder):
    """Lift a root of E(params=0) to a parameter series; check its multiplicity is constant."""
    if not params:
        return _pconst(c0, params, porder)
    h = E
    for _ in range(mult - 1):
        h = _diff_coeffs(h)
    dh = _diff_coeffs(h)
    c = _pconst(c0, params, porder)
    for _ in range(64):
        val = _poly_eval_pseries(h, c)
        if val.is_zero():
            break
        der = _poly_eval_pseries(dh, c)
        c = (c - val * der.invert_unit()).truncate(1, porder)
    g = E
    for i in range(mult - 1):
        val = _poly_eval_pseries(g, c)
        if not val.is_zero():
            low = val.param_valuation()
            locus = MPoly(params, {e: v for (_, e), v in val.terms.items() if sum(e) == low})
            raise NonUniform(step, locus, f"edge root of multiplicity {mult} splits off the special parameter")
        g = _diff_coeffs(g)
    return c


def _hensel(stage: _Stage, order: int) -> TruncSeries:
    """Solve g(x, y(x)) = 0 with y(0) = 0 a simple root, to x-order ``order``."""
    coeffs = stage.y_coeff_series(order + 1)
    dcoeffs = _diff_coeffs(coeffs)
    params, porder = stage.params, stage.porder
    y = TruncSeries.zero(1, order, params, porder)
    for _ in range(200):
        val = _poly_eval_pseries(coeffs, y).truncate(order)
        if val.is_zero():
            break
        der = _poly_eval_pseries(dcoeffs, y).truncate(order)
        y = (y - val * der.invert_unit()).truncate(order, porder)
    else:
        raise PuiseuxError("Hensel lifting did not converge")
    return TruncSeries(y.terms, 1, order, params, porder, y.exact)


@dataclass
class _Path:
    steps: list = field(default_factory=list)  # (p, q, c) with c a param series
    fld: NumberField | None = None
    exact: bool = True


def _expand(stage: _Stage, order: int, path: _Path, depth: int, out: list, strict: bool,
            top: bool) -> None:
    if depth > 4 * order + 8:
        raise PuiseuxError("non-reduced curve")
    params, porder = stage.params, stage.porder
    pts = stage.points()
    if not pts:
        raise PuiseuxError("zero polynomial")
    jmin = min(j for j, _ in pts)
    axis = [j for j, k in pts if k == 0]
    if not axis:
        raise PuiseuxError("curve is divisible by x")
    j0 = min(axis)
    vertex = pts[(j0, 0)]
    if strict and not is_unit_scalar(vertex.get((0,) * len(params), Q(0))):
        low = min(sum(e) for e in vertex)
        raise NonUniform(depth, MPoly(params, {e: c for e, c in vertex.items() if sum(e) == low}),
                         "leading coefficient on the y-axis is not a unit")
    if jmin >= 1:
        if jmin >= 2:
            raise PuiseuxError("non-reduced curve")
        out.append((path, None))
        stage = _Stage({(j - 1, k, e): c for (j, k, e), c in stage.terms.items()}, params, porder)
        pts = stage.points()
        j0 -= 1
        jmin = 0
        if j0 == 0:
            return
        if strict:
            # contact of the remaining branches with y = 0 must not jump
            k0 = min((k for j, k in pts if j == 0), default=None)
            coeff = pts[(0, k0)] if k0 is not None else {}
            if not is_unit_scalar(coeff.get((0,) * len(params), Q(0))):
                low = min((sum(e) for e in coeff), default=0)
                raise NonUniform(depth, MPoly(params, {e: c for e, c in coeff.items() if sum(e) == low}),
                                 "contact with the branch y = 0 is not constant")
    if j0 == 1:
        out.append((path, _hensel(stage, order)))
        return
    by_j: dict = {}
    for (j, k) in pts:
        if j <= j0:
            by_j[j] = min(by_j.get(j, INF), k)
    hull = _lower_hull([(k, j) for j, k in by_j.items()])
    for (k1, j1), (k2, j2) in zip(hull, hull[1:]):
        if strict:
            coeff = pts[(j2, k2)]
            if not is_unit_scalar(coeff.get((0,) * len(params), Q(0))):
                low = min(sum(e) for e in coeff)
                raise NonUniform(depth, MPoly(params, {e: c for e, c in coeff.items() if sum(e) == low}),
                                 "Newton polygon vertex coefficient is not a unit")
        num, den = k2 - k1, j1 - j2
        g = gcd(num, den)
        p, q = num // g, den // g
        beta_q = q * k1 + p * j1
        E = []
        for j in range(j2, j1 + 1):
            k_num = beta_q - p * j
            if k_num % q == 0 and (j, k_num // q) in pts:
                E.append(_pseries(pts[(j, k_num // q)], params, porder))
            else:
                E.append(TruncSeries.zero(1, 1, params, porder))
        E0 = [s.constant_term() for s in E]
        numeric = not all(is_exact(c) for c in E0)
        roots = None
        new_stage, new_path = stage, path
        if not numeric:
            try:
                roots = _exact_roots(E0)
            except TowerError:
                numeric = True
        if numeric:
            if path.exact:
                warnings.warn("coefficient tower too deep; continuing this branch with ball arithmetic",
                              NumericFallbackWarning, stacklevel=2)
            conv = lambda c: BigComplex.coerce(c)
            new_stage = stage.map_coeffs(conv)
            E = [TruncSeries({kk: conv(v) for kk, v in s.terms.items()}, 1, 1, params, porder) for s in E]
            roots = _numeric_roots([conv(c) for c in E0])
            new_path = _Path(list(path.steps), None, False)
        for r, mult in _group_conjugates(roots, q):
            rf = scalar_field(r)
            st, pth = new_stage, new_path
            if rf is not None and pth.exact:
                if pth.fld is None:
                    conv = lambda c, rf=rf: c if isinstance(c, AlgebraicNumber) else AlgebraicNumber(rf, [c])
                    st = st.map_coeffs(conv)
                    Ef = [TruncSeries({kk: conv(v) for kk, v in s.terms.items()}, 1, 1, params, porder) for s in E]
                    pth = _Path(list(pth.steps), rf, True)
                elif pth.fld != rf:
                    raise TowerError("root in a different field")
                else:
                    Ef = E
            else:
                Ef = E
            c = _lift_param_root(Ef, r, mult, depth, params, porder) if strict else _pconst(r, params, porder)
            nxt = st.transform(p, q, c, beta_q)
            child = _Path(pth.steps + [(p, q, c)], pth.fld, pth.exact)
            if mult == 1:
                out.append((child, _hensel(nxt, order)))
            else:
                _expand(nxt, order, child, depth + 1, out, strict, False)


def _assemble(path: _Path, tail: TruncSeries | None, order: int, params, porder) -> PuiseuxBranch:
    y = tail if tail is not None else TruncSeries.zero(1, order, params, porder)
    y = TruncSeries(y.terms, 1, order, params, porder)
    scale = 1
    for p, q, c in reversed(path.steps):
        cu = TruncSeries({(0, e): v for (_, e), v in c.terms.items()}, 1, INF, params, porder)
        y = (cu + y).shift(p * scale)
        scale *= q
    n = scale
    y = TruncSeries(y.terms, n, order, params, porder, path.exact and y.exact)
    val = y.valuation()
    fld = path.fld
    return PuiseuxBranch(n, y, val, fld, path.exact and y.exact)


def _run(f: MPoly, order: int, params: tuple, porder: int, strict: bool,
         x: str = "x", y: str = "y") -> list[PuiseuxBranch]:
    if f.is_zero():
        raise PuiseuxError("zero polynomial")
    stage = _Stage.from_mpoly(f, x, y, params, porder)
    zero_par = (0,) * len(params)
    pts = stage.points()
    if (0, 0) in pts and any(sum(e) == 0 for e in pts[(0, 0)]):
        raise PuiseuxError("curve does not pass through the origin")
    if strict and (0, 0) in pts:
        low = min(sum(e) for e in pts[(0, 0)])
        raise NonUniform(0, MPoly(params, {e: c for e, c in pts[(0, 0)].items() if sum(e) == low}),
                         "curve leaves the origin for nonzero parameters")
    out: list = []
    _expand(stage, order, _Path(), 0, out, strict, True)
    branches = [_assemble(pth, tail, order, params, porder) for pth, tail in out]
    del zero_par
    return branches


def newton_puiseux(f: MPoly, N: int = 24, x: str = "x", y: str = "y") -> list[PuiseuxBranch]:
    """Branches of a reduced plane curve germ f(x, y) = 0 at the origin."""
    extra = set(f.used_vars()) - {x, y}
    if extra:
        raise PuiseuxError(f"unexpected variables {sorted(extra)}")
    return _run(f, N, (), INF, False, x, y)


def newton_puiseux_param(f: MPoly, params: Sequence[str], N: int = 24, porder: int = 16,
                         x: str = "x", y: str = "y") -> ParamPuiseuxResult:
    """Branches y_i(u, params) with the uniformity verdict of the Newton process."""
    params = tuple(params)
    try:
        branches = _run(f, N, params, porder, True, x, y)
    except NonUniform as exc:
        return ParamPuiseuxResult([], False, exc.step, exc.locus, exc.reason)
    return ParamPuiseuxResult(branches, True)


# ---------------------------------------------------------------------------
# Contacts and equisingularity type


@dataclass
class Contact:
    value: Fraction | None
    certified: bool
    undecided: bool = False


def _numeric_coeffs(series: TruncSeries, dps: int = 30) -> dict:
    out: dict = {}
    for (k, e), c in series.terms.items():
        out.setdefault(k, {})[e] = to_mpc(c, dps)
    return out


def _valuation_numeric(a: dict, b: dict, theta, order: int, tol) -> int | None:
    for k in range(order):
        ca, cb = a.get(k, {}), b.get(k, {})
        rot = theta ** k
        for e in set(ca) | set(cb):
            if abs(ca.get(e, 0) - cb.get(e, 0) * rot) > tol:
                return k
    return None


def series_contact(si: TruncSeries, sj: TruncSeries, dps: int = 30) -> Contact:
    """Contact order (in x-units) of two branch series, maximised over conjugates of sj."""
    a, b = si._common(sj)
    n, order = a.ram, min(a.order, b.order)
    diff_exact = None
    if a.exact and b.exact:
        try:
            diff_exact = (a - b).truncate(order)
        except AlgebraError:
            diff_exact = None
    na, nb = _numeric_coeffs(a, dps), _numeric_coeffs(b, dps)
    tol = mpmath.mpf(10) ** (-(dps // 2))
    best, best_theta = -1, None
    for s in range(n):
        theta = mpmath.exp(2j * mpmath.pi * s / n)
        v = _valuation_numeric(na, nb, theta, order, tol)
        v = order if v is None else v
        if v > best:
            best, best_theta = v, s
    if best >= order:
        return Contact(None, False, True)
    certified = False
    if diff_exact is not None and best_theta == 0:
        v = diff_exact.valuation()
        certified = v == best and is_unit_scalar(diff_exact.coefficient(v).constant_term())
    return Contact(Fraction(best, n), certified)


def contact_exponent(bi: PuiseuxBranch, bj: PuiseuxBranch) -> Fraction:
    c = series_contact(bi.series, bj.series)
    if c.undecided:
        raise PuiseuxError("contact exceeds truncation")
    return c.value


def characteristic_exponents(branch: PuiseuxBranch) -> tuple[Fraction, ...]:
    n = branch.ram
    e = n
    out = []
    ks = sorted({k for k, _ in branch.series.terms})
    for k in ks:
        if e == 1:
            break
        if k % e:
            out.append(Fraction(k, n))
            e = gcd(e, k)
    return tuple(out)


@dataclass(frozen=True)
class EquisingularityType:
    char_exponents: tuple  # per branch, canonically sorted
    contacts: tuple  # sorted multiset of pairwise contacts
    multiplicities: tuple
    total_multiplicity: int
    undecided: bool = False

    def describe(self) -> str:
        return (f"branches={len(self.multiplicities)} char={list(map(lambda c: [str(v) for v in c], self.char_exponents))} "
                f"contacts={[str(c) for c in self.contacts]} mult={self.total_multiplicity}")


def _branch_multiplicity(b: PuiseuxBranch) -> int:
    return b.ram if b.y_order is None else min(b.ram, b.y_order)


def equisingularity_type(f: MPoly, N: int = 24, x: str = "x", y: str = "y") -> EquisingularityType:
    branches = newton_puiseux(f, N, x, y)
    return type_of_branches(branches, N)


def type_of_branches(branches: list[PuiseuxBranch], N: int = 24) -> EquisingularityType:
    data = []
    for b in branches:
        data.append((characteristic_exponents(b), _branch_multiplicity(b), b))
    data.sort(key=lambda d: (d[1], d[0]))
    contacts = []
    undecided = False
    for i in range(len(data)):
        for j in range(i + 1, len(data)):
            c = series_contact(data[i][2].series, data[j][2].series)
            if c.undecided:
                undecided = True
                contacts.append(Fraction(-1))
            else:
                contacts.append(c.value)
    # self-contacts of conjugate sheets of one branch are part of the char. exponents
    return EquisingularityType(tuple(d[0] for d in data), tuple(sorted(contacts)),
                               tuple(d[1] for d in data), sum(d[1] for d in data), undecided)


def compare_types(t1: EquisingularityType, t2: EquisingularityType) -> str:
    if t1.undecided or t2.undecided:
        return "undecided at order N"
    if len(t1.multiplicities) != len(t2.multiplicities):
        return "differs at branch count"
    if t1.total_multiplicity != t2.total_multiplicity:
        return "differs at total multiplicity"
    if t1.multiplicities != t2.multiplicities:
        return "differs at branch multiplicities"
    if t1.char_exponents != t2.char_exponents:
        return "differs at characteristic exponents"
    if t1.contacts != t2.contacts:
        return "differs at contacts"
    return "equal"


def back_substitution_order(f: MPoly, branch: PuiseuxBranch, x: str = "x", y: str = "y") -> int | None:
    """u-valuation of f(u**n, y(u)) within the branch's working order (None = vanishes)."""
    from .algebra import evaluate_mpoly_on_series

    s = branch.series
    xs = TruncSeries.monomial(s.ram, Q(1), s.ram, s.order + s.ram, s.params, s.porder)
    val = evaluate_mpoly_on_series(f, {x: xs, y: s}, s.params, s.ram, s.order, s.porder)
    return val.valuation()
