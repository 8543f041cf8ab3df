"""Exact polynomial and truncated-series arithmetic.

Scalars are either exact (``gmpy2.mpq`` rationals or :class:`AlgebraicNumber`
elements of a simple extension of Q) or :class:`BigComplex` balls.  Every
container below works with any of them through the small protocol implemented
by the helpers :func:`is_zero`, :func:`to_mpc` and :func:`scalar_inv`.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import gcd
from typing import Iterable, Mapping

import mpmath
from gmpy2 import mpq

Q = mpq

# Canonical variable order used by every report.
_CANON = ("x", "y", "z", "b", "t")
_TAIL = ("u", "v", "X", "Y", "Z")


class AlgebraError(ValueError):
    """Raised for degenerate algebraic input (zero resultant variable, non-units...)."""


class TowerError(AlgebraError):
    """Raised when an operation would need a second algebraic extension."""


def var_key(name: str):
    if name in _CANON[:4]:
        return (0, _CANON.index(name), 0)
    if name == "t":
        return (1, 0, 0)
    if name.startswith("t") and name[1:].isdigit():
        return (1, int(name[1:]), 0)
    if name in _TAIL:
        return (2, _TAIL.index(name), 0)
    return (3, 0, name)


def canonical_vars(names: Iterable[str]) -> tuple[str, ...]:
    return tuple(sorted(set(names), key=var_key))


# ---------------------------------------------------------------------------
# Number fields


def _q2mpf(c):
    return mpmath.mpf(int(c.numerator)) / int(c.denominator)


def _poly_trim(c: list) -> list:
    while c and c[-1] == 0:
        c.pop()
    return c


def _poly_mul(a, b):
    if not a or not b:
        return []
    out = [Q(0)] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            out[i + j] += ai * bj
    return _poly_trim(out)


def _poly_divmod(a, b):
    a = list(a)
    q = [Q(0)] * max(len(a) - len(b) + 1, 1)
    lb = b[-1]
    while len(_poly_trim(a)) >= len(b):
        shift = len(a) - len(b)
        c = a[-1] / lb
        q[shift] = c
        for i, bi in enumerate(b):
            a[shift + i] -= c * bi
        a.pop()
    return _poly_trim(q), _poly_trim(a)


@dataclass(frozen=True)
class NumberField:
    """Q[a]/(minpoly) together with the complex root that ``a`` denotes.

    ``minpoly`` is monic, coefficients listed from low to high degree.  The
    embedding is pinned by ``root_index`` into the canonically sorted root list
    and certified by ``box`` (an isolating square around that root).
    """

    minpoly: tuple
    root_index: int
    box: tuple

    @property
    def degree(self) -> int:
        return len(self.minpoly) - 1

    @staticmethod
    def from_minpoly(coeffs, root_index: int = 0) -> "NumberField":
        c = [Q(v) for v in coeffs]
        lead = c[-1]
        c = [v / lead for v in c]
        roots = sorted_roots(tuple(c))
        r = roots[root_index]
        sep = min((abs(r - s) for k, s in enumerate(roots) if k != root_index), default=mpmath.mpf(1))
        h = sep / 4
        box = (float(r.real - h), float(r.real + h), float(r.imag - h), float(r.imag + h))
        return NumberField(tuple(c), root_index, box)

    def generator_value(self, dps: int = 50):
        with mpmath.workdps(dps):
            return sorted_roots(self.minpoly, dps)[self.root_index]

    def label(self) -> str:
        terms = " + ".join(f"{v}*a^{k}" for k, v in enumerate(self.minpoly) if v != 0)
        return f"Q[a]/({terms}), root #{self.root_index}"


@lru_cache(maxsize=256)
def _sorted_roots_cached(coeffs: tuple, dps: int):
    with mpmath.workdps(dps + 20):
        rts = mpmath.polyroots([_q2mpf(c)
                                for c in reversed(coeffs)], maxsteps=400, extraprec=4 * dps)
        rts = [mpmath.mpc(r) for r in rts]
    return tuple(sorted(rts, key=_root_sort_key))


def _root_sort_key(r):
    arg = float(mpmath.arg(r)) if abs(r) > 0 else 0.0
    if arg < -1e-12:
        arg += 2 * float(mpmath.pi)
    if abs(arg - 2 * float(mpmath.pi)) < 1e-12:
        arg = 0.0
    return (round(arg, 9), float(abs(r)))


def sorted_roots(coeffs: tuple, dps: int = 50):
    """Complex roots of a polynomial (low->high coefficients), canonically sorted."""
    return _sorted_roots_cached(tuple(Q(c) for c in coeffs), dps)


@lru_cache(maxsize=64)
def _power_table(minpoly: tuple) -> tuple:
    """Reduced coefficients of a^k for k = d .. 2d-2 (minpoly monic)."""
    d = len(minpoly) - 1
    rows = []
    cur = [-v for v in minpoly[:d]]  # a^d
    for _ in range(max(d - 1, 0)):
        rows.append(tuple(cur))
        top = cur[-1]
        cur = [Q(0)] + cur[:-1]
        if top:
            cur = [v - top * m for v, m in zip(cur, minpoly[:d])]
    return tuple(rows)


def _make(field, c: tuple) -> "AlgebraicNumber":
    out = object.__new__(AlgebraicNumber)
    out.field = field
    out.c = c
    return out


class AlgebraicNumber:
    """Element of a :class:`NumberField`, stored as a reduced polynomial in the generator."""

    __slots__ = ("field", "c")

    def __init__(self, field: NumberField, coeffs):
        self.field = field
        c = [Q(v) for v in coeffs]
        d = field.degree
        if len(c) > d:
            _, c = _poly_divmod(c, list(field.minpoly))
        c = c + [Q(0)] * (d - len(c))
        self.c = tuple(c[:d])

    @staticmethod
    def generator(field: NumberField) -> "AlgebraicNumber":
        return AlgebraicNumber(field, [0, 1])

    def _coerce(self, other):
        if isinstance(other, AlgebraicNumber):
            if other.field is not self.field and other.field != self.field:
                raise TowerError("elements of different number fields")
            return other
        if isinstance(other, (int, type(Q(0)), Fraction)):
            return AlgebraicNumber(self.field, [Q(other)])
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return _make(self.field, tuple(a + b for a, b in zip(self.c, o.c)))

    __radd__ = __add__

    def __neg__(self):
        return _make(self.field, tuple(-a for a in self.c))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return _make(self.field, tuple(a - b for a, b in zip(self.c, o.c)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        a, b = self.c, o.c
        if not any(b[1:]):
            k = b[0]
            return _make(self.field, tuple(v * k for v in a))
        if not any(a[1:]):
            k = a[0]
            return _make(self.field, tuple(v * k for v in b))
        d = len(a)
        prod = [Q(0)] * (2 * d - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    prod[i + j] += ai * bj
        out = prod[:d]
        for k, row in enumerate(_power_table(self.field.minpoly)):
            h = prod[d + k]
            if h:
                out = [v + h * r for v, r in zip(out, row)]
        return _make(self.field, tuple(out))

    __rmul__ = __mul__

    def inverse(self) -> "AlgebraicNumber":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero algebraic number")
        # extended Euclid: keep s_i * self == r_i (mod minpoly)
        r0, r1 = list(self.field.minpoly), _poly_trim(list(self.c))
        s0, s1 = [], [Q(1)]
        while len(r1) > 1:
            q, r = _poly_divmod(r0, r1)
            if not r:
                raise AlgebraError("minimal polynomial is reducible")
            r0, r1 = r1, r
            s0, s1 = s1, _poly_sub(s0, _poly_mul(q, s1))
        g = r1[0]
        return AlgebraicNumber(self.field, [v / g for v in s1])

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        out = AlgebraicNumber(self.field, [1])
        base = self
        if k < 0:
            base, k = base.inverse(), -k
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def is_zero(self) -> bool:
        return all(v == 0 for v in self.c)

    def is_rational(self) -> bool:
        return all(v == 0 for v in self.c[1:])

    def __eq__(self, other):
        if isinstance(other, AlgebraicNumber):
            return self.field == other.field and self.c == other.c
        if isinstance(other, (int, type(Q(0)), Fraction)):
            return self.is_rational() and self.c[0] == other
        return NotImplemented

    def __hash__(self):
        return hash((self.field, self.c))

    def to_mpc(self, dps: int = 30):
        with mpmath.workdps(dps + 10):
            a = self.field.generator_value(dps + 10)
            acc = mpmath.mpc(0)
            for v in reversed(self.c):
                acc = acc * a + _q2mpf(v)
        return acc

    def __repr__(self):
        parts = [f"{v}*a^{k}" if k else f"{v}" for k, v in enumerate(self.c) if v != 0]
        return "(" + (" + ".join(parts) or "0") + ")"


def _poly_sub(a, b):
    n = max(len(a), len(b))
    out = [(a[i] if i < len(a) else Q(0)) - (b[i] if i < len(b) else Q(0)) for i in range(n)]
    return _poly_trim(out)


# ---------------------------------------------------------------------------
# Ball arithmetic


class BigComplex:
    """Midpoint-radius complex ball; every operation returns an enclosure."""

    __slots__ = ("mid", "rad")

    def __init__(self, mid, rad=0):
        self.mid = mpmath.mpc(mid)
        self.rad = mpmath.mpf(rad)

    @staticmethod
    def _ulp(z):
        return abs(z) * mpmath.mpf(2) ** (1 - mpmath.mp.prec)

    @classmethod
    def coerce(cls, v) -> "BigComplex":
        if isinstance(v, BigComplex):
            return v
        if isinstance(v, AlgebraicNumber):
            m = v.to_mpc(mpmath.mp.dps + 10)
            return cls(m, cls._ulp(m))
        if isinstance(v, (int,)):
            return cls(v, 0)
        if isinstance(v, (type(Q(0)), Fraction)):
            m = _q2mpf(v)
            return cls(m, cls._ulp(m))
        m = mpmath.mpc(v)
        return cls(m, 0)

    def __add__(self, other):
        o = BigComplex.coerce(other)
        m = self.mid + o.mid
        return BigComplex(m, self.rad + o.rad + self._ulp(m))

    __radd__ = __add__

    def __neg__(self):
        return BigComplex(-self.mid, self.rad)

    def __sub__(self, other):
        o = BigComplex.coerce(other)
        m = self.mid - o.mid
        return BigComplex(m, self.rad + o.rad + self._ulp(m))

    def __rsub__(self, other):
        return BigComplex.coerce(other) - self

    def __mul__(self, other):
        o = BigComplex.coerce(other)
        m = self.mid * o.mid
        r = abs(self.mid) * o.rad + abs(o.mid) * self.rad + self.rad * o.rad + self._ulp(m)
        return BigComplex(m, r)

    __rmul__ = __mul__

    def inverse(self) -> "BigComplex":
        a = abs(self.mid)
        if a <= self.rad:
            raise ZeroDivisionError("ball contains zero")
        m = 1 / self.mid
        return BigComplex(m, self.rad / (a * (a - self.rad)) + self._ulp(m))

    def __truediv__(self, other):
        return self * BigComplex.coerce(other).inverse()

    def __rtruediv__(self, other):
        return BigComplex.coerce(other) * self.inverse()

    def __pow__(self, k: int):
        out = BigComplex(1)
        for _ in range(k):
            out = out * self
        return out

    def contains(self, value) -> bool:
        return abs(mpmath.mpc(value) - self.mid) <= self.rad

    def excludes_zero(self) -> bool:
        return abs(self.mid) > self.rad

    def is_zero(self) -> bool:
        return self.mid == 0 and self.rad == 0

    def __eq__(self, other):
        if isinstance(other, (int, type(Q(0)))) and other == 0:
            return self.is_zero()
        if isinstance(other, BigComplex):
            return self.mid == other.mid and self.rad == other.rad
        return NotImplemented

    def __hash__(self):
        return hash((self.mid, self.rad))

    def __repr__(self):
        return f"[{mpmath.nstr(self.mid, 8)} +/- {mpmath.nstr(self.rad, 3)}]"


ExactScalar = "mpq | AlgebraicNumber"  # documented alias; see module docstring


def is_zero(c) -> bool:
    if isinstance(c, (AlgebraicNumber, BigComplex)):
        return c.is_zero()
    return c == 0


def is_exact(c) -> bool:
    return not isinstance(c, BigComplex)


def is_unit_scalar(c) -> bool:
    """Nonzero (exact) or ball excluding zero (numeric)."""
    if isinstance(c, BigComplex):
        return c.excludes_zero()
    return not is_zero(c)


def scalar_inv(c):
    if isinstance(c, (AlgebraicNumber, BigComplex)):
        return c.inverse()
    if c == 0:
        raise ZeroDivisionError("zero scalar")
    return Q(1) / c


def to_mpc(c, dps: int = 30):
    if isinstance(c, AlgebraicNumber):
        return c.to_mpc(dps)
    if isinstance(c, BigComplex):
        return c.mid
    if isinstance(c, (type(Q(0)), Fraction)):
        return _q2mpf(c)
    return mpmath.mpc(c)


def to_complex(c) -> complex:
    return complex(to_mpc(c, 20))


def scalar_field(c):
    return c.field if isinstance(c, AlgebraicNumber) else None


# ---------------------------------------------------------------------------
# Sparse multivariate polynomials


class MPoly:
    """Sparse polynomial with a canonical variable order and no stored zeros."""

    __slots__ = ("vars", "terms")

    def __init__(self, variables: Iterable[str], terms: Mapping | None = None):
        vs = tuple(variables)
        canon = canonical_vars(vs)
        terms = dict(terms or {})
        if canon != vs:
            perm = [vs.index(v) for v in canon]
            terms = {tuple(e[p] for p in perm): c for e, c in terms.items()}
        self.vars = canon
        self.terms = {e: (Q(c) if isinstance(c, int) else c) for e, c in terms.items() if not is_zero(c)}

    # -- constructors
    @staticmethod
    def const(c, variables=()) -> "MPoly":
        n = len(canonical_vars(variables))
        return MPoly(canonical_vars(variables), {(0,) * n: c})

    @staticmethod
    def var(name: str, variables=()) -> "MPoly":
        vs = canonical_vars(tuple(variables) + (name,))
        e = tuple(1 if v == name else 0 for v in vs)
        return MPoly(vs, {e: Q(1)})

    @staticmethod
    def zero(variables=()) -> "MPoly":
        return MPoly(canonical_vars(variables), {})

    # -- structure
    def with_vars(self, variables) -> "MPoly":
        vs = canonical_vars(tuple(variables) + self.vars)
        if vs == self.vars:
            return self
        idx = [vs.index(v) for v in self.vars]
        out = {}
        for e, c in self.terms.items():
            ne = [0] * len(vs)
            for i, k in zip(idx, e):
                ne[i] = k
            out[tuple(ne)] = c
        p = MPoly.__new__(MPoly)
        p.vars, p.terms = vs, out
        return p

    def used_vars(self) -> tuple[str, ...]:
        return tuple(v for i, v in enumerate(self.vars) if any(e[i] for e in self.terms))

    def drop_unused(self) -> "MPoly":
        used = self.used_vars()
        idx = [self.vars.index(v) for v in used]
        return MPoly(used, {tuple(e[i] for i in idx): c for e, c in self.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_term(self):
        return self.terms.get((0,) * len(self.vars), Q(0))

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def low_degree(self) -> int:
        return min((sum(e) for e in self.terms), default=-1)

    def degree(self, var: str) -> int:
        if var not in self.vars:
            return 0 if self.terms else -1
        i = self.vars.index(var)
        return max((e[i] for e in self.terms), default=-1)

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: kv[0], reverse=True)

    def coeff_list(self, var: str) -> list["MPoly"]:
        """Coefficients as polynomials in the remaining variables, index = power of var."""
        p = self.with_vars((var,))
        i = p.vars.index(var)
        rest = tuple(v for v in p.vars if v != var)
        d = p.degree(var)
        buckets = [dict() for _ in range(max(d, 0) + 1)]
        for e, c in p.terms.items():
            buckets[e[i]][e[:i] + e[i + 1:]] = c
        return [MPoly(rest, b) for b in buckets]

    def homogeneous_part(self, degree: int) -> "MPoly":
        return MPoly(self.vars, {e: c for e, c in self.terms.items() if sum(e) == degree})

    def lowest_form(self) -> "MPoly":
        return self.homogeneous_part(self.low_degree())

    # -- arithmetic
    def _align(self, other):
        if isinstance(other, MPoly):
            if other.vars == self.vars:
                return self, other
            vs = canonical_vars(self.vars + other.vars)
            return self.with_vars(vs), other.with_vars(vs)
        return self, MPoly.const(other, self.vars)

    def __add__(self, other):
        a, b = self._align(other)
        out = dict(a.terms)
        for e, c in b.terms.items():
            out[e] = out[e] + c if e in out else c
        return MPoly(a.vars, out)

    __radd__ = __add__

    def __neg__(self):
        return MPoly(self.vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, MPoly):
            if is_zero(other):
                return MPoly(self.vars, {})
            return MPoly(self.vars, {e: c * other for e, c in self.terms.items()})
        a, b = self._align(other)
        out: dict = {}
        for e1, c1 in a.terms.items():
            for e2, c2 in b.terms.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                v = c1 * c2
                if e in out:
                    out[e] = out[e] + v
                else:
                    out[e] = v
        return MPoly(a.vars, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise AlgebraError("negative power of a polynomial")
        out = MPoly.const(Q(1), self.vars)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if not isinstance(other, MPoly):
            other = MPoly.const(other, self.vars)
        a, b = self._align(other)
        return a.terms == b.terms

    def __hash__(self):
        p = self.drop_unused()
        return hash((p.vars, frozenset(p.terms.items())))

    def diff(self, var: str) -> "MPoly":
        if var not in self.vars:
            return MPoly(self.vars, {})
        i = self.vars.index(var)
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                ne = e[:i] + (e[i] - 1,) + e[i + 1:]
                out[ne] = c * e[i]
        return MPoly(self.vars, out)

    def subs(self, mapping: Mapping[str, object]) -> "MPoly":
        """Substitute variables by polynomials or scalars (simultaneously)."""
        targets = [v for v in self.vars if v in mapping]
        if not targets:
            return self
        keep = tuple(v for v in self.vars if v not in mapping)
        images = {}
        for v in targets:
            img = mapping[v]
            images[v] = img if isinstance(img, MPoly) else MPoly.const(Q(img) if isinstance(img, int) else img, ())
        allvars = canonical_vars(keep + tuple(x for im in images.values() for x in im.vars))
        images = {v: im.with_vars(allvars) for v, im in images.items()}
        kidx = [self.vars.index(v) for v in keep]
        tidx = [(self.vars.index(v), v) for v in targets]
        pow_cache: dict = {}

        def power(v, k):
            key = (v, k)
            if key not in pow_cache:
                pow_cache[key] = images[v] ** k
            return pow_cache[key]

        out = MPoly.zero(allvars)
        for e, c in self.terms.items():
            mono = MPoly(keep, {tuple(e[i] for i in kidx): c}).with_vars(allvars)
            for i, v in tidx:
                if e[i]:
                    mono = mono * power(v, e[i])
            out = out + mono
        return out

    def rename(self, mapping: Mapping[str, str]) -> "MPoly":
        return MPoly(tuple(mapping.get(v, v) for v in self.vars), self.terms)

    def evaluate(self, values: Mapping[str, object]):
        """Numeric evaluation (mpmath) at a complete assignment."""
        acc = mpmath.mpc(0)
        vals = [mpmath.mpc(values[v]) if not isinstance(values[v], mpmath.mpc) else values[v] for v in self.vars]
        for e, c in self.terms.items():
            term = to_mpc(c)
            for val, k in zip(vals, e):
                if k:
                    term *= val ** k
            acc += term
        return acc

    def exact_value(self, values: Mapping[str, object]):
        """Exact evaluation when all values are exact scalars."""
        acc = Q(0)
        vals = [values[v] for v in self.vars]
        for e, c in self.terms.items():
            term = c
            for val, k in zip(vals, e):
                if k:
                    term = term * (val ** k)
            acc = term + acc
        return acc

    def exact_div(self, other: "MPoly") -> "MPoly":
        """Exact division; raises if ``other`` does not divide ``self``."""
        a, b = self._align(other)
        if b.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        lead_e, lead_c = max(b.terms.items(), key=lambda kv: kv[0])
        inv = scalar_inv(lead_c)
        rem = dict(a.terms)
        quot: dict = {}
        while rem:
            e = max(rem)
            c = rem[e]
            d = tuple(x - y for x, y in zip(e, lead_e))
            if any(k < 0 for k in d):
                raise AlgebraError("polynomial division is not exact")
            q = c * inv
            quot[d] = q
            for eb, cb in b.terms.items():
                ee = tuple(x + y for x, y in zip(d, eb))
                v = rem.get(ee, Q(0)) - q * cb
                if is_zero(v):
                    rem.pop(ee, None)
                else:
                    rem[ee] = v
        return MPoly(a.vars, quot)

    # -- printing
    def __str__(self):
        return format_mpoly(self)

    def __repr__(self):
        return f"MPoly({format_mpoly(self)!r})"

    def is_exact(self) -> bool:
        return all(is_exact(c) for c in self.terms.values())


def format_scalar(c) -> str:
    if isinstance(c, AlgebraicNumber):
        if c.field.minpoly == (Q(1), Q(0), Q(1)):
            re, im = c.c
            parts = []
            if re != 0:
                parts.append(str(re))
            if im != 0:
                parts.append(("" if im == 1 else ("-" if im == -1 else f"{im}*")) + "i")
            s = " + ".join(parts).replace("+ -", "- ")
            return f"({s})"
        return repr(c)
    if isinstance(c, BigComplex):
        return repr(c)
    return str(c)


def format_mpoly(p: MPoly) -> str:
    if p.is_zero():
        return "0"
    pieces = []
    for e, c in sorted(p.terms.items(), key=lambda kv: (sum(kv[0]), kv[0]), reverse=True):
        mono = "*".join(f"{v}^{k}" if k > 1 else v for v, k in zip(p.vars, e) if k)
        cs = format_scalar(c)
        neg = False
        if not isinstance(c, (AlgebraicNumber, BigComplex)) and c < 0:
            neg, cs = True, format_scalar(-c)
        if mono:
            body = mono if cs == "1" else f"{cs}*{mono}"
        else:
            body = cs
        pieces.append(("- " if neg else "+ ") + body)
    s = " ".join(pieces)
    return s[2:] if s.startswith("+ ") else "-" + s[2:]


def mpoly_from_sympy(expr, variables=None) -> MPoly:
    import sympy as sp

    poly = sp.Poly(expr, *(variables or sorted(expr.free_symbols, key=lambda s: s.name)))
    names = [str(g) for g in poly.gens]
    terms = {}
    for mon, c in poly.terms():
        c = sp.nsimplify(c)
        if c.is_Rational:
            terms[tuple(mon)] = Q(int(c.p), int(c.q))
        else:
            raise AlgebraError(f"non-rational coefficient {c}")
    return MPoly(names, terms)


def mpoly_to_sympy(p: MPoly):
    import sympy as sp

    syms = [sp.Symbol(v) for v in p.vars]
    acc = sp.Integer(0)
    for e, c in p.terms.items():
        if isinstance(c, AlgebraicNumber):
            if c.field.minpoly == (Q(1), Q(0), Q(1)) and c.field.root_index in (0, 1):
                imag = sp.I if c.field.generator_value().imag > 0 else -sp.I
                cs = sp.Rational(int(c.c[0].numerator), int(c.c[0].denominator)) + \
                    sp.Rational(int(c.c[1].numerator), int(c.c[1].denominator)) * imag
            else:
                raise AlgebraError("only Gaussian coefficients convert to sympy")
        else:
            cs = sp.Rational(int(c.numerator), int(c.denominator))
        term = cs
        for s, k in zip(syms, e):
            term *= s ** k
        acc += term
    return acc


# ---------------------------------------------------------------------------
# Resultants and discriminants


def _det(mat):
    """Determinant of a square matrix of MPoly entries (minor expansion with memo)."""
    n = len(mat)
    if n == 0:
        return None
    memo: dict = {}

    def minor(row: int, cols: int):
        # determinant of rows row..n-1 restricted to columns in bitmask ``cols``
        if row == n:
            return 1
        key = (row, cols)
        if key in memo:
            return memo[key]
        acc = None
        sign = 1
        for j in range(n):
            if not cols >> j & 1:
                continue
            entry = mat[row][j]
            if entry is not None and not entry.is_zero():
                sub = minor(row + 1, cols & ~(1 << j))
                if sub is not None and sub != 1 and sub.is_zero():
                    sub = None
                if sub is not None:
                    term = entry if sub == 1 else entry * sub
                    term = term if sign > 0 else -term
                    acc = term if acc is None else acc + term
            sign = -sign
        memo[key] = acc
        return acc

    return minor(0, (1 << n) - 1)


def sylvester_matrix(p: MPoly, q: MPoly, var: str):
    vs = canonical_vars(p.vars + q.vars + (var,))
    p, q = p.with_vars(vs), q.with_vars(vs)
    pc, qc = p.coeff_list(var), q.coeff_list(var)
    m, n = len(pc) - 1, len(qc) - 1
    size = m + n
    rows = []
    for i in range(n):
        row = [None] * size
        for k, c in enumerate(reversed(pc)):
            row[i + k] = c
        rows.append(row)
    for i in range(m):
        row = [None] * size
        for k, c in enumerate(reversed(qc)):
            row[i + k] = c
        rows.append(row)
    return rows, m, n


def resultant(p: MPoly, q: MPoly, var: str) -> MPoly:
    """Sylvester resultant of ``p`` and ``q`` eliminating ``var``."""
    if p.is_zero() or q.is_zero():
        raise AlgebraError("resultant of a zero polynomial")
    m, n = p.degree(var), q.degree(var)
    if m <= 0 and n <= 0:
        raise AlgebraError("no elimination variable")
    rest = tuple(v for v in canonical_vars(p.vars + q.vars) if v != var)
    rows, m, n = sylvester_matrix(p, q, var)
    d = _det(rows)
    if d is None:
        return MPoly.zero(rest)
    return d.with_vars(rest).drop_unused().with_vars(rest) if d.vars != rest else d


def discriminant(p: MPoly, var: str) -> MPoly:
    """Discriminant in ``var``: Res(p, dp)/lc with the classical sign."""
    d = p.degree(var)
    if d < 2:
        raise AlgebraError("discriminant needs degree >= 2 in the variable")
    res = resultant(p, p.diff(var), var)
    lc = p.coeff_list(var)[d]
    if res.is_zero():
        raise AlgebraError("non-reduced germ")
    out = res.exact_div(lc.with_vars(res.vars))
    if (d * (d - 1) // 2) % 2:
        out = -out
    return out


def subresultant(p: MPoly, q: MPoly, var: str, j: int) -> list[MPoly]:
    """Coefficients (low to high) of the j-th subresultant polynomial of p, q in ``var``."""
    vs = canonical_vars(p.vars + q.vars + (var,))
    p, q = p.with_vars(vs), q.with_vars(vs)
    pc, qc = p.coeff_list(var), q.coeff_list(var)
    m, n = len(pc) - 1, len(qc) - 1
    if not (0 <= j < min(m, n) + (1 if m != n else 0)):
        raise AlgebraError("subresultant index out of range")
    width = m + n - j
    rows = []
    for i in range(n - j):
        row = [None] * width
        for k, c in enumerate(reversed(pc)):
            row[i + k] = c
        rows.append(row)
    for i in range(m - j):
        row = [None] * width
        for k, c in enumerate(reversed(qc)):
            row[i + k] = c
        rows.append(row)
    lead = m + n - 2 * j - 1
    rest = tuple(v for v in vs if v != var)
    coeffs = []
    for i in range(j + 1):
        col = width - 1 - i  # column of var^i
        sub = [r[:lead] + [r[col]] for r in rows]
        d = _det(sub)
        coeffs.append(MPoly.zero(rest) if d is None else d.with_vars(rest))
    return coeffs


def shear(f: MPoly, a, b) -> MPoly:
    """Substitute x -> x + a z, y -> y + b z (a, b scalars or polynomials)."""
    z = MPoly.var("z", f.vars)
    x = MPoly.var("x", f.vars)
    y = MPoly.var("y", f.vars)
    a = a if isinstance(a, MPoly) else MPoly.const(Q(a) if isinstance(a, int) else a, ())
    b = b if isinstance(b, MPoly) else MPoly.const(Q(b) if isinstance(b, int) else b, ())
    return f.subs({"x": x + a * z, "y": y + b * z})


# ---------------------------------------------------------------------------
# Truncated fractional-power series


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


class TruncSeries:
    """Series in u (with x = u**ram) whose coefficients are polynomials in parameters.

    Terms are stored flat as ``{(k, param_exponents): scalar}``.  ``order`` bounds
    the u-exponents (k < order) and ``porder`` bounds the total parameter degree
    (|e| < porder); everything outside that window is unknown, not zero.
    """

    __slots__ = ("ram", "order", "params", "porder", "terms", "exact")

    def __init__(self, terms: Mapping, ram: int = 1, order: int = 24, params: tuple = (),
                 porder: int = 1 << 30, exact: bool | None = None):
        self.ram = ram
        self.order = order
        self.params = tuple(params)
        self.porder = porder
        self.terms = {k: v for k, v in terms.items()
                      if k[0] < order and sum(k[1]) < porder and not is_zero(v)}
        self.exact = all(is_exact(v) for v in self.terms.values()) if exact is None else exact

    # -- constructors
    @classmethod
    def zero(cls, ram=1, order=24, params=(), porder=1 << 30):
        return cls({}, ram, order, params, porder, True)

    @classmethod
    def const(cls, c, ram=1, order=24, params=(), porder=1 << 30):
        return cls({(0, (0,) * len(params)): c}, ram, order, params, porder)

    @classmethod
    def monomial(cls, k, c=Q(1), ram=1, order=24, params=(), porder=1 << 30, pexp=None):
        return cls({(k, pexp or (0,) * len(params)): c}, ram, order, params, porder)

    @classmethod
    def from_param_poly(cls, p: MPoly, params: tuple, ram=1, order=24, porder=1 << 30, k: int = 0):
        p = p.with_vars(params)
        idx = [p.vars.index(v) for v in params]
        extra = [i for i, v in enumerate(p.vars) if v not in params]
        terms = {}
        for e, c in p.terms.items():
            if any(e[i] for i in extra):
                raise AlgebraError("polynomial involves non-parameter variables")
            terms[(k, tuple(e[i] for i in idx))] = c
        return cls(terms, ram, order, params, porder)

    @classmethod
    def from_mpoly(cls, p: MPoly, var: str, params: tuple, ram=1, order=24, porder=1 << 30):
        p = p.with_vars((var,) + tuple(params))
        vi = p.vars.index(var)
        idx = [p.vars.index(v) for v in params]
        terms = {}
        for e, c in p.terms.items():
            if any(e[i] for i in range(len(e)) if i != vi and i not in idx):
                raise AlgebraError("polynomial involves unexpected variables")
            terms[(e[vi], tuple(e[i] for i in idx))] = c
        return cls(terms, ram, order, params, porder)

    def _new(self, terms, ram=None, order=None, porder=None, exact=None):
        return TruncSeries(terms, self.ram if ram is None else ram,
                           self.order if order is None else order, self.params,
                           self.porder if porder is None else porder, exact)

    # -- inspection
    def valuation(self) -> int | None:
        """Smallest u-exponent with a nonzero coefficient (None if zero to order)."""
        return min((k for k, _ in self.terms), default=None)

    def param_valuation(self) -> int:
        return min((sum(e) for _, e in self.terms), default=self.porder)

    def coefficient(self, k: int) -> MPoly:
        return MPoly(self.params, {e: c for (kk, e), c in self.terms.items() if kk == k})

    @property
    def coeffs(self) -> dict[int, MPoly]:
        ks = sorted({k for k, _ in self.terms})
        return {k: self.coefficient(k) for k in ks}

    def constant_term(self):
        return self.terms.get((0, (0,) * len(self.params)), Q(0))

    def is_zero(self) -> bool:
        return not self.terms

    def depends_on(self, param: str) -> bool:
        i = self.params.index(param)
        return any(e[i] for _, e in self.terms)

    def unit_cofactor(self):
        """If self = u**k * w, return (k, w); w's constant term decides unit-ness."""
        k = self.valuation()
        if k is None:
            return None, None
        return k, self.shift(-k)

    def is_unit_times_power(self) -> bool:
        k, w = self.unit_cofactor()
        return k is not None and is_unit_scalar(w.constant_term())

    # -- ramification
    def lift(self, r: int) -> "TruncSeries":
        """Express in v with u = v**r (ramification multiplied by r)."""
        if r == 1:
            return self
        return TruncSeries({(k * r, e): c for (k, e), c in self.terms.items()}, self.ram * r,
                           self.order * r if self.order < (1 << 29) else self.order, self.params,
                           self.porder, self.exact)

    def _common(self, other: "TruncSeries"):
        if self.params != other.params:
            raise AlgebraError("series over different parameter sets")
        if self.ram == other.ram:
            return self, other
        n = _lcm(self.ram, other.ram)
        return self.lift(n // self.ram), other.lift(n // other.ram)

    # -- ring operations
    def _coerce(self, other):
        if isinstance(other, TruncSeries):
            return other
        return TruncSeries.const(Q(other) if isinstance(other, int) else other, self.ram, 1 << 30,
                                 self.params, 1 << 30)

    def __add__(self, other):
        a, b = self._common(self._coerce(other))
        out = dict(a.terms)
        for key, c in b.terms.items():
            out[key] = out[key] + c if key in out else c
        return TruncSeries(out, a.ram, min(a.order, b.order), a.params, min(a.porder, b.porder),
                           a.exact and b.exact)

    __radd__ = __add__

    def __neg__(self):
        return self._new({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "TruncSeries":
        return self._new({k: v * c for k, v in self.terms.items()}, exact=self.exact and is_exact(c))

    def __mul__(self, other):
        if not isinstance(other, TruncSeries):
            return self.scale(Q(other) if isinstance(other, int) else other)
        a, b = self._common(other)
        va, vb = a.valuation(), b.valuation()
        if va is None or vb is None:
            order = min(a.order + (vb or 0), b.order + (va or 0))
            porder = min(a.porder, b.porder)
            return TruncSeries({}, a.ram, order, a.params, porder, a.exact and b.exact)
        order = min(a.order + vb, b.order + va)
        pa, pb = a.param_valuation(), b.param_valuation()
        porder = min(a.porder + pb, b.porder + pa)
        out: dict = {}
        bt = list(b.terms.items())
        for (k1, e1), c1 in a.terms.items():
            if k1 + vb >= order:
                continue
            s1 = sum(e1)
            for (k2, e2), c2 in bt:
                k = k1 + k2
                if k >= order:
                    continue
                if e1:
                    e = tuple(x + y for x, y in zip(e1, e2))
                    if s1 + sum(e2) >= porder:
                        continue
                else:
                    e = e1
                key = (k, e)
                v = c1 * c2
                if key in out:
                    out[key] = out[key] + v
                else:
                    out[key] = v
        return TruncSeries(out, a.ram, order, a.params, porder, a.exact and b.exact)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = TruncSeries.const(Q(1), self.ram, 1 << 30, self.params, 1 << 30)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def shift(self, s: int) -> "TruncSeries":
        """Multiply by u**s (s may be negative when the valuation allows it)."""
        if s < 0 and self.terms and self.valuation() + s < 0:
            raise AlgebraError("negative exponent after shift")
        return TruncSeries({(k + s, e): c for (k, e), c in self.terms.items()}, self.ram,
                           self.order + s, self.params, self.porder, self.exact)

    def truncate(self, order: int | None = None, porder: int | None = None) -> "TruncSeries":
        return TruncSeries(self.terms, self.ram, min(self.order, order or self.order), self.params,
                           min(self.porder, porder or self.porder), self.exact)

    def diff_u(self) -> "TruncSeries":
        return TruncSeries({(k - 1, e): c * k for (k, e), c in self.terms.items() if k},
                           self.ram, self.order - 1, self.params, self.porder, self.exact)

    def diff_param(self, name: str) -> "TruncSeries":
        i = self.params.index(name)
        out = {}
        for (k, e), c in self.terms.items():
            if e[i]:
                out[(k, e[:i] + (e[i] - 1,) + e[i + 1:])] = c * e[i]
        return TruncSeries(out, self.ram, self.order, self.params, self.porder - 1, self.exact)

    def diff(self, name: str) -> "TruncSeries":
        return self.diff_u() if name == "u" else self.diff_param(name)

    def invert_unit(self, order: int | None = None) -> "TruncSeries":
        """Multiplicative inverse of a series with nonzero constant term."""
        c0 = self.constant_term()
        if not is_unit_scalar(c0):
            raise AlgebraError("zero constant term")
        order = self.order if order is None else min(order, self.order)
        target = self.truncate(order)
        inv0 = scalar_inv(c0)
        two = TruncSeries.const(Q(2), self.ram, 1 << 30, self.params, 1 << 30)
        g = TruncSeries.const(inv0, self.ram, 1, self.params, 1)
        prec, top = 1, max(order, self.porder)
        # Newton iteration at doubling precision; iterate to a fixed point at each level
        while True:
            prec = min(2 * prec, top)
            o, po = min(prec, order), min(prec, self.porder)
            t = target.truncate(o, po)
            g = TruncSeries(g.terms, self.ram, o, self.params, po, g.exact)
            for _ in range(64):
                nxt = (g * (two - t * g)).truncate(o, po)
                if nxt.terms == g.terms:
                    break
                g = nxt
            if prec >= top:
                break
        return TruncSeries(g.terms, self.ram, order, self.params, self.porder, g.exact)

    def __truediv__(self, other):
        if not isinstance(other, TruncSeries):
            return self.scale(scalar_inv(Q(other) if isinstance(other, int) else other))
        a, b = self._common(other)
        k, w = b.unit_cofactor()
        if k is None:
            raise ZeroDivisionError("division by a series that vanishes to its order")
        num = a.shift(-k) if k else a
        return num * w.invert_unit()

    def compose(self, inner: "TruncSeries") -> "TruncSeries":
        """Substitute u -> inner(u) (inner must have positive valuation and no parameters)."""
        if inner.valuation() is None or inner.valuation() < 1:
            raise AlgebraError("composition needs an inner series of positive valuation")
        ks = sorted({k for k, _ in self.terms})
        out = TruncSeries.zero(inner.ram, 1 << 30, self.params, self.porder)
        params = self.params
        inner = TruncSeries(inner.terms, inner.ram, inner.order, params, self.porder, inner.exact) \
            if inner.params != params else inner
        power = TruncSeries.const(Q(1), inner.ram, 1 << 30, params, 1 << 30)
        last = 0
        v = inner.valuation()
        cap = min(inner.order + (self.order - 1) * v if self.order < (1 << 29) else inner.order,
                  self.order * v if self.order < (1 << 29) else 1 << 30)
        for k in ks:
            power = power * (inner ** (k - last)) if k > last else power
            last = k
            coef = TruncSeries({(0, e): c for (kk, e), c in self.terms.items() if kk == k},
                               inner.ram, 1 << 30, params, self.porder)
            out = out + coef * power
        return out.truncate(cap)

    def specialize(self, values: Mapping[str, object]) -> "TruncSeries":
        """Substitute exact or numeric values for some parameters."""
        keep = tuple(p for p in self.params if p not in values)
        kidx = [self.params.index(p) for p in keep]
        sidx = [(self.params.index(p), values[p]) for p in self.params if p in values]
        out: dict = {}
        for (k, e), c in self.terms.items():
            v = c
            for i, val in sidx:
                if e[i]:
                    v = v * (val ** e[i])
            key = (k, tuple(e[i] for i in kidx))
            out[key] = out[key] + v if key in out else v
        porder = self.porder if keep else 1 << 30
        return TruncSeries(out, self.ram, self.order, keep, porder)

    def evaluate(self, u, params: Mapping[str, object] | None = None):
        """Numeric value at u (mpmath) and parameter values."""
        params = params or {}
        pv = [mpmath.mpc(params.get(p, 0)) for p in self.params]
        u = mpmath.mpc(u)
        acc = mpmath.mpc(0)
        for (k, e), c in self.terms.items():
            term = to_mpc(c) * (u ** k if k else 1)
            for val, j in zip(pv, e):
                if j:
                    term *= val ** j
            acc += term
        return acc

    def numeric_coefficients(self, dps: int = 30) -> dict:
        return {key: to_mpc(c, dps) for key, c in self.terms.items()}

    def __eq__(self, other):
        if not isinstance(other, TruncSeries):
            return NotImplemented
        a, b = self._common(other)
        order = min(a.order, b.order)
        porder = min(a.porder, b.porder)
        ta = {k: v for k, v in a.terms.items() if k[0] < order and sum(k[1]) < porder}
        tb = {k: v for k, v in b.terms.items() if k[0] < order and sum(k[1]) < porder}
        return ta == tb

    def __hash__(self):
        return hash((self.ram, frozenset(self.terms)))

    def to_mpoly(self, var: str = "u") -> MPoly:
        vs = (var,) + self.params
        return MPoly(vs, {(k,) + e: c for (k, e), c in self.terms.items()})

    def __repr__(self):
        body = format_mpoly(self.to_mpoly()) if self.terms else "0"
        return f"TruncSeries(n={self.ram}, O(u^{self.order}): {body})"


def lcm_lift(a: TruncSeries, b: TruncSeries) -> tuple[TruncSeries, TruncSeries]:
    """Bring two series to a common ramification."""
    return a._common(b)


def series_like(ref: TruncSeries, terms: Mapping) -> TruncSeries:
    return TruncSeries(terms, ref.ram, ref.order, ref.params, ref.porder)


def evaluate_mpoly_on_series(p: MPoly, assignment: Mapping[str, TruncSeries], params: tuple,
                             ram: int, order: int, porder: int) -> TruncSeries:
    """P(series...) where variables not in ``assignment`` must be parameters."""
    p = p.with_vars(tuple(assignment) + tuple(params))
    names = p.vars
    cache: dict = {}

    def power(name, k):
        key = (name, k)
        if key not in cache:
            if k == 1:
                cache[key] = assignment[name]
            else:
                h = k // 2
                cache[key] = power(name, h) * power(name, k - h)
        return cache[key]

    acc = TruncSeries.zero(ram, order, params, porder)
    pidx = {v: params.index(v) for v in names if v in params}
    groups: dict = {}
    for e, c in p.terms.items():
        key = tuple((v, k) for v, k in zip(names, e) if v in assignment and k)
        pe = [0] * len(params)
        for v, k in zip(names, e):
            if v in pidx:
                pe[pidx[v]] += k
        groups.setdefault(key, {})
        groups[key][(0, tuple(pe))] = groups[key].get((0, tuple(pe)), Q(0)) + c
    for key, pterms in groups.items():
        coef = TruncSeries(pterms, ram, 1 << 30, params, porder)
        term = coef
        for name, k in key:
            term = term * power(name, k)
        acc = acc + term
    return acc.truncate(order, porder)


def all_exponents(n: int, d: int):
    """Exponent vectors in n variables of total degree <= d (helper for tests)."""
    for e in product(range(d + 1), repeat=n):
        if sum(e) <= d:
            yield e
