from __future__ import annotations

import mpmath
import pytest
import sympy
from sympy.polys.subresultants_qq_zz import res as sylvester_det
from hypothesis import given, settings
from hypothesis import strategies as st

from polarwedge.algebra import (AlgebraError, AlgebraicNumber, BigComplex, MPoly, NumberField, Q,
                                TruncSeries, _poly_divmod, _poly_mul, discriminant, mpoly_from_sympy,
                                mpoly_to_sympy, resultant, to_mpc)

X, Y, Z = sympy.symbols("x y z")
VARS = ("x", "y", "z")

small = st.integers(-5, 5)
exps = st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(0, 3))


@st.composite
def polys(draw, max_terms=5):
    terms = draw(st.dictionaries(exps, small.filter(bool), min_size=1, max_size=max_terms))
    return MPoly(VARS, {e: Q(c) for e, c in terms.items()})


@given(polys(), polys())
@settings(max_examples=60, deadline=None)
def test_product_matches_sympy(p, q):
    assert sympy.expand(mpoly_to_sympy(p * q) - mpoly_to_sympy(p) * mpoly_to_sympy(q)) == 0


@given(polys(3), polys(3))
@settings(max_examples=30, deadline=None)
def test_resultant_matches_sympy(p, q):
    if p.degree("z") == 0 or q.degree("z") == 0:
        return
    ours = mpoly_to_sympy(resultant(p, q, "z"))
    # Sylvester determinant; sympy.resultant gets the sign wrong for e.g. (z, z^3 + 1)
    ref = sylvester_det(mpoly_to_sympy(p), mpoly_to_sympy(q), Z)
    assert sympy.expand(ours - ref) == 0


def test_discriminant_of_main_germ():
    f = mpoly_from_sympy(Z**2 - Y**3 - X**2 * Y**2, (X, Y, Z))
    d = mpoly_to_sympy(discriminant(f, "z"))
    ref = sympy.discriminant(Z**2 - Y**3 - X**2 * Y**2, Z)
    assert sympy.expand(d - ref) == 0
    assert sympy.factor(d).has(Y**2)


def test_substitution_and_diff():
    f = mpoly_from_sympy(Z**2 - X * Y**2, (X, Y, Z))
    g = f.subs({"x": Q(2)})
    assert "x" not in g.vars
    assert mpoly_to_sympy(f.diff("y")) == -2 * X * Y


# ---------------------------------------------------------------------------
# number fields

FIELD = NumberField.from_minpoly([-3, 3, -3, 1])

field_elems = st.lists(st.fractions(min_value=-20, max_value=20, max_denominator=9), min_size=3, max_size=3)


def _elem(cs):
    return AlgebraicNumber(FIELD, [Q(c.numerator, c.denominator) for c in cs])


@given(field_elems, field_elems)
@settings(max_examples=100, deadline=None)
def test_field_multiply_agrees_with_long_division(a, b):
    x, y = _elem(a), _elem(b)
    _, rem = _poly_divmod(_poly_mul(list(x.c), list(y.c)), list(FIELD.minpoly))
    assert list((x * y).c) == rem + [Q(0)] * (3 - len(rem))


@given(field_elems)
@settings(max_examples=50, deadline=None)
def test_field_inverse(a):
    x = _elem(a)
    if x.is_zero():
        with pytest.raises(ZeroDivisionError):
            x.inverse()
        return
    assert x * x.inverse() == 1


def test_field_embedding_is_a_root():
    a = AlgebraicNumber.generator(FIELD)
    with mpmath.workdps(40):
        v = to_mpc(a, 40)
        assert abs(v**3 - 3 * v**2 + 3 * v - 3) < mpmath.mpf(10) ** -30


# ---------------------------------------------------------------------------
# balls


@given(st.floats(-10, 10), st.floats(-10, 10), st.floats(-10, 10), st.floats(-10, 10))
@settings(max_examples=50, deadline=None)
def test_ball_product_encloses(a, b, c, d):
    p = BigComplex(mpmath.mpc(a, b), 1e-20) * BigComplex(mpmath.mpc(c, d), 1e-20)
    assert p.contains(mpmath.mpc(a, b) * mpmath.mpc(c, d))


# ---------------------------------------------------------------------------
# truncated series

coeff = st.fractions(min_value=-9, max_value=9, max_denominator=7)


@st.composite
def unit_series(draw):
    terms = {(0, (0,)): Q(draw(st.integers(1, 5)))}
    for _ in range(draw(st.integers(0, 6))):
        k, e = draw(st.integers(0, 5)), draw(st.integers(0, 5))
        if (k, e) != (0, 0):
            c = draw(coeff)
            terms[(k, (e,))] = Q(c.numerator, c.denominator)
    return TruncSeries(terms, 1, 10, ("b",), 10)


@given(unit_series())
@settings(max_examples=40, deadline=None)
def test_inverse_of_unit(s):
    one = (s * s.invert_unit()).truncate(10, 10)
    assert one.terms == {(0, (0,)): Q(1)}


def test_inverse_needs_unit():
    s = TruncSeries({(1, ()): Q(1)}, 1, 8)
    with pytest.raises(AlgebraError):
        s.invert_unit()


def test_series_product_truncates():
    s = TruncSeries({(0, ()): Q(1), (1, ()): Q(1)}, 1, 5)
    p = s**6
    assert p.order == 5
    assert p.terms[(4, ())] == 15


def test_specialize_removes_parameter():
    s = TruncSeries({(1, (2,)): Q(3), (2, (0,)): Q(1)}, 1, 6, ("t",), 6)
    sp = s.specialize({"t": Q(1, 2)})
    assert sp.params == ()
    assert sp.terms[(1, ())] == Q(3, 4)
