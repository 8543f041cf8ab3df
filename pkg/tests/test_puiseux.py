from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polarwedge.algebra import Q
from polarwedge.cli import parse_germ
from polarwedge.puiseux import (back_substitution_order, characteristic_exponents, compare_types,
                                contact_exponent, equisingularity_type, newton_puiseux,
                                newton_puiseux_param)


def test_cusp_has_one_branch_of_ramification_two():
    (br,) = newton_puiseux(parse_germ("y^2 - x^3"), N=12)
    assert br.ram == 2
    assert characteristic_exponents(br) == (Fraction(3, 2),)
    assert back_substitution_order(parse_germ("y^2 - x^3"), br) is None or \
        back_substitution_order(parse_germ("y^2 - x^3"), br) >= 12


def test_node_branches_and_contact():
    brs = newton_puiseux(parse_germ("y^2 - x^2 - x^3"), N=12)
    assert sorted(b.ram for b in brs) == [1, 1]
    assert contact_exponent(brs[0], brs[1]) == 1


def test_tacnode_contact_two():
    brs = newton_puiseux(parse_germ("(y - x^2)*(y + x^2)"), N=10)
    assert contact_exponent(brs[0], brs[1]) == 2


@given(st.integers(2, 5), st.integers(1, 5))
@settings(max_examples=12, deadline=None)
def test_back_substitution_vanishes(p, q):
    # y^p = x^(p+q) with gcd handled by the algorithm
    f = parse_germ(f"y^{p} - x^{p + q} - x^{p + q + 1}")
    for br in newton_puiseux(f, N=10):
        k = back_substitution_order(f, br)
        assert k is None or k >= 10


def test_types_of_cusp_and_node_differ():
    t1 = equisingularity_type(parse_germ("y^2 - x^3"), 12)
    t2 = equisingularity_type(parse_germ("y^2 - x^2"), 12)
    t3 = equisingularity_type(parse_germ("y^2 - 2*x^3 - x^4"), 12)
    assert compare_types(t1, t2) != "equal"
    assert compare_types(t1, t3) == "equal"


def test_uniform_family():
    res = newton_puiseux_param(parse_germ("y^2 - x^2*(1 + t)"), ("t",), N=8, porder=8)
    assert res.uniform
    assert len(res.branches) == 2


def test_non_uniform_family_reports_locus():
    res = newton_puiseux_param(parse_germ("y^2 - x^3 - t*x^2"), ("t",), N=8, porder=8)
    assert not res.uniform
    assert res.locus_text() == "t = 0"


@pytest.mark.parametrize("t", [Q(1, 8), Q(-3, 16), Q(5, 32)])
def test_parameter_series_specializes(t):
    f = parse_germ("y^2 - x^3 - t*x^4")
    res = newton_puiseux_param(f, ("t",), N=10, porder=16)
    (direct,) = newton_puiseux(f.subs({"t": t}), N=10)
    (fam,) = res.branches
    spec = fam.series.specialize({"t": t})
    # rational coefficients; compare the first few exactly up to the t-truncation
    for k in range(3, 8):
        a = direct.series.terms.get((k, ()), Q(0))
        b = spec.terms.get((k, ()), Q(0))
        assert abs(float(a) - float(b)) < 1e-9 or abs(float(a) + float(b)) < 1e-9
