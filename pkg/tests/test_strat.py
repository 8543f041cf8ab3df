from __future__ import annotations

import random

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import CONIC, MAIN_GERM, system_for
from polarwedge.algebra import Q, TruncSeries
from polarwedge.strat import (ChainError, StratError, WedgePoint, WedgeVector, WedgeVF, build_chain,
                              classify_witness, extend_vf, filtration_from_system, generator_field, growth_fit,
                              minimal_extension_constant, mostowski_check, plane_filtration,
                              random_spine_field, random_wedge_vector, superposition_residual,
                              vf_criterion_pair, vf_criterion_single)


def test_growth_fit_decisions():
    ss = [2.0 ** -k for k in range(4, 16)]
    assert growth_fit(ss, [3.0] * len(ss)).bounded
    g = growth_fit(ss, [s ** -2 for s in ss])
    assert g.growing and abs(g.exponent - 2) < 1e-9
    assert growth_fit(ss, [0.0] * len(ss)).exponent == 0


@pytest.mark.parametrize("kind", ["xdx", "bdb", "zero"])
def test_generators_are_stratified(kind):
    S = system_for(MAIN_GERM)
    assert generator_field(S, kind).invariant_violations(S) == []


def test_d_db_is_not_stratified():
    S = system_for(MAIN_GERM)
    assert generator_field(S, "db").invariant_violations(S)


@pytest.mark.parametrize("kind", ["xdx", "bdb"])
def test_generators_pass_single_criterion(kind):
    S = system_for(MAIN_GERM)
    rep = vf_criterion_single(generator_field(S, kind), S.polar[0], S, scales=(4, 10), pairs=16)
    assert rep.passed, rep.failed()


def _beta_field(S, label, terms):
    br = next(b for b in S.branches if b.label == label)
    zero = (0,) * len(br.y.params)
    return WedgeVF({label: {"beta": TruncSeries({(k, zero): Q(c) for k, c in terms.items()}, br.n, 1 << 30,
                                                br.y.params, 1 << 30)}})


def test_pair_criterion_separates_contact():
    S = system_for(MAIN_GERM)
    xdx = generator_field(S, "xdx")
    labels = (S.polar[0].label, S.singular[0].label)
    close = xdx.combine(1, _beta_field(S, labels[1], {1: 0, 2: 1}), 1)
    far = WedgeVF({**xdx.comps, labels[1]: {"beta": _beta_field(S, labels[1], {1: 2}).comps[labels[1]]["beta"]}})
    assert vf_criterion_pair(xdx, close, S, labels, scales=(4, 10), samples=16, check_single=False).passed
    rep = vf_criterion_pair(xdx, far, S, labels, scales=(4, 10), samples=16, check_single=False)
    assert not rep.passed


def test_extension_at_spine_point_is_spine_field():
    S = system_for(MAIN_GERM)
    br = S.polar[0]
    base = random_spine_field(S, random.Random(2))
    ext = extend_vf(S, WedgePoint(br.label, Q(1, 16), Q(0)), random_wedge_vector(random.Random(3)), base)
    assert ext.same_as(base) == 0


def test_extension_needs_polar_source():
    S = system_for(MAIN_GERM)
    with pytest.raises(StratError):
        extend_vf(S, WedgePoint(S.singular[0].label, Q(1, 8), Q(1, 8)), WedgeVector(), generator_field(S, "zero"))


@given(st.integers(0, 10**6), st.fractions(min_value=-3, max_value=3, max_denominator=9),
       st.fractions(min_value=-3, max_value=3, max_denominator=9))
@settings(max_examples=30, deadline=None)
def test_superposition_is_exact(seed, a, c):
    S = system_for(MAIN_GERM)
    rng = random.Random(seed)
    q0 = WedgePoint(S.polar[0].label, Q(1, rng.randint(2, 40)), Q(rng.randint(1, 9), 16))
    pairs = [(random_wedge_vector(rng), random_spine_field(S, rng)) for _ in range(2)]
    assert superposition_residual(S, q0, pairs, (Q(a.numerator, a.denominator), Q(c.numerator, c.denominator))) == 0


vec = st.lists(st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False), min_size=3, max_size=3)


@given(vec, vec)
@settings(max_examples=40, deadline=None)
def test_one_constraint_costs_its_normal_part(v, p):
    normal = [0, 0, 1]
    target = [0, 0, 0]
    pt = [mpmath.mpc(x) for x in p]
    d = mpmath.sqrt(sum(abs(x) ** 2 for x in pt))
    if d < 1e-3:
        return
    L = minimal_extension_constant(target, normal, [(pt, [mpmath.mpc(x) for x in v])])
    assert abs(L - abs(v[2]) / d) < 1e-8 * (1 + abs(v[2]) / d)


@given(st.floats(-5, 5), st.floats(-5, 5), st.floats(0.1, 3), st.floats(0.1, 3))
@settings(max_examples=40, deadline=None)
def test_two_tangent_constraints(a, b, d1, d2):
    normal = [0, 0, 1]
    known = [([d1, 0, 0], [a, 0, 0]), ([-d2, 0, 0], [b, 0, 0])]
    L = minimal_extension_constant([0, 0, 0], normal, known)
    assert abs(L - abs(a - b) / (d1 + d2)) < 1e-8 * (1 + abs(a - b))


@given(st.floats(0.002, 0.1), st.floats(0.002, 0.1))
@settings(max_examples=25, deadline=None)
def test_chains_satisfy_their_properties(x, y):
    S = system_for(MAIN_GERM)
    filt = filtration_from_system(S, with_polar=True)
    with mpmath.workdps(40):
        z = mpmath.sqrt(mpmath.mpf(y) ** 3 + mpmath.mpf(x) ** 2 * mpmath.mpf(y) ** 2)
        q = filt.top.project_onto([mpmath.mpc(x), mpmath.mpc(y), mpmath.mpc(z)])
        try:
            ch = build_chain(filt, q, 2.0, check=True)
        except ChainError as exc:
            pytest.fail(str(exc))
    assert ch.indices == sorted(ch.indices, reverse=True)
    assert ch.indices[-1] == filt.bottom


def test_plane_is_lipschitz_consistent():
    rep = mostowski_check(plane_filtration(), None, scales=(4, 12), rerun_c=None)
    assert rep.verdict == "LIPSCHITZ-CONSISTENT"


def test_polar_stratum_repairs_main_germ():
    S = system_for(MAIN_GERM)
    with_p = mostowski_check(filtration_from_system(S, with_polar=True), S, scales=(4, 14), rerun_c=None)
    without = mostowski_check(filtration_from_system(S, with_polar=False), S, scales=(4, 14), rerun_c=None)
    assert with_p.verdict == "LIPSCHITZ-CONSISTENT"
    assert without.verdict == "NOT-LIPSCHITZ"
    # growth without the polar stratum is set by the polar-singular contact
    assert abs(without.max_growth - 2) < 0.2


def test_witness_classifier():
    main = classify_witness(system_for(MAIN_GERM), scales=(4, 12), force_witness=True)
    # the singular locus is a line, so only the forced witness rate is informative
    assert main.verdict == "criterion silent"
    assert abs(main.fit.exponent - 3) < 0.3
    isolated = classify_witness(system_for(MAIN_GERM), has_isolated_sing=True, scales=(4, 8))
    assert isolated.verdict == "NOT-LIPSCHITZ"
    conic = classify_witness(system_for(CONIC))
    assert conic.verdict == "criterion silent"
