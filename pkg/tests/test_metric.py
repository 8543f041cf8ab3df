from __future__ import annotations

import mpmath
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import CONIC, MAIN_GERM, system_for
from polarwedge.algebra import TruncSeries
from polarwedge.cli import parse_germ
from polarwedge.metric import ArcGerm, SeriesEval, expand_wedges, fit_loglog, verify_arc_orders, verify_distance_formulas


@given(st.floats(-4, 4), st.floats(0.1, 50))
@settings(max_examples=50, deadline=None)
def test_fit_recovers_power_law(exponent, scale):
    ss = [2.0 ** -k for k in range(4, 20)]
    fit = fit_loglog(ss, [scale * s ** exponent for s in ss])
    assert abs(fit.slope - exponent) < 1e-9
    assert fit.ci[0] <= fit.slope <= fit.ci[1]


def test_series_evaluation_matches_direct_sum():
    S = system_for(MAIN_GERM)
    br = S.polar[0]
    ev = SeriesEval(br.y, 40)
    u, b = mpmath.mpf("0.03"), mpmath.mpf("0.1")
    with mpmath.workdps(40):
        assert abs(ev(u, [b]) - br.y.evaluate(u, {"b": b})) < mpmath.mpf(10) ** -30


def test_wedge_points_lie_on_the_surface():
    S = system_for(MAIN_GERM)
    f = parse_germ(MAIN_GERM)
    (w,) = expand_wedges(S, 50)
    with mpmath.workdps(50):
        for u in ("0.01", "0.05"):
            for b in ("0", "0.1", "-0.2"):
                x, y, z = w.point(mpmath.mpf(u), mpmath.mpf(b))[:3]
                val = f.evaluate({"x": x, "y": y, "z": z})
                assert abs(val) < mpmath.mpf(u) ** 20


def test_distance_formulas_on_the_conic():
    rep = verify_distance_formulas(system_for(CONIC), pairs=200, seed=4)
    assert rep.passed
    for s in rep.stats:
        assert 0.1 <= s.ratio_min <= s.ratio_max <= 10


def test_axis_arc_on_the_conic():
    f = parse_germ(CONIC)
    arc = ArcGerm(1, TruncSeries({}, 1, 10), None, f=f, z_hint=lambda s: mpmath.mpf(s))
    rep = verify_arc_orders(arc, system_for(CONIC), scales=(4, 16))
    for label, (l, _lt) in rep.exponents.items():
        assert abs(l - 1) < 0.05, label
    assert rep.status == "pass"
