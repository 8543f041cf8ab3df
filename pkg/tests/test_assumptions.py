from __future__ import annotations

import pytest

from conftest import MAIN_GERM, T_FAMILY
from polarwedge.cli import parse_germ
from polarwedge.assumptions import (check_discriminant_transversality, check_no_vertical_limit_tangents,
                                    check_tangent_cone, exact_checks, family_equisingularity)


def test_main_germ_passes_every_exact_check():
    verdicts = exact_checks(parse_germ(MAIN_GERM))
    assert [v.name for v in verdicts] == ["tangent_cone", "discriminant_transversality", "equisingular_pencil"]
    assert all(v.passed and v.provenance == "exact" for v in verdicts)


def test_family_germ_passes():
    assert all(v.passed for v in exact_checks(parse_germ(T_FAMILY)))


def test_tangent_cone_needs_z_direction():
    assert not check_tangent_cone(parse_germ("z^3 - x^2 - y^2")).passed
    assert check_tangent_cone(parse_germ("z^2 - x^2 - y^2")).passed


@pytest.mark.parametrize("germ", ["z^2 - x*y^2", "z^2 - x^3"])
def test_transversality_failures(germ):
    v = check_discriminant_transversality(parse_germ(germ))
    assert v.status == "fail"


def test_limit_tangent_sampling_is_heuristic():
    v = check_no_vertical_limit_tangents(parse_germ(MAIN_GERM), samples=200, seed=1)
    assert v.provenance == "heuristic"
    assert v.passed


FAMILIES = [
    ("y^2 - x^3 - t*x^2", "fail"),
    ("y^2 - x^2*(1 + t)", "pass"),
    ("y^2 - x^3*(1 + t)", "pass"),
    ("y^2 - x^3 - t*x*y", "fail"),
    ("(y - x)*(y - (1 + t)*x)", "fail"),  # the lines coincide at t = 0
    ("(y - x)*(y + (1 + t)*x)", "pass"),
    ("(y - x)*(y - (1 + t)*x^2)", "pass"),
    ("y*(y - t*x)", "fail"),
]


@pytest.mark.parametrize("curve, expected", FAMILIES)
def test_family_verdicts_and_agreement(curve, expected):
    v = family_equisingularity(parse_germ(curve), ("t",))
    assert v.status == expected
    assert v.data["agree"]
