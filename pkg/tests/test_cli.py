from __future__ import annotations

import csv
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import CONIC, MAIN_GERM, T_FAMILY
from polarwedge.algebra import MPoly, Q
from polarwedge.cli import (EXIT_INPUT, EXIT_OK, JobConfig, ParseError, main, parse_germ, parse_scales,
                            print_germ, read_manifest, run, validate_report)

CORPUS = [
    MAIN_GERM,
    CONIC,
    T_FAMILY,
    "z^2 - x*y^2",
    "z**2 - y**3 - x**2*y**2",
    "-(z - 1/2*x)^2 + y^3",
    "3/4*z^2 - (x + y)^3/5",
    "z^2 - y^3 - t1*x*y^2 + t2*x^3",
    "z",
]


@pytest.mark.parametrize("text", CORPUS)
def test_parse_print_parse_idempotent(text):
    p = parse_germ(text)
    q = parse_germ(print_germ(p))
    assert p == q
    assert print_germ(q) == print_germ(p)


@st.composite
def germs(draw):
    names = ("x", "y", "z", "t")
    exps = st.tuples(*(st.integers(0, 3) for _ in names))
    coef = st.fractions(min_value=-12, max_value=12, max_denominator=8).filter(bool)
    terms = draw(st.dictionaries(exps, coef, min_size=1, max_size=6))
    return MPoly(names, {e: Q(c.numerator, c.denominator) for e, c in terms.items()})


@given(germs())
@settings(max_examples=150, deadline=None)
def test_print_then_parse_round_trip(p):
    back = parse_germ(print_germ(p))
    assert back == p.drop_unused() or back == p


def test_parse_error_reports_column():
    with pytest.raises(ParseError) as err:
        parse_germ("z^2 -")
    assert "column 6" in str(err.value)


def test_unknown_identifier_listed():
    with pytest.raises(ParseError) as err:
        parse_germ("z^2 - w*y")
    assert "w" in str(err.value)


@pytest.mark.parametrize("bad", ["z^(1/2)", "z/x", "z^-1", "2 z", ""])
def test_rejects_non_polynomials(bad):
    with pytest.raises(ParseError):
        parse_germ(bad)


def test_scales():
    assert parse_scales("4:12") == (4, 12)
    assert parse_scales("4..12") == (4, 12)
    with pytest.raises(ParseError):
        parse_scales("4-12")
    with pytest.raises(ParseError):
        JobConfig(germ="z", scales=parse_scales("12:4")).validate()


def test_manifest(tmp_path):
    path = tmp_path / "job.txt"
    path.write_text("# sample\ngerm = z^2 - x^2 - y^2\ntrunc = 16\nseed = 3\n"
                    "arc = 1 | 0 | \nfiltration = with-polar\n")
    cfg = read_manifest(str(path))
    assert cfg.germ == CONIC and cfg.trunc == 16 and cfg.seed == 3
    assert cfg.arcs == [(1, "0", "")]
    path.write_text("colour = blue\n")
    with pytest.raises(ParseError):
        read_manifest(str(path))


def test_analyze_report_is_valid():
    rep = run("analyze", JobConfig(germ=MAIN_GERM))
    doc = rep.to_dict()
    assert validate_report(doc) == []
    assert rep.exit_code() == EXIT_OK
    st0 = doc["stages"][0]
    assert st0["tables"]["n"] == {"value": 1, "provenance": "exact"}


def test_validator_flags_bare_numbers():
    doc = run("analyze", JobConfig(germ=CONIC)).to_dict()
    doc["stages"][0]["tables"]["loose"] = 3.5
    assert any("bare number" in p for p in validate_report(doc))


def test_main_exit_codes_and_outputs(tmp_path, capsys):
    js, tb = tmp_path / "r.json", tmp_path / "t.csv"
    code = main(["mostowski", "--germ", "z", "--scales", "4:10", "--json-out", str(js), "--table-out", str(tb)])
    assert code == EXIT_OK
    doc = json.loads(js.read_text())
    assert validate_report(doc) == []
    rows = list(csv.reader(tb.open()))
    assert rows[0] == ["stage", "series", "condition", "scale", "constant"]
    assert len(rows) > 1
    assert main(["analyze", "--germ", "z^2 +* x"]) == EXIT_INPUT
    assert "input error" in capsys.readouterr().err
