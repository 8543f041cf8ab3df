from __future__ import annotations

import pytest
import sympy

from conftest import CONIC, MAIN_GERM, T_FAMILY, system_for
from polarwedge.algebra import AlgebraError, mpoly_to_sympy
from polarwedge.cli import parse_germ
from polarwedge.polar import (build_polar_system, contact_table, key_identity_residual, polar_wedge_system,
                              wedge_exponent)

u, b, t = sympy.symbols("u b t")
X, Y, Z = sympy.symbols("X Y Z")


def _u_order(expr, order: int, porder: int) -> int:
    """u-order of the part of expr below parameter degree porder."""
    poly = sympy.Poly(sympy.expand(expr), u, b, t)
    low = [m[0] for m, c in zip(poly.monoms(), poly.coeffs()) if c != 0 and m[1] + m[2] < porder]
    return min(low) if low else order + 10**6


@pytest.mark.parametrize("germ", [MAIN_GERM, CONIC, T_FAMILY])
def test_branches_solve_polar_system(germ):
    """Independent substitution through sympy: F and F_Z vanish to the working order."""
    S = system_for(germ)
    F, FZ = mpoly_to_sympy(S.F), mpoly_to_sympy(S.FZ)
    for br in S.branches:
        if br.coeff_field != "Q":
            continue
        Ys = mpoly_to_sympy(br.Y.to_mpoly())
        Zs = mpoly_to_sympy(br.Z.to_mpoly())
        sub = {X: u**br.n, Y: Ys, Z: Zs}
        cut = S.N * br.n
        po = min(br.Y.porder, br.Z.porder)
        assert _u_order(F.subs(sub), cut, po) >= cut
        assert _u_order(FZ.subs(sub), cut, po) >= cut


def test_main_germ_exponents():
    S = system_for(MAIN_GERM)
    assert S.n == 1
    assert [br.m for br in S.polar] == [4]
    assert S.singular_locus_text() == "x-axis"


def test_conic_exponents():
    S = system_for(CONIC)
    assert len(S.polar) == 2
    assert all(br.m == 1 and br.own_ram == 1 for br in S.polar)
    assert not S.singular


def test_polar_equation_is_chain_rule():
    F, FZ, delta = build_polar_system(parse_germ(MAIN_GERM))
    Fs = mpoly_to_sympy(F)
    assert sympy.expand(sympy.diff(Fs, Z) - mpoly_to_sympy(FZ)) == 0
    assert sympy.expand(mpoly_to_sympy(delta) - sympy.discriminant(Fs, Z)) == 0


@pytest.mark.parametrize("germ", [MAIN_GERM, CONIC])
def test_key_identity(germ):
    S = system_for(germ)
    for br in S.branches:
        res = key_identity_residual(br, S.F, S.FZ, 24)
        assert res.exact and res.order >= 24


def test_contact_table_is_ultrametric():
    S = system_for(CONIC)
    k = contact_table(S)
    size = len(k)
    for i in range(size):
        for j in range(size):
            for l in range(size):
                if len({i, j, l}) < 3 or None in (k[i][j], k[j][l], k[i][l]):
                    continue
                assert k[i][l] >= min(k[i][j], k[j][l])


def test_wedge_exponent_certificates():
    S = system_for(MAIN_GERM)
    m, cert = wedge_exponent(S.polar[0])
    assert m == 4
    assert all(v is not False for v in cert.values())


def test_plane_has_no_discriminant():
    with pytest.raises(AlgebraError):
        polar_wedge_system(parse_germ("z"))
