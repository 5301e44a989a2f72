from fractions import Fraction

import pytest

import oracles
from gaudin.diffop_ring import Poly
from gaudin.errors import AmbientTooSmall, KernelDimensionMismatch
from gaudin.master import (GaudinProblem, SolverConfig, find_critical_orbits,
                           master_operator_at, try_rationalize_orbit)
from gaudin.wronski_schubert import (PolynomialTuple, degree_set,
                                     exponent_data, expected_orders,
                                     kernel_residuals, schubert_incidence,
                                     site_factor_polynomials, solve_h_tuple,
                                     vanishing_orders,
                                     verify_wronskian_identities, wronskian)

ANCHOR = GaudinProblem(1, [[1, 0], [1, 0]], [1], [Fraction(0), Fraction(1)])
ANCHOR_PT = [(Fraction(1, 2),)]

ASYM = GaudinProblem(2, [[1, 0, 0], [1, 1, 0]], [1, 1],
                     [Fraction(0), Fraction(1)])
ASYM_PT = [(Fraction(1, 3),), (Fraction(2, 3),)]


def test_exponent_data_anchor():
    data = exponent_data(ANCHOR)
    assert data.exponents == (2, 1)
    assert data.minimal_d_cap == 3
    assert data.d_cap == 3
    assert data.dual_partition == (0, 0)
    wide = exponent_data(ANCHOR, d_cap=4)
    assert wide.dual_partition == (1, 1)
    with pytest.raises(AmbientTooSmall):
        exponent_data(ANCHOR, d_cap=2)


def test_site_factor_polynomials_anchor():
    (t1,) = site_factor_polynomials(ANCHOR)
    assert t1.coeffs == (Fraction(0), Fraction(-1), Fraction(1))  # u(u-1)


def test_wronskian_hand_determinant():
    u2 = Poly((Fraction(0), Fraction(0), Fraction(1)))
    u1 = Poly((Fraction(0), Fraction(1)))
    w = wronskian([u2, u1])
    assert w.coeffs == (Fraction(0), Fraction(0), Fraction(-1))  # -u^2


def test_anchor_h_tuple_exact_and_ode_oracle():
    ht = solve_h_tuple(ANCHOR, ANCHOR_PT)
    h1, h2 = ht.polys
    assert h1.coeffs == (Fraction(0), Fraction(0), Fraction(1))
    assert h2.coeffs == (Fraction(-1, 2), Fraction(1))
    # independent check: an exact evaluation of the scalar operator,
    # written from scratch, annihilates both and rejects a non-member
    for h in (h1, h2):
        assert all(v == 0 for v in oracles.anchor_ode_apply(h.coeffs))
    assert any(v != 0 for v in oracles.anchor_ode_apply((0, 1)))
    assert kernel_residuals(ANCHOR, ANCHOR_PT, ht) == [0.0, 0.0]


def test_anchor_wronskian_identity_exact():
    ht = solve_h_tuple(ANCHOR, ANCHOR_PT)
    res = verify_wronskian_identities(ANCHOR, ANCHOR_PT, ht)
    assert res == {1: 0.0}
    # the identity itself: W(h2, h1) = u(u - 1)
    w = wronskian([ht.polys[1], ht.polys[0]])
    assert w.coeffs == (Fraction(0), Fraction(-1), Fraction(1))


def test_anchor_incidence_tables():
    ht = solve_h_tuple(ANCHOR, ANCHOR_PT)
    data = exponent_data(ANCHOR)
    rep = schubert_incidence(ANCHOR, ht, data)
    assert rep["ok"]
    for site in rep["sites"]:
        assert site["orders"] == [0, 2]
    assert rep["infinity"]["degrees"] == [1, 2]


def test_vanishing_orders_direct():
    u2 = Poly((Fraction(0), Fraction(0), Fraction(1)))
    h2 = Poly((Fraction(-1, 2), Fraction(1)))
    assert vanishing_orders([u2, h2], Fraction(0), 3) == [0, 2]
    # at z = 1 the span contains u^2 - 2(u - 1/2) = (u - 1)^2, so the
    # order set of the span is again {0, 2} even though neither basis
    # polynomial vanishes there to order 2
    assert vanishing_orders([u2, h2], Fraction(1), 3) == [0, 2]
    assert vanishing_orders([u2, h2], Fraction(3), 3) == [0, 1]


def test_expected_orders_and_degree_set():
    assert expected_orders((1, 0), 1) == [0, 2]
    assert expected_orders((2, 1, 0), 2) == [0, 2, 4]
    assert degree_set([Poly((Fraction(1),)),
                       Poly((Fraction(0), Fraction(0), Fraction(3)))]) == [0, 2]


def test_noncritical_point_has_no_full_kernel():
    with pytest.raises(KernelDimensionMismatch):
        solve_h_tuple(ANCHOR, [(Fraction(1, 3),)])


def test_rank2_exact_instance_all_identities():
    ht = solve_h_tuple(ASYM, ASYM_PT)
    assert ht.exponents == (3, 2, 1)
    assert all(h.is_exact_poly() for h in ht.polys)
    assert kernel_residuals(ASYM, ASYM_PT, ht) == [0.0, 0.0, 0.0]
    res = verify_wronskian_identities(ASYM, ASYM_PT, ht)
    assert res == {1: 0.0, 2: 0.0}
    rep = schubert_incidence(ASYM, ht)
    assert rep["ok"]
    assert rep["infinity"]["degrees"] == [1, 2, 3]


def test_numeric_path_agrees_with_exact_on_anchor():
    ht = solve_h_tuple(ANCHOR, [(0.5 + 0.0j,)])
    exact = solve_h_tuple(ANCHOR, ANCHOR_PT)
    assert ht.exponents == exact.exponents
    for hnum, hex in zip(ht.polys, exact.polys):
        assert hnum.degree == hex.degree
        for k in range(hex.degree + 1):
            want = complex(hex.coeffs[k]) if k < len(hex.coeffs) else 0.0
            got = complex(hnum.coeffs[k]) if k < len(hnum.coeffs) else 0.0
            assert abs(got - want) < 1e-8
    res = verify_wronskian_identities(ANCHOR, [(0.5 + 0.0j,)], ht)
    assert res[1] < 1e-8
    assert max(kernel_residuals(ANCHOR, [(0.5 + 0.0j,)], ht)) < 1e-8


def test_numeric_rank2_instance_end_to_end():
    p = GaudinProblem(2, [[2, 1, 0], [2, 1, 0]], [1, 1],
                      [Fraction(0), Fraction(1)])
    orbits = find_critical_orbits(p, SolverConfig(seed=7))
    assert len(orbits) == 2
    for orb in orbits:
        assert try_rationalize_orbit(p, orb) is None   # genuinely irrational
        ht = solve_h_tuple(p, orb.groups)
        assert ht.exponents == (5, 3, 1)
        assert max(kernel_residuals(p, orb.groups, ht)) < 1e-8
        res = verify_wronskian_identities(p, orb.groups, ht)
        assert max(res.values()) < 1e-8
        rep = schubert_incidence(p, ht)
        assert rep["ok"]


def test_polynomial_tuple_iterates_in_order():
    ht = PolynomialTuple(polys=(Poly((Fraction(1),)),), exponents=(0,))
    assert [h.coeffs for h in ht] == [(Fraction(1),)]


def test_pencil_passthrough_matches_autobuild():
    pencil = master_operator_at(ANCHOR, ANCHOR_PT)
    ht = solve_h_tuple(ANCHOR, ANCHOR_PT, pencil=pencil)
    assert ht.polys == solve_h_tuple(ANCHOR, ANCHOR_PT).polys
