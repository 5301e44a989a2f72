import random
from fractions import Fraction

import numpy as np
import pytest

import oracles
from gaudin.diffop_ring import Poly
from gaudin.errors import (DimensionMismatch, NotAPartition, PointNotInU,
                           RepeatedSites)
from gaudin.master import (GaudinProblem, PointConfig, SolverConfig,
                           apply_factored_at, expected_orbit_count,
                           factored_pole_data, find_critical_orbits,
                           gradient_log_master, group_polynomials,
                           hessian_determinant, hessian_log_master,
                           master_coefficients, master_operator_at,
                           orbit_distance, scalar_coefficient_values,
                           series_by_contour, try_rationalize_orbit)

ANCHOR = (1, [[1, 0], [1, 0]], [1], [Fraction(0), Fraction(1)])


def test_problem_validation():
    GaudinProblem(*ANCHOR)
    with pytest.raises(RepeatedSites):
        GaudinProblem(1, [[1, 0], [1, 0]], [1], [Fraction(1), Fraction(1)])
    with pytest.raises(NotAPartition):
        GaudinProblem(1, [[1, 2], [1, 0]], [1], [Fraction(0), Fraction(1)])
    with pytest.raises((DimensionMismatch, ValueError)):
        GaudinProblem(1, [[1, 0]], [1, 1], [Fraction(0)])
    with pytest.raises(NotAPartition):
        # infinity weight (0, 2) is not dominant
        GaudinProblem(1, [[1, 0], [1, 0]], [2], [Fraction(0), Fraction(1)])


def test_point_config_rejects_collisions():
    p = GaudinProblem(*ANCHOR)
    with pytest.raises(PointNotInU):
        PointConfig(p, [(Fraction(0),)])    # variable hits a site
    p2 = GaudinProblem(1, [[2, 0], [2, 0]], [2], [Fraction(0), Fraction(1)])
    with pytest.raises(PointNotInU):
        PointConfig(p2, [(Fraction(1, 3), Fraction(1, 3))])


def test_gradient_matches_finite_differences():
    rng = random.Random(41)
    cases = [([[2, 0], [1, 0], [1, 0]], [2], 1),
             ([[2, 1, 0], [2, 1, 0]], [1, 1], 2)]
    for parts, l, N in cases:
        z = [Fraction(0), Fraction(1), Fraction(3)][:len(parts)]
        p = GaudinProblem(N, parts, l, z)
        for _ in range(20):
            flat = []
            groups = []
            for g in range(N):
                grp = []
                for _j in range(l[g]):
                    val = complex(rng.uniform(-3, 3), rng.uniform(0.5, 3))
                    grp.append(val)
                    flat.append((val, g))
                groups.append(tuple(grp))
            grad = gradient_log_master(p, groups)
            grad_flat = [x for grp in grad for x in grp]
            fd = oracles.fd_gradient(parts, l, [complex(x) for x in z], flat)
            for a in range(len(flat)):
                scale = max(1.0, abs(fd[a]))
                assert abs(complex(grad_flat[a]) - fd[a]) / scale < 1e-6


def test_hessian_matches_finite_differences():
    rng = random.Random(43)
    parts, l, N = [[2, 1, 0], [2, 1, 0]], [1, 1], 2
    z = [Fraction(0), Fraction(1)]
    p = GaudinProblem(N, parts, l, z)
    for _ in range(5):
        flat = []
        groups = []
        for g in range(N):
            val = complex(rng.uniform(-2, 2), rng.uniform(0.5, 2))
            groups.append((val,))
            flat.append((val, g))
        H = hessian_log_master(p, groups)
        fd = oracles.fd_hessian(parts, l, [complex(x) for x in z], flat)
        n = len(flat)
        for a in range(n):
            for b in range(n):
                scale = max(1.0, abs(fd[a][b]))
                assert abs(complex(H[a][b]) - fd[a][b]) / scale < 1e-6


def test_anchor_orbit_exact():
    p = GaudinProblem(*ANCHOR)
    orbits = find_critical_orbits(p, SolverConfig(seed=1))
    assert len(orbits) == 1
    orb = orbits[0]
    pt = try_rationalize_orbit(p, orb)
    assert pt is not None
    assert pt[0][0] == Fraction(1, 2)
    assert hessian_determinant(p, pt) == 8
    assert not orb.degenerate


def test_orbit_count_matches_singular_dimension():
    cases = [([[1, 0], [1, 0]], [1], 1),
             ([[1, 0], [1, 0], [1, 0]], [1], 1),
             ([[1, 0, 0], [1, 1, 0]], [1, 1], 2)]
    for parts, l, N in cases:
        z = [Fraction(0), Fraction(1), Fraction(3)][:len(parts)]
        p = GaudinProblem(N, parts, l, z)
        mu = p.infinity_weight
        want = oracles.singular_dimension([tuple(q) for q in parts], mu)
        assert expected_orbit_count(p) == want
        orbits = find_critical_orbits(p, SolverConfig(seed=2), expected=want)
        assert len(orbits) == want, (parts, l)


def test_single_color_roots_against_polynomial_oracle():
    parts, l, N = [[2, 0], [1, 0], [1, 0]], [1], 1
    z = [Fraction(0), Fraction(1), Fraction(3)]
    p = GaudinProblem(N, parts, l, z)
    orbits = find_critical_orbits(p, SolverConfig(seed=5))
    got = sorted(complex(o.groups[0][0]).real for o in orbits)
    want = sorted(r.real for r in
                  oracles.single_color_critical_roots(parts, z))
    assert len(got) == len(want)
    for a, b in zip(got, want):
        assert abs(a - b) < 1e-8


def test_trivial_orbit_when_no_variables():
    p = GaudinProblem(1, [[1, 0], [1, 0]], [0], [Fraction(0), Fraction(1)])
    orbits = find_critical_orbits(p, SolverConfig(seed=1))
    assert len(orbits) == 1
    assert orbits[0].groups == ((),)


def test_orbit_distance_is_permutation_invariant():
    p = GaudinProblem(1, [[2, 0], [2, 0]], [2], [Fraction(0), Fraction(1)])
    a = ((0.3 + 0j, 1.7 + 0j),)
    b = ((1.7 + 0j, 0.3 + 0j),)
    assert orbit_distance(a, b) < 1e-15
    c = ((0.3 + 0j, 1.9 + 0j),)
    assert abs(orbit_distance(a, c) - 0.2) < 1e-12


def test_solver_determinism():
    p = GaudinProblem(2, [[2, 1, 0], [2, 1, 0]], [1, 1],
                      [Fraction(0), Fraction(1)])
    o1 = find_critical_orbits(p, SolverConfig(seed=3))
    o2 = find_critical_orbits(p, SolverConfig(seed=3))
    assert len(o1) == len(o2) == 2
    for a, b in zip(o1, o2):
        assert a.groups == b.groups


def test_master_operator_monic_and_first_coefficient():
    p = GaudinProblem(*ANCHOR)
    pt = [(Fraction(1, 2),)]
    pencil = master_operator_at(p, pt)
    assert pencil.order == 2
    funcs, series = master_coefficients(pencil, 4)
    # first coefficient: -|lam|/(u - z) summed over sites, here
    # -1/u - 1/(u - 1); expansion -2/u - 1/u^2 - 1/u^3 - ...
    assert series[1] == [Fraction(-2), Fraction(-1), Fraction(-1),
                         Fraction(-1)]
    # second coefficient for the anchor: G_2 = 2/(u^2 - u)
    g2 = funcs[2]
    assert g2.eval(Fraction(2)) == Fraction(1)
    assert g2.eval(Fraction(3)) == Fraction(1, 3)


def test_group_polynomials():
    p = GaudinProblem(*ANCHOR)
    ys = group_polynomials(p, [(Fraction(1, 2),)])
    assert ys[0].coeffs == (Fraction(-1, 2), Fraction(1))


def test_jet_apply_matches_pencil():
    p = GaudinProblem(2, [[2, 1, 0], [2, 1, 0]], [1, 1],
                      [Fraction(0), Fraction(1)])
    pt = [(Fraction(1, 3),), (Fraction(5, 7),)]
    pencil = master_operator_at(p, pt)
    pd = factored_pole_data(p, pt)
    rng = random.Random(6)
    for _ in range(5):
        poly = Poly(tuple(Fraction(rng.randint(-4, 4)) for _ in range(4))
                    + (Fraction(1),))
        u0 = Fraction(rng.randint(4, 20), rng.randint(1, 3))
        assert apply_factored_at(pd, poly, u0) == pencil.apply(poly).eval(u0)


def test_jet_coefficient_values_match_pencil():
    p = GaudinProblem(2, [[2, 1, 0], [2, 1, 0]], [1, 1],
                      [Fraction(0), Fraction(1)])
    pt = [(Fraction(1, 3),), (Fraction(5, 7),)]
    pencil = master_operator_at(p, pt)
    pd = factored_pole_data(p, pt)
    for u0 in (Fraction(3), Fraction(9, 2)):
        vals = scalar_coefficient_values(pd, u0)
        for i in range(1, 4):
            assert vals[i - 1] == pencil.coeffs[pencil.order - i].eval(u0)


def test_series_by_contour_matches_exact_series():
    p = GaudinProblem(*ANCHOR)
    pt_exact = [(Fraction(1, 2),)]
    pencil = master_operator_at(p, pt_exact)
    _, series = master_coefficients(pencil, 6)
    pd = factored_pole_data(p, [(0.5 + 0j,)])
    for i in (1, 2):
        approx = series_by_contour(pd, 6, i)
        err = max(abs(a - complex(b)) for a, b in zip(approx, series[i]))
        assert err < 1e-9
