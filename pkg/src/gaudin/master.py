"""Master function of the Gaudin model: critical points and the scalar operator.

A problem instance fixes gl(N+1) site partitions, pairwise distinct site
positions, and the number of auxiliary variables per color group.  The
logarithm of the master function has the gradient

    psi_a = sum_{b != a} c_ab / (t_a - t_b) - sum_s A_as / (t_a - z_s)

with pair coefficients c_ab = 2 (same group), -1 (adjacent groups), 0 (else),
and site exponents A_as equal to the pairing of the s-th partition with the
simple root of a's group.  Critical points are found by seeded multistart
damped Newton on this gradient; each solution is recorded once per orbit of
the within-group permutation action.

At a critical point the scalar operator is the left-to-right composition of
first-order factors (d - logarithmic derivative), one per color, built from
the site factors and the group polynomials y_i = prod_j (u - t^(i)_j).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import kernels
from .diffop_ring import ONE, OperatorPencil, Poly, RationalFunction, series_at_infinity
from .errors import (DegenerateCriticalPoint, DimensionMismatch, PointNotInU,
                     RepeatedSites)
from .scalars import QI, coerce, is_exact, scalar_abs, to_complex
from .weights import check_partition, derive_infinity_weight, root_pairing, weight_size


class GaudinProblem:
    """Sites, site partitions, and variable counts; validates admissibility.

    z entries may be Fractions (exact mode) or complex numbers (numeric mode);
    the mode is derived and recorded.
    """

    def __init__(self, N, partitions, l, z):
        if N < 1:
            raise ValueError("rank parameter must be >= 1")
        self.N = int(N)
        self.partitions = tuple(check_partition(lam, N) for lam in partitions)
        if len(self.partitions) != len(z):
            raise DimensionMismatch(
                f"{len(self.partitions)} partitions for {len(z)} sites")
        if len(self.partitions) == 0:
            raise ValueError("need at least one site")
        self.l = tuple(int(x) for x in l)
        if len(self.l) != N or any(x < 0 for x in self.l):
            raise ValueError(f"need {N} nonnegative group sizes, got {l!r}")
        self.z = tuple(coerce(x) for x in z)
        for a in range(len(self.z)):
            for b in range(a + 1, len(self.z)):
                if self.z[a] == self.z[b]:
                    raise RepeatedSites(f"repeated site {self.z[a]!r}")
        self.n_sites = len(self.z)
        self.infinity_weight = derive_infinity_weight(self.partitions, self.l, N)
        self.sizes = tuple(weight_size(lam) for lam in self.partitions)
        self.exact = all(is_exact(x) for x in self.z)
        self.mode = "exact" if self.exact else "numeric"
        # site exponent of color i at site s (integer pairing with alpha_i)
        self.site_exponent = tuple(
            tuple(root_pairing(lam, i) for lam in self.partitions)
            for i in range(1, N + 1))

    @property
    def n_vars(self):
        return sum(self.l)

    def var_groups(self):
        """Group index (0-based) of each flattened variable."""
        out = []
        for g, cnt in enumerate(self.l):
            out.extend([g] * cnt)
        return out

    def arrays(self):
        """(cmat, A, zc) float/complex arrays in the kernel layout."""
        n = self.n_vars
        groups = self.var_groups()
        cmat = np.zeros((n, n))
        for a in range(n):
            for b in range(n):
                if a == b:
                    continue
                d = abs(groups[a] - groups[b])
                if d == 0:
                    cmat[a, b] = 2.0
                elif d == 1:
                    cmat[a, b] = -1.0
        A = np.zeros((n, self.n_sites))
        for a in range(n):
            for s in range(self.n_sites):
                A[a, s] = self.site_exponent[groups[a]][s]
        zc = np.array([to_complex(x) for x in self.z], dtype=np.complex128)
        return cmat, A, zc

    def __repr__(self):
        return (f"GaudinProblem(N={self.N}, partitions={self.partitions}, "
                f"l={self.l}, z={self.z})")


def _normalize_groups(problem, point):
    groups = point.groups if isinstance(point, PointConfig) else point
    if len(groups) != problem.N:
        raise DimensionMismatch(f"need {problem.N} variable groups")
    out = []
    for g, grp in enumerate(groups):
        grp = tuple(coerce(x) for x in grp)
        if len(grp) != problem.l[g]:
            raise DimensionMismatch(
                f"group {g + 1} has {len(grp)} entries, expected {problem.l[g]}")
        out.append(grp)
    return out


class PointConfig:
    """A point of the variable space, validated to avoid all singular divisors."""

    def __init__(self, problem, groups):
        self.problem = problem
        self.groups = [tuple(coerce(x) for x in g) for g in groups]
        gs = _normalize_groups(problem, self.groups)
        flat = [(x, g) for g, grp in enumerate(gs) for x in grp]
        for a in range(len(flat)):
            xa, ga = flat[a]
            for b in range(a + 1, len(flat)):
                xb, gb = flat[b]
                if abs(ga - gb) <= 1 and xa == xb:
                    raise PointNotInU(
                        f"coinciding variables {xa!r} in groups {ga + 1},{gb + 1}")
            for s, zs in enumerate(problem.z):
                if problem.site_exponent[ga][s] != 0 and xa == zs:
                    raise PointNotInU(f"variable {xa!r} hits site {zs!r}")
        self.groups = gs


@dataclass
class SolverConfig:
    seed: int = 0
    starts: int = 0            # 0 = automatic from the expected orbit count
    max_iter: int = 200
    tol_residual: float = 1e-10
    tol_dedup: float = 1e-8
    tol_degenerate: float = 1e-8
    pole_margin: float = 1e-8
    precision: str = "double"  # or "longdouble"
    early_stop: bool = True


@dataclass
class CriticalOrbit:
    groups: tuple               # tuple of per-color tuples, canonically sorted
    residual: float
    hessian_determinant: complex
    degenerate: bool
    index: int = 0

    def flat(self):
        return [x for grp in self.groups for x in grp]


def gradient_log_master(problem: GaudinProblem, point):
    """Exact-capable gradient of log of the master function, grouped."""
    gs = _normalize_groups(problem, point)
    flat = [(x, g) for g, grp in enumerate(gs) for x in grp]
    out = []
    for a, (xa, ga) in enumerate(flat):
        acc = 0
        for b, (xb, gb) in enumerate(flat):
            if b == a:
                continue
            d = abs(ga - gb)
            if d == 0:
                acc += 2 / _diff(xa, xb)
            elif d == 1:
                acc += -1 / _diff(xa, xb)
        for s, zs in enumerate(problem.z):
            e = problem.site_exponent[ga][s]
            if e:
                acc -= e / _diff(xa, zs)
        out.append(acc)
    grouped = []
    pos = 0
    for cnt in problem.l:
        grouped.append(tuple(out[pos:pos + cnt]))
        pos += cnt
    return grouped


def _diff(a, b):
    d = a - b
    if not d:
        raise PointNotInU(f"coinciding values {a!r}")
    if isinstance(d, Fraction) or isinstance(d, int):
        return Fraction(d) if not isinstance(d, Fraction) else d
    return d


def hessian_log_master(problem: GaudinProblem, point):
    """Dense Hessian of log of the master function as a list of lists."""
    gs = _normalize_groups(problem, point)
    flat = [(x, g) for g, grp in enumerate(gs) for x in grp]
    n = len(flat)
    H = [[0] * n for _ in range(n)]
    for a, (xa, ga) in enumerate(flat):
        diag = 0
        for b, (xb, gb) in enumerate(flat):
            if b == a:
                continue
            d = abs(ga - gb)
            c = 2 if d == 0 else (-1 if d == 1 else 0)
            if c:
                v = c / (_diff(xa, xb) ** 2)
                H[a][b] = v
                diag -= v
        for s, zs in enumerate(problem.z):
            e = problem.site_exponent[ga][s]
            if e:
                diag += e / (_diff(xa, zs) ** 2)
        H[a][a] = diag
    return H


def dense_det(rows):
    """Determinant by Gaussian elimination; exact when entries are exact."""
    n = len(rows)
    if n == 0:
        return Fraction(1)
    M = [list(r) for r in rows]
    exact = all(is_exact(x) for r in M for x in r)
    det = Fraction(1) if exact else complex(1)
    for col in range(n):
        piv = None
        if exact:
            for r in range(col, n):
                if M[r][col]:
                    piv = r
                    break
        else:
            piv = max(range(col, n), key=lambda r: scalar_abs(M[r][col]))
            if scalar_abs(M[piv][col]) == 0.0:
                piv = None
        if piv is None:
            return Fraction(0) if exact else complex(0)
        if piv != col:
            M[col], M[piv] = M[piv], M[col]
            det = -det
        pv = M[col][col]
        det = det * pv
        for r in range(col + 1, n):
            x = M[r][col]
            if x:
                f = x / pv
                M[r] = [M[r][k] - f * M[col][k] for k in range(n)]
    return det


def hessian_determinant(problem: GaudinProblem, point):
    return dense_det(hessian_log_master(problem, point))


def residue_nondegenerate(problem: GaudinProblem, point, tol=1e-12):
    """Hessian determinant at a critical point, guaranteed usable as the
    denominator of the local residue functional f -> f(p) / det."""
    det = hessian_determinant(problem, point)
    if is_exact(det):
        if det == 0:
            raise DegenerateCriticalPoint("vanishing Hessian determinant")
        return det
    H = hessian_log_master(problem, point)
    scale = 1.0
    for row in H:
        scale *= max(max((scalar_abs(v) for v in row), default=0.0), 1e-300)
    if scalar_abs(det) < tol * scale:
        raise DegenerateCriticalPoint(
            f"Hessian determinant {det!r} below degeneracy threshold")
    return det


# ------------------------------------------------------------- orbit search

def canonicalize_orbit(groups):
    """Sort within each color group by (re, im); the orbit's canonical form."""
    out = []
    for grp in groups:
        out.append(tuple(sorted(grp, key=_sort_key)))
    return tuple(out)


def _sort_key(x):
    c = to_complex(x)
    return (round(c.real, 9), round(c.imag, 9))


def _group_distance(g1, g2):
    """Min over matchings of the max pointwise distance (small groups only)."""
    import itertools
    if len(g1) != len(g2):
        return float("inf")
    if not g1:
        return 0.0
    a = [to_complex(x) for x in g1]
    best = float("inf")
    if len(g1) <= 6:
        for perm in itertools.permutations(range(len(g1))):
            m = max(abs(a[k] - to_complex(g2[perm[k]])) for k in range(len(g1)))
            best = min(best, m)
        return best
    b = sorted((to_complex(x) for x in g2), key=lambda c: (c.real, c.imag))
    a = sorted(a, key=lambda c: (c.real, c.imag))
    return max(abs(x - y) for x, y in zip(a, b))


def orbit_distance(groups1, groups2):
    return max(_group_distance(g1, g2) for g1, g2 in zip(groups1, groups2)) \
        if groups1 else 0.0


def expected_orbit_count(problem: GaudinProblem):
    """Dimension of the singular subspace of the derived weight."""
    from .repr_core import (build_irreducible, tensor_module,
                            weight_and_singular_subspace)
    mods = [build_irreducible(lam, problem.N)[0] for lam in problem.partitions]
    M = mods[0] if len(mods) == 1 else tensor_module(mods)
    _, S = weight_and_singular_subspace(M, problem.infinity_weight)
    return S.ncols


def find_critical_orbits(problem: GaudinProblem, config: SolverConfig = None,
                         expected=None):
    """Seeded multistart Newton search; returns canonically ordered orbits."""
    config = config or SolverConfig()
    n = problem.n_vars
    if n == 0:
        return [CriticalOrbit(groups=tuple(() for _ in range(problem.N)),
                              residual=0.0, hessian_determinant=Fraction(1),
                              degenerate=False, index=0)]
    if expected is None:
        expected = expected_orbit_count(problem)
    cmat, A, zc = problem.arrays()
    rng = np.random.default_rng(config.seed)
    n_starts = config.starts or min(max(200 * max(expected, 1), 200), 20000)
    radius = 2.0 * max(1.0, max(abs(z) for z in zc))
    scale = max(1.0, max(abs(z) for z in zc))
    newton = kernels.newton_longdouble if config.precision == "longdouble" \
        else kernels.newton_single
    slices = []
    pos = 0
    for cnt in problem.l:
        slices.append((pos, pos + cnt))
        pos += cnt
    orbits = []
    for trial in range(n_starts):
        if trial % 4 == 3 and problem.n_sites > 0:
            anchor = zc[rng.integers(0, len(zc))]
            t0 = anchor + 0.45 * radius * _disc(rng, n)
        else:
            t0 = radius * _disc(rng, n)
        t, ok, res = newton(t0.astype(np.complex128), cmat, zc, A,
                            config.max_iter, min(config.tol_residual, 1e-12),
                            config.pole_margin)
        if not (res <= config.tol_residual):
            continue
        t = np.asarray(t, dtype=np.complex128)
        # the gradient also decays along escapes to infinity; those are not
        # critical points and are recognized by leaving the search region
        if np.abs(t).max() > 5.0 * radius:
            continue
        groups = canonicalize_orbit(
            [tuple(complex(v) for v in t[a:b]) for (a, b) in slices])
        known = False
        for orb in orbits:
            if orbit_distance(orb.groups, groups) < config.tol_dedup * scale:
                known = True
                break
        if known:
            continue
        flat = np.array([to_complex(x) for g in groups for x in g],
                        dtype=np.complex128)
        H = kernels.hessian(flat, cmat, zc, A)
        det = complex(np.linalg.det(H))
        rowscale = 1.0
        for a in range(n):
            rowscale *= max(float(np.abs(H[a]).max()), 1e-300)
        degenerate = abs(det) < config.tol_degenerate * rowscale
        orbits.append(CriticalOrbit(groups=groups, residual=float(res),
                                    hessian_determinant=det,
                                    degenerate=degenerate))
        if (config.early_stop and expected is not None
                and len(orbits) == expected
                and all(not o.degenerate for o in orbits)):
            break
    orbits.sort(key=lambda o: tuple(_sort_key(x) for x in o.flat()))
    for k, orb in enumerate(orbits):
        orb.index = k
    return orbits


def _disc(rng, n):
    r = np.sqrt(rng.uniform(0.05, 1.0, size=n))
    th = rng.uniform(0.0, 2 * np.pi, size=n)
    return r * np.exp(1j * th)


def rationalize_scalar(x, max_denominator=10 ** 6, tol=1e-9):
    """Nearest small rational (or Gaussian rational); None when not close."""
    c = to_complex(x)
    re = Fraction(c.real).limit_denominator(max_denominator)
    im = Fraction(c.imag).limit_denominator(max_denominator)
    if abs(complex(re) - c.real) > tol or abs(complex(im) - c.imag) > tol:
        return None
    if im == 0:
        return re
    return QI(re, im)


def try_rationalize_orbit(problem: GaudinProblem, orbit: CriticalOrbit,
                          max_denominator=10 ** 6, tol=1e-9):
    """Exact orbit coordinates verified by a vanishing exact gradient, or None."""
    if not problem.exact:
        return None
    out = []
    for grp in orbit.groups:
        g = []
        for x in grp:
            r = rationalize_scalar(x, max_denominator, tol)
            if r is None:
                return None
            g.append(r)
        out.append(tuple(g))
    try:
        grad = gradient_log_master(problem, out)
    except PointNotInU:
        return None
    if all(not v for grp in grad for v in grp):
        return canonicalize_orbit(out)
    return None


# ------------------------------------------------------- the scalar operator

def site_log_derivative(problem: GaudinProblem, color):
    """Sum over sites of exponent/(u - z_s) for one color (1-based)."""
    acc = RationalFunction.zero()
    for s, zs in enumerate(problem.z):
        e = problem.site_exponent[color - 1][s]
        if e:
            lead = 1 if is_exact(zs) else 1.0 + 0j
            acc = acc + RationalFunction(Poly.const(Fraction(e)), Poly((-zs, lead)))
    return acc


def group_polynomials(problem: GaudinProblem, point):
    """y_i = prod over the i-th group of (u - t); y_0 = y_{N+1} = 1 implicit."""
    gs = _normalize_groups(problem, point)
    return [Poly.from_roots(grp) for grp in gs]


def master_operator_at(problem: GaudinProblem, point) -> OperatorPencil:
    """Left-to-right composition of the scalar first-order factors at a point.

    Factor i (i = 1..N+1) is d minus the logarithmic derivative of
    y_{i-1} * T_i * ... * T_N / y_i.
    """
    N = problem.N
    ys = group_polynomials(problem, point)
    site_sum = [RationalFunction.zero()] * (N + 2)
    for i in range(N, 0, -1):
        site_sum[i] = site_sum[i + 1] + site_log_derivative(problem, i)
    pencil = None
    for i in range(1, N + 2):
        a = site_sum[i] if i <= N else RationalFunction.zero()
        if i >= 2:
            a = a + RationalFunction.log_derivative(ys[i - 2])
        if i <= N:
            a = a - RationalFunction.log_derivative(ys[i - 1])
        fac = OperatorPencil.first_order(a)
        pencil = fac if pencil is None else pencil.compose(fac)
    assert pencil.order == N + 1 and pencil.is_monic()
    return pencil


def master_coefficients(pencil: OperatorPencil, j_max: int):
    """(coefficient functions, expansion coefficients) keyed by 1..order."""
    order = pencil.order
    funcs = {i: pencil.coeffs[order - i] for i in range(1, order + 1)}
    series = {i: series_at_infinity(funcs[i], j_max) for i in funcs}
    return funcs, series


# ------------------------------------------------- stable local evaluation
#
# Composing the first-order factors symbolically produces rational functions
# whose floating numerator and denominator share large unreduced common
# factors; evaluating those loses many digits.  The helpers below instead
# work with truncated Taylor expansions at the evaluation point: every factor
# is a sum of known simple poles, so its local jet is exact-to-rounding, and
# applying (d - a) consumes one jet order.  Exact inputs stay exact.

def factored_pole_data(problem: GaudinProblem, point):
    """Per factor i = 1..N+1: list of (coefficient, location) simple poles."""
    gs = _normalize_groups(problem, point)
    N = problem.N
    site_tail = []
    tail = {}
    for i in range(N, 0, -1):
        tail = dict(tail)
        for s, zs in enumerate(problem.z):
            e = problem.site_exponent[i - 1][s]
            if e:
                tail[zs] = tail.get(zs, 0) + e
        site_tail.append(tail)
    site_tail.reverse()  # site_tail[i-1] = poles of sum_{k >= i} T'_k/T_k
    out = []
    for i in range(1, N + 2):
        poles = dict(site_tail[i - 1]) if i <= N else {}
        if i >= 2:
            for t in gs[i - 2]:
                poles[t] = poles.get(t, 0) + 1
        if i <= N:
            for t in gs[i - 1]:
                poles[t] = poles.get(t, 0) - 1
        out.append([(c, r) for r, c in poles.items() if c])
    return out


def _pole_jet(poles, u0, order, exact):
    """Taylor coefficients at u0 of sum c/(u - r), orders 0..order."""
    out = [Fraction(0) if exact else 0j] * (order + 1)
    for c, r in poles:
        d = u0 - r
        if exact and not isinstance(d, (Fraction, QI)):
            d = Fraction(d)
        term = c / d
        for m in range(order + 1):
            out[m] = out[m] + term
            term = -term / d
    return out


def _jet_apply_first_order(gjet, ajet):
    """Jet of g' - a*g, one order shorter than g."""
    M = len(gjet) - 1
    out = []
    for m in range(M):
        acc = (m + 1) * gjet[m + 1]
        for q in range(m + 1):
            if ajet[q] and gjet[m - q]:
                acc = acc - ajet[q] * gjet[m - q]
        out.append(acc)
    return out


def apply_factored_at(pole_data, poly: Poly, u0):
    """Value at u0 of the factored operator applied to a polynomial."""
    order = len(pole_data)
    exact = is_exact(u0) and poly.is_exact_poly() and all(
        is_exact(r) for fac in pole_data for _, r in fac)
    if not exact:
        u0 = to_complex(u0)
    sh = poly.taylor_shift(u0)
    jet = [sh.coeffs[m] if m < len(sh.coeffs) else (Fraction(0) if exact else 0j)
           for m in range(order + 1)]
    if not exact:
        jet = [complex(to_complex(x)) for x in jet]
    for i in range(order, 0, -1):
        ajet = _pole_jet(pole_data[i - 1], u0, len(jet) - 2, exact)
        jet = _jet_apply_first_order(jet, ajet)
    return jet[0]


def scalar_coefficient_values(pole_data, u0):
    """[C_1(u0), ..., C_{N+1}(u0)]: values of the coefficients standing in
    front of d^(N), ..., d^0, recovered from jet applications to monomials."""
    order = len(pole_data)
    exact = is_exact(u0) and all(is_exact(r) for fac in pole_data for _, r in fac)
    u0c = u0 if exact else to_complex(u0)
    dvals = [apply_factored_at(pole_data, _monomial(k), u0c)
             for k in range(order)]
    # W[k][j] = j-th derivative of u^k at u0; forward substitution, with the
    # leading coefficient fixed at 1
    # the j-th derivative of u^k vanishes for j > k, so the system is
    # triangular: solve C[0], C[1], ... in turn
    C = [None] * (order + 1)   # C[j] multiplies d^j
    C[order] = Fraction(1) if exact else 1.0 + 0j
    for k in range(order):
        acc = dvals[k]
        for j in range(k):
            acc = acc - C[j] * _falling(k, j) * u0c ** (k - j)
        C[k] = acc / _falling(k, k)
    return [C[order - i] for i in range(1, order + 1)]


def _monomial(k):
    return Poly((Fraction(0),) * k + (Fraction(1),))


def _falling(k, j):
    out = 1
    for m in range(j):
        out *= (k - m)
    return out


def series_by_contour(pole_data, j_max, coefficient_index, radius=None,
                      points=None):
    """Expansion coefficients at infinity of one factored-operator
    coefficient, from a discrete contour of stable values (numeric)."""
    import numpy as np
    order = len(pole_data)
    maxpole = max([1.0] + [abs(to_complex(r))
                           for fac in pole_data for _, r in fac])
    R = radius or (2.0 + 2.0 * maxpole)
    M = points or max(64, 4 * j_max + 16)
    i = coefficient_index
    vals = np.empty(M, dtype=np.complex128)
    for m in range(M):
        u = R * np.exp(2j * np.pi * (m + 0.5) / M)
        vals[m] = scalar_coefficient_values(pole_data, complex(u))[i - 1]
    out = []
    for j in range(1, j_max + 1):
        acc = 0j
        for m in range(M):
            th = 2 * np.pi * (m + 0.5) / M
            acc += vals[m] * np.exp(1j * j * th)
        out.append(complex(acc * (R ** j) / M))
    return out
