"""Univariate polynomials, rational functions, and differential-operator pencils.

Everything is generic over the scalar field (Fraction / Gaussian rational /
complex).  A pencil is sum_k C_k(u) d^k with coefficients written to the left
of the derivative powers; coefficients are either scalar rational functions or
sparse matrices of rational functions, so the same composition code serves the
scalar factorized operator and the row-determinant operator.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

from .errors import (DimensionMismatch, DivisionByZero, ImproperRational,
                     PoleEvaluation)
from .linalg import SparseMatrix
from .scalars import is_exact, scalar_abs


def _strip(coeffs):
    coeffs = list(coeffs)
    while coeffs and not coeffs[-1]:
        coeffs.pop()
    return coeffs


class Poly:
    """Dense univariate polynomial, coefficients ascending."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        self.coeffs = tuple(_strip(coeffs))

    @classmethod
    def const(cls, c):
        return cls((c,))

    @classmethod
    def x(cls):
        return cls((Fraction(0), Fraction(1)))

    @classmethod
    def from_roots(cls, roots):
        p = cls((Fraction(1),))
        for r in roots:
            p = p * cls((-r, Fraction(1)))
        return p

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def __bool__(self):
        return bool(self.coeffs)

    def is_zero(self):
        return not self.coeffs

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"Poly({list(self.coeffs)})"

    def __add__(self, other):
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for k, c in enumerate(b):
            out[k] = out[k] + c
        return Poly(out)

    def __neg__(self):
        return Poly([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return self.scale(other)
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly(())
        out = [0] * (len(a) + len(b) - 1)
        for i, ca in enumerate(a):
            if not ca:
                continue
            for j, cb in enumerate(b):
                if cb:
                    out[i + j] = out[i + j] + ca * cb
        return Poly(out)

    def scale(self, c):
        if not c:
            return Poly(())
        return Poly([c * x for x in self.coeffs])

    def __rmul__(self, c):
        return self.scale(c)

    def eval(self, u):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * u + c
        return acc

    __call__ = eval

    def derivative(self, order=1):
        c = self.coeffs
        for _ in range(order):
            c = [k * c[k] for k in range(1, len(c))]
        return Poly(c)

    def leading(self):
        return self.coeffs[-1] if self.coeffs else 0

    def monic(self):
        if self.is_zero():
            return self
        lead = self.leading()
        return Poly([c / lead for c in self.coeffs])

    def shift(self, k):
        """Multiply by u^k."""
        if self.is_zero():
            return self
        return Poly((0,) * k + self.coeffs)

    def divmod(self, other):
        if other.is_zero():
            raise DivisionByZero("polynomial division by zero")
        rem = list(self.coeffs)
        dq = len(rem) - len(other.coeffs)
        if dq < 0:
            return Poly(()), self
        quo = [0] * (dq + 1)
        lead = other.leading()
        for k in range(dq, -1, -1):
            c = rem[k + other.degree]
            if c:
                q = c / lead
                quo[k] = q
                for j, b in enumerate(other.coeffs):
                    rem[k + j] = rem[k + j] - q * b
        return Poly(quo), Poly(rem[: other.degree if other.degree > 0 else 0])

    def taylor_shift(self, a):
        """Coefficients of p(u + a) -- the Taylor expansion around u = -a... i.e.
        returns q with q(v) = p(v + a); use taylor_shift(z) to expand around z
        via p(u) = q(u - z)."""
        n = len(self.coeffs)
        if n == 0:
            return self
        out = [0] * n
        for k, c in enumerate(self.coeffs):
            if not c:
                continue
            # c*(v+a)^k
            pw = 1
            for m in range(k, -1, -1):
                out[m] = out[m] + c * math.comb(k, k - m) * pw
                pw = pw * a
        return Poly(out)

    def is_exact_poly(self):
        return all(is_exact(c) for c in self.coeffs)

    def max_abs(self):
        return max((scalar_abs(c) for c in self.coeffs), default=0.0)


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd over an exact field (Euclid)."""
    while not b.is_zero():
        _, r = a.divmod(b)
        a, b = b, r
    return a.monic() if not a.is_zero() else a


ZERO = Poly(())
ONE = Poly((Fraction(1),))


class RationalFunction:
    """num/den; reduced with monic denominator in exact mode."""

    __slots__ = ("num", "den", "exact")

    def __init__(self, num, den=ONE, reduce=True):
        if not isinstance(num, Poly):
            num = Poly.const(num) if num else ZERO
        if not isinstance(den, Poly):
            den = Poly.const(den)
        if den.is_zero():
            raise DivisionByZero("rational function with zero denominator")
        exact = num.is_exact_poly() and den.is_exact_poly()
        if num.is_zero():
            den = ONE if exact else Poly((1.0 + 0j,))
        elif exact and reduce:
            g = poly_gcd(num, den)
            if g.degree > 0:
                num, _ = num.divmod(g)
                den, _ = den.divmod(g)
            lead = den.leading()
            if lead != 1:
                num = Poly([c / lead for c in num.coeffs])
                den = den.monic()
        elif not exact:
            lead = den.leading()
            if lead != 1:
                num = Poly([c / lead for c in num.coeffs])
                den = den.monic()
        self.num = num
        self.den = den
        self.exact = exact

    @classmethod
    def zero(cls):
        return cls(ZERO)

    @classmethod
    def one(cls):
        return cls(ONE)

    @classmethod
    def from_poly(cls, p):
        return cls(p)

    @classmethod
    def log_derivative(cls, p: Poly):
        """p'/p."""
        return cls(p.derivative(), p)

    def is_zero(self):
        return self.num.is_zero()

    def __bool__(self):
        return not self.is_zero()

    def __repr__(self):
        return f"RF({list(self.num.coeffs)} / {list(self.den.coeffs)})"

    def __eq__(self, other):
        if not isinstance(other, RationalFunction):
            return NotImplemented
        # exact structural equality (reduced forms); cross-multiplied otherwise
        return (self.num * other.den) == (other.num * self.den)

    def __add__(self, other):
        other = as_rf(other)
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if self.den == other.den:
            return RationalFunction(self.num + other.num, self.den)
        return RationalFunction(self.num * other.den + other.num * self.den,
                                self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den, reduce=False)

    def __sub__(self, other):
        return self + (-as_rf(other))

    def __rsub__(self, other):
        return as_rf(other) - self

    def __mul__(self, other):
        if isinstance(other, RFMatrix):
            return other.scale(self)
        other = as_rf(other)
        if self.is_zero() or other.is_zero():
            return RationalFunction.zero()
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = as_rf(other)
        if other.is_zero():
            raise DivisionByZero("division by zero rational function")
        return RationalFunction(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return as_rf(other) / self

    def derivative(self):
        if self.is_zero():
            return self
        n, d = self.num, self.den
        return RationalFunction(n.derivative() * d - n * d.derivative(), d * d)

    def eval(self, u):
        dv = self.den.eval(u)
        if not dv:
            raise PoleEvaluation(f"evaluation at pole u={u!r}")
        return self.num.eval(u) / dv

    __call__ = eval

    def is_proper(self):
        return self.num.degree <= self.den.degree

    def scale_abs(self):
        return max(self.num.max_abs(), self.den.max_abs(), 1.0)


def as_rf(x):
    if isinstance(x, RationalFunction):
        return x
    if isinstance(x, Poly):
        return RationalFunction(x)
    return RationalFunction(Poly.const(x) if x else ZERO)


def rf_equal(a: RationalFunction, b: RationalFunction, rtol=1e-9, points=None):
    """Decide equality by sampling away from poles (for floating coefficients)."""
    deg = max(a.num.degree + b.den.degree, b.num.degree + a.den.degree, 0)
    npts = max(20, 2 * deg + 1)
    scale = max(a.scale_abs(), b.scale_abs())
    k = 0
    m = 0
    while k < npts and m < 10 * npts + 100:
        m += 1
        u = complex(1.37 + 0.61 * m, 0.29 * m % 3.1)
        if scalar_abs(a.den.eval(u)) < 1e-9 * scale or scalar_abs(b.den.eval(u)) < 1e-9 * scale:
            continue
        va, vb = a.eval(u), b.eval(u)
        ref = max(scalar_abs(va), scalar_abs(vb), 1.0)
        if scalar_abs(va - vb) > rtol * ref:
            return False
        k += 1
    return True


def series_at_infinity(R: RationalFunction, j_max: int):
    """Coefficients of u^-1 .. u^-j_max of the expansion at infinity.

    Requires deg num <= deg den (the limit at infinity is finite); the constant
    term of the expansion is dropped.
    """
    if R.is_zero():
        return [Fraction(0)] * j_max
    dn, dd = R.num.degree, R.den.degree
    if dn > dd:
        raise ImproperRational(
            f"degree {dn} numerator over degree {dd} denominator has no expansion at infinity")
    # in w = 1/u: N(w) = sum a_k w^(dd-k), B(w) = sum b_k w^(dd-k); division by B, B(0) != 0
    ncoef = [Fraction(0)] * (j_max + 1)
    for k, c in enumerate(R.num.coeffs):
        if dd - k <= j_max:
            ncoef[dd - k] = c
    bcoef = [Fraction(0)] * (j_max + 1)
    for k, c in enumerate(R.den.coeffs):
        if dd - k <= j_max:
            bcoef[dd - k] = c
    b0 = bcoef[0]
    out = [0] * (j_max + 1)
    for j in range(j_max + 1):
        acc = ncoef[j]
        for m in range(j):
            if out[m] and bcoef[j - m]:
                acc = acc - out[m] * bcoef[j - m]
        out[j] = acc / b0
    return out[1:]


class RFMatrix:
    """Sparse square-ish matrix with RationalFunction entries."""

    __slots__ = ("nrows", "ncols", "data")

    def __init__(self, nrows, ncols, data=None):
        self.nrows = nrows
        self.ncols = ncols
        self.data = {}
        if data:
            for k, v in data.items():
                v = as_rf(v)
                if not v.is_zero():
                    self.data[k] = v

    @classmethod
    def identity(cls, n):
        one = RationalFunction.one()
        m = cls(n, n)
        for i in range(n):
            m.data[(i, i)] = one
        return m

    @classmethod
    def from_scalar_matrix(cls, mat: SparseMatrix, den: Poly = None):
        """Constant matrix, optionally divided by a scalar polynomial."""
        out = cls(mat.nrows, mat.ncols)
        den = den if den is not None else ONE
        for (i, j), v in mat.data.items():
            out.data[(i, j)] = RationalFunction(Poly.const(v), den)
        return out

    def is_zero(self):
        return not self.data

    def __add__(self, other):
        assert (self.nrows, self.ncols) == (other.nrows, other.ncols)
        out = RFMatrix(self.nrows, self.ncols)
        out.data = dict(self.data)
        for k, v in other.data.items():
            cur = out.data.get(k)
            s = v if cur is None else cur + v
            if s.is_zero():
                out.data.pop(k, None)
            else:
                out.data[k] = s
        return out

    def __neg__(self):
        out = RFMatrix(self.nrows, self.ncols)
        out.data = {k: -v for k, v in self.data.items()}
        return out

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = as_rf(c)
        out = RFMatrix(self.nrows, self.ncols)
        if c.is_zero():
            return out
        out.data = {k: v * c for k, v in self.data.items()}
        return out

    def __mul__(self, other):
        if isinstance(other, RFMatrix):
            if self.ncols != other.nrows:
                raise DimensionMismatch(f"{self.ncols} != {other.nrows}")
            rows = {}
            for (i, k), x in self.data.items():
                rows.setdefault(k, []).append((i, x))
            acc = {}
            for (k, j), y in other.data.items():
                hits = rows.get(k)
                if not hits:
                    continue
                for i, x in hits:
                    key = (i, j)
                    p = x * y
                    cur = acc.get(key)
                    acc[key] = p if cur is None else cur + p
            out = RFMatrix(self.nrows, other.ncols)
            out.data = {k: v for k, v in acc.items() if not v.is_zero()}
            return out
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def derivative(self):
        out = RFMatrix(self.nrows, self.ncols)
        for k, v in self.data.items():
            dv = v.derivative()
            if not dv.is_zero():
                out.data[k] = dv
        return out

    def eval(self, u) -> SparseMatrix:
        out = SparseMatrix(self.nrows, self.ncols)
        for k, v in self.data.items():
            out[k] = v.eval(u)
        return out

    def apply_const_vec(self, vec):
        """Matrix times a vector of constants; result maps index -> RF."""
        out = {}
        for (i, j), rf in self.data.items():
            c = vec.get(j)
            if not c:
                continue
            term = rf * c
            cur = out.get(i)
            out[i] = term if cur is None else cur + term
        return {k: v for k, v in out.items() if not v.is_zero()}

    def entries_series_at_infinity(self, j_max):
        """List of SparseMatrix coefficient matrices for u^-1..u^-j_max."""
        mats = [SparseMatrix(self.nrows, self.ncols) for _ in range(j_max)]
        for key, rf in self.data.items():
            for j, c in enumerate(series_at_infinity(rf, j_max)):
                if c:
                    mats[j][key] = c
        return mats

    def pole_free_at(self, u):
        return all(v.den.eval(u) for v in self.data.values())


def _one_like(coef):
    if isinstance(coef, RFMatrix):
        return RFMatrix.identity(coef.nrows)
    return RationalFunction.one()


def _zero_like(coef):
    if isinstance(coef, RFMatrix):
        return RFMatrix(coef.nrows, coef.ncols)
    return RationalFunction.zero()


def _is_zero_coef(c):
    return c.is_zero()


class OperatorPencil:
    """Differential operator sum_k coeffs[k] * d^k, coefficients left of d.

    Coefficients are RationalFunction (scalar pencil) or RFMatrix entries;
    all coefficients of one pencil must be of the same kind.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        coeffs = list(coeffs)
        while len(coeffs) > 1 and _is_zero_coef(coeffs[-1]):
            coeffs.pop()
        if not coeffs:
            coeffs = [RationalFunction.zero()]
        self.coeffs = coeffs

    @classmethod
    def first_order(cls, a):
        """d - a(u) for a scalar rational function a."""
        return cls([-as_rf(a), RationalFunction.one()])

    @classmethod
    def identity(cls, like=None):
        if like is None:
            return cls([RationalFunction.one()])
        return cls([_one_like(like)])

    @property
    def order(self):
        return len(self.coeffs) - 1

    def __add__(self, other):
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for k, c in enumerate(b):
            out[k] = out[k] + c
        return OperatorPencil(out)

    def __neg__(self):
        return OperatorPencil([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return OperatorPencil([x * c if isinstance(x, RFMatrix) else as_rf(c) * x
                               for x in self.coeffs])

    def compose(self, other):
        """Operator product self o other via normal ordering d o f = f d + f'."""
        zero = _zero_like(self.coeffs[0])
        out = [zero] * (self.order + other.order + 1)
        for b, g in enumerate(other.coeffs):
            if _is_zero_coef(g):
                continue
            # derivatives of g reused across a
            deriv_cache = [g]
            for a, f in enumerate(self.coeffs):
                if _is_zero_coef(f):
                    continue
                while len(deriv_cache) <= a:
                    deriv_cache.append(deriv_cache[-1].derivative())
                for m in range(a + 1):
                    gm = deriv_cache[m]
                    if _is_zero_coef(gm):
                        continue
                    term = f * gm
                    c = math.comb(a, m)
                    if c != 1:
                        term = term * Fraction(c) if isinstance(term, RFMatrix) \
                            else as_rf(Fraction(c)) * term
                    k = a - m + b
                    out[k] = out[k] + term
        return OperatorPencil(out)

    def apply(self, f):
        """Apply to a scalar function (Poly or RationalFunction)."""
        f = as_rf(f) if not isinstance(f, RationalFunction) else f
        acc = RationalFunction.zero()
        der = f
        for k, c in enumerate(self.coeffs):
            if k > 0:
                der = der.derivative()
            if isinstance(c, RFMatrix):
                raise TypeError("matrix pencil applied to a scalar function")
            if not _is_zero_coef(c) and not der.is_zero():
                acc = acc + c * der
        return acc

    def eval_coeffs(self, u):
        return [c.eval(u) for c in self.coeffs]

    def is_monic(self):
        top = self.coeffs[-1]
        if isinstance(top, RFMatrix):
            return not (top - RFMatrix.identity(top.nrows)).data
        return top == RationalFunction.one()


def row_determinant(entries):
    """Row determinant of a square array of pencils: permutation expansion with
    products taken in row order (row-1 factor leftmost)."""
    n = len(entries)
    acc = None
    for perm in itertools.permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = entries[0][perm[0]]
        for i in range(1, n):
            term = term.compose(entries[i][perm[i]])
        if inv % 2:
            term = -term
        acc = term if acc is None else acc + term
    return acc
