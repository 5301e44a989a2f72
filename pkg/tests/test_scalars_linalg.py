import random
from fractions import Fraction

import numpy as np
import pytest

from gaudin.errors import DimensionMismatch, DivisionByZero
from gaudin.linalg import (IncrementalSpan, SparseMatrix, nullspace, rank,
                           rref, solve)
from gaudin.scalars import (QI, coerce, common_mode, format_scalar, is_exact,
                            parse_rational, scalar_abs, to_complex)


def test_qi_field_ops():
    a = QI(Fraction(1, 2), Fraction(3))
    b = QI(Fraction(-2), Fraction(1, 5))
    assert a + b == QI(Fraction(-3, 2), Fraction(16, 5))
    assert a * b == QI(Fraction(1, 2) * Fraction(-2) - 3 * Fraction(1, 5),
                       Fraction(1, 2) * Fraction(1, 5) + 3 * Fraction(-2))
    assert (a / b) * b == a
    assert a - a == QI(0, 0)
    with pytest.raises(ZeroDivisionError):
        a / QI(0, 0)


def test_qi_matches_complex():
    rng = random.Random(7)
    for _ in range(25):
        a = QI(Fraction(rng.randint(-9, 9), rng.randint(1, 5)),
               Fraction(rng.randint(-9, 9), rng.randint(1, 5)))
        b = QI(Fraction(rng.randint(-9, 9), rng.randint(1, 5)),
               Fraction(rng.randint(-9, 9), rng.randint(1, 5)))
        for op in (lambda x, y: x + y, lambda x, y: x - y, lambda x, y: x * y):
            got = to_complex(op(a, b))
            want = op(to_complex(a), to_complex(b))
            assert abs(got - want) < 1e-12


def test_coerce_and_mode():
    assert coerce(3) == Fraction(3)
    assert is_exact(coerce(3))
    assert coerce(0.25) == 0.25 + 0j
    assert not is_exact(coerce(1.5))
    with pytest.raises(TypeError):
        coerce(True)
    assert common_mode([Fraction(1), QI(0, 1)]) == "exact"
    assert common_mode([Fraction(1), 2.0 + 0j]) == "numeric"


def test_parse_and_format_roundtrip():
    assert parse_rational("3/4") == Fraction(3, 4)
    assert parse_rational("-5") == Fraction(-5)
    with pytest.raises(ValueError):
        parse_rational("1/0")
    assert format_scalar(Fraction(3, 4)) == "3/4"
    assert format_scalar(Fraction(4)) == "4"
    c = format_scalar(1.5 - 2.0j)
    assert c == [1.5, -2.0]


def _random_sparse(rng, nrows, ncols, density=0.6):
    m = SparseMatrix(nrows, ncols)
    for i in range(nrows):
        for j in range(ncols):
            if rng.random() < density:
                m[i, j] = Fraction(rng.randint(-5, 5), rng.randint(1, 3))
    return m


def _dense(m):
    out = np.zeros((m.nrows, m.ncols))
    for (i, j), v in m.data.items():
        out[i, j] = float(v)
    return out


def test_sparse_matmul_against_numpy():
    rng = random.Random(0)
    for _ in range(10):
        a = _random_sparse(rng, 4, 5)
        b = _random_sparse(rng, 5, 3)
        got = _dense(a @ b)
        want = _dense(a) @ _dense(b)
        assert np.allclose(got, want)


def test_sparse_rank_and_nullspace_against_numpy():
    rng = random.Random(1)
    for _ in range(12):
        m = _random_sparse(rng, 5, 6, density=0.5)
        d = _dense(m)
        want_rank = np.linalg.matrix_rank(d, tol=1e-9)
        assert rank(m) == want_rank
        kernel = nullspace(m)
        assert len(kernel) == 6 - want_rank
        for v in kernel:
            arr = np.array([float(v.get(k, 0)) for k in range(6)])
            assert np.linalg.norm(d @ arr) < 1e-9
            assert np.linalg.norm(arr) > 0


def test_solve_consistency():
    rng = random.Random(2)
    a = _random_sparse(rng, 4, 4, density=0.9)
    while rank(a) < 4:
        a = _random_sparse(rng, 4, 4, density=0.9)
    x = {0: Fraction(1, 3), 2: Fraction(-2)}
    b = a.apply(x)
    got = solve(a, b)
    assert got == x


def test_rref_pivots_are_sorted_orders():
    rows = [{0: Fraction(1), 3: Fraction(2)},
            {0: Fraction(2), 3: Fraction(4), 5: Fraction(1)},
            {1: Fraction(1)}]
    _, pivots = rref(rows, 6)
    assert pivots == sorted(pivots)
    assert len(pivots) == 3


def test_incremental_span():
    span = IncrementalSpan(4)
    assert span.add({0: Fraction(1), 1: Fraction(1)})
    assert not span.add({0: Fraction(2), 1: Fraction(2)})
    assert span.add({2: Fraction(1)})
    assert len(span) == 2


def test_commutator_and_transpose():
    rng = random.Random(3)
    a = _random_sparse(rng, 4, 4)
    b = _random_sparse(rng, 4, 4)
    c = a.commutator(b)
    assert np.allclose(_dense(c), _dense(a) @ _dense(b) - _dense(b) @ _dense(a))
    assert np.allclose(_dense(a.transpose()), _dense(a).T)


def test_kron_shape_and_values():
    a = SparseMatrix(2, 2)
    a[0, 0] = Fraction(2)
    a[1, 0] = Fraction(3)
    b = SparseMatrix(2, 2)
    b[0, 1] = Fraction(5)
    k = a.kron(b)
    assert (k.nrows, k.ncols) == (4, 4)
    assert k[0, 1] == Fraction(10)
    assert k[2, 1] == Fraction(15)


def test_scalar_abs():
    assert scalar_abs(Fraction(-3, 2)) == 1.5
    assert scalar_abs(QI(3, 4)) == 5.0
    assert scalar_abs(3 - 4j) == 5.0
