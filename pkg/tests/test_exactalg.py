from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gapcover.errors import (
    DimensionError,
    LatticeMismatchError,
    RankError,
    SingularMatrixError,
)
from gapcover.exactalg import (
    Mat,
    UnimodularMat,
    det,
    floor_sqrt,
    hnf,
    inverse,
    left_kernel,
    rank,
    rational_kernel,
    solve,
    sqrt_lower,
    sqrt_upper,
    unimodular_solve,
    vec_dot,
)


def cofactor_2x2(m):
    # independent hand oracle for 2x2 determinants
    return m.entries[0][0] * m.entries[1][1] - m.entries[0][1] * m.entries[1][0]


def adjugate_2x2(m):
    a, b = m.entries[0]
    c, d = m.entries[1]
    dt = a * d - b * c
    return Mat([[d / dt, -b / dt], [-c / dt, a / dt]])


small_ints = st.integers(min_value=-30, max_value=30)


def square_int_mats(max_dim=4):
    return st.integers(min_value=1, max_value=max_dim).flatmap(
        lambda n: st.lists(
            st.lists(small_ints, min_size=n, max_size=n), min_size=n, max_size=n
        )
    )


class TestDet:
    def test_diagonal(self):
        assert det(Mat([[2, 0], [0, 3]])) == 6

    def test_identity_4x4(self):
        assert det(Mat.identity(4)) == 1

    def test_2x2_against_cofactor_oracle(self):
        m = Mat([[1, 2], [3, 4]])
        assert det(m) == cofactor_2x2(m) == -2

    def test_rational_entries(self):
        m = Mat([[Fraction(1, 2), Fraction(1, 3)], [Fraction(1, 5), Fraction(1, 7)]])
        assert det(m) == cofactor_2x2(m)

    def test_non_square_raises(self):
        with pytest.raises(DimensionError):
            det(Mat([[1, 2, 3], [4, 5, 6]]))

    @given(square_int_mats())
    @settings(max_examples=60, deadline=None)
    def test_transpose_invariance(self, rows):
        m = Mat(rows)
        assert det(m) == det(m.transpose())

    @given(square_int_mats())
    @settings(max_examples=60, deadline=None)
    def test_det_times_det_inverse_is_one(self, rows):
        m = Mat(rows)
        d = det(m)
        if d == 0:
            return
        assert d * det(inverse(m)) == 1


class TestInverse:
    def test_identity(self):
        assert inverse(Mat.identity(3)) == Mat.identity(3)

    def test_shear(self):
        assert inverse(Mat([[1, 0], [-4, 1]])) == Mat([[1, 0], [4, 1]])

    def test_against_adjugate_oracle(self):
        m = Mat([[2, 1], [1, 1]])
        assert inverse(m) == adjugate_2x2(m) == Mat([[1, -1], [-1, 2]])

    def test_singular_raises(self):
        with pytest.raises(SingularMatrixError):
            inverse(Mat([[1, 2], [2, 4]]))

    @given(square_int_mats())
    @settings(max_examples=60, deadline=None)
    def test_roundtrip(self, rows):
        m = Mat(rows)
        if det(m) == 0:
            return
        assert m @ inverse(m) == Mat.identity(m.rows)

    def test_solve(self):
        m = Mat([[2, 1], [1, 1]])
        x = solve(m, (3, 2))
        assert m.mul_vec(x) == (Fraction(3), Fraction(2))


def naive_lattice_equal(a: Mat, b: Mat) -> bool:
    """Row-lattice equality oracle: each row of one is an integer combination
    of the rows of the other (both directions), via exact solves."""
    inv_a, inv_b = inverse(a), inverse(b)
    for i in range(b.rows):
        coeffs = inv_a.transpose().mul_vec(b.row(i))
        if any(c.denominator != 1 for c in coeffs):
            return False
    for i in range(a.rows):
        coeffs = inv_b.transpose().mul_vec(a.row(i))
        if any(c.denominator != 1 for c in coeffs):
            return False
    return True


class TestHnf:
    def test_identity(self):
        h, u = hnf(Mat.identity(3))
        assert h == Mat.identity(3)
        assert u == UnimodularMat.identity(3)

    def test_row_swap(self):
        h, u = hnf(Mat([[0, 1], [1, 0]]))
        assert h == Mat.identity(2)
        assert u.mat @ Mat([[0, 1], [1, 0]]) == h

    def test_det_preserved(self):
        m = Mat([[2, 4], [6, 8]])
        h, u = hnf(m)
        assert abs(det(h)) == 8
        assert u.mat @ m == h
        # canonical shape: lower triangular, positive pivots
        assert h.entries[0][1] == 0
        assert h.entries[0][0] > 0 and h.entries[1][1] > 0
        assert 0 <= h.entries[1][0] < h.entries[0][0]
        assert naive_lattice_equal(m, h)

    def test_rank_deficient_raises(self):
        with pytest.raises(RankError):
            hnf(Mat([[1, 2], [2, 4]]))

    @given(square_int_mats())
    @settings(max_examples=60, deadline=None)
    def test_idempotent_and_lattice_preserving(self, rows):
        m = Mat(rows)
        if det(m) == 0:
            return
        h, u = hnf(m)
        h2, _ = hnf(h)
        assert h2 == h
        assert u.mat @ m == h
        assert naive_lattice_equal(m, h)


def make_unimodular(seed_ops):
    """Build a small unimodular matrix from a list of (kind, i, j, q) ops."""
    n = 3
    rows = [[int(i == j) for j in range(n)] for i in range(n)]
    for kind, i, j, q in seed_ops:
        i, j = i % n, j % n
        if i == j:
            continue
        if kind == 0:
            rows[i], rows[j] = rows[j], rows[i]
        else:
            rows[i] = [a + q * b for a, b in zip(rows[i], rows[j])]
    return Mat(rows)


elementary_ops = st.lists(
    st.tuples(
        st.integers(0, 1),
        st.integers(0, 2),
        st.integers(0, 2),
        st.integers(-3, 3),
    ),
    min_size=1,
    max_size=8,
)


class TestUnimodularSolve:
    def test_identity_to_swap(self):
        t = unimodular_solve(Mat.identity(2), Mat([[0, 1], [1, 0]]))
        assert t.mat == Mat([[0, 1], [1, 0]])

    def test_index_two_sublattice_rejected(self):
        with pytest.raises(LatticeMismatchError):
            unimodular_solve(Mat.identity(2), Mat.identity(2).scale(2))

    def test_shear(self):
        t = unimodular_solve(Mat([[1, 0], [4, 1]]), Mat.identity(2))
        assert t.mat @ Mat([[1, 0], [4, 1]]) == Mat.identity(2)
        assert t.mat == Mat([[1, 0], [-4, 1]])

    def test_non_integer_transform_rejected(self):
        # same determinant but different lattices
        with pytest.raises(LatticeMismatchError):
            unimodular_solve(Mat([[2, 0], [0, 1]]), Mat([[1, 0], [0, 2]]))

    @given(square_int_mats(3), elementary_ops)
    @settings(max_examples=60, deadline=None)
    def test_succeeds_iff_hnf_equal(self, rows, ops):
        while len(rows) < 3:
            rows = rows + [[0] * len(rows[0])]
        m = Mat([r[:3] + [0] * (3 - len(r[:3])) for r in rows[:3]])
        if det(m) == 0:
            return
        w = make_unimodular(ops)
        m2 = w @ m
        t = unimodular_solve(m, m2)
        assert t.mat == w
        assert hnf(m)[0] == hnf(m2)[0]
        m3 = m.scale(2)
        with pytest.raises((LatticeMismatchError, SingularMatrixError)):
            unimodular_solve(m, m3)
        assert hnf(m)[0] != hnf(m3)[0]


class TestKernels:
    def test_rational_kernel(self):
        m = Mat([[1, 1, 0], [0, 0, 1]])
        basis = rational_kernel(m)
        assert len(basis) == 1
        for v in basis:
            assert m.mul_vec(v) == (0, 0)

    def test_left_kernel_saturated(self):
        m = Mat([[1], [-1]])
        basis = left_kernel(m)
        assert basis == [(1, 1)]

    def test_left_kernel_full_rank_empty(self):
        assert left_kernel(Mat.identity(3)) == []

    def test_rank(self):
        assert rank(Mat([[1, 2], [2, 4]])) == 1
        assert rank(Mat.identity(3)) == 3


class TestSqrtBounds:
    @given(st.fractions(min_value=0, max_value=10**6))
    @settings(max_examples=80, deadline=None)
    def test_bracketing(self, x):
        up, lo = sqrt_upper(x), sqrt_lower(x)
        assert lo * lo <= x <= up * up
        assert lo <= up

    def test_floor_sqrt(self):
        assert floor_sqrt(Fraction(89, 10)) == 2
        assert floor_sqrt(Fraction(91, 10)) == 3
        assert floor_sqrt(Fraction(0)) == 0

    def test_exact_square(self):
        assert sqrt_lower(Fraction(4)) <= 2 <= sqrt_upper(Fraction(4))


def test_vec_dot_dimension_error():
    with pytest.raises(DimensionError):
        vec_dot((1, 2), (1, 2, 3))
