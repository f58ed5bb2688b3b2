from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gapcover.errors import RankError, UnsupportedDimensionError
from gapcover.exactalg import Mat, det, hnf, norm_sq, sqrt_lower
from gapcover.latred import (
    LatticeBasis,
    certify_reduction,
    lll_reduce,
    successive_minima_bruteforce,
)

from _oracles import shortest_basis_2d


def lattices_equal(a: Mat, b: Mat) -> bool:
    """Oracle: scale to integer matrices with one common factor, compare HNFs."""
    den = 1
    for m in (a, b):
        for row in m.entries:
            for x in row:
                den = den * x.denominator // __import__("math").gcd(den, x.denominator)
    return hnf(a.scale(den))[0] == hnf(b.scale(den))[0]


def basis_strategy(max_dim=4, bound=25):
    def build(n):
        return st.lists(
            st.lists(st.integers(-bound, bound), min_size=n, max_size=n),
            min_size=n,
            max_size=n,
        )
    return st.integers(2, max_dim).flatmap(build)


class TestLll:
    def test_identity(self):
        b = LatticeBasis([(1, 0), (0, 1)])
        v, t = lll_reduce(b)
        assert v == b
        assert t.mat == Mat.identity(2)

    def test_size_reduction_shear(self):
        b = LatticeBasis([(1, 0), (4, 1)])
        v, t = lll_reduce(b)
        assert v.vectors == ((Fraction(1), Fraction(0)), (Fraction(0), Fraction(1)))
        assert t.mat == Mat([[1, 0], [-4, 1]])
        assert t.mat @ b.mat == v.mat

    def test_finds_short_basis(self):
        rows = ((1, 1), (0, 2))
        b = LatticeBasis(rows)
        v, t = lll_reduce(b)
        for vec in v.vectors:
            assert norm_sq(vec) <= 2
        # exhaustive oracle: the two shortest independent vectors have norms^2 (2, 2)
        q1, q2 = shortest_basis_2d(rows)
        assert {norm_sq(v.vectors[0]), norm_sq(v.vectors[1])} <= {q1, q2} | {q1} | {q2}
        assert norm_sq(v.vectors[0]) == q1

    def test_lovasz_and_size_reduction_hold(self):
        from gapcover.latred import _gram_schmidt

        b = LatticeBasis([(12, 2, 17), (4, -9, 3), (5, 5, 5)])
        v, _ = lll_reduce(b)
        rows = [list(r) for r in v.vectors]
        ortho, mu = _gram_schmidt(rows)
        d = len(rows)
        delta = Fraction(99, 100)
        for i in range(d):
            for j in range(i):
                assert abs(mu[i][j]) <= Fraction(1, 2)
        for k in range(1, d):
            lhs = norm_sq(ortho[k])
            rhs = (delta - mu[k][k - 1] ** 2) * norm_sq(ortho[k - 1])
            assert lhs >= rhs

    @given(basis_strategy())
    @settings(max_examples=40, deadline=None)
    def test_lattice_preserved_and_bound(self, rows):
        m = Mat(rows)
        if det(m) == 0:
            return
        b = LatticeBasis(rows)
        v, t = lll_reduce(b)
        assert t.mat @ b.mat == v.mat
        assert lattices_equal(b.mat, v.mat)
        assert abs(det(v.mat)) == abs(det(b.mat))
        d = b.dim
        cert = certify_reduction(v)
        assert cert.ratio <= Fraction(2) ** Fraction(d * (d - 1), 4) * Fraction(1000001, 1000000)

    def test_rational_entries(self):
        b = LatticeBasis([(Fraction(1, 3), 0), (Fraction(5, 2), Fraction(1, 7))])
        v, t = lll_reduce(b)
        assert t.mat @ b.mat == v.mat
        assert lattices_equal(b.mat, v.mat)


class TestCertify:
    def test_identity_ratio_one(self):
        cert = certify_reduction(LatticeBasis([(1, 0), (0, 1)]))
        assert cert.norm_product_sq == 1
        assert cert.det_abs == 1
        assert 1 <= cert.ratio < Fraction(1000001, 1000000)

    def test_sqrt2_ratio(self):
        cert = certify_reduction(LatticeBasis([(1, 0), (1, 1)]))
        assert cert.norm_product_sq == 2
        assert cert.ratio >= sqrt_lower(Fraction(2))
        assert cert.ratio ** 2 >= 2
        assert cert.ratio ** 2 <= Fraction(2) * Fraction(1000001, 1000000)

    def test_unreduced_flagged(self):
        cert = certify_reduction(LatticeBasis([(1, 0), (100, 1)]))
        assert Fraction(100004, 1000) < cert.ratio < Fraction(100006, 1000)

    def test_hadamard_lower_bound(self):
        for rows in [((3, 1), (1, 2)), ((5, 0, 0), (1, 1, 0), (2, 3, 4))]:
            cert = certify_reduction(LatticeBasis(rows))
            assert cert.ratio >= 1


class TestSuccessiveMinima:
    def test_identity(self):
        mins = successive_minima_bruteforce(LatticeBasis([(1, 0), (0, 1)]))
        assert sorted(norm_sq(v) for v in mins) == [1, 1]

    def test_sheared_is_standard(self):
        mins = successive_minima_bruteforce(LatticeBasis([(1, 0), (4, 1)]))
        assert sorted(norm_sq(v) for v in mins) == [1, 1]

    def test_rectangular(self):
        mins = successive_minima_bruteforce(LatticeBasis([(2, 0), (0, 3)]))
        assert sorted(norm_sq(v) for v in mins) == [4, 9]

    def test_dimension_cap(self):
        rows = [[int(i == j) for j in range(5)] for i in range(5)]
        with pytest.raises(UnsupportedDimensionError):
            successive_minima_bruteforce(LatticeBasis(rows))

    def test_independent(self):
        mins = successive_minima_bruteforce(LatticeBasis([(2, 1, 0), (1, 2, 0), (0, 0, 5)]))
        from gapcover.exactalg import rank

        assert rank(Mat(mins)) == 3
        assert norm_sq(mins[0]) <= norm_sq(mins[1]) <= norm_sq(mins[2])

    @given(basis_strategy(max_dim=3, bound=6))
    @settings(max_examples=20, deadline=None)
    def test_cross_check_with_lll(self, rows):
        m = Mat(rows)
        if det(m) == 0:
            return
        b = LatticeBasis(rows)
        mins = successive_minima_bruteforce(b)
        reduced, _ = lll_reduce(b)
        cert = certify_reduction(reduced)
        prod_min_sq = Fraction(1)
        for v in mins:
            prod_min_sq *= norm_sq(v)
        d = b.dim
        # minima product <= reduced norm product <= LLL factor * minima product
        assert prod_min_sq <= cert.norm_product_sq
        factor = Fraction(2) ** Fraction(d * (d - 1), 2)
        assert cert.norm_product_sq <= factor * prod_min_sq * Fraction(1000001, 1000000)

    def test_minkowski_lower_bound(self):
        # prod lambda_i >= c_d |det| with explicit rational c_d understating
        # 2^d / (d! omega_d): c_1=1, c_2=63/100, c_3=31/100, c_4=13/100
        cds = {1: Fraction(1), 2: Fraction(63, 100), 3: Fraction(31, 100), 4: Fraction(13, 100)}
        cases = [
            ((3,),),
            ((2, 1), (1, 3)),
            ((1, 0, 0), (2, 3, 0), (4, 5, 6)),
            ((1, 0, 0, 0), (1, 2, 0, 0), (0, 1, 3, 0), (1, 1, 1, 2)),
        ]
        for rows in cases:
            b = LatticeBasis(rows)
            d = b.dim
            mins = successive_minima_bruteforce(b)
            prod_sq = Fraction(1)
            for v in mins:
                prod_sq *= norm_sq(v)
            assert prod_sq >= (cds[d] * abs(det(b.mat))) ** 2
