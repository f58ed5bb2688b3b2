"""Centrally symmetric convex bodies, enclosing ellipsoids, enclosing parallelotopes.

Floating point is allowed internally (Khachiyan iteration, eigenvectors) but
every claim consumed downstream is re-established in exact rational
arithmetic: point membership, slab containment, determinants.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import _simplex
from .errors import (
    CertificationError,
    ConvergenceError,
    DimensionError,
    RankError,
)
from .exactalg import (
    Mat,
    Vector,
    as_vector,
    det,
    floor_sqrt,
    inverse,
    rank,
    vec_dot,
)

MVEE_MAX_ITER = 100_000
MVEE_DEFAULT_EPS = Fraction(1, 100)
_RATIONALIZE_DEN_CAP = 10**9  # well under the 2**48 coefficient-growth cap


def _rationalize(x: float) -> Fraction:
    return Fraction(float(x)).limit_denominator(_RATIONALIZE_DEN_CAP)


class Ellipsoid:
    """Origin-centred ellipsoid {x : x^T A x <= 1} with A rational and
    positive definite (checked exactly via leading principal minors)."""

    __slots__ = ("form", "_inv",)

    def __init__(self, form: Mat):
        if not form.is_square():
            raise DimensionError("ellipsoid form must be square")
        n = form.rows
        for i in range(n):
            for j in range(i):
                if form.entries[i][j] != form.entries[j][i]:
                    raise DimensionError("ellipsoid form must be symmetric")
        for k in range(1, n + 1):
            minor = Mat([row[:k] for row in form.entries[:k]])
            if det(minor) <= 0:
                raise RankError("ellipsoid form is not positive definite")
        object.__setattr__(self, "form", form)
        object.__setattr__(self, "_inv", None)

    def __setattr__(self, name, value):
        raise AttributeError("Ellipsoid is immutable")

    @property
    def dim(self) -> int:
        return self.form.rows

    def quad(self, x: Sequence) -> Fraction:
        v = as_vector(x)
        return vec_dot(v, self.form.mul_vec(v))

    def contains(self, x: Sequence) -> bool:
        return self.quad(x) <= 1

    @property
    def inv_form(self) -> Mat:
        if self._inv is None:
            object.__setattr__(self, "_inv", inverse(self.form))
        return self._inv

    def support_sq(self, direction: Sequence) -> Fraction:
        """Squared support function h(c)^2 = c^T A^{-1} c."""
        c = as_vector(direction)
        return vec_dot(c, self.inv_form.mul_vec(c))

    def int_box_bounds(self) -> tuple[int, ...]:
        """Per-axis integer bounds: floor of the exact axis extents."""
        return tuple(floor_sqrt(self.inv_form.entries[j][j]) for j in range(self.dim))

    def scaled(self, t) -> "Ellipsoid":
        t = Fraction(t)
        return Ellipsoid(self.form.scale(1 / (t * t)))


class ConvexBody:
    """Symmetric convex body: vertex hull, ellipsoid, or axis-aligned box.

    A vertex body is conv(points ∪ -points); listing one of each antipodal
    pair is enough.
    """

    __slots__ = ("kind", "dim", "points", "ellipsoid_rep", "halfwidths", "_int_form")

    KINDS = ("vertices", "ellipsoid", "box")

    def __init__(self, kind, dim, points=None, ellipsoid_rep=None, halfwidths=None):
        if kind not in self.KINDS:
            raise DimensionError(f"unknown body kind {kind!r}")
        if dim < 1:
            raise DimensionError("body dimension must be >= 1")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "ellipsoid_rep", ellipsoid_rep)
        object.__setattr__(self, "halfwidths", halfwidths)
        object.__setattr__(self, "_int_form", None)

    def __setattr__(self, name, value):
        raise AttributeError("ConvexBody is immutable")

    @classmethod
    def vertices(cls, points: Iterable[Iterable]) -> "ConvexBody":
        pts = tuple(as_vector(p) for p in points)
        if not pts:
            raise DimensionError("vertex body needs at least one point")
        d = len(pts[0])
        if any(len(p) != d for p in pts):
            raise DimensionError("vertex dimensions disagree")
        return cls("vertices", d, points=pts)

    @classmethod
    def from_ellipsoid(cls, e: Ellipsoid) -> "ConvexBody":
        return cls("ellipsoid", e.dim, ellipsoid_rep=e)

    @classmethod
    def box(cls, halfwidths: Iterable) -> "ConvexBody":
        hw = as_vector(halfwidths)
        if not hw:
            raise DimensionError("box needs at least one axis")
        if any(h < 0 for h in hw):
            raise DimensionError("box halfwidths must be nonnegative")
        return cls("box", len(hw), halfwidths=hw)

    def spanning_points(self) -> tuple[Vector, ...]:
        """Finite symmetric point set whose hull is the body (vertex and box
        kinds only); used to seed enclosing-ellipsoid computations."""
        if self.kind == "vertices":
            return self.points
        if self.kind == "box":
            corners = []
            for signs in itertools.product((1, -1), repeat=self.dim):
                corners.append(tuple(s * h for s, h in zip(signs, self.halfwidths)))
            return tuple(corners)
        raise DimensionError("ellipsoid bodies have no vertex description")

    def exact_halfwidths(self) -> tuple[Fraction, ...]:
        """Exact per-axis extents max{|x_j| : x in body} (rational for vertex
        and box kinds; not available for ellipsoids)."""
        if self.kind == "vertices":
            return tuple(
                max(abs(p[j]) for p in self.points) for j in range(self.dim)
            )
        if self.kind == "box":
            return self.halfwidths
        raise DimensionError("use int_box_bounds for ellipsoid bodies")

    def int_box_bounds(self) -> tuple[int, ...]:
        """Integer per-axis bounds of the body: floor of the exact extents."""
        if self.kind == "ellipsoid":
            return self.ellipsoid_rep.int_box_bounds()
        return tuple(int(h) for h in self.exact_halfwidths())

    def _ellipsoid_int_test(self):
        # integerized quadratic form: x^T N x <= D, all-int arithmetic
        if self._int_form is None:
            a = self.ellipsoid_rep.form
            den = math.lcm(*(x.denominator for row in a.entries for x in row))
            n_rows = tuple(
                tuple(int(x * den) for x in row) for row in a.entries
            )
            object.__setattr__(self, "_int_form", (n_rows, den))
        return self._int_form

    def contains(self, x: Sequence) -> bool:
        """Exact membership; boundary points count as inside."""
        v = as_vector(x)
        if len(v) != self.dim:
            raise DimensionError(f"point has dimension {len(v)}, body {self.dim}")
        if self.kind == "box":
            return all(abs(a) <= h for a, h in zip(v, self.halfwidths))
        if self.kind == "ellipsoid":
            return self.ellipsoid_rep.contains(v)
        return _hull_contains(self.points, v)

    def contains_int_point(self, x: Sequence[int]) -> bool:
        """Fast path for integer points (same answer as .contains)."""
        if self.kind == "ellipsoid":
            n_rows, den = self._ellipsoid_int_test()
            d = self.dim
            acc = 0
            for i in range(d):
                xi = x[i]
                if xi:
                    row = n_rows[i]
                    acc += xi * sum(row[j] * x[j] for j in range(d))
            return acc <= den
        return self.contains(x)


def _hull_contains(points: Sequence[Vector], x: Vector) -> bool:
    # feasibility of x = sum a_i v_i with sum |a_i| <= 1, via exact simplex
    n = len(points)
    d = len(x)
    rows = []
    for j in range(d):
        row = [points[i][j] for i in range(n)] + [-points[i][j] for i in range(n)] + [Fraction(0)]
        rows.append(row)
    rows.append([Fraction(1)] * (2 * n) + [Fraction(1)])
    rhs = list(x) + [Fraction(1)]
    costs = [Fraction(0)] * (2 * n + 1)
    status, _, _ = _simplex.solve_lp(costs, rows, rhs)
    return status == _simplex.FEASIBLE


def hull_line_extent(points: Sequence[Vector], prefix: Sequence) -> tuple[Fraction, Fraction] | None:
    """Exact extent {t : (prefix, t) in conv(±points)}; None when the line
    misses the hull.  Used by the enumeration line sweep."""
    n = len(points)
    d = len(points[0])
    if len(prefix) != d - 1:
        raise DimensionError("prefix must fix all but the last coordinate")
    # vars: pos(n), neg(n), slack, t+, t-
    width = 2 * n + 3
    rows = []
    rhs = []
    for j in range(d - 1):
        rows.append(
            [points[i][j] for i in range(n)]
            + [-points[i][j] for i in range(n)]
            + [Fraction(0)] * 3
        )
        rhs.append(Fraction(prefix[j]))
    last = (
        [points[i][d - 1] for i in range(n)]
        + [-points[i][d - 1] for i in range(n)]
        + [Fraction(0), Fraction(-1), Fraction(1)]
    )
    rows.append(last)
    rhs.append(Fraction(0))
    rows.append([Fraction(1)] * (2 * n) + [Fraction(1), Fraction(0), Fraction(0)])
    rhs.append(Fraction(1))

    cost = [Fraction(0)] * (2 * n + 1) + [Fraction(1), Fraction(-1)]
    status, lo, hi = _simplex.solve_lp_minmax(cost, rows, rhs)
    if status != _simplex.FEASIBLE:
        return None
    return lo, hi


class Parallelotope:
    """{sum lambda_i u_i : lambda_i in [-1, 1]} for independent generators u_i."""

    __slots__ = ("gens", "_gmat", "_ginv")

    def __init__(self, gens: Iterable[Iterable]):
        g = tuple(as_vector(v) for v in gens)
        d = len(g)
        if d == 0 or any(len(v) != d for v in g):
            raise DimensionError("need d generators of dimension d")
        gmat = Mat.from_columns(g)
        if det(gmat) == 0:
            raise RankError("parallelotope generators are dependent")
        object.__setattr__(self, "gens", g)
        object.__setattr__(self, "_gmat", gmat)
        object.__setattr__(self, "_ginv", None)

    def __setattr__(self, name, value):
        raise AttributeError("Parallelotope is immutable")

    @property
    def dim(self) -> int:
        return len(self.gens)

    @property
    def generator_matrix(self) -> Mat:
        """Matrix whose columns are the generators."""
        return self._gmat

    @property
    def dual_normals(self) -> Mat:
        """Rows n_j with membership test |n_j . x| <= 1 for all j."""
        if self._ginv is None:
            object.__setattr__(self, "_ginv", inverse(self._gmat))
        return self._ginv

    def contains(self, x: Sequence) -> bool:
        lam = self.dual_normals.mul_vec(as_vector(x))
        return all(abs(c) <= 1 for c in lam)


def parallelotope_contains(q: Parallelotope, x: Sequence) -> bool:
    """Exact membership: solve for the generator coefficients, check |.| <= 1."""
    return q.contains(x)


def volume(q: Parallelotope) -> Fraction:
    """2^d |det(generators)|."""
    return Fraction(2) ** q.dim * abs(det(q.generator_matrix))


def mvee(points: Iterable[Iterable], eps=MVEE_DEFAULT_EPS, max_iter=MVEE_MAX_ITER) -> Ellipsoid:
    """Enclosing ellipsoid of points ∪ -points, near-minimal volume.

    Khachiyan's barycentric coordinate ascent (the origin-centred variant for
    symmetric sets) runs in floating point until max_j x_j^T M^{-1} x_j <=
    d(1+eps).  The resulting form is rationalized and then rescaled exactly so
    that every input point satisfies x^T A x <= 1 in rational arithmetic, with
    at least one point exactly on the boundary.
    """
    pts = tuple(as_vector(p) for p in points)
    if not pts:
        raise RankError("empty point set")
    d = len(pts[0])
    if any(len(p) != d for p in pts):
        raise DimensionError("point dimensions disagree")
    eps = Fraction(eps)
    if not 0 < eps < 1:
        raise DimensionError("eps must lie in (0, 1)")
    if rank(Mat(pts)) < d:
        raise RankError("points do not span the space")

    arr = np.array([[float(c) for c in p] for p in pts], dtype=float)
    n = len(pts)
    u = np.full(n, 1.0 / n)
    target = d * (1.0 + float(eps))
    m_inv = None
    for _ in range(max_iter):
        m = arr.T @ (u[:, None] * arr)
        m_inv = np.linalg.inv(m)
        g = np.einsum("ij,jk,ik->i", arr, m_inv, arr)
        j = int(np.argmax(g))
        gmax = float(g[j])
        if gmax <= target:
            break
        step = (gmax - d) / (d * (gmax - 1.0))
        u *= 1.0 - step
        u[j] += step
    else:
        raise ConvergenceError(f"no convergence within {max_iter} iterations")

    a_float = m_inv / d
    approx = [[Fraction(0)] * d for _ in range(d)]
    for i in range(d):
        for j in range(i, d):
            val = _rationalize((a_float[i][j] + a_float[j][i]) / 2.0)
            approx[i][j] = val
            approx[j][i] = val
    a_mat = Mat(approx)
    s = max(vec_dot(p, a_mat.mul_vec(p)) for p in pts)
    if s <= 0:
        raise ConvergenceError("degenerate rationalized form")
    return Ellipsoid(a_mat.scale(1 / s))


_SLACK_LADDER = (
    Fraction(1, 1 << 40),
    Fraction(1, 1 << 30),
    Fraction(1, 1 << 20),
    Fraction(1, 1 << 12),
    Fraction(1, 1 << 6),
)


def circumscribe_parallelotope(e: Ellipsoid, inflation=Fraction(1)) -> Parallelotope:
    """Parallelotope certified (exactly) to contain inflation * e.

    Generators follow the ellipsoid's principal axes: floating eigenvectors
    scaled by the matching semi-axes, rationalized, and stretched by the
    smallest slack from a fixed ladder that makes the exact slab certificate
    pass: inflation^2 * n_j A^{-1} n_j^T <= 1 for every dual normal n_j.
    """
    inflation = Fraction(inflation)
    if inflation < 1:
        raise DimensionError("inflation must be >= 1")
    d = e.dim
    a = np.array([[float(x) for x in row] for row in e.form.entries])
    eigvals, eigvecs = np.linalg.eigh(a)
    if float(eigvals[0]) <= 0:
        raise CertificationError("floating eigendecomposition lost definiteness")
    infl = float(inflation)
    for slack in _SLACK_LADDER:
        factor = infl * (1.0 + float(slack))
        gens = []
        for i in range(d):
            r = factor / float(np.sqrt(eigvals[i]))
            gens.append(tuple(_rationalize(r * float(eigvecs[j, i])) for j in range(d)))
        try:
            q = Parallelotope(gens)
        except RankError:
            continue
        normals = q.dual_normals
        ok = True
        for j in range(d):
            if inflation * inflation * e.support_sq(normals.row(j)) > 1:
                ok = False
                break
        if ok:
            return q
    raise CertificationError("could not certify parallelotope containment")


def contains_point(body: ConvexBody, x: Sequence) -> bool:
    """Exact membership in a convex body (boundary counts as inside)."""
    return body.contains(x)
