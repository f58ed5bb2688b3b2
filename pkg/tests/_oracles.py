"""Independent brute-force oracles used only by the test suite.

These deliberately avoid the library's own algorithms: grid searches,
exhaustive enumeration, and hand formulas.
"""

import itertools
import math
from fractions import Fraction


def grid_mvee_volume_2d(points, n_theta=180, n_aspect=160, max_aspect=40.0):
    """Smallest enclosing-ellipse volume over a documented parameter grid.

    Candidates: rotation angle theta in [0, pi) (n_theta steps) and aspect
    ratio rho in [1, max_aspect] (geometric grid).  For each candidate frame
    the scale is fitted so all points are enclosed, which keeps every
    candidate feasible; the least candidate area upper-bounds the optimum.
    """
    pts = [(float(x), float(y)) for x, y in points]
    best = math.inf
    for it in range(n_theta):
        theta = math.pi * it / n_theta
        c, s = math.cos(theta), math.sin(theta)
        rot = [(c * x + s * y, -s * x + c * y) for x, y in pts]
        for ia in range(n_aspect):
            rho = max_aspect ** (ia / (n_aspect - 1))
            # ellipse (u/a)^2 + (v*rho/a)^2 <= 1: fit a to enclose all points
            a_sq = max(u * u + (v * rho) ** 2 for u, v in rot)
            area = math.pi * a_sq / rho
            if area < best:
                best = area
    return best


def grid_mvee_volume_3d(points, n_angle=14, n_aspect=8, max_aspect=12.0):
    """Coarse 3-D analogue of grid_mvee_volume_2d (Euler-angle grid)."""
    pts = [tuple(map(float, p)) for p in points]
    best = math.inf
    angles = [math.pi * i / n_angle for i in range(n_angle)]
    aspects = [max_aspect ** (i / (n_aspect - 1)) for i in range(n_aspect)]
    for alpha, beta, gamma in itertools.product(angles, angles, angles):
        ca, sa = math.cos(alpha), math.sin(alpha)
        cb, sb = math.cos(beta), math.sin(beta)
        cg, sg = math.cos(gamma), math.sin(gamma)
        # z-y-z rotation
        r = (
            (ca * cb * cg - sa * sg, -ca * cb * sg - sa * cg, ca * sb),
            (sa * cb * cg + ca * sg, -sa * cb * sg + ca * cg, sa * sb),
            (-sb * cg, sb * sg, cb),
        )
        rot = [
            (
                r[0][0] * x + r[1][0] * y + r[2][0] * z,
                r[0][1] * x + r[1][1] * y + r[2][1] * z,
                r[0][2] * x + r[1][2] * y + r[2][2] * z,
            )
            for x, y, z in pts
        ]
        for rho2, rho3 in itertools.product(aspects, aspects):
            a_sq = max(u * u + (v * rho2) ** 2 + (w * rho3) ** 2 for u, v, w in rot)
            vol = (4.0 / 3.0) * math.pi * a_sq ** 1.5 / (rho2 * rho3)
            if vol < best:
                best = vol
    return best


def ellipsoid_volume(form_entries, dim):
    """Exact-formula volume of {x : x^T A x <= 1}: omega_d / sqrt(det A)."""
    import numpy as np

    a = [[float(x) for x in row] for row in form_entries]
    det = float(np.linalg.det(np.array(a)))
    unit = math.pi ** (dim / 2.0) / math.gamma(dim / 2.0 + 1.0)
    return unit / math.sqrt(det)


def brute_disk_points(radius_sq, bound):
    """All integer points with |x|^2 <= radius_sq, by direct scan."""
    out = []
    for x in range(-bound, bound + 1):
        for y in range(-bound, bound + 1):
            if x * x + y * y <= radius_sq:
                out.append((x, y))
    return sorted(out)


def shortest_basis_2d(rows, coeff_bound=4):
    """Exhaustive search for the two shortest independent lattice vectors."""
    cands = []
    for m1, m2 in itertools.product(range(-coeff_bound, coeff_bound + 1), repeat=2):
        if (m1, m2) == (0, 0):
            continue
        v = tuple(m1 * a + m2 * b for a, b in zip(rows[0], rows[1]))
        cands.append((sum(Fraction(c) ** 2 for c in v), v, (m1, m2)))
    cands.sort(key=lambda t: (t[0], t[2]))
    first = cands[0]
    for q, v, m in cands:
        if first[2][0] * m[1] - first[2][1] * m[0] != 0:
            return first[0], q
    raise AssertionError("no independent pair found")
