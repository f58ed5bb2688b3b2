"""Dense two-phase simplex over exact rationals.

Small helper for membership and extent queries on symmetric polytopes: a
handful of rows, Bland's rule (no cycling), everything in Fractions.
"""

from __future__ import annotations

from fractions import Fraction

FEASIBLE = "feasible"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


class _Tableau:
    """Equality-form tableau with artificial columns n..n+m-1."""

    def __init__(self, a_rows, b_vals):
        self.m = len(a_rows)
        self.n = len(a_rows[0]) if a_rows else 0
        a = [[Fraction(v) for v in row] for row in a_rows]
        b = [Fraction(v) for v in b_vals]
        for i in range(self.m):
            if b[i] < 0:
                a[i] = [-v for v in a[i]]
                b[i] = -b[i]
        self.tab = [
            a[i] + [Fraction(int(i == j)) for j in range(self.m)] + [b[i]]
            for i in range(self.m)
        ]
        self.basis = list(range(self.n, self.n + self.m))
        self.width = self.n + self.m + 1

    def pivot(self, row, col):
        tab = self.tab
        pv = tab[row][col]
        tab[row] = [v / pv for v in tab[row]]
        for r in range(self.m):
            if r != row and tab[r][col] != 0:
                f = tab[r][col]
                tab[r] = [v - f * w for v, w in zip(tab[r], tab[row])]
        self.basis[row] = col

    def _run(self, red, allowed):
        # Bland's rule on both entering and leaving choices
        tab, basis, m = self.tab, self.basis, self.m
        while True:
            enter = None
            for j in range(allowed):
                if red[j] < 0 and j not in basis:
                    enter = j
                    break
            if enter is None:
                return FEASIBLE
            leave = None
            best = None
            for r in range(m):
                if tab[r][enter] > 0:
                    ratio = tab[r][-1] / tab[r][enter]
                    if best is None or ratio < best or (
                        ratio == best and basis[r] < basis[leave]
                    ):
                        best = ratio
                        leave = r
            if leave is None:
                return UNBOUNDED
            self.pivot(leave, enter)
            f = red[enter]
            for j in range(len(red)):
                red[j] -= f * tab[leave][j]

    def phase1(self) -> bool:
        red = [Fraction(0)] * self.width
        for j in range(self.n, self.n + self.m):
            red[j] = Fraction(1)
        for r in range(self.m):
            for j in range(self.width):
                red[j] -= self.tab[r][j]
        self._run(red, self.n + self.m)
        if -red[-1] > 0:
            return False
        # drive leftover artificials out of the basis (their rows sit at 0)
        for r in range(self.m):
            if self.basis[r] >= self.n:
                for j in range(self.n):
                    if self.tab[r][j] != 0:
                        self.pivot(r, j)
                        break
        return True

    def phase2(self, costs):
        """Optimize from the current basic feasible solution."""
        red = [Fraction(v) for v in costs] + [Fraction(0)] * (self.m + 1)
        for r in range(self.m):
            if self.basis[r] < self.n and red[self.basis[r]] != 0:
                f = red[self.basis[r]]
                for j in range(self.width):
                    red[j] -= f * self.tab[r][j]
        status = self._run(red, self.n)
        if status == UNBOUNDED:
            return UNBOUNDED, None
        x = self.solution()
        value = sum((c * v for c, v in zip(costs, x)), Fraction(0))
        return FEASIBLE, value

    def solution(self):
        x = [Fraction(0)] * self.n
        for r in range(self.m):
            if self.basis[r] < self.n:
                x[self.basis[r]] = self.tab[r][-1]
        return x


def solve_lp(costs, a_rows, b_vals):
    """Minimize costs @ x subject to a_rows @ x == b_vals, x >= 0.

    Returns (status, value, x) with exact Fractions; x is None unless status
    is FEASIBLE.
    """
    t = _Tableau(a_rows, b_vals)
    if not t.phase1():
        return INFEASIBLE, None, None
    status, value = t.phase2(list(costs))
    if status != FEASIBLE:
        return status, None, None
    return FEASIBLE, value, t.solution()


def solve_lp_minmax(costs, a_rows, b_vals):
    """Exact (min, max) of costs @ x over {a_rows @ x == b_vals, x >= 0}.

    One phase-1 run; the max re-optimizes from the min's final basis.
    Returns (status, lo, hi).
    """
    t = _Tableau(a_rows, b_vals)
    if not t.phase1():
        return INFEASIBLE, None, None
    costs = [Fraction(v) for v in costs]
    status, lo = t.phase2(costs)
    if status != FEASIBLE:
        return status, None, None
    status, neg_hi = t.phase2([-v for v in costs])
    if status != FEASIBLE:
        return status, None, None
    return FEASIBLE, lo, -neg_hi
