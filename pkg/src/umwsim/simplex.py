"""Small exact linear-program solver over rationals.

Two-phase primal simplex with Bland's rule, all arithmetic in Fraction.
Built for the desk-scale capacity programs in this package (tens of rows,
a few hundred columns), where exact optima let certificates verify to
arbitrary tolerance and keep results deterministic. Not intended as a
general-purpose LP code.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


def _to_fraction_rows(rows: Sequence[Sequence]) -> list[list[Fraction]]:
    return [[Fraction(x) for x in row] for row in rows]


class _Tableau:
    def __init__(self, rows: list[list[Fraction]], rhs: list[Fraction], basis: list[int]):
        self.rows = rows
        self.rhs = rhs
        self.basis = basis
        self.obj: list[Fraction] = []
        self.obj_val = Fraction(0)

    @property
    def ncols(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    def set_objective(self, cost: list[Fraction]) -> None:
        """Load reduced costs c_j - z_j for the current basis."""
        self.obj = list(cost)
        self.obj_val = Fraction(0)
        for i, bi in enumerate(self.basis):
            cb = cost[bi]
            if cb == 0:
                continue
            row = self.rows[i]
            for j in range(self.ncols):
                self.obj[j] -= cb * row[j]
            self.obj_val += cb * self.rhs[i]

    def pivot(self, r: int, c: int) -> None:
        piv = self.rows[r][c]
        row = self.rows[r]
        inv = 1 / piv
        for j in range(self.ncols):
            row[j] *= inv
        self.rhs[r] *= inv
        for i, other in enumerate(self.rows):
            if i == r or other[c] == 0:
                continue
            f = other[c]
            for j in range(self.ncols):
                other[j] -= f * row[j]
            self.rhs[i] -= f * self.rhs[r]
        f = self.obj[c]
        if f != 0:
            for j in range(self.ncols):
                self.obj[j] -= f * row[j]
            self.obj_val += f * self.rhs[r]
        self.basis[r] = c

    def maximize(self, eligible: list[bool]) -> str:
        """Run primal simplex steps until optimal or unbounded (Bland's rule)."""
        while True:
            enter = -1
            for j in range(self.ncols):
                if eligible[j] and self.obj[j] > 0:
                    enter = j
                    break
            if enter < 0:
                return OPTIMAL
            leave = -1
            best = None
            for i, row in enumerate(self.rows):
                a = row[enter]
                if a > 0:
                    ratio = self.rhs[i] / a
                    key = (ratio, self.basis[i])
                    if best is None or key < best:
                        best = key
                        leave = i
            if leave < 0:
                return UNBOUNDED
            self.pivot(leave, enter)


def solve_lp(
    objective: Sequence,
    a_ub: Sequence[Sequence] = (),
    b_ub: Sequence = (),
    a_eq: Sequence[Sequence] = (),
    b_eq: Sequence = (),
) -> tuple[str, Fraction | None, list[Fraction] | None]:
    """Maximize objective . x subject to a_ub x <= b_ub, a_eq x = b_eq, x >= 0.

    Returns (status, optimal value, solution vector); value and vector are
    None unless status is "optimal".
    """
    n = len(objective)
    norm_rows: list[tuple[list[Fraction], Fraction, str]] = []
    for row, b in zip(_to_fraction_rows(a_ub), [Fraction(x) for x in b_ub]):
        if b < 0:
            norm_rows.append(([-x for x in row], -b, "ge"))
        else:
            norm_rows.append((row, b, "le"))
    for row, b in zip(_to_fraction_rows(a_eq), [Fraction(x) for x in b_eq]):
        if b < 0:
            norm_rows.append(([-x for x in row], -b, "eq"))
        else:
            norm_rows.append((row, b, "eq"))

    n_slack = sum(1 for _, _, k in norm_rows if k == "le")
    n_surplus = sum(1 for _, _, k in norm_rows if k == "ge")
    n_art = sum(1 for _, _, k in norm_rows if k in ("ge", "eq"))
    total = n + n_slack + n_surplus + n_art
    art_start = n + n_slack + n_surplus

    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    basis: list[int] = []
    i_slack, i_surplus, i_art = n, n + n_slack, art_start
    for coeffs, b, kind in norm_rows:
        row = [Fraction(0)] * total
        row[:n] = coeffs
        if kind == "le":
            row[i_slack] = Fraction(1)
            basis.append(i_slack)
            i_slack += 1
        elif kind == "ge":
            row[i_surplus] = Fraction(-1)
            i_surplus += 1
            row[i_art] = Fraction(1)
            basis.append(i_art)
            i_art += 1
        else:
            row[i_art] = Fraction(1)
            basis.append(i_art)
            i_art += 1
        rows.append(row)
        rhs.append(b)

    tab = _Tableau(rows, rhs, basis)

    if n_art:
        phase1 = [Fraction(0)] * total
        for j in range(art_start, total):
            phase1[j] = Fraction(-1)
        tab.set_objective(phase1)
        status = tab.maximize([True] * total)
        assert status == OPTIMAL  # phase 1 is always bounded
        if tab.obj_val != 0:
            return INFEASIBLE, None, None
        # Pivot leftover artificials out of the basis; a row where that is
        # impossible is redundant and can be dropped.
        for i in reversed(range(len(tab.rows))):
            if tab.basis[i] < art_start:
                continue
            piv_col = next(
                (j for j in range(art_start) if tab.rows[i][j] != 0),
                None,
            )
            if piv_col is None:
                del tab.rows[i], tab.rhs[i], tab.basis[i]
            else:
                tab.pivot(i, piv_col)

    eligible = [j < art_start for j in range(total)]
    cost = [Fraction(0)] * total
    cost[:n] = [Fraction(x) for x in objective]
    tab.set_objective(cost)
    status = tab.maximize(eligible)
    if status != OPTIMAL:
        return status, None, None
    x = [Fraction(0)] * n
    for i, bi in enumerate(tab.basis):
        if bi < n:
            x[bi] = tab.rhs[i]
    return OPTIMAL, tab.obj_val, x
