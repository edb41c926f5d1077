"""Exact linear algebra over the rationals.

Dense routines (RREF, solve, nullspace) for the small systems that come up
in homology bookkeeping, plus a sparse rank with Markowitz-style pivoting
for the large boundary matrices produced by telescopes.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

Matrix = List[List[Fraction]]


def zeros(m: int, n: int) -> Matrix:
    return [[Fraction(0)] * n for _ in range(m)]


def rref(mat: Matrix) -> Tuple[Matrix, List[int]]:
    """Reduced row echelon form. Returns (rref_matrix, pivot_columns)."""
    a = [row[:] for row in mat]
    m = len(a)
    n = len(a[0]) if m else 0
    pivots: List[int] = []
    r = 0
    for c in range(n):
        pr = None
        for i in range(r, m):
            if a[i][c] != 0:
                pr = i
                break
        if pr is None:
            continue
        a[r], a[pr] = a[pr], a[r]
        inv = Fraction(1) / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(m):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    return a, pivots


def rank(mat: Matrix) -> int:
    return len(rref(mat)[1])


def nullspace(mat: Matrix) -> List[List[Fraction]]:
    """Basis of the right nullspace, as a list of column vectors."""
    m = len(mat)
    n = len(mat[0]) if m else 0
    if m == 0:
        return [[Fraction(1) if i == j else Fraction(0) for i in range(n)]
                for j in range(n)]
    red, pivots = rref(mat)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * n
        v[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -red[r][fc]
        basis.append(v)
    return basis


def solve(mat: Matrix, rhs: Sequence[Fraction]) -> Optional[List[Fraction]]:
    """One solution of mat @ x = rhs, or None if inconsistent."""
    m = len(mat)
    n = len(mat[0]) if m else 0
    aug = [list(mat[i]) + [Fraction(rhs[i])] for i in range(m)]
    red, pivots = rref(aug)
    if n in pivots:
        return None
    x = [Fraction(0)] * n
    for r, pc in enumerate(pivots):
        x[pc] = red[r][n]
    return x


def column_space_selector(mat: Matrix) -> List[int]:
    """Indices of a maximal independent subset of columns."""
    return rref(mat)[1]


class QuotientSpace:
    """The quotient V / W of subspaces of Q^n given by spanning columns.

    Provides coordinates on the quotient: ``coords(v)`` expresses the class
    of ``v`` (which must lie in V) in a fixed basis of V/W.
    """

    def __init__(self, n: int, v_cols: List[List[Fraction]],
                 w_cols: List[List[Fraction]]):
        self.n = n
        w_mat = _cols_to_matrix(n, w_cols)
        w_sel = column_space_selector(w_mat)
        self._w_basis = [w_cols[i] for i in w_sel]
        combined = self._w_basis + list(v_cols)
        c_mat = _cols_to_matrix(n, combined)
        sel = column_space_selector(c_mat)
        self._rep_idx = [i for i in sel if i >= len(self._w_basis)]
        self.reps = [combined[i] for i in self._rep_idx]
        self._solve_mat = _cols_to_matrix(n, self._w_basis + self.reps)
        self.dim = len(self.reps)

    def coords(self, v: Sequence[Fraction]) -> List[Fraction]:
        sol = solve(self._solve_mat, list(v))
        if sol is None:
            raise ValueError("vector not in the ambient subspace")
        k = len(self._w_basis)
        return sol[k:]


def _cols_to_matrix(n: int, cols: List[List[Fraction]]) -> Matrix:
    return [[cols[j][i] for j in range(len(cols))] for i in range(n)]


def sparse_rank(entries: Dict[Tuple[object, object], Fraction]) -> int:
    """Rank of a sparse rational matrix keyed by (row, col).

    Gaussian elimination with a greedy low-fill pivot choice; fine for the
    sizes produced by desk-scale telescopes.
    """
    rows: Dict[object, Dict[object, Fraction]] = {}
    cols: Dict[object, set] = {}
    for (r, c), v in entries.items():
        if v == 0:
            continue
        rows.setdefault(r, {})[c] = v
        cols.setdefault(c, set()).add(r)
    rk = 0
    while rows:
        # pick pivot minimizing (row fill - 1) * (col fill - 1)
        best = None
        best_cost = None
        for r, rowd in rows.items():
            rl = len(rowd)
            for c in rowd:
                cost = (rl - 1) * (len(cols[c]) - 1)
                if best_cost is None or cost < best_cost:
                    best, best_cost = (r, c), cost
                    if cost == 0:
                        break
            if best_cost == 0:
                break
        pr, pc = best
        rk += 1
        prow = rows.pop(pr)
        pval = prow[pc]
        for c in prow:
            cols[c].discard(pr)
        targets = [r for r in cols.get(pc, ()) if r in rows]
        for r in targets:
            f = rows[r][pc] / pval
            rowd = rows[r]
            for c, v in prow.items():
                nv = rowd.get(c, Fraction(0)) - f * v
                if nv == 0:
                    if c in rowd:
                        del rowd[c]
                        cols[c].discard(r)
                else:
                    if c not in rowd:
                        cols.setdefault(c, set()).add(r)
                    rowd[c] = nv
            if not rowd:
                del rows[r]
        cols.pop(pc, None)
    return rk
