"""Dense two-phase tableau simplex with Bland's anti-cycling rule.

Small problems only (tens of rows and columns).  Deterministic: identical
inputs give bitwise-identical outputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

PIVOT_TOL = 1e-11
FEAS_TOL = 1e-9


class LPError(RuntimeError):
    pass


class LPInfeasible(LPError):
    """No point satisfies the constraints.

    ``certificate`` is a Farkas vector ``y`` over the standard-form rows with
    ``y @ A <= 0`` and ``y @ b > 0``; ``phase1_objective`` is the minimal total
    constraint violation found.
    """

    def __init__(self, message: str, certificate: np.ndarray, phase1_objective: float):
        super().__init__(message)
        self.certificate = certificate
        self.phase1_objective = phase1_objective


class LPUnbounded(LPError):
    pass


@dataclass(frozen=True)
class LPResult:
    x: np.ndarray
    objective: float
    basis: tuple[int, ...]
    iterations: int


class _StandardForm:
    """``min c@z  s.t.  A z = b, z >= 0`` with ``x = offset + T @ z``."""

    def __init__(self, c, A_eq, b_eq, A_ub, b_ub, bounds):
        n = len(c)
        cols = []     # (orig index, sign)
        offset = np.zeros(n)
        upper_rows = []
        for i, (lo, hi) in enumerate(bounds):
            lo = -math.inf if lo is None else float(lo)
            hi = math.inf if hi is None else float(hi)
            if lo > hi:
                raise LPInfeasible(f"variable {i} has empty bounds [{lo}, {hi}]",
                                   np.zeros(0), math.inf)
            if math.isfinite(lo):
                offset[i] = lo
                cols.append((i, 1.0))
                if math.isfinite(hi):
                    upper_rows.append((len(cols) - 1, hi - lo))
            elif math.isfinite(hi):
                offset[i] = hi
                cols.append((i, -1.0))
            else:
                cols.append((i, 1.0))
                cols.append((i, -1.0))
        nz_struct = len(cols)
        T = np.zeros((n, nz_struct))
        for k, (i, s) in enumerate(cols):
            T[i, k] = s

        m_eq, m_ub, m_up = len(b_eq), len(b_ub), len(upper_rows)
        nz = nz_struct + m_ub + m_up
        A = np.zeros((m_eq + m_ub + m_up, nz))
        b = np.zeros(m_eq + m_ub + m_up)
        if m_eq:
            A[:m_eq, :nz_struct] = A_eq @ T
            b[:m_eq] = b_eq - A_eq @ offset
        if m_ub:
            A[m_eq:m_eq + m_ub, :nz_struct] = A_ub @ T
            A[m_eq:m_eq + m_ub, nz_struct:nz_struct + m_ub] = np.eye(m_ub)
            b[m_eq:m_eq + m_ub] = b_ub - A_ub @ offset
        for r, (k, width) in enumerate(upper_rows):
            row = m_eq + m_ub + r
            A[row, k] = 1.0
            A[row, nz_struct + m_ub + r] = 1.0
            b[row] = width
        self.A, self.b = A, b
        self.c = np.concatenate([c @ T, np.zeros(m_ub + m_up)])
        self.T, self.offset, self.nz_struct = T, offset, nz_struct

    def recover(self, z: np.ndarray) -> np.ndarray:
        return self.offset + self.T @ z[: self.nz_struct]


def _pivot(tab: np.ndarray, r: int, c: int) -> None:
    tab[r] /= tab[r, c]
    col = tab[:, c].copy()
    col[r] = 0.0
    tab -= col[:, None] * tab[r]


def _leaving(tab: np.ndarray, basis: list[int], c: int, bland: bool = True) -> int:
    """Ratio test.  Ties go to the smallest basic index under Bland's rule,
    otherwise to the largest pivot element."""
    column = tab[:-1, c]
    # entries this small relative to the tableau are round-off, not pivots
    thresh = PIVOT_TOL * max(1.0, float(np.abs(tab[:-1, :-1]).max(initial=0.0)))
    rows = (column > thresh).nonzero()[0]
    if rows.size == 0:
        return -1
    ratios = tab[rows, -1] / column[rows]
    best = ratios.min()
    ties = rows[ratios <= best + 1e-12 * (1.0 + abs(best))]
    if ties.size == 1:
        return int(ties[0])
    if bland:
        return int(min(ties, key=lambda i: basis[i]))
    return int(ties[np.argmax(column[ties])])


# consecutive degenerate pivots tolerated before strict Bland takes over
STALL_LIMIT = 50


def _bland(tab: np.ndarray, basis: list[int], n_cols: int, max_iter: int) -> int:
    """Pivot on ``tab`` in place until optimal; returns the pivot count.

    The entering column is always the lowest-index improving one.  Ratio
    ties prefer large pivots for stability; after ``STALL_LIMIT`` degenerate
    pivots in a row, ties switch to the smallest basic index (pure Bland,
    which cannot cycle) until the objective moves again.
    """
    it = 0
    stall = 0
    rc = tab[-1, :n_cols]   # a view, follows the pivots
    while True:
        entering = (rc < -FEAS_TOL).nonzero()[0]
        if entering.size == 0:
            return it
        c = int(entering[0])
        r = _leaving(tab, basis, c, bland=stall >= STALL_LIMIT)
        if r < 0:
            raise LPUnbounded(f"objective unbounded along column {c}")
        before = tab[-1, -1]
        _pivot(tab, r, c)
        basis[r] = c
        stall = stall + 1 if tab[-1, -1] == before else 0
        it += 1
        if it > max_iter:
            raise LPError(f"simplex exceeded {max_iter} pivots")


def _prefer_small_basis(tab: np.ndarray, basis: list[int], n_cols: int) -> int:
    """Among alternative optima move to a lexicographically smaller basis."""
    moves = 0
    changed = True
    while changed:
        changed = False
        basic = set(basis)
        for c in range(n_cols):
            if c in basic or abs(tab[-1, c]) > FEAS_TOL:
                continue
            r = _leaving(tab, basis, c)
            if r >= 0 and basis[r] > c:
                _pivot(tab, r, c)
                basis[r] = c
                moves += 1
                changed = True
                break
    return moves


def lp_solve(A, b, c, bounds=None, A_ub=None, b_ub=None, max_iter: int = 50_000) -> LPResult:
    """Minimize ``c @ x`` subject to ``A x = b``, ``A_ub x <= b_ub`` and per-variable
    ``bounds`` (``(lo, hi)`` pairs, ``None``/inf for open ends; default ``x >= 0``).

    Raises :class:`LPInfeasible` or :class:`LPUnbounded`.  Among several optimal
    bases the lexicographically smallest reachable one is returned.
    """
    c = np.asarray(c, dtype=float)
    n = c.size
    A = np.zeros((0, n)) if A is None else np.atleast_2d(np.asarray(A, dtype=float))
    b = np.zeros(0) if b is None else np.atleast_1d(np.asarray(b, dtype=float))
    A_ub = np.zeros((0, n)) if A_ub is None else np.atleast_2d(np.asarray(A_ub, dtype=float))
    b_ub = np.zeros(0) if b_ub is None else np.atleast_1d(np.asarray(b_ub, dtype=float))
    if A.shape != (b.size, n) or A_ub.shape != (b_ub.size, n):
        raise ValueError("inconsistent LP dimensions")
    if bounds is None:
        bounds = [(0.0, math.inf)] * n
    if len(bounds) != n:
        raise ValueError("bounds must have one entry per variable")

    sf = _StandardForm(c, A, b, A_ub, b_ub, bounds)
    As, bs = sf.A.copy(), sf.b.copy()
    m, nz = As.shape
    flip = np.where(bs < 0, -1.0, 1.0)
    As *= flip[:, None]
    bs *= flip

    # phase 1: artificial basis
    tab = np.zeros((m + 1, nz + m + 1))
    tab[:m, :nz] = As
    tab[:m, nz:nz + m] = np.eye(m)
    tab[:m, -1] = bs
    tab[-1, :nz] = -As.sum(axis=0)
    tab[-1, -1] = -bs.sum()
    basis = list(range(nz, nz + m))
    iters = _bland(tab, basis, nz + m, max_iter)

    scale = 1.0 + float(np.abs(bs).max(initial=0.0))
    if -tab[-1, -1] > FEAS_TOL * scale:
        y = (1.0 - tab[-1, nz:nz + m]) * flip
        raise LPInfeasible("constraints are infeasible", y, float(-tab[-1, -1]))

    # drive zero-level artificials out, dropping redundant rows
    keep = []
    for r in range(m):
        if basis[r] >= nz:
            entries = np.abs(tab[r, :nz])
            j = int(np.argmax(entries)) if nz else -1
            if j >= 0 and entries[j] > PIVOT_TOL:
                _pivot(tab, r, j)
                basis[r] = j
                keep.append(r)
        else:
            keep.append(r)
    tab = np.vstack([tab[keep][:, list(range(nz)) + [-1]], np.zeros((1, nz + 1))])
    basis = [basis[r] for r in keep]
    rows_kept = keep

    # phase 2 cost row
    tab[-1, :nz] = sf.c
    for r, j in enumerate(basis):
        if tab[-1, j] != 0.0:
            tab[-1] -= tab[-1, j] * tab[r]
    iters += _bland(tab, basis, nz, max_iter)
    iters += _prefer_small_basis(tab, basis, nz)

    z = np.zeros(nz)
    z[basis] = tab[:-1, -1]
    # refine basic values against the unpivoted data
    if basis:
        B = sf.A[rows_kept][:, basis]
        try:
            zb = np.linalg.solve(B, sf.b[rows_kept])
            if zb.min(initial=0.0) >= -FEAS_TOL:
                # values at round-off level are degenerate zeros
                zb[zb < 1e-12 * (1.0 + float(np.abs(sf.b).max(initial=0.0)))] = 0.0
                z[basis] = zb
        except np.linalg.LinAlgError:
            pass
    bad = np.abs(sf.A @ z - sf.b).max(initial=0.0)
    if bad > 1e-7 * (1.0 + float(np.abs(sf.b).max(initial=0.0))):
        raise LPError(f"simplex lost accuracy (residual {bad:.3g})")
    x = sf.recover(z)
    return LPResult(x=x, objective=float(c @ x), basis=tuple(sorted(basis)), iterations=iters)
