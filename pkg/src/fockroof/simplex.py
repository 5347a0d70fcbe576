"""Dense two-phase revised simplex for equality-form LPs with few rows.

The decomposition programs solved in this package have a handful of equality
rows (one per population plus normalization) and up to several hundred
thousand columns, so the cost of a pivot is dominated by pricing.  Pricing is
vectorized over column blocks (partial pricing, Dantzig rule within a block);
the basis inverse is kept dense and refactorized periodically.  Cycling at
degenerate vertices is handled by a lexicographic ratio test with a fallback
to Bland's rule after a run of degenerate pivots.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

DEFAULT_FEAS_TOL = 1e-9
DEFAULT_MAX_ITER = 200_000
DEFAULT_PRICING_BLOCK = 4096

_PIVOT_TOL = 1e-11
_REFACTOR_EVERY = 64
_BLAND_AFTER_STALLS = 50


class LpStatus(enum.Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"
    ITERATION_LIMIT = "IterationLimit"


@dataclass(frozen=True)
class StandardFormLp:
    """maximize objective·q  subject to  row_matrix·q = rhs,  q >= 0."""

    objective: np.ndarray
    row_matrix: np.ndarray
    rhs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.objective, dtype=float)
        a = np.asarray(self.row_matrix, dtype=float)
        b = np.asarray(self.rhs, dtype=float)
        if a.ndim != 2:
            raise ValueError("row_matrix must be 2-d")
        rows, cols = a.shape
        if c.shape != (cols,) or b.shape != (rows,):
            raise ValueError(
                f"shape mismatch: A is {a.shape}, c is {c.shape}, b is {b.shape}"
            )
        if rows > cols:
            raise ValueError(f"need at least as many columns as rows ({rows}x{cols})")
        for name, arr in (("objective", c), ("row_matrix", a), ("rhs", b)):
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} contains non-finite entries")
        object.__setattr__(self, "objective", c)
        object.__setattr__(self, "row_matrix", a)
        object.__setattr__(self, "rhs", b)

    @property
    def n_rows(self) -> int:
        return self.row_matrix.shape[0]

    @property
    def n_cols(self) -> int:
        return self.row_matrix.shape[1]


@dataclass(frozen=True)
class SparseVector:
    """Nonnegative primal point stored as (index, value) pairs."""

    size: int
    indices: np.ndarray
    values: np.ndarray

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.size)
        out[self.indices] = self.values
        return out

    @property
    def nnz(self) -> int:
        return self.indices.size


@dataclass(frozen=True)
class LpSolution:
    status: LpStatus
    objective_value: float
    primal: SparseVector
    basis: list[int]
    iterations: int


def _empty_primal(size: int) -> SparseVector:
    return SparseVector(size, np.empty(0, dtype=np.intp), np.empty(0))


class _Tableau:
    """Mutable simplex state: basis, dense basis inverse and basic values."""

    def __init__(self, a, b, basis):
        self.a = a
        self.b = b
        self.basis = basis
        self.refactor()

    def refactor(self):
        self.b_inv = np.linalg.inv(self.a[:, self.basis])
        self.x_b = np.maximum(self.b_inv @ self.b, 0.0)

    def pivot(self, entering: int, leaving_row: int, w: np.ndarray):
        piv = w[leaving_row]
        step = self.x_b[leaving_row] / piv
        self.x_b -= step * w
        self.x_b[leaving_row] = step
        np.maximum(self.x_b, 0.0, out=self.x_b)
        row = self.b_inv[leaving_row] / piv
        self.b_inv -= np.outer(w, row)
        self.b_inv[leaving_row] = row
        self.basis[leaving_row] = entering
        return step


def _price_block(c, a, y, lo, hi):
    return c[lo:hi] - y @ a[:, lo:hi]


def _choose_entering(c, a, y, cursor, block, tol, bland):
    """Return (entering index or -1, new cursor).

    Partial pricing: scan fixed-size column blocks starting at ``cursor`` and
    take the best reduced cost in the first block containing one above
    ``tol``.  Under Bland's rule the whole column range is scanned and the
    smallest eligible index wins.
    """
    n = a.shape[1]
    if bland:
        d = c - y @ a
        eligible = np.nonzero(d > tol)[0]
        if eligible.size == 0:
            return -1, cursor
        return int(eligible[0]), cursor
    start = cursor
    while True:
        lo = cursor
        hi = min(lo + block, n)
        d = _price_block(c, a, y, lo, hi)
        j = int(np.argmax(d))
        if d[j] > tol:
            return lo + j, cursor
        cursor = hi if hi < n else 0
        if cursor == start:
            return -1, cursor


def _choose_leaving(tab: _Tableau, w, bland):
    """Ratio test.  Ties break lexicographically on rows of [x_B | B^-1],
    or by smallest basis index under Bland's rule."""
    cand = np.nonzero(w > _PIVOT_TOL)[0]
    if cand.size == 0:
        return -1
    ratios = tab.x_b[cand] / w[cand]
    rmin = float(ratios.min())
    sel = cand[ratios <= rmin + 1e-12]
    if sel.size == 1:
        return int(sel[0])
    if bland:
        basis_arr = np.asarray(tab.basis)
        return int(sel[np.argmin(basis_arr[sel])])
    for col in range(tab.b_inv.shape[1]):
        vals = tab.b_inv[sel, col] / w[sel]
        sel = sel[vals <= vals.min() + 1e-14]
        if sel.size == 1:
            break
    return int(sel[0])


class _IterationBudget:
    def __init__(self, limit):
        self.limit = limit
        self.used = 0

    def exhausted(self) -> bool:
        return self.used >= self.limit


def _run_phase(tab: _Tableau, c, tol, block, budget: _IterationBudget):
    """Iterate to optimality of c over the current feasible basis.

    Returns "optimal", "unbounded" or "iter_limit".
    """
    bland = False
    stalls = 0
    cursor = 0
    since_refactor = 0
    while True:
        if budget.exhausted():
            return "iter_limit"
        y = tab.b_inv.T @ c[tab.basis]
        entering, cursor = _choose_entering(c, tab.a, y, cursor, block, tol, bland)
        if entering < 0:
            return "optimal"
        w = tab.b_inv @ tab.a[:, entering]
        leaving = _choose_leaving(tab, w, bland)
        if leaving < 0:
            return "unbounded"
        step = tab.pivot(entering, leaving, w)
        budget.used += 1
        since_refactor += 1
        if step <= 1e-13:
            stalls += 1
            if stalls >= _BLAND_AFTER_STALLS:
                bland = True
        else:
            stalls = 0
        if since_refactor >= _REFACTOR_EVERY:
            tab.refactor()
            since_refactor = 0


def _drive_out_artificials(tab: _Tableau, n_struct: int):
    """Pivot zero-level artificial variables out of the basis.

    Rows whose artificial cannot be replaced by any structural column are
    linearly dependent on the rest and are dropped.
    """
    drop = []
    for r in range(len(tab.basis)):
        if tab.basis[r] < n_struct:
            continue
        row = tab.b_inv[r] @ tab.a[:, :n_struct]
        in_basis = set(tab.basis)
        candidates = np.nonzero(np.abs(row) > 1e-8)[0]
        entering = next((int(j) for j in candidates if j not in in_basis), -1)
        if entering >= 0:
            w = tab.b_inv @ tab.a[:, entering]
            tab.pivot(entering, r, w)
        else:
            drop.append(r)
    if drop:
        keep = [r for r in range(len(tab.basis)) if r not in drop]
        tab.a = tab.a[keep]
        tab.b = tab.b[keep]
        tab.b_inv = None
        tab.basis = [tab.basis[r] for r in keep]
        tab.refactor()


def solve(
    lp: StandardFormLp,
    feas_tol: float = DEFAULT_FEAS_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    pricing_block: int = DEFAULT_PRICING_BLOCK,
) -> LpSolution:
    """Solve the LP with a two-phase revised simplex.

    Deterministic for fixed inputs: pricing scans blocks in a fixed order and
    all tie-breaking is index-based, so repeated calls return the same basis.
    """
    if feas_tol <= 0:
        raise ValueError("feas_tol must be positive")
    if max_iter <= 0:
        raise ValueError("max_iter must be positive")
    if pricing_block <= 0:
        raise ValueError("pricing_block must be positive")

    rows, cols = lp.n_rows, lp.n_cols
    a = lp.row_matrix.copy()
    b = lp.rhs.copy()
    flip = b < 0
    a[flip] *= -1.0
    b[flip] *= -1.0

    budget = _IterationBudget(max_iter)

    # Phase 1: artificial variables on every row, maximize minus their sum.
    a_ext = np.hstack([a, np.eye(rows)])
    c_phase1 = np.concatenate([np.zeros(cols), -np.ones(rows)])
    tab = _Tableau(a_ext, b, list(range(cols, cols + rows)))
    outcome = _run_phase(tab, c_phase1, feas_tol, pricing_block, budget)
    if outcome == "iter_limit":
        return _finish(lp, tab, cols, budget, LpStatus.ITERATION_LIMIT)
    artificial_mass = sum(
        tab.x_b[r] for r in range(len(tab.basis)) if tab.basis[r] >= cols
    )
    if artificial_mass > feas_tol:
        return LpSolution(
            LpStatus.INFEASIBLE, float("nan"), _empty_primal(cols), list(tab.basis), budget.used
        )
    _drive_out_artificials(tab, cols)

    # Phase 2 runs on structural columns only.
    tab.a = tab.a[:, :cols]
    tab.refactor()
    c_phase2 = lp.objective
    outcome = _run_phase(tab, c_phase2, feas_tol, pricing_block, budget)
    if outcome == "unbounded":
        return LpSolution(
            LpStatus.UNBOUNDED, float("inf"), _empty_primal(cols), list(tab.basis), budget.used
        )
    status = LpStatus.OPTIMAL if outcome == "optimal" else LpStatus.ITERATION_LIMIT
    return _finish(lp, tab, cols, budget, status)


def _finish(lp, tab, n_struct, budget, status) -> LpSolution:
    tab.refactor()
    order = np.argsort(tab.basis, kind="stable")
    idx, vals = [], []
    for r in order:
        j = tab.basis[r]
        if j < n_struct:
            idx.append(j)
            vals.append(max(tab.x_b[r], 0.0))
    primal = SparseVector(n_struct, np.asarray(idx, dtype=np.intp), np.asarray(vals))
    obj = float(lp.objective[primal.indices] @ primal.values) if primal.nnz else 0.0
    return LpSolution(status, obj, primal, list(tab.basis), budget.used)


def residuals(lp: StandardFormLp, solution: LpSolution) -> tuple[float, float]:
    """(inf-norm of A·q - b, most negative primal entry, clamped to <= 0).

    Both magnitudes lie within the feasibility tolerance for an Optimal
    solution.
    """
    q = solution.primal
    ax = lp.row_matrix[:, q.indices] @ q.values if q.nnz else np.zeros(lp.n_rows)
    eq = float(np.max(np.abs(ax - lp.rhs))) if lp.n_rows else 0.0
    neg = float(min(0.0, q.values.min())) if q.nnz else 0.0
    return eq, neg


def write_lp(lp: StandardFormLp, path) -> None:
    """Dump the program in the plain-text interchange format.

    Line 1: ``rows=<R> cols=<C>``.  Line 2: the C objective coefficients.
    Lines 3..R+2: the C coefficients of each equality row followed by its
    right-hand side.  All numbers use 17 significant digits.
    """
    def fmt(values):
        return " ".join(f"{v:.17g}" for v in values)

    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"rows={lp.n_rows} cols={lp.n_cols}\n")
        fh.write(fmt(lp.objective) + "\n")
        for r in range(lp.n_rows):
            fh.write(fmt(lp.row_matrix[r]) + " " + f"{lp.rhs[r]:.17g}" + "\n")


def read_lp(path) -> StandardFormLp:
    """Parse a file written by :func:`write_lp`."""
    with open(path, encoding="ascii") as fh:
        header = fh.readline().split()
        rows = int(header[0].split("=")[1])
        cols = int(header[1].split("=")[1])
        c = np.array([float(t) for t in fh.readline().split()])
        a = np.empty((rows, cols))
        b = np.empty(rows)
        for r in range(rows):
            parts = [float(t) for t in fh.readline().split()]
            a[r] = parts[:cols]
            b[r] = parts[cols]
    return StandardFormLp(objective=c, row_matrix=a, rhs=b)
