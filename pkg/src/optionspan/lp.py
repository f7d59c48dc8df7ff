"""Dense two-phase simplex with Bland's rule and explicit certificates.

Problems are given as optimize c.x subject to A x = b and per-variable lower
bounds (finite or minus infinity); callers encode inequalities through slack
variables.  Sizes here are tiny, so the solver favors reproducibility over
speed: dense tableau, Bland's entering and leaving rule always on, all
tolerances collected in one record, and no randomness anywhere, so identical
inputs produce bit-identical outputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import MalformedProgram, NumericalDegeneracy


@dataclass(frozen=True)
class SolverTolerances:
    pivot: float = 1e-10
    reduced_cost: float = 1e-10
    feasibility: float = 1e-9
    max_iterations: int = 100_000


DEFAULT_TOLERANCES = SolverTolerances()


@dataclass(frozen=True)
class LinearProgram:
    """optimize objective . x  s.t.  eq_matrix @ x = eq_rhs, x >= lower_bounds.

    A lower bound of -inf leaves the variable free.
    """

    objective: np.ndarray
    eq_matrix: np.ndarray
    eq_rhs: np.ndarray
    lower_bounds: np.ndarray
    maximize: bool = False

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.objective, dtype=float))
        A = np.asarray(self.eq_matrix, dtype=float)
        if A.ndim != 2:
            raise MalformedProgram(f"eq_matrix must be 2-D, got shape {A.shape}")
        b = np.atleast_1d(np.asarray(self.eq_rhs, dtype=float))
        lb = np.atleast_1d(np.asarray(self.lower_bounds, dtype=float))
        m, n = A.shape
        if len(c) != n or len(lb) != n or len(b) != m:
            raise MalformedProgram(
                f"inconsistent shapes: c={len(c)}, A={A.shape}, b={len(b)}, lb={len(lb)}"
            )
        if not np.all(np.isfinite(c)) or not np.all(np.isfinite(A)) or not np.all(
            np.isfinite(b)
        ):
            raise MalformedProgram("objective, matrix, and rhs must be finite")
        if np.any(np.isposinf(lb)) or np.any(np.isnan(lb)):
            raise MalformedProgram("lower bounds must be finite or -inf")
        object.__setattr__(self, "objective", c)
        object.__setattr__(self, "eq_matrix", A)
        object.__setattr__(self, "eq_rhs", b)
        object.__setattr__(self, "lower_bounds", lb)


@dataclass(frozen=True)
class LPResult:
    """Solve outcome.

    status "optimal" carries the primal vector; "infeasible" carries a
    Farkas row multiplier y with y.A <= 0 on bounded columns, y.A = 0 on
    free columns, and y.(b - A.lb_finite) > 0; "unbounded" carries an
    improving ray in the original variable space.
    """

    status: str
    value: float | None
    x: np.ndarray | None
    certificate: np.ndarray | None
    certificate_kind: str | None
    iterations: int


def _pivot(T: np.ndarray, basis: np.ndarray, row: int, col: int) -> None:
    T[row] /= T[row, col]
    factors = T[:, col].copy()
    factors[row] = 0.0
    T -= np.outer(factors, T[row])
    basis[row] = col


def _run_simplex(
    T: np.ndarray, basis: np.ndarray, n_allowed: int, tol: SolverTolerances
) -> tuple[str, int, int]:
    """Iterate a minimization tableau until optimal or unbounded.

    The last row holds reduced costs, the last column the rhs.  Returns
    (status, entering column or -1, iterations).
    """
    m = T.shape[0] - 1
    iterations = 0
    while True:
        iterations += 1
        if iterations > tol.max_iterations:
            raise NumericalDegeneracy("simplex iteration limit exceeded")
        enter = -1
        for j in range(n_allowed):
            if T[m, j] < -tol.reduced_cost:
                enter = j
                break
        if enter < 0:
            return "optimal", -1, iterations
        best_row = -1
        best_ratio = np.inf
        best_basis = -1
        for i in range(m):
            a = T[i, enter]
            if a > tol.pivot:
                rhs = max(T[i, -1], 0.0)
                ratio = rhs / a
                if ratio < best_ratio - 1e-15 or (
                    abs(ratio - best_ratio) <= 1e-15 and basis[i] < best_basis
                ):
                    best_row = i
                    best_ratio = ratio
                    best_basis = basis[i]
        if best_row < 0:
            return "unbounded", enter, iterations
        _pivot(T, basis, best_row, enter)


def solve(lp: LinearProgram, tol: SolverTolerances = DEFAULT_TOLERANCES) -> LPResult:
    """Two-phase simplex solve with certificates."""
    c0 = lp.objective.copy()
    A0 = lp.eq_matrix.copy()
    b0 = lp.eq_rhs.copy()
    lb = lp.lower_bounds
    m, n = A0.shape

    # Shift finite lower bounds to zero and split free variables.
    finite = np.isfinite(lb)
    shift = np.where(finite, lb, 0.0)
    b = b0 - A0 @ shift
    cols: list[np.ndarray] = []
    costs: list[float] = []
    col_map: list[tuple[int, float]] = []  # (original index, sign)
    for j in range(n):
        cols.append(A0[:, j])
        costs.append(c0[j])
        col_map.append((j, 1.0))
        if not finite[j]:
            cols.append(-A0[:, j])
            costs.append(-c0[j])
            col_map.append((j, -1.0))
    A = np.column_stack(cols) if cols else np.zeros((m, 0))
    c = np.asarray(costs)
    if lp.maximize:
        c = -c
    nt = A.shape[1]

    # Phase 1.
    flips = np.where(b < 0.0, -1.0, 1.0)
    A1 = A * flips[:, None]
    b1 = b * flips
    T = np.zeros((m + 1, nt + m + 1))
    T[:m, :nt] = A1
    T[:m, nt : nt + m] = np.eye(m)
    T[:m, -1] = b1
    basis = np.arange(nt, nt + m)
    # Reduced costs for min sum(artificials) with the artificial basis.
    T[m, :] = 0.0
    T[m, : nt] = -A1.sum(axis=0)
    T[m, -1] = -b1.sum()
    total_iterations = 0
    if m > 0:
        status, _, its = _run_simplex(T, basis, nt, tol)
        total_iterations += its
        if status != "optimal":
            raise NumericalDegeneracy("phase-1 tableau reported unbounded")
        phase1_value = -T[m, -1]
        scale = max(1.0, float(np.max(np.abs(b1))) if m else 1.0)
        if phase1_value > tol.feasibility * scale:
            # Farkas multipliers from the artificial reduced costs.
            y = (1.0 - T[m, nt : nt + m]) * flips
            return LPResult("infeasible", None, None, y, "farkas", total_iterations)
        # Drive artificials out of the basis; rows that cannot pivot on a
        # structural column are redundant and dropped.
        for i in range(m):
            if basis[i] >= nt:
                for j in range(nt):
                    if abs(T[i, j]) > tol.pivot:
                        _pivot(T, basis, i, j)
                        break
        keep_rows = [i for i in range(m) if basis[i] < nt]
        T = np.vstack([T[keep_rows], T[-1:]])
        basis = basis[keep_rows]
    else:
        T = np.zeros((1, nt + 1))
        basis = np.arange(0)

    # Phase 2 tableau: drop artificial columns, install the real objective.
    m2 = len(basis)
    T2 = np.zeros((m2 + 1, nt + 1))
    if m > 0:
        T2[:m2, :nt] = T[:m2, :nt]
        T2[:m2, -1] = T[:m2, -1]
    cost = c.copy().astype(float)
    rhs_cost = 0.0
    for i in range(m2):
        cb = c[basis[i]]
        if cb != 0.0:
            cost -= cb * T2[i, :nt]
            rhs_cost -= cb * T2[i, -1]
    T2[m2, :nt] = cost
    T2[m2, -1] = rhs_cost
    status, enter, its = _run_simplex(T2, basis, nt, tol)
    total_iterations += its

    if status == "unbounded":
        ray_t = np.zeros(nt)
        ray_t[enter] = 1.0
        for i in range(m2):
            ray_t[basis[i]] = -T2[i, enter]
        ray = np.zeros(n)
        for jt, (j, sign) in enumerate(col_map):
            ray[j] += sign * ray_t[jt]
        return LPResult("unbounded", None, None, ray, "ray", total_iterations)

    xt = np.zeros(nt)
    for i in range(m2):
        xt[basis[i]] = max(T2[i, -1], 0.0)
    x = shift.copy()
    for jt, (j, sign) in enumerate(col_map):
        x[j] += sign * xt[jt]
    value = float(np.dot(lp.objective, x))
    return LPResult("optimal", value, x, None, None, total_iterations)
