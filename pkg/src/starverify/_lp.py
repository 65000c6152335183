"""Self-contained linear programming over box-bounded variables.

Every bound query, emptiness check, and membership test in this package
funnels into :func:`solve`. The solver is a dense two-phase simplex for

    minimize / maximize   objective @ x
    subject to            ineq_matrix @ x <= ineq_rhs
                          var_lower <= x <= var_upper

with variable bounds handled natively (nonbasic variables rest at a finite
bound instead of being shifted to zero). Problems here are tiny: a few
hundred variables, a few hundred rows. Entering variables are picked by
largest reduced-cost violation; after a run of degenerate steps the solver
switches to Bland's smallest-index rule, which guarantees termination, so
cycling bases cannot hang. Tolerances are fixed constants on purpose:
callers and tests rely on them being stable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._exceptions import DimensionError, SolverError
from ._validation import as_matrix, as_vector

FEASIBILITY_TOL = 1e-7
OPTIMALITY_TOL = 1e-9

_RATIO_TINY = 1e-11
_DEGENERATE_STEP = 1e-12
_STALL_LIMIT = 50

_AT_LOWER, _AT_UPPER, _FREE, _BASIC = 0, 1, 2, 3


def _as_bounds(x, name: str, m: int) -> np.ndarray:
    arr = np.array(x, dtype=np.float64, copy=True)
    if arr.ndim != 1:
        raise DimensionError(name, f"expected a 1-D array, got shape {arr.shape}")
    if arr.shape[0] != m:
        raise DimensionError(name, f"expected length {m}, got {arr.shape[0]}")
    if np.any(np.isnan(arr)):
        raise DimensionError(name, "contains NaN entries")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class LinearProgram:
    """Inequality-and-box form linear program (rows encode ``Cx <= d``)."""

    objective: np.ndarray
    sense: str
    ineq_matrix: np.ndarray
    ineq_rhs: np.ndarray
    var_lower: np.ndarray
    var_upper: np.ndarray

    def __post_init__(self):
        objective = as_vector(self.objective, "objective")
        matrix = as_matrix(self.ineq_matrix, "ineq_matrix")
        rhs = as_vector(self.ineq_rhs, "ineq_rhs")
        m = objective.shape[0]
        if self.sense not in ("minimize", "maximize"):
            raise DimensionError("sense", f"must be 'minimize' or 'maximize', got {self.sense!r}")
        if matrix.shape[1] != m:
            raise DimensionError(
                "ineq_matrix", f"expected {m} columns to match objective, got {matrix.shape[1]}"
            )
        if rhs.shape[0] != matrix.shape[0]:
            raise DimensionError(
                "ineq_rhs", f"expected length {matrix.shape[0]} to match ineq_matrix rows, got {rhs.shape[0]}"
            )
        lower = _as_bounds(self.var_lower, "var_lower", m)
        upper = _as_bounds(self.var_upper, "var_upper", m)
        object.__setattr__(self, "objective", objective)
        object.__setattr__(self, "ineq_matrix", matrix)
        object.__setattr__(self, "ineq_rhs", rhs)
        object.__setattr__(self, "var_lower", lower)
        object.__setattr__(self, "var_upper", upper)

    @property
    def n_vars(self) -> int:
        return self.objective.shape[0]


@dataclass(frozen=True)
class LpSolution:
    """Outcome of a solve; `value` and `point` are set only when optimal."""

    status: str  # "optimal" | "infeasible" | "unbounded"
    value: float | None = None
    point: np.ndarray | None = None


def _solve_box_only(c, lower, upper):
    """Closed-form optimum when there are no inequality rows."""
    x = np.empty_like(c)
    for j in range(c.shape[0]):
        if c[j] > 0.0:
            if not np.isfinite(lower[j]):
                return "unbounded", None
            x[j] = lower[j]
        elif c[j] < 0.0:
            if not np.isfinite(upper[j]):
                return "unbounded", None
            x[j] = upper[j]
        elif np.isfinite(lower[j]):
            x[j] = lower[j]
        elif np.isfinite(upper[j]):
            x[j] = upper[j]
        else:
            x[j] = 0.0
    return "optimal", x


class _Tableau:
    """Dense simplex state over structural + slack + artificial columns."""

    def __init__(self, c, A, b, lower, upper):
        p, m = A.shape
        self.m = m

        # Initial nonbasic placement: a finite bound if one exists.
        x_status = np.empty(m, dtype=np.int8)
        x_vals = np.empty(m)
        for j in range(m):
            if np.isfinite(lower[j]):
                x_status[j] = _AT_LOWER
                x_vals[j] = lower[j]
            elif np.isfinite(upper[j]):
                x_status[j] = _AT_UPPER
                x_vals[j] = upper[j]
            else:
                x_status[j] = _FREE
                x_vals[j] = 0.0

        slack0 = b - A @ x_vals
        violated = slack0 < 0.0
        k = int(np.count_nonzero(violated))
        n_cols = m + p + k

        T = np.zeros((p, n_cols))
        T[:, :m] = A
        T[:, m : m + p] = np.eye(p)
        art_cols = np.arange(m + p, n_cols)
        vrows = np.nonzero(violated)[0]
        for col, row in zip(art_cols, vrows):
            T[row, col] = -1.0
        tb = b.astype(np.float64, copy=True)
        # Flip violated rows so the starting basis columns read +1.
        T[vrows] *= -1.0
        tb[vrows] *= -1.0

        self.T = T
        self.tb = tb
        self.lower = np.concatenate([lower, np.zeros(p + k)])
        self.upper = np.concatenate([upper, np.full(p + k, np.inf)])
        self.status = np.concatenate(
            [x_status, np.full(p, _BASIC, dtype=np.int8), np.full(k, _BASIC, dtype=np.int8)]
        )
        self.status[m + vrows] = _AT_LOWER
        self.vals = np.concatenate([x_vals, np.zeros(p + k)])
        basis = np.arange(m, m + p)
        basis[vrows] = art_cols
        self.basis = basis
        self.art_cols = art_cols

    def refresh_basic_values(self):
        nb_vals = np.where(self.status == _BASIC, 0.0, self.vals)
        self.vals[self.basis] = self.tb - self.T @ nb_vals

    def pivot(self, row: int, col: int):
        T, tb = self.T, self.tb
        piv = T[row, col]
        T[row] /= piv
        tb[row] /= piv
        factors = T[:, col].copy()
        factors[row] = 0.0
        T -= np.outer(factors, T[row])
        tb -= factors * tb[row]
        T[:, col] = 0.0
        T[row, col] = 1.0

    def iterate(self, cost, banned, max_iters):
        """Run simplex steps until optimal or unbounded for `cost`."""
        use_bland = False
        stall = 0
        for _ in range(max_iters):
            self.refresh_basic_values()
            status, vals, basis, T = self.status, self.vals, self.basis, self.T

            reduced = cost - cost[basis] @ T
            favorable = (
                ((status == _AT_LOWER) & (reduced < -OPTIMALITY_TOL))
                | ((status == _AT_UPPER) & (reduced > OPTIMALITY_TOL))
                | ((status == _FREE) & (np.abs(reduced) > OPTIMALITY_TOL))
            )
            favorable &= ~banned
            candidates = np.nonzero(favorable)[0]
            if candidates.size == 0:
                return "optimal"
            if use_bland:
                q = int(candidates[0])
            else:
                q = int(candidates[np.argmax(np.abs(reduced[candidates]))])
            if status[q] == _AT_UPPER or (status[q] == _FREE and reduced[q] > 0.0):
                sigma = -1.0
            else:
                sigma = 1.0

            # Ratio test against every basic variable's blocking bound.
            delta = -sigma * T[:, q]
            v_basic = vals[basis]
            lo_basic = self.lower[basis]
            up_basic = self.upper[basis]
            with np.errstate(divide="ignore", invalid="ignore"):
                hits_lower = (delta < -_RATIO_TINY) & np.isfinite(lo_basic)
                hits_upper = (delta > _RATIO_TINY) & np.isfinite(up_basic)
                t_rows = np.where(
                    hits_lower,
                    (v_basic - lo_basic) / np.where(hits_lower, -delta, 1.0),
                    np.inf,
                )
                t_up = np.where(
                    hits_upper,
                    (up_basic - v_basic) / np.where(hits_upper, delta, 1.0),
                    np.inf,
                )
            t_rows = np.minimum(np.maximum(t_rows, 0.0), np.maximum(t_up, 0.0))
            t_basic = float(t_rows.min()) if t_rows.size else np.inf

            if sigma > 0:
                t_own = self.upper[q] - vals[q]
            else:
                t_own = vals[q] - self.lower[q]
            if not np.isfinite(t_own):
                t_own = np.inf

            t_step = min(t_basic, t_own)
            if not np.isfinite(t_step):
                return "unbounded"

            if t_step <= _DEGENERATE_STEP:
                stall += 1
                if stall > _STALL_LIMIT:
                    use_bland = True
            else:
                stall = 0

            if t_own <= t_basic:
                # Bound flip: the entering variable crosses its own box.
                vals[q] = self.upper[q] if sigma > 0 else self.lower[q]
                status[q] = _AT_UPPER if sigma > 0 else _AT_LOWER
                continue

            tie = t_rows <= t_step + _RATIO_TINY
            tie_rows = np.nonzero(tie)[0]
            if use_bland:
                row = int(tie_rows[np.argmin(basis[tie_rows])])
            else:
                row = int(tie_rows[np.argmax(np.abs(T[tie_rows, q]))])
            leaving = int(basis[row])
            vals[q] = vals[q] + sigma * t_step
            if delta[row] < 0.0:
                vals[leaving] = self.lower[leaving]
                status[leaving] = _AT_LOWER
            else:
                vals[leaving] = self.upper[leaving]
                status[leaving] = _AT_UPPER
            status[q] = _BASIC
            basis[row] = q
            self.pivot(row, q)
        raise SolverError("simplex did not converge within the iteration cap")

    def drive_out_artificials(self, banned):
        """Pivot basic artificials to zero columns, dropping redundant rows."""
        art_set = set(int(a) for a in self.art_cols)
        n_real = self.T.shape[1] - self.art_cols.shape[0]  # structural + slack
        drop_rows = []
        for row in range(self.basis.shape[0]):
            if int(self.basis[row]) not in art_set:
                continue
            pivot_col = -1
            row_coeffs = self.T[row]
            for j in range(n_real):
                if banned[j] or self.status[j] == _BASIC:
                    continue
                if abs(row_coeffs[j]) > 1e-9:
                    pivot_col = j
                    break
            if pivot_col >= 0:
                leaving = int(self.basis[row])
                self.status[leaving] = _AT_LOWER
                self.vals[leaving] = 0.0
                self.status[pivot_col] = _BASIC
                self.basis[row] = pivot_col
                self.pivot(row, pivot_col)
            else:
                drop_rows.append(row)
        if drop_rows:
            for row in drop_rows:
                leaving = int(self.basis[row])
                self.status[leaving] = _AT_LOWER
                self.vals[leaving] = 0.0
            keep = np.setdiff1d(np.arange(self.basis.shape[0]), np.array(drop_rows))
            self.T = self.T[keep]
            self.tb = self.tb[keep]
            self.basis = self.basis[keep]


def _bounded_simplex(c, A, b, lower, upper):
    """Minimize ``c @ x`` over ``A x <= b``, ``lower <= x <= upper``."""
    p, m = A.shape

    if np.any(lower > upper):
        return "infeasible", None
    if m == 0:
        if p == 0 or np.all(b >= -FEASIBILITY_TOL):
            return "optimal", np.zeros(0)
        return "infeasible", None
    if p == 0:
        return _solve_box_only(c, lower, upper)

    tab = _Tableau(c, A, b, lower, upper)
    n_cols = tab.T.shape[1]
    max_iters = 2000 + 40 * (n_cols + p)

    if tab.art_cols.size:
        phase1_cost = np.zeros(n_cols)
        phase1_cost[tab.art_cols] = 1.0
        banned = np.zeros(n_cols, dtype=bool)
        outcome = tab.iterate(phase1_cost, banned, max_iters)
        if outcome == "unbounded":
            raise SolverError("phase-1 objective reported unbounded")
        tab.refresh_basic_values()
        infeasibility = float(tab.vals[tab.art_cols].sum())
        if infeasibility > FEASIBILITY_TOL:
            return "infeasible", None
        banned[tab.art_cols] = True
        tab.drive_out_artificials(banned)
    else:
        banned = np.zeros(n_cols, dtype=bool)

    full_cost = np.zeros(n_cols)
    full_cost[:m] = c
    banned = banned.copy()
    banned[tab.art_cols] = True
    outcome = tab.iterate(full_cost, banned, max_iters)
    if outcome == "unbounded":
        return "unbounded", None
    tab.refresh_basic_values()
    x = np.clip(tab.vals[:m], lower, upper)
    return "optimal", x


def solve(lp: LinearProgram) -> LpSolution:
    """Solve a :class:`LinearProgram`; never raises for infeasible/unbounded."""
    c = lp.objective
    if lp.sense == "maximize":
        c = -c
    status, x = _bounded_simplex(c, lp.ineq_matrix, lp.ineq_rhs, lp.var_lower, lp.var_upper)
    if status != "optimal":
        return LpSolution(status=status)
    value = float(lp.objective @ x)
    x = x.copy()
    x.flags.writeable = False
    return LpSolution(status="optimal", value=value, point=x)


def feasible_point(
    ineq_matrix,
    ineq_rhs,
    eq_matrix=None,
    eq_rhs=None,
    var_lower=None,
    var_upper=None,
) -> np.ndarray | None:
    """Find any point of ``{x | Cx <= d, Ex = f, l <= x <= u}`` or None.

    Equality rows are split into a <=/>= pair and resolved by the shared
    phase-1 machinery; "no point" means the phase-1 optimum stayed above
    the feasibility tolerance.
    """
    matrix = as_matrix(ineq_matrix, "ineq_matrix")
    rhs = as_vector(ineq_rhs, "ineq_rhs")
    m = matrix.shape[1]
    if rhs.shape[0] != matrix.shape[0]:
        raise DimensionError("ineq_rhs", f"expected length {matrix.shape[0]}, got {rhs.shape[0]}")
    if eq_matrix is not None and np.size(eq_matrix):
        eq_m = as_matrix(eq_matrix, "eq_matrix")
        eq_r = as_vector(eq_rhs, "eq_rhs")
        if eq_m.shape[1] != m:
            raise DimensionError("eq_matrix", f"expected {m} columns, got {eq_m.shape[1]}")
        if eq_r.shape[0] != eq_m.shape[0]:
            raise DimensionError("eq_rhs", f"expected length {eq_m.shape[0]}, got {eq_r.shape[0]}")
        matrix = np.vstack([matrix, eq_m, -eq_m])
        rhs = np.concatenate([rhs, eq_r, -eq_r])
    lower = _as_bounds(
        var_lower if var_lower is not None else np.full(m, -np.inf), "var_lower", m
    )
    upper = _as_bounds(
        var_upper if var_upper is not None else np.full(m, np.inf), "var_upper", m
    )
    status, x = _bounded_simplex(np.zeros(m), matrix, rhs, lower, upper)
    return x if status == "optimal" else None
