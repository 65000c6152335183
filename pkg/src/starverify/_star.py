"""Star sets over signal space and their geometric operations.

A star is the set ``{c + V @ a | C a <= d, lo <= a <= hi}``: an anchor
signal ``c``, generator signals as columns of ``V``, and a linear predicate
over the combination coefficients ``a``. Zero generators (a single point)
and zero predicate rows (a pure box) are both legal and exercised
throughout. Instances are immutable; every operation returns a new star and
affine maps share the predicate arrays of their input.

Coordinate bound queries go through the LP solver so they are exact within
solver tolerance; the cheaper interval estimate (`interval_ranges`) ignores
the predicate rows and is only sound as a pre-filter.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._exceptions import (
    DimensionError,
    EmptySetError,
    RejectionBudgetError,
    UnboundedSetError,
)
from ._lp import FEASIBILITY_TOL, LinearProgram, feasible_point, solve
from ._rng import Xoshiro256StarStar
from ._validation import as_matrix, as_vector, check_index

_REJECTION_BUDGET = 1_000_000


class SolveCounter:
    """Mutable tally of LP solves, threaded through bound queries."""

    __slots__ = ("count",)

    def __init__(self):
        self.count = 0

    def bump(self, n: int = 1):
        self.count += n


@dataclass(frozen=True)
class Bounds:
    """Elementwise lower/upper bounds on a signal."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = as_vector(self.lower, "lower", require_finite=False)
        upper = as_vector(self.upper, "upper", require_finite=False)
        if lower.shape[0] != upper.shape[0]:
            raise DimensionError("upper", f"expected length {lower.shape[0]}, got {upper.shape[0]}")
        if np.any(lower > upper + 1e-9):
            raise DimensionError("lower", "lower bound exceeds upper bound")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def dim(self) -> int:
        return self.lower.shape[0]

    def contains_point(self, x, tol: float = 1e-9) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.lower - tol) and np.all(x <= self.upper + tol))


def _as_alpha_bound(x, name, m):
    arr = np.array(x, dtype=np.float64, copy=True)
    if arr.ndim != 1 or arr.shape[0] != m:
        raise DimensionError(name, f"expected length {m}, got shape {arr.shape}")
    if np.any(np.isnan(arr)):
        raise DimensionError(name, "contains NaN entries")
    arr.flags.writeable = False
    return arr


class SignalStar:
    """Star set ``{center + basis @ a | pred}`` in n-dimensional signal space."""

    def __init__(self, center, basis, pred_matrix=None, pred_rhs=None,
                 pred_lower=None, pred_upper=None):
        center = as_vector(center, "center")
        basis = as_matrix(basis, "basis")
        if basis.shape[0] != center.shape[0]:
            raise DimensionError(
                "basis", f"expected {center.shape[0]} rows to match center, got {basis.shape[0]}"
            )
        m = basis.shape[1]
        if pred_matrix is None:
            pred_matrix = np.zeros((0, m))
        pred_matrix = as_matrix(pred_matrix, "pred_matrix")
        if pred_matrix.shape[1] != m:
            raise DimensionError(
                "pred_matrix", f"expected {m} columns to match basis, got {pred_matrix.shape[1]}"
            )
        if pred_rhs is None:
            pred_rhs = np.zeros(pred_matrix.shape[0])
        pred_rhs = as_vector(pred_rhs, "pred_rhs")
        if pred_rhs.shape[0] != pred_matrix.shape[0]:
            raise DimensionError(
                "pred_rhs", f"expected length {pred_matrix.shape[0]}, got {pred_rhs.shape[0]}"
            )
        if pred_lower is None:
            pred_lower = np.full(m, -1.0)
        if pred_upper is None:
            pred_upper = np.full(m, 1.0)
        pred_lower = _as_alpha_bound(pred_lower, "pred_lower", m)
        pred_upper = _as_alpha_bound(pred_upper, "pred_upper", m)

        self.center = center
        self.basis = basis
        self.pred_matrix = pred_matrix
        self.pred_rhs = pred_rhs
        self.pred_lower = pred_lower
        self.pred_upper = pred_upper
        # An inverted coefficient box marks the star empty at construction.
        self._box_empty = bool(np.any(pred_lower > pred_upper))

    @property
    def dim(self) -> int:
        return self.center.shape[0]

    @property
    def n_generators(self) -> int:
        return self.basis.shape[1]

    @property
    def n_constraints(self) -> int:
        return self.pred_matrix.shape[0]

    def __repr__(self):
        return (
            f"SignalStar(dim={self.dim}, generators={self.n_generators}, "
            f"constraints={self.n_constraints})"
        )

    # -- construction helpers ------------------------------------------------

    def _replace_geometry(self, center, basis) -> "SignalStar":
        """New star with the same predicate but different center/basis."""
        star = SignalStar.__new__(SignalStar)
        center = np.asarray(center, dtype=float)
        basis = np.asarray(basis, dtype=float)
        center.flags.writeable = False
        basis.flags.writeable = False
        star.center = center
        star.basis = basis
        star.pred_matrix = self.pred_matrix
        star.pred_rhs = self.pred_rhs
        star.pred_lower = self.pred_lower
        star.pred_upper = self.pred_upper
        star._box_empty = self._box_empty
        return star

    # -- geometry ------------------------------------------------------------

    def affine_map(self, weights, bias) -> "SignalStar":
        """Image under ``x -> W x + b``; the predicate is shared, not copied."""
        weights = as_matrix(weights, "weights")
        bias = as_vector(bias, "bias")
        if weights.shape[1] != self.dim:
            raise DimensionError(
                "weights", f"expected {self.dim} columns to match star dimension, got {weights.shape[1]}"
            )
        if bias.shape[0] != weights.shape[0]:
            raise DimensionError(
                "bias", f"expected length {weights.shape[0]}, got {bias.shape[0]}"
            )
        return self._replace_geometry(weights @ self.center + bias, weights @ self.basis)

    def add_state_halfspace(self, normal, rhs: float) -> "SignalStar":
        """Intersect with ``{x | normal @ x <= rhs}`` in predicate space."""
        normal = as_vector(normal, "normal")
        if normal.shape[0] != self.dim:
            raise DimensionError(
                "normal", f"expected length {self.dim} to match star dimension, got {normal.shape[0]}"
            )
        row = normal @ self.basis
        offset = float(rhs) - float(normal @ self.center)
        star = SignalStar.__new__(SignalStar)
        star.center = self.center
        star.basis = self.basis
        pred_matrix = np.vstack([self.pred_matrix, row[None, :]])
        pred_rhs = np.concatenate([self.pred_rhs, [offset]])
        pred_matrix.flags.writeable = False
        pred_rhs.flags.writeable = False
        star.pred_matrix = pred_matrix
        star.pred_rhs = pred_rhs
        star.pred_lower = self.pred_lower
        star.pred_upper = self.pred_upper
        star._box_empty = self._box_empty
        return star

    # -- queries -------------------------------------------------------------

    def interval_ranges(self) -> Bounds:
        """Sound coordinate intervals from the coefficient box alone.

        Ignores predicate rows (dropping constraints only widens), so this
        is a pre-filter, not a substitute for `get_range`.
        """
        with np.errstate(invalid="ignore"):
            low_term = np.where(self.basis != 0.0, self.basis * self.pred_lower[None, :], 0.0)
            high_term = np.where(self.basis != 0.0, self.basis * self.pred_upper[None, :], 0.0)
        lo = self.center + np.minimum(low_term, high_term).sum(axis=1)
        hi = self.center + np.maximum(low_term, high_term).sum(axis=1)
        return Bounds(lower=lo, upper=hi)

    def _range_lp(self, objective, sense):
        return LinearProgram(
            objective=objective,
            sense=sense,
            ineq_matrix=self.pred_matrix,
            ineq_rhs=self.pred_rhs,
            var_lower=self.pred_lower,
            var_upper=self.pred_upper,
        )

    def get_range(self, index: int, counter: SolveCounter | None = None):
        """Exact (min, max) of coordinate `index` over the star, via two LPs."""
        index = check_index(index, self.dim, "index")
        if self._box_empty:
            raise EmptySetError("cannot query coordinate range of an empty star")
        row = self.basis[index]
        results = []
        for sense in ("minimize", "maximize"):
            sol = solve(self._range_lp(row, sense))
            if counter is not None:
                counter.bump()
            if sol.status == "infeasible":
                raise EmptySetError("cannot query coordinate range of an empty star")
            if sol.status == "unbounded":
                raise UnboundedSetError(
                    f"coordinate {index} is unbounded: predicate box has no finite bound "
                    "along some generator"
                )
            results.append(self.center[index] + sol.value)
        lo, hi = results
        return float(lo), float(hi)

    def get_ranges(self, counter: SolveCounter | None = None) -> Bounds:
        """Exact bounds for every coordinate (2n LP solves)."""
        lows = np.empty(self.dim)
        highs = np.empty(self.dim)
        for i in range(self.dim):
            lows[i], highs[i] = self.get_range(i, counter)
        return Bounds(lower=lows, upper=highs)

    def is_empty(self, counter: SolveCounter | None = None) -> bool:
        if self._box_empty:
            return True
        if self.n_constraints == 0:
            return False
        point = feasible_point(
            self.pred_matrix, self.pred_rhs, None, None, self.pred_lower, self.pred_upper
        )
        if counter is not None:
            counter.bump()
        return point is None

    def contains(self, x, tol: float = FEASIBILITY_TOL,
                 counter: SolveCounter | None = None) -> bool:
        """Whether some feasible coefficient reproduces `x` within `tol`."""
        x = as_vector(x, "x")
        if x.shape[0] != self.dim:
            raise DimensionError("x", f"expected length {self.dim}, got {x.shape[0]}")
        if self._box_empty:
            return False
        gap = x - self.center
        rows = np.vstack([self.pred_matrix, self.basis, -self.basis])
        rhs = np.concatenate([self.pred_rhs, gap + tol, -gap + tol])
        point = feasible_point(rows, rhs, None, None, self.pred_lower, self.pred_upper)
        if counter is not None:
            counter.bump()
        return point is not None

    def sample(self, count: int, seed: int) -> np.ndarray:
        """`count` member signals, by rejection sampling the coefficient box.

        Deterministic for a fixed seed. Raises after 10**6 consecutive
        rejections; that signals a thin set where LP vertices are the
        better fallback.
        """
        if count < 0:
            raise DimensionError("count", "must be nonnegative")
        if self.is_empty():
            raise EmptySetError("cannot sample from an empty star")
        m = self.n_generators
        if m == 0:
            return np.tile(self.center, (count, 1))
        if not (np.all(np.isfinite(self.pred_lower)) and np.all(np.isfinite(self.pred_upper))):
            raise UnboundedSetError("sampling requires a finite coefficient box")
        rng = Xoshiro256StarStar(seed)
        accepted = np.empty((count, m))
        rejections = 0
        got = 0
        while got < count:
            alpha = np.array([
                rng.uniform(self.pred_lower[j], self.pred_upper[j]) for j in range(m)
            ])
            if self.n_constraints == 0 or np.all(self.pred_matrix @ alpha <= self.pred_rhs + 1e-12):
                accepted[got] = alpha
                got += 1
                rejections = 0
            else:
                rejections += 1
                if rejections >= _REJECTION_BUDGET:
                    raise RejectionBudgetError(
                        f"gave up after {_REJECTION_BUDGET} consecutive rejections; "
                        "the predicate leaves too little of the coefficient box"
                    )
        return self.center[None, :] + accepted @ self.basis.T


# -- constructors -------------------------------------------------------------


def point_star(signal) -> SignalStar:
    """Degenerate star holding exactly one signal (zero generators)."""
    signal = as_vector(signal, "signal")
    return SignalStar(
        center=signal,
        basis=np.zeros((signal.shape[0], 0)),
        pred_lower=np.zeros(0),
        pred_upper=np.zeros(0),
    )


def from_bounds(lower, upper) -> SignalStar:
    """Axis-aligned box star centred at the interval midpoints.

    Coordinates with zero width get no generator; coefficients live in
    [-1, 1] per generator for conditioning.
    """
    lower = as_vector(lower, "lower")
    upper = as_vector(upper, "upper")
    if lower.shape[0] != upper.shape[0]:
        raise DimensionError("upper", f"expected length {lower.shape[0]}, got {upper.shape[0]}")
    bad = np.nonzero(lower > upper)[0]
    if bad.size:
        raise DimensionError("lower", f"lower[{bad[0]}] exceeds upper[{bad[0]}]")
    n = lower.shape[0]
    center = (lower + upper) / 2.0
    active = np.nonzero(upper > lower)[0]
    basis = np.zeros((n, active.shape[0]))
    for col, i in enumerate(active):
        basis[i, col] = (upper[i] - lower[i]) / 2.0
    return SignalStar(
        center=center,
        basis=basis,
        pred_lower=np.full(active.shape[0], -1.0),
        pred_upper=np.full(active.shape[0], 1.0),
    )


def from_spike_fault(signal, location: int, amp_lower: float, amp_upper: float) -> SignalStar:
    """Star of all signals equal to `signal` plus one bounded spike.

    The single generator is the unit vector at `location`; the coefficient
    ranges over the amplitude interval.
    """
    signal = as_vector(signal, "signal")
    location = check_index(location, signal.shape[0], "location")
    if amp_lower > amp_upper:
        raise DimensionError("amp_lower", "amplitude interval is inverted")
    basis = np.zeros((signal.shape[0], 1))
    basis[location, 0] = 1.0
    return SignalStar(
        center=signal,
        basis=basis,
        pred_lower=np.array([float(amp_lower)]),
        pred_upper=np.array([float(amp_upper)]),
    )
