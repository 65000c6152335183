"""Layer-by-layer reachability with exact ReLU splitting or relaxation.

The exact method carries a list of stars through the network, splitting on
every ReLU neuron whose pre-activation range straddles zero; the result is
a union of stars covering precisely the reachable outputs. The approximate
method keeps a single star by over-approximating each undecided neuron
with the triangle relaxation over its exact pre-activation range, adding
one generator per undecided neuron. Outputs are soundly contained in the
approximate star, and the exact union bounds never exceed the approximate
bounds.

Neuron ranges are first estimated from the coefficient box alone, which is
sound because dropping predicate rows only widens the range; the LP solver
is consulted only when the cheap interval straddles zero.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from ._exceptions import DimensionError, EmptySetError, SplitBudgetError
from ._network import DenseLayer, Network, ReluLayer
from ._star import Bounds, SignalStar, SolveCounter

DEFAULT_SPLIT_BUDGET = 10_000


@dataclass(frozen=True)
class LayerStats:
    index: int
    kind: str  # "dense" | "relu" | "output_bounds"
    star_count: int
    lp_calls: int
    elapsed_s: float


@dataclass(frozen=True)
class ReachResult:
    output_stars: list
    union_bounds: Bounds
    stats: list

    @property
    def total_lp_calls(self) -> int:
        return sum(s.lp_calls for s in self.stats)


def _zero_coordinates(star: SignalStar, indices) -> SignalStar:
    center = star.center.copy()
    basis = star.basis.copy()
    center[indices] = 0.0
    basis[indices, :] = 0.0
    return star._replace_geometry(center, basis)


def relu_step_exact(star: SignalStar, neuron: int, range_hint,
                    counter: SolveCounter | None = None) -> list:
    """Apply one ReLU neuron exactly, splitting when the range straddles 0.

    `range_hint` must be a sound enclosure of the neuron's value over the
    star (from `get_range` or the interval pre-filter). Returns one or two
    nonempty stars; the nonnegative branch always comes first.
    """
    if star._box_empty:
        raise EmptySetError("cannot apply ReLU to an empty star")
    lo, hi = range_hint
    if hi <= 0.0:
        return [_zero_coordinates(star, [neuron])]
    if lo >= 0.0:
        return [star]
    unit = np.zeros(star.dim)
    unit[neuron] = 1.0
    branches = []
    positive = star.add_state_halfspace(-unit, 0.0)
    if not positive.is_empty(counter):
        branches.append(positive)
    negative = star.add_state_halfspace(unit, 0.0)
    if not negative.is_empty(counter):
        branches.append(_zero_coordinates(negative, [neuron]))
    return branches


def relu_layer_exact(stars, split_budget: int = DEFAULT_SPLIT_BUDGET,
                     counter: SolveCounter | None = None) -> list:
    """Fold `relu_step_exact` over every neuron of every star.

    The box interval of a star does not change when predicate rows are
    added, so each input star's interval enclosure is computed once and
    reused by its descendants (each neuron is visited a single time).
    """
    if not stars:
        return []
    width = stars[0].dim
    work = [(s, s.interval_ranges()) for s in stars]
    for neuron in range(width):
        grown = []
        for star, box in work:
            hint = (box.lower[neuron], box.upper[neuron])
            for child in relu_step_exact(star, neuron, hint, counter):
                grown.append((child, box))
        if len(grown) > split_budget:
            raise SplitBudgetError(
                f"exact ReLU splitting produced {len(grown)} stars at neuron {neuron}, "
                f"over the budget of {split_budget}; switch to the approx method"
            )
        work = grown
    return [star for star, _ in work]


def relu_layer_approx(star: SignalStar, counter: SolveCounter | None = None) -> SignalStar:
    """Triangle relaxation of a whole ReLU layer on one star.

    Each neuron whose exact range (lo, hi) straddles zero gets a fresh
    coefficient b constrained by b >= x, b <= hi*(x - lo)/(hi - lo) and
    b >= 0 (via its box bound); the output coordinate then reads b. The
    result contains every point of the exact ReLU image.
    """
    if star._box_empty:
        raise EmptySetError("cannot apply ReLU to an empty star")
    box = star.interval_ranges()
    negative = []
    undecided = []
    for j in range(star.dim):
        lo, hi = box.lower[j], box.upper[j]
        if lo >= 0.0:
            continue
        if hi <= 0.0:
            negative.append(j)
            continue
        if star.n_constraints:
            lo, hi = star.get_range(j, counter)
        if hi <= 0.0:
            negative.append(j)
        elif lo < 0.0:
            undecided.append((j, lo, hi))

    m = star.n_generators
    k = len(undecided)
    center = star.center.copy()
    basis = np.hstack([star.basis, np.zeros((star.dim, k))]) if k else star.basis.copy()
    if negative:
        center[negative] = 0.0
        basis[negative, :] = 0.0

    p = star.pred_matrix.shape[0]
    pred_matrix = np.hstack([star.pred_matrix, np.zeros((p, k))]) if k else star.pred_matrix
    pred_rhs = star.pred_rhs
    pred_lower = star.pred_lower
    pred_upper = star.pred_upper

    if k:
        new_rows = np.zeros((2 * k, m + k))
        new_rhs = np.zeros(2 * k)
        beta_lower = np.zeros(k)
        beta_upper = np.zeros(k)
        for idx, (j, lo, hi) in enumerate(undecided):
            row_in = star.basis[j]
            col = m + idx
            # b >= x_j
            new_rows[2 * idx, :m] = row_in
            new_rows[2 * idx, col] = -1.0
            new_rhs[2 * idx] = -star.center[j]
            # b <= hi (x_j - lo) / (hi - lo)
            slope = hi / (hi - lo)
            new_rows[2 * idx + 1, :m] = -slope * row_in
            new_rows[2 * idx + 1, col] = 1.0
            new_rhs[2 * idx + 1] = slope * (star.center[j] - lo)
            beta_upper[idx] = hi
            # output coordinate j now reads the fresh coefficient
            center[j] = 0.0
            basis[j, :] = 0.0
            basis[j, col] = 1.0
        pred_matrix = np.vstack([pred_matrix, new_rows])
        pred_rhs = np.concatenate([pred_rhs, new_rhs])
        pred_lower = np.concatenate([pred_lower, beta_lower])
        pred_upper = np.concatenate([pred_upper, beta_upper])

    return SignalStar(
        center=center,
        basis=basis,
        pred_matrix=pred_matrix,
        pred_rhs=pred_rhs,
        pred_lower=pred_lower,
        pred_upper=pred_upper,
    )


def union_of_star_bounds(stars, counter: SolveCounter | None = None) -> Bounds:
    """Elementwise hull of every star's exact coordinate ranges."""
    if not stars:
        raise EmptySetError("cannot take bounds over zero stars")
    lows = []
    highs = []
    for star in stars:
        b = star.get_ranges(counter)
        lows.append(b.lower)
        highs.append(b.upper)
    return Bounds(lower=np.min(lows, axis=0), upper=np.max(highs, axis=0))


def reach_network(network: Network, input_star: SignalStar, method: str = "exact",
                  split_budget: int = DEFAULT_SPLIT_BUDGET) -> ReachResult:
    """Propagate an input star through the network, layer by layer."""
    if method not in ("exact", "approx"):
        raise DimensionError("method", f"must be 'exact' or 'approx', got {method!r}")
    problems = network.validate()
    if problems:
        raise DimensionError("network", "; ".join(problems))
    if input_star.dim != network.input_dim:
        raise DimensionError(
            "input_star", f"dimension {input_star.dim} does not match network input {network.input_dim}"
        )
    if input_star.is_empty():
        raise EmptySetError("input star is empty")

    work = [input_star]
    stats = []
    for index, layer in enumerate(network.layers):
        counter = SolveCounter()
        started = time.perf_counter()
        if isinstance(layer, DenseLayer):
            work = [s.affine_map(layer.weights, layer.bias) for s in work]
            kind = "dense"
        elif isinstance(layer, ReluLayer):
            if method == "exact":
                work = relu_layer_exact(work, split_budget, counter)
            else:
                work = [relu_layer_approx(work[0], counter)]
            kind = "relu"
        else:
            raise DimensionError("layers", f"unsupported layer type {type(layer).__name__}")
        stats.append(LayerStats(
            index=index,
            kind=kind,
            star_count=len(work),
            lp_calls=counter.count,
            elapsed_s=time.perf_counter() - started,
        ))

    counter = SolveCounter()
    started = time.perf_counter()
    union = union_of_star_bounds(work, counter)
    stats.append(LayerStats(
        index=len(network.layers),
        kind="output_bounds",
        star_count=len(work),
        lp_calls=counter.count,
        elapsed_s=time.perf_counter() - started,
    ))
    return ReachResult(output_stars=work, union_bounds=union, stats=stats)


def output_bounds(result: ReachResult) -> Bounds:
    """Union bounds of the result's stars (recomputed from the stars)."""
    return union_of_star_bounds(result.output_stars)
