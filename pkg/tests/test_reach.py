import numpy as np
import pytest

from starverify._exceptions import DimensionError, EmptySetError, SplitBudgetError
from starverify._network import DenseLayer, Network, ReluLayer
from starverify._reach import (
    ReachResult,
    output_bounds,
    reach_network,
    relu_layer_approx,
    relu_layer_exact,
    relu_step_exact,
    union_of_star_bounds,
)
from starverify._star import SignalStar, from_bounds, from_spike_fault, point_star


def dense(w, b):
    return DenseLayer(weights=np.asarray(w, dtype=float), bias=np.asarray(b, dtype=float))


def random_relu_network(rng, input_dim, widths, scale=0.8):
    """Dense/ReLU stack with weights scaled to keep values near zero."""
    layers = []
    prev = input_dim
    for i, w in enumerate(widths):
        weights = rng.uniform(-1.0, 1.0, (w, prev)) * scale / np.sqrt(prev)
        bias = rng.uniform(-0.2, 0.2, w)
        layers.append(DenseLayer(weights=weights, bias=bias))
        if i < len(widths) - 1:
            layers.append(ReluLayer(w))
        prev = w
    return Network(layers=tuple(layers), input_dim=input_dim, output_dim=widths[-1])


def segment_star(lo=-1.0, hi=1.0):
    return from_bounds([lo], [hi])


class TestReluStepExact:
    def test_nonnegative_range_returns_same_star(self):
        star = from_bounds([2.0], [5.0])
        out = relu_step_exact(star, 0, star.get_range(0))
        assert len(out) == 1
        assert out[0] is star

    def test_nonpositive_range_pins_to_zero(self):
        star = from_bounds([-5.0], [-2.0])
        out = relu_step_exact(star, 0, star.get_range(0))
        assert len(out) == 1
        b = out[0].get_ranges()
        assert b.lower[0] == 0.0 and b.upper[0] == 0.0

    def test_straddling_range_splits_into_relu_image(self):
        star = segment_star(-1.0, 1.0)
        pieces = relu_step_exact(star, 0, (-1.0, 1.0))
        assert len(pieces) == 2
        grid = np.linspace(-1.0, 1.0, 2001)
        for x in grid[::20]:
            expected = np.array([max(0.0, x)])
            assert any(p.contains(expected, tol=1e-9) for p in pieces)
        # Branch order: nonnegative branch first.
        first = pieces[0].get_ranges()
        assert first.lower[0] >= -1e-9
        second = pieces[1].get_ranges()
        assert second.lower[0] == 0.0 and second.upper[0] == 0.0

    def test_empty_star_rejected(self):
        star = SignalStar([0.0], [[1.0]], pred_lower=[1.0], pred_upper=[-1.0])
        with pytest.raises(EmptySetError):
            relu_step_exact(star, 0, (-1.0, 1.0))


class TestReluLayerExact:
    def test_all_nonnegative_unchanged(self):
        star = from_bounds([0.5, 1.0], [2.0, 3.0])
        out = relu_layer_exact([star])
        assert len(out) == 1
        np.testing.assert_array_equal(out[0].center, star.center)
        np.testing.assert_array_equal(out[0].basis, star.basis)

    def test_two_undecided_neurons_box(self):
        star = from_bounds([-1.0, -0.5], [1.0, 0.5])
        out = relu_layer_exact([star])
        assert 1 <= len(out) <= 4
        assert all(not s.is_empty() for s in out)
        rng = np.random.default_rng(0)
        for x in rng.uniform([-1.0, -0.5], [1.0, 0.5], (200, 2)):
            y = np.maximum(0.0, x)
            assert any(s.contains(y, tol=1e-9) for s in out)
        for s in out:
            for y in s.sample(50, seed=3):
                assert np.all(y >= -1e-12)
                assert np.all(y <= np.array([1.0, 0.5]) + 1e-12)

    def test_point_star_with_negative_coords(self):
        star = point_star([-1.0, 2.0, -0.3])
        out = relu_layer_exact([star])
        assert len(out) == 1
        np.testing.assert_array_equal(out[0].center, [0.0, 2.0, 0.0])

    def test_split_budget_error(self):
        star = from_bounds([-1.0] * 4, [1.0] * 4)
        with pytest.raises(SplitBudgetError):
            relu_layer_exact([star], split_budget=3)

    def test_exact_split_count_is_power_of_two_when_all_feasible(self):
        for k in (1, 2, 3):
            star = from_bounds([-1.0] * k, [1.0] * k)
            out = relu_layer_exact([star])
            assert len(out) == 2**k

    def test_deterministic_branch_ordering(self):
        star = from_bounds([-1.0, -1.0], [1.0, 1.0])
        out = relu_layer_exact([star])
        # DFS leaf order: (+,+), (+,-), (-,+), (-,-) on the pre-activation signs.
        signs = []
        for s in out:
            b = s.get_ranges()
            signs.append((b.upper[0] > 1e-9, b.upper[1] > 1e-9))
        assert signs == [(True, True), (True, False), (False, True), (False, False)]


class TestReluLayerApprox:
    def test_no_undecided_matches_exact(self):
        star = from_bounds([0.1, -2.0], [1.0, -0.5])
        approx = relu_layer_approx(star)
        exact = relu_layer_exact([star])
        assert len(exact) == 1
        np.testing.assert_array_equal(approx.center, exact[0].center)
        np.testing.assert_array_equal(approx.basis, exact[0].basis)
        assert approx.n_generators == star.n_generators

    def test_segment_triangle_range(self):
        star = segment_star(-1.0, 1.0)
        approx = relu_layer_approx(star)
        assert approx.n_generators == 2
        lo, hi = approx.get_range(0)
        assert lo == pytest.approx(0.0, abs=1e-9)
        assert hi == pytest.approx(1.0, abs=1e-9)
        exact = relu_layer_exact([star])
        union = union_of_star_bounds(exact)
        assert union.lower[0] == pytest.approx(0.0, abs=1e-9)
        assert union.upper[0] == pytest.approx(1.0, abs=1e-9)
        # Every exact output is inside the relaxation.
        for x in np.linspace(-1.0, 1.0, 101):
            assert approx.contains(np.array([max(0.0, x)]), tol=1e-7)

    def test_two_neuron_layer_bounds_ordering(self):
        rng = np.random.default_rng(5)
        star = from_bounds([-0.6, -0.4], [0.5, 0.8])
        W = rng.uniform(-1.0, 1.0, (2, 2))
        b = rng.uniform(-0.1, 0.1, 2)
        mapped = star.affine_map(W, b)
        approx_bounds = relu_layer_approx(mapped).get_ranges()
        union = union_of_star_bounds(relu_layer_exact([mapped]))
        assert np.all(union.lower >= approx_bounds.lower - 1e-9)
        assert np.all(union.upper <= approx_bounds.upper + 1e-9)


class TestReachNetwork:
    def test_identity_dense_passthrough(self):
        net = Network(layers=(dense(np.eye(3), np.zeros(3)),), input_dim=3, output_dim=3)
        star = from_bounds([-1.0, 0.0, 2.0], [1.0, 0.5, 3.0])
        for method in ("exact", "approx"):
            result = reach_network(net, star, method)
            assert len(result.output_stars) == 1
            np.testing.assert_allclose(result.union_bounds.lower, [-1.0, 0.0, 2.0], atol=1e-12)
            np.testing.assert_allclose(result.union_bounds.upper, [1.0, 0.5, 3.0], atol=1e-12)

    def test_point_star_collapses_to_forward(self):
        rng = np.random.default_rng(11)
        net = random_relu_network(rng, 4, [6, 5, 3])
        x = rng.uniform(-1.0, 1.0, 4)
        expected = net.forward(x)
        results = {}
        for method in ("exact", "approx"):
            result = reach_network(net, point_star(x), method)
            assert len(result.output_stars) == 1
            star = result.output_stars[0]
            assert star.n_generators == 0
            results[method] = star.center
            np.testing.assert_array_equal(star.center, expected)
        np.testing.assert_array_equal(results["exact"], results["approx"])

    def test_sampling_soundness_on_spike_fault(self):
        rng = np.random.default_rng(3)
        net = random_relu_network(rng, 8, [10, 6, 8])
        signal = rng.uniform(0.0, 1.0, 8)
        star = from_spike_fault(signal, 3, -0.4, 0.4)
        exact = reach_network(net, star, "exact")
        approx = reach_network(net, star, "approx")
        samples = star.sample(1000, seed=7)
        outputs = net.forward_batch(samples)
        for y in outputs:
            assert np.all(y >= exact.union_bounds.lower - 1e-6)
            assert np.all(y <= exact.union_bounds.upper + 1e-6)
            assert np.all(y >= approx.union_bounds.lower - 1e-6)
            assert np.all(y <= approx.union_bounds.upper + 1e-6)
        # Over-approximation ordering.
        assert np.all(exact.union_bounds.lower >= approx.union_bounds.lower - 1e-9)
        assert np.all(exact.union_bounds.upper <= approx.union_bounds.upper + 1e-9)

    def test_stats_lp_calls_match_actual_solver_invocations(self, monkeypatch):
        import starverify._star as star_mod

        calls = {"n": 0}
        real_solve = star_mod.solve
        real_feasible = star_mod.feasible_point

        def counting_solve(*args, **kwargs):
            calls["n"] += 1
            return real_solve(*args, **kwargs)

        def counting_feasible(*args, **kwargs):
            calls["n"] += 1
            return real_feasible(*args, **kwargs)

        monkeypatch.setattr(star_mod, "solve", counting_solve)
        monkeypatch.setattr(star_mod, "feasible_point", counting_feasible)

        rng = np.random.default_rng(9)
        net = random_relu_network(rng, 5, [6, 4])
        star = from_spike_fault(rng.uniform(0, 1, 5), 2, -0.5, 0.5)
        calls["n"] = 0
        result = reach_network(net, star, "exact")
        # The input emptiness pre-check is LP-free for box-only stars, so
        # the per-layer tallies account for every solver invocation.
        assert result.total_lp_calls == calls["n"]

    def test_split_accounting_bound(self):
        rng = np.random.default_rng(13)
        net = random_relu_network(rng, 4, [5, 4])
        star = from_bounds(np.full(4, -0.5), np.full(4, 0.5))
        result = reach_network(net, star, "exact")
        relu_stats = [s for s in result.stats if s.kind == "relu"]
        prev_count = 1
        for s in relu_stats:
            assert s.star_count <= prev_count * 2**5
            prev_count = s.star_count

    def test_empty_input_star_rejected(self):
        net = Network(layers=(dense(np.eye(2), np.zeros(2)),), input_dim=2, output_dim=2)
        star = SignalStar([0.0, 0.0], np.zeros((2, 1)), pred_lower=[1.0], pred_upper=[-1.0])
        with pytest.raises(EmptySetError):
            reach_network(net, star, "exact")

    def test_bad_method_rejected(self):
        net = Network(layers=(dense(np.eye(2), np.zeros(2)),), input_dim=2, output_dim=2)
        with pytest.raises(DimensionError):
            reach_network(net, point_star([0.0, 0.0]), "fancy")

    def test_dimension_mismatch_rejected(self):
        net = Network(layers=(dense(np.eye(2), np.zeros(2)),), input_dim=2, output_dim=2)
        with pytest.raises(DimensionError):
            reach_network(net, point_star([0.0, 0.0, 0.0]), "exact")


class TestOutputBounds:
    def test_single_star_own_ranges(self):
        star = from_bounds([0.0], [1.0])
        result = ReachResult(output_stars=[star], union_bounds=star.get_ranges(), stats=[])
        b = output_bounds(result)
        assert b.lower[0] == pytest.approx(0.0, abs=1e-12)
        assert b.upper[0] == pytest.approx(1.0, abs=1e-12)

    def test_disjoint_intervals_hull(self):
        a = from_bounds([0.0], [1.0])
        b = from_bounds([3.0], [4.0])
        hull = union_of_star_bounds([a, b])
        assert hull.lower[0] == pytest.approx(0.0, abs=1e-12)
        assert hull.upper[0] == pytest.approx(4.0, abs=1e-12)

    def test_fixture_run_contains_samples(self):
        rng = np.random.default_rng(21)
        net = random_relu_network(rng, 6, [8, 6])
        star = from_spike_fault(rng.uniform(0, 1, 6), 1, -0.3, 0.3)
        result = reach_network(net, star, "exact")
        outs = net.forward_batch(star.sample(300, seed=2))
        hull = output_bounds(result)
        assert np.all(outs >= hull.lower[None, :] - 1e-6)
        assert np.all(outs <= hull.upper[None, :] + 1e-6)
