import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_array_equal

from fitting.exceptions import ContractError
from fitting.ordering import (
    OrderingKind,
    OrderingStrategy,
    VisitState,
    next_coordinate_dynamic,
    static_order,
)
from fitting.rig import BlendshapeRig, Mesh, evaluate_quartic
from fitting.solvers import Method, SolverConfig, coordinate_update_quartic, fit, objective_value
from fitting.tests.factories import orthonormal_rig, random_rig, target_for


def scaled_rig(lengths):
    basis = np.zeros((3 * len(lengths), len(lengths)))
    for i, length in enumerate(lengths):
        basis[3 * i, i] = length
    return BlendshapeRig(np.zeros(3 * len(lengths)), basis)


class StaticOrderTests(SimpleTestCase):
    def test_magnitude_orders(self):
        # squared norms 4, 9, 1
        rig = scaled_rig([2.0, 3.0, 1.0])
        decreasing = static_order(rig, OrderingStrategy(OrderingKind.DECREASING_MAGNITUDE))
        increasing = static_order(rig, OrderingStrategy(OrderingKind.INCREASING_MAGNITUDE))
        assert_array_equal(decreasing, [1, 0, 2])
        assert_array_equal(increasing, [2, 0, 1])

    def test_ties_keep_index_order(self):
        rig = scaled_rig([1.0, 1.0, 1.0, 1.0])
        assert_array_equal(static_order(rig, OrderingStrategy()), [0, 1, 2, 3])

    def test_random_is_a_seeded_permutation(self):
        rig = random_rig(m=12, n=3)
        strategy = OrderingStrategy(OrderingKind.RANDOM, seed=5)
        first = static_order(rig, strategy)
        assert_array_equal(np.sort(first), np.arange(12))
        assert_array_equal(first, static_order(rig, strategy))

    def test_random_needs_a_seed(self):
        with self.assertRaises(ContractError):
            OrderingStrategy(OrderingKind.RANDOM)

    def test_frame_correlation(self):
        rig = orthonormal_rig(seed=1, m=4, n=4)
        target = target_for(rig, [0.1, 0.0, 0.9, 0.5])
        order = static_order(rig, OrderingStrategy(OrderingKind.FRAME_CORRELATION), target)
        self.assertEqual(list(order[:3]), [2, 3, 0])
        with self.assertRaises(ContractError):
            static_order(rig, OrderingStrategy(OrderingKind.FRAME_CORRELATION))

    def test_normalized_frame_correlation(self):
        # the long blendshape wins on the raw inner product, the short one on the cosine
        rig = scaled_rig([10.0, 1.0])
        target = Mesh([0.5, 0.0, 0.0, 1.0, 0.0, 0.0])
        raw = static_order(rig, OrderingStrategy(OrderingKind.FRAME_CORRELATION), target)
        cosine = static_order(rig, OrderingStrategy(OrderingKind.FRAME_CORRELATION, normalized=True), target)
        assert_array_equal(raw, [0, 1])
        assert_array_equal(cosine, [1, 0])

    def test_dynamic_kind_is_not_static(self):
        rig = random_rig(m=3, n=2)
        with self.assertRaises(ContractError):
            static_order(rig, OrderingStrategy(OrderingKind.GAUSS_SOUTHWELL))


class DynamicOrderTests(SimpleTestCase):
    def test_gauss_southwell_stops_without_feasible_descent(self):
        rig = random_rig(seed=2, m=5, n=3)
        state = VisitState.fresh(rig.m)
        strategy = OrderingStrategy(OrderingKind.GAUSS_SOUTHWELL)
        self.assertIsNone(next_coordinate_dynamic(rig, np.zeros(rig.m), rig.neutral, strategy, 0.5, state))
        self.assertEqual(state.picks, 0)

    def test_gauss_southwell_skips_a_weight_held_at_one(self):
        rig = scaled_rig([1.0, 1.0, 1.0, 1.0])
        target = target_for(rig, [1.5, 0.0, 0.0, 0.0])
        strategy = OrderingStrategy(OrderingKind.GAUSS_SOUTHWELL)
        w = np.array([1.0, 0.0, 0.0, 0.0])
        for alpha in (0.0, 0.3):
            state = VisitState.fresh(rig.m)
            self.assertIsNone(next_coordinate_dynamic(rig, w, target, strategy, alpha, state))

    def test_gauss_southwell_only_picks_feasible_descent_directions(self):
        rng = np.random.default_rng(11)
        strategy = OrderingStrategy(OrderingKind.GAUSS_SOUTHWELL)
        picked = 0
        for seed in range(200):
            rig = random_rig(seed=seed % 10, m=6, n=4, pairs=4, triplets=2, quads=1)
            w = rng.choice([0.0, 0.5, 1.0], size=rig.m)
            target = Mesh(rig.neutral.coords + rng.normal(size=3 * rig.n) * 2.0)
            alpha = float(rng.uniform(0, 1))
            pick = next_coordinate_dynamic(rig, w, target, strategy, alpha, VisitState.fresh(rig.m))
            if pick is None:
                continue
            picked += 1
            residual = evaluate_quartic(rig, w).coords - target.coords
            gradient = rig.jacobian_transpose_dot(w, residual) + alpha
            self.assertFalse(w[pick] >= 1.0 and gradient[pick] <= 0.0)
            self.assertFalse(w[pick] <= 0.0 and gradient[pick] >= 0.0)
            feasible = [i for i in range(rig.m)
                        if gradient[i] != 0.0
                        and not (w[i] >= 1.0 and gradient[i] <= 0.0)
                        and not (w[i] <= 0.0 and gradient[i] >= 0.0)]
            self.assertEqual(abs(gradient[pick]), max(abs(gradient[i]) for i in feasible))
        self.assertGreater(picked, 0)

    def test_maximum_improvement_picks_the_only_improving_coordinate(self):
        rig = orthonormal_rig(seed=3, m=5, n=4)
        target = target_for(rig, [0.0, 0.0, 0.7, 0.0, 0.0])
        state = VisitState.fresh(rig.m)
        strategy = OrderingStrategy(OrderingKind.MAXIMUM_IMPROVEMENT)
        self.assertEqual(next_coordinate_dynamic(rig, np.zeros(rig.m), target, strategy, 0.0, state), 2)
        self.assertTrue(state.visited[2])

    def test_maximum_improvement_is_the_best_single_step(self):
        rig = random_rig(seed=4, m=7, n=5, pairs=5, triplets=3, quads=1)
        target = Mesh(np.random.default_rng(5).normal(size=3 * rig.n))
        strategy = OrderingStrategy(OrderingKind.MAXIMUM_IMPROVEMENT)
        alpha = 0.1
        w = np.zeros(rig.m)
        state = VisitState.fresh(rig.m)
        while True:
            candidates = np.flatnonzero(~state.visited)
            pick = next_coordinate_dynamic(rig, w, target, strategy, alpha, state)
            if pick is None:
                break
            outcomes = {}
            for j in candidates:
                moved = w.copy()
                moved[j] = coordinate_update_quartic(rig, w, j, target, alpha)
                outcomes[int(j)] = (objective_value(rig, moved, target, alpha), moved)
            best = min(value for value, _ in outcomes.values())
            self.assertLessEqual(outcomes[pick][0], best + 1e-10)
            w = outcomes[pick][1]
        self.assertLessEqual(state.picks, rig.m)

    def test_iteration_correlation_visits_every_coordinate_once_per_pass(self):
        rig = random_rig(seed=6, m=8, n=4)
        target = Mesh(np.random.default_rng(7).normal(size=12))
        strategy = OrderingStrategy(OrderingKind.ITERATION_CORRELATION)
        report = fit(rig, target, SolverConfig(method=Method.CD_QUARTIC, passes=3, ordering=strategy))
        self.assertEqual(report.coordinate_visits, 3 * rig.m)

    def test_pass_budget(self):
        state = VisitState.fresh(3)
        for i in range(3):
            state.mark(i)
        self.assertTrue(state.exhausted)
        rig = random_rig(m=3, n=2)
        strategy = OrderingStrategy(OrderingKind.ITERATION_CORRELATION)
        self.assertIsNone(next_coordinate_dynamic(rig, np.zeros(3), rig.neutral, strategy, 0.0, state))
        self.assertEqual(state.trace, [0, 1, 2])

    def test_static_kind_is_not_dynamic(self):
        rig = random_rig(m=3, n=2)
        with self.assertRaises(ContractError):
            next_coordinate_dynamic(rig, np.zeros(3), rig.neutral, OrderingStrategy(), 0.0, VisitState.fresh(3))
