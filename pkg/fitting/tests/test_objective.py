import numpy as np
from django.test import SimpleTestCase

from fitting.objective import (
    coordinate_step,
    objective_from_residual,
    objective_value,
    project_unit_interval,
    step_change,
)
from fitting.rig import Mesh, RigKind
from fitting.solvers import coordinate_update_linear, coordinate_update_quartic
from fitting.tests.factories import orthonormal_rig, random_rig, target_for


def subproblem(t, phi, psi, alpha):
    return 0.5 * np.sum((t * phi + psi) ** 2) + alpha * t


class ProjectionTests(SimpleTestCase):
    def test_projection(self):
        self.assertEqual(project_unit_interval(-0.3), 0.0)
        self.assertEqual(project_unit_interval(1.7), 1.0)
        self.assertEqual(project_unit_interval(0.42), 0.42)


class CoordinateStepTests(SimpleTestCase):
    def test_interior_optimum(self):
        b = np.array([1.0, 2.0, -0.5])
        value, degenerate = coordinate_step(b, -0.5 * b, 0.0, 0.0)
        self.assertAlmostEqual(value, 0.5, places=15)
        self.assertFalse(degenerate)

    def test_clipped_at_one(self):
        b = np.array([1.0, 2.0, -0.5])
        self.assertEqual(coordinate_step(b, -2.0 * b, 0.0, 0.0)[0], 1.0)

    def test_degenerate_direction(self):
        zero = np.zeros(3)
        psi = np.ones(3)
        self.assertEqual(coordinate_step(zero, psi, 0.5, 0.3), (0.0, True))
        self.assertEqual(coordinate_step(zero, psi, 0.0, 0.3), (0.3, True))

    def test_value_does_not_grow_with_alpha(self):
        rng = np.random.default_rng(1)
        alphas = np.sort(rng.uniform(0, 3, size=20))
        for _ in range(100):
            phi = rng.normal(size=6)
            psi = rng.normal(size=6) * rng.uniform(0.1, 3.0)
            values = [coordinate_step(phi, psi, alpha, 0.0)[0] for alpha in np.concatenate([[0.0], alphas])]
            self.assertTrue(all(b <= a for a, b in zip(values, values[1:])), values)

    def test_anticorrelated_coordinate_stays_at_zero(self):
        rng = np.random.default_rng(2)
        for _ in range(200):
            phi = rng.normal(size=5)
            psi = rng.normal(size=5)
            if phi @ psi < 0:
                psi = -psi
            alpha = float(rng.choice([0.0, rng.uniform(0, 2)]))
            self.assertEqual(coordinate_step(phi, psi, alpha, 0.0)[0], 0.0)

    def test_matches_grid_search(self):
        rng = np.random.default_rng(0)
        grid = np.linspace(0.0, 1.0, 1_000_001)
        for _ in range(200):
            size = int(rng.integers(3, 12))
            phi = rng.normal(size=size)
            psi = rng.normal(size=size) * rng.uniform(0.1, 3.0)
            alpha = float(rng.choice([0.0, rng.uniform(0, 2)]))
            value, _ = coordinate_step(phi, psi, alpha, 0.0)
            a, c, p = phi @ phi, phi @ psi, psi @ psi
            on_grid = 0.5 * (grid * grid * a + 2 * grid * c + p) + alpha * grid
            self.assertGreaterEqual(value, 0.0)
            self.assertLessEqual(value, 1.0)
            self.assertLessEqual(subproblem(value, phi, psi, alpha), on_grid.min() + 1e-10)
            self.assertLessEqual(abs(grid[np.argmin(on_grid)] - value), 1e-3)


class CoordinateUpdateTests(SimpleTestCase):
    def test_recovers_half_activation(self):
        rig = orthonormal_rig(m=3, n=4)
        target = target_for(rig, [0.0, 0.5, 0.0])
        self.assertAlmostEqual(coordinate_update_linear(rig, np.zeros(3), 1, target, 0.0), 0.5, places=12)

    def test_large_alpha_kills_the_coordinate(self):
        rig = orthonormal_rig(m=3, n=4)
        target = target_for(rig, [0.0, 1.0, 0.0])
        self.assertEqual(coordinate_update_linear(rig, np.zeros(3), 1, target, 2.0), 0.0)

    def test_coordinate_pointing_away_from_the_target_is_not_activated(self):
        rig = random_rig(seed=5, m=6, n=8)
        rng = np.random.default_rng(6)
        for i in range(rig.m):
            direction = rng.normal(size=3 * rig.n)
            b = rig.basis[:, i]
            if b @ direction > 0:
                direction = -direction
            target = Mesh(rig.neutral.coords + direction)
            self.assertEqual(coordinate_update_linear(rig, np.zeros(rig.m), i, target, 0.0), 0.0)

    def test_update_minimises_along_the_coordinate(self):
        rig = random_rig(seed=3, m=6, n=5, pairs=4, triplets=2, quads=1, scale=1.0)
        rng = np.random.default_rng(4)
        grid = np.linspace(0.0, 1.0, 2001)
        for _ in range(10):
            w = rng.uniform(size=rig.m)
            i = int(rng.integers(rig.m))
            alpha = float(rng.uniform(0, 1))
            target = Mesh(rng.normal(size=3 * rig.n))
            value = coordinate_update_quartic(rig, w, i, target, alpha)
            best = min(objective_value(rig, np.where(np.arange(rig.m) == i, t, w), target, alpha) for t in grid)
            moved = w.copy()
            moved[i] = value
            self.assertLessEqual(objective_value(rig, moved, target, alpha), best + 1e-9)


class ObjectiveTests(SimpleTestCase):
    def test_zero_at_neutral_target(self):
        rig = random_rig(seed=1, m=4, n=3)
        self.assertEqual(objective_value(rig, np.zeros(4), rig.neutral, 0.7), 0.0)

    def test_regulariser_vanishes_at_zero(self):
        rig = random_rig(seed=2, m=4, n=3)
        target = Mesh(np.random.default_rng(0).normal(size=9))
        expected = 0.5 * np.sum((rig.neutral.coords - target.coords) ** 2)
        self.assertAlmostEqual(objective_value(rig, np.zeros(4), target, 3.0), expected, places=12)

    def test_matches_recomputation(self):
        rig = random_rig(seed=5, m=5, n=4, pairs=3, triplets=1)
        rng = np.random.default_rng(6)
        w = rng.uniform(size=5)
        target = Mesh(rng.normal(size=12))
        residual = rig.neutral.coords + rig.deformation(w, RigKind.LINEAR) - target.coords
        self.assertAlmostEqual(objective_value(rig, w, target, 0.4, RigKind.LINEAR),
                               objective_from_residual(residual, w, 0.4), places=12)

    def test_step_change_is_exact(self):
        rig = random_rig(seed=7, m=5, n=4, pairs=3, triplets=2, quads=1)
        rng = np.random.default_rng(8)
        w = rng.uniform(size=5)
        target = Mesh(rng.normal(size=12))
        residual = rig.neutral.coords + rig.deformation(w) - target.coords
        moved = w.copy()
        moved[2] = 0.1
        expected = objective_value(rig, moved, target, 0.3) - objective_value(rig, w, target, 0.3)
        self.assertAlmostEqual(step_change(rig.phi(w, 2), residual, 0.3, w[2], 0.1), expected, places=10)
