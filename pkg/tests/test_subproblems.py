import unittest

import numpy as np
from scipy.optimize import minimize_scalar

from fracinv.fields import Grid, ScalarField, VectorField
from fracinv.forward_model import forward_multiplier
from fracinv.structs import ModelParams, SplitConfig
from fracinv.subproblems import solve_w1, solve_w2, solve_w3, sub2_objective, solve_u
from fracinv.transforms import transform
from fracinv.utility import NumericalDegeneracyError, ParameterDomainError


def random_vector_field(grid, seed=0):
    rng = np.random.default_rng(seed)
    return VectorField(grid, rng.standard_normal(grid.shape), rng.standard_normal(grid.shape))


class TestShrinkage(unittest.TestCase):
    def test_example(self):
        grid = Grid(2, 1.0)
        a = VectorField(grid, np.array([[3.0, 0.3], [3.0, 0.0]]), np.array([[4.0, 0.4], [4.0, 0.0]]))
        mask = np.array([[True, True], [False, True]])
        w = solve_w1(a, mask, 1.0)

        self.assertAlmostEqual(w.comp1[0, 0], 2.4)
        self.assertAlmostEqual(w.comp2[0, 0], 3.2)
        self.assertEqual(w.comp1[0, 1], 0.0)  # below the threshold
        self.assertEqual(w.comp1[1, 0], 0.0)  # outside the mask
        self.assertEqual(w.comp2[1, 1], 0.0)  # zero input

    def test_against_loop(self):
        grid = Grid(8, 1.0)
        a = random_vector_field(grid)
        mask = np.random.default_rng(1).random(grid.shape) < 0.5
        lambda_tilde = 1.3
        w = solve_w1(a, mask, lambda_tilde)

        for i in range(8):
            for j in range(8):
                expected = np.zeros(2)
                vector = np.array([a.comp1[i, j], a.comp2[i, j]])
                magnitude = np.linalg.norm(vector)
                if mask[i, j] and magnitude > 1.0 / lambda_tilde:
                    expected = (magnitude - 1.0 / lambda_tilde) * vector / magnitude
                np.testing.assert_allclose([w.comp1[i, j], w.comp2[i, j]], expected, atol=1e-15)

    def test_invalid_lambda(self):
        grid = Grid(2, 1.0)
        with self.assertRaises(ParameterDomainError):
            solve_w1(VectorField.zeros(grid), np.ones((2, 2), dtype=bool), 0.0)


class TestQuadratic(unittest.TestCase):
    def test_factor(self):
        grid = Grid(4, 1.0)
        a = random_vector_field(grid, 2)
        mask = np.zeros(grid.shape, dtype=bool)
        mask[:2] = True
        w = solve_w3(a, mask, 2.0)

        np.testing.assert_allclose(w.comp1[:2], 0.5 * a.comp1[:2])
        np.testing.assert_allclose(w.comp2[:2], 0.5 * a.comp2[:2])
        self.assertTrue(np.all(w.comp1[2:] == 0.0))

    def test_minimizes_pointwise_energy(self):
        grid = Grid(1, 0.5)
        a = VectorField(grid, [[1.5]], [[-0.5]])
        lambda_tilde = 3.0
        w = solve_w3(a, np.ones((1, 1), dtype=bool), lambda_tilde)
        t = np.array([w.comp1[0, 0], w.comp2[0, 0]])

        def energy(v):
            return v @ v + 0.5 * lambda_tilde * np.sum((v - np.array([1.5, -0.5])) ** 2)

        for direction in ([1e-4, 0.0], [0.0, 1e-4], [-1e-4, 1e-4]):
            self.assertLess(energy(t), energy(t + np.array(direction)))


class TestSub2Objective(unittest.TestCase):
    def test_against_loop(self):
        grid = Grid(4, 1.5)
        w = random_vector_field(grid, 3)
        a = random_vector_field(grid, 4)
        p = np.random.default_rng(5).uniform(1.1, 1.9, grid.shape)
        mask = np.random.default_rng(6).random(grid.shape) < 0.6
        lambda_tilde = 0.7

        expected = 0.0
        for i in range(4):
            for j in range(4):
                if mask[i, j]:
                    magnitude = np.hypot(w.comp1[i, j], w.comp2[i, j])
                    penalty = (w.comp1[i, j] - a.comp1[i, j]) ** 2 + (w.comp2[i, j] - a.comp2[i, j]) ** 2
                    expected += magnitude ** p[i, j] + 0.5 * lambda_tilde * penalty
        expected *= grid.weight

        self.assertAlmostEqual(sub2_objective(w, a, ScalarField(grid, p), mask, lambda_tilde), expected, places=12)


class TestDescent(unittest.TestCase):
    def test_rejects_nonpositive_penalty(self):
        for lambda_tilde in (0.0, -1.0):
            with self.assertRaises(ParameterDomainError):
                SplitConfig(lambda_tilde=lambda_tilde)

    def test_empty_mask(self):
        grid = Grid(4, 1.0)
        w, steps = solve_w2(random_vector_field(grid), np.full(grid.shape, 1.5), np.zeros(grid.shape, dtype=bool),
                            SplitConfig(lambda_tilde=1.0), return_steps=True)
        self.assertEqual(steps, 0)
        self.assertEqual(w.norm(), 0.0)

    def test_zero_gradient_is_stationary(self):
        grid = Grid(4, 1.0)
        w, steps = solve_w2(VectorField.zeros(grid), np.full(grid.shape, 1.5), np.ones(grid.shape, dtype=bool),
                            SplitConfig(lambda_tilde=1.0), return_steps=True)
        self.assertEqual(steps, 0)
        self.assertEqual(w.norm(), 0.0)

    def test_energy_decreases(self):
        grid = Grid(8, 2.0)
        a = random_vector_field(grid, 7)
        p = np.random.default_rng(8).uniform(1.1, 1.9, grid.shape)
        mask = np.random.default_rng(9).random(grid.shape) < 0.5
        cfg = SplitConfig(lambda_tilde=2.0)

        start = a.masked(mask)
        w, steps = solve_w2(a, p, mask, cfg, return_steps=True)
        self.assertGreater(steps, 0)
        self.assertLess(sub2_objective(w, a, p, mask, 2.0), sub2_objective(start, a, p, mask, 2.0))
        self.assertTrue(np.all(w.comp1[~mask] == 0.0))

    def test_quadratic_exponent_converges_to_closed_form(self):
        grid = Grid(8, 4.0)
        a = random_vector_field(grid, 10)
        mask = np.ones(grid.shape, dtype=bool)
        cfg = SplitConfig(lambda_tilde=1.0, ell_max=200, tol=1e-10)

        w = solve_w2(a, np.full(grid.shape, 2.0), mask, cfg)
        np.testing.assert_allclose(w.comp1, a.comp1 / 3.0, atol=1e-6)
        np.testing.assert_allclose(w.comp2, a.comp2 / 3.0, atol=1e-6)

    def test_single_pixel_against_line_search(self):
        """With one active pixel the minimizer is t a / |a|, t minimizing t^p + (lt/2)(t - |a|)^2."""
        grid = Grid(4, 2.0)
        a = VectorField(grid, np.full(grid.shape, 1.2), np.full(grid.shape, -1.6))
        mask = np.zeros(grid.shape, dtype=bool)
        mask[1, 2] = True
        p, lambda_tilde = 1.5, 1.0
        cfg = SplitConfig(lambda_tilde=lambda_tilde, ell_max=300, tol=1e-12)

        w = solve_w2(a, np.full(grid.shape, p), mask, cfg)

        best = minimize_scalar(lambda t: t ** p + 0.5 * lambda_tilde * (t - 2.0) ** 2, bounds=(0.0, 2.0),
                               method="bounded", options={"xatol": 1e-12})
        self.assertAlmostEqual(w.comp1[1, 2], best.x * 0.6, places=6)
        self.assertAlmostEqual(w.comp2[1, 2], -best.x * 0.8, places=6)

    def test_degenerate_without_regularization(self):
        grid = Grid(2, 1.0)
        cfg = SplitConfig(lambda_tilde=1.0, eta=0.0)
        with self.assertRaises(NumericalDegeneracyError):
            solve_w2(VectorField.zeros(grid), np.full((2, 2), 1.5), np.ones((2, 2), dtype=bool), cfg)


class TestSolveU(unittest.TestCase):
    def test_dense_normal_equations(self):
        """Compare with the normal equations of the quadratic u-problem assembled as dense matrices."""
        grid = Grid(8, 3.0)
        n = grid.N
        model = ModelParams(alpha=0.6, beta=1.0)
        s_hat = forward_multiplier(model, grid)
        cfg = SplitConfig(lambda_=5e8, lambda_tilde=0.5)
        lambda_eff = grid.fidelity_weight(cfg.lambda_)

        def apply_S(v):
            return np.fft.ifft2(s_hat * np.fft.fft2(v.reshape(n, n))).real.ravel()

        def apply_D1(v):
            v = v.reshape(n, n)
            return ((np.roll(v, -1, axis=0) - v) / grid.dx).ravel()

        def apply_D2(v):
            v = v.reshape(n, n)
            return ((np.roll(v, -1, axis=1) - v) / grid.dx).ravel()

        identity = np.eye(n * n)
        S = np.column_stack([apply_S(e) for e in identity])
        D1 = np.column_stack([apply_D1(e) for e in identity])
        D2 = np.column_stack([apply_D2(e) for e in identity])

        rng = np.random.default_rng(11)
        g = rng.standard_normal(grid.shape)
        w = VectorField(grid, rng.standard_normal(grid.shape), rng.standard_normal(grid.shape))

        matrix = lambda_eff * S.T @ S + cfg.lambda_tilde * (D1.T @ D1 + D2.T @ D2)
        rhs = lambda_eff * S.T @ g.ravel() + cfg.lambda_tilde * (D1.T @ w.comp1.ravel() + D2.T @ w.comp2.ravel())
        expected = np.linalg.solve(matrix, rhs).reshape(n, n)

        u = solve_u(w, transform(ScalarField(grid, g)), s_hat, cfg, grid)
        np.testing.assert_allclose(u.values, expected, atol=1e-9)

    def test_zero_splitting_variable(self):
        grid = Grid(8, 3.0)
        s_hat = np.ones(grid.shape)
        g = ScalarField.constant(grid, 2.0)
        u = solve_u(VectorField.zeros(grid), transform(g), s_hat, SplitConfig(lambda_tilde=1.0), grid)
        np.testing.assert_allclose(u.values, 2.0, atol=1e-12)


if __name__ == "__main__":
    unittest.main()
