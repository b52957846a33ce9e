import math
import unittest

import numpy as np

from fracinv.fields import Grid, ScalarField
from fracinv.forward_model import apply_forward, add_noise, realized_noise_level, forward_multiplier, \
    gaussian_initial, gaussian_spectrum, shepp_logan_phantom, shepp_logan_ellipses
from fracinv.structs import ModelParams, NoiseSpec
from fracinv.transforms import transform
from fracinv.utility import ParameterDomainError

MODEL = ModelParams(alpha=0.6, beta=1.0, T=1.0)


class TestApplyForward(unittest.TestCase):
    def test_constant_is_preserved(self):
        grid = Grid(16, 5.0)
        g = apply_forward(ScalarField.constant(grid, 3.0), MODEL)
        np.testing.assert_allclose(g.values, 3.0, rtol=1e-13)

    def test_single_mode(self):
        """cos(x1) on [-pi, pi]^2 is one Fourier mode with |xi| = 1, damped by exp(-1) when alpha = beta = 1."""
        grid = Grid(16, math.pi)
        x1, _ = grid.mesh()
        u = ScalarField(grid, np.cos(x1))
        g = apply_forward(u, ModelParams(alpha=1.0, beta=1.0, T=1.0))
        np.testing.assert_allclose(g.values, math.exp(-1.0) * np.cos(x1), atol=1e-13)

    def test_against_direct_sum(self):
        """Compare with S applied through an explicit sum over modes."""
        grid = Grid(16, 4.0)
        rng = np.random.default_rng(5)
        u = rng.standard_normal(grid.shape)
        s_hat = forward_multiplier(MODEL, grid)

        n = grid.N
        k = np.arange(n)
        basis = np.exp(2j * np.pi * np.outer(k, k) / n) / n
        coefficients = basis.conj().T @ u @ basis.conj() * n * n
        expected = (basis @ (s_hat * coefficients) @ basis.T).real

        np.testing.assert_allclose(apply_forward(ScalarField(grid, u), MODEL).values, expected, atol=1e-12)

    def test_mean_and_contraction(self):
        grid = Grid(32, 10.0)
        u = shepp_logan_phantom(grid)
        g = apply_forward(u, ModelParams(alpha=0.6, beta=0.9))
        self.assertAlmostEqual(g.mean(), u.mean(), places=12)
        self.assertLess(g.norm(), u.norm())

    def test_multiplier_is_cached_read_only(self):
        grid = Grid(16, 4.0)
        s_hat = forward_multiplier(MODEL, grid)
        self.assertIs(s_hat, forward_multiplier(MODEL, grid))
        with self.assertRaises(ValueError):
            s_hat[0, 0] = 0.0


class TestNoise(unittest.TestCase):
    def test_zero_noise_copies(self):
        grid = Grid(8, 1.0)
        g = ScalarField.constant(grid, 2.0)
        noisy = add_noise(g, NoiseSpec(0.0, seed=1))
        self.assertIsNot(noisy, g)
        self.assertTrue(np.array_equal(noisy.values, g.values))
        self.assertEqual(realized_noise_level(noisy, g), 0.0)

    def test_determinism(self):
        grid = Grid(16, 1.0)
        g = ScalarField.constant(grid, 1.0)
        a = add_noise(g, NoiseSpec(0.01, seed=7))
        b = add_noise(g, NoiseSpec(0.01, seed=7))
        c = add_noise(g, NoiseSpec(0.01, seed=8))
        self.assertTrue(np.array_equal(a.values, b.values))
        self.assertFalse(np.array_equal(a.values, c.values))

    def test_amplitude(self):
        grid = Grid(256, 1.0)
        g = ScalarField.constant(grid, 2.0)
        noise = add_noise(g, NoiseSpec(0.05, seed=0)).values - g.values
        self.assertAlmostEqual(np.std(noise), 0.1, delta=0.003)
        self.assertAlmostEqual(np.mean(noise), 0.0, delta=0.003)

    def test_negative_delta(self):
        with self.assertRaises(ParameterDomainError):
            NoiseSpec(-0.1)


class TestGaussian(unittest.TestCase):
    def test_values(self):
        grid = Grid(64, 10.0)
        u = gaussian_initial(grid)
        self.assertEqual(u.values[32, 32], 1.0)
        self.assertAlmostEqual(u.values[33, 32], math.exp(-grid.dx ** 2))

    def test_spectrum_matches_transform(self):
        grid = Grid(64, 10.0)
        expected = transform(gaussian_initial(grid)).values
        actual = gaussian_spectrum(grid).values
        self.assertLess(np.max(np.abs(actual - expected)), 1e-8 * np.max(np.abs(expected)))


def point_in_ellipses(X, Y, modified=True):
    total = 0.0
    for gray, a, b, xc, yc, theta_deg in shepp_logan_ellipses(modified):
        theta = math.radians(theta_deg)
        u = (X - xc) * math.cos(theta) + (Y - yc) * math.sin(theta)
        v = (X - xc) * math.sin(theta) - (Y - yc) * math.cos(theta)
        if u * u / (a * a) + v * v / (b * b) <= 1.0:
            total += gray
    return min(max(total, 0.0), 1.0)


class TestPhantom(unittest.TestCase):
    def test_small_grid_rejected(self):
        with self.assertRaises(ParameterDomainError):
            shepp_logan_phantom(Grid(16, 10.0))

    def test_values(self):
        grid = Grid(128, 10.0)
        phantom = shepp_logan_phantom(grid).values

        self.assertTrue(np.all((phantom >= 0.0) & (phantom <= 1.0)))
        self.assertEqual(phantom[0, 0], 0.0)
        self.assertEqual(phantom[-1, -1], 0.0)
        self.assertAlmostEqual(phantom[64, 64], 0.2)
        self.assertLessEqual(len(np.unique(np.round(phantom, 10))), 12)

    def test_orientation(self):
        """The small bright ellipse above the center lies at negative x1."""
        grid = Grid(128, 10.0)
        phantom = shepp_logan_phantom(grid).values
        self.assertAlmostEqual(phantom[42, 64], 0.3)
        self.assertAlmostEqual(phantom[86, 64], 0.2)

    def test_against_pointwise_oracle(self):
        grid = Grid(32, 10.0)
        phantom = shepp_logan_phantom(grid, modified=False).values
        nodes = grid.nodes
        for i in range(0, 32, 3):
            for j in range(0, 32, 3):
                expected = point_in_ellipses(nodes[j] / grid.L, -nodes[i] / grid.L, modified=False)
                self.assertAlmostEqual(phantom[i, j], expected, places=12)


if __name__ == "__main__":
    unittest.main()
