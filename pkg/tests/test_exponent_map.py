import unittest

import numpy as np

from fracinv.exponent_map import detect_edges, gaussian_smooth, exponent_from_edges, pm_polynomial, exponent_pm, \
    build_exponent, partition_domain
from fracinv.fields import Grid, ScalarField
from fracinv.forward_model import shepp_logan_phantom, gaussian_initial, apply_forward
from fracinv.structs import ExponentConfig, ExponentPath, ModelParams
from fracinv.utility import ParameterDomainError


def step_field(grid):
    """0 left of x2 = 0, 1 from it on."""
    _, x2 = grid.mesh()
    return ScalarField(grid, (x2 >= 0.0).astype(float))


class TestEdges(unittest.TestCase):
    def test_constant_has_no_edges(self):
        grid = Grid(32, 10.0)
        self.assertFalse(np.any(detect_edges(ScalarField.constant(grid, 4.0)).values))
        p = exponent_from_edges(ScalarField.constant(grid, 4.0), ExponentConfig())
        self.assertTrue(np.all(p.values == 2.0))

    def test_step_edge(self):
        grid = Grid(64, 10.0)
        edges = detect_edges(step_field(grid)).values
        rows, columns = np.nonzero(edges)

        self.assertGreaterEqual(len(rows), grid.N)
        self.assertTrue(set(columns.tolist()) <= {31, 32})
        self.assertTrue(set(np.unique(edges).tolist()) <= {0.0, 1.0})

    def test_scale_invariance(self):
        grid = Grid(64, 10.0)
        u = shepp_logan_phantom(grid)
        self.assertTrue(np.array_equal(detect_edges(u).values, detect_edges(2.0 * u).values))

    def test_exponent_near_step(self):
        grid = Grid(64, 10.0)
        p = exponent_from_edges(step_field(grid), ExponentConfig()).values

        self.assertTrue(np.all((p >= 1.0) & (p <= 2.0)))
        self.assertTrue(np.all(p[:, 31:33].min(axis=1) < 1.1))
        self.assertTrue(np.all(p[:, :28] == 2.0))
        self.assertTrue(np.all(p[:, 36:] == 2.0))

    def test_blurred_phantom_reaches_shrinkage_region(self):
        grid = Grid(64, 10.0)
        g = apply_forward(shepp_logan_phantom(grid), ModelParams(alpha=0.6, beta=0.9))
        p = exponent_from_edges(g, ExponentConfig())
        partition = partition_domain(p, ExponentConfig().epsilon)

        self.assertLess(p.values.min(), 1.1)
        self.assertGreater(partition.fractions()[0], 0.0)
        self.assertGreater(partition.fractions()[2], 0.5)


class TestSmoothing(unittest.TestCase):
    def test_point_source(self):
        grid = Grid(32, 10.0)
        sigma = 0.4
        s = sigma / grid.dx
        radius = int(4.0 * s + 0.5)
        offsets = np.arange(-radius, radius + 1)
        kernel = np.exp(-offsets ** 2 / (2.0 * s ** 2))
        kernel /= kernel.sum()

        delta = np.zeros(grid.shape)
        delta[16, 16] = 1.0
        smoothed = gaussian_smooth(ScalarField(grid, delta), sigma).values

        window = smoothed[16 - radius:16 + radius + 1, 16 - radius:16 + radius + 1]
        np.testing.assert_allclose(window, np.outer(kernel, kernel), atol=1e-15)
        self.assertAlmostEqual(smoothed.sum(), 1.0, places=14)

    def test_mass_preserved_with_wrap(self):
        grid = Grid(32, 10.0)
        u = shepp_logan_phantom(grid)
        self.assertAlmostEqual(gaussian_smooth(u, 1.5).mean(), u.mean(), places=12)

    def test_invalid_sigma(self):
        grid = Grid(8, 1.0)
        with self.assertRaises(ParameterDomainError):
            gaussian_smooth(ScalarField.zeros(grid), 0.0)


class TestPMPolynomial(unittest.TestCase):
    def test_values(self):
        self.assertEqual(pm_polynomial(0.0, 2.0), 2.0)
        self.assertEqual(pm_polynomial(2.0, 2.0), 1.0)
        self.assertEqual(pm_polynomial(5.0, 2.0), 1.0)
        self.assertAlmostEqual(pm_polynomial(1.0, 2.0), 1.5)

    def test_monotone(self):
        s = np.linspace(0.0, 1.0, 101)
        self.assertTrue(np.all(np.diff(pm_polynomial(s, 1.0)) < 0.0))

    def test_exponent_pm(self):
        grid = Grid(32, 10.0)
        cfg = ExponentConfig(cap_M=0.01)
        self.assertTrue(np.all(exponent_pm(ScalarField.constant(grid, 1.0), cfg).values == 2.0))

        p = exponent_pm(shepp_logan_phantom(grid), cfg).values
        self.assertTrue(np.all((p >= 1.0) & (p <= 2.0)))
        self.assertLess(p.min(), 2.0)


class TestBuildExponent(unittest.TestCase):
    def test_paths(self):
        grid = Grid(32, 10.0)
        u = shepp_logan_phantom(grid)
        cfg = ExponentConfig()
        self.assertTrue(np.all(build_exponent(u, cfg, ExponentPath.ONE).values == 1.0))
        self.assertTrue(np.all(build_exponent(u, cfg, ExponentPath.TWO).values == 2.0))
        self.assertTrue(np.array_equal(build_exponent(u, cfg, ExponentPath.EDGES).values,
                                       exponent_from_edges(u, cfg).values))
        self.assertTrue(np.array_equal(build_exponent(u, cfg, ExponentPath.PM).values, exponent_pm(u, cfg).values))


def random_fields(grid, count, seed):
    """White noise, random walks and random piecewise constant blocks at varied amplitudes."""
    rng = np.random.default_rng(seed)
    for i in range(count):
        scale = 10.0 ** rng.uniform(-4.0, 4.0)
        kind = i % 3
        if kind == 0:
            values = rng.standard_normal(grid.shape)
        elif kind == 1:
            values = np.cumsum(np.cumsum(rng.standard_normal(grid.shape), axis=0), axis=1)
        else:
            blocks = rng.integers(0, 3, (4, 4)).astype(float)
            values = np.kron(blocks, np.ones((grid.N // 4, grid.N // 4)))
        yield ScalarField(grid, scale * values)


def structured_fields(grid):
    x1, x2 = grid.mesh()
    yield ScalarField.constant(grid, 3.0)
    yield step_field(grid)
    yield ScalarField(grid, x1 + 2.0 * x2)
    yield gaussian_initial(grid)
    yield shepp_logan_phantom(grid)
    yield ScalarField(grid, 1e-12 * shepp_logan_phantom(grid).values)
    yield ScalarField(grid, 1e12 * shepp_logan_phantom(grid).values)
    yield ScalarField(grid, np.indices(grid.shape).sum(axis=0) % 2.0)
    yield ScalarField(grid, np.sin(3.0 * x1) * np.cos(2.0 * x2))
    spike = np.zeros(grid.shape)
    spike[grid.N // 2, grid.N // 3] = 1.0
    yield ScalarField(grid, spike)


class TestExponentRange(unittest.TestCase):
    PATHS = (ExponentPath.EDGES, ExponentPath.PM)

    def check_range(self, u, cfg):
        for path in self.PATHS:
            p = build_exponent(u, cfg, path).values
            self.assertTrue(np.all(np.isfinite(p)), path)
            self.assertGreaterEqual(p.min(), 1.0, path)
            self.assertLessEqual(p.max(), 2.0, path)

    def test_random_fields(self):
        grid = Grid(32, 10.0)
        cfg = ExponentConfig(cap_M=0.5)
        for i, u in enumerate(random_fields(grid, 1000, 17)):
            with self.subTest(field=i):
                self.check_range(u, cfg)

    def test_structured_fields(self):
        for n in (32, 64):
            grid = Grid(n, 10.0)
            for cfg in (ExponentConfig(), ExponentConfig(delta_tilde=3.0, cap_M=1e-3)):
                for i, u in enumerate(structured_fields(grid)):
                    with self.subTest(n=n, field=i, delta_tilde=cfg.delta_tilde):
                        self.check_range(u, cfg)


class TestPartition(unittest.TestCase):
    def test_thresholds(self):
        grid = Grid(7, 1.0)
        column = np.array([1.0, 1.1, 1.25, 1.5, 1.75, 1.9, 2.0])
        p = ScalarField(grid, np.tile(column[:, None], (1, 7)))
        partition = partition_domain(p, 0.25)

        self.assertEqual(partition.mask1[:, 0].tolist(), [True, True, False, False, False, False, False])
        self.assertEqual(partition.mask2[:, 0].tolist(), [False, False, True, True, True, False, False])
        self.assertEqual(partition.mask3[:, 0].tolist(), [False, False, False, False, False, True, True])

    def test_ramp_covers_domain(self):
        grid = Grid(32, 1.0)
        p = ScalarField(grid, np.tile(np.linspace(1.0, 2.0, 32), (32, 1)))
        partition = partition_domain(p, 0.1)

        total = partition.mask1.astype(int) + partition.mask2 + partition.mask3
        self.assertTrue(np.all(total == 1))
        self.assertAlmostEqual(sum(partition.fractions()), 1.0)
        self.assertTrue(all(f > 0.0 for f in partition.fractions()))

    def test_ramp_fractions(self):
        grid = Grid(256, 1.0)
        p = ScalarField(grid, np.tile(np.linspace(1.0, 2.0, 256), (256, 1)))
        np.testing.assert_allclose(partition_domain(p, 0.1).fractions(), (0.1, 0.8, 0.1), atol=0.01)

    def test_invalid_epsilon(self):
        grid = Grid(4, 1.0)
        with self.assertRaises(ParameterDomainError):
            partition_domain(ScalarField.constant(grid, 1.5), 0.5)
        with self.assertRaises(ParameterDomainError):
            partition_domain(ScalarField.constant(grid, 1.5), 0.0)


if __name__ == "__main__":
    unittest.main()
