"""Spatially varying exponent p(x) in [1, 2] and the three-way split of the domain it induces."""
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .fields import ScalarField
from .globals import GAUSSIAN_TRUNCATE, CANNY_SIGMA_PX, CANNY_HIGH_PERCENTILE, CANNY_LOW_RATIO
from .structs import ExponentConfig, ExponentPath
from .transforms import forward_differences
from .utility import check_range, check_finite

# Neighbour offsets (axis 0, axis 1) along the quantized gradient directions 0, 45, 90 and 135 degrees
_NMS_OFFSETS = ((0, 1), (1, 1), (1, 0), (1, -1))


@dataclass(frozen=True)
class DomainPartition:
    """Boolean masks of the shrinkage, descent and quadratic regions."""
    mask1: np.ndarray  # p < 1 + epsilon
    mask2: np.ndarray  # 1 + epsilon <= p <= 2 - epsilon
    mask3: np.ndarray  # p > 2 - epsilon

    def fractions(self):
        """Share of grid nodes in each region."""
        return tuple(float(np.mean(m)) for m in (self.mask1, self.mask2, self.mask3))


def detect_edges(u: ScalarField):
    """Canny edge detector with percentile thresholds.

    Steps: Gaussian pre-smoothing with a standard deviation of sqrt(2) pixels, central-difference gradient, non-maximum
    suppression along the gradient direction quantized to 45 degrees, then hysteresis. The high threshold is the 70th
    percentile of the nonzero gradient magnitudes and the low one is 0.4 of it, so the result does not change when u
    is multiplied by a positive constant.

    Parameters
    ----------
    u : ScalarField

    Returns
    -------
    ScalarField
        1 on edge pixels, 0 elsewhere. A constant field has no edges.
    """
    values = u.values
    empty = ScalarField(u.grid, np.zeros(u.grid.shape))
    if np.ptp(values) == 0.0:
        return empty

    smooth = ndimage.gaussian_filter(values, CANNY_SIGMA_PX, mode="nearest", truncate=GAUSSIAN_TRUNCATE)
    g0, g1 = np.gradient(smooth)
    magnitude = np.hypot(g0, g1)

    peak = magnitude.max()
    if peak == 0.0:
        return empty
    nonzero = magnitude > 1e-12 * peak

    # Non-maximum suppression ------------------------------------------------------------------------------------------
    angle = np.rad2deg(np.arctan2(g0, g1)) % 180.0
    sector = ((angle + 22.5) // 45.0).astype(int) % 4
    padded = np.pad(magnitude, 1, mode="edge")
    n0, n1 = magnitude.shape

    def neighbour(d0, d1):
        return padded[1 + d0:1 + d0 + n0, 1 + d1:1 + d1 + n1]

    thin = np.zeros(magnitude.shape, dtype=bool)
    for s, (d0, d1) in enumerate(_NMS_OFFSETS):
        thin |= (sector == s) & (magnitude >= neighbour(d0, d1)) & (magnitude >= neighbour(-d0, -d1))
    thin &= nonzero

    # Hysteresis -------------------------------------------------------------------------------------------------------
    high = np.percentile(magnitude[nonzero], CANNY_HIGH_PERCENTILE)
    low = CANNY_LOW_RATIO * high
    strong = thin & (magnitude >= high)
    weak = thin & (magnitude >= low)

    labels, _ = ndimage.label(weak, structure=np.ones((3, 3), dtype=bool))
    kept = np.unique(labels[strong])
    kept = kept[kept > 0]
    edges = np.isin(labels, kept)

    return ScalarField(u.grid, edges.astype(float))


def gaussian_smooth(f: ScalarField, sigma):
    """Convolve with a normalized Gaussian of standard deviation `sigma` (physical units), truncated at 4 sigma.

    The field is extended periodically, which keeps the grid mean unchanged.

    Parameters
    ----------
    f : ScalarField
    sigma : float
        Standard deviation, > 0.

    Returns
    -------
    ScalarField
    """
    check_range("sigma", sigma, 0.0, low_open=True)
    smoothed = ndimage.gaussian_filter(f.values, sigma / f.grid.dx, mode="wrap", truncate=GAUSSIAN_TRUNCATE)
    return ScalarField(f.grid, smoothed)


def exponent_from_edges(u: ScalarField, cfg: ExponentConfig):
    """p = 2 - G * E(u): near 1 on edges, 2 away from them. G has a standard deviation of delta_tilde pixels.

    Returns
    -------
    ScalarField
        Values in [1, 2].
    """
    edges = detect_edges(u)
    if not np.any(edges.values):
        return ScalarField.constant(u.grid, 2.0)

    smoothed = gaussian_smooth(edges, cfg.delta_tilde * u.grid.dx).values
    return ScalarField(u.grid, np.clip(2.0 - smoothed, 1.0, 2.0))


def pm_polynomial(s, cap_M):
    """P_M(s) = 2 - 10 (s/M)^3 + 15 (s/M)^4 - 6 (s/M)^5 for s < M, 1 beyond.

    Decreases monotonically from 2 at s = 0 to 1 at s = M with vanishing first and second derivatives at both ends.
    """
    t = np.minimum(np.asarray(s, dtype=float) / cap_M, 1.0)
    return 2.0 - t ** 3 * (10.0 - 15.0 * t + 6.0 * t ** 2)


def exponent_pm(u: ScalarField, cfg: ExponentConfig):
    """p = P_M(|grad(G * u)|^2).

    Returns
    -------
    ScalarField
        Values in [1, 2].
    """
    smoothed = gaussian_smooth(u, cfg.delta_tilde * u.grid.dx)
    d1, d2 = forward_differences(smoothed.values, u.grid.dx)
    p = pm_polynomial(d1 ** 2 + d2 ** 2, cfg.cap_M)
    return ScalarField(u.grid, np.clip(p, 1.0, 2.0))


def build_exponent(u: ScalarField, cfg: ExponentConfig, path: ExponentPath):
    """Exponent map for the requested path."""
    if path is ExponentPath.EDGES:
        return exponent_from_edges(u, cfg)
    if path is ExponentPath.PM:
        return exponent_pm(u, cfg)
    if path is ExponentPath.ONE:
        return ScalarField.constant(u.grid, 1.0)
    if path is ExponentPath.TWO:
        return ScalarField.constant(u.grid, 2.0)
    raise ValueError("unknown exponent path " + repr(path))


def partition_domain(p_tilde: ScalarField, epsilon):
    """Split the grid by exponent value.

    Parameters
    ----------
    p_tilde : ScalarField
        Values in [1, 2].
    epsilon : float
        Threshold in (0, 1/2).

    Returns
    -------
    DomainPartition
        Omega_1 = {p < 1 + eps}, Omega_2 = {1 + eps <= p <= 2 - eps}, Omega_3 = {p > 2 - eps}.
    """
    check_range("epsilon", epsilon, 0.0, 0.5, low_open=True, high_open=True)
    p = p_tilde.values
    check_finite(p, "exponent map")

    mask1 = p < 1.0 + epsilon
    mask3 = p > 2.0 - epsilon
    mask2 = ~(mask1 | mask3)
    return DomainPartition(mask1, mask2, mask3)
