"""Forward diffusion operator, noise model and the synthetic initial fields."""
import functools
import logging
import math

import numpy as np

from .fields import Grid, ScalarField, SpectrumField
from .special_functions import spectral_multiplier
from .structs import ModelParams, NoiseSpec
from .transforms import real_part_checked
from .utility import ParameterDomainError

logger = logging.getLogger(__name__)


@functools.lru_cache(maxsize=32)
def forward_multiplier(model: ModelParams, grid: Grid):
    """S_hat(xi) = E_{alpha,1}(-|xi|^beta T^alpha) on the full frequency grid.

    Returns
    -------
    numpy.ndarray
        Real N x N array in natural FFT order. The array is read-only and shared between callers.
    """
    logger.debug("building spectral multiplier for %r on %r", model, grid)
    values = spectral_multiplier(model, grid.xi_magnitude())
    values.setflags(write=False)
    return values


def apply_forward(u: ScalarField, model: ModelParams):
    """Apply the forward operator S, i.e. evaluate the diffusion solution at time T.

    Parameters
    ----------
    u : ScalarField
        Initial field.
    model : ModelParams

    Returns
    -------
    ScalarField
        inverse_transform(S_hat * transform(u)). The grid mean is preserved and ||Su|| <= ||u||.
    """
    s_hat = forward_multiplier(model, u.grid)
    return ScalarField(u.grid, real_part_checked(np.fft.ifft2(s_hat * np.fft.fft2(u.values))))


def add_noise(g: ScalarField, spec: NoiseSpec):
    """Return g + delta * Z * max(g), Z i.i.d. standard normal drawn from a generator seeded with `spec.seed`.

    Parameters
    ----------
    g : ScalarField
    spec : NoiseSpec

    Returns
    -------
    ScalarField
        A new field; equal to `g` when delta is 0.
    """
    if spec.delta == 0.0:
        return g.copy()

    rng = np.random.default_rng(spec.seed)
    z = rng.standard_normal(g.grid.shape)
    return ScalarField(g.grid, g.values + spec.delta * z * np.max(g.values))


def realized_noise_level(g_delta: ScalarField, g: ScalarField):
    """dx^2-weighted L2 norm of the noise actually added."""
    return (g_delta - g).norm()


# Synthetic fields -----------------------------------------------------------------------------------------------------
def gaussian_initial(grid: Grid):
    """u(x) = exp(-|x|^2) sampled at the grid nodes."""
    x1, x2 = grid.mesh()
    return ScalarField(grid, np.exp(-(x1 ** 2 + x2 ** 2)))


def gaussian_spectrum(grid: Grid):
    """DFT of `gaussian_initial` from the continuous transform pi * exp(-|xi|^2 / 4).

    The sampled DFT relates to the continuous transform by a factor 1 / dx^2 and the phase exp(-i (xi1 + xi2) L) of
    the node offset, which is (-1)^(k1 + k2) on this grid. Accurate while exp(-nyquist^2 / 4) and exp(-L^2) are
    negligible.

    Returns
    -------
    SpectrumField
    """
    xi1, xi2 = grid.xi_mesh()
    k1, k2 = np.indices(grid.shape)
    sign = np.where((k1 + k2) % 2 == 0, 1.0, -1.0)
    values = math.pi * np.exp(-(xi1 ** 2 + xi2 ** 2) / 4.0) * sign / grid.weight
    return SpectrumField(grid, values.astype(complex))


# Shepp-Logan ----------------------------------------------------------------------------------------------------------
# Columns: gray value, horizontal semi-axis, vertical semi-axis, center x, center y, rotation (degrees).
# Coordinates are on [-1, 1]^2 with y pointing up.
_SHEPP_LOGAN_GEOMETRY = np.array([
    [0.69, 0.92, 0.0, 0.0, 0.0],
    [0.6624, 0.874, 0.0, -0.0184, 0.0],
    [0.11, 0.31, 0.22, 0.0, -18.0],
    [0.16, 0.41, -0.22, 0.0, 18.0],
    [0.21, 0.25, 0.0, 0.35, 0.0],
    [0.046, 0.046, 0.0, 0.1, 0.0],
    [0.046, 0.046, 0.0, -0.1, 0.0],
    [0.046, 0.023, -0.08, -0.605, 0.0],
    [0.023, 0.023, 0.0, -0.606, 0.0],
    [0.023, 0.046, 0.06, -0.605, 0.0],
])

SHEPP_LOGAN_MODIFIED_GRAY = np.array([1.0, -0.8, -0.2, -0.2, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1])
"""Contrast-enhanced gray values, the table used by common phantom generators by default"""

SHEPP_LOGAN_ORIGINAL_GRAY = np.array([2.0, -0.98, -0.02, -0.02, 0.01, 0.01, 0.01, 0.01, 0.01, 0.01])


def shepp_logan_ellipses(modified=True):
    """Ellipse table as rows (gray, a, b, x0, y0, theta_deg)."""
    gray = SHEPP_LOGAN_MODIFIED_GRAY if modified else SHEPP_LOGAN_ORIGINAL_GRAY
    return np.column_stack((gray, _SHEPP_LOGAN_GEOMETRY))


def shepp_logan_phantom(grid: Grid, modified=True):
    """Shepp-Logan head phantom on the grid.

    The phantom's square [-1, 1]^2 is mapped onto [-L, L]^2 with image rows along x1 (top row at x1 = -L) and image
    columns along x2. Each node takes the sum of the gray values of the ellipses containing it, clipped to [0, 1].

    Parameters
    ----------
    grid : Grid
        N must be at least 32.
    modified : bool
        Use the contrast-enhanced gray values instead of the original ones.

    Raises
    ------
    ParameterDomainError
        If N < 32.

    Returns
    -------
    ScalarField
    """
    if grid.N < 32:
        raise ParameterDomainError("phantom requires N >= 32, got " + str(grid.N))

    x1, x2 = grid.mesh()
    X = x2 / grid.L
    Y = -x1 / grid.L

    phantom = np.zeros(grid.shape)
    for gray, a, b, xc, yc, theta_deg in shepp_logan_ellipses(modified):
        theta = math.radians(theta_deg)
        ct, st = math.cos(theta), math.sin(theta)
        inside = (
            ((X - xc) * ct + (Y - yc) * st) ** 2 / a ** 2 +
            ((X - xc) * st - (Y - yc) * ct) ** 2 / b ** 2 <= 1.0)
        phantom[inside] += gray

    np.clip(phantom, 0.0, 1.0, out=phantom)
    return ScalarField(grid, phantom)
