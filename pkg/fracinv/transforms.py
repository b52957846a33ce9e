"""Discrete Fourier transforms, difference operators and their frequency symbols."""
import functools
import logging

import numpy as np

from .fields import Grid, ScalarField, VectorField, SpectrumField
from .globals import SYMMETRY_WARN, SYMMETRY_FAIL
from .utility import SymmetryViolationError, DimensionMismatchError

logger = logging.getLogger(__name__)


# Array kernels --------------------------------------------------------------------------------------------------------
def forward_differences(values, dx):
    """Forward differences along both axes, zero in the last row (axis 0) and last column (axis 1)."""
    d1 = np.zeros_like(values)
    d2 = np.zeros_like(values)
    d1[:-1, :] = (values[1:, :] - values[:-1, :]) / dx
    d2[:, :-1] = (values[:, 1:] - values[:, :-1]) / dx
    return d1, d2


def backward_divergence(comp1, comp2, dx):
    """Negative adjoint of `forward_differences` under the dx^2-weighted inner product."""
    out = np.zeros_like(comp1)

    out[0, :] += comp1[0, :]
    out[1:-1, :] += comp1[1:-1, :] - comp1[:-2, :]
    out[-1, :] -= comp1[-2, :]

    out[:, 0] += comp2[:, 0]
    out[:, 1:-1] += comp2[:, 1:-1] - comp2[:, :-2]
    out[:, -1] -= comp2[:, -2]

    return out / dx


@functools.lru_cache(maxsize=16)
def symbol_arrays(grid: Grid):
    """Periodic forward-difference symbols (d1, d2) on the full frequency grid, read-only and shared."""
    xi1, xi2 = grid.xi_mesh()
    d1 = (np.exp(1j * xi1 * grid.dx) - 1.0) / grid.dx
    d2 = (np.exp(1j * xi2 * grid.dx) - 1.0) / grid.dx
    d1.setflags(write=False)
    d2.setflags(write=False)
    return d1, d2


def real_part_checked(values):
    """Real part of an inverse DFT, rejecting a non-negligible imaginary residue.

    Raises
    ------
    SymmetryViolationError
        If ||imag|| / ||values|| exceeds SYMMETRY_FAIL.
    """
    scale = np.linalg.norm(values)
    if scale > 0.0:
        residue = np.linalg.norm(values.imag) / scale
        if residue > SYMMETRY_FAIL:
            raise SymmetryViolationError(
                "inverse transform has relative imaginary residue " + str(residue) + ", limit " + str(SYMMETRY_FAIL))
        if residue > SYMMETRY_WARN:
            logger.warning("inverse transform imaginary residue %.3e", residue)
    return np.ascontiguousarray(values.real)


# Public operations ----------------------------------------------------------------------------------------------------
def transform(f, grid: Grid = None):
    """Forward DFT of a real field.

    Parameters
    ----------
    f : ScalarField or numpy.ndarray
        A field, or a raw N x N array such as one VectorField component (then `grid` is required).
    grid : Grid, optional

    Raises
    ------
    DimensionMismatchError
        If a raw array does not match `grid`, or no grid is known.

    Returns
    -------
    SpectrumField
        Unnormalized DFT in natural FFT order. `SpectrumField.norm()` equals `f.norm()`.
    """
    if isinstance(f, ScalarField):
        if grid is not None and grid != f.grid:
            raise DimensionMismatchError("field grid " + repr(f.grid) + " does not match " + repr(grid))
        grid, values = f.grid, f.values
    else:
        if grid is None:
            raise DimensionMismatchError("a grid is required to transform a raw array")
        values = np.asarray(f, dtype=float)
        grid.check_shape(values, "array")

    return SpectrumField(grid, np.fft.fft2(values))


def inverse_transform(F: SpectrumField):
    """Inverse DFT, returning the real part.

    Raises
    ------
    SymmetryViolationError
        If the spectrum is far from Hermitian, so that the inverse has a large imaginary part.

    Returns
    -------
    ScalarField
    """
    return ScalarField(F.grid, real_part_checked(np.fft.ifft2(F.values)))


def gradient(u: ScalarField):
    """Forward-difference gradient with zero last row (component 1) and zero last column (component 2).

    Returns
    -------
    VectorField
    """
    d1, d2 = forward_differences(u.values, u.grid.dx)
    return VectorField(u.grid, d1, d2)


def divergence(w: VectorField):
    """Backward-difference divergence, the exact negative adjoint of `gradient`.

    Returns
    -------
    ScalarField
        Satisfies <gradient(u), w> = -<u, divergence(w)>.
    """
    return ScalarField(w.grid, backward_divergence(w.comp1, w.comp2, w.grid.dx))


def difference_symbols(grid: Grid):
    """Frequency symbols d_k(xi) = (exp(i xi_k dx) - 1) / dx of the periodic forward differences.

    Returns
    -------
    tuple of SpectrumField
        (d1, d2) on the full frequency grid.
    """
    d1, d2 = symbol_arrays(grid)
    return SpectrumField(grid, d1), SpectrumField(grid, d2)
