"""Uniform grid over [-L, L]^2 and the field containers that live on it."""
from dataclasses import dataclass
import math

import numpy as np

from .globals import FIDELITY_SCALE
from .utility import check_finite, check_range, DimensionMismatchError, ParameterDomainError


@dataclass(frozen=True)
class Grid:
    """Uniform N x N grid over [-L, L]^2.

    Nodes are x_i = -L + i dx, i in [0, N), with dx = 2L / N. Fields are stored with axis 0 along x1 and axis 1 along
    x2. Frequencies are kept in natural FFT order, xi_k = 2 pi fftfreq(N, dx); `freq_logical` gives them sorted over
    [-nyquist, nyquist).

    Parameters
    ----------
    N : int
        Points per axis.
    L : float
        Half-width of the domain.
    """
    N: int
    L: float

    def __post_init__(self):
        if isinstance(self.N, bool) or int(self.N) != self.N:
            raise ParameterDomainError("N must be an integer, got " + str(self.N))
        check_range("N", self.N, 1)
        check_range("L", self.L, 0.0, low_open=True)
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "L", float(self.L))

    @property
    def shape(self):
        return self.N, self.N

    @property
    def dx(self):
        """Grid spacing 2L / N."""
        return 2.0 * self.L / self.N

    @property
    def nodes(self):
        """Node coordinates along one axis."""
        return -self.L + self.dx * np.arange(self.N)

    def mesh(self):
        """Node coordinates (X1, X2) on the full grid, axis 0 along x1."""
        return np.meshgrid(self.nodes, self.nodes, indexing="ij")

    @property
    def freq(self):
        """Angular frequencies along one axis, natural FFT order."""
        return 2.0 * math.pi * np.fft.fftfreq(self.N, self.dx)

    @property
    def freq_logical(self):
        """Angular frequencies along one axis, sorted."""
        return np.fft.fftshift(self.freq)

    def xi_mesh(self):
        """Frequencies (XI1, XI2) on the full grid, natural FFT order."""
        return np.meshgrid(self.freq, self.freq, indexing="ij")

    def xi_magnitude(self):
        """|xi| on the full grid, natural FFT order."""
        xi1, xi2 = self.xi_mesh()
        return np.hypot(xi1, xi2)

    @property
    def nyquist(self):
        """Largest representable angular frequency, pi / dx."""
        return math.pi / self.dx

    @property
    def sampling_frequency(self):
        """Width 2 pi / dx = pi N / L of the frequency window."""
        return 2.0 * math.pi / self.dx

    @property
    def area(self):
        """|Omega| = (2L)^2."""
        return (2.0 * self.L) ** 2

    @property
    def weight(self):
        """Quadrature weight dx^2 of spatial sums."""
        return self.dx ** 2

    @property
    def spectral_weight(self):
        """Weight dx^2 / N^2 that makes spectral sums equal spatial norms."""
        return self.dx ** 2 / self.N ** 2

    def fidelity_weight(self, lambda_):
        """Fidelity weight lambda_eff = FIDELITY_SCALE * lambda applied to dx^2-weighted norms.

        The scale does not depend on N, so a given lambda stops after a similar number of steps on every grid.
        """
        return FIDELITY_SCALE * lambda_

    def norm(self, values):
        """dx^2-weighted L2 norm of a real or complex array on this grid."""
        return math.sqrt(self.weight * float(np.sum(np.abs(values) ** 2)))

    def inner(self, a, b):
        """dx^2-weighted inner product of two real arrays on this grid."""
        return self.weight * float(np.sum(a * b))

    def check_shape(self, values, what="array"):
        if np.shape(values) != self.shape:
            raise DimensionMismatchError(
                what + " has shape " + str(np.shape(values)) + ", grid requires " + str(self.shape))


def _same_grid(a, b):
    if a.grid != b.grid:
        raise DimensionMismatchError("fields live on different grids: " + repr(a.grid) + " and " + repr(b.grid))


class ScalarField:
    def __init__(self, grid: Grid, values, check=True):
        """A real field sampled on the grid nodes.

        Parameters
        ----------
        grid : Grid
        values : array_like
            Real N x N array.
        check : bool
            Reject non-finite entries.

        Raises
        ------
        DimensionMismatchError
            If `values` does not match the grid.
        ValueError
            If `values` holds non-finite entries and `check` is True.
        """
        values = np.asarray(values, dtype=float)
        grid.check_shape(values, "scalar field")
        if check:
            check_finite(values, "scalar field")

        self.grid = grid
        self.values = values

    @classmethod
    def zeros(cls, grid):
        return cls(grid, np.zeros(grid.shape))

    @classmethod
    def constant(cls, grid, value):
        return cls(grid, np.full(grid.shape, float(value)))

    def norm(self):
        """dx^2-weighted L2 norm."""
        return self.grid.norm(self.values)

    def inner(self, other):
        """dx^2-weighted inner product."""
        _same_grid(self, other)
        return self.grid.inner(self.values, other.values)

    def mean(self):
        return float(np.mean(self.values))

    def copy(self):
        return ScalarField(self.grid, self.values.copy(), check=False)

    def _operand(self, other):
        if isinstance(other, ScalarField):
            _same_grid(self, other)
            return other.values
        return other

    def __add__(self, other):
        return ScalarField(self.grid, self.values + self._operand(other))

    def __sub__(self, other):
        return ScalarField(self.grid, self.values - self._operand(other))

    def __mul__(self, other):
        return ScalarField(self.grid, self.values * self._operand(other))

    __radd__ = __add__
    __rmul__ = __mul__

    def __neg__(self):
        return ScalarField(self.grid, -self.values)

    def __repr__(self):
        return "ScalarField(" + repr(self.grid) + ")"


class VectorField:
    def __init__(self, grid: Grid, comp1, comp2, check=True):
        """A real vector field, components along x1 and x2.

        Parameters
        ----------
        grid : Grid
        comp1, comp2 : array_like
            Real N x N arrays.
        check : bool
            Reject non-finite entries.
        """
        comp1 = np.asarray(comp1, dtype=float)
        comp2 = np.asarray(comp2, dtype=float)
        grid.check_shape(comp1, "vector field component 1")
        grid.check_shape(comp2, "vector field component 2")
        if check:
            check_finite(comp1, "vector field component 1")
            check_finite(comp2, "vector field component 2")

        self.grid = grid
        self.comp1 = comp1
        self.comp2 = comp2

    @classmethod
    def zeros(cls, grid):
        return cls(grid, np.zeros(grid.shape), np.zeros(grid.shape))

    def magnitude(self):
        """Pointwise |w| as an array."""
        return np.hypot(self.comp1, self.comp2)

    def norm(self):
        return math.sqrt(self.grid.weight * float(np.sum(self.comp1 ** 2 + self.comp2 ** 2)))

    def inner(self, other):
        _same_grid(self, other)
        return self.grid.inner(self.comp1, other.comp1) + self.grid.inner(self.comp2, other.comp2)

    def masked(self, mask):
        """Copy with the components zeroed outside `mask`."""
        return VectorField(self.grid, np.where(mask, self.comp1, 0.0), np.where(mask, self.comp2, 0.0), check=False)

    def __add__(self, other):
        _same_grid(self, other)
        return VectorField(self.grid, self.comp1 + other.comp1, self.comp2 + other.comp2)

    def __sub__(self, other):
        _same_grid(self, other)
        return VectorField(self.grid, self.comp1 - other.comp1, self.comp2 - other.comp2)

    def __mul__(self, scalar):
        return VectorField(self.grid, self.comp1 * scalar, self.comp2 * scalar)

    __rmul__ = __mul__

    def __repr__(self):
        return "VectorField(" + repr(self.grid) + ")"


class SpectrumField:
    def __init__(self, grid: Grid, values, check=True):
        """Complex spectrum on the frequency grid, natural FFT order.

        Parameters
        ----------
        grid : Grid
        values : array_like
            Complex N x N array.
        check : bool
            Reject non-finite entries.
        """
        values = np.asarray(values, dtype=complex)
        grid.check_shape(values, "spectrum")
        if check:
            check_finite(values, "spectrum")

        self.grid = grid
        self.values = values

    def norm(self):
        """Spectral norm, equal to the spatial L2 norm of the inverse transform."""
        return math.sqrt(self.grid.spectral_weight * float(np.sum(np.abs(self.values) ** 2)))

    def hermitian_defect(self):
        """Relative distance to Hermitian symmetry F(-xi) = conj(F(xi)).

        Returns
        -------
        float
            0 for the spectrum of a real field (up to rounding).
        """
        flipped = np.roll(self.values[::-1, ::-1], 1, axis=(0, 1))
        scale = np.linalg.norm(self.values)
        if scale == 0.0:
            return 0.0
        return float(np.linalg.norm(self.values - np.conj(flipped)) / scale)

    def __add__(self, other):
        _same_grid(self, other)
        return SpectrumField(self.grid, self.values + other.values)

    def __sub__(self, other):
        _same_grid(self, other)
        return SpectrumField(self.grid, self.values - other.values)

    def __mul__(self, other):
        if isinstance(other, (SpectrumField, ScalarField)):
            _same_grid(self, other)
            other = other.values
        return SpectrumField(self.grid, self.values * other)

    __rmul__ = __mul__

    def __repr__(self):
        return "SpectrumField(" + repr(self.grid) + ")"
