"""Inner subproblems of the splitting scheme.

With w the splitting variable for grad(u), the variable exponent functional splits pointwise into

* Omega_1 (p near 1): |w| + (lt/2)|w - grad u|^2, solved by isotropic shrinkage;
* Omega_2: |w|^p + (lt/2)|w - grad u|^2, solved by a few steps of adaptive gradient descent;
* Omega_3 (p near 2): |w|^2 + (lt/2)|w - grad u|^2, solved in closed form;

and u is recovered from w in the Fourier domain.
"""
import logging
import math

import numpy as np

from .fields import Grid, ScalarField, VectorField, SpectrumField
from .structs import SplitConfig
from .transforms import symbol_arrays, real_part_checked
from .utility import check_range, NumericalDegeneracyError

logger = logging.getLogger(__name__)


# Array kernels --------------------------------------------------------------------------------------------------------
def shrink(a1, a2, mask, lambda_tilde):
    magnitude = np.hypot(a1, a2)
    threshold = 1.0 / lambda_tilde
    with np.errstate(divide="ignore", invalid="ignore"):
        factor = np.where(magnitude > threshold, (magnitude - threshold) / magnitude, 0.0)
    factor = np.where(mask, factor, 0.0)
    return factor * a1, factor * a2


def quadratic(a1, a2, mask, lambda_tilde):
    factor = lambda_tilde / (lambda_tilde + 2.0)
    return np.where(mask, factor * a1, 0.0), np.where(mask, factor * a2, 0.0)


def sub2_energy(w1, w2, a1, a2, p, mask, lambda_tilde, weight):
    magnitude = np.hypot(w1[mask], w2[mask])
    penalty = (w1[mask] - a1[mask]) ** 2 + (w2[mask] - a2[mask]) ** 2
    return weight * float(np.sum(magnitude ** p[mask] + 0.5 * lambda_tilde * penalty))


def descend(a1, a2, p, mask, lambda_tilde, cfg: SplitConfig, weight):
    """Adaptive gradient descent on the Omega_2 energy.

    Returns
    -------
    tuple
        (w1, w2, accepted_steps)
    """
    w1 = np.where(mask, a1, 0.0)
    w2 = np.where(mask, a2, 0.0)
    if not np.any(mask):
        return w1, w2, 0

    # Only masked pixels take part: off-mask exponents are replaced so they cannot produce spurious non-finite values
    p = np.where(mask, p, 2.0)
    energy = sub2_energy(w1, w2, a1, a2, p, mask, lambda_tilde, weight)
    dt = cfg.dt0
    accepted = 0

    for _ in range(cfg.ell_max):
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            magnitude = np.sqrt(w1 ** 2 + w2 ** 2 + cfg.eta ** 2)
            coefficient = p * magnitude ** (p - 2.0)
            r1 = np.where(mask, coefficient * w1 + lambda_tilde * (w1 - a1), 0.0)
            r2 = np.where(mask, coefficient * w2 + lambda_tilde * (w2 - a2), 0.0)

        if not (np.all(np.isfinite(r1)) and np.all(np.isfinite(r2))):
            raise NumericalDegeneracyError(
                "Omega_2 residual became non-finite; |w| vanished with eta = " + str(cfg.eta))

        t1 = w1 - dt * r1
        t2 = w2 - dt * r2
        trial = sub2_energy(t1, t2, a1, a2, p, mask, lambda_tilde, weight)

        if trial < energy:
            step = math.sqrt(weight * float(np.sum((t1 - w1) ** 2 + (t2 - w2) ** 2)))
            w1, w2, energy = t1, t2, trial
            dt *= 1.0 + cfg.s
            accepted += 1
            if step <= cfg.tol:
                break
        else:
            dt *= 1.0 - cfg.s

    return w1, w2, accepted


def solve_u_spectrum(w1, w2, g_m_hat, s_hat, lambda_eff, lambda_tilde, grid: Grid):
    d1, d2 = symbol_arrays(grid)
    numerator = lambda_eff * s_hat * g_m_hat + lambda_tilde * (np.conj(d1) * np.fft.fft2(w1) +
                                                              np.conj(d2) * np.fft.fft2(w2))
    denominator = lambda_eff * s_hat ** 2 + lambda_tilde * (np.abs(d1) ** 2 + np.abs(d2) ** 2)
    if not np.all(denominator > 0.0):
        raise RuntimeError("u-update denominator vanished: multiplier must be positive and lambda > 0")
    return numerator / denominator


# Public operations ----------------------------------------------------------------------------------------------------
def solve_w1(grad_u: VectorField, mask1, lambda_tilde):
    """Isotropic shrinkage of grad(u) with threshold 1 / lambda_tilde on Omega_1.

    Returns
    -------
    VectorField
        (|a| - 1/lt) a / |a| where |a| > 1/lt inside the mask, 0 elsewhere.
    """
    check_range("lambda_tilde", lambda_tilde, 0.0, low_open=True)
    w1, w2 = shrink(grad_u.comp1, grad_u.comp2, mask1, lambda_tilde)
    return VectorField(grad_u.grid, w1, w2)


def solve_w3(grad_u: VectorField, mask3, lambda_tilde):
    """Minimizer lt grad(u) / (lt + 2) of |w|^2 + (lt/2)|w - grad u|^2 on Omega_3, 0 elsewhere."""
    check_range("lambda_tilde", lambda_tilde, 0.0, low_open=True)
    w1, w2 = quadratic(grad_u.comp1, grad_u.comp2, mask3, lambda_tilde)
    return VectorField(grad_u.grid, w1, w2)


def sub2_objective(w2: VectorField, grad_u: VectorField, p_tilde, mask2, lambda_tilde):
    """Quadrature of |w|^p + (lt/2)|w - grad u|^2 over Omega_2.

    Parameters
    ----------
    w2, grad_u : VectorField
    p_tilde : ScalarField or numpy.ndarray
    mask2 : numpy.ndarray of bool
    lambda_tilde : float

    Returns
    -------
    float
    """
    p = p_tilde.values if isinstance(p_tilde, ScalarField) else np.asarray(p_tilde, dtype=float)
    return sub2_energy(w2.comp1, w2.comp2, grad_u.comp1, grad_u.comp2, p, np.asarray(mask2, dtype=bool),
                       lambda_tilde, w2.grid.weight)


def solve_w2(grad_u: VectorField, p_tilde, mask2, cfg: SplitConfig, return_steps=False):
    """A few adaptive gradient-descent steps on the Omega_2 energy, started from grad(u) on the mask.

    A trial step w - dt * r is accepted only if it lowers the energy, after which dt grows by (1 + s); otherwise dt
    shrinks by (1 - s). The loop ends after `cfg.ell_max` trials or once an accepted step moves w by at most
    `cfg.tol`.

    Parameters
    ----------
    grad_u : VectorField
    p_tilde : ScalarField or numpy.ndarray
        Exponents, in [1 + eps, 2 - eps] on the mask.
    mask2 : numpy.ndarray of bool
    cfg : SplitConfig
    return_steps : bool
        Also return the number of accepted steps.

    Raises
    ------
    NumericalDegeneracyError
        If the residual becomes non-finite, which needs eta = 0 and a vanishing |w|.

    Returns
    -------
    VectorField or tuple
        The new w, or (w, accepted_steps) when `return_steps` is set.
    """
    lambda_tilde = cfg.lambda_tilde
    p = p_tilde.values if isinstance(p_tilde, ScalarField) else np.asarray(p_tilde, dtype=float)
    w1, w2, accepted = descend(grad_u.comp1, grad_u.comp2, p, np.asarray(mask2, dtype=bool), lambda_tilde, cfg,
                               grad_u.grid.weight)
    result = VectorField(grad_u.grid, w1, w2)
    if return_steps:
        return result, accepted
    return result


def solve_u(w_star: VectorField, g_m_hat: SpectrumField, S_hat, cfg: SplitConfig, grid: Grid):
    """Fourier-domain minimizer of (lambda_eff/2)||Su - g_m||^2 + (lt/2)||w - Du||^2 with periodic differences D.

    u_hat = (lambda_eff S_hat g_m_hat + lt conj(d) . w_hat) / (lambda_eff S_hat^2 + lt |d|^2).

    Parameters
    ----------
    w_star : VectorField
    g_m_hat : SpectrumField
    S_hat : ScalarField or numpy.ndarray
        Multiplier in natural FFT order.
    cfg : SplitConfig
    grid : Grid

    Returns
    -------
    ScalarField
    """
    lambda_tilde = cfg.lambda_tilde
    s_hat = S_hat.values if isinstance(S_hat, ScalarField) else np.asarray(S_hat, dtype=float)
    grid.check_shape(s_hat, "multiplier")
    u_hat = solve_u_spectrum(w_star.comp1, w_star.comp2, g_m_hat.values, s_hat, grid.fidelity_weight(cfg.lambda_),
                             lambda_tilde, grid)
    return ScalarField(grid, real_part_checked(np.fft.ifft2(u_hat)))
