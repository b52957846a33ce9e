"""Mittag-Leffler function on the negative real axis and the spectral symbol of the forward operator.

E_{alpha,1}(-x) is evaluated in three regimes:

* Taylor series sum_k (-x)^k / Gamma(alpha k + 1) for x <= min(5, 8**alpha), summed with compensation;
* the real-axis integral representation for the middle range, integrated adaptively;
* the asymptotic series sum_{k>=1} (-1)^(k+1) x^(-k) / Gamma(1 - alpha k), truncated at its smallest term, for x >= 50.

alpha = 1 reduces to exp(-x) and is evaluated directly.
"""
import functools
import logging
import math

import numpy as np
from scipy import integrate, special

from .fields import ScalarField
from .globals import ML_SERIES_CUTOFF, ML_ASYMPTOTIC_CUTOFF, ML_SERIES_RTOL, ML_SERIES_MAX_TERMS, ML_ASYMPTOTIC_TERMS
from .structs import MLParams, ModelParams
from .utility import ParameterDomainError

logger = logging.getLogger(__name__)


def series_cutoff(alpha):
    """Largest x evaluated with the Taylor series.

    The series terms peak near exp(x**(1/alpha)); keeping x**(1/alpha) <= 8 bounds the cancellation error well below
    1e-10.
    """
    return min(ML_SERIES_CUTOFF, 8.0 ** alpha)


def _neumaier_add(total, compensation, term):
    """One step of vectorized Kahan-Babuska summation."""
    t = total + term
    big = np.abs(total) >= np.abs(term)
    compensation = compensation + np.where(big, (total - t) + term, (term - t) + total)
    return t, compensation


def _series(alpha, gamma, x):
    total = np.zeros_like(x)
    compensation = np.zeros_like(x)
    for k in range(ML_SERIES_MAX_TERMS):
        term = np.power(-x, k) * special.rgamma(alpha * k + gamma)
        total, compensation = _neumaier_add(total, compensation, term)
        if k > 0 and np.all(np.abs(term) <= ML_SERIES_RTOL * np.abs(total + compensation)):
            break
    else:
        logger.warning("Mittag-Leffler series hit the term cap (%d) for alpha=%g", ML_SERIES_MAX_TERMS, alpha)
    return total + compensation


def _asymptotic(alpha, x):
    k = np.arange(1, ML_ASYMPTOTIC_TERMS + 1)[:, None]
    sign = np.where(k % 2 == 1, 1.0, -1.0)
    terms = sign * np.power(x[None, :], -k.astype(float)) * special.rgamma(1.0 - alpha * k)

    # Truncate each column before its smallest non-vanishing term. Terms at poles of Gamma(1 - alpha k) are exactly 0.
    magnitude = np.where(terms == 0.0, np.inf, np.abs(terms))
    smallest = np.argmin(magnitude, axis=0)
    used = np.arange(terms.shape[0])[:, None] < smallest[None, :]
    return np.sum(np.where(used, terms, 0.0)[::-1], axis=0)


@functools.lru_cache(maxsize=1 << 16)
def _integral(alpha, x):
    """E_{alpha,1}(-x) from its real-axis integral representation.

    With v = s x in the Laplace-transform representation of E_alpha(-t^alpha),

        E_{alpha,1}(-x) = sin(alpha pi) / (alpha pi) * int_0^inf exp(-v^(1/alpha)) x / (v^2 + 2 v x cos(alpha pi) + x^2) dv,

    an integrand that is smooth on [0, inf) and positive. For alpha > 1/2 the rational factor peaks at
    v = -x cos(alpha pi), which is passed to the integrator as a breakpoint.
    """
    c = math.cos(alpha * math.pi)
    inv_alpha = 1.0 / alpha
    v_end = 60.0 ** alpha  # exp(-60) is below every tolerance used here

    def integrand(v):
        return math.exp(-v ** inv_alpha) * x / (v * v + 2.0 * v * x * c + x * x)

    points = None
    peak = -x * c
    if 0.0 < peak < v_end:
        points = [peak]

    value, error = integrate.quad(integrand, 0.0, v_end, points=points, epsabs=1e-15, epsrel=1e-13, limit=400)
    if error > 1e-11:
        logger.warning("Mittag-Leffler quadrature error estimate %.3e at alpha=%g, x=%g", error, alpha, x)
    return math.sin(alpha * math.pi) / (alpha * math.pi) * value


def mittag_leffler(params, x):
    """Evaluate E_{alpha,gamma}(-x) for x >= 0.

    Parameters
    ----------
    params : MLParams or float
        Mittag-Leffler parameters, or alpha alone (gamma = 1).
    x : float or array_like
        Nonnegative arguments. The function is evaluated at -x.

    Raises
    ------
    ParameterDomainError
        If alpha is outside (0, 1], any x is negative or NaN, or gamma != 1 is requested outside the series regime.

    Returns
    -------
    float or numpy.ndarray
        E_{alpha,gamma}(-x), same shape as `x`. For gamma = 1 every value lies in (0, 1].
    """
    if not isinstance(params, MLParams):
        params = MLParams(float(params))
    alpha, gamma = params.alpha, params.gamma

    arr = np.asarray(x, dtype=float)
    if not np.all(arr >= 0):
        raise ParameterDomainError("x must be nonnegative, got min " + str(np.nanmin(arr) if arr.size else arr))

    flat = arr.ravel()
    out = np.empty_like(flat)

    if alpha == 1.0 and gamma == 1.0:
        out[:] = np.exp(-flat)
    else:
        in_series = flat <= series_cutoff(alpha)
        if gamma != 1.0 and not np.all(in_series):
            raise ParameterDomainError(
                "gamma != 1 is only supported for x <= " + str(series_cutoff(alpha)) + ", got x = "
                + str(flat.max()))

        in_asymptotic = flat >= ML_ASYMPTOTIC_CUTOFF
        in_integral = ~(in_series | in_asymptotic)

        if np.any(in_series):
            out[in_series] = _series(alpha, gamma, flat[in_series])
        if np.any(in_asymptotic):
            out[in_asymptotic] = _asymptotic(alpha, flat[in_asymptotic])
        if np.any(in_integral):
            unique, inverse = np.unique(flat[in_integral], return_inverse=True)
            values = np.array([_integral(alpha, float(v)) for v in unique])
            out[in_integral] = values[inverse]

    if arr.ndim == 0:
        return float(out[0])
    return out.reshape(arr.shape)


def ml_table(alpha, xs):
    """Rows (x, E_{alpha,1}(-x)) for diagnostics.

    Parameters
    ----------
    alpha : float
    xs : array_like

    Returns
    -------
    list of tuple
    """
    xs = np.asarray(xs, dtype=float).ravel()
    values = mittag_leffler(MLParams(alpha), xs)
    return list(zip(xs.tolist(), np.atleast_1d(values).tolist()))


def spectral_multiplier(model: ModelParams, xi_magnitudes):
    """Spectral symbol S_hat(xi) = E_{alpha,1}(-|xi|^beta T^alpha) of the forward operator.

    Parameters
    ----------
    model : ModelParams
    xi_magnitudes : fracinv.fields.ScalarField or array_like
        |xi| values, all nonnegative.

    Returns
    -------
    fracinv.fields.ScalarField or numpy.ndarray
        Same container type as `xi_magnitudes`. Equal to 1 at |xi| = 0, in (0, 1] and radially non-increasing.
    """
    if isinstance(xi_magnitudes, ScalarField):
        values = spectral_multiplier(model, xi_magnitudes.values)
        return ScalarField(xi_magnitudes.grid, values)

    xi = np.asarray(xi_magnitudes, dtype=float)
    if not np.all(xi >= 0):
        raise ParameterDomainError("|xi| values must be nonnegative")
    argument = np.power(xi, model.beta) * model.T ** model.alpha
    return mittag_leffler(model.ml, argument)
