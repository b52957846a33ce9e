"""Modified Bregman iteration for the backward problem and its TV and Tikhonov baselines."""
from dataclasses import dataclass
import logging
import math
import time
from typing import List

import numpy as np

from .exponent_map import build_exponent, partition_domain
from .fields import Grid, ScalarField, SpectrumField
from .forward_model import forward_multiplier
from .structs import SolverConfig, StopReason, ExponentPath
from .subproblems import shrink, descend, quadratic, solve_u_spectrum
from .trace import IterationRecord, IterationTrace
from .transforms import forward_differences, real_part_checked, symbol_arrays
from .utility import DivergenceError

logger = logging.getLogger(__name__)


@dataclass
class InversionResult:
    """Output of one run of the outer iteration."""
    u_rec: ScalarField
    records: List[IterationRecord]
    stopped_by: StopReason
    M_stop: int  # number of outer updates performed; the first index meeting the discrepancy rule
    lambda_tilde: float
    exponent: ScalarField = None  # exponent map used by the last outer step
    zero_threshold: bool = False  # tau * delta was 0, so only m_max could stop the run

    @property
    def residuals(self):
        return np.array([r.residual for r in self.records])


def _multiplier_values(S_hat):
    return S_hat.values if isinstance(S_hat, ScalarField) else np.asarray(S_hat, dtype=float)


def residual_norm(u: ScalarField, g_delta_hat: SpectrumField, S_hat):
    """||S_hat u_hat - g_delta_hat|| with spectral weights, equal to the spatial norm of Su - g_delta.

    Parameters
    ----------
    u : ScalarField
    g_delta_hat : SpectrumField
    S_hat : ScalarField or numpy.ndarray

    Returns
    -------
    float
    """
    u.grid.check_shape(g_delta_hat.values, "data spectrum")
    difference = _multiplier_values(S_hat) * np.fft.fft2(u.values) - g_delta_hat.values
    return math.sqrt(u.grid.spectral_weight * float(np.sum(np.abs(difference) ** 2)))


def variable_tv_objective(u: ScalarField, p_tilde: ScalarField):
    """Quadrature of |grad u|^p over the domain.

    Returns
    -------
    float
        Equals the discrete isotropic TV for p = 1 and |Omega| for |grad u| = 1.
    """
    d1, d2 = forward_differences(u.values, u.grid.dx)
    return u.grid.weight * float(np.sum(np.hypot(d1, d2) ** p_tilde.values))


class BregmanSolver:
    def __init__(self, g_delta: ScalarField, config: SolverConfig):
        """One run of the modified Bregman iteration on measured data.

        Starting from u = 0 and g_0 = g_delta, every outer step rebuilds the exponent map from the current iterate
        (from the data at the first step), partitions the domain, runs k_max rounds of the w- and u-subproblems
        against g_m, and adds the residual back: g_{m+1} = g_m + g_delta - S u_{m+1}. The run stops at the first m with
        ||S u_m - g_delta|| <= tau * delta, or after m_max steps.

        An instance runs once. Create a new one for every dataset and configuration.

        Parameters
        ----------
        g_delta : ScalarField
            Measured data.
        config : SolverConfig
        """
        # Problem data -------------------------------------------------------------------------------------------------
        self._data = g_delta
        self._grid = g_delta.grid
        self._config = config
        self._multiplier = forward_multiplier(config.model, self._grid)
        self._data_hat = np.fft.fft2(g_delta.values)

        # Splitting parameters -----------------------------------------------------------------------------------------
        self._split = config.split
        self._lambda_eff = self._grid.fidelity_weight(config.split.lambda_)

        # State --------------------------------------------------------------------------------------------------------
        self._trace = IterationTrace(config.m_max)
        self._result = None

    @property
    def grid(self):
        return self._grid

    @property
    def config(self):
        return self._config

    @property
    def lambda_tilde(self):
        """Splitting penalty in use."""
        return self._split.lambda_tilde

    @property
    def multiplier(self):
        """Spectral symbol of the forward operator, natural FFT order."""
        return self._multiplier

    @property
    def threshold(self):
        """Discrepancy level tau * delta."""
        return self._config.tau * self._config.delta

    @property
    def trace(self):
        """Records of the outer iterations performed so far."""
        return self._trace

    @property
    def is_finished(self):
        return self._result is not None

    # Iteration ========================================================================================================
    def _residual(self, u_hat):
        difference = self._multiplier * u_hat - self._data_hat
        return math.sqrt(self._grid.spectral_weight * float(np.sum(np.abs(difference) ** 2)))

    def _exponent(self, source):
        return build_exponent(source, self._config.exponent, self._config.exponent_path)

    def _inner_rounds(self, u, g_m_hat, p_tilde, partition):
        """k_max rounds of the w-subproblems followed by the u-update.

        Returns
        -------
        tuple
            (u, u_hat, accepted Omega_2 steps)
        """
        dx = self._grid.dx
        lambda_tilde = self._split.lambda_tilde
        accepted = 0
        u_hat = None

        for _ in range(self._config.k_max):
            a1, a2 = forward_differences(u, dx)

            w1_1, w1_2 = shrink(a1, a2, partition.mask1, lambda_tilde)
            w2_1, w2_2, steps = descend(a1, a2, p_tilde, partition.mask2, lambda_tilde, self._split,
                                        self._grid.weight)
            w3_1, w3_2 = quadratic(a1, a2, partition.mask3, lambda_tilde)
            accepted += steps

            u_hat = solve_u_spectrum(w1_1 + w2_1 + w3_1, w1_2 + w2_2 + w3_2, g_m_hat, self._multiplier,
                                     self._lambda_eff, lambda_tilde, self._grid)
            u = np.fft.ifft2(u_hat)
            if not np.all(np.isfinite(u)):
                return u.real, u_hat, accepted
            u = real_part_checked(u)

        return u, u_hat, accepted

    def run(self):
        """Run the iteration to the discrepancy level or to m_max.

        Raises
        ------
        RuntimeError
            If this instance has already run.
        DivergenceError
            If an iterate becomes non-finite. The exception carries the trace of completed iterations.
        NumericalDegeneracyError
            If an Omega_2 residual becomes non-finite.

        Returns
        -------
        InversionResult
        """
        if self.is_finished:
            raise RuntimeError("solver has already run; create a new BregmanSolver for another run")

        config = self._config
        threshold = self.threshold
        zero_threshold = threshold == 0.0
        if zero_threshold:
            logger.info("tau * delta is 0: the run can only stop at m_max = %d", config.m_max)

        u = np.zeros(self._grid.shape)
        g_m_hat = self._data_hat.copy()
        residual = self._residual(np.zeros_like(self._data_hat))
        p_tilde = self._exponent(self._data)
        stopped_by = StopReason.M_MAX
        m = 0

        if residual <= threshold:
            stopped_by = StopReason.DISCREPANCY

        while stopped_by is not StopReason.DISCREPANCY and m < config.m_max:
            start = time.perf_counter()

            if m > 0:
                p_tilde = self._exponent(ScalarField(self._grid, u))
            partition = partition_domain(p_tilde, config.exponent.epsilon)

            u, u_hat, accepted = self._inner_rounds(u, g_m_hat, p_tilde.values, partition)
            if not (np.all(np.isfinite(u)) and np.all(np.isfinite(u_hat))):
                raise DivergenceError("outer iterate " + str(m + 1) + " is not finite", self._trace)

            g_m_hat = g_m_hat + (self._data_hat - self._multiplier * u_hat)
            m += 1

            residual = self._residual(u_hat)
            objective = variable_tv_objective(ScalarField(self._grid, u), p_tilde)
            wall_ms = int(round((time.perf_counter() - start) * 1000.0))
            self._trace.append(IterationRecord(m, residual, objective, accepted, wall_ms))
            logger.debug("m=%d residual=%.6e objective=%.6e accepted_w2_steps=%d", m, residual, objective, accepted)

            if residual <= threshold:
                stopped_by = StopReason.DISCREPANCY

        logger.info("stopped by %s at M=%d, residual %.6e, threshold %.6e",
                    stopped_by.value, m, residual, threshold)

        self._result = InversionResult(
            u_rec=ScalarField(self._grid, u),
            records=self._trace.records(),
            stopped_by=stopped_by,
            M_stop=m,
            lambda_tilde=self.lambda_tilde,
            exponent=p_tilde,
            zero_threshold=zero_threshold,
        )
        return self._result


# Entry points ---------------------------------------------------------------------------------------------------------
def modified_bregman(g_delta: ScalarField, cfg: SolverConfig):
    """Variable exponent reconstruction by the modified Bregman iteration.

    Parameters
    ----------
    g_delta : ScalarField
    cfg : SolverConfig

    Returns
    -------
    InversionResult
    """
    return BregmanSolver(g_delta, cfg).run()


def tv_solve(g_delta: ScalarField, cfg: SolverConfig):
    """TV reconstruction: the same iteration with the exponent frozen to 1 (shrinkage everywhere)."""
    return modified_bregman(g_delta, cfg.with_overrides(exponent_path=ExponentPath.ONE))


def tikhonov_bregman(g_delta: ScalarField, cfg: SolverConfig):
    """Quadratic gradient penalty solved by the same iteration, exponent frozen to 2."""
    return modified_bregman(g_delta, cfg.with_overrides(exponent_path=ExponentPath.TWO))


def tikhonov_solve(g_delta: ScalarField, cfg: SolverConfig):
    """Closed-form minimizer of ||grad u||^2 + (lambda_eff/2)||Su - g_delta||^2.

    u_hat = lambda_eff S_hat g_hat / (lambda_eff S_hat^2 + 2 |d|^2), d the periodic difference symbols.

    Returns
    -------
    ScalarField
    """
    grid = g_delta.grid
    s_hat = forward_multiplier(cfg.model, grid)
    d1, d2 = symbol_arrays(grid)
    lambda_eff = grid.fidelity_weight(cfg.split.lambda_)

    g_hat = np.fft.fft2(g_delta.values)
    u_hat = lambda_eff * s_hat * g_hat / (lambda_eff * s_hat ** 2 + 2.0 * (np.abs(d1) ** 2 + np.abs(d2) ** 2))
    return ScalarField(grid, real_part_checked(np.fft.ifft2(u_hat)))


def theorem_bound(result: InversionResult, u_star: ScalarField, cfg: SolverConfig, grid: Grid):
    """Upper bound (2 / (lambda_eff M)) (||grad u*|| + |Omega|) + delta^2 on the squared residual after M steps.

    Parameters
    ----------
    result : InversionResult
    u_star : ScalarField
        Any field with S u* = g, typically the true initial field.
    cfg : SolverConfig
    grid : Grid

    Returns
    -------
    float
        Compare with result.records[-1].residual ** 2.
    """
    steps = max(result.M_stop, 1)
    d1, d2 = forward_differences(u_star.values, grid.dx)
    grad_norm = math.sqrt(grid.weight * float(np.sum(d1 ** 2 + d2 ** 2)))
    lambda_eff = grid.fidelity_weight(cfg.split.lambda_)
    return 2.0 / (lambda_eff * steps) * (grad_norm + grid.area) + cfg.delta ** 2
