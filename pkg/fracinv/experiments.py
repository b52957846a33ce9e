"""Scripted reconstructions of the Gaussian and phantom examples, lambda scaling and the alpha sweep."""
from concurrent.futures import ThreadPoolExecutor
import csv
from dataclasses import dataclass, field
import json
import logging
import math
import os
import time
from typing import Dict, List

import numpy as np

from .fields import Grid, ScalarField
from .field_io import write_field, export_pgm
from .forward_model import apply_forward, add_noise, realized_noise_level, gaussian_initial, shepp_logan_phantom
from .globals import LAMBDA_FOR_DELTA, LAMBDA_TILDE, SWEEP_LAMBDA, SEED_ENV
from .solver import modified_bregman, tv_solve, tikhonov_bregman, tikhonov_solve, BregmanSolver
from .structs import ExperimentSettings, Method, ModelParams, NoiseSpec, SolverConfig, SplitConfig, StopReason
from .utility import UndefinedMetricError, ParameterDomainError

logger = logging.getLogger(__name__)

EXAMPLE1_MODEL = ModelParams(alpha=0.6, beta=1.0, T=1.0)
EXAMPLE2_MODEL = ModelParams(alpha=0.6, beta=0.9, T=1.0)


def rel_err(g_rec: ScalarField, g_true: ScalarField):
    """Relative L2 error ||g_rec - g_true|| / ||g_true|| in percent.

    Raises
    ------
    UndefinedMetricError
        If g_true has zero norm.
    """
    reference = g_true.norm()
    if reference == 0.0:
        raise UndefinedMetricError("relative error against a zero field is undefined")
    return 100.0 * (g_rec - g_true).norm() / reference


def default_lambda(delta):
    """Fidelity weight paired with a noise level; 1e11 for noiseless data.

    Raises
    ------
    ParameterDomainError
        If no default exists for `delta`.
    """
    if delta == 0.0:
        return LAMBDA_FOR_DELTA[min(LAMBDA_FOR_DELTA)]
    for level, lambda_ in LAMBDA_FOR_DELTA.items():
        if math.isclose(level, delta, rel_tol=1e-9):
            return lambda_
    raise ParameterDomainError("no default lambda for delta = " + str(delta) + ", pass lambda explicitly")


def base_seed(settings: ExperimentSettings):
    """First seed: the environment override, then the settings, then 0."""
    env = os.environ.get(SEED_ENV)
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ParameterDomainError(SEED_ENV + " must be an integer, got " + repr(env)) from None
    return settings.seed if settings.seed is not None else 0


def seed_list(settings: ExperimentSettings):
    first = base_seed(settings)
    return [first + i for i in range(settings.runs)]


def solver_config(model: ModelParams, settings: ExperimentSettings, delta_stop, lambda_=None, lambda_tilde=None):
    """SolverConfig for one reconstruction, with the realized noise norm as the stopping level."""
    lambda_ = lambda_ if lambda_ is not None else settings.lambda_
    if lambda_ is None:
        lambda_ = default_lambda(settings.delta)
    lambda_tilde = lambda_tilde if lambda_tilde is not None else settings.lambda_tilde
    if lambda_tilde is None:
        lambda_tilde = LAMBDA_TILDE

    return SolverConfig(
        model=model,
        split=SplitConfig(lambda_=lambda_, lambda_tilde=lambda_tilde),
        tau=settings.tau,
        delta=delta_stop,
        m_max=settings.m_max,
        k_max=settings.k_max,
        exponent_path=settings.exponent_path,
    )


def reconstruct(method: Method, g_delta: ScalarField, cfg: SolverConfig):
    """Run one method.

    Returns
    -------
    tuple
        (u_rec, InversionResult or None for the closed-form method)
    """
    method = Method(method)
    if method is Method.VARTV:
        result = modified_bregman(g_delta, cfg)
    elif method is Method.TV:
        result = tv_solve(g_delta, cfg)
    elif method is Method.TIKHONOV:
        result = tikhonov_bregman(g_delta, cfg)
    else:
        return tikhonov_solve(g_delta, cfg), None
    return result.u_rec, result


def synthetic_data(u_true: ScalarField, model: ModelParams, delta, seed):
    """Exact data, noisy data and the realized noise norm."""
    g = apply_forward(u_true, model)
    g_delta = add_noise(g, NoiseSpec(delta, seed))
    return g, g_delta, realized_noise_level(g_delta, g)


# Reports ==============================================================================================================
@dataclass
class ExperimentReport:
    """Summary of one scripted experiment."""
    name: str
    params: Dict  # every setting that influenced the numbers
    rel_err_by_method: Dict[str, float]  # mean over seeds, percent
    M_stop: int  # stopping index of the first method on the first seed
    seeds: List[int]
    runtime_ms: int
    runs: List[Dict] = field(default_factory=list)  # one entry per (seed, method)

    def to_dict(self):
        return {
            "name": self.name,
            "params": self.params,
            "rel_err_by_method": self.rel_err_by_method,
            "M_stop": self.M_stop,
            "seeds": self.seeds,
            "runtime_ms": self.runtime_ms,
            "runs": self.runs,
        }

    def write_json(self, path):
        with open(path, "w") as file:
            json.dump(self.to_dict(), file, indent=2)


def _run_seed(name, u_true, model, settings, seed):
    """All methods on one noise realization. Returns (run entries, recovered fields, noisy data)."""
    g, g_delta, delta_stop = synthetic_data(u_true, model, settings.delta, seed)
    entries = []
    fields = {}

    for method in settings.methods:
        cfg = solver_config(model, settings, delta_stop)
        start = time.perf_counter()
        u_rec, result = reconstruct(method, g_delta, cfg)
        error = rel_err(u_rec, u_true)
        entry = {
            "seed": seed,
            "method": method.value,
            "rel_err": error,
            "delta_stop": delta_stop,
            "lambda": cfg.split.lambda_,
            "lambda_tilde": result.lambda_tilde if result is not None else None,
            "M_stop": result.M_stop if result is not None else None,
            "stopped_by": result.stopped_by.value if result is not None else None,
            "runtime_ms": int(round((time.perf_counter() - start) * 1000.0)),
        }
        logger.info("%s seed=%d method=%s rel_err=%.4f%% M=%s", name, seed, method.value, error, entry["M_stop"])
        entries.append(entry)
        fields[method.value] = u_rec

    return entries, fields, g_delta


def _run_example(name, u_true: ScalarField, model: ModelParams, settings: ExperimentSettings):
    start = time.perf_counter()
    seeds = seed_list(settings)

    def task(seed):
        return _run_seed(name, u_true, model, settings, seed)

    if settings.workers > 1:
        with ThreadPoolExecutor(max_workers=settings.workers) as executor:
            outcomes = list(executor.map(task, seeds))
    else:
        outcomes = [task(seed) for seed in seeds]

    runs = [entry for entries, _, _ in outcomes for entry in entries]
    rel_err_by_method = {}
    for method in settings.methods:
        values = [r["rel_err"] for r in runs if r["method"] == method.value]
        rel_err_by_method[method.value] = float(np.mean(values))

    first_stop = runs[0]["M_stop"] if runs and runs[0]["M_stop"] is not None else 0
    params = settings.echo()
    used_tilde = [r["lambda_tilde"] for r in runs if r["lambda_tilde"] is not None]
    params.update(alpha=model.alpha, beta=model.beta, T=model.T,
                  lambda_=settings.lambda_ if settings.lambda_ is not None else default_lambda(settings.delta),
                  lambda_tilde=used_tilde[0] if used_tilde else None)

    report = ExperimentReport(
        name=name,
        params=params,
        rel_err_by_method=rel_err_by_method,
        M_stop=int(first_stop),
        seeds=seeds,
        runtime_ms=int(round((time.perf_counter() - start) * 1000.0)),
        runs=runs,
    )

    if settings.out_dir is not None:
        _, fields, g_delta = outcomes[0]
        _write_outputs(settings.out_dir, name, report, u_true, g_delta, fields)

    return report


def _write_outputs(out_dir, name, report, u_true, g_delta, fields):
    os.makedirs(out_dir, exist_ok=True)
    report.write_json(os.path.join(out_dir, "report.json"))

    images = {"truth": u_true, "data": g_delta}
    images.update(fields)
    for label, image in images.items():
        base = os.path.join(out_dir, name + "_" + label)
        write_field(image, base + ".field")
        export_pgm(image, base + ".pgm")


def run_example1(**overrides):
    """Gaussian initial field exp(-|x|^2), alpha = 0.6, beta = 1, T = 1.

    Parameters
    ----------
    **overrides
        Fields of ExperimentSettings (n, L, delta, lambda_, runs, seed, methods, ...).

    Returns
    -------
    ExperimentReport
    """
    settings = ExperimentSettings().with_overrides(**overrides)
    grid = Grid(settings.n, settings.L)
    return _run_example("example1", gaussian_initial(grid), EXAMPLE1_MODEL, settings)


def run_example2(**overrides):
    """Shepp-Logan phantom, alpha = 0.6, beta = 0.9, T = 1.

    Returns
    -------
    ExperimentReport
    """
    settings = ExperimentSettings().with_overrides(**overrides)
    grid = Grid(settings.n, settings.L)
    return _run_example("example2", shepp_logan_phantom(grid), EXAMPLE2_MODEL, settings)


# Lambda scaling =======================================================================================================
@dataclass
class LambdaScalingReport:
    """Stopping indices for a fidelity weight and its fractions."""
    rows: List[Dict]  # lambda, M_stop, lambda_M, terminated
    lambda_tilde: float  # held fixed across rows
    delta_stop: float
    params: Dict

    def products(self):
        return [r["lambda_M"] for r in self.rows]

    def spread(self):
        """max / min of lambda * M over rows that terminated by the discrepancy rule."""
        values = [r["lambda_M"] for r in self.rows if r["terminated"]]
        if not values:
            return math.inf
        return max(values) / min(values)

    def to_dict(self):
        return {"rows": self.rows, "lambda_tilde": self.lambda_tilde, "delta_stop": self.delta_stop,
                "params": self.params}


def lambda_scaling_check(factors=(1, 4, 16), **overrides):
    """Run the variable exponent solver on the Gaussian example at lambda / f for each factor f.

    lambda_tilde is the same in every run, so only the fidelity weight changes between them. lambda * M_stop is
    expected to stay roughly constant.

    Returns
    -------
    LambdaScalingReport
    """
    settings = ExperimentSettings().with_overrides(**overrides)
    grid = Grid(settings.n, settings.L)
    u_true = gaussian_initial(grid)
    seed = base_seed(settings)
    _, g_delta, delta_stop = synthetic_data(u_true, EXAMPLE1_MODEL, settings.delta, seed)

    base_lambda = settings.lambda_ if settings.lambda_ is not None else default_lambda(settings.delta)
    lambda_tilde = settings.lambda_tilde if settings.lambda_tilde is not None else LAMBDA_TILDE

    rows = []
    for factor in factors:
        lambda_ = base_lambda / factor
        cfg = solver_config(EXAMPLE1_MODEL, settings, delta_stop, lambda_=lambda_, lambda_tilde=lambda_tilde)
        result = BregmanSolver(g_delta, cfg).run()
        terminated = result.stopped_by is StopReason.DISCREPANCY
        if not terminated:
            logger.warning("lambda=%g did not reach the discrepancy level within m_max=%d", lambda_, cfg.m_max)
        rows.append({"lambda": lambda_, "lambda_tilde": result.lambda_tilde, "M_stop": result.M_stop,
                     "lambda_M": lambda_ * result.M_stop, "terminated": terminated})
        logger.info("lambda=%g M_stop=%d lambda*M=%g", lambda_, result.M_stop, lambda_ * result.M_stop)

    params = settings.echo()
    params.update(lambda_=base_lambda, lambda_tilde=lambda_tilde)
    report = LambdaScalingReport(rows, lambda_tilde, delta_stop, params)
    if settings.out_dir is not None:
        os.makedirs(settings.out_dir, exist_ok=True)
        with open(os.path.join(settings.out_dir, "lambda_scaling.json"), "w") as file:
            json.dump(report.to_dict(), file, indent=2)
    return report


# Alpha sweep ==========================================================================================================
def alpha_sweep(alphas=None, **overrides):
    """Relative error of the variable exponent reconstruction of the phantom against alpha in [0.5, 1].

    beta = 1 and T = 1. Every alpha gets its own data on the same seed. The fidelity weight defaults to SWEEP_LAMBDA.

    Parameters
    ----------
    alphas : sequence of float, optional
        Explicit orders. By default `points` values spaced evenly over [0.5, 1].
    **overrides
        Fields of ExperimentSettings.

    Returns
    -------
    list of tuple
        (alpha, rel_err) sorted by alpha. Also written to alpha_sweep.csv when out_dir is set.
    """
    settings = ExperimentSettings().with_overrides(**overrides)
    grid = Grid(settings.n, settings.L)
    u_true = shepp_logan_phantom(grid)
    seed = base_seed(settings)
    lambda_ = settings.lambda_ if settings.lambda_ is not None else SWEEP_LAMBDA
    if alphas is not None:
        alphas = np.sort(np.asarray(alphas, dtype=float))
    else:
        alphas = np.linspace(0.5, 1.0, settings.points) if settings.points > 1 else np.array([1.0])

    def task(alpha):
        model = ModelParams(alpha=float(alpha), beta=1.0, T=1.0)
        _, g_delta, delta_stop = synthetic_data(u_true, model, settings.delta, seed)
        u_rec, _ = reconstruct(Method.VARTV, g_delta, solver_config(model, settings, delta_stop, lambda_=lambda_))
        error = rel_err(u_rec, u_true)
        logger.info("alpha=%.4f rel_err=%.4f%%", alpha, error)
        return float(alpha), error

    if settings.workers > 1:
        with ThreadPoolExecutor(max_workers=settings.workers) as executor:
            rows = list(executor.map(task, alphas))
    else:
        rows = [task(alpha) for alpha in alphas]

    if settings.out_dir is not None:
        os.makedirs(settings.out_dir, exist_ok=True)
        write_sweep_csv(rows, os.path.join(settings.out_dir, "alpha_sweep.csv"))
    return rows


def write_sweep_csv(rows, path):
    with open(path, "w", newline="") as file:
        writer = csv.writer(file)
        writer.writerow(["alpha", "rel_err_percent"])
        for alpha, error in rows:
            writer.writerow([repr(alpha), repr(error)])
