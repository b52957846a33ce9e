"""Backward problem for space-time fractional diffusion.
Recovers the initial field of a diffusion process driven by a Caputo time derivative and a fractional Laplacian from
noisy data at the final time, using a variable exponent total variation penalty solved by a modified Bregman
iteration. TV and quadratic-penalty reconstructions are provided for comparison.
"""
# Expose important parts as members of fracinv
from .utility import ParameterDomainError, DimensionMismatchError, SymmetryViolationError, NumericalDegeneracyError, \
    DivergenceError, UndefinedMetricError, MalformedFieldError
from .structs import Method, ExponentPath, StopReason, MLParams, ModelParams, NoiseSpec, ExponentConfig, SplitConfig, \
    SolverConfig, ExperimentSettings
from .fields import Grid, ScalarField, VectorField, SpectrumField
from .special_functions import mittag_leffler, spectral_multiplier, ml_table
from .transforms import transform, inverse_transform, gradient, divergence, difference_symbols
from .forward_model import apply_forward, add_noise, gaussian_initial, gaussian_spectrum, shepp_logan_phantom
from .exponent_map import DomainPartition, detect_edges, gaussian_smooth, exponent_from_edges, exponent_pm, \
    partition_domain
from .subproblems import solve_w1, solve_w2, solve_w3, sub2_objective, solve_u
from .trace import IterationRecord, IterationTrace
from .solver import BregmanSolver, InversionResult, residual_norm, variable_tv_objective, modified_bregman, tv_solve, \
    tikhonov_bregman, tikhonov_solve, theorem_bound
from .field_io import read_field, write_field, export_pgm
from .experiments import ExperimentReport, LambdaScalingReport, rel_err, run_example1, run_example2, \
    lambda_scaling_check, alpha_sweep
