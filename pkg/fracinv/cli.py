"""Command line interface: fracinv {ml-eval, forward, invert, experiment}."""
import argparse
import csv
import json
import logging
import sys

from .experiments import run_example1, run_example2, lambda_scaling_check, alpha_sweep, reconstruct
from .exponent_map import build_exponent
from .field_io import read_field, write_field, export_pgm
from .forward_model import apply_forward, add_noise
from .globals import TAU, M_MAX, LAMBDA_TILDE
from .special_functions import ml_table
from .structs import Method, ExponentPath, ModelParams, NoiseSpec, SolverConfig, SplitConfig, ExperimentSettings
from .trace import IterationTrace
from .utility import ParameterDomainError, DimensionMismatchError, SymmetryViolationError, \
    NumericalDegeneracyError, DivergenceError, UndefinedMetricError, MalformedFieldError

logger = logging.getLogger(__name__)

_EXPECTED_ERRORS = (ParameterDomainError, DimensionMismatchError, SymmetryViolationError, NumericalDegeneracyError,
                    DivergenceError, UndefinedMetricError, MalformedFieldError, OSError)


def _add_model_arguments(parser):
    parser.add_argument("--alpha", type=float, required=True, help="time-fractional order in (0, 1]")
    parser.add_argument("--beta", type=float, required=True, help="space-fractional order in (1/2, 1]")
    parser.add_argument("--T", type=float, default=1.0, help="final time (default: 1)")


def build_parser():
    parser = argparse.ArgumentParser(prog="fracinv",
                                     description="Backward problem for space-time fractional diffusion")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for progress, -vv for every iteration")
    commands = parser.add_subparsers(dest="command", required=True)

    # ml-eval ----------------------------------------------------------------------------------------------------------
    ml = commands.add_parser("ml-eval", help="evaluate E_{alpha,1}(-x)")
    ml.add_argument("--alpha", type=float, required=True)
    ml.add_argument("--x", type=float, nargs="+", required=True, help="nonnegative arguments")
    ml.add_argument("--table", metavar="FILE", help="also write the values as CSV")

    # forward ----------------------------------------------------------------------------------------------------------
    forward = commands.add_parser("forward", help="apply the forward operator to a field")
    _add_model_arguments(forward)
    forward.add_argument("--input", required=True, metavar="FILE")
    forward.add_argument("--output", required=True, metavar="FILE")
    forward.add_argument("--noise", type=float, default=0.0, metavar="DELTA", help="relative noise amplitude")
    forward.add_argument("--seed", type=int, default=0)

    # invert -----------------------------------------------------------------------------------------------------------
    invert = commands.add_parser("invert", help="reconstruct the initial field from data")
    _add_model_arguments(invert)
    invert.add_argument("--method", choices=[m.value for m in Method], default=Method.VARTV.value)
    invert.add_argument("--lambda", dest="lambda_", type=float, default=1e11, help="fidelity weight")
    invert.add_argument("--lambda-tilde", type=float, default=LAMBDA_TILDE, help="splitting penalty")
    invert.add_argument("--tau", type=float, default=TAU)
    invert.add_argument("--delta", type=float, default=0.0, help="L2 norm of the noise, for the stopping rule")
    invert.add_argument("--m-max", type=int, default=M_MAX)
    invert.add_argument("--exponent", choices=[ExponentPath.EDGES.value, ExponentPath.PM.value],
                        default=ExponentPath.EDGES.value)
    invert.add_argument("--data", required=True, metavar="FILE")
    invert.add_argument("--output", required=True, metavar="FILE")
    invert.add_argument("--log", metavar="FILE", help="CSV of the outer iterations")
    invert.add_argument("--dump-exponent", metavar="FILE", help="write the last exponent map as a graymap")

    # experiment -------------------------------------------------------------------------------------------------------
    experiment = commands.add_parser("experiment", help="run a scripted reproduction")
    experiment.add_argument("name", choices=["example1", "example2", "lambda-scaling", "alpha-sweep"])
    experiment.add_argument("--runs", type=int)
    experiment.add_argument("--n", type=int)
    experiment.add_argument("--delta", type=float)
    experiment.add_argument("--lambda", dest="lambda_", type=float)
    experiment.add_argument("--lambda-tilde", type=float)
    experiment.add_argument("--seed", type=int)
    experiment.add_argument("--m-max", type=int)
    experiment.add_argument("--points", type=int, help="alpha values in the sweep")
    experiment.add_argument("--workers", type=int, help="seeds or alpha values run in parallel")
    experiment.add_argument("--out", dest="out_dir", metavar="DIR")

    return parser


# Commands =============================================================================================================
def _ml_eval(args):
    rows = ml_table(args.alpha, args.x)
    for x, value in rows:
        print(repr(x) + "," + repr(value))
    if args.table:
        with open(args.table, "w", newline="") as file:
            writer = csv.writer(file)
            writer.writerow(["x", "value"])
            writer.writerows(rows)


def _forward(args):
    model = ModelParams(args.alpha, args.beta, args.T)
    g = apply_forward(read_field(args.input), model)
    if args.noise > 0.0:
        g = add_noise(g, NoiseSpec(args.noise, args.seed))
    write_field(g, args.output)


def _invert(args):
    cfg = SolverConfig(
        model=ModelParams(args.alpha, args.beta, args.T),
        split=SplitConfig(lambda_=args.lambda_, lambda_tilde=args.lambda_tilde),
        tau=args.tau,
        delta=args.delta,
        m_max=args.m_max,
        exponent_path=ExponentPath(args.exponent),
    )
    data = read_field(args.data)
    u_rec, result = reconstruct(Method(args.method), data, cfg)
    write_field(u_rec, args.output)

    if result is not None:
        logger.info("stopped by %s at M=%d", result.stopped_by.value, result.M_stop)
    if args.log:
        trace = IterationTrace()
        for record in (result.records if result is not None else []):
            trace.append(record)
        with open(args.log, "w") as file:
            trace.to_csv(file)
    if args.dump_exponent:
        exponent = result.exponent if result is not None else build_exponent(data, cfg.exponent, cfg.exponent_path)
        export_pgm(exponent, args.dump_exponent, value_range=(1.0, 2.0))


def _experiment(args):
    overrides = dict(runs=args.runs, n=args.n, delta=args.delta, lambda_=args.lambda_, lambda_tilde=args.lambda_tilde,
                     seed=args.seed, m_max=args.m_max, points=args.points, workers=args.workers,
                     out_dir=args.out_dir)
    ExperimentSettings().with_overrides(**overrides)

    if args.name == "example1":
        print(json.dumps(run_example1(**overrides).to_dict(), indent=2))
    elif args.name == "example2":
        print(json.dumps(run_example2(**overrides).to_dict(), indent=2))
    elif args.name == "lambda-scaling":
        print(json.dumps(lambda_scaling_check(**overrides).to_dict(), indent=2))
    else:
        for alpha, error in alpha_sweep(**overrides):
            print(repr(alpha) + "," + repr(error))


_COMMANDS = {
    "ml-eval": _ml_eval,
    "forward": _forward,
    "invert": _invert,
    "experiment": _experiment,
}


def main(argv=None):
    """Entry point of the fracinv command.

    Returns
    -------
    int
        0 on success, 1 on a reported error.
    """
    args = build_parser().parse_args(argv)
    level = logging.WARNING if args.verbose == 0 else logging.INFO if args.verbose == 1 else logging.DEBUG
    logging.basicConfig(level=level, format="%(asctime)s %(name)s %(levelname)s: %(message)s")

    try:
        _COMMANDS[args.command](args)
    except _EXPECTED_ERRORS as e:
        print("fracinv: error: " + str(e), file=sys.stderr)
        return 1
    return 0
