"""A collection of parameter structures used across the solvers."""
import dataclasses
import enum
from dataclasses import dataclass, field
from typing import Optional, Tuple

from .globals import DELTA_TILDE, EPSILON, DT0, STEP_FACTOR, ELL_MAX, TOL, SHRINK_ETA, TAU, M_MAX, K_MAX, GRID_N, GRID_L, \
    DEFAULT_RUNS, DEFAULT_SWEEP_POINTS, LAMBDA_TILDE
from .utility import check_range, ParameterDomainError


class Method(enum.Enum):
    """Reconstruction method."""
    VARTV = "vartv"  # variable exponent TV, modified Bregman iteration
    TV = "tv"  # exponent frozen to 1
    TIKHONOV = "tikhonov"  # exponent frozen to 2, same Bregman scheme
    TIKHONOV_DIRECT = "tikhonov-direct"  # closed-form Fourier minimizer


class ExponentPath(enum.Enum):
    """How the exponent map is built at every outer step."""
    EDGES = "edges"  # 2 - G * E(u)
    PM = "pm"  # P_M(|grad(G * u)|^2)
    ONE = "one"  # frozen to 1 (TV)
    TWO = "two"  # frozen to 2 (quadratic gradient penalty)


class StopReason(enum.Enum):
    DISCREPANCY = "discrepancy"  # residual fell to tau * delta
    M_MAX = "m_max"  # iteration cap reached


@dataclass(frozen=True)
class MLParams:
    """Parameters of E_{alpha,gamma}."""
    alpha: float  # time-fractional order, (0, 1]
    gamma: float = 1.0  # second parameter, fixed to 1 in the pipeline

    def __post_init__(self):
        check_range("alpha", self.alpha, 0.0, 1.0, low_open=True)
        check_range("gamma", self.gamma, 0.0, low_open=True)


@dataclass(frozen=True)
class ModelParams:
    """Parameters of the forward diffusion operator."""
    alpha: float  # time-fractional order, (0, 1]
    beta: float  # space-fractional order, (1/2, 1]
    T: float = 1.0  # final diffusion time

    def __post_init__(self):
        check_range("alpha", self.alpha, 0.0, 1.0, low_open=True)
        check_range("beta", self.beta, 0.5, 1.0, low_open=True)
        check_range("T", self.T, 0.0, low_open=True)
        if self.T == float("inf"):
            raise ParameterDomainError("T must be finite")

    @property
    def ml(self):
        """Mittag-Leffler parameters of the spectral symbol."""
        return MLParams(self.alpha, 1.0)


@dataclass(frozen=True)
class NoiseSpec:
    delta: float  # relative amplitude, noise is delta * randn * max(g)
    seed: int = 0

    def __post_init__(self):
        check_range("delta", self.delta, 0.0)


@dataclass(frozen=True)
class ExponentConfig:
    """Exponent map parameters."""
    delta_tilde: float = DELTA_TILDE  # edge map smoothing std, pixels
    epsilon: float = EPSILON  # partition threshold
    cap_M: float = 1.0  # P_M cap, only used by the P_M path

    def __post_init__(self):
        check_range("delta_tilde", self.delta_tilde, 0.0, low_open=True)
        check_range("epsilon", self.epsilon, 0.0, 0.5, low_open=True, high_open=True)
        check_range("cap_M", self.cap_M, 0.0, low_open=True)


@dataclass(frozen=True)
class SplitConfig:
    """Splitting scheme parameters.

    lambda_ enters the functional as lambda_eff = FIDELITY_SCALE * lambda_ (see fracinv.fields.Grid.fidelity_weight).
    """
    lambda_: float = 1e11
    lambda_tilde: float = LAMBDA_TILDE
    dt0: float = DT0  # initial Omega_2 step
    s: float = STEP_FACTOR  # step adaptation factor
    ell_max: int = ELL_MAX
    tol: float = TOL
    eta: float = SHRINK_ETA  # |w| regularization, 0 disables it

    def __post_init__(self):
        check_range("lambda", self.lambda_, 0.0, low_open=True)
        check_range("lambda_tilde", self.lambda_tilde, 0.0, low_open=True)
        check_range("dt0", self.dt0, 0.0, low_open=True)
        check_range("s", self.s, 0.0, 1.0, low_open=True, high_open=True)
        check_range("ell_max", self.ell_max, 1)
        check_range("tol", self.tol, 0.0, low_open=True)
        check_range("eta", self.eta, 0.0)


@dataclass(frozen=True)
class SolverConfig:
    """Everything the outer iteration needs."""
    model: ModelParams
    split: SplitConfig = field(default_factory=SplitConfig)
    exponent: ExponentConfig = field(default_factory=ExponentConfig)
    tau: float = TAU  # discrepancy factor
    delta: float = 0.0  # noise level fed to the stopping rule, L2 norm
    m_max: int = M_MAX
    k_max: int = K_MAX
    seed: int = 0
    exponent_path: ExponentPath = ExponentPath.EDGES

    def __post_init__(self):
        check_range("tau", self.tau, 1.0, low_open=True)
        check_range("delta", self.delta, 0.0)
        check_range("m_max", self.m_max, 1)
        check_range("k_max", self.k_max, 1)
        object.__setattr__(self, "exponent_path", ExponentPath(self.exponent_path))

    def with_overrides(self, **changes):
        """Return a copy with some fields replaced.

        The split parameters can be changed with `lambda_`, `lambda_tilde` and the other SplitConfig names, which are
        routed to the nested structure.
        """
        split_names = {f.name for f in dataclasses.fields(SplitConfig)}
        split_changes = {k: changes.pop(k) for k in list(changes) if k in split_names}
        result = self
        if split_changes:
            result = dataclasses.replace(result, split=dataclasses.replace(result.split, **split_changes))
        return dataclasses.replace(result, **changes)


@dataclass(frozen=True)
class ExperimentSettings:
    """Knobs of the scripted reproductions. Anything left as None takes its documented default."""
    n: int = GRID_N
    L: float = GRID_L
    delta: float = 0.0005  # relative noise amplitude
    lambda_: Optional[float] = None  # default from LAMBDA_FOR_DELTA
    lambda_tilde: Optional[float] = None
    runs: int = DEFAULT_RUNS
    seed: Optional[int] = None  # first seed; the FRACINV_SEED environment variable takes precedence, then 0
    methods: Tuple[Method, ...] = (Method.VARTV, Method.TV, Method.TIKHONOV)
    tau: float = TAU
    m_max: int = M_MAX
    k_max: int = K_MAX
    exponent_path: ExponentPath = ExponentPath.EDGES
    points: int = DEFAULT_SWEEP_POINTS  # alpha sweep only
    workers: int = 1
    out_dir: Optional[str] = None

    def __post_init__(self):
        check_range("n", self.n, 2)
        check_range("L", self.L, 0.0, low_open=True)
        check_range("delta", self.delta, 0.0)
        if self.lambda_ is not None:
            check_range("lambda", self.lambda_, 0.0, low_open=True)
        check_range("runs", self.runs, 1)
        check_range("points", self.points, 1)
        check_range("workers", self.workers, 1)
        object.__setattr__(self, "methods", tuple(Method(m) for m in self.methods))
        object.__setattr__(self, "exponent_path", ExponentPath(self.exponent_path))

    def with_overrides(self, **changes):
        """Return a copy with the non-None entries of `changes` applied."""
        return dataclasses.replace(self, **{k: v for k, v in changes.items() if v is not None})

    def echo(self):
        """All settings as plain JSON-compatible values."""
        result = dataclasses.asdict(self)
        result["methods"] = [m.value for m in self.methods]
        result["exponent_path"] = self.exponent_path.value
        return result
