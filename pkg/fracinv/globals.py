"""Global constants used by the solvers and the experiments."""

ML_SERIES_CUTOFF = 5.0
"""Upper bound of the Taylor-series regime of E_{alpha,1}(-x). The effective cutoff is min(5, 8**alpha)."""

ML_ASYMPTOTIC_CUTOFF = 50.0
"""Lower bound of the asymptotic-series regime of E_{alpha,1}(-x)"""

ML_SERIES_RTOL = 1e-18  # stop summing once the term is this small relative to the partial sum
ML_SERIES_MAX_TERMS = 1000
ML_ASYMPTOTIC_TERMS = 40

GAUSSIAN_TRUNCATE = 4.0
"""Gaussian kernels are truncated at this many standard deviations"""

CANNY_SIGMA_PX = 2.0 ** 0.5  # pre-smoothing, pixels
CANNY_HIGH_PERCENTILE = 70.0  # share of gradient magnitudes below the high threshold
CANNY_LOW_RATIO = 0.4

SHRINK_ETA = 1e-8
"""Regularization of |w| in the Omega_2 residual"""

LAMBDA_TILDE = 4.0
"""Default splitting penalty. Shrinkage acts on gradients above 1 / LAMBDA_TILDE"""

FIDELITY_SCALE = 2e-9
"""lambda_eff = FIDELITY_SCALE * lambda weighs (1/2)||Su - g||^2 against the gradient terms"""

SYMMETRY_WARN = 1e-10
SYMMETRY_FAIL = 1e-6
"""Relative imaginary residue of an inverse transform above which a spectrum is rejected"""

# Algorithm defaults ----------------------------------------------------------------------------------------------------
DELTA_TILDE = 0.4  # edge map smoothing std, pixels
TAU = 1.01
M_MAX = 500
K_MAX = 2
ELL_MAX = 5
TOL = 1e-6
STEP_FACTOR = 0.1  # s
DT0 = 0.1
EPSILON = 0.1

GRID_N = 256
GRID_L = 10.0

LAMBDA_FOR_DELTA = {
    0.0005: 1e11,
    0.005: 1e9,
}
"""Default fidelity weight for each noise level"""

SWEEP_LAMBDA = 1e17
"""Default fidelity weight of the alpha sweep, where the stopping rule rather than m_max ends every run"""

# Desk-scale experiment sizes -------------------------------------------------------------------------------------------
DEFAULT_RUNS = 10
DEFAULT_SWEEP_POINTS = 20

SEED_ENV = "FRACINV_SEED"
