"""
Configuration for the perforated nanobeam bending solvers.
"""

# --- Static solver (functional-link constrained expression) ---
BASIS_ORDER = 14
COLLOCATION_POINTS = 100
COLLOCATION_GRID = 'uniform'
MAX_DERIVATIVE_ORDER = 4

# --- Optimizer ---
LBFGS_MEMORY = 10
LBFGS_STAGES = 5
LBFGS_MAX_ITERATIONS = 50
LBFGS_GRADIENT_TOLERANCE = 1e-12
WOLFE_C1 = 1e-4
WOLFE_C2 = 0.9
INIT_WEIGHT_SCALE = 0.1
SEED = 0

# --- Dynamic solver (Galerkin) ---
GALERKIN_SIZE = 14
GALERKIN_MAX_SIZE = 20
GALERKIN_KIND = 'polynomial'
INERTIA_MODEL = 'printed'
SLENDERNESS = 0.1

# --- Presentation ---
DEFLECTION_SCALE = 100.0
SAMPLE_COUNT = 101
CSV_FLOAT_FORMAT = '%.10g'

# --- Analysis ---
RATIO_TOLERANCE = 1e-5
RATIO_FLOOR = 1e-6
SWEEP_STATIONS = (0.1, 0.3, 0.5, 0.6, 0.8, 0.9)
TABLE_TOLERANCE = 1e-4
RESIDUAL_TARGET = 1e-9
CONVERGED_SIZES = (10, 11, 12, 13, 14, 15)

# --- Linear algebra ---
PIVOT_TOLERANCE = 1e-12
RANK_TOLERANCE = 1e-12
MAX_DENSE_SIZE = 64
