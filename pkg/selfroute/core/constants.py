DEFAULT_PATH_CAP = 10_000  # Simple paths per user type

FEASIBILITY_RTOL = 1e-9  # Relative to the type's demand

DEFAULT_MAX_ITERATIONS = 100_000
DEFAULT_GAP_TOL = 1e-10  # Relative Frank-Wolfe duality gap
DEFAULT_CHECK_TOL = 1e-6
DEFAULT_DAMPING = 0.5
DEFAULT_RELATIVE_TOL = 1e-6  # Theorem checks compare two solves

SIGNIFICANT_DIGITS = 12

ORACLE_MAX_PATHS = 6

# Random r is kept away from the r_max -> 4 gamma singularity of the linear bound
RANDOM_R_MARGIN = 3.5

PARKING_SINK = "t_park"
ONSTREET_EDGE = "fake_os"
GARAGE_EDGE = "fake_pg"
