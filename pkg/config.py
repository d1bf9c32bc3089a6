from pathlib import Path

# Paths
PROJECT_ROOT = Path(__file__).parent
RESULTS_DIR = PROJECT_ROOT / "results"
CONFIGS_DIR = PROJECT_ROOT / "configs"

# Grids
DEFAULT_X_MIN = -8.0
DEFAULT_X_MAX = 8.0
DEFAULT_N_POINTS = 512
DEFAULT_METER_N_POINTS = 1024
MIN_GRID_POINTS = 16
MAX_VACUUM_SPACING = 0.5

# Tolerances
NORM_TOLERANCE = 1e-9
CONDITIONING_THRESHOLD = 1e-12  # W(x_m) floor for conditioning
IN_PHASE_TOLERANCE = 1e-3  # |sin(theta - phi)| below this uses the translation path
OVERFLOW_TOLERANCE = 1e-9  # meter mass allowed to leave the grid after the shift
FILTER_PATH_TOLERANCE = 1e-6

# Fock oracle
DEFAULT_FOCK_DIM = 64
LEAKAGE_LEVELS = 8
LEAKAGE_ACCEPT = 1e-8
LEAKAGE_FLAG = 1e-6
EIGENSTATE_PACKET_SQUEEZING = 0.5

# Couplings
DEFAULT_KAPPA_STRONG = 1.0
DEFAULT_KAPPA_WEAK = 0.2
WEAKNESS_RATIO = 5.0

# Tomography
MIN_TOMOGRAPHY_PHASES = 16
DEFAULT_TOMOGRAPHY_PHASES = 32
DEFAULT_SHOTS = 100_000
DEFAULT_SQUEEZING = 2.5
DETECTOR_SPACING = 0.15  # bin width of sampled projections fed to back-projection
BACKPROJECTION_UPSAMPLE = 4
WIGNER_EXTENT = 5.0
WIGNER_POINTS = 101
PHASE_WORKERS = 4

# Output
CSV_FLOAT_FORMAT = "%.12g"
