from pathlib import Path

BASE_DIR = Path(__file__).resolve().parent.parent
DATA_DIR = BASE_DIR / "data"

VARIABLES = ("z", "w", "wp", "t", "lambda", "x", "y", "u", "v")

DEFAULT_SAMPLES = 5
DEFAULT_SEED = 0

SAMPLE_BOUND = 64
SAMPLE_BOUND_GROWTH = 2
MAX_SAMPLE_FACTOR = 3
MAX_DEGENERATE_DRAWS = 200

BLOWUP_DEPTH_CAP = 12
GENERIC_POSITION_ATTEMPTS = 24

CONIC_SEARCH_HEIGHT = 20

MAX_POLE_CLUSTERS = 16

LOG_LEVEL_ENV = "RATSODE_LOG_LEVEL"
