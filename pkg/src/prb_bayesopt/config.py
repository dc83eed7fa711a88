"""Project-wide configuration."""

import os
import tomllib
from pathlib import Path
from typing import Any

from dotenv import load_dotenv

PROJECT_ROOT = Path(os.environ.get("PRB_PROJECT_ROOT", Path.cwd()))

load_dotenv(PROJECT_ROOT / ".env")

RESULTS_DIR = PROJECT_ROOT / "results"
DB_PATH = RESULTS_DIR / "prb_bayesopt.duckdb"

# Root seed for every seeded operation when --seeds is not given
DEFAULT_ROOT_SEED = int(os.environ.get("PRB_SEED", "0"))

# Model
DEFAULT_NUM_FEATURES = 2048
DEFAULT_MAP_RESTARTS = 8
JITTER_START = 1e-10
JITTER_MAX = 1e-6
VARIANCE_TOLERANCE = 1e-9
DEGENERATE_VARIANCE = 1e-12

# Sample-path optimizer
DEFAULT_RANDOM_SEARCH_POINTS = 2048
DEFAULT_NUM_STARTS = 8
DEFAULT_GRADIENT_TOLERANCE = 1e-6
DEFAULT_MAX_ITERATIONS = 200

# Sequential testing
SCHEDULE_ALPHA = 1.1
SCHEDULE_BETA = 1.5
SCHEDULE_N0 = 64
DEFAULT_DRAW_CAP = 1000

# Stopping
DEFAULT_EPSILON = 0.1
DEFAULT_DELTA = 0.05
DEFAULT_DES_PATHS = 32

# Acquisition
DEFAULT_QUADRATURE_NODES = 16

# Harness
DEFAULT_INITIAL_DESIGN = 5
DEFAULT_REPLICATIONS = 20
REGRET_LOG10_FLOOR = -9.0
ORACLE_BUDGET_LEVEL = 0.95

# Baseline cutoffs are epsilon / 2**exponent
BASELINE_CUTOFF_EXPONENTS: dict[str, int] = {
    "acq": 15,
    "delta_cb": 3,
    "delta_es": 4,
}

# Budget, epsilon and noise per builtin objective at desk scale
OBJECTIVE_DEFAULTS: dict[str, dict[str, Any]] = {
    "gp": {"dim": 2, "budget": 64, "epsilon": 0.1, "noise": 1e-6},
    "branin": {"dim": 2, "budget": 128, "epsilon": 0.1, "noise": 1e-6},
    "hartmann3": {"dim": 3, "budget": 64, "epsilon": 0.1, "noise": 1e-6},
    "hartmann6": {"dim": 6, "budget": 64, "epsilon": 0.1, "noise": 1e-6},
    "rosenbrock": {"dim": 4, "budget": 96, "epsilon": 1e-4, "noise": 1e-6},
}


def load_config_file(path: str | Path) -> dict[str, Any]:
    """Read a TOML file of flag defaults.

    Keys mirror the long CLI flag names; dashes and underscores are interchangeable.
    """
    with open(path, "rb") as f:
        raw = tomllib.load(f)
    return {key.replace("-", "_"): value for key, value in raw.items()}
