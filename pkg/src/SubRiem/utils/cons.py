"""
--- Constants ---

This file contains the constants used in the application: numerical
tolerances, default integration settings and directory paths.

License:  Apache-2.0 license
"""

import os
from typing import Final, Tuple


CURRENT_DIRECTORY_PATH: Final[str] = os.path.dirname(os.path.abspath(__file__))\
    .replace("\\\\", "\\").replace("\\", "/").replace("//", "/")\
    .replace("/src/SubRiem/utils", "").replace("/src/SubRiem", "").replace("/src", "")

SRC_DIRECTORY_PATH: Final[str] = os.path.join(CURRENT_DIRECTORY_PATH, "src", "SubRiem")
TEMPLATES_DIRECTORY_PATH: Final[str] = os.path.join(SRC_DIRECTORY_PATH, "templates")
SPECS_DIRECTORY_PATH: Final[str] = os.path.join(CURRENT_DIRECTORY_PATH, "specs")


# Tolerances
MATRIX_TOLERANCE: Final[float] = 1e-10
OPERATOR_TOLERANCE: Final[float] = 1e-9
SYMMETRY_TOLERANCE: Final[float] = 1e-12
RANK_THRESHOLD: Final[float] = 1e-10
SINGULAR_FRAME_THRESHOLD: Final[float] = 1e-12
LEFT_INVARIANCE_TOLERANCE: Final[float] = 1e-8

# Flow and sampling
DEFAULT_FLOW_STEPS: Final[int] = 100
DEFAULT_SAMPLE_COUNT: Final[int] = 16
DEFAULT_STEP_SIZE: Final[float] = 1e-3
DEFAULT_SEED: Final[int] = 0
SAMPLER_RULES: Final[Tuple[str, ...]] = ("exact-circle", "antithetic-uniform")

# Parallelism
THREADS_ENVIRONMENT_VARIABLE: Final[str] = "SUBRIEM_THREADS"
DEFAULT_MAX_THREADS: Final[int] = 4

# Report serialization
SIGNIFICANT_DIGITS: Final[int] = 17

OPERATOR_NAMES: Final[Tuple[str, ...]] = (
    "sos", "lv", "divgrad", "divgrad-riem", "haar-left", "haar-right"
)


if __name__ == "__main__":
    print("cons.py: This file is not designed to be executed.")
