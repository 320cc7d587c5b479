"""Project settings & constants.

Every value can be overridden from the environment or `config/secrets.env`
(optional, not committed).
"""

from __future__ import annotations

import os

# ---- Ring ----
DEFAULT_N = int(os.getenv("ANNULUS_DEFAULT_N", "3"))

# Numeric checks (root finding, bad-set membership, specializations)
NUMERIC_TOL = float(os.getenv("ANNULUS_NUMERIC_TOL", "1e-9"))

# ---- Randomized suites ----
RANDOM_SEED = int(os.getenv("ANNULUS_RANDOM_SEED", "20240917"))
RANDOM_CASES = int(os.getenv("ANNULUS_RANDOM_CASES", "100"))
RING_AXIOM_CASES = int(os.getenv("ANNULUS_RING_AXIOM_CASES", "200"))
CONFLUENCE_BRAIDS = int(os.getenv("ANNULUS_CONFLUENCE_BRAIDS", "50"))
CONFLUENCE_MAX_LETTERS = int(os.getenv("ANNULUS_CONFLUENCE_MAX_LETTERS", "6"))

# Largest n the selftest command runs the trace suites for
SELFTEST_MAX_N = int(os.getenv("ANNULUS_SELFTEST_MAX_N", "4"))

# ---- Output ----
JSON_SCHEMA_VERSION = os.getenv("ANNULUS_JSON_SCHEMA_VERSION", "1")

# ---- Paths ----
LOG_PATH = os.getenv("ANNULUS_LOG_PATH", "logs/annulus.log")
SKEIN_CONSTANTS_PATH = os.getenv("ANNULUS_SKEIN_CONSTANTS", "config/skein_constants.json")
COUNIT_CONSTANTS_PATH = os.getenv("ANNULUS_COUNIT_CONSTANTS", "config/counit_constants.json")
