"""
Deformation Toolkit Configuration

Configuration settings for the deformation-theory library and CLI.
"""

import os

# Truncation limits
BCH_MAX_ORDER = 4  # hard-coded BCH coefficients stop here
# the environment may lower the cap but never lift it past BCH_MAX_ORDER
MAX_TRUNCATION_ORDER = min(int(os.getenv("MAX_TRUNCATION_ORDER", "4")), BCH_MAX_ORDER)
MAX_DGLA_DEGREE = 3  # degrees 0..3; deformation theory only reads H^0, H^1, H^2
BRUTE_FORCE_MAX_ORDER = 2  # gauge orbits are affine-linear up to m^3 = 0

# Gauge fixing
GAUGE_FIX_EXTRA_STEPS = int(os.getenv("GAUGE_FIX_EXTRA_STEPS", "2"))

# n = 2 gauge comparison tries these multiples of gamma_2 in order
GAUGE_SIGN_CANDIDATES = ("1/2", "-1/2", "1", "-1")

# Report Configuration
REPORT_VERSION = "1.0.0"
DEFAULT_OUTPUT_DIR = os.getenv("DEFORMATION_OUTPUT_DIR", "reports")
DEFAULT_OUTPUT_FORMAT = os.getenv("DEFORMATION_OUTPUT_FORMAT", "json")
DETERMINISTIC_DEFAULT = os.getenv("DEFORMATION_DETERMINISTIC", "false").lower() == "true"

# Exit codes
EXIT_OK = 0
EXIT_IO_ERROR = 1
EXIT_CHECK_FAILED = 2

# CLI commands
COMMANDS = ("cohomology", "cone", "artin", "mhs-check", "mc", "vmhs", "compare-gauge")
