"""Configuration settings for the fsing toolkit."""

import os


def _flag(name: str, default: str) -> bool:
    return os.getenv(name, default).strip().lower() not in ("0", "false", "no", "off", "")


# Verification limits - every default pipeline finishes in minutes
FAMILY_A_MAX_PRIME = int(os.getenv("FSING_FAMILY_A_MAX_PRIME", "5"))
FAMILY_B_MAX_PRIME = int(os.getenv("FSING_FAMILY_B_MAX_PRIME", "3"))
FAMILY_B_LARGE_PRIME = int(os.getenv("FSING_FAMILY_B_LARGE_PRIME", "5"))  # needs --allow-large

# Isolated-singularity probe
PROBE_DEGREE_CAP_FACTOR = int(os.getenv("FSING_PROBE_DEGREE_CAP_FACTOR", "2"))
PROBE_MAX_UNKNOWNS = int(os.getenv("FSING_PROBE_MAX_UNKNOWNS", "20000"))

# Annihilator probe
ANNIHILATOR_E_MAX = int(os.getenv("FSING_ANNIHILATOR_E_MAX", "2"))
ANNIHILATOR_MAX_PRIME = int(os.getenv("FSING_ANNIHILATOR_MAX_PRIME", "3"))

# Report Configuration
REPORT_SCHEMA_VERSION = "1.0"
ARTIFACT_VERSION = "0.1.0"
REPORT_INCLUDE_TIMINGS = _flag("FSING_REPORT_INCLUDE_TIMINGS", "1")

# Logging Configuration
LOG_LEVEL = os.getenv("FSING_LOG_LEVEL", "INFO")
LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
