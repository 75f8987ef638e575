"""Configuration module - loads settings from .env file."""

import logging
import os

from dotenv import load_dotenv

# Library use does not require a .env; values then fall back to defaults
load_dotenv()

logger = logging.getLogger(__name__)


def _get_int(key: str, default: int, minimum: int = 1) -> int:
    """Get integer env var; log warning and raise if malformed or below minimum."""
    raw = os.getenv(key, str(default)).strip()
    try:
        value = int(raw)
    except ValueError:
        logger.warning("Malformed integer in .env: %s=%r", key, raw)
        raise ValueError(f"Environment variable {key} must be an integer, got {raw!r}")
    if value < minimum:
        logger.warning("Out of range value in .env: %s=%d", key, value)
        raise ValueError(f"Environment variable {key} must be >= {minimum}, got {value}")
    return value


def _parse_seed(value: str | None) -> int:
    """Parse seed; default 0 for missing/empty."""
    if not value or not value.strip():
        return 0
    return int(value.strip())


def _parse_format(value: str | None) -> str:
    """Parse output format; only 'text' and 'json' are accepted."""
    fmt = (value or "text").strip().lower()
    if fmt not in ("text", "json"):
        raise ValueError(f"BGLA_FORMAT must be 'text' or 'json', got {value!r}")
    return fmt


# Depth bound N used by support computations and verification suites
DEPTH_BOUND: int = _get_int("BGLA_DEPTH", 8)
# Max vertices per materialized level (2^16)
LEVEL_SIZE_CAP: int = _get_int("BGLA_LEVEL_CAP", 65536)
# Max permutation degree for pointwise stabilizers and backtrack searches
DEGREE_LIMIT: int = _get_int("BGLA_DEGREE_LIMIT", 1024)
# Max composite states explored by the product automaton in identity checks
PRODUCT_STATE_CAP: int = _get_int("BGLA_PRODUCT_STATE_CAP", 1_000_000)
# Largest exponent tried when probing the order of an automaton state
STATE_ORDER_LIMIT: int = _get_int("BGLA_STATE_ORDER_LIMIT", 8)
# Default number of distinct queries a two-valued oracle may answer
ORACLE_BUDGET: int = _get_int("BGLA_ORACLE_BUDGET", 100_000, minimum=0)
# Extra levels below n + N inspected when searching Leemann constants
LEEMANN_WINDOW: int = _get_int("BGLA_LEEMANN_WINDOW", 2)
# Entries kept per system in each identity and level-permutation memo
MEMO_SIZE: int = _get_int("BGLA_MEMO_SIZE", 65536)

# Seed for every randomized procedure; --seed on the command line overrides it
SEED: int = _parse_seed(os.getenv("BGLA_SEED"))
# Report format: text | json
OUTPUT_FORMAT: str = _parse_format(os.getenv("BGLA_FORMAT"))
# Automaton spec file used by the CLI when --spec is not given
SPEC_FILE: str = os.getenv("BGLA_SPEC", "specs/grigorchuk.aut").strip()

# Rotating log file written by the CLI entry point
LOG_FILE: str = os.getenv("BGLA_LOG_FILE", "logs/bgla.log").strip()
LOG_LEVEL: str = os.getenv("BGLA_LOG_LEVEL", "INFO").strip().upper()
