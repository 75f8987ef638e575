#!/usr/bin/env python3
"""Setup script: create the logs folder and a default .env for first runs."""

import argparse
from pathlib import Path

# Folders
DIRS = ["logs"]

# Default .env template (every value is the built-in default)
ENV_TEMPLATE = """# Branch group lattice tool (.env)

# ---------------------------------------------------------------------------
# Depth bounds and caps
# ---------------------------------------------------------------------------
BGLA_DEPTH=8
BGLA_LEVEL_CAP=65536
BGLA_DEGREE_LIMIT=1024
BGLA_PRODUCT_STATE_CAP=1000000
BGLA_STATE_ORDER_LIMIT=8
BGLA_ORACLE_BUDGET=100000
BGLA_LEEMANN_WINDOW=2
BGLA_MEMO_SIZE=65536

# ---------------------------------------------------------------------------
# Runs and reports
# ---------------------------------------------------------------------------
BGLA_SEED=0
BGLA_FORMAT=text
BGLA_SPEC=specs/grigorchuk.aut

# ---------------------------------------------------------------------------
# Logging
# ---------------------------------------------------------------------------
BGLA_LOG_FILE=logs/bgla.log
BGLA_LOG_LEVEL=INFO
"""


def bootstrap(base: Path, force: bool = False) -> list[str]:
    """Create folders and .env under ``base``; returns what was done, one line per step."""
    done = []
    for name in DIRS:
        path = base / name
        path.mkdir(parents=True, exist_ok=True)
        done.append(f"Created directory: {path}")

    env_path = base / ".env"
    if env_path.exists() and not force:
        done.append(f"Config already exists: {env_path}")
    else:
        env_path.write_text(ENV_TEMPLATE, encoding="utf-8")
        done.append(f"Created config: {env_path}")
    return done


def main(argv: list[str] | None = None) -> None:
    parser = argparse.ArgumentParser(description="Prepare a working directory for the branch group lattice tool")
    parser.add_argument(
        "--base",
        type=Path,
        default=Path(__file__).resolve().parent,
        help="directory to prepare (default: this checkout)",
    )
    parser.add_argument("--force", action="store_true", help="overwrite an existing .env")
    args = parser.parse_args(argv)

    for line in bootstrap(args.base, args.force):
        print(line)
    print("  → Run: python cli.py verify all")


if __name__ == "__main__":
    main()
