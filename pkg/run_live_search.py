"""
CLI for the LIVE multi-robot search stack.

Examples:
    python run_live_search.py plan --scenario data/scenarios/apartment_live.json --out out/plan
    python run_live_search.py run --scenario data/scenarios/apartment_live.json --seed 7 --mode live --out out/run
    python run_live_search.py batch --matrix data/matrices/apartment_matrix.json --out out/batch
    python run_live_search.py serve --scenario data/scenarios/apartment_live.json --listen 127.0.0.1:7400
    python run_live_search.py client --scenario data/scenarios/apartment_live.json --connect 127.0.0.1:7400 --robot a1
"""

import sys

from src.harness.cli import cli_main


def main() -> int:
    """Main CLI function."""
    return cli_main(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())
