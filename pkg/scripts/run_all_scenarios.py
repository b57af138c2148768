"""Run every figure scenario into OUT/<name>/ and print wall time per scenario.

    python scripts/run_all_scenarios.py [OUT] [--seed N] [--config cfg.yaml]
"""

import argparse
import sys
import time
from pathlib import Path

from optoconv.cli import main as cli_main
from optoconv.scenarios import SCENARIOS


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("out", nargs="?", default="results")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--config")
    args = ap.parse_args()
    failed = []
    for name in SCENARIOS:
        argv = [name, "--out", str(Path(args.out) / name), "--seed", str(args.seed)]
        if args.config:
            argv += ["--config", args.config]
        t0 = time.perf_counter()
        rc = cli_main(argv)
        print(f"  {name}: exit {rc}, {time.perf_counter() - t0:.1f}s")
        if rc:
            failed.append(name)
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
