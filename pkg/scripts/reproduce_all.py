"""Run the acceptance battery and write one JSON report per criterion.

    python3 scripts/reproduce_all.py --seed 42 --out results/
"""

import argparse
import json
import time
from pathlib import Path

from ceswit.acceptance import CRITERIA, SuiteConfig, run_criterion
from ceswit.cli import _json_default


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--out", type=Path, default=Path("results"))
    ap.add_argument("--only", nargs="*", choices=list(CRITERIA), help="subset of criteria")
    args = ap.parse_args()

    args.out.mkdir(parents=True, exist_ok=True)
    cfg = SuiteConfig(seed=args.seed)
    failed = 0
    for key in args.only or CRITERIA:
        t0 = time.perf_counter()
        res = run_criterion(key, cfg)
        dt = time.perf_counter() - t0
        print(f"{res.line()}  ({dt:.1f}s)")
        failed += not res.passed
        with open(args.out / f"{key}.json", "w") as fh:
            json.dump(res.to_dict(), fh, indent=2, default=_json_default)
    return 1 if failed else 0


if __name__ == "__main__":
    raise SystemExit(main())
