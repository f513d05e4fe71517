#!/usr/bin/env python3
"""Run the reference problem end to end and print a compact step log,
the check ratios, the verdict, and the benchmark scores.

Usage: python scripts/run_golden.py [--out DIR]
"""

import argparse
import json
import sys
import tempfile
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from rackcheck.config import PipelineConfig
from rackcheck.datafiles import data_path
from rackcheck.pipeline import run_pipeline
from rackcheck.scoring import score_trace


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=None)
    args = ap.parse_args()
    out = args.out or Path(tempfile.mkdtemp(prefix="rackcheck-golden-"))

    text = data_path("problems", "golden.txt").read_text(encoding="utf-8")
    result = run_pipeline(text, PipelineConfig(), out_dir=out)

    for rec in result.trace:
        kind = rec["kind"]
        if kind == "tool_call":
            print(f"  step {rec['step']:>2}  call   {rec['payload']['name']}")
        elif kind == "assistant_text":
            print(f"  step {rec['step']:>2}  note   {rec['payload']}")
        elif kind == "verdict":
            print(f"  step {rec['step']:>2}  {rec['payload']}")

    print()
    for check in result.checks:
        print(f"  {check['category']:<6} {check['mode']:<12} "
              f"ratio {check['ratio']:.2f}  "
              f"{'pass' if check['pass'] else 'FAIL'}")

    truth = json.loads(
        data_path("ground_truth", "golden.json").read_text(encoding="utf-8"))
    scores = score_trace(result.trace, result.memory.data(), truth)
    print(f"\n  SAAB {scores['SAAB']}  SDAB {scores['SDAB']}  "
          f"LAB {scores['LAB']}  MASEB {scores['MASEB']}")
    print(f"  outputs in {out}")
    return 0 if result.adequate else 1


if __name__ == "__main__":
    raise SystemExit(main())
