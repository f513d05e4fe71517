#!/usr/bin/env python3
"""Drive every corrupted fixture through the pipeline and report the failure
label each one produces. Exits nonzero if any label differs from the
expected taxonomy.

Usage: python scripts/run_failure_suite.py
"""

import dataclasses
import sys
import tempfile
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from rackcheck.config import PipelineConfig
from rackcheck.datafiles import data_path
from rackcheck.errors import PipelineFailure
from rackcheck.pipeline import run_pipeline

FIXTURES = Path(__file__).resolve().parents[1] / "tests" / "fixtures"


def expectations():
    golden = data_path("problems", "golden.txt").read_text(encoding="utf-8")
    base = PipelineConfig()
    return [
        ("missing_bays", (FIXTURES / "missing_bays.txt").read_text(),
         base, "parse_error"),
        ("no_location", (FIXTURES / "no_location.txt").read_text(),
         base, "parse_error"),
        ("light_pallets", (FIXTURES / "light_pallets.txt").read_text(),
         base, "tool_runtime_error"),
        ("high_load_elevation",
         (FIXTURES / "high_load_elevation.txt").read_text(),
         base, "modeling_logic_error"),
        ("unknown_city", (FIXTURES / "unknown_city.txt").read_text(),
         base, "schema_violation"),
        ("unknown_city_one_round", (FIXTURES / "unknown_city.txt").read_text(),
         dataclasses.replace(base, max_rounds=1), "round_limit"),
        ("negative_pgv_table", golden,
         dataclasses.replace(base,
                             seismic_table=FIXTURES / "bad_table.csv"),
         "schema_violation"),
        ("free_base", golden,
         PipelineConfig.from_file(FIXTURES / "free_base_config.json"),
         "solver_singular"),
    ]


def main() -> int:
    bad = 0
    for name, text, config, expected in expectations():
        try:
            run_pipeline(text, config, out_dir=tempfile.mkdtemp())
            label, step = "none", "-"
        except PipelineFailure as exc:
            label, step = exc.label, exc.step
        mark = "ok" if label == expected else f"EXPECTED {expected}"
        if label != expected:
            bad += 1
        print(f"  {name:<24} step {step:>2}  {label:<22} {mark}")
    return 1 if bad else 0


if __name__ == "__main__":
    raise SystemExit(main())
