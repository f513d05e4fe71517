#!/usr/bin/env python3
"""Regenerate ground-truth documents by running the deterministic pipeline
on each shipped problem and distilling the reference values from the run.

Usage: python scripts/make_ground_truth.py [--problem NAME ...] [--out DIR]
"""

import argparse
import sys
import tempfile
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from rackcheck.canon import canonical_dumps
from rackcheck.config import PipelineConfig
from rackcheck.datafiles import data_path
from rackcheck.pipeline import run_pipeline


def distill(result) -> dict:
    mem = result.memory.data()
    model = mem["structural_model"]
    nodes = {n["id"]: (n["x"], n["y"]) for n in model["nodes"]}
    braces = [[list(nodes[i]), list(nodes[j])]
              for e in model["elements"] if e["type"] == "truss"
              for i, j in [e["nodes"]]]
    xs = [n["x"] for n in model["nodes"]]
    ys = [n["y"] for n in model["nodes"]]
    info = mem["building_info"]
    load_data = mem["load_data"]
    section_info = {m["member"]: m for m in mem["section_info"]["members"]}
    section_data = mem["section_data"]

    def member(name):
        return {
            "shape": section_info[name]["shape"],
            "dims_in": section_info[name]["dims_in"],
            "capacities": {k: section_data[name]["capacities"][k]
                           for k in ("Pt", "Pc")},
        }

    return {
        "verdict": mem["final_verdict"],
        "decomposition": {
            "number_of_bays": mem["number_of_bays"],
            "number_of_pallets": mem["number_of_pallets"],
        },
        "building_info": {
            "location": info["location"],
            "floor_elevations_ft": info["floor_elevations_ft"],
            "nominal_loads_lbs": info["loads_lbs"],
        },
        "adjusted_loads_lbs": mem["loads_lbs"],
        "seismic_parameters": mem["seismic_parameters"],
        "loads": {
            "seismic_forces_kip": [e["force_kip"] for e in load_data["seismic"]],
            "live_forces_kip": [e["force_kip"] for e in load_data["live"]],
            "base_shear_kip": load_data["base_shear_kip"],
        },
        "sections": {
            "E": mem["section_info"]["E"],
            "column": member("column"),
            "brace": member("brace"),
        },
        "model": {
            "node_count": len(model["nodes"]),
            "truss_count": sum(1 for e in model["elements"]
                               if e["type"] == "truss"),
            "beamcolumn_count": sum(1 for e in model["elements"]
                                    if e["type"] == "elasticBeamColumn"),
            "column_line_count": len({n["x"] for n in model["nodes"]
                                      if any(s["node"] == n["id"]
                                             for s in model["supports"])}),
            "x_range": [min(xs), max(xs)],
            "y_range": [min(ys), max(ys)],
            "brace_segments": braces,
            "load_elevations_ft": [e["elevation_ft"]
                                   for e in load_data["seismic"]],
        },
        "envelope": mem["processed_forces"]["envelope"]["combined"],
        "check_ratios": {f'{c["category"]}_{c["mode"]}': round(c["ratio"], 2)
                         for c in mem["check_results"]},
        "trace_budget": 2 * len(result.trace),
    }


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--problem", action="append",
                    help="problem stem under data/problems (repeatable); "
                         "default: every .txt there")
    ap.add_argument("--out", type=Path,
                    default=Path(__file__).resolve().parents[1]
                    / "src" / "rackcheck" / "data" / "ground_truth")
    args = ap.parse_args()

    problems = args.problem or sorted(
        p.stem for p in data_path("problems").glob("*.txt"))
    args.out.mkdir(parents=True, exist_ok=True)
    for stem in problems:
        text = data_path("problems", f"{stem}.txt").read_text(encoding="utf-8")
        with tempfile.TemporaryDirectory() as td:
            result = run_pipeline(text, PipelineConfig(), out_dir=td)
        truth = distill(result)
        path = args.out / f"{stem}.json"
        path.write_text(canonical_dumps(truth, indent=2) + "\n",
                        encoding="utf-8")
        print(f"{path}: verdict={truth['verdict']!r} "
              f"budget={truth['trace_budget']}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
