"""Command line entry point.

Subcommands: run, seismic, fem, score, replay, batch. Exit codes: 0 success
(or adequate verdict), 1 inadequate verdict, 2 pipeline failure, 3 usage or
configuration error. The final stdout line of `run` is always the verdict
string or a line starting with "ERROR:".
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import sys
from pathlib import Path

from . import fem as fem_mod
from .canon import canonical_dumps
from .config import PipelineConfig
from .errors import PipelineFailure, RackcheckError
from .loads import LoadData
from .pipeline import (MODEL_FILENAME, SNAPSHOT_FILENAME, TRACE_FILENAME,
                       run_pipeline)
from .protocol import TraceLog
from .retrieval import SeismicDatabase
from .schemas import validate_payload
from .scoring import load_tolerances, score_trace

EXIT_OK = 0
EXIT_INADEQUATE = 1
EXIT_FAILURE = 2
EXIT_USAGE = 3

OUTPUT_FILES = (TRACE_FILENAME, SNAPSHOT_FILENAME, MODEL_FILENAME,
                "internal_forces.json")


def _err(message: str) -> int:
    print(f"ERROR: {message}")
    return EXIT_USAGE


def _read_json(path: Path):
    return json.loads(path.read_text(encoding="utf-8"))


def _check_out_dir(out: Path, force: bool) -> str | None:
    if not out.exists():
        return None
    clashes = [name for name in OUTPUT_FILES if (out / name).exists()]
    if clashes and not force:
        return (f"output files already exist in {out} ({', '.join(clashes)}); "
                "pass --force to overwrite")
    return None


def _problem_text_from_trace(trace: TraceLog) -> str | None:
    for rec in trace:
        if (rec.get("kind") == "tool_call"
                and rec.get("payload", {}).get("name")
                == "split_problem_description"):
            return rec["payload"].get("args", {}).get("text")
    return None


def _load_config(args) -> PipelineConfig:
    if getattr(args, "config", None):
        cfg = PipelineConfig.from_file(args.config)
    else:
        cfg = PipelineConfig()
    if getattr(args, "backend", None):
        cfg.backend = args.backend
    return cfg


def cmd_run(args) -> int:
    problem = Path(args.problem)
    if not problem.is_file():
        return _err(f"problem file not found: {problem}")
    try:
        config = _load_config(args)
    except RackcheckError as exc:
        return _err(str(exc))
    out = Path(args.out)
    clash = _check_out_dir(out, args.force)
    if clash:
        return _err(clash)

    scripted_records = None
    if config.backend == "scripted":
        if not args.trace:
            return _err("scripted backend needs --trace with a recorded run")
        try:
            scripted_records = list(TraceLog.from_jsonl(args.trace))
        except (OSError, RackcheckError) as exc:
            return _err(str(exc))

    text = problem.read_text(encoding="utf-8")
    try:
        result = run_pipeline(text, config, out_dir=out,
                              scripted_records=scripted_records)
    except PipelineFailure as exc:
        print(f"ERROR: {exc.label}: {exc}")
        return EXIT_FAILURE
    except RackcheckError as exc:
        return _err(str(exc))
    print(result.verdict)
    return EXIT_OK if result.adequate else EXIT_INADEQUATE


def cmd_seismic(args) -> int:
    table = Path(args.table) if args.table else None
    if table is not None and not table.is_file():
        return _err(f"table file not found: {table}")
    try:
        db = SeismicDatabase(table_path=table)
        doc = db.lookup(args.city).to_document()
    except RackcheckError as exc:
        return _err(str(exc))
    print(canonical_dumps(doc, indent=2))
    return EXIT_OK


def _parse_combos(spec: str) -> list[dict]:
    combos = []
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        case, _, factor = part.partition("=")
        if not factor:
            raise ValueError(f"combo term {part!r} is not case=factor")
        combos.append({"name": case.strip(),
                       "factors": {case.strip(): float(factor)}})
    if not combos:
        raise ValueError("empty combo spec")
    return combos


def cmd_fem(args) -> int:
    model_path, loads_path = Path(args.model), Path(args.loads)
    for p in (model_path, loads_path):
        if not p.is_file():
            return _err(f"input file not found: {p}")
    try:
        model = _read_json(model_path)
        load_doc = _read_json(loads_path)
    except json.JSONDecodeError as exc:
        return _err(f"bad JSON input: {exc}")
    violations = validate_payload("structural_model", model)
    violations += validate_payload("load_data", load_doc)
    if violations:
        for v in violations:
            print(f"ERROR: {v}")
        return EXIT_USAGE
    combos = None
    if args.combos:
        try:
            combos = _parse_combos(args.combos)
        except ValueError as exc:
            return _err(str(exc))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    try:
        result = fem_mod.run_complete_analysis(
            model, LoadData.from_document(load_doc), combos=combos,
            forces_path=out / "internal_forces.json")
    except RackcheckError as exc:
        print(f"ERROR: {exc}")
        return EXIT_FAILURE
    result.pop("forces", None)
    print(canonical_dumps(result, indent=2))
    return EXIT_OK


def cmd_score(args) -> int:
    trace_path, truth_path = Path(args.trace), Path(args.truth)
    for p in (trace_path, truth_path):
        if not p.is_file():
            return _err(f"input file not found: {p}")
    snapshot_path = Path(args.snapshot) if args.snapshot \
        else trace_path.parent / SNAPSHOT_FILENAME
    if not snapshot_path.is_file():
        return _err(f"memory snapshot not found: {snapshot_path} "
                    "(pass --snapshot)")
    try:
        trace = TraceLog.from_jsonl(trace_path)
        truth = _read_json(truth_path)
        snapshot = _read_json(snapshot_path)
        tolerances = load_tolerances(args.tolerances)
        scores = score_trace(trace, snapshot, truth, tolerances)
    except (json.JSONDecodeError, RackcheckError) as exc:
        return _err(str(exc))
    print(f"SAAB {scores['SAAB']} SDAB {scores['SDAB']} "
          f"LAB {scores['LAB']} MASEB {scores['MASEB']}")
    if args.breakdown:
        print(canonical_dumps(scores["breakdown"], indent=2))
    return EXIT_OK


def cmd_replay(args) -> int:
    trace_path = Path(args.trace)
    if not trace_path.is_file():
        return _err(f"trace file not found: {trace_path}")
    snapshot_path = Path(args.snapshot) if args.snapshot \
        else trace_path.parent / SNAPSHOT_FILENAME
    if not snapshot_path.is_file():
        return _err(f"reference snapshot not found: {snapshot_path} "
                    "(pass --snapshot)")
    try:
        trace = TraceLog.from_jsonl(trace_path)
        reference = _read_json(snapshot_path)
    except (json.JSONDecodeError, RackcheckError) as exc:
        return _err(str(exc))
    text = _problem_text_from_trace(trace)
    if text is None:
        return _err("trace has no recorded problem text to replay")
    config = PipelineConfig(backend="scripted")
    try:
        result = run_pipeline(text, config, out_dir=args.out,
                              scripted_records=list(trace))
    except (PipelineFailure, RackcheckError) as exc:
        print(f"ERROR: replay failed: {exc}")
        return EXIT_FAILURE
    replayed = result.memory.data()
    if replayed == reference:
        print("snapshot identical")
        return EXIT_OK
    diff = sorted(set(replayed) ^ set(reference))
    same_keys = set(replayed) & set(reference)
    changed = sorted(k for k in same_keys if replayed[k] != reference[k])
    print(f"snapshot differs: keys only in one side {diff}, changed {changed}")
    return EXIT_FAILURE


def _batch_one(problem: Path, config: PipelineConfig, out: Path):
    text = problem.read_text(encoding="utf-8")
    try:
        result = run_pipeline(text, config, out_dir=out)
        return problem.stem, result.verdict, None
    except PipelineFailure as exc:
        return problem.stem, None, f"{exc.label}: {exc}"


def cmd_batch(args) -> int:
    problems = [Path(p) for p in args.problems]
    missing = [str(p) for p in problems if not p.is_file()]
    if missing:
        return _err(f"problem files not found: {', '.join(missing)}")
    try:
        config = _load_config(args)
    except RackcheckError as exc:
        return _err(str(exc))
    out_root = Path(args.out)
    for p in problems:
        clash = _check_out_dir(out_root / p.stem, args.force)
        if clash:
            return _err(clash)

    results = {}
    with concurrent.futures.ThreadPoolExecutor(max_workers=args.jobs) as pool:
        futures = {pool.submit(_batch_one, p, config, out_root / p.stem): p
                   for p in problems}
        for future in concurrent.futures.as_completed(futures):
            stem, verdict, error = future.result()
            results[stem] = (verdict, error)

    code = EXIT_OK
    for p in problems:
        verdict, error = results[p.stem]
        if error is not None:
            print(f"{p.stem}: ERROR: {error}")
            code = EXIT_FAILURE
        else:
            print(f"{p.stem}: {verdict}")
    return code


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rackcheck",
        description="Seismic adequacy pipeline for storage racking frames.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run the full pipeline on a problem")
    p_run.add_argument("problem", help="problem description text file")
    p_run.add_argument("--backend",
                       choices=("deterministic", "scripted", "remote"))
    p_run.add_argument("--config", help="pipeline config JSON")
    p_run.add_argument("--out", default="out", help="output directory")
    p_run.add_argument("--force", action="store_true",
                       help="overwrite existing output files")
    p_run.add_argument("--trace",
                       help="recorded trace (scripted backend only)")
    p_run.set_defaults(fn=cmd_run)

    p_seis = sub.add_parser("seismic", help="look up seismic parameters")
    p_seis.add_argument("--city", required=True)
    p_seis.add_argument("--table", help="alternate seismic table CSV")
    p_seis.set_defaults(fn=cmd_seismic)

    p_fem = sub.add_parser("fem", help="analyze a structural model file")
    p_fem.add_argument("model", help="structural model JSON")
    p_fem.add_argument("loads", help="load data JSON")
    p_fem.add_argument("--combos",
                       help="comma list of case=factor terms "
                            "(default: seismic=1.0,live=1.5)")
    p_fem.add_argument("--out", default=".",
                       help="directory for internal_forces.json")
    p_fem.set_defaults(fn=cmd_fem)

    p_score = sub.add_parser("score", help="score a trace against truth")
    p_score.add_argument("trace", help="trace JSONL file")
    p_score.add_argument("truth", help="ground truth JSON")
    p_score.add_argument("--snapshot",
                         help="memory snapshot (default: analysis_results.json "
                              "next to the trace)")
    p_score.add_argument("--tolerances", help="tolerance config JSON")
    p_score.add_argument("--breakdown", action="store_true",
                         help="also print per-component breakdown")
    p_score.set_defaults(fn=cmd_score)

    p_replay = sub.add_parser("replay",
                              help="re-execute a recorded trace and compare "
                                   "memory snapshots")
    p_replay.add_argument("trace", help="trace JSONL file")
    p_replay.add_argument("--snapshot",
                          help="reference snapshot (default: "
                               "analysis_results.json next to the trace)")
    p_replay.add_argument("--out", default=None,
                          help="optional output directory for the replay")
    p_replay.set_defaults(fn=cmd_replay)

    p_batch = sub.add_parser("batch", help="run many problems")
    p_batch.add_argument("problems", nargs="+")
    p_batch.add_argument("--out", required=True, help="output root directory")
    p_batch.add_argument("--jobs", type=int, default=1)
    p_batch.add_argument("--backend",
                         choices=("deterministic", "scripted", "remote"))
    p_batch.add_argument("--config")
    p_batch.add_argument("--force", action="store_true")
    p_batch.set_defaults(fn=cmd_batch)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage problems; remap to the documented code
        return EXIT_USAGE if exc.code else EXIT_OK
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
