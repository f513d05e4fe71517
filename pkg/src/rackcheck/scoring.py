"""Deterministic benchmark scoring over a finished run.

Four rubric scores, 0 to 100 each, computed by field-level comparison of the
trace and the final memory snapshot against a ground-truth document:

- SAAB: structural analysis (geometry 30, integration 20, execution 30,
  result retrieval 20)
- SDAB: section design (extraction 30, capacity 30, storage 20, transfer 20)
- LAB: loading (extraction 25, adjustment 25, retrieval 25, calculation 25)
- MASEB: whole-pipeline (completion 30, consistency 30, final accuracy 20,
  efficiency 20)

Every component is all-or-nothing: a run earns the full weight or zero. No
judging model is involved; tolerances come from a config document.
"""

from __future__ import annotations

import json
from pathlib import Path

from .datafiles import data_path
from .errors import ScoreError
from .schemas import validate_payload

_TRUTH_REQUIRED = ("verdict", "decomposition", "building_info",
                   "adjusted_loads_lbs", "seismic_parameters", "loads",
                   "sections", "model", "trace_budget")


def load_tolerances(path: str | Path | None = None) -> dict:
    p = Path(path) if path else data_path("score_tolerances.json")
    return json.loads(p.read_text(encoding="utf-8"))


def _rel_ok(actual, expected, tol: float) -> bool:
    try:
        a, e = float(actual), float(expected)
    except (TypeError, ValueError):
        return False
    if tol == 0:
        return a == e
    scale = abs(e) if e != 0 else 1.0
    return abs(a - e) <= tol * scale


def _seq_ok(actual, expected, tol: float) -> bool:
    if not isinstance(actual, (list, tuple)) or len(actual) != len(expected):
        return False
    return all(_rel_ok(a, e, tol) for a, e in zip(actual, expected))


def _segments_ok(actual, expected, tol: float) -> bool:
    """Order-insensitive endpoint-set comparison of 2-point segments."""
    def norm(segs):
        out = []
        for seg in segs:
            pts = sorted((round(float(p[0]), 9), round(float(p[1]), 9))
                         for p in seg)
            out.append(tuple(pts))
        return sorted(out)
    try:
        a, e = norm(actual), norm(expected)
    except (TypeError, ValueError, IndexError):
        return False
    if len(a) != len(e):
        return False
    return all(all(abs(pa[i] - pe[i]) <= tol for i in range(2))
               for sa, se in zip(a, e) for pa, pe in zip(sa, se))


def _model_truss_segments(model: dict) -> list:
    nodes = {n["id"]: (n["x"], n["y"]) for n in model.get("nodes", [])}
    segs = []
    for el in model.get("elements", []):
        if el.get("type") == "truss":
            i, j = el.get("nodes", (None, None))
            if i in nodes and j in nodes:
                segs.append((nodes[i], nodes[j]))
    return segs


class _Rubric:
    def __init__(self):
        self.components: dict[str, dict] = {}

    def add(self, name: str, weight: int, ok: bool, detail: str = "") -> None:
        self.components[name] = {"max": weight,
                                 "points": weight if ok else 0,
                                 "ok": bool(ok), "detail": detail}

    @property
    def total(self) -> int:
        return sum(c["points"] for c in self.components.values())


def _get(snapshot: dict, key: str, default=None):
    value = snapshot.get(key, default)
    return value if value is not None else default


def _score_saab(trace: list, snapshot: dict, truth: dict, tol: dict) -> _Rubric:
    r = _Rubric()
    model = _get(snapshot, "structural_model", {})
    tmodel = truth["model"]
    gtol = tol.get("geometry", 1e-6)

    trusses = [e for e in model.get("elements", []) if e.get("type") == "truss"]
    beamcols = [e for e in model.get("elements", [])
                if e.get("type") == "elasticBeamColumn"]
    xs = [n["x"] for n in model.get("nodes", [])]
    ys = [n["y"] for n in model.get("nodes", [])]
    geometry_ok = (
        bool(model)
        and len(model.get("nodes", [])) == tmodel["node_count"]
        and len(trusses) == tmodel["truss_count"]
        and len(beamcols) == tmodel["beamcolumn_count"]
        and bool(xs)
        and _seq_ok([min(xs), max(xs)], tmodel["x_range"], gtol)
        and _seq_ok([min(ys), max(ys)], tmodel["y_range"], gtol)
        and _segments_ok(_model_truss_segments(model),
                         tmodel["brace_segments"], gtol))
    r.add("geometry", 30, geometry_ok, "model nodes/elements/ranges vs truth")

    stol = tol.get("sections", 1e-6)
    ltol = tol.get("loads", 0.01)
    section_data = _get(snapshot, "section_data", {})
    msec = model.get("sections", {})
    sec_ok = (
        bool(msec) and bool(section_data)
        and _rel_ok(msec.get("column", {}).get("A"),
                    section_data.get("column", {}).get("properties", {}).get("A"), stol)
        and _rel_ok(msec.get("column", {}).get("I"),
                    section_data.get("column", {}).get("properties", {}).get("I"), stol)
        and _rel_ok(msec.get("brace", {}).get("A"),
                    section_data.get("brace", {}).get("properties", {}).get("A"), stol))
    model_forces = sorted((ld.get("fx", 0.0) for ld in model.get("loads", [])))
    truth_forces = sorted(truth["loads"]["seismic_forces_kip"])
    load_ok = _seq_ok(model_forces, truth_forces, ltol)
    r.add("integration", 20, sec_ok and load_ok,
          "model carries the designed sections and the reference loads")

    executed = any(
        rec.get("kind") == "tool_result"
        and rec.get("payload", {}).get("tool") == "run_complete_opensees_analysis"
        and rec.get("payload", {}).get("ok") is True
        for rec in trace)
    processed = _get(snapshot, "processed_forces", {})
    exec_ok = (executed and bool(processed.get("combos"))
               and "envelope" in processed and "governing" in processed)
    r.add("execution", 30, exec_ok, "analysis ran and stored processed forces")

    forces = _get(snapshot, "internal_forces", {})
    combos = forces.get("combos", {}) if isinstance(forces, dict) else {}
    retr_ok = bool(combos) and all(isinstance(v, list) and v
                                   for v in combos.values())
    r.add("retrieval", 20, retr_ok, "per-combo member force listing stored")
    return r


def _score_sdab(trace: list, snapshot: dict, truth: dict, tol: dict) -> _Rubric:
    r = _Rubric()
    stol = tol.get("sections", 1e-6)
    ctol = tol.get("capacities", 1e-6)
    tsec = truth["sections"]
    info = _get(snapshot, "section_info", {})
    members = {m.get("member"): m for m in info.get("members", [])}

    def dims_ok(name):
        t = tsec.get(name)
        m = members.get(name)
        if not t or not m:
            return False
        return (m.get("shape") == t["shape"]
                and all(_rel_ok(m.get("dims_in", {}).get(k),
                                t["dims_in"][k], stol)
                        for k in ("d", "b", "t")))

    extraction_ok = (dims_ok("column") and dims_ok("brace")
                     and _rel_ok(info.get("E"), tsec["E"], stol))
    r.add("extraction", 30, extraction_ok, "member shapes, dims, and E vs truth")

    section_data = _get(snapshot, "section_data", {})

    def caps_ok(name):
        t = tsec.get(name, {}).get("capacities", {})
        caps = section_data.get(name, {}).get("capacities", {})
        return bool(t) and all(_rel_ok(caps.get(k), t[k], ctol) for k in t)

    r.add("capacity", 30, caps_ok("column") and caps_ok("brace"),
          "stored Pt/Pc vs truth")

    storage_ok = (bool(section_data)
                  and validate_payload("section_data", section_data) == [])
    r.add("storage", 20, storage_ok, "section_data present and schema-valid")

    msec = _get(snapshot, "structural_model", {}).get("sections", {})
    transfer_ok = (
        bool(msec)
        and _rel_ok(msec.get("column", {}).get("A"),
                    section_data.get("column", {}).get("properties", {}).get("A"), stol)
        and _rel_ok(msec.get("column", {}).get("I"),
                    section_data.get("column", {}).get("properties", {}).get("I"), stol)
        and _rel_ok(msec.get("brace", {}).get("A"),
                    section_data.get("brace", {}).get("properties", {}).get("A"), stol))
    r.add("transfer", 20, transfer_ok, "designed properties reached the model")
    return r


def _score_lab(trace: list, snapshot: dict, truth: dict, tol: dict) -> _Rubric:
    r = _Rubric()
    etol = tol.get("elevations", 1e-9)
    ltol = tol.get("loads", 0.01)
    seis_tol = tol.get("seismic", 0.0)
    tb = truth["building_info"]
    info = _get(snapshot, "building_info", {})
    extraction_ok = (
        info.get("location") == tb["location"]
        and _seq_ok(info.get("floor_elevations_ft", []),
                    tb["floor_elevations_ft"], etol)
        and _seq_ok(info.get("loads_lbs", []), tb["nominal_loads_lbs"], ltol))
    r.add("extraction", 25, extraction_ok,
          "location, elevations, nominal loads vs truth")

    r.add("adjustment", 25,
          _seq_ok(_get(snapshot, "loads_lbs", []),
                  truth["adjusted_loads_lbs"], ltol),
          "adjusted per-level design loads vs truth")

    params = _get(snapshot, "seismic_parameters", {})
    tparams = truth["seismic_parameters"]
    retrieval_ok = bool(params) and all(
        _rel_ok(params.get(k), tparams[k], seis_tol) for k in tparams)
    r.add("retrieval", 25, retrieval_ok, "six spectral values vs truth")

    load_data = _get(snapshot, "load_data", {})
    forces = [e.get("force_kip") for e in load_data.get("seismic", [])]
    calc_ok = (
        _seq_ok(forces, truth["loads"]["seismic_forces_kip"], ltol)
        and _rel_ok(load_data.get("base_shear_kip"),
                    truth["loads"]["base_shear_kip"], ltol))
    r.add("calculation", 25, calc_ok, "story forces and base shear vs truth")
    return r


def _score_maseb(trace: list, snapshot: dict, truth: dict, tol: dict) -> _Rubric:
    r = _Rubric()
    steps = {rec.get("step") for rec in trace}
    has_verdict = any(rec.get("kind") == "verdict" for rec in trace)
    all_ok = all(rec.get("payload", {}).get("ok") is not False
                 for rec in trace if rec.get("kind") == "tool_result")
    no_failures = not any(rec.get("kind") == "failure" for rec in trace)
    completion_ok = (steps >= set(range(0, 11)) and has_verdict
                     and all_ok and no_failures)
    r.add("completion", 30, completion_ok,
          "all ten steps ran cleanly to a verdict")

    rtol = tol.get("ratios", 0.005)
    etol = tol.get("elevations", 1e-9)
    decomp = _get(snapshot, "decomposition", {})
    counts_ok = (
        decomp.get("number_of_bays") == _get(snapshot, "number_of_bays")
        and decomp.get("number_of_pallets") == _get(snapshot, "number_of_pallets"))
    binfo_elev = _get(snapshot, "building_info", {}).get("floor_elevations_ft", [])
    mem_elev = _get(snapshot, "floor_elevations_ft", [])
    ld_elev = [e.get("elevation_ft")
               for e in _get(snapshot, "load_data", {}).get("seismic", [])]
    elev_ok = (_seq_ok(mem_elev, binfo_elev, etol)
               and _seq_ok(sorted(ld_elev), sorted(binfo_elev), etol))
    info_members = {m.get("member")
                    for m in _get(snapshot, "section_info", {}).get("members", [])}
    data_members = set(_get(snapshot, "section_data", {}))
    members_ok = bool(data_members) and data_members <= info_members
    checks = _get(snapshot, "check_results", [])
    checks_ok = bool(checks) and all(
        c.get("capacity", 0) > 0
        and _rel_ok(c.get("ratio"), c.get("demand", 0.0) / c["capacity"], rtol)
        for c in checks)
    r.add("consistency", 30,
          counts_ok and elev_ok and members_ok and checks_ok,
          "cross-agent documents agree with each other")

    verdict = _get(snapshot, "final_verdict")
    if verdict is None:
        for rec in trace:
            if rec.get("kind") == "verdict":
                verdict = rec.get("payload")
    r.add("final_accuracy", 20, verdict == truth["verdict"],
          "verdict matches truth")

    budget = truth["trace_budget"]
    r.add("efficiency", 20, 0 < len(trace) <= budget,
          f"trace length within budget {budget}")
    return r


def score_trace(trace, snapshot: dict, truth: dict,
                tolerances: dict | None = None) -> dict:
    """Rubric scores for one run. `trace` is an iterable of trace records,
    `snapshot` the final memory map, `truth` the ground-truth document."""
    if not isinstance(truth, dict):
        raise ScoreError("ground truth must be a JSON object")
    missing = [k for k in _TRUTH_REQUIRED if k not in truth]
    if missing:
        raise ScoreError(f"ground truth missing keys: {missing}")
    tol = tolerances if tolerances is not None else load_tolerances()
    records = list(trace)
    snapshot = snapshot or {}

    rubrics = {
        "SAAB": _score_saab(records, snapshot, truth, tol),
        "SDAB": _score_sdab(records, snapshot, truth, tol),
        "LAB": _score_lab(records, snapshot, truth, tol),
        "MASEB": _score_maseb(records, snapshot, truth, tol),
    }
    result = {name: rub.total for name, rub in rubrics.items()}
    result["breakdown"] = {name: rub.components for name, rub in rubrics.items()}
    return result
