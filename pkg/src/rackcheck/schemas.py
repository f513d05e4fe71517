"""Payload schema validation.

Schemas live as JSON files under data/schemas and are validated with
jsonschema. Violations are flat strings that always start with the offending
path (".location", ".elements[2].nodes") so callers and repair instructions
can point at the exact field. The structural model gets extra referential
checks that JSON Schema cannot express.
"""

from __future__ import annotations

import json
from functools import lru_cache

import jsonschema

from .datafiles import data_path
from .errors import UnknownSchema

SCHEMA_IDS = ("decomposition", "building_info", "seismic_params", "load_data",
              "section_data", "structural_model", "check_result")


@lru_cache(maxsize=None)
def load_schema(schema_id: str) -> dict:
    if schema_id not in SCHEMA_IDS:
        raise UnknownSchema(f"no schema registered under {schema_id!r}")
    ref = data_path("schemas", f"{schema_id}.json")
    return json.loads(ref.read_text(encoding="utf-8"))


def _format_path(parts) -> str:
    out = ""
    for part in parts:
        if isinstance(part, int):
            out += f"[{part}]"
        else:
            out += f".{part}"
    return out or "."


def _violation(error: jsonschema.ValidationError) -> str:
    path = _format_path(error.absolute_path)
    if error.validator == "required":
        # point at the missing child, not its parent
        missing = error.message.split("'")[1]
        child = f"{path}.{missing}" if path != "." else f".{missing}"
        return f"{child}: required key missing"
    if path == ".":
        return f".: {error.message}"
    return f"{path}: {error.message}"


def _model_extra_checks(model: dict) -> list[str]:
    """Referential integrity and tag conventions for structural models."""
    problems: list[str] = []
    nodes = model.get("nodes", [])
    ids = [n.get("id") for n in nodes if isinstance(n, dict)]
    known = set(ids)
    if len(known) != len(ids):
        problems.append(".nodes: duplicate node ids")
    if ids and sorted(ids) != list(range(1, len(ids) + 1)):
        problems.append(".nodes: ids must run 1..N without gaps")
    for i, elem in enumerate(model.get("elements", [])):
        if not isinstance(elem, dict):
            continue
        for nid in elem.get("nodes", []):
            if nid not in known:
                problems.append(f".elements[{i}].nodes: references unknown node {nid}")
        etype = elem.get("type")
        if etype == "truss" and "transfTag" in elem:
            problems.append(f".elements[{i}].transfTag: truss elements take no transform")
        if etype == "elasticBeamColumn" and "transfTag" not in elem:
            problems.append(f".elements[{i}].transfTag: beam-column requires a transform")
    for i, sup in enumerate(model.get("supports", [])):
        if isinstance(sup, dict) and sup.get("node") not in known:
            problems.append(f".supports[{i}].node: references unknown node {sup.get('node')}")
    for i, load in enumerate(model.get("loads", [])):
        if isinstance(load, dict) and load.get("node") not in known:
            problems.append(f".loads[{i}].node: references unknown node {load.get('node')}")
    return problems


def validate_payload(schema_id: str, payload) -> list[str]:
    """Return a sorted list of violations; empty means the payload is valid."""
    schema = load_schema(schema_id)
    validator = jsonschema.Draft7Validator(schema)
    problems = [_violation(e) for e in validator.iter_errors(payload)]
    if schema_id == "structural_model" and isinstance(payload, dict) and not problems:
        problems.extend(_model_extra_checks(payload))
    return sorted(problems)
