"""Structural model generation from parsed geometry.

Nodes are created in a fixed order (load points, then brace endpoints, then
column ends) with exact-coordinate deduplication, so ids are reproducible.
Each column line is chained into beam-column segments between its nodes
sorted by elevation; each brace segment becomes one pin-pin truss. All
coordinates stay in feet; the solver converts units.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ModelError
from .problem import GeometrySpec, Point

COORD_TOL = 1e-9

UNITS = {"length": "ft", "force": "kip", "stiffness": "kip/in^2"}

MAT_TAG = 1
TRANSF_TAG = 1


@dataclass(frozen=True)
class ModelReport:
    node_count: int
    beamcolumn_count: int     # chained segments
    brace_count: int
    column_line_count: int
    load_nodes: list[int]
    x_range: tuple[float, float]
    y_range: tuple[float, float]

    def to_document(self) -> dict:
        return {
            "node_count": self.node_count,
            "beamcolumn_count": self.beamcolumn_count,
            "brace_count": self.brace_count,
            "column_line_count": self.column_line_count,
            "load_nodes": list(self.load_nodes),
            "x_range": list(self.x_range),
            "y_range": list(self.y_range),
        }


class _NodeTable:
    def __init__(self):
        self.coords: list[Point] = []

    def add(self, p: Point) -> int:
        for i, q in enumerate(self.coords):
            if abs(p[0] - q[0]) <= COORD_TOL and abs(p[1] - q[1]) <= COORD_TOL:
                return i + 1
        self.coords.append((float(p[0]), float(p[1])))
        return len(self.coords)

    def find(self, p: Point) -> int | None:
        for i, q in enumerate(self.coords):
            if abs(p[0] - q[0]) <= COORD_TOL and abs(p[1] - q[1]) <= COORD_TOL:
                return i + 1
        return None


def resolve_load_elevations(geometry: GeometrySpec, load_data=None) -> list[float]:
    """Geometry-carried load elevations, falling back to the load document."""
    if geometry.load_elevations_ft:
        return sorted(geometry.load_elevations_ft)
    if load_data is not None:
        entries = load_data.seismic if hasattr(load_data, "seismic") else load_data["seismic"]
        return sorted(e[0] if isinstance(e, tuple) else e["elevation_ft"]
                      for e in entries)
    return []


def generate_structural_model(geometry: GeometrySpec, section_data: dict,
                              load_data, elastic_modulus: float = 29000.0
                              ) -> tuple[dict, ModelReport]:
    """Build the frame model document and its summary report.

    Lateral loads land on the loaded column line (the leftmost) at the load
    elevations; a load elevation outside that line raises ModelError.
    """
    if not geometry.column_lines:
        raise ModelError("geometry has no column lines")
    if "column" not in section_data or "brace" not in section_data:
        raise ModelError("section data must cover column and brace members")

    lines = sorted(geometry.column_lines, key=lambda ln: ln[0][0])
    loaded_x = lines[0][0][0]

    elevations = resolve_load_elevations(geometry, load_data)
    if not elevations:
        raise ModelError("no load elevations available")

    seismic_entries = (load_data.seismic if hasattr(load_data, "seismic")
                       else [(e["elevation_ft"], e["force_kip"])
                             for e in load_data["seismic"]])
    force_by_elev = {e: f for e, f in seismic_entries}

    loaded_line = lines[0]
    y_lo = min(loaded_line[0][1], loaded_line[1][1])
    y_hi = max(loaded_line[0][1], loaded_line[1][1])
    for h in elevations:
        if not (y_lo - COORD_TOL <= h <= y_hi + COORD_TOL):
            raise ModelError(
                f"load elevation {h} ft is off the loaded column line "
                f"(spans {y_lo} to {y_hi} ft)")

    table = _NodeTable()
    load_node_ids = [table.add((loaded_x, h)) for h in elevations]
    for seg in geometry.brace_segments:
        table.add(seg[0])
        table.add(seg[1])
    for ln in lines:
        table.add(ln[0])
        table.add(ln[1])

    nodes = [{"id": i + 1, "x": x, "y": y}
             for i, (x, y) in enumerate(table.coords)]

    elements: list[dict] = []
    beamcolumn_count = 0
    for ln in lines:
        lx = ln[0][0]
        lo = min(ln[0][1], ln[1][1])
        hi = max(ln[0][1], ln[1][1])
        on_line = sorted(
            (nid for nid, (x, y) in enumerate(table.coords, start=1)
             if abs(x - lx) <= COORD_TOL and lo - COORD_TOL <= y <= hi + COORD_TOL),
            key=lambda nid: table.coords[nid - 1][1])
        for a, b in zip(on_line, on_line[1:]):
            elements.append({"id": len(elements) + 1,
                             "type": "elasticBeamColumn", "nodes": [a, b],
                             "section": "column", "matTag": MAT_TAG,
                             "transfTag": TRANSF_TAG})
            beamcolumn_count += 1

    for seg in geometry.brace_segments:
        a = table.find(seg[0])
        b = table.find(seg[1])
        if a is None or b is None or a == b:
            raise ModelError(f"degenerate brace segment {seg}")
        elements.append({"id": len(elements) + 1, "type": "truss",
                         "nodes": [a, b], "section": "brace",
                         "matTag": MAT_TAG})

    supports = []
    for p in geometry.supports:
        nid = table.find(p)
        if nid is None:
            raise ModelError(f"support point {p} matches no node")
        supports.append({"node": nid, "fixity": list(geometry.support_fixity)})

    loads = []
    for nid, h in zip(load_node_ids, elevations):
        force = force_by_elev.get(h)
        if force is None:
            raise ModelError(f"no lateral force for load elevation {h} ft")
        loads.append({"node": nid, "fx": force, "fy": 0.0, "mz": 0.0})

    sections = {
        "column": {"A": section_data["column"]["properties"]["A"],
                   "I": section_data["column"]["properties"]["I"]},
        "brace": {"A": section_data["brace"]["properties"]["A"]},
    }

    # field order mirrors the downstream file format
    model = {
        "units": dict(UNITS),
        "materials": {"E": elastic_modulus},
        "sections": sections,
        "nodes": nodes,
        "elements": elements,
        "supports": supports,
        "loads": loads,
    }

    xs = [x for x, _ in table.coords]
    ys = [y for _, y in table.coords]
    report = ModelReport(
        node_count=len(nodes),
        beamcolumn_count=beamcolumn_count,
        brace_count=len(geometry.brace_segments),
        column_line_count=len(lines),
        load_nodes=load_node_ids,
        x_range=(min(xs), max(xs)),
        y_range=(min(ys), max(ys)),
    )
    return model, report


def validate_model(model: dict, geometry: GeometrySpec,
                   load_elevations: list[float] | None = None) -> list[str]:
    """Consistency checks beyond the payload schema: brace count, load-node
    presence at each required elevation, duplicate/zero-length geometry,
    support existence. Empty list means the model is consistent."""
    problems: list[str] = []
    nodes = {n["id"]: (n["x"], n["y"]) for n in model.get("nodes", [])}

    coords = list(nodes.values())
    for i in range(len(coords)):
        for j in range(i + 1, len(coords)):
            if (abs(coords[i][0] - coords[j][0]) <= COORD_TOL
                    and abs(coords[i][1] - coords[j][1]) <= COORD_TOL):
                problems.append(f"duplicate nodes at {coords[i]}")

    truss_count = 0
    for elem in model.get("elements", []):
        a, b = elem["nodes"]
        if a not in nodes or b not in nodes:
            problems.append(f"element {elem['id']} references unknown node")
            continue
        if a == b:
            problems.append(f"element {elem['id']} connects a node to itself")
        else:
            (xa, ya), (xb, yb) = nodes[a], nodes[b]
            if abs(xa - xb) <= COORD_TOL and abs(ya - yb) <= COORD_TOL:
                problems.append(f"element {elem['id']} has zero length")
        if elem["type"] == "truss":
            truss_count += 1

    expected_braces = len(geometry.brace_segments)
    if truss_count != expected_braces:
        problems.append(f"brace count {truss_count} != {expected_braces}")

    elevations = load_elevations or resolve_load_elevations(geometry)
    load_node_coords = [nodes.get(l["node"]) for l in model.get("loads", [])]
    for h in elevations:
        if not any(c is not None and abs(c[1] - h) <= COORD_TOL
                   for c in load_node_coords):
            problems.append(f"no load node at required elevation {h} ft")

    support_nodes = {s["node"] for s in model.get("supports", [])}
    for p in geometry.supports:
        if not any(nid in support_nodes and abs(nodes[nid][0] - p[0]) <= COORD_TOL
                   and abs(nodes[nid][1] - p[1]) <= COORD_TOL
                   for nid in nodes):
            problems.append(f"no support at {p}")

    return problems
