"""In-process 2D frame solver (direct stiffness method).

Elements are Euler-Bernoulli beam-columns (axial + bending, 6 dof) and
pin-pin truss bars (axial only). Model coordinates arrive in feet and are
converted to inches here, so displacements come out in inches and member
forces in kip / kip*in. The global system is solved densely via Cholesky
factorization; a non-positive-definite matrix reports the participating
degrees of freedom as a SingularSystem error.

Sign convention for member forces: axial N is tension-positive at both ends;
shear V and moment M follow the local element axes at each end.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.linalg

from .canon import canonical_dumps
from .errors import ComboError, ModelError, SingularSystem

IN_PER_FT = 12.0
DOF_NAMES = ("ux", "uy", "rz")

DEFAULT_COMBOS = (
    {"name": "seismic", "factors": {"seismic": 1.0}},
    {"name": "live", "factors": {"live": 1.5}},
)

FORCES_NOTE = ("Member end forces per load combination. Braces are linear "
               "pin-pin truss bars, posts are elastic beam-column segments; "
               "N is tension-positive, forces in kip, moments in kip*in.")


@dataclass(frozen=True)
class ElementForces:
    element_id: int
    element_type: str
    N_i: float
    V_i: float
    M_i: float
    N_j: float
    V_j: float
    M_j: float


@dataclass(frozen=True)
class AnalysisResult:
    case: str
    displacements: dict[int, tuple[float, float, float]]   # in, in, rad
    reactions: dict[int, tuple[float, float, float]]       # kip, kip, kip*in
    element_forces: list[ElementForces]


@dataclass(frozen=True)
class CategoryExtrema:
    max_tension: float = 0.0
    max_compression: float = 0.0
    max_abs_moment: float = 0.0

    def to_document(self) -> dict:
        return {"max_tension": self.max_tension,
                "max_compression": self.max_compression,
                "max_abs_moment": self.max_abs_moment}


@dataclass(frozen=True)
class ForceEnvelope:
    per_combo: dict[str, dict[str, CategoryExtrema]]
    combined: dict[str, CategoryExtrema]

    def to_document(self) -> dict:
        return {
            "per_combo": {name: {cat: ex.to_document()
                                 for cat, ex in cats.items()}
                          for name, cats in self.per_combo.items()},
            "combined": {cat: ex.to_document()
                         for cat, ex in self.combined.items()},
        }


def _beamcolumn_local_k(E: float, A: float, I: float, L: float) -> np.ndarray:
    al = E * A / L
    b1 = 12 * E * I / L ** 3
    b2 = 6 * E * I / L ** 2
    b3 = 4 * E * I / L
    b4 = 2 * E * I / L
    return np.array([
        [al, 0, 0, -al, 0, 0],
        [0, b1, b2, 0, -b1, b2],
        [0, b2, b3, 0, -b2, b4],
        [-al, 0, 0, al, 0, 0],
        [0, -b1, -b2, 0, b1, -b2],
        [0, b2, b4, 0, -b2, b3],
    ])


def _truss_local_k(E: float, A: float, L: float) -> np.ndarray:
    al = E * A / L
    k = np.zeros((6, 6))
    k[0, 0] = k[3, 3] = al
    k[0, 3] = k[3, 0] = -al
    return k


def _transform(c: float, s: float) -> np.ndarray:
    T = np.zeros((6, 6))
    block = np.array([[c, s, 0], [-s, c, 0], [0, 0, 1]])
    T[:3, :3] = block
    T[3:, 3:] = block
    return T


class _Assembly:
    """Assembled model: stiffness, dof bookkeeping, element kinematics."""

    def __init__(self, model: dict):
        self.nodes = {n["id"]: (n["x"] * IN_PER_FT, n["y"] * IN_PER_FT)
                      for n in model["nodes"]}
        self.node_ids = sorted(self.nodes)
        self.index = {nid: i for i, nid in enumerate(self.node_ids)}
        self.ndof = 3 * len(self.node_ids)
        self.E = model["materials"]["E"]
        self.sections = model["sections"]
        self.elements = model["elements"]

        self.K = np.zeros((self.ndof, self.ndof))
        self.element_data: list[dict] = []
        for elem in self.elements:
            self._add_element(elem)

        self.fixed = np.zeros(self.ndof, dtype=bool)
        for sup in model.get("supports", []):
            base = 3 * self.index[sup["node"]]
            for k, flag in enumerate(sup["fixity"]):
                if flag:
                    self.fixed[base + k] = True

    def _add_element(self, elem: dict) -> None:
        na, nb = elem["nodes"]
        xa, ya = self.nodes[na]
        xb, yb = self.nodes[nb]
        L = float(np.hypot(xb - xa, yb - ya))
        if L <= 0:
            raise ModelError(f"element {elem['id']} has zero length")
        c, s = (xb - xa) / L, (yb - ya) / L
        sec = self.sections.get(elem["section"])
        if sec is None:
            raise ModelError(f"element {elem['id']}: unknown section "
                             f"{elem['section']!r}")
        if elem["type"] == "elasticBeamColumn":
            k_local = _beamcolumn_local_k(self.E, sec["A"], sec["I"], L)
        elif elem["type"] == "truss":
            k_local = _truss_local_k(self.E, sec["A"], L)
        else:
            raise ModelError(f"element {elem['id']}: unknown type {elem['type']!r}")
        T = _transform(c, s)
        k_global = T.T @ k_local @ T
        dofs = [3 * self.index[na] + k for k in range(3)] + \
               [3 * self.index[nb] + k for k in range(3)]
        self.K[np.ix_(dofs, dofs)] += k_global
        self.element_data.append({"elem": elem, "k_local": k_local, "T": T,
                                  "dofs": dofs})

    def dof_name(self, idx: int) -> str:
        return f"node {self.node_ids[idx // 3]} {DOF_NAMES[idx % 3]}"


def _near_null_dofs(assembly: _Assembly, K_ff: np.ndarray,
                    free_idx: np.ndarray) -> list[str]:
    w, v = np.linalg.eigh(K_ff)
    null_vec = np.abs(v[:, 0])
    cutoff = 0.5 * null_vec.max() if null_vec.max() > 0 else 1.0
    return [assembly.dof_name(free_idx[i])
            for i in np.flatnonzero(null_vec >= cutoff)]


def assemble_and_solve(model: dict, nodal_loads: dict[int, tuple[float, float, float]],
                       case: str = "case") -> AnalysisResult:
    """Solve one load case. nodal_loads maps node id -> (fx, fy, mz) in kip
    and kip*in."""
    assembly = _Assembly(model)
    F = np.zeros(assembly.ndof)
    for nid, (fx, fy, mz) in nodal_loads.items():
        if nid not in assembly.index:
            raise ModelError(f"load on unknown node {nid}")
        base = 3 * assembly.index[nid]
        F[base:base + 3] += (fx, fy, mz)

    # dofs with no stiffness at all (e.g. rotations at truss-only joints)
    # carry no equations; loading one is a mechanism
    empty = ~assembly.fixed & (np.abs(assembly.K).max(axis=1) == 0.0)
    for idx in np.flatnonzero(empty & (F != 0.0)):
        raise SingularSystem(
            f"load applied to unsupported dof {assembly.dof_name(idx)}",
            dofs=[assembly.dof_name(idx)])

    free = ~assembly.fixed & ~empty
    free_idx = np.flatnonzero(free)
    u = np.zeros(assembly.ndof)
    if free_idx.size:
        K_ff = assembly.K[np.ix_(free_idx, free_idx)]
        try:
            factor = scipy.linalg.cho_factor(K_ff, check_finite=False)
            u[free_idx] = scipy.linalg.cho_solve(factor, F[free_idx],
                                                 check_finite=False)
        except (scipy.linalg.LinAlgError, np.linalg.LinAlgError):
            dofs = _near_null_dofs(assembly, K_ff, free_idx)
            raise SingularSystem(
                "stiffness matrix is singular (mechanism or missing "
                "supports); suspect dofs: " + ", ".join(dofs), dofs=dofs) from None

    residual = assembly.K @ u - F
    displacements = {}
    reactions = {}
    for nid in assembly.node_ids:
        base = 3 * assembly.index[nid]
        displacements[nid] = tuple(float(x) for x in u[base:base + 3])
        if assembly.fixed[base:base + 3].any():
            r = [float(residual[base + k]) if assembly.fixed[base + k] else 0.0
                 for k in range(3)]
            reactions[nid] = tuple(r)

    forces = []
    for data in assembly.element_data:
        f_local = data["k_local"] @ (data["T"] @ u[data["dofs"]])
        elem = data["elem"]
        forces.append(ElementForces(
            element_id=elem["id"], element_type=elem["type"],
            N_i=float(-f_local[0]), V_i=float(f_local[1]), M_i=float(f_local[2]),
            N_j=float(f_local[3]), V_j=float(f_local[4]), M_j=float(f_local[5])))

    return AnalysisResult(case=case, displacements=displacements,
                          reactions=reactions, element_forces=forces)


def global_stiffness(model: dict) -> np.ndarray:
    """Assembled global stiffness (all dofs), for inspection and tests."""
    return _Assembly(model).K


def _case_vectors(model: dict, load_data) -> dict[str, dict[int, tuple[float, float, float]]]:
    """Nodal load vectors for the base cases: 'seismic' (lateral, from the
    model's load block) and 'live' (vertical, matched to load nodes by
    elevation)."""
    seismic = {l["node"]: (l["fx"], l["fy"], l["mz"]) for l in model.get("loads", [])}

    node_y = {n["id"]: n["y"] for n in model["nodes"]}
    live_entries = (load_data.live if hasattr(load_data, "live")
                    else [(e["elevation_ft"], e["force_kip"])
                          for e in load_data["live"]])
    live: dict[int, tuple[float, float, float]] = {}
    for elev, force in live_entries:
        nid = next((l["node"] for l in model.get("loads", [])
                    if abs(node_y[l["node"]] - elev) <= 1e-9), None)
        if nid is None:
            raise ModelError(f"no load node at elevation {elev} ft for live load")
        live[nid] = (0.0, -force, 0.0)
    return {"seismic": seismic, "live": live}


def _combine(cases: dict, factors: dict[str, float]) -> dict[int, tuple[float, float, float]]:
    combined: dict[int, list[float]] = {}
    for case_name, factor in factors.items():
        if case_name not in cases:
            raise ComboError(f"combination references unknown case {case_name!r}")
        for nid, (fx, fy, mz) in cases[case_name].items():
            acc = combined.setdefault(nid, [0.0, 0.0, 0.0])
            acc[0] += factor * fx
            acc[1] += factor * fy
            acc[2] += factor * mz
    return {nid: tuple(v) for nid, v in combined.items()}


def _extrema(forces: list[ElementForces], element_type: str) -> CategoryExtrema:
    tension = 0.0
    compression = 0.0
    moment = 0.0
    for f in forces:
        if f.element_type != element_type:
            continue
        n = f.N_j  # constant along the member under nodal loading
        tension = max(tension, n)
        compression = max(compression, -n)
        moment = max(moment, abs(f.M_i), abs(f.M_j))
    return CategoryExtrema(max_tension=tension, max_compression=compression,
                           max_abs_moment=moment)


def extract_envelope(results: dict[str, AnalysisResult]) -> ForceEnvelope:
    """Per-combination and combined extrema for posts ('beams', the
    beam-column segments) and braces ('trusses')."""
    per_combo: dict[str, dict[str, CategoryExtrema]] = {}
    for name, result in results.items():
        per_combo[name] = {
            "beams": _extrema(result.element_forces, "elasticBeamColumn"),
            "trusses": _extrema(result.element_forces, "truss"),
        }
    combined = {}
    for cat in ("beams", "trusses"):
        combined[cat] = CategoryExtrema(
            max_tension=max((c[cat].max_tension for c in per_combo.values()),
                            default=0.0),
            max_compression=max((c[cat].max_compression for c in per_combo.values()),
                                default=0.0),
            max_abs_moment=max((c[cat].max_abs_moment for c in per_combo.values()),
                               default=0.0),
        )
    return ForceEnvelope(per_combo=per_combo, combined=combined)


def forces_document(results: dict[str, AnalysisResult]) -> dict:
    """Serializable member-force listing, one record per element end."""
    combos = {}
    for name, result in results.items():
        records = []
        for f in result.element_forces:
            records.append({"element_id": f.element_id, "end": "i",
                            "N": f.N_i, "V": f.V_i, "M": f.M_i})
            records.append({"element_id": f.element_id, "end": "j",
                            "N": f.N_j, "V": f.V_j, "M": f.M_j})
        combos[name] = records
    return {"note": FORCES_NOTE,
            "units": {"N": "kip", "V": "kip", "M": "kip*in"},
            "combos": combos}


def run_complete_analysis(model: dict, load_data, combos=None,
                          forces_path=None) -> dict:
    """Run every load combination, envelope the member forces, and
    optionally persist the member-force listing.

    Returns a document with per-combo governing values (max |N| over all
    elements), the envelope, reactions, and the forces listing.
    """
    combo_list = [dict(c) for c in (combos if combos is not None else DEFAULT_COMBOS)]
    cases = _case_vectors(model, load_data)

    results: dict[str, AnalysisResult] = {}
    for combo in combo_list:
        name = combo.get("name") or "+".join(combo["factors"])
        loads = _combine(cases, combo["factors"])
        results[name] = assemble_and_solve(model, loads, case=name)

    envelope = extract_envelope(results)
    governing = {name: float(max((abs(f.N_j) for f in res.element_forces),
                                 default=0.0))
                 for name, res in results.items()}
    max_disp = max((abs(v) for res in results.values()
                    for d in res.displacements.values() for v in d[:2]),
                   default=0.0)

    forces_doc = forces_document(results)
    if forces_path is not None:
        text = canonical_dumps(forces_doc, indent=2) + "\n"
        Path(forces_path).write_text(text, encoding="utf-8")

    reactions = {name: {str(nid): list(r) for nid, r in res.reactions.items()}
                 for name, res in results.items()}

    return {
        "combos": [c.get("name") or "+".join(c["factors"]) for c in combo_list],
        "governing": governing,
        "envelope_governing": max(governing.values(), default=0.0),
        "max_displacement_in": float(max_disp),
        "envelope": envelope.to_document(),
        "reactions": reactions,
        "forces": forces_doc,
    }
