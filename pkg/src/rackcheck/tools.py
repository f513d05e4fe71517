"""The fifteen pipeline tools.

Each tool is a thin wrapper that reads its inputs from shared memory (or
explicit arguments), calls the matching domain module, writes its outputs
back to memory, and returns a JSON-serializable result document for the
trace. Tools raise the domain error types; the executor converts those into
failure records and labels.
"""

from __future__ import annotations

import json
from pathlib import Path

from . import fem, loads, model_builder, retrieval, sections, verification
from .agents import ToolRegistry
from .config import PipelineConfig
from .datafiles import data_path
from .errors import CapacityError, ExtractionError, ModelValidationError
from .memory import ABSENT, StructuralMemory
from .problem import (DecompositionResult, GeometrySpec, SectionSpec,
                      adjust_pallet_weights, extract_building_info,
                      extract_elastic_modulus, extract_geometry,
                      extract_section_info, parse_pallet_weights,
                      split_problem_description, update_saa_input)

SNAPSHOT_FILENAME = "analysis_results.json"
FORCES_FILENAME = "internal_forces.json"


class Toolkit:
    """Holds the run's shared state: memory, config, hazard database, output
    directory, and the executing step (set by the pipeline driver)."""

    def __init__(self, memory: StructuralMemory, config: PipelineConfig,
                 out_dir: Path | None = None):
        self.memory = memory
        self.config = config
        self.out_dir = Path(out_dir) if out_dir else None
        table = config.seismic_table or data_path("seismic_table.csv")
        self.database = retrieval.SeismicDatabase(table_path=table)
        cap_path = config.capacity_config_path or data_path("capacity_config.json")
        self.capacity_config = json.loads(Path(cap_path).read_text(encoding="utf-8"))
        self.current_step = 0
        self.current_role = "System"

    # --- helpers ---

    def _put(self, key: str, value) -> None:
        self.memory.put(key, value, writer=self.current_role,
                        step=self.current_step)

    def _need(self, key: str):
        value = self.memory.get(key)
        if value is ABSENT:
            raise ExtractionError(f"memory key {key!r} not available yet")
        return value

    def _material(self) -> sections.MaterialSpec:
        return sections.MaterialSpec(**self.capacity_config.get("material", {}))

    def _out_path(self, filename: str) -> Path:
        if self.out_dir is None:
            return Path(filename)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        return self.out_dir / filename

    # --- step 1: decomposition and bookkeeping ---

    def split_problem_description(self, text: str) -> dict:
        result = split_problem_description(text)
        doc = result.to_document()
        self._put("decomposition", doc)
        for key in ("SDA_input", "LA_input", "SAA_input",
                    "number_of_bays", "number_of_pallets"):
            self._put(key, doc[key])
        return doc

    def adjust_pallet_weights(self, num_bays: int, num_pallets: int) -> dict:
        la_input = self._need("LA_input")
        before = self.memory.get("loads_lbs")
        _, nominal = parse_pallet_weights(la_input)
        adjusted = adjust_pallet_weights(nominal, num_bays, num_pallets,
                                         rule=self.config.adjustment)
        self._put("loads_lbs", adjusted)
        return {"loads_before": None if before is ABSENT else before,
                "nominal_lbs": nominal, "loads_after": adjusted}

    def update_saa_input(self) -> dict:
        base = self.memory.get("SAA_input_update")
        if base is ABSENT:
            base = self._need("SAA_input")
        section_data = self.memory.get("section_data")
        load_data = self.memory.get("load_data")
        updated = update_saa_input(
            base,
            None if section_data is ABSENT else section_data,
            None if load_data is ABSENT else load_data)
        self._put("SAA_input_update", updated)
        return {"SAA_input_update_chars": len(updated),
                "has_section_data": section_data is not ABSENT,
                "has_load_data": load_data is not ABSENT}

    def save_analysis_results(self, filepath: str = SNAPSHOT_FILENAME) -> dict:
        size = self.memory.save_snapshot(self._out_path(filepath))
        # the trace must stay byte-identical across output directories, so
        # report the requested name, not the resolved path
        return {"path": filepath, "bytes": size}

    # --- step 2: section design ---

    def extract_section_info(self) -> dict:
        sda = self._need("SDA_input")
        specs = extract_section_info(sda)
        modulus = extract_elastic_modulus(sda)
        doc = {"members": [s.to_document() for s in specs],
               "E": modulus if modulus is not None else self._material().E}
        self._put("section_info", doc)
        return doc

    def calculate_section_capacities(self) -> dict:
        info = self._need("section_info")
        specs = [SectionSpec(member=m["member"], shape=m["shape"],
                             dims_in=(m["dims_in"]["d"], m["dims_in"]["b"],
                                      m["dims_in"]["t"]),
                             length_ft=m["length_ft"])
                 for m in info["members"]]
        doc = sections.build_section_data(
            specs, self._material(),
            self.capacity_config.get("members", {}),
            capacity_scale=self.config.capacity_scale)
        self._put("section_data", doc)
        return doc

    # --- step 3: building info ---

    def extract_building_info(self) -> dict:
        la_input = self._need("LA_input")
        info = extract_building_info(la_input)
        doc = info.to_document()
        self._put("building_info", doc)
        self._put("floor_elevations_ft", doc["floor_elevations_ft"])
        if self.memory.get("loads_lbs") is ABSENT:
            self._put("loads_lbs", doc["loads_lbs"])
        return doc

    # --- step 4: hazard retrieval ---

    def get_seismic_parameters(self, location: str) -> dict:
        result = self.database.lookup(location)
        doc = result.to_document()
        if isinstance(result, retrieval.SeismicParameters):
            self._put("seismic_parameters", doc)
        return doc

    # --- shared memory readers ---

    def get_memory_summary(self) -> dict:
        return self.memory.summary()

    def get_memory_data(self, key: str) -> dict:
        value = self.memory.get(key)
        if value is ABSENT:
            return {"key": key, "found": False, "value": None}
        return {"key": key, "found": True, "value": value}

    def get_analysis_context(self) -> dict:
        return verification.get_analysis_context(self.memory)

    # --- step 5: lateral forces ---

    def calculate_seismic_loads(self, floor_elevations_ft: list,
                                loads_lbs: list,
                                seismic_parameters: dict) -> dict:
        params = retrieval.SeismicParameters(**{
            k: seismic_parameters[k] for k in retrieval.FIELDS})
        result = loads.calculate_seismic_loads(
            floor_elevations_ft, loads_lbs, params, self.config.elf)
        load_data = loads.build_load_data(floor_elevations_ft, loads_lbs, result)
        doc = load_data.to_document()
        doc["cs"] = result.cs
        doc["forces_kip"] = list(result.forces_kip)
        self._put("load_data", doc)
        return doc

    # --- step 7: model generation ---

    def generate_structural_model(self) -> dict:
        saa = self.memory.get("SAA_input_update")
        if saa is ABSENT:
            saa = self._need("SAA_input")
        section_data = self._need("section_data")
        load_doc = self._need("load_data")
        load_data = loads.LoadData.from_document(load_doc)
        geometry = extract_geometry(saa)
        if self.config.support_fixity_override is not None:
            geometry.support_fixity = list(self.config.support_fixity_override)
        info = self.memory.get("section_info")
        modulus = (info.get("E") if info is not ABSENT else None) or self._material().E
        model, report = model_builder.generate_structural_model(
            geometry, section_data, load_data, elastic_modulus=modulus)
        violations = model_builder.validate_model(
            model, geometry,
            load_elevations=model_builder.resolve_load_elevations(geometry, load_data))
        if violations:
            raise ModelValidationError(
                "generated model failed validation: " + "; ".join(violations),
                violations=violations)
        self._put("structural_model", model)
        return {"report": report.to_document(), "model": model}

    # --- step 8: frame analysis ---

    def run_complete_opensees_analysis(self) -> dict:
        model = self._need("structural_model")
        load_doc = self._need("load_data")
        load_data = loads.LoadData.from_document(load_doc)
        forces_path = self._out_path(FORCES_FILENAME)
        out = fem.run_complete_analysis(model, load_data,
                                        combos=self.config.default_combos(),
                                        forces_path=forces_path)
        forces_doc = out.pop("forces")
        self._put("processed_forces", out)
        self._put("internal_forces", forces_doc)
        return out

    # --- step 9: verification ---

    def verify_structural_safety(self, capacities: dict | None = None,
                                 demands: dict | None = None) -> dict:
        if capacities is None:
            capacities = verification.capacities_from_section_data(
                self._need("section_data"))
        if demands is None:
            processed = self._need("processed_forces")
            demands = verification.demands_from_envelope(processed["envelope"])
        checks = verification.verify_structural_safety(capacities, demands)
        check_docs = [c.to_document() for c in checks]
        self._put("check_results", check_docs)
        result = {"checks": check_docs,
                  "all_pass": all(c.passed for c in checks)}
        limit = self.config.deflection_limit_in
        if limit is not None:
            processed = self._need("processed_forces")
            peak = processed.get("max_displacement_in", 0.0)
            result["advisories"] = [{"type": "deflection",
                                     "max_in": peak, "limit_in": limit,
                                     "ok": peak <= limit}]
        return result


TOOL_PARAMS: dict[str, dict[str, dict]] = {
    "split_problem_description": {"text": {"type": "string", "required": True}},
    "adjust_pallet_weights": {"num_bays": {"type": "integer", "required": True},
                              "num_pallets": {"type": "integer", "required": True}},
    "update_saa_input": {},
    "save_analysis_results": {"filepath": {"type": "string", "required": False}},
    "extract_section_info": {},
    "calculate_section_capacities": {},
    "extract_building_info": {},
    "get_seismic_parameters": {"location": {"type": "string", "required": True}},
    "get_memory_summary": {},
    "get_memory_data": {"key": {"type": "string", "required": True}},
    "calculate_seismic_loads": {
        "floor_elevations_ft": {"type": "array", "required": True},
        "loads_lbs": {"type": "array", "required": True},
        "seismic_parameters": {"type": "object", "required": True}},
    "generate_structural_model": {},
    "run_complete_opensees_analysis": {},
    "verify_structural_safety": {"capacities": {"type": "object", "required": False},
                                 "demands": {"type": "object", "required": False}},
    "get_analysis_context": {},
}


def register_tools(registry: ToolRegistry, toolkit: Toolkit) -> None:
    """Register exactly the fifteen pipeline tools."""
    for name, params in TOOL_PARAMS.items():
        registry.register(name, getattr(toolkit, name), params)
