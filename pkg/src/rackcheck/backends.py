"""Decision backends.

A backend decides, per step, which tools the responsible agent invokes and
what it says afterwards. Three kinds exist:

- deterministic: the fixed reference choreography, no model in the loop;
- scripted: replays the tool-call sequence of a recorded trace;
- remote: asks a chat-completions endpoint for a one-shot JSON program.

All three speak the same action vocabulary so the executor treats them
identically. Step scripts are generators: each yielded ToolAction is
executed by the driver, which sends the tool's result document back into
the generator.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Any, Iterator

import httpx

from .canon import canonical_dumps
from .config import PipelineConfig
from .errors import BackendError, ExtractionError
from .memory import ABSENT, StructuralMemory
from .protocol import extract_structured_payload
from .verification import final_assessment


@dataclass(frozen=True)
class ToolAction:
    tool: str
    args: dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class SummaryAction:
    text: str


@dataclass(frozen=True)
class VerdictAction:
    verdict: str


Action = ToolAction | SummaryAction | VerdictAction


STEP_INSTRUCTIONS: dict[int, str] = {
    1: ("Split the problem description into the three sub-task inputs, then "
        "adjust the pallet weights using the bay and pallet counts now in "
        "memory. Refresh the analysis input and save a results snapshot."),
    2: ("Extract the member section details from SDA_input and calculate "
        "section properties and capacities."),
    3: "Extract the building information from LA_input.",
    4: ("Look up the seismic design parameters for the project location "
        "recorded in building_info."),
    5: ("Calculate the lateral seismic story forces from the floor "
        "elevations, design loads, and seismic parameters in memory."),
    6: ("Merge the stored section and load data into the structural "
        "analysis input."),
    7: "Generate the structural model from the updated analysis input.",
    8: ("Run the complete frame analysis on the structural model and store "
        "the processed forces."),
    9: "Verify structural safety using the stored capacities and demands.",
    10: ("Review the full analysis context and issue the final assessment: "
         "'FINAL RESULT: STRUCTURALLY ADEQUATE' or "
         "'FINAL RESULT: STRUCTURALLY INADEQUATE'."),
}

# keys inlined into the instruction payload when memory reads are disabled
STEP_CONTEXT_KEYS: dict[int, tuple[str, ...]] = {
    2: ("SDA_input",),
    3: ("LA_input",),
    4: ("building_info",),
    5: ("floor_elevations_ft", "loads_lbs", "seismic_parameters"),
    6: ("SAA_input", "section_data", "load_data"),
    7: ("SAA_input_update",),
    8: ("structural_model", "load_data"),
    9: ("section_data", "processed_forces"),
    10: ("check_results",),
}


def _fmt(value: float) -> str:
    return f"{value:g}"


def _fmt_list(values) -> str:
    return ", ".join(_fmt(v) for v in values)


class DeterministicBackend:
    """The reference choreography. Reads memory between yields, so every
    argument it passes is whatever the tools actually stored."""

    kind = "deterministic"
    performs_repair = True

    def __init__(self, config: PipelineConfig):
        self.config = config

    def step_actions(self, step: int, memory: StructuralMemory,
                     problem_text: str) -> Iterator[Action]:
        script = getattr(self, f"_step_{step}", None)
        if script is None:
            raise BackendError(f"no deterministic script for step {step}")
        return script(memory, problem_text)

    def _read(self, memory: StructuralMemory, key: str):
        value = memory.get(key)
        if value is ABSENT:
            raise BackendError(f"choreography expected memory key {key!r}")
        return value

    def _step_1(self, memory, problem_text):
        yield ToolAction("split_problem_description", {"text": problem_text})
        bays = self._read(memory, "number_of_bays")
        pallets = self._read(memory, "number_of_pallets")
        adjust = yield ToolAction("adjust_pallet_weights",
                                  {"num_bays": bays, "num_pallets": pallets})
        yield ToolAction("update_saa_input", {})
        yield ToolAction("save_analysis_results",
                         {"filepath": "analysis_results.json"})
        yield SummaryAction(
            "Problem description split into SAA, SDA, LA inputs. "
            f"Bays = {bays}, Pallets = {pallets}. Pallet weights updated to "
            f"{_fmt_list(adjust['loads_after'])} lb.")

    def _step_2(self, memory, problem_text):
        info = yield ToolAction("extract_section_info", {})
        yield ToolAction("calculate_section_capacities", {})
        members = ", ".join(m["member"] for m in info["members"])
        yield SummaryAction(
            f"Section info extracted from SDA_input ({members}). "
            "Element capacities computed and stored.")

    def _step_3(self, memory, problem_text):
        info = yield ToolAction("extract_building_info", {})
        n = len(info["floor_elevations_ft"])
        yield SummaryAction(
            f"Building type: {info['building_type']}. Number of floors: {n}. "
            f"Number of load points: {len(info['loads_lbs'])}.")

    def _step_4(self, memory, problem_text):
        location = self._read(memory, "building_info")["location"]
        doc = yield ToolAction("get_seismic_parameters", {"location": location})
        if "error" in doc:
            yield SummaryAction(f"Seismic lookup failed for {location}: "
                                f"{doc['error']}.")
        else:
            yield SummaryAction(
                f"Location: {location}. Sa(0.2) = {_fmt(doc['Sa_02'])}, "
                f"PGA = {_fmt(doc['PGA'])}.")

    def _step_5(self, memory, problem_text):
        if self.config.use_memory:
            yield ToolAction("get_memory_summary", {})
            yield ToolAction("get_memory_data", {"key": "floor_elevations_ft"})
            yield ToolAction("get_memory_data", {"key": "loads_lbs"})
            yield ToolAction("get_memory_data", {"key": "seismic_parameters"})
        doc = yield ToolAction("calculate_seismic_loads", {
            "floor_elevations_ft": self._read(memory, "floor_elevations_ft"),
            "loads_lbs": self._read(memory, "loads_lbs"),
            "seismic_parameters": self._read(memory, "seismic_parameters"),
        })
        forces = ", ".join(f"F{i} = {f:.3f} kip"
                           for i, f in enumerate(doc["forces_kip"], start=1))
        yield SummaryAction(f"Final seismic loads: {forces}.")

    def _step_6(self, memory, problem_text):
        if self.config.use_memory:
            yield ToolAction("get_memory_data", {"key": "SAA_input"})
            yield ToolAction("get_memory_data", {"key": "section_data"})
            yield ToolAction("get_memory_data", {"key": "load_data"})
        yield ToolAction("update_saa_input", {})
        yield SummaryAction(
            "Section and load data retrieved from memory. SAA input merged "
            "successfully; brace coordinates preserved.")

    def _step_7(self, memory, problem_text):
        if self.config.use_memory:
            yield ToolAction("get_memory_data", {"key": "SAA_input_update"})
        result = yield ToolAction("generate_structural_model", {})
        report = result["report"]
        yield SummaryAction(
            f"Structural model created: {report['node_count']} nodes, "
            f"{report['beamcolumn_count']} beam-column segments on "
            f"{report['column_line_count']} column lines, "
            f"{report['brace_count']} truss braces. Loads applied at nodes "
            f"{report['load_nodes']}.")

    def _step_8(self, memory, problem_text):
        if self.config.use_memory:
            yield ToolAction("get_memory_summary", {})
            yield ToolAction("get_memory_data", {"key": "structural_model"})
        out = yield ToolAction("run_complete_opensees_analysis", {})
        env = out["envelope"]["combined"]
        yield SummaryAction(
            "Frame analysis completed. Beams: max tension = "
            f"{env['beams']['max_tension']:.2f} kip, max compression = "
            f"{env['beams']['max_compression']:.2f} kip, max moment = "
            f"{env['beams']['max_abs_moment']:.2f} kip-in. Trusses: max "
            f"tension = {env['trusses']['max_tension']:.2f} kip, max "
            f"compression = {env['trusses']['max_compression']:.2f} kip.")

    def _step_9(self, memory, problem_text):
        yield ToolAction("get_analysis_context", {})
        result = yield ToolAction("verify_structural_safety", {})
        status = "PASS" if result["all_pass"] else "FAIL"
        lines = "; ".join(
            f"{c['category']} {c['mode']} ratio = {c['ratio']:.2f}"
            for c in result["checks"])
        yield SummaryAction(f"Safety verification complete: {status}. {lines}.")

    def _step_10(self, memory, problem_text):
        context = yield ToolAction("get_analysis_context", {})
        assessment = final_assessment(context)
        yield VerdictAction(assessment.verdict)

    def repair_action(self, action: ToolAction,
                      violations: list[str]) -> ToolAction | None:
        # exact tools are deterministic, so the only honest repair is a retry
        return action


class ScriptedBackend:
    """Replays the tool calls of a recorded trace, step by step. Summaries
    and the verdict are taken from the recording too; repair rounds are not
    re-planned (the recording already contains whatever happened)."""

    kind = "scripted"
    performs_repair = False

    def __init__(self, records: list[dict]):
        self.records = list(records)

    @classmethod
    def from_trace(cls, trace) -> "ScriptedBackend":
        return cls(list(trace))

    def step_actions(self, step: int, memory: StructuralMemory,
                     problem_text: str) -> Iterator[Action]:
        for rec in self.records:
            if rec.get("step") != step:
                continue
            kind = rec.get("kind")
            if kind == "tool_call":
                payload = rec.get("payload") or {}
                yield ToolAction(payload.get("name", ""),
                                 dict(payload.get("args") or {}))
            elif kind == "assistant_text":
                yield SummaryAction(str(rec.get("payload", "")))
            elif kind == "verdict":
                yield VerdictAction(str(rec.get("payload", "")))

    def repair_action(self, action: ToolAction,
                      violations: list[str]) -> ToolAction | None:
        return None


class RemoteBackend:
    """One chat-completions POST per step. The reply must contain a JSON
    program {"actions": [{"tool", "args"}...], "summary"?, "verdict"?};
    anything around it (prose, fences, comments) is tolerated."""

    kind = "remote"
    performs_repair = True

    def __init__(self, config: PipelineConfig, roles: dict,
                 transport: httpx.BaseTransport | None = None):
        if config.remote is None or not config.remote.endpoint:
            raise BackendError("remote backend needs an endpoint")
        self.config = config
        self.remote = config.remote
        self.roles = roles
        self._client = httpx.Client(timeout=self.remote.timeout_s,
                                    transport=transport)

    def _headers(self) -> dict[str, str]:
        headers = {"Content-Type": "application/json"}
        token = os.environ.get(self.remote.api_key_env, "")
        if token:
            headers["Authorization"] = f"Bearer {token}"
        return headers

    def complete(self, messages: list[dict]) -> str:
        body = {"model": self.remote.model, "messages": messages,
                "temperature": self.remote.temperature,
                "max_tokens": self.remote.max_tokens}
        try:
            resp = self._client.post(self.remote.endpoint, json=body,
                                     headers=self._headers())
            resp.raise_for_status()
            data = resp.json()
        except httpx.HTTPError as exc:
            raise BackendError(f"remote call failed: {exc}") from exc
        try:
            return data["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as exc:
            raise BackendError(f"malformed completion response: {exc}") from exc

    def _program(self, step: int, role_name: str,
                 memory: StructuralMemory) -> dict:
        role = self.roles.get(role_name)
        system = role.system_message if role else "You are a careful engineer."
        context = {k: memory.get(k)
                   for k in STEP_CONTEXT_KEYS.get(step, ())
                   if memory.get(k) is not ABSENT}
        user = (
            f"{STEP_INSTRUCTIONS.get(step, '')}\n\n"
            f"Context:\n{canonical_dumps(context, indent=2)}\n\n"
            'Reply with one JSON object: {"actions": [{"tool": name, '
            '"args": {...}}, ...], "summary": "...", "verdict": "..."} '
            "(omit 'verdict' except at the final step).")
        text = self.complete([{"role": "system", "content": system},
                              {"role": "user", "content": user}])
        program = extract_structured_payload(text)
        if not isinstance(program, dict):
            raise ExtractionError("remote program is not a JSON object")
        return program

    def step_actions(self, step: int, memory: StructuralMemory,
                     problem_text: str) -> Iterator[Action]:
        from .agents import STEP_ROLES
        program = self._program(step, STEP_ROLES.get(step, ""), memory)
        for entry in program.get("actions", []):
            if not isinstance(entry, dict) or "tool" not in entry:
                raise ExtractionError(f"malformed action entry: {entry!r}")
            yield ToolAction(str(entry["tool"]), dict(entry.get("args") or {}))
        if program.get("summary"):
            yield SummaryAction(str(program["summary"]))
        if program.get("verdict"):
            yield VerdictAction(str(program["verdict"]))

    def repair_action(self, action: ToolAction,
                      violations: list[str]) -> ToolAction | None:
        return action


def make_backend(config: PipelineConfig, roles: dict | None = None,
                 scripted_records: list[dict] | None = None,
                 transport=None):
    if config.backend == "deterministic":
        return DeterministicBackend(config)
    if config.backend == "scripted":
        if scripted_records is None:
            raise BackendError("scripted backend needs a recorded trace")
        return ScriptedBackend(scripted_records)
    if config.backend == "remote":
        return RemoteBackend(config, roles or {}, transport=transport)
    raise BackendError(f"unknown backend kind {config.backend!r}")
