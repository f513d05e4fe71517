"""Ten-step pipeline driver and failure classification.

The driver owns the trace: it logs the system banner, per-step instructions,
every tool call with its result, agent summaries, and the final verdict.
Tool payloads that carry a schema contract are validated as they land in
memory; a schema violation earns one repair round before the run is failed
with a stable label.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .agents import STEP_ROLES, ToolRegistry, check_toolsets, load_roles
from .backends import (STEP_CONTEXT_KEYS, STEP_INSTRUCTIONS, SummaryAction,
                       ToolAction, VerdictAction, make_backend)
from .config import PipelineConfig
from .errors import FailedStep, PipelineFailure, RackcheckError
from .memory import ABSENT, StructuralMemory
from .protocol import Message, ToolCall, TraceLog
from .schemas import validate_payload
from .tools import Toolkit, register_tools

TRACE_FILENAME = "trace.jsonl"
SNAPSHOT_FILENAME = "analysis_results.json"
MODEL_FILENAME = "structural_model.json"

USER_PROXY = "UserProxy"
TOOL_RUNNER = "ToolRunner"

# result payloads validated against a schema before they are trusted
TOOL_SCHEMAS: dict[str, str] = {
    "split_problem_description": "decomposition",
    "extract_building_info": "building_info",
    "get_seismic_parameters": "seismic_params",
    "calculate_seismic_loads": "load_data",
    "calculate_section_capacities": "section_data",
    "generate_structural_model": "structural_model",
    "verify_structural_safety": "check_result",
}

_PARSE_ERRORS = ("DecompositionError", "ExtractionError", "ExtractionFailed",
                 "ParseError", "GeometryError", "MalformedRow")
_MODEL_ERRORS = ("ModelError", "ModelValidationError")


def label_for_error(error_type: str) -> str:
    if error_type in _PARSE_ERRORS:
        return "parse_error"
    if error_type in _MODEL_ERRORS:
        return "modeling_logic_error"
    if error_type == "SingularSystem":
        return "solver_singular"
    if error_type == "SchemaViolation":
        return "schema_violation"
    if error_type == "RoundLimit":
        return "round_limit"
    return "tool_runtime_error"


def classify_failure(trace: TraceLog) -> str:
    """Label a trace by its first failing record; 'none' for a run that
    reached a verdict. A trace that simply stops (no failure record, no
    verdict) is treated as having run out of budget."""
    for rec in trace:
        if rec.get("kind") == "failure":
            return label_for_error(rec.get("payload", {}).get("error_type", ""))
        if (rec.get("kind") == "tool_result"
                and rec.get("payload", {}).get("ok") is False):
            return label_for_error(rec["payload"].get("error_type", ""))
    if trace.final_verdict() is not None:
        return "none"
    return "round_limit"


def _schema_target(tool: str, result: Any):
    """The sub-document(s) a tool result is validated against."""
    if tool == "generate_structural_model":
        return [result.get("model") if isinstance(result, dict) else result]
    if tool == "verify_structural_safety":
        checks = result.get("checks", []) if isinstance(result, dict) else []
        return list(checks)
    return [result]


@dataclass
class PipelineResult:
    verdict: str | None
    trace: TraceLog
    memory: StructuralMemory
    label: str = "none"
    checks: list[dict] = field(default_factory=list)

    @property
    def adequate(self) -> bool | None:
        if self.verdict is None:
            return None
        return "INADEQUATE" not in self.verdict


class PipelineRunner:
    def __init__(self, config: PipelineConfig, out_dir: str | Path | None = None,
                 backend=None, scripted_records: list[dict] | None = None):
        config.validate()
        self.config = config
        self.out_dir = Path(out_dir) if out_dir is not None else None
        self.memory = StructuralMemory()
        self.trace = TraceLog()
        self.roles, self.shared_tools = load_roles()
        self.registry = ToolRegistry()
        self.toolkit = Toolkit(self.memory, config, out_dir=self.out_dir)
        register_tools(self.registry, self.toolkit)
        check_toolsets(self.roles, self.shared_tools, self.registry)
        self.backend = backend or make_backend(
            config, roles=self.roles, scripted_records=scripted_records)

    # --- trace helpers ---

    def _log(self, sender: str, recipient: str, kind: str, payload,
             step: int, round_: int = 1) -> None:
        self.trace.append(Message(sender=sender, recipient=recipient,
                                  kind=kind, payload=payload,
                                  round=round_, step=step))

    def _allowed(self, role_name: str, tool: str) -> bool:
        role = self.roles.get(role_name)
        if role is None:
            return False
        return tool in role.toolset or tool in self.shared_tools

    # --- execution ---

    def run(self, problem_text: str) -> PipelineResult:
        self._log("System", "All", "system", {
            "tools_registered": len(self.registry),
            "agents": sorted(self.roles),
            "backend": self.backend.kind,
            "mode": self.config.mode,
            "max_rounds": self.config.max_rounds,
        }, step=0)
        self.memory.put("problem_description", problem_text,
                        writer="System", step=0)

        verdict: str | None = None
        try:
            for step in range(1, 11):
                verdict = self._run_step(step, problem_text) or verdict
        except FailedStep as exc:
            label = label_for_error(exc.error_type)
            failing_step = exc.step
            self._log("System", "All", "failure", {
                "step": failing_step, "error_type": exc.error_type,
                "message": str(exc), "label": label,
            }, step=failing_step)
            self._write_outputs()
            raise PipelineFailure(str(exc), label=label, step=failing_step,
                                  trace=self.trace) from exc

        if verdict is not None and self.memory.get("final_verdict") is ABSENT:
            self.memory.put("final_verdict", verdict,
                            writer=STEP_ROLES[10], step=10)
        self._write_outputs()
        checks = self.memory.get("check_results")
        return PipelineResult(verdict=verdict, trace=self.trace,
                              memory=self.memory,
                              checks=[] if checks is ABSENT else list(checks))

    def _run_step(self, step: int, problem_text: str) -> str | None:
        role = STEP_ROLES[step]
        self.toolkit.current_step = step
        self.toolkit.current_role = role

        instruction: dict[str, Any] = {"text": STEP_INSTRUCTIONS[step]}
        if not self.config.use_memory:
            context = {k: self.memory.get(k)
                       for k in STEP_CONTEXT_KEYS.get(step, ())
                       if self.memory.get(k) is not ABSENT}
            instruction["context"] = context
        self._log(USER_PROXY, role, "instruction", instruction, step=step)

        try:
            actions = self.backend.step_actions(step, self.memory, problem_text)
        except RackcheckError as exc:
            raise FailedStep(str(exc), type(exc).__name__, step) from exc

        verdict: str | None = None
        last_result: Any = None
        while True:
            try:
                action = actions.send(last_result) if last_result is not None \
                    else next(actions)
            except StopIteration:
                break
            except FailedStep:
                raise
            except RackcheckError as exc:
                raise FailedStep(str(exc), type(exc).__name__, step) from exc
            last_result = None
            if isinstance(action, ToolAction):
                last_result = self._run_tool(step, role, action, round_=1)
            elif isinstance(action, SummaryAction):
                self._log(role, USER_PROXY, "assistant_text", action.text,
                          step=step)
            elif isinstance(action, VerdictAction):
                verdict = action.verdict
                self._log(role, USER_PROXY, "verdict", verdict, step=step)
                self.memory.put("final_verdict", verdict, writer=role,
                                step=step)
            else:
                raise FailedStep(f"backend yielded {action!r}",
                                 "BackendError", step)
        return verdict

    def _run_tool(self, step: int, role: str, action: ToolAction,
                  round_: int) -> Any:
        if not self._allowed(role, action.tool):
            raise FailedStep(
                f"tool {action.tool!r} is outside the toolset of {role}",
                "RegistryError", step)
        result = self._invoke(step, role, action, round_)
        if self.config.enforce_schemas and action.tool in TOOL_SCHEMAS:
            violations = self._check_schema(action.tool, result)
            if violations:
                return self._repair(step, role, action, violations, round_)
        return result

    def _invoke(self, step: int, role: str, action: ToolAction,
                round_: int) -> Any:
        """Log the call, run the tool, log the result. A bad argument list
        or a domain error fails the step."""
        call = ToolCall(name=action.tool, args=action.args)
        self._log(role, TOOL_RUNNER, "tool_call", call.to_document(),
                  step=step, round_=round_)
        problems = self.registry.validate_call(call)
        if problems:
            message = "; ".join(problems)
            self._log(TOOL_RUNNER, role, "tool_result", {
                "tool": action.tool, "ok": False,
                "error_type": "RegistryError", "message": message,
            }, step=step, round_=round_)
            raise FailedStep(message, "RegistryError", step)
        try:
            result = self.registry.execute(call)
        except FailedStep:
            raise
        except RackcheckError as exc:
            self._log(TOOL_RUNNER, role, "tool_result", {
                "tool": action.tool, "ok": False,
                "error_type": type(exc).__name__, "message": str(exc),
            }, step=step, round_=round_)
            raise FailedStep(str(exc), type(exc).__name__, step) from exc
        self._log(TOOL_RUNNER, role, "tool_result",
                  {"tool": action.tool, "ok": True, "result": result},
                  step=step, round_=round_)
        return result

    def _check_schema(self, tool: str, result: Any) -> list[str]:
        schema_id = TOOL_SCHEMAS[tool]
        all_violations: list[str] = []
        for target in _schema_target(tool, result):
            all_violations.extend(validate_payload(schema_id, target))
        return all_violations

    def _repair(self, step: int, role: str, action: ToolAction,
                violations: list[str], round_: int) -> Any:
        next_round = round_ + 1
        if next_round > self.config.max_rounds:
            raise FailedStep(
                f"tool {action.tool!r} produced a schema-invalid payload and "
                f"the round budget ({self.config.max_rounds}) forbids repair: "
                + "; ".join(violations), "RoundLimit", step)
        retry = self.backend.repair_action(action, violations)
        if retry is None:
            raise FailedStep(
                f"tool {action.tool!r} payload failed schema validation: "
                + "; ".join(violations), "SchemaViolation", step)
        self._log(USER_PROXY, role, "instruction", {
            "text": (f"The {action.tool} payload failed validation. "
                     "Correct it and call the tool again."),
            "violations": violations,
        }, step=step, round_=next_round)
        result = self._invoke(step, role, retry, next_round)
        remaining = self._check_schema(action.tool, result)
        if remaining:
            raise FailedStep(
                f"tool {action.tool!r} payload still schema-invalid after "
                "repair: " + "; ".join(remaining), "SchemaViolation", step)
        return result

    # --- outputs ---

    def _write_outputs(self) -> None:
        if self.out_dir is None:
            return
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.trace.write_jsonl(self.out_dir / TRACE_FILENAME)
        self.memory.save_snapshot(self.out_dir / SNAPSHOT_FILENAME)
        model = self.memory.get("structural_model")
        if model is not ABSENT:
            # model file keeps builder field order, unlike the sorted
            # canonical form used everywhere else
            text = json.dumps(model, ensure_ascii=False, allow_nan=False,
                              indent=2) + "\n"
            (self.out_dir / MODEL_FILENAME).write_text(text, encoding="utf-8")


def run_pipeline(problem_text: str, config: PipelineConfig | None = None,
                 out_dir: str | Path | None = None, backend=None,
                 scripted_records: list[dict] | None = None) -> PipelineResult:
    runner = PipelineRunner(config or PipelineConfig(), out_dir=out_dir,
                            backend=backend,
                            scripted_records=scripted_records)
    return runner.run(problem_text)
