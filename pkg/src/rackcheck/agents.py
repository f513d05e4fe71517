"""Agent roles and the tool registry.

Nine roles cover the pipeline steps; each owns a disjoint slice of the tool
set (the union covers all fifteen tools). The three memory-read tools are
shared: any role may call them in addition to its own slice. Role cards
(system messages plus toolsets) ship as data so the remote backend can use
the same definitions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Callable

from .datafiles import data_path
from .errors import RegistryError
from .protocol import ToolCall


@dataclass(frozen=True)
class AgentRole:
    name: str
    system_message: str
    toolset: tuple[str, ...]


def load_roles() -> tuple[dict[str, AgentRole], tuple[str, ...]]:
    """Role map and the shared read-only tool names from the prompts file."""
    raw = json.loads(data_path("prompts.json").read_text(encoding="utf-8"))
    roles = {r["name"]: AgentRole(name=r["name"],
                                  system_message=r["system_message"],
                                  toolset=tuple(r["tools"]))
             for r in raw["roles"]}
    return roles, tuple(raw["shared_read_tools"])


# execution step -> responsible role (step 0 is the system itself)
STEP_ROLES: dict[int, str] = {
    1: "ProjectManager",
    2: "DesignEngineer",
    3: "LoadingAnalyst",
    4: "SeismicAnalyst",
    5: "DynamicAnalyst",
    6: "ProjectManager",
    7: "StructuralAnalyst",
    8: "ModelEngineer",
    9: "VerificationEngineer",
    10: "SafetyManager",
}


@dataclass(frozen=True)
class ToolSpec:
    name: str
    fn: Callable[..., Any]
    params: dict[str, dict]   # arg name -> {"type": ..., "required": bool}


_JSON_TYPES = {
    "string": str,
    "integer": int,
    "number": (int, float),
    "boolean": bool,
    "object": dict,
    "array": list,
}


class ToolRegistry:
    """Name -> callable map with lightweight argument validation."""

    def __init__(self):
        self._tools: dict[str, ToolSpec] = {}

    def register(self, name: str, fn: Callable[..., Any],
                 params: dict[str, dict] | None = None) -> None:
        if name in self._tools:
            raise RegistryError(f"tool {name!r} registered twice")
        self._tools[name] = ToolSpec(name=name, fn=fn, params=params or {})

    def names(self) -> tuple[str, ...]:
        return tuple(self._tools)

    def __len__(self) -> int:
        return len(self._tools)

    def __contains__(self, name: str) -> bool:
        return name in self._tools

    def validate_call(self, call: ToolCall) -> list[str]:
        spec = self._tools.get(call.name)
        if spec is None:
            return [f"unknown tool {call.name!r}"]
        problems = []
        for arg, meta in spec.params.items():
            if meta.get("required", False) and arg not in call.args:
                problems.append(f"{call.name}: missing required arg {arg!r}")
        for arg, value in call.args.items():
            meta = spec.params.get(arg)
            if meta is None:
                problems.append(f"{call.name}: unexpected arg {arg!r}")
                continue
            expected = _JSON_TYPES.get(meta.get("type", ""))
            if expected is None or value is None:
                continue
            is_bool_for_number = (isinstance(value, bool)
                                  and meta["type"] in ("integer", "number"))
            if not isinstance(value, expected) or is_bool_for_number:
                problems.append(f"{call.name}: arg {arg!r} should be {meta['type']}")
        return problems

    def execute(self, call: ToolCall) -> Any:
        spec = self._tools.get(call.name)
        if spec is None:
            raise RegistryError(f"unknown tool {call.name!r}")
        return spec.fn(**call.args)


def check_toolsets(roles: dict[str, AgentRole], shared: tuple[str, ...],
                   registry: ToolRegistry) -> None:
    """Ownership must be disjoint across roles (shared readers excepted) and
    the union must cover the whole registry."""
    owned: dict[str, str] = {}
    for role in roles.values():
        for tool in role.toolset:
            if tool in shared:
                continue
            if tool in owned and owned[tool] != role.name:
                raise RegistryError(
                    f"tool {tool!r} owned by both {owned[tool]} and {role.name}")
            owned[tool] = role.name
    covered = set(owned) | set(shared)
    missing = set(registry.names()) - covered
    if missing:
        raise RegistryError(f"tools not assigned to any role: {sorted(missing)}")
    unknown = covered - set(registry.names())
    if unknown:
        raise RegistryError(f"roles reference unregistered tools: {sorted(unknown)}")
