"""Pipeline configuration.

Everything that changes pipeline behavior lives here: backend selection,
round budget, schema enforcement, the lateral-force knobs, capacity
calibration, and fault-injection overrides used by the failure-mode suite.
Configs load from JSON files with defaults filled in; unknown keys are
rejected so typos surface as usage errors instead of silent no-ops.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from pathlib import Path

from .errors import ConfigError
from .loads import ElfConfig
from .problem import AdjustmentRule

BACKENDS = ("deterministic", "scripted", "remote")
MODES = ("multi_agent", "single_agent")

DEFAULT_API_KEY_ENV = "RACKCHECK_API_KEY"


@dataclass(frozen=True)
class RemoteConfig:
    """Remote chat-completion endpoint settings. The API key is read from
    the environment variable named by api_key_env, never from flags."""

    endpoint: str = ""
    model: str = ""
    temperature: float = 0.0
    max_tokens: int = 2000
    api_key_env: str = DEFAULT_API_KEY_ENV
    timeout_s: float = 30.0


@dataclass
class PipelineConfig:
    backend: str = "deterministic"
    mode: str = "multi_agent"
    max_rounds: int = 4
    use_memory: bool = True
    enforce_schemas: bool = True
    elf: ElfConfig = field(default_factory=ElfConfig)
    adjustment: AdjustmentRule = field(default_factory=AdjustmentRule)
    capacity_config_path: Path | None = None
    capacity_scale: float = 1.0
    combos: list[dict] | None = None
    seismic_table: Path | None = None
    support_fixity_override: list[int] | None = None
    deflection_limit_in: float | None = None
    remote: RemoteConfig | None = None

    def validate(self) -> None:
        if self.backend not in BACKENDS:
            raise ConfigError(f"unknown backend {self.backend!r}")
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}")
        if self.mode == "single_agent" and self.backend == "deterministic":
            raise ConfigError("single_agent mode requires a scripted or "
                              "remote backend")
        if self.max_rounds < 1:
            raise ConfigError("max_rounds must be at least 1")
        if self.capacity_scale <= 0:
            raise ConfigError("capacity_scale must be positive")
        if self.backend == "remote" and (self.remote is None
                                         or not self.remote.endpoint):
            raise ConfigError("remote backend needs remote.endpoint")
        if self.support_fixity_override is not None and (
                len(self.support_fixity_override) != 3
                or any(v not in (0, 1) for v in self.support_fixity_override)):
            raise ConfigError("support_fixity_override must be three 0/1 flags")

    def default_combos(self) -> list[dict]:
        if self.combos is not None:
            return [dict(c) for c in self.combos]
        return [
            {"name": "seismic", "factors": {"seismic": self.elf.seismic_factor}},
            {"name": "live", "factors": {"live": self.elf.live_factor}},
        ]

    @classmethod
    def from_file(cls, path: str | Path) -> "PipelineConfig":
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
        return cls.from_dict(raw)

    @classmethod
    def from_dict(cls, raw: dict) -> "PipelineConfig":
        if not isinstance(raw, dict):
            raise ConfigError("config root must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        kwargs = dict(raw)
        if "elf" in kwargs:
            kwargs["elf"] = _sub(ElfConfig, kwargs["elf"], "elf")
        if "adjustment" in kwargs:
            kwargs["adjustment"] = _sub(AdjustmentRule, kwargs["adjustment"],
                                        "adjustment")
        if "remote" in kwargs and kwargs["remote"] is not None:
            kwargs["remote"] = _sub(RemoteConfig, kwargs["remote"], "remote")
        for key in ("capacity_config_path", "seismic_table"):
            if kwargs.get(key) is not None:
                kwargs[key] = Path(kwargs[key])
        config = cls(**kwargs)
        config.validate()
        return config


def _sub(klass, raw: dict, name: str):
    if not isinstance(raw, dict):
        raise ConfigError(f"config section {name!r} must be an object")
    known = {f.name for f in fields(klass)}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown keys in {name!r}: {sorted(unknown)}")
    return klass(**raw)
