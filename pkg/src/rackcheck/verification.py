"""Limit-state checks and the final adequacy verdict.

Each check compares one demand against one capacity: ratio = demand /
capacity, pass iff ratio <= 1.0 at full precision. Two-decimal rounding
happens only in reports, never in the pass/fail comparison. Demands are
envelope magnitudes for the posts (tension, compression, bending) and braces
(tension, compression); bending is checked for posts only.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ContextError, VerificationError
from .memory import ABSENT, StructuralMemory

VERDICT_ADEQUATE = "FINAL RESULT: STRUCTURALLY ADEQUATE"
VERDICT_INADEQUATE = "FINAL RESULT: STRUCTURALLY INADEQUATE"

# demand mode -> capacity key
MODE_CAPACITY = {"tension": "Pt", "compression": "Pc", "bending": "Mc"}

REQUIRED_CONTEXT_KEYS = ("seismic_parameters", "structural_model",
                         "processed_forces", "section_data")
OPTIONAL_CONTEXT_KEYS = ("check_results", "load_data", "building_info",
                         "SAA_input_update", "final_verdict")


@dataclass(frozen=True)
class CheckResult:
    category: str    # post | brace
    mode: str        # tension | compression | bending
    demand: float
    capacity: float
    ratio: float
    passed: bool

    def to_document(self) -> dict:
        return {"category": self.category, "mode": self.mode,
                "demand": self.demand, "capacity": self.capacity,
                "ratio": self.ratio, "pass": self.passed}

    def report_line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"{self.category} {self.mode}: demand {self.demand:.2f} / "
                f"capacity {self.capacity:.2f} = ratio {self.ratio:.2f} [{status}]")


@dataclass(frozen=True)
class SafetyAssessment:
    checks: list[CheckResult]
    verdict: str

    @property
    def adequate(self) -> bool:
        return self.verdict == VERDICT_ADEQUATE

    def to_document(self) -> dict:
        return {"checks": [c.to_document() for c in self.checks],
                "verdict": self.verdict}


def demands_from_envelope(envelope_doc: dict) -> dict[str, dict[str, float]]:
    """Map a combined force envelope onto demand magnitudes per category.
    Posts get a bending demand; braces (pin-pin) do not."""
    combined = envelope_doc.get("combined", envelope_doc)
    beams = combined["beams"]
    trusses = combined["trusses"]
    return {
        "post": {"tension": beams["max_tension"],
                 "compression": beams["max_compression"],
                 "bending": beams["max_abs_moment"]},
        "brace": {"tension": trusses["max_tension"],
                  "compression": trusses["max_compression"]},
    }


def verify_structural_safety(capacities: dict, demands: dict) -> list[CheckResult]:
    """Run every demanded limit state.

    capacities: {category: {"Pt":..., "Pc":..., "Mc":...}};
    demands: {category: {mode: magnitude}}. A demanded mode with no matching
    capacity raises VerificationError naming category.mode.
    """
    checks: list[CheckResult] = []
    for category in sorted(demands):
        cat_caps = capacities.get(category)
        if cat_caps is None:
            raise VerificationError(f"no capacities for category {category!r}")
        for mode in ("tension", "compression", "bending"):
            if mode not in demands[category]:
                continue
            demand = demands[category][mode]
            if demand < 0:
                raise VerificationError(f"{category}.{mode}: negative demand")
            cap_key = MODE_CAPACITY[mode]
            capacity = cat_caps.get(cap_key)
            if capacity is None or capacity <= 0:
                raise VerificationError(
                    f"{category}.{mode}: no capacity value ({cap_key})")
            ratio = demand / capacity
            checks.append(CheckResult(category=category, mode=mode,
                                      demand=demand, capacity=capacity,
                                      ratio=ratio, passed=ratio <= 1.0))
    return checks


def capacities_from_section_data(section_data: dict) -> dict:
    """Post/brace capacity map out of the section document (column entries
    govern the posts)."""
    try:
        return {"post": dict(section_data["column"]["capacities"]),
                "brace": dict(section_data["brace"]["capacities"])}
    except KeyError as exc:
        raise VerificationError(f"section data missing {exc}") from exc


def get_analysis_context(memory: StructuralMemory) -> dict:
    """Aggregate everything the verdict needs out of memory. A missing
    required key raises ContextError naming it."""
    context: dict = {}
    for key in REQUIRED_CONTEXT_KEYS:
        value = memory.get(key)
        if value is ABSENT:
            raise ContextError(key)
        context[key] = value
    for key in OPTIONAL_CONTEXT_KEYS:
        value = memory.get(key)
        if value is not ABSENT:
            context[key] = value
    return context


def final_assessment(context: dict) -> SafetyAssessment:
    """Verdict from prior check results carried in the context."""
    raw_checks = context.get("check_results")
    if not raw_checks:
        raise ContextError("check_results")
    checks = [CheckResult(category=c["category"], mode=c["mode"],
                          demand=c["demand"], capacity=c["capacity"],
                          ratio=c["ratio"], passed=c["pass"])
              for c in raw_checks]
    verdict = VERDICT_ADEQUATE if all(c.passed for c in checks) else VERDICT_INADEQUATE
    return SafetyAssessment(checks=checks, verdict=verdict)
