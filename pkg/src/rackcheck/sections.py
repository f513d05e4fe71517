"""Thin-walled section properties and member capacities.

Properties use a centerline model of the open cross-section: web of depth d,
two flanges of width b, uniform thickness t, bending about the strong axis
through mid-depth. Capacities follow factored limit states: yield in
tension, the lesser of yield and Euler buckling in compression, first yield
in bending. A capacity config can bypass the formulas with direct values for
calibrated members.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import CapacityError, SectionError

IN_PER_FT = 12.0


@dataclass(frozen=True)
class SectionProperties:
    A: float   # in^2
    I: float   # in^4, strong axis
    S: float   # in^3


@dataclass(frozen=True)
class MaterialSpec:
    E: float = 29000.0   # kip/in^2
    Fy: float = 50.0     # kip/in^2
    phi_t: float = 0.9
    phi_c: float = 0.9
    phi_b: float = 0.9


@dataclass(frozen=True)
class SectionCapacities:
    Pt: float   # kip, tension
    Pc: float   # kip, compression
    Mc: float   # kip*in, bending

    def to_document(self) -> dict:
        return {"Pt": self.Pt, "Pc": self.Pc, "Mc": self.Mc}


def _centerline_properties(d: float, b: float, t: float) -> SectionProperties:
    if d <= 0 or b <= 0 or t <= 0:
        raise SectionError(f"dimensions must be positive, got ({d}, {b}, {t})")
    if t >= min(d, b) / 2:
        raise SectionError(f"thickness {t} too large for ({d} x {b}) section")
    area = (d + 2 * b) * t
    # web about mid-depth + flanges as concentrated areas at +/- d/2
    inertia = t * d ** 3 / 12 + 2 * b * t * (d / 2) ** 2
    modulus = 2 * inertia / d
    return SectionProperties(A=area, I=inertia, S=modulus)


def channel_properties(d: float, b: float, t: float) -> SectionProperties:
    """U-channel: web d, flanges b, thickness t (inches)."""
    return _centerline_properties(d, b, t)


def zsection_properties(d: float, b: float, t: float) -> SectionProperties:
    """Z-section: same centerline model, flanges on opposite sides."""
    return _centerline_properties(d, b, t)


def calculate_section_capacities(props: SectionProperties,
                                 material: MaterialSpec,
                                 length_in: float,
                                 k_factor: float = 1.0,
                                 mode: str = "formula",
                                 overrides: dict | None = None) -> SectionCapacities:
    """Member capacities.

    formula mode: Pt = phi_t*A*Fy; Pe = pi^2*E*I/(K*L)^2;
    Pc = phi_c*min(A*Fy, Pe); Mc = phi_b*S*Fy.

    direct mode: values from `overrides` are returned verbatim (calibrated
    members); any mode missing from the overrides falls back to the formula.
    """
    if mode not in ("formula", "direct"):
        raise CapacityError(f"unknown capacity mode {mode!r}")
    if mode == "direct" and not overrides:
        raise CapacityError("direct mode requires override values")
    if length_in <= 0:
        raise CapacityError(f"member length must be positive, got {length_in}")

    pt = material.phi_t * props.A * material.Fy
    pe = math.pi ** 2 * material.E * props.I / (k_factor * length_in) ** 2
    pc = material.phi_c * min(props.A * material.Fy, pe)
    mc = material.phi_b * props.S * material.Fy

    if mode == "direct":
        pt = overrides.get("Pt", pt)
        pc = overrides.get("Pc", pc)
        mc = overrides.get("Mc", mc)
    if pt <= 0 or pc <= 0 or mc <= 0:
        raise CapacityError(f"non-positive capacity (Pt={pt}, Pc={pc}, Mc={mc})")
    return SectionCapacities(Pt=pt, Pc=pc, Mc=mc)


def properties_for_shape(shape: str, d: float, b: float, t: float) -> SectionProperties:
    if shape == "u_channel":
        return channel_properties(d, b, t)
    if shape == "z_section":
        return zsection_properties(d, b, t)
    raise SectionError(f"unknown section shape {shape!r}")


def build_section_data(specs, material: MaterialSpec,
                       capacity_config: dict,
                       capacity_scale: float = 1.0) -> dict:
    """Assemble the section document: per member, computed (or injected)
    properties plus capacities.

    capacity_config maps member name -> {"mode", "overrides", "properties",
    "K"}. Property overrides replace individual computed values (calibrated
    A/I); capacity overrides feed direct mode. capacity_scale multiplies
    every final capacity (demand/capacity sensitivity studies).
    """
    if capacity_scale <= 0:
        raise CapacityError("capacity_scale must be positive")
    doc: dict = {}
    for spec in specs:
        member_cfg = capacity_config.get(spec.member, {})
        d, b, t = spec.dims_in
        props = properties_for_shape(spec.shape, d, b, t)
        prop_over = member_cfg.get("properties", {})
        area = prop_over.get("A", props.A)
        inertia = prop_over.get("I", props.I)
        modulus = prop_over.get("S", 2 * inertia / d)
        props = SectionProperties(A=area, I=inertia, S=modulus)

        caps = calculate_section_capacities(
            props, material,
            length_in=spec.length_ft * IN_PER_FT,
            k_factor=member_cfg.get("K", 1.0),
            mode=member_cfg.get("mode", "formula"),
            overrides=member_cfg.get("overrides"),
        )
        caps = SectionCapacities(Pt=caps.Pt * capacity_scale,
                                 Pc=caps.Pc * capacity_scale,
                                 Mc=caps.Mc * capacity_scale)

        doc[spec.member] = {
            "shape": spec.shape,
            "dims_in": {"d": d, "b": b, "t": t},
            "length_ft": spec.length_ft,
            "properties": {"A": props.A, "I": props.I, "S": props.S},
            "capacities": caps.to_document(),
        }
    return doc
