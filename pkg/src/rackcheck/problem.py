"""Deterministic parsing of rack problem descriptions.

The corpus follows a controlled grammar (one paragraph, full sentences,
coordinates as "(x,y)" pairs, weights as "P_<elev>ft = <kip> kip (<lb> lb)"),
so everything here is pattern matching, not open-ended language handling.
Splitting distributes sentences to three role-specific sub-descriptions;
geometry sentences are copied verbatim so coordinates survive untouched.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from .canon import canonical_dumps
from .errors import (AdjustmentError, DecompositionError, ExtractionError,
                     GeometryError)

Point = tuple[float, float]
Segment = tuple[Point, Point]

_SENTENCE_RE = re.compile(r"(?<=[.?!])\s+(?=[A-Z(])")
_COORD_PAIR_RE = re.compile(
    r"\(\s*(-?[\d.]+)\s*,\s*(-?[\d.]+)\s*\)\s*->\s*\(\s*(-?[\d.]+)\s*,\s*(-?[\d.]+)\s*\)")
_COORD_RE = re.compile(r"\(\s*(-?[\d.]+)\s*,\s*(-?[\d.]+)\s*\)")
_LINE_RE = re.compile(
    r"from\s*\(\s*(-?[\d.]+)\s*,\s*(-?[\d.]+)\s*\)\s*to\s*\(\s*(-?[\d.]+)\s*,\s*(-?[\d.]+)\s*\)")
_WEIGHT_RE = re.compile(r"P_([\d.]+)\s*ft\s*=\s*[\d.]+\s*kip\s*\(\s*([\d.]+)\s*lb\s*\)")
_DIMS_RE = re.compile(r"([\d.]+)\s*in\s*[x×]\s*([\d.]+)\s*in\s*[x×]\s*([\d.]+)\s*in")
_NUM_FT_RE = re.compile(r"([\d.]+)\s*ft")

_WORD_NUMBERS = {"one": 1, "two": 2, "three": 3, "four": 4, "five": 5,
                 "six": 6, "seven": 7, "eight": 8, "nine": 9, "ten": 10,
                 "eleven": 11, "twelve": 12}

DESIGN_DATA_MARKER = "\n\n[design data]\n"

# nominal proportions for a Z-section stated by depth alone, e.g. "4 in Z-sections"
Z_DEFAULT_FLANGE_IN = 1.5
Z_DEFAULT_THICKNESS_IN = 0.06

COORD_TOL = 1e-9


@dataclass(frozen=True)
class DecompositionResult:
    sda_input: str
    la_input: str
    saa_input: str
    number_of_bays: int
    number_of_pallets: int

    def to_document(self) -> dict:
        return {
            "SDA_input": self.sda_input,
            "LA_input": self.la_input,
            "SAA_input": self.saa_input,
            "number_of_bays": self.number_of_bays,
            "number_of_pallets": self.number_of_pallets,
        }


@dataclass(frozen=True)
class Dimensions:
    width_ft: float
    height_ft: float
    beam_length_ft: float

    def to_document(self) -> dict:
        return {"width_ft": self.width_ft, "height_ft": self.height_ft,
                "beam_length_ft": self.beam_length_ft}


@dataclass(frozen=True)
class BuildingInfo:
    location: str
    building_type: str
    floor_elevations_ft: list[float]
    loads_lbs: list[float]
    dimensions: Dimensions
    structural_info: str

    def to_document(self) -> dict:
        return {
            "location": self.location,
            "building_type": self.building_type,
            "floor_elevations_ft": list(self.floor_elevations_ft),
            "loads_lbs": list(self.loads_lbs),
            "dimensions": self.dimensions.to_document(),
            "structural_info": self.structural_info,
        }


@dataclass(frozen=True)
class SectionSpec:
    member: str      # column | brace | beam
    shape: str       # u_channel | z_section
    dims_in: tuple[float, float, float]   # depth, flange, thickness
    length_ft: float

    def to_document(self) -> dict:
        d, b, t = self.dims_in
        return {"member": self.member, "shape": self.shape,
                "dims_in": {"d": d, "b": b, "t": t},
                "length_ft": self.length_ft}


@dataclass(frozen=True)
class AdjustmentRule:
    """Affine map from nominal pallet weight to per-level design load, in lb.

    The default (alpha=1.5, beta=500) is calibration carried by the reference
    scenario, not physics: design_lb = alpha * (nominal_lb - beta).
    """

    alpha: float = 1.5
    beta: float = 500.0

    def apply(self, weight_lb: float) -> float:
        return self.alpha * (weight_lb - self.beta)


DEFAULT_ADJUSTMENT = AdjustmentRule()


@dataclass
class GeometrySpec:
    column_lines: list[Segment]
    brace_segments: list[Segment]
    supports: list[Point]
    support_fixity: list[int] = field(default_factory=lambda: [1, 1, 1])
    load_elevations_ft: list[float] = field(default_factory=list)


def _sentences(text: str) -> list[str]:
    return [s.strip() for s in _SENTENCE_RE.split(text.strip()) if s.strip()]


def _parse_count(token: str) -> int | None:
    token = token.lower().strip()
    if token.isdigit():
        return int(token)
    return _WORD_NUMBERS.get(token)


def _is_section_sentence(s: str) -> bool:
    low = s.lower()
    return "z-section" in low or "u-channel" in low


def _is_geometry_sentence(s: str) -> bool:
    low = s.lower()
    return any(k in low for k in ("centerline", "connect", "support",
                                  "modeled in side elevation",
                                  "coordinates are given"))


def _is_loading_sentence(s: str) -> bool:
    low = s.lower()
    return any(k in low for k in ("located in", "pallet", "weight", " lb",
                                  "bays", "elevations are placed", "width",
                                  "beam length"))


def split_problem_description(text: str) -> DecompositionResult:
    """Partition a problem description into the three role sub-descriptions
    and pull out the bay and pallet counts.

    Geometry sentences are copied unchanged into the structural-analysis
    input so every coordinate pair stays verbatim.
    """
    if not text or not text.strip():
        raise DecompositionError("problem description is empty")
    sentences = _sentences(text)

    section_parts = [s for s in sentences if _is_section_sentence(s)]
    geometry_parts = [s for s in sentences if _is_geometry_sentence(s)
                      and not _is_section_sentence(s)]
    loading_parts = [s for s in sentences if _is_loading_sentence(s)
                     and not _is_section_sentence(s)]

    if not section_parts:
        raise DecompositionError("no member section sentence found")
    if not geometry_parts:
        raise DecompositionError("no geometry sentence found")
    if not loading_parts:
        raise DecompositionError("no loading sentence found")

    # beam span lives in the layout sentence; restate it for the section role
    beam_len = re.search(r"beam length (?:being|of|is)\s*([\d.]+)\s*ft", text)
    if beam_len:
        section_parts = section_parts + [f"Each beam spans {beam_len.group(1)} ft."]

    bays_match = re.search(r"(\w+)\s+(?:longitudinal\s+)?bays", text, re.IGNORECASE)
    bays = _parse_count(bays_match.group(1)) if bays_match else None
    if bays is None:
        raise DecompositionError("number_of_bays not stated in problem text")

    pallets_match = re.search(
        r"carries\s+(\w+)\s+pallets|(\w+)\s+pallets\s+per\s+beam", text,
        re.IGNORECASE)
    pallets = None
    if pallets_match:
        token = pallets_match.group(1) or pallets_match.group(2)
        pallets = _parse_count(token)
    if pallets is None:
        raise DecompositionError("number_of_pallets not stated in problem text")

    return DecompositionResult(
        sda_input="Section design: " + " ".join(section_parts),
        la_input="Loading analysis: " + " ".join(loading_parts),
        saa_input="Structural analysis: " + " ".join(geometry_parts),
        number_of_bays=bays,
        number_of_pallets=pallets,
    )


def parse_pallet_weights(text: str) -> tuple[list[float], list[float]]:
    """Elevation/weight pairs from 'P_<elev>ft = <kip> kip (<lb> lb)' terms,
    sorted by elevation."""
    pairs = [(float(e), float(w)) for e, w in _WEIGHT_RE.findall(text)]
    if not pairs:
        raise ExtractionError("no pallet weight terms found")
    pairs.sort(key=lambda p: p[0])
    return [p[0] for p in pairs], [p[1] for p in pairs]


def extract_building_info(la_input: str) -> BuildingInfo:
    """Location, occupancy, per-level loads, and overall dimensions from the
    loading sub-description."""
    loc = re.search(r"located in\s+([A-Z][\w .'-]*?,\s*[A-Z]{2,3})\b", la_input)
    if not loc:
        raise ExtractionError(".location: no 'located in <City>, <PROV>' phrase")
    location = re.sub(r",\s*", ", ", loc.group(1))

    low = la_input.lower()
    building_type = "racking_system" if "rack" in low else "frame_structure"

    elev_sentence = next((s for s in _sentences(la_input)
                          if "elevations are placed" in s.lower()), None)
    if elev_sentence is None:
        raise ExtractionError(".floor_elevations_ft: no elevation sentence")
    elevations = sorted(float(v) for v in _NUM_FT_RE.findall(elev_sentence))
    if not elevations:
        raise ExtractionError(".floor_elevations_ft: no values parsed")

    weight_elevs, loads = parse_pallet_weights(la_input)
    if weight_elevs != elevations:
        raise ExtractionError(
            f".loads_lbs: weight elevations {weight_elevs} do not align "
            f"with floor elevations {elevations}")

    def dim(pattern: str, name: str) -> float:
        m = re.search(pattern, la_input)
        if not m:
            raise ExtractionError(f".dimensions.{name}: not stated")
        return float(m.group(1))

    dims = Dimensions(
        width_ft=dim(r"width of\s*([\d.]+)\s*ft", "width_ft"),
        height_ft=dim(r"height of\s*([\d.]+)\s*ft", "height_ft"),
        beam_length_ft=dim(r"beam length (?:being|of|is)\s*([\d.]+)\s*ft",
                           "beam_length_ft"),
    )

    member_sentences = [s for s in _sentences(la_input)
                        if "column" in s.lower() or "brace" in s.lower()]
    structural_info = (" ".join(member_sentences)
                       or "columns and braces per section design input")

    return BuildingInfo(location=location, building_type=building_type,
                        floor_elevations_ft=elevations, loads_lbs=loads,
                        dimensions=dims, structural_info=structural_info)


def _member_clauses(text: str) -> dict[str, str]:
    """Slice the section sentence into per-member clauses keyed by singular
    member name."""
    intro = re.compile(r"\b(beams?|columns?|braces?)\s+are\b", re.IGNORECASE)
    hits = list(intro.finditer(text))
    clauses: dict[str, str] = {}
    for i, hit in enumerate(hits):
        start = hit.end()
        end = hits[i + 1].start() if i + 1 < len(hits) else len(text)
        member = hit.group(1).lower().rstrip("s")
        clauses[member] = text[start:end]
    return clauses


def extract_section_info(sda_input: str) -> list[SectionSpec]:
    """Member shapes, dimensions, and lengths from the section-design
    sub-description. Exactly the members mentioned, in textual order."""
    clauses = _member_clauses(sda_input)
    if not clauses:
        raise ExtractionError("no member clauses found in section input")
    specs: list[SectionSpec] = []
    for member, clause in clauses.items():
        low = clause.lower()
        if "z-section" in low:
            shape = "z_section"
        elif "u-channel" in low:
            shape = "u_channel"
        else:
            raise ExtractionError(f"{member}: no recognized section shape")

        dims_match = _DIMS_RE.search(clause)
        if dims_match:
            dims = tuple(float(v) for v in dims_match.groups())
        elif shape == "z_section":
            depth = re.search(r"([\d.]+)\s*in\s+z-section", low)
            if not depth:
                raise ExtractionError(f"{member}: no dimensions stated")
            dims = (float(depth.group(1)), Z_DEFAULT_FLANGE_IN,
                    Z_DEFAULT_THICKNESS_IN)
        else:
            raise ExtractionError(f"{member}: no dimensions stated")

        length = re.search(
            r"(?:height of|length of(?: approximately)?|length being|spans)"
            r"\s*(?:approximately\s*)?([\d.]+)\s*ft", clause)
        if not length and member == "beam":
            length = re.search(r"spans\s*([\d.]+)\s*ft", sda_input)
        if not length:
            raise ExtractionError(f"{member}: no member length stated")

        specs.append(SectionSpec(member=member, shape=shape, dims_in=dims,
                                 length_ft=float(length.group(1))))
    return specs


def extract_elastic_modulus(text: str) -> float | None:
    """E in kip/in^2 if the text states it ('E = 29,000 kip/in^2')."""
    m = re.search(r"E\s*=\s*([\d,]+(?:\.\d+)?)", text)
    return float(m.group(1).replace(",", "")) if m else None


def adjust_pallet_weights(info, num_bays: int, num_pallets: int,
                          rule: AdjustmentRule = DEFAULT_ADJUSTMENT) -> list[float]:
    """Per-level design loads in lb from nominal pallet weights.

    Accepts a BuildingInfo or a plain list of nominal weights. Bay and pallet
    counts are part of the call contract for rule variants; the default
    affine rule does not use them.
    """
    if num_bays < 1 or num_pallets < 1:
        raise AdjustmentError("bay and pallet counts must be at least 1")
    weights = list(info.loads_lbs) if hasattr(info, "loads_lbs") else list(info)
    if not weights:
        raise AdjustmentError("no pallet weights to adjust")
    adjusted = []
    for i, w in enumerate(weights):
        a = rule.apply(w)
        if a <= 0:
            raise AdjustmentError(
                f"adjusted load at level {i} is {a:g} lb (nominal {w:g} lb)")
        adjusted.append(a)
    return adjusted


def _annotation_load_elevations(text: str) -> list[float]:
    """Load elevations from a '[design data]' annotation block, if any."""
    marker_idx = text.find(DESIGN_DATA_MARKER.strip())
    if marker_idx < 0:
        return []
    block = text[marker_idx:]
    m = re.search(r"Load data:\s*(\{.*\})", block)
    if not m:
        return []
    try:
        doc = json.loads(m.group(1))
    except json.JSONDecodeError:
        return []
    live = doc.get("live") or doc.get("seismic") or []
    return [entry["elevation_ft"] for entry in live
            if isinstance(entry, dict) and "elevation_ft" in entry]


def extract_geometry(saa_input: str) -> GeometrySpec:
    """Column lines, brace segments, supports, and load elevations from the
    structural-analysis sub-description."""
    base = saa_input.split(DESIGN_DATA_MARKER.strip())[0]

    lines: list[Segment] = []
    for x1, y1, x2, y2 in _LINE_RE.findall(base):
        seg = ((float(x1), float(y1)), (float(x2), float(y2)))
        if abs(seg[0][0] - seg[1][0]) > COORD_TOL:
            raise GeometryError(f"column line {seg} is not vertical")
        lines.append(seg)
    if not lines:
        raise GeometryError("no column centerlines found")

    braces: list[Segment] = [((float(a), float(b)), (float(c), float(d)))
                             for a, b, c, d in _COORD_PAIR_RE.findall(base)]

    support_sentence = next((s for s in _sentences(base)
                             if "support" in s.lower() and "(" in s), None)
    if support_sentence is None:
        raise GeometryError("no support sentence found")
    supports = [(float(x), float(y)) for x, y in _COORD_RE.findall(support_sentence)]
    if not supports:
        raise GeometryError("support sentence names no coordinates")
    fixity = [1, 1, 1] if "fixed" in support_sentence.lower() else [1, 1, 0]

    def on_column_line(p: Point) -> bool:
        return any(abs(p[0] - ln[0][0]) <= COORD_TOL
                   and min(ln[0][1], ln[1][1]) - COORD_TOL <= p[1]
                   <= max(ln[0][1], ln[1][1]) + COORD_TOL
                   for ln in lines)

    for seg in braces:
        for p in seg:
            if not on_column_line(p):
                raise GeometryError(f"brace endpoint {p} is off every column line")
    for p in supports:
        if not on_column_line(p):
            raise GeometryError(f"support {p} is off every column line")

    elev_sentence = next((s for s in _sentences(base)
                          if "elevations are placed" in s.lower()), None)
    if elev_sentence is not None:
        load_elevs = sorted(float(v) for v in _NUM_FT_RE.findall(elev_sentence))
    else:
        load_elevs = sorted(_annotation_load_elevations(saa_input))

    return GeometrySpec(column_lines=lines, brace_segments=braces,
                        supports=supports, support_fixity=fixity,
                        load_elevations_ft=load_elevs)


def update_saa_input(saa_text: str, section_data: dict | None,
                     load_data: dict | None) -> str:
    """Append (or replace) the design-data annotation block carrying section
    and load documents. The original text, coordinates included, is kept
    byte-for-byte; reapplying replaces the block, so the operation is
    idempotent."""
    base = saa_text.split(DESIGN_DATA_MARKER.strip())[0].rstrip()
    return (base + DESIGN_DATA_MARKER
            + "Section data: " + canonical_dumps(section_data or {}) + "\n"
            + "Load data: " + canonical_dumps(load_data or {}) + "\n")
