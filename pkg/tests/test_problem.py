"""Text parsing: decomposition, building info, sections, geometry, adjustment."""

import re

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rackcheck.errors import (AdjustmentError, DecompositionError,
                              ExtractionError, GeometryError)
from rackcheck.problem import (
    DEFAULT_ADJUSTMENT,
    AdjustmentRule,
    adjust_pallet_weights,
    extract_building_info,
    extract_elastic_modulus,
    extract_geometry,
    extract_section_info,
    parse_pallet_weights,
    split_problem_description,
    update_saa_input,
)


# --- decomposition ----------------------------------------------------------

def test_split_golden(golden_text):
    result = split_problem_description(golden_text)
    assert result.number_of_bays == 2
    assert result.number_of_pallets == 3
    doc = result.to_document()
    assert set(doc) == {"SDA_input", "LA_input", "SAA_input",
                        "number_of_bays", "number_of_pallets"}


def test_split_geometry_verbatim(golden_text):
    """Every coordinate pair in the original text must survive untouched in
    the structural sub-description."""
    result = split_problem_description(golden_text)
    coords = re.findall(r"\([\d.,\s-]+\)", golden_text)
    for pair in coords:
        assert pair in result.saa_input


def test_split_sections_routed_to_sda(golden_text):
    result = split_problem_description(golden_text)
    assert "u-channel" in result.sda_input.lower()
    assert "z-section" in result.sda_input.lower()
    # loading text keeps the weights
    assert "P_" in result.la_input


def test_split_empty_rejected():
    with pytest.raises(DecompositionError):
        split_problem_description("")
    with pytest.raises(DecompositionError):
        split_problem_description("   \n  ")


def test_split_needs_bay_count(golden_text):
    stripped = golden_text.replace("bays", "sections of shelving")
    with pytest.raises(DecompositionError, match="number_of_bays"):
        split_problem_description(stripped)


def test_split_word_numbers():
    text = ("A storage rack located in Nanaimo, BC has two bays and each "
            "beam carries three pallets. Pallet weights are "
            "P_3.5ft = 1.75 kip (1750 lb). Load elevations are placed at "
            "3.5 ft. The rack has a width of 3.5 ft, a height of 16 ft, "
            "with the beam length being 8 ft. "
            "Columns are cold-formed steel u-channels 3 in x 1.5 in x 0.07 in "
            "with a height of 16 ft. "
            "The frame is modeled in side elevation. "
            "Column centerlines run from (0,0) to (0,16) and from (3.5,0) to "
            "(3.5,16). Supports at (0,0) and (3.5,0) are fixed.")
    result = split_problem_description(text)
    assert result.number_of_bays == 2
    assert result.number_of_pallets == 3


# --- building info ----------------------------------------------------------

def test_building_info_golden(golden_text):
    la = split_problem_description(golden_text).la_input
    info = extract_building_info(la)
    assert info.location == "Nanaimo, BC"
    assert info.building_type == "racking_system"
    assert info.floor_elevations_ft == [4.0, 8.5, 13.0]
    assert info.loads_lbs == [1750.0, 1250.0, 1000.0]
    assert info.dimensions.width_ft == 3.5
    assert info.dimensions.height_ft == 16.0
    assert info.dimensions.beam_length_ft == 8.0


def test_building_info_needs_location(golden_text):
    la = split_problem_description(golden_text).la_input
    broken = la.replace("located in Nanaimo, BC", "located downtown")
    with pytest.raises(ExtractionError, match=r"\.location"):
        extract_building_info(broken)


def test_building_info_elevation_weight_alignment():
    text = ("Loading analysis: The rack is located in Nanaimo, BC. "
            "Load elevations are placed at 3.5 ft and 7 ft. "
            "Pallet weights are P_3.5ft = 1.75 kip (1750 lb). "
            "The rack has a width of 3.5 ft, a height of 16 ft, "
            "with the beam length being 8 ft.")
    with pytest.raises(ExtractionError, match="do not align"):
        extract_building_info(text)


def test_parse_weights_sorted_by_elevation():
    text = ("P_10.5ft = 1.0 kip (1000 lb), P_3.5ft = 1.75 kip (1750 lb), "
            "P_7ft = 1.25 kip (1250 lb)")
    elevs, weights = parse_pallet_weights(text)
    assert elevs == [3.5, 7.0, 10.5]
    assert weights == [1750.0, 1250.0, 1000.0]


def test_parse_weights_none_found():
    with pytest.raises(ExtractionError):
        parse_pallet_weights("no terms at all")


# --- section extraction -----------------------------------------------------

def test_sections_golden(golden_text):
    sda = split_problem_description(golden_text).sda_input
    specs = extract_section_info(sda)
    by_member = {s.member: s for s in specs}
    assert set(by_member) == {"column", "brace", "beam"}
    assert by_member["column"].shape == "u_channel"
    assert by_member["column"].dims_in == (3.079, 2.795, 0.0787)
    assert by_member["column"].length_ft == 16.0
    assert by_member["brace"].shape == "u_channel"
    assert by_member["brace"].dims_in == (1.0, 1.0, 0.054)
    assert by_member["brace"].length_ft == 4.3
    assert by_member["beam"].shape == "z_section"
    assert by_member["beam"].length_ft == 8.0


def test_sections_z_depth_defaults():
    text = "Beams are 4 in Z-sections and each spans 8 ft."
    specs = extract_section_info(text)
    assert specs[0].shape == "z_section"
    d, b, t = specs[0].dims_in
    assert d == 4.0 and b > 0 and t > 0


def test_sections_unknown_shape_rejected():
    with pytest.raises(ExtractionError, match="shape"):
        extract_section_info(
            "Columns are wide-flange W8x10 with a height of 16 ft.")


def test_sections_need_length():
    with pytest.raises(ExtractionError, match="length"):
        extract_section_info(
            "Columns are cold-formed steel u-channels 3 in x 1.5 in x 0.07 in.")


def test_elastic_modulus():
    assert extract_elastic_modulus("with E = 29,000 kip/in^2") == 29000.0
    assert extract_elastic_modulus("E = 200.5 units") == 200.5
    assert extract_elastic_modulus("no modulus here") is None


# --- weight adjustment ------------------------------------------------------

def test_adjust_reference_values():
    # the calibration pair: 1.5 * (w - 500)
    assert adjust_pallet_weights([1750.0, 1250.0, 1000.0], 3, 4) == [
        1875.0, 1125.0, 750.0]


def test_adjust_rule_is_affine():
    rule = AdjustmentRule(alpha=2.0, beta=100.0)
    assert rule.apply(600.0) == 1000.0
    assert adjust_pallet_weights([600.0], 1, 1, rule) == [1000.0]


def test_adjust_rejects_nonpositive_result():
    with pytest.raises(AdjustmentError):
        adjust_pallet_weights([400.0], 3, 4)    # 1.5*(400-500) < 0
    with pytest.raises(AdjustmentError):
        adjust_pallet_weights([500.0], 3, 4)    # exactly zero


def test_adjust_validates_counts():
    with pytest.raises(AdjustmentError):
        adjust_pallet_weights([1000.0], 0, 4)
    with pytest.raises(AdjustmentError):
        adjust_pallet_weights([], 3, 4)


@given(st.lists(st.floats(min_value=600.0, max_value=10000.0), min_size=1,
                max_size=6))
def test_adjust_order_preserving(weights):
    out = adjust_pallet_weights(weights, 3, 4)
    assert len(out) == len(weights)
    for w, a in zip(weights, out):
        assert a == DEFAULT_ADJUSTMENT.alpha * (w - DEFAULT_ADJUSTMENT.beta)
        assert a > 0


# --- geometry ---------------------------------------------------------------

def test_geometry_golden(golden_text):
    saa = split_problem_description(golden_text).saa_input
    geo = extract_geometry(saa)
    assert len(geo.column_lines) == 2
    xs = sorted(ln[0][0] for ln in geo.column_lines)
    assert xs == [0.0, 3.5]
    for line in geo.column_lines:
        assert line[0][0] == line[1][0]    # vertical
    assert len(geo.brace_segments) == 8
    assert sorted(geo.supports) == [(0.0, 0.0), (3.5, 0.0)]
    assert geo.support_fixity == [1, 1, 1]
    # elevations arrive with the design-data annotation, not the raw split
    assert geo.load_elevations_ft == []


def test_geometry_rejects_sloped_column():
    text = ("The frame is modeled in side elevation. Column centerlines run "
            "from (0,0) to (1,16). Supports at (0,0) are fixed.")
    with pytest.raises(GeometryError, match="not vertical"):
        extract_geometry(text)


def test_geometry_rejects_floating_brace(golden_text):
    saa = split_problem_description(golden_text).saa_input
    broken = saa.replace("(0,3)", "(9,3)", 1)
    with pytest.raises(GeometryError, match="off every column line"):
        extract_geometry(broken)


def test_geometry_needs_supports():
    text = ("The frame is modeled in side elevation. Column centerlines run "
            "from (0,0) to (0,16).")
    with pytest.raises(GeometryError, match="support"):
        extract_geometry(text)


def test_geometry_pinned_supports():
    text = ("The frame is modeled in side elevation. Column centerlines run "
            "from (0,0) to (0,16) and from (3.5,0) to (3.5,16). "
            "Supports at (0,0) and (3.5,0) are pinned.")
    geo = extract_geometry(text)
    assert geo.support_fixity == [1, 1, 0]


# --- design-data annotation -------------------------------------------------

def test_update_saa_keeps_base_text(golden_text):
    saa = split_problem_description(golden_text).saa_input
    updated = update_saa_input(saa, {"column": {}}, {"live": []})
    assert updated.startswith(saa.rstrip())
    assert "[design data]" in updated
    assert "Section data:" in updated and "Load data:" in updated


def test_update_saa_idempotent(golden_text):
    saa = split_problem_description(golden_text).saa_input
    once = update_saa_input(saa, {"a": 1}, {"b": 2})
    twice = update_saa_input(once, {"a": 1}, {"b": 2})
    assert once == twice
    # replacing with new data drops the old block entirely
    changed = update_saa_input(once, {"a": 9}, {"b": 2})
    assert '"a": 9' in changed and '"a": 1' not in changed


def test_geometry_reads_annotation_elevations(golden_text):
    saa = split_problem_description(golden_text).saa_input
    load_data = {"live": [{"elevation_ft": 3.5, "force_kip": 1.0},
                          {"elevation_ft": 7.0, "force_kip": 1.0}]}
    updated = update_saa_input(saa, {}, load_data)
    geo = extract_geometry(updated)
    # the base text has no elevation sentence, so the annotation supplies them
    assert geo.load_elevations_ft == [3.5, 7.0]
