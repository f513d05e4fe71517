"""Centerline section properties and factored member capacities."""

import json
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rackcheck.datafiles import data_path
from rackcheck.errors import CapacityError, SectionError
from rackcheck.problem import SectionSpec
from rackcheck.sections import (
    MaterialSpec,
    SectionProperties,
    build_section_data,
    calculate_section_capacities,
    channel_properties,
    properties_for_shape,
    zsection_properties,
)

MAT = MaterialSpec()


def test_channel_properties_hand_calc():
    d, b, t = 3.079, 2.795, 0.0787
    props = channel_properties(d, b, t)
    # web + two flanges, all centerline
    assert props.A == pytest.approx((d + 2 * b) * t, rel=1e-12)
    i_ref = t * d ** 3 / 12 + 2 * b * t * (d / 2) ** 2
    assert props.I == pytest.approx(i_ref, rel=1e-12)
    assert props.S == pytest.approx(2 * i_ref / d, rel=1e-12)


def test_zsection_same_centerline_model():
    # opposite-side flanges do not change A, I, or S about the strong axis
    assert zsection_properties(4.0, 1.5, 0.06) == channel_properties(4.0, 1.5, 0.06)


def test_bad_dimensions_rejected():
    with pytest.raises(SectionError):
        channel_properties(0.0, 1.0, 0.05)
    with pytest.raises(SectionError):
        channel_properties(3.0, 1.0, -0.05)
    with pytest.raises(SectionError):
        channel_properties(1.0, 1.0, 0.6)    # wall thicker than half the depth


def test_unknown_shape():
    with pytest.raises(SectionError):
        properties_for_shape("pipe", 3.0, 1.5, 0.07)


def test_tension_capacity_formula():
    props = channel_properties(3.0, 1.5, 0.07)
    caps = calculate_section_capacities(props, MAT, length_in=192.0)
    assert caps.Pt == pytest.approx(0.9 * props.A * 50.0, rel=1e-12)


def test_compression_euler_governs_long_member():
    props = channel_properties(1.0, 1.0, 0.054)
    length = 4.3 * 12.0
    caps = calculate_section_capacities(props, MAT, length_in=length)
    pe = math.pi ** 2 * 29000.0 * props.I / length ** 2
    assert pe < props.A * 50.0    # slender: Euler below yield
    assert caps.Pc == pytest.approx(0.9 * pe, rel=1e-12)


def test_compression_yield_governs_stub():
    props = channel_properties(3.0, 1.5, 0.07)
    caps = calculate_section_capacities(props, MAT, length_in=6.0)
    assert caps.Pc == pytest.approx(0.9 * props.A * 50.0, rel=1e-12)


def test_k_factor_quarters_euler_load():
    props = channel_properties(1.0, 1.0, 0.054)
    braced = calculate_section_capacities(props, MAT, length_in=200.0,
                                          k_factor=1.0)
    free = calculate_section_capacities(props, MAT, length_in=200.0,
                                        k_factor=2.0)
    assert free.Pc == pytest.approx(braced.Pc / 4.0, rel=1e-12)


def test_bending_first_yield():
    props = channel_properties(4.0, 1.5, 0.06)
    caps = calculate_section_capacities(props, MAT, length_in=96.0)
    assert caps.Mc == pytest.approx(0.9 * props.S * 50.0, rel=1e-12)


def test_direct_mode_returns_overrides_verbatim():
    props = channel_properties(3.0, 1.5, 0.07)
    caps = calculate_section_capacities(
        props, MAT, length_in=192.0, mode="direct",
        overrides={"Pt": 25.69, "Pc": 20.09})
    assert caps.Pt == 25.69
    assert caps.Pc == 20.09
    # Mc not overridden: falls back to the formula
    assert caps.Mc == pytest.approx(0.9 * props.S * 50.0, rel=1e-12)


def test_capacity_errors():
    props = channel_properties(3.0, 1.5, 0.07)
    with pytest.raises(CapacityError):
        calculate_section_capacities(props, MAT, length_in=0.0)
    with pytest.raises(CapacityError):
        calculate_section_capacities(props, MAT, length_in=10.0, mode="direct")
    with pytest.raises(CapacityError):
        calculate_section_capacities(props, MAT, length_in=10.0, mode="guess")
    with pytest.raises(CapacityError):
        calculate_section_capacities(props, MAT, length_in=10.0, mode="direct",
                                     overrides={"Pt": -1.0})


GOLDEN_SPECS = [
    SectionSpec("column", "u_channel", (3.079, 2.795, 0.0787), 16.0),
    SectionSpec("brace", "u_channel", (1.0, 1.0, 0.054), 4.3),
    SectionSpec("beam", "z_section", (4.0, 1.5, 0.06), 8.0),
]


@pytest.fixture(scope="module")
def shipped_config():
    return json.loads(
        data_path("capacity_config.json").read_text(encoding="utf-8"))


def test_build_section_data_calibrated(shipped_config):
    material = MaterialSpec(**shipped_config["material"])
    doc = build_section_data(GOLDEN_SPECS, material, shipped_config["members"])
    assert set(doc) == {"column", "brace", "beam"}
    col = doc["column"]
    assert col["properties"]["A"] == 0.705
    assert col["properties"]["I"] == 1.144
    assert col["capacities"]["Pt"] == 25.69
    assert col["capacities"]["Pc"] == 20.09
    brace = doc["brace"]
    assert brace["properties"]["A"] == 0.162
    assert brace["capacities"]["Pt"] == 7.5
    assert brace["capacities"]["Pc"] == 5.09
    # beams carry no calibration entry values: pure formula path
    beam_props = zsection_properties(4.0, 1.5, 0.06)
    assert doc["beam"]["capacities"]["Mc"] == pytest.approx(
        0.9 * beam_props.S * 50.0, rel=1e-12)


def test_build_section_data_scale(shipped_config):
    material = MaterialSpec(**shipped_config["material"])
    base = build_section_data(GOLDEN_SPECS, material, shipped_config["members"])
    scaled = build_section_data(GOLDEN_SPECS, material,
                                shipped_config["members"], capacity_scale=0.5)
    for member in base:
        for mode in ("Pt", "Pc", "Mc"):
            assert scaled[member]["capacities"][mode] == pytest.approx(
                base[member]["capacities"][mode] * 0.5, rel=1e-12)
    with pytest.raises(CapacityError):
        build_section_data(GOLDEN_SPECS, material, shipped_config["members"],
                           capacity_scale=0.0)


def test_build_section_data_empty_config_uses_formulas():
    doc = build_section_data(GOLDEN_SPECS, MAT, {})
    for spec in GOLDEN_SPECS:
        d, b, t = spec.dims_in
        props = properties_for_shape(spec.shape, d, b, t)
        entry = doc[spec.member]
        assert entry["properties"]["A"] == pytest.approx(props.A, rel=1e-12)
        assert entry["capacities"]["Pt"] == pytest.approx(
            0.9 * props.A * 50.0, rel=1e-12)


dims = st.tuples(st.floats(1.0, 12.0), st.floats(0.5, 6.0),
                 st.floats(0.02, 0.2))


@given(dims)
def test_properties_positive(d_b_t):
    d, b, t = d_b_t
    if t >= min(d, b) / 2:
        with pytest.raises(SectionError):
            channel_properties(d, b, t)
        return
    props = channel_properties(d, b, t)
    assert props.A > 0 and props.I > 0 and props.S > 0


@given(dims, st.floats(12.0, 600.0))
def test_capacities_positive_and_tension_fixed(d_b_t, length):
    d, b, t = d_b_t
    if t >= min(d, b) / 2:
        return
    props = channel_properties(d, b, t)
    caps = calculate_section_capacities(props, MAT, length_in=length)
    assert caps.Pt > 0 and caps.Pc > 0 and caps.Mc > 0
    # compression never exceeds tension for phi_c == phi_t
    assert caps.Pc <= caps.Pt + 1e-12


@given(dims, st.floats(24.0, 300.0), st.floats(24.0, 300.0))
def test_compression_monotone_in_length(d_b_t, l1, l2):
    d, b, t = d_b_t
    if t >= min(d, b) / 2:
        return
    props = channel_properties(d, b, t)
    short, long_ = sorted((l1, l2))
    pc_short = calculate_section_capacities(props, MAT, length_in=short).Pc
    pc_long = calculate_section_capacities(props, MAT, length_in=long_).Pc
    assert pc_long <= pc_short + 1e-12
