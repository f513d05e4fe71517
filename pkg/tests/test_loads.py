"""Equivalent lateral force procedure: spectrum, base shear, distribution."""

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rackcheck.errors import DegenerateDistribution, InputError
from rackcheck.loads import (
    FT_PER_M,
    ElfConfig,
    LoadData,
    build_load_data,
    calculate_seismic_loads,
    design_spectral_acceleration,
    estimate_period,
)
from rackcheck.retrieval import SeismicParameters

NANAIMO = SeismicParameters(Sa_02=1.02, Sa_05=0.942, Sa_10=0.037,
                            Sa_20=0.328, PGA=0.446, PGV=0.684)

GOLDEN_ELEVS = [4.0, 8.5, 13.0]
GOLDEN_ADJUSTED = [1875.0, 1125.0, 750.0]


def elf_by_hand(elevs, loads_lbs, sa, rd_ro=2.7):
    """Straight transcription of the procedure, kept separate from the
    implementation on purpose."""
    weights = [w / 1000.0 for w in loads_lbs]
    cs = sa / rd_ro
    v = cs * math.fsum(weights)
    wh = [w * h for w, h in zip(weights, elevs)]
    return v, [v * x / math.fsum(wh) for x in wh]


def test_golden_forces_match_hand_calc():
    result = calculate_seismic_loads(GOLDEN_ELEVS, GOLDEN_ADJUSTED, NANAIMO)
    v_ref, forces_ref = elf_by_hand(GOLDEN_ELEVS, GOLDEN_ADJUSTED, 1.02)
    assert result.base_shear_kip == pytest.approx(v_ref, rel=1e-12)
    assert result.forces_kip == pytest.approx(forces_ref, rel=1e-12)


def test_golden_reference_magnitudes():
    result = calculate_seismic_loads(GOLDEN_ELEVS, GOLDEN_ADJUSTED, NANAIMO)
    assert result.forces_kip == pytest.approx([0.395, 0.504, 0.514], rel=0.01)
    assert result.base_shear_kip == pytest.approx(1.413, rel=0.01)
    assert result.cs == pytest.approx(1.02 / 2.7, rel=1e-12)
    assert result.sa_used == 1.02
    assert result.weights_kip == [1.875, 1.125, 0.75]
    assert result.period_s is None    # plateau rule


def test_forces_partition_base_shear_exactly():
    result = calculate_seismic_loads(GOLDEN_ELEVS, GOLDEN_ADJUSTED, NANAIMO)
    assert math.fsum(result.forces_kip) == pytest.approx(
        result.base_shear_kip, rel=1e-12)


def test_period_estimate():
    h_m = 16.0 / FT_PER_M
    assert estimate_period(16.0) == pytest.approx(0.05 * h_m ** 0.75, rel=1e-12)


def test_spectrum_plateau_rule():
    sa, period = design_spectral_acceleration(NANAIMO, ElfConfig())
    assert sa == NANAIMO.Sa_02
    assert period is None


def test_spectrum_formula_short_rack_clamps_to_plateau():
    cfg = ElfConfig(period_rule="formula")
    sa, period = design_spectral_acceleration(NANAIMO, cfg, height_ft=16.0)
    # a 16 ft rack has Ta well under 0.2 s
    assert period < 0.2
    assert sa == NANAIMO.Sa_02


def test_spectrum_formula_interpolates_log_period():
    cfg = ElfConfig(period_rule="formula")
    # pick a height whose period lands between 0.2 and 0.5 s
    height = 40.0
    t = estimate_period(height)
    assert 0.2 < t < 0.5
    sa, period = design_spectral_acceleration(NANAIMO, cfg, height_ft=height)
    w = (math.log(t) - math.log(0.2)) / (math.log(0.5) - math.log(0.2))
    assert sa == pytest.approx(
        NANAIMO.Sa_02 + w * (NANAIMO.Sa_05 - NANAIMO.Sa_02), rel=1e-12)
    assert period == pytest.approx(t, rel=1e-12)


def test_spectrum_formula_long_period_clamps():
    cfg = ElfConfig(period_rule="formula")
    sa, period = design_spectral_acceleration(NANAIMO, cfg, height_ft=5000.0)
    assert period > 2.0
    assert sa == NANAIMO.Sa_20


def test_spectrum_bad_config():
    with pytest.raises(InputError):
        design_spectral_acceleration(NANAIMO, ElfConfig(period_rule="guess"))
    with pytest.raises(InputError):
        design_spectral_acceleration(NANAIMO, ElfConfig(period_rule="formula"))


def test_input_validation():
    with pytest.raises(InputError):
        calculate_seismic_loads([], [], NANAIMO)
    with pytest.raises(InputError):
        calculate_seismic_loads([4.0, 8.5], [1000.0], NANAIMO)
    with pytest.raises(InputError):
        calculate_seismic_loads([8.5, 4.0], [1000.0, 1000.0], NANAIMO)
    with pytest.raises(InputError):
        calculate_seismic_loads([4.0, 8.5], [1000.0, -1.0], NANAIMO)


def test_zero_weights_degenerate():
    with pytest.raises(DegenerateDistribution):
        calculate_seismic_loads([4.0, 8.5], [0.0, 0.0], NANAIMO)


def test_build_load_data_golden():
    seismic = calculate_seismic_loads(GOLDEN_ELEVS, GOLDEN_ADJUSTED, NANAIMO)
    data = build_load_data(GOLDEN_ELEVS, GOLDEN_ADJUSTED, seismic)
    assert [e for e, _ in data.live] == GOLDEN_ELEVS
    assert [f for _, f in data.live] == [1.875, 1.125, 0.75]
    assert [f for _, f in data.seismic] == seismic.forces_kip
    assert data.base_shear_kip == seismic.base_shear_kip


def test_build_load_data_misalignment():
    seismic = calculate_seismic_loads(GOLDEN_ELEVS, GOLDEN_ADJUSTED, NANAIMO)
    with pytest.raises(InputError):
        build_load_data([4.0, 8.5], [1875.0, 1125.0], seismic)
    with pytest.raises(InputError):
        build_load_data(GOLDEN_ELEVS, [1.0, 2.0], seismic)


def test_load_data_document_round_trip():
    seismic = calculate_seismic_loads(GOLDEN_ELEVS, GOLDEN_ADJUSTED, NANAIMO)
    data = build_load_data(GOLDEN_ELEVS, GOLDEN_ADJUSTED, seismic)
    doc = data.to_document()
    assert LoadData.from_document(doc) == data
    assert set(doc) == {"seismic", "live", "base_shear_kip"}


levels = st.integers(2, 6).flatmap(
    lambda n: st.tuples(
        st.lists(st.floats(1.0, 5.0), min_size=n, max_size=n),
        st.lists(st.floats(100.0, 5000.0), min_size=n, max_size=n),
    ))


def _cumulative(spacings):
    out, total = [], 0.0
    for s in spacings:
        total += s
        out.append(total)
    return out


@given(levels)
def test_partition_property(pair):
    spacings, loads = pair
    elevs = _cumulative(spacings)
    result = calculate_seismic_loads(elevs, loads, NANAIMO)
    assert math.fsum(result.forces_kip) == pytest.approx(
        result.base_shear_kip, rel=1e-12, abs=1e-15)
    assert all(f >= 0 for f in result.forces_kip)


@given(levels, st.floats(0.5, 4.0))
def test_distribution_scales_linearly(pair, factor):
    spacings, loads = pair
    elevs = _cumulative(spacings)
    base = calculate_seismic_loads(elevs, loads, NANAIMO)
    scaled = calculate_seismic_loads(elevs, [w * factor for w in loads], NANAIMO)
    assert scaled.base_shear_kip == pytest.approx(
        base.base_shear_kip * factor, rel=1e-9)
    for f0, f1 in zip(base.forces_kip, scaled.forces_kip):
        assert f1 == pytest.approx(f0 * factor, rel=1e-9, abs=1e-15)


@given(levels)
def test_forces_track_weight_height_product(pair):
    spacings, loads = pair
    elevs = _cumulative(spacings)
    result = calculate_seismic_loads(elevs, loads, NANAIMO)
    wh = [w * h for w, h in zip(result.weights_kip, elevs)]
    order = sorted(range(len(wh)), key=lambda i: wh[i])
    forces_sorted = [result.forces_kip[i] for i in order]
    assert forces_sorted == sorted(result.forces_kip)
