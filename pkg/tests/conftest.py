import json
from pathlib import Path

import pytest

from rackcheck.config import PipelineConfig
from rackcheck.datafiles import data_path
from rackcheck.pipeline import run_pipeline

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def golden_text():
    return data_path("problems", "golden.txt").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def golden_truth():
    return json.loads(
        data_path("ground_truth", "golden.json").read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def golden_run(golden_text, tmp_path_factory):
    """One full deterministic run, shared across tests that only read it."""
    out = tmp_path_factory.mktemp("golden_out")
    result = run_pipeline(golden_text, PipelineConfig(), out_dir=out)
    return result, out


@pytest.fixture(scope="session")
def golden_frame(golden_text):
    """Model, geometry, loads, and sections rebuilt component by component,
    bypassing the pipeline. Tests that need an independent path to the same
    frame use this instead of golden_run."""
    from rackcheck.loads import build_load_data, calculate_seismic_loads
    from rackcheck.model_builder import generate_structural_model
    from rackcheck.problem import (adjust_pallet_weights, extract_building_info,
                                   extract_geometry, extract_section_info,
                                   split_problem_description)
    from rackcheck.retrieval import SeismicDatabase
    from rackcheck.sections import MaterialSpec, build_section_data

    dec = split_problem_description(golden_text)
    info = extract_building_info(dec.la_input)
    adjusted = adjust_pallet_weights(info, dec.number_of_bays,
                                     dec.number_of_pallets)
    params = SeismicDatabase().lookup(info.location)
    seismic = calculate_seismic_loads(info.floor_elevations_ft, adjusted, params)
    load_data = build_load_data(info.floor_elevations_ft, adjusted, seismic)

    cap_cfg = json.loads(
        data_path("capacity_config.json").read_text(encoding="utf-8"))
    specs = extract_section_info(dec.sda_input)
    sections = build_section_data(specs, MaterialSpec(**cap_cfg["material"]),
                                  cap_cfg["members"])

    geometry = extract_geometry(dec.saa_input)
    geometry.load_elevations_ft = list(info.floor_elevations_ft)
    model, report = generate_structural_model(geometry, sections, load_data)
    return {"model": model, "report": report, "geometry": geometry,
            "load_data": load_data, "sections": sections}
