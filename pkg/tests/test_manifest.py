from __future__ import annotations

import json
import math
from dataclasses import replace

import numpy as np
import pytest
import yaml
from hypothesis import given, settings
from hypothesis import strategies as st

from mural2scene.fixtures import foguang_manifest
from mural2scene.manifest import (
    AxisLock,
    Bob,
    FaceToEye,
    PanoramaSpec,
    SceneKind,
    SceneManifest,
    SkyboxSpec,
    locate,
    parse_manifest,
    serialize_manifest,
    source_size_issues,
    validate_manifest,
)
from mural2scene.values import InvalidField, Placement

from generators import random_manifest

MINIMAL = """\
schema_version: 1
scene_id: cave
scene_kind: Panorama
sources:
  - {source_id: wall, image: wall.png, physical_width_m: 0.254, physical_height_m: 0.254, dpi: 100}
slices:
  - slice_id: buddha
    source_id: wall
    mask: [[10, 10], [90, 10], [90, 90], [10, 90]]
    transfer: {type: FaceToEye}
    placement: {position: [0, 0, -3]}
panorama: {image: pano.png, face_size_px: 256}
"""


def codes(result):
    assert isinstance(result, list), result
    return [d.code for d in result]


def test_minimal_manifest_parses_with_defaults():
    m = parse_manifest(MINIMAL)
    assert isinstance(m, SceneManifest)
    assert m.scene_kind is SceneKind.PANORAMA
    s = m.slice("buddha")
    assert s.transfer == FaceToEye(AxisLock.CYLINDRICAL)
    assert s.placement == Placement((0.0, 0.0, -3.0))
    assert m.feather_px == 1
    assert m.source("wall").expected_pixel_size() == (1000, 1000)


def test_cloud_tag_defaults_to_spherical():
    text = MINIMAL.replace("placement: {position: [0, 0, -3]}",
                           "placement: {position: [0, 0, -3]}\n    tags: [cloud]")
    assert parse_manifest(text).slice("buddha").transfer.axis_lock is AxisLock.SPHERICAL


def test_json_documents_are_accepted():
    m = parse_manifest(MINIMAL)
    as_json = json.dumps(yaml.safe_load(MINIMAL))
    assert parse_manifest(as_json) == m


def test_unresolved_source_is_located():
    text = MINIMAL.replace("source_id: wall\n    mask", "source_id: floor\n    mask")
    diags = parse_manifest(text, file="cave.scene")
    assert codes(diags) == ["UNRESOLVED_SOURCE"]
    d = diags[0]
    assert (d.line, d.column) == (8, 16)
    assert d.file == "cave.scene"
    assert str(d).startswith("ERROR UNRESOLVED_SOURCE cave.scene:8:16 slices[0].source_id:")


@pytest.mark.parametrize("text, code", [
    ("", "EMPTY_DOCUMENT"),
    ("a: [1, 2", "SYNTAX_ERROR"),
    ("a: 1\n---\nb: 2\n", "SYNTAX_ERROR"),
    ("a: &x 1\nb: *x\n", "ALIAS_NOT_ALLOWED"),
    ("[" * 100 + "]" * 100, "NESTING_TOO_DEEP"),
    ("- 1\n- 2\n", "TYPE_ERROR"),
])
def test_document_level_errors(text, code):
    diags = parse_manifest(text)
    assert code in codes(diags)
    assert all(d.line is not None and d.column is not None for d in diags)


def test_invalid_utf8_is_a_located_error():
    diags = parse_manifest(b"scene_id: caf\xe9\n")
    assert codes(diags) == ["ENCODING_ERROR"]
    assert (diags[0].line, diags[0].column) == (1, 14)


def test_missing_and_unknown_fields():
    text = MINIMAL.replace("scene_id: cave\n", "").replace("dpi: 100}", "dpi: 100, colour: red}")
    found = codes(parse_manifest(text))
    assert "MISSING_FIELD" in found
    assert "UNKNOWN_FIELD" in found


def test_bad_values_are_reported_per_field():
    text = MINIMAL.replace("dpi: 100", "dpi: -5").replace("face_size_px: 256", "face_size_px: 300")
    diags = parse_manifest(text)
    paths = {d.path for d in diags}
    assert "sources[0].dpi" in paths
    assert "panorama.face_size_px" in paths


def test_unknown_variant_tag():
    diags = parse_manifest(MINIMAL.replace("{type: FaceToEye}", "{type: Hologram}"))
    assert codes(diags) == ["INVALID_VALUE"]
    assert diags[0].path == "slices[0].transfer.type"


def test_parse_without_validation_keeps_cross_reference_errors_for_later():
    text = MINIMAL.replace("source_id: wall\n    mask", "source_id: floor\n    mask")
    m = parse_manifest(text, validate=False)
    assert isinstance(m, SceneManifest)
    assert codes(validate_manifest(m)) == ["UNRESOLVED_SOURCE"]


def test_locate_falls_back_to_ancestors():
    m = parse_manifest(MINIMAL)
    assert locate(m, "slices[0].source_id") == (8, 16)
    assert locate(m, "slices[0].effects") == locate(m, "slices[0]")


# -- cross-entity validation -------------------------------------------------------

@pytest.fixture
def fog():
    return foguang_manifest(60)


def test_fixture_is_clean(fog):
    assert validate_manifest(fog) == []


def test_duplicate_ids_share_one_namespace(fog):
    s = fog.slices
    m = replace(fog, slices=s + (replace(s[2], slice_id="east_hall"),))
    assert "DUPLICATE_ID" in codes(validate_manifest(m))


def test_mask_out_of_bounds_and_degenerate_and_self_intersecting(fog):
    s = list(fog.slices)
    s[2] = replace(s[2], mask=((0, 0), (5000, 0), (5000, 10)))
    s[3] = replace(s[3], mask=((0, 0), (10, 10), (20, 20)))
    s[4] = replace(s[4], mask=((0, 0), (30, 0), (0, 20), (10, 20)))  # bow tie
    found = codes(validate_manifest(replace(fog, slices=tuple(s))))
    assert {"MASK_OUT_OF_BOUNDS", "MASK_DEGENERATE", "MASK_NOT_SIMPLE"} <= set(found)


def test_band_effects_and_missing_placement(fog):
    s = list(fog.slices)
    band = next(i for i, x in enumerate(s) if x.slice_id == "mountain_1")
    s[band] = replace(s[band], effects=(Bob(1.0, 2.0),))
    s[2] = replace(s[2], placement=None)
    found = codes(validate_manifest(replace(fog, slices=tuple(s))))
    assert "BAND_WITH_EFFECTS" in found
    assert "MISSING_PLACEMENT" in found


def test_architecture_references(fog):
    s = list(fog.slices)
    s[0] = replace(s[0], transfer=FaceToEye(), placement=Placement())
    found = codes(validate_manifest(replace(fog, slices=tuple(s))))
    assert "TRANSFER_MISMATCH" in found
    a = fog.architectures[0]
    storey = replace(a.storeys[0], wall_slice_id="nowhere")
    found = codes(validate_manifest(replace(fog, architectures=(replace(a, storeys=(storey,)),))))
    assert "UNRESOLVED_SOURCE" in found


def test_sky_rules(fog):
    assert "MISSING_SKYBOX" in codes(validate_manifest(replace(fog, skybox=None)))
    both = replace(fog, panorama=PanoramaSpec("p.png"))
    assert "CONFLICTING_SKY" in codes(validate_manifest(both))
    no_band = replace(fog, skybox=SkyboxSpec((), 256, 0.3))
    assert "MISSING_HORIZON" in codes(validate_manifest(no_band))
    wrong = replace(fog, skybox=SkyboxSpec(("official",), 256, 0.3))
    assert "TRANSFER_MISMATCH" in codes(validate_manifest(wrong))


def test_narrative_diagnostics_are_prefixed(fog):
    g = fog.narrative
    bad = replace(g, start_node="nowhere")
    diags = validate_manifest(replace(fog, narrative=bad))
    assert any(d.code == "DANGLING_NODE" and d.path.startswith("narrative.") for d in diags)


def test_source_size_tolerance(fog):
    w, h = fog.sources[0].expected_pixel_size()
    assert source_size_issues(fog, {"east_wall": (w, h)}) == []
    assert source_size_issues(fog, {"east_wall": (int(w * 1.04), h)}) == []
    assert codes(source_size_issues(fog, {"east_wall": (int(w * 1.06), h)})) == ["SOURCE_SIZE_MISMATCH"]


def test_placement_normalizes_yaw_and_rejects_bad_scale():
    assert Placement(yaw=3 * math.pi).yaw == -math.pi
    assert Placement(yaw=math.pi).yaw == -math.pi
    assert Placement(yaw=-math.pi).yaw == -math.pi
    assert Placement(yaw=7.0).yaw == pytest.approx(7.0 - 2 * math.pi)
    with pytest.raises(InvalidField):
        Placement(scale=0.0)


# -- round trip --------------------------------------------------------------------

def test_fixture_round_trips_exactly(fog):
    text = serialize_manifest(fog)
    back = parse_manifest(text)
    assert back == fog
    assert serialize_manifest(back) == text


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_random_manifests_round_trip(seed):
    m = random_manifest(np.random.default_rng(seed))
    text = serialize_manifest(m)
    assert parse_manifest(text) == m


@settings(max_examples=300, deadline=None)
@given(st.binary(max_size=300) | st.text(max_size=300))
def test_parser_is_total(data):
    out = parse_manifest(data)
    if isinstance(out, list):
        assert out and all(d.is_error or d.line is not None for d in out)
        assert all(d.line is not None and d.column is not None for d in out)
