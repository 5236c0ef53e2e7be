from __future__ import annotations

import json
import math
import shutil
import struct
from dataclasses import replace

import numpy as np
import pytest

from mural2scene.emitter import (
    IRNode,
    SceneIR,
    build_gltf,
    emit_gltf,
    lower_manifest,
    narrative_targets,
    validate_gltf_structure,
)
from mural2scene.errors import CompileError
from mural2scene.fixtures import foguang_manifest
from mural2scene.geometry import make_billboard_quad, make_cross
from mural2scene.manifest import AxisLock, Bob
from mural2scene.narrative import Edge, RayClick
from mural2scene.pipeline import CompileOptions, compile_manifest, write_package
from mural2scene.slicer import Clip
from mural2scene.values import Placement

from test_acceptance import khronos_issues


def _clip(sid):
    return Clip(sid, np.zeros((50, 40, 4), np.uint8), (0, 0), ((0, 0), (40, 0), (40, 50)), 100.0)


def _ir():
    sprite = make_billboard_quad(_clip("a"), Placement(), AxisLock.SPHERICAL, (Bob(0.2, 4.0),),
                                 uv_rect=(0.0, 0.0, 0.5, 0.5))
    cross = make_cross(_clip("b"), Placement(), uv_rect=(0.5, 0.0, 1.0, 0.5))
    nodes = (
        IRNode("a", (1.0, 0.0, -2.0), (0.0, math.sin(0.25), 0.0, math.cos(0.25)), 1.0, sprite, {"a": 0},
               {"billboard": "Spherical"}),
        IRNode("b", (0.0, 0.0, 0.0), (0.0, 0.0, 0.0, 1.0), 2.0, cross, {"b": 0}),
    )
    return SceneIR("demo", nodes, ("textures/atlas_0.png",), {"units": "meters"})


# -- writer ----------------------------------------------------------------------

def test_build_gltf_layout():
    doc, data = build_gltf(_ir())
    assert doc["asset"]["version"] == "2.0"
    root, a, b = doc["nodes"]
    assert root == {"name": "scene_root", "children": [1, 2], "extras": {"units": "meters"}}
    assert a["translation"] == [1.0, 0.0, -2.0] and "scale" not in a
    assert a["extras"] == {"billboard": "Spherical"}
    assert b["scale"] == [2.0, 2.0, 2.0] and "translation" not in b and "rotation" not in b
    # a one-sided blended sprite and a double-sided cross need two materials
    assert [m["doubleSided"] for m in doc["materials"]] == [False, True]
    assert all(m["alphaMode"] == "BLEND" for m in doc["materials"])
    assert doc["buffers"][0]["byteLength"] == len(data) and len(data) % 4 == 0
    for v in doc["bufferViews"]:
        assert v["byteOffset"] % 4 == 0


def test_build_gltf_is_deterministic():
    first = emit_gltf(_ir())
    assert first == emit_gltf(_ir())
    assert set(first) == {"scene.gltf", "scene.bin"}
    json.loads(first["scene.gltf"])


def test_position_bounds_are_exact_float32():
    doc, data = build_gltf(_ir())
    acc = doc["accessors"][doc["meshes"][0]["primitives"][0]["attributes"]["POSITION"]]
    view = doc["bufferViews"][acc["bufferView"]]
    pos = np.frombuffer(data, "<f4", acc["count"] * 3, view["byteOffset"]).reshape(-1, 3)
    assert acc["min"] == [float(v) for v in pos.min(axis=0)]
    assert acc["max"] == [float(v) for v in pos.max(axis=0)]


def test_empty_scene_has_no_buffer():
    files = emit_gltf(SceneIR("void", (), ()))
    assert set(files) == {"scene.gltf"}
    doc = json.loads(files["scene.gltf"])
    assert "buffers" not in doc and doc["nodes"] == [{"name": "scene_root"}]


# -- IR --------------------------------------------------------------------------

def test_narrative_targets_of_the_fixture():
    t = narrative_targets(foguang_manifest(60))
    assert t["aperture"] == ["cave"]
    assert t["official"] == ["talk_official"]
    assert t["broom"] == ["clean_hall"]
    assert "monk" in t and "talk_monk" in t["monk"]
    assert "mountain_1" not in t


def test_lower_refuses_unbound_targets():
    m = foguang_manifest(60)
    g = replace(m.narrative, edges=m.narrative.edges + (Edge("cave", "talk_monk", RayClick("ghost")),))
    with pytest.raises(CompileError) as exc:
        lower_manifest(replace(m, narrative=g), {}, {}, ())
    assert exc.value.code == "UNBOUND_TARGET"


# -- compiled package ------------------------------------------------------------

@pytest.fixture(scope="module")
def package(small_fixture, tmp_path_factory):
    result = compile_manifest(small_fixture, CompileOptions())
    assert result.ok, [str(d) for d in result.diagnostics]
    out = tmp_path_factory.mktemp("package")
    write_package(result, out)
    return out


@pytest.fixture
def copy(package, tmp_path):
    dst = tmp_path / "pkg"
    shutil.copytree(package, dst)
    return dst


def test_package_is_structurally_clean(package):
    assert validate_gltf_structure(package) == []
    doc = json.loads((package / "scene.gltf").read_text())
    names = [n["name"] for n in doc["nodes"]]
    assert names[0] == "scene_root" and names[1:] == sorted(names[1:])
    extras = doc["nodes"][0]["extras"]
    assert extras["narrative"] == "narrative.json"
    assert all((package / uri).exists() for uri in extras["skybox"].values())
    by_name = {n["name"]: n for n in doc["nodes"]}
    assert by_name["cloud"]["extras"]["billboard"] == "Spherical"
    assert by_name["cloud"]["extras"]["effects"][0]["type"] == "Bob"
    assert by_name["official"]["extras"]["narrative_target"] == ["talk_official"]
    assert "billboard" not in by_name["rock"].get("extras", {})


def test_package_loads_in_pygltflib(package):
    from pygltflib import GLTF2

    g = GLTF2().load(str(package / "scene.gltf"))
    assert g.scenes[g.scene].nodes == [0]
    assert len(g.nodes) == len(g.meshes) + 1
    assert g.buffers[0].byteLength == (package / "scene.bin").stat().st_size


def test_package_passes_khronos_validator(package):
    issues = khronos_issues(package / "scene.gltf")
    if issues is None:
        pytest.skip("node or gltf-validator not installed")
    assert issues["numErrors"] == 0, issues["messages"]


def _accessor_offset(doc, index):
    acc = doc["accessors"][index]
    return doc["bufferViews"][acc["bufferView"]]["byteOffset"] + acc.get("byteOffset", 0)


def _poke(pkg, offset, raw):
    data = bytearray((pkg / "scene.bin").read_bytes())
    data[offset:offset + len(raw)] = raw
    (pkg / "scene.bin").write_bytes(bytes(data))


def _codes(pkg):
    return {d.code for d in validate_gltf_structure(pkg)}


def test_truncated_buffer_is_caught(copy):
    data = (copy / "scene.bin").read_bytes()
    (copy / "scene.bin").write_bytes(data[: len(data) // 2])
    assert {"BUFFER_LENGTH_MISMATCH", "BAD_ACCESSOR"} <= _codes(copy)


def test_bad_index_uv_and_position_are_caught(copy):
    doc = json.loads((copy / "scene.gltf").read_text())
    prim = doc["meshes"][0]["primitives"][0]
    _poke(copy, _accessor_offset(doc, prim["indices"]), struct.pack("<H", 60000))
    _poke(copy, _accessor_offset(doc, prim["attributes"]["TEXCOORD_0"]), struct.pack("<f", 3.0))
    _poke(copy, _accessor_offset(doc, prim["attributes"]["POSITION"]), struct.pack("<f", 1e6))
    assert _codes(copy) == {"INDEX_OUT_OF_RANGE", "UV_OUT_OF_RANGE", "MINMAX_MISMATCH"}


def test_missing_image_and_dangling_references_are_caught(copy):
    (copy / "textures" / "atlas_0.png").unlink()
    doc = json.loads((copy / "scene.gltf").read_text())
    doc["meshes"][0]["primitives"][0]["material"] = 99
    doc["textures"][0]["source"] = 99
    (copy / "scene.gltf").write_text(json.dumps(doc))
    assert _codes(copy) == {"MISSING_IMAGE", "DANGLING_REFERENCE"}


def test_unreadable_document(copy):
    (copy / "scene.gltf").write_text("{not json")
    assert _codes(copy) == {"UNREADABLE"}
    assert _codes(copy / "nowhere") == {"UNREADABLE"}
