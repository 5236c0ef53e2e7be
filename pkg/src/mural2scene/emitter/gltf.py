"""glTF 2.0 writer (separate .gltf JSON plus one .bin buffer).

Meters, +Y up, right-handed. Materials are unlit; sprites blend, buildings
are opaque. Output bytes depend only on the IR.
"""

from __future__ import annotations

import json

import numpy as np

from .ir import ROOT_NAME, SceneIR

FLOAT = 5126
USHORT = 5123
UINT = 5125
ARRAY_BUFFER = 34962
ELEMENT_ARRAY_BUFFER = 34963
LINEAR = 9729
CLAMP = 33071
UNLIT = "KHR_materials_unlit"
BIN_URI = "scene.bin"


class _Buffer:
    def __init__(self):
        self.data = bytearray()
        self.views: list[dict] = []
        self.accessors: list[dict] = []

    def _view(self, raw: bytes, target: int) -> int:
        pad = (-len(self.data)) % 4
        self.data += b"\0" * pad
        self.views.append({"buffer": 0, "byteOffset": len(self.data), "byteLength": len(raw),
                           "target": target})
        self.data += raw
        return len(self.views) - 1

    def vec(self, arr: np.ndarray, kind: str, with_bounds: bool) -> int:
        a = np.ascontiguousarray(arr, dtype="<f4")
        acc = {"bufferView": self._view(a.tobytes(), ARRAY_BUFFER), "componentType": FLOAT,
               "count": len(a), "type": kind}
        if with_bounds:
            acc["min"] = [float(v) for v in a.min(axis=0)]
            acc["max"] = [float(v) for v in a.max(axis=0)]
        self.accessors.append(acc)
        return len(self.accessors) - 1

    def indices(self, tris: np.ndarray, vertex_count: int) -> int:
        flat = tris.reshape(-1)
        if vertex_count <= 0xFFFF:
            raw, ctype = flat.astype("<u2").tobytes(), USHORT
        else:
            raw, ctype = flat.astype("<u4").tobytes(), UINT
        self.accessors.append({"bufferView": self._view(raw, ELEMENT_ARRAY_BUFFER),
                               "componentType": ctype, "count": int(flat.size), "type": "SCALAR"})
        return len(self.accessors) - 1


def build_gltf(ir: SceneIR) -> tuple[dict, bytes]:
    """The glTF JSON document and its binary buffer."""
    buf = _Buffer()
    materials: list[dict] = []
    material_index: dict[tuple, int] = {}
    meshes: list[dict] = []
    nodes: list[dict] = [{"name": ROOT_NAME}]
    if ir.nodes:
        nodes[0]["children"] = list(range(1, len(ir.nodes) + 1))
    if ir.extras:
        nodes[0]["extras"] = ir.extras

    for node in ir.nodes:
        prims = []
        for p in node.mesh.primitives:
            atlas = node.atlas_of[p.slice_id]
            key = (atlas, p.material.alpha_blend, p.material.double_sided)
            if key not in material_index:
                mat = {
                    "name": f"atlas{atlas}_{'blend' if key[1] else 'opaque'}"
                            f"{'_2s' if key[2] else ''}",
                    "pbrMetallicRoughness": {"baseColorTexture": {"index": atlas},
                                             "metallicFactor": 0.0, "roughnessFactor": 1.0},
                    "alphaMode": "BLEND" if key[1] else "OPAQUE",
                    "doubleSided": key[2],
                    "extensions": {UNLIT: {}},
                }
                material_index[key] = len(materials)
                materials.append(mat)
            prims.append({
                "attributes": {"POSITION": buf.vec(p.positions, "VEC3", True),
                               "TEXCOORD_0": buf.vec(p.uvs, "VEC2", False)},
                "indices": buf.indices(p.triangles, len(p.positions)),
                "material": material_index[key],
                "mode": 4,
            })
        meshes.append({"name": node.name, "primitives": prims})
        entry = {"name": node.name, "mesh": len(meshes) - 1}
        if any(node.translation):
            entry["translation"] = list(node.translation)
        if node.rotation != (0.0, 0.0, 0.0, 1.0):
            entry["rotation"] = list(node.rotation)
        if node.scale != 1.0:
            entry["scale"] = [node.scale] * 3
        if node.extras:
            entry["extras"] = node.extras
        nodes.append(entry)

    doc = {
        "asset": {"version": "2.0", "generator": "mural2scene"},
        "extensionsUsed": [UNLIT],
        "scene": 0,
        "scenes": [{"name": ir.scene_id, "nodes": [0]}],
        "nodes": nodes,
        "meshes": meshes,
        "materials": materials,
        "textures": [{"sampler": 0, "source": i} for i in range(len(ir.atlas_uris))],
        "images": [{"uri": uri} for uri in ir.atlas_uris],
        "samplers": [{"magFilter": LINEAR, "minFilter": LINEAR, "wrapS": CLAMP, "wrapT": CLAMP}]
        if ir.atlas_uris else [],
        "buffers": [{"uri": BIN_URI, "byteLength": 0}],
        "bufferViews": buf.views,
        "accessors": buf.accessors,
    }
    data = bytes(buf.data) + b"\0" * ((-len(buf.data)) % 4)
    doc["buffers"][0]["byteLength"] = len(data)
    for key in ("meshes", "materials", "textures", "images", "samplers", "bufferViews",
                "accessors"):
        if not doc[key]:
            del doc[key]
    if not buf.views:
        del doc["buffers"]
        data = b""
    return doc, data


def emit_gltf(ir: SceneIR) -> dict[str, bytes]:
    """File name -> bytes for scene.gltf and (when there is geometry) scene.bin."""
    doc, data = build_gltf(ir)
    text = json.dumps(doc, indent=2, ensure_ascii=False, allow_nan=False) + "\n"
    files = {"scene.gltf": text.encode("utf-8")}
    if data:
        files[BIN_URI] = data
    return files

