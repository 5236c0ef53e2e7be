"""Re-read an emitted package and check the glTF against its own buffers."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
from PIL import Image

from ..errors import Diagnostic, error

_COMPONENTS = {"SCALAR": 1, "VEC2": 2, "VEC3": 3, "VEC4": 4}
_DTYPES = {5120: "<i1", 5121: "<u1", 5122: "<i2", 5123: "<u2", 5125: "<u4", 5126: "<f4"}
UV_EPS = 1e-6


def _read_accessor(doc: dict, buffers: list[bytes], index: int) -> np.ndarray:
    acc = doc["accessors"][index]
    view = doc["bufferViews"][acc["bufferView"]]
    dtype = np.dtype(_DTYPES[acc["componentType"]])
    n = _COMPONENTS[acc["type"]]
    start = view.get("byteOffset", 0) + acc.get("byteOffset", 0)
    stride = view.get("byteStride") or dtype.itemsize * n
    raw = buffers[view["buffer"]]
    count = acc["count"]
    need = start + stride * (count - 1) + dtype.itemsize * n if count else start
    if need > view.get("byteOffset", 0) + view["byteLength"] or need > len(raw):
        raise IndexError(f"accessor {index} reads past its buffer view")
    arr = np.ndarray((count, n), dtype=dtype, buffer=raw, offset=start, strides=(stride, dtype.itemsize))
    return arr.copy()


def validate_gltf_structure(package_dir: str | Path, gltf_name: str = "scene.gltf") -> list[Diagnostic]:
    """Structural checks of an emitted glTF: buffers, accessors, indices, UVs, images.

    Codes: UNREADABLE, BUFFER_LENGTH_MISMATCH, BAD_ACCESSOR, MINMAX_MISMATCH,
    INDEX_OUT_OF_RANGE, UV_OUT_OF_RANGE, MISSING_IMAGE, DANGLING_REFERENCE.
    """
    root = Path(package_dir)
    path = root / gltf_name
    diags: list[Diagnostic] = []
    try:
        doc = json.loads(path.read_bytes())
    except (OSError, ValueError) as exc:
        return [error("UNREADABLE", f"cannot read {path}: {exc}", file=str(path))]

    def bad(code, msg, where=""):
        diags.append(error(code, msg, where, file=str(path)))

    if doc.get("asset", {}).get("version") != "2.0":
        bad("UNREADABLE", "asset.version must be 2.0", "asset")

    buffers: list[bytes] = []
    for i, b in enumerate(doc.get("buffers", [])):
        try:
            data = (root / b["uri"]).read_bytes()
        except (OSError, KeyError) as exc:
            bad("UNREADABLE", f"buffer {i}: {exc}", f"buffers[{i}]")
            data = b""
        if len(data) != b.get("byteLength"):
            bad("BUFFER_LENGTH_MISMATCH",
                f"buffer {i} declares {b.get('byteLength')} bytes, file has {len(data)}", f"buffers[{i}]")
        buffers.append(data)

    for i, v in enumerate(doc.get("bufferViews", [])):
        if v.get("buffer", -1) >= len(buffers):
            bad("DANGLING_REFERENCE", f"bufferView {i} names a missing buffer", f"bufferViews[{i}]")
        elif v.get("byteOffset", 0) + v["byteLength"] > len(buffers[v["buffer"]]):
            bad("BUFFER_LENGTH_MISMATCH", f"bufferView {i} runs past its buffer", f"bufferViews[{i}]")

    accessors: dict[int, np.ndarray] = {}
    for i, acc in enumerate(doc.get("accessors", [])):
        try:
            accessors[i] = _read_accessor(doc, buffers, i)
        except (IndexError, KeyError, ValueError, TypeError) as exc:
            bad("BAD_ACCESSOR", f"accessor {i}: {exc}", f"accessors[{i}]")
            continue
        if "min" in acc or "max" in acc:
            arr = accessors[i]
            if len(arr) and (list(map(float, arr.min(axis=0))) != acc.get("min")
                             or list(map(float, arr.max(axis=0))) != acc.get("max")):
                bad("MINMAX_MISMATCH", f"accessor {i} min/max differ from its data", f"accessors[{i}]")

    n_images = len(doc.get("images", []))
    n_textures = len(doc.get("textures", []))
    n_materials = len(doc.get("materials", []))
    for mi, mesh in enumerate(doc.get("meshes", [])):
        for pi, prim in enumerate(mesh.get("primitives", [])):
            where = f"meshes[{mi}].primitives[{pi}]"
            attrs = prim.get("attributes", {})
            pos_acc = doc.get("accessors", [])[attrs["POSITION"]] if "POSITION" in attrs else None
            if pos_acc is None:
                bad("BAD_ACCESSOR", "primitive has no POSITION", where)
                continue
            if "min" not in pos_acc or "max" not in pos_acc:
                bad("MINMAX_MISMATCH", "POSITION accessor lacks min/max", where)
            n_vertices = pos_acc["count"]
            idx = accessors.get(prim.get("indices"))
            if idx is not None and len(idx) and int(idx.max()) >= n_vertices:
                bad("INDEX_OUT_OF_RANGE", f"index {int(idx.max())} >= vertex count {n_vertices}", where)
            uv = accessors.get(attrs.get("TEXCOORD_0"))
            if uv is not None and len(uv) and (uv.min() < -UV_EPS or uv.max() > 1 + UV_EPS):
                bad("UV_OUT_OF_RANGE", "TEXCOORD_0 leaves [0, 1]", where)
            if "material" in prim and prim["material"] >= n_materials:
                bad("DANGLING_REFERENCE", "primitive names a missing material", where)

    for i, mat in enumerate(doc.get("materials", [])):
        tex = mat.get("pbrMetallicRoughness", {}).get("baseColorTexture", {}).get("index")
        if tex is not None and tex >= n_textures:
            bad("DANGLING_REFERENCE", f"material {i} names missing texture {tex}", f"materials[{i}]")
    for i, t in enumerate(doc.get("textures", [])):
        if t.get("source", -1) >= n_images:
            bad("DANGLING_REFERENCE", f"texture {i} names missing image", f"textures[{i}]")

    for i, img in enumerate(doc.get("images", [])):
        target = root / img.get("uri", "")
        try:
            with Image.open(target) as im:
                im.verify()
        except (OSError, ValueError, SyntaxError) as exc:
            bad("MISSING_IMAGE", f"image {img.get('uri')!r}: {exc}", f"images[{i}]")
    return diags
