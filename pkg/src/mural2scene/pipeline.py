"""Manifest -> scene package. Everything is built in memory and written only on success."""

from __future__ import annotations

import io
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import CompileError, Diagnostic, error, has_errors, warning
from .geometry.architecture import make_architecture
from .geometry.billboard import make_billboard_quad
from .geometry.cross import make_cross
from .geometry.mesh import Mesh
from .geometry.projection import projection_match_check
from .geometry.skybox import contact_sheet, make_skybox, max_seam_difference, panorama_to_cubemap
from .emitter.gltf import emit_gltf
from .emitter.ir import lower_manifest
from .manifest.model import ArchitectureRef, Cross, FaceToEye, SceneManifest
from .manifest.parse import parse_manifest
from .manifest.validate import locate, source_size_issues, validate_manifest
from .narrative.enumerate import enumerate_completions
from .narrative.runtime import compile_narrative
from .slicer.atlas import DEFAULT_MAX_SIDE, DEFAULT_PADDING, pack_atlas
from .slicer.matte import Clip, extract_clip
from .slicer.source import SourceImage, load_source

THREADS_ENV = "MURAL2SCENE_THREADS"
TEX_DIR = "textures"
SKY_DIR = "sky"


@dataclass(frozen=True)
class CompileOptions:
    downsample: int = 1
    seed: int | None = None  # overrides the skybox rhythm seed
    strict: bool = False  # warnings abort too
    max_side_px: int = DEFAULT_MAX_SIDE
    padding_px: int = DEFAULT_PADDING


@dataclass
class CompileResult:
    diagnostics: list[Diagnostic]
    files: dict[str, bytes] = field(default_factory=dict)
    report: str = ""
    io_error: bool = False

    @property
    def ok(self) -> bool:
        return bool(self.files)


def worker_count() -> int:
    cap = os.environ.get(THREADS_ENV)
    n = os.cpu_count() or 1
    if cap and cap.isdigit() and int(cap) > 0:
        n = min(n, int(cap))
    return max(1, n)


def png_bytes(pixels: np.ndarray) -> bytes:
    buf = io.BytesIO()
    Image.fromarray(np.ascontiguousarray(pixels, dtype=np.uint8)).save(buf, format="PNG",
                                                                       compress_level=6)
    return buf.getvalue()


def _fail(diags, code: str, exc: CompileError, m: SceneManifest | None, file: str | None,
          path: str = "") -> CompileResult:
    line, col = locate(m, path) if m is not None and path else (None, None)
    diags = list(diags) + [error(code, exc.message, path, line=line, column=col, file=file)]
    diags += [d.located(file) for d in exc.diagnostics]
    return CompileResult(diags)


def load_manifest(path: str | Path) -> SceneManifest | list[Diagnostic]:
    p = Path(path)
    try:
        data = p.read_bytes()
    except OSError as exc:
        raise CompileError("IO_ERROR", f"cannot read {p}: {exc}") from exc
    return parse_manifest(data, file=str(p), validate=False)


def compile_manifest(path: str | Path, options: CompileOptions = CompileOptions()) -> CompileResult:
    """Compile the manifest at ``path``; nothing touches the disk except reads."""
    path = Path(path)
    file = str(path)
    base = path.parent
    try:
        parsed = load_manifest(path)
    except CompileError as exc:
        return CompileResult([error(exc.code, exc.message, file=file)], io_error=True)
    if not isinstance(parsed, SceneManifest):
        return CompileResult(parsed)
    m = parsed
    if options.seed is not None and m.skybox is not None:
        m = replace(m, skybox=replace(m.skybox, rhythm_seed=options.seed))
        m.locations.update(parsed.locations)

    used = sorted({s.source_id for s in m.slices if m.source(s.source_id)})
    pool = ThreadPoolExecutor(max_workers=worker_count())
    try:
        loaded: dict[str, SourceImage] = {}
        try:
            for sid, img in zip(used, pool.map(
                    lambda sid: load_source(m.source(sid), base, options.downsample), used)):
                loaded[sid] = img
        except CompileError as exc:
            return CompileResult([error(exc.code, exc.message, file=file)], io_error=True)

        sizes = {sid: img.original_size for sid, img in loaded.items()}
        diags = [d.located(file) for d in validate_manifest(m, sizes)]
        # validate_manifest locates its findings; size issues are located here
        diags += [error(d.code, d.message, d.path, line=locate(m, d.path)[0],
                        column=locate(m, d.path)[1], file=file)
                  for d in source_size_issues(m, sizes)]
        if has_errors(diags) or (options.strict and diags):
            return CompileResult(diags)

        def cut(spec):
            return spec.slice_id, extract_clip(loaded[spec.source_id], spec, m.feather_px)

        try:
            clips: dict[str, Clip] = dict(pool.map(cut, m.slices))
        except CompileError as exc:
            return _fail(diags, exc.code, exc, m, file)
    finally:
        pool.shutdown()

    textured = [clips[s.slice_id] for s in m.slices
                if isinstance(s.transfer, (FaceToEye, Cross, ArchitectureRef))]
    try:
        atlases = pack_atlas(textured, options.max_side_px, options.padding_px)
    except CompileError as exc:
        return _fail(diags, exc.code, exc, m, file)
    atlas_of = {sid: a.atlas_id for a in atlases for sid in a.entries}
    uv_of = {sid: rect for a in atlases for sid, rect in a.entries.items()}
    atlas_uris = tuple(f"{TEX_DIR}/atlas_{a.atlas_id}.png" for a in atlases)

    report = [f"scene {m.scene_id} ({m.scene_kind.value})",
              f"downsample {options.downsample}"]
    meshes: dict[str, Mesh] = {}
    for s in m.placed_slices():
        clip = clips[s.slice_id]
        if isinstance(s.transfer, FaceToEye):
            meshes[s.slice_id] = make_billboard_quad(clip, s.placement, s.transfer.axis_lock,
                                                     s.effects, uv_of[s.slice_id])
        else:
            meshes[s.slice_id] = make_cross(clip, s.placement, uv_of[s.slice_id])
    for i, a in enumerate(m.architectures):
        try:
            mesh = make_architecture(a, clips, uv_of)
        except CompileError as exc:
            return _fail(diags, exc.code, exc, m, file, f"architectures[{i}]")
        meshes[a.arch_id] = mesh
        if a.calibration is not None:
            try:
                score = projection_match_check(mesh, a.calibration)
            except CompileError as exc:
                return _fail(diags, exc.code, exc, m, file, f"architectures[{i}].calibration")
            report.append(f"architecture {a.arch_id}: projection IoU {score:.4f} "
                          f"(threshold {a.match_threshold})")
            if score < a.match_threshold:
                line, col = locate(m, f"architectures[{i}].calibration")
                diags.append(warning("PROJECTION_MISMATCH",
                                     f"projection IoU {score:.3f} is below {a.match_threshold}",
                                     f"architectures[{i}].calibration", line=line, column=col,
                                     file=file))

    files: dict[str, bytes] = {}
    sky_faces = None
    try:
        if m.skybox is not None:
            band = {sid: clips[sid] for sid in m.skybox.horizon_slices if sid in clips}
            sky_faces = make_skybox(m.skybox, band)
        elif m.panorama is not None:
            with Image.open(base / m.panorama.image) as im:
                pano = np.asarray(im.convert("RGB"))
            sky_faces = panorama_to_cubemap(pano, m.panorama.face_size_px)
    except CompileError as exc:
        return _fail(diags, exc.code, exc, m, file, "skybox")
    except OSError as exc:
        r = CompileResult([error("IO_ERROR", f"cannot read panorama: {exc}", "panorama", file=file)])
        r.io_error = True
        return r
    extras: dict = {"units": "meters", "up_axis": "+Y"}
    if sky_faces is not None:
        extras["skybox"] = {name: f"{SKY_DIR}/{name}.png" for name in sorted(sky_faces)}
        for name in sorted(sky_faces):
            files[f"{SKY_DIR}/{name}.png"] = png_bytes(sky_faces[name])
        files[f"{SKY_DIR}/cross.png"] = png_bytes(contact_sheet(sky_faces))
        report.append(f"skybox faces {sky_faces['px'].shape[0]} px, "
                      f"max seam difference {max_seam_difference(sky_faces)}/255")

    if m.narrative is not None:
        try:
            files["narrative.json"] = compile_narrative(m.narrative, m.entity_ids()).encode("utf-8")
        except CompileError as exc:
            return _fail(diags, exc.code, exc, m, file, "narrative")
        extras["narrative"] = "narrative.json"
        g = m.narrative
        report.append(f"narrative {len(g.nodes)} nodes, {len(g.edges)} edges, "
                      f"{len(g.knowledge_items)} knowledge items")
        try:
            report.append(f"narrative accepting scripts (<= 20 edges): {enumerate_completions(g)}")
        except CompileError as exc:
            report.append(f"narrative accepting scripts: {exc.message}")

    try:
        ir = lower_manifest(m, meshes, atlas_of, atlas_uris, extras)
    except CompileError as exc:
        return _fail(diags, exc.code, exc, m, file, "narrative")
    files.update(emit_gltf(ir))
    for a, uri in zip(atlases, atlas_uris):
        files[uri] = png_bytes(a.pixels)
        report.append(f"atlas {a.atlas_id}: {a.size[0]}x{a.size[1]} px, {len(a.entries)} clips")
    report.append(f"nodes {len(ir.nodes)}, triangles "
                  f"{sum(n.mesh.triangle_count for n in ir.nodes)}")

    if options.strict and diags:
        return CompileResult(diags)
    report.append(f"diagnostics {len(diags)}")
    report += [str(d) for d in diags]
    text = "\n".join(report) + "\n"
    files["report.txt"] = text.encode("utf-8")
    return CompileResult(diags, dict(sorted(files.items())), text)


def write_package(result: CompileResult, out_dir: str | Path) -> list[Path]:
    """Write a successful result under ``out_dir``; returns the written paths."""
    if not result.ok:
        raise CompileError("NOTHING_TO_WRITE", "compilation did not succeed")
    out = Path(out_dir)
    written = []
    for name, data in result.files.items():
        target = out / name
        target.parent.mkdir(parents=True, exist_ok=True)
        tmp = target.with_name(target.name + ".part")
        tmp.write_bytes(data)
        os.replace(tmp, target)
        written.append(target)
    return written
