"""Cross-entity checks that the decoder cannot see field by field."""

from __future__ import annotations

import re
from typing import Mapping

from ..errors import Diagnostic, error
from ..narrative.validate import validate_graph
from ..polygon import is_simple, signed_area
from .model import ArchitectureRef, Cross, FaceToEye, SceneKind, SceneManifest, SkyboxBand

SIZE_TOLERANCE = 0.05

_LAST = re.compile(r"(\.[^.\[\]]+|\[\d+\])$")


def locate(m: SceneManifest, path: str) -> tuple[int | None, int | None]:
    """Line/column of ``path`` or of its nearest located ancestor."""
    p = path
    while True:
        if p in m.locations:
            return m.locations[p]
        shorter = _LAST.sub("", p)
        if shorter == p:
            return m.locations.get("", (None, None))
        p = shorter


def _at(m: SceneManifest, d: Diagnostic) -> Diagnostic:
    line, col = locate(m, d.path)
    return Diagnostic(d.severity, d.code, d.message, d.path, line, col, d.file)


def source_size_issues(m: SceneManifest, image_sizes: Mapping[str, tuple[int, int]]) -> list[Diagnostic]:
    """Loaded image sizes that disagree with the declared physical size by more than 5%."""
    out = []
    for i, s in enumerate(m.sources):
        if s.source_id not in image_sizes:
            continue
        w, h = image_sizes[s.source_id]
        ew, eh = s.expected_pixel_size()
        if abs(w - ew) > SIZE_TOLERANCE * ew or abs(h - eh) > SIZE_TOLERANCE * eh:
            out.append(error("SOURCE_SIZE_MISMATCH",
                             f"image is {w}x{h} px but {s.physical_width_m} x {s.physical_height_m} m "
                             f"at {s.dpi} dpi implies {ew}x{eh}", f"sources[{i}].image"))
    return out


def validate_manifest(m: SceneManifest,
                      image_sizes: Mapping[str, tuple[int, int]] | None = None) -> list[Diagnostic]:
    """All cross-entity violations in ``m``; no errors means it can be compiled.

    Mask bounds use the loaded image sizes when given, otherwise the pixel
    size implied by each source's physical size and dpi.
    """
    diags: list[Diagnostic] = []

    seen_sources: set[str] = set()
    for i, s in enumerate(m.sources):
        if s.source_id in seen_sources:
            diags.append(error("DUPLICATE_ID", f"duplicate source id {s.source_id!r}",
                               f"sources[{i}].source_id"))
        seen_sources.add(s.source_id)

    # slices, architectures and narrative nodes share one id space
    owners: dict[str, str] = {}

    def claim(ident: str, path: str):
        if ident in owners:
            diags.append(error("DUPLICATE_ID", f"id {ident!r} already used at {owners[ident]}", path))
        else:
            owners[ident] = path

    for i, s in enumerate(m.slices):
        claim(s.slice_id, f"slices[{i}].slice_id")
    for i, a in enumerate(m.architectures):
        claim(a.arch_id, f"architectures[{i}].arch_id")
    if m.narrative is not None:
        for i, n in enumerate(m.narrative.nodes):
            claim(n.node_id, f"narrative.nodes[{i}].node_id")

    sizes = dict(image_sizes or {})
    for i, s in enumerate(m.slices):
        path = f"slices[{i}]"
        src = m.source(s.source_id)
        if src is None:
            diags.append(error("UNRESOLVED_SOURCE", f"slice {s.slice_id!r} names undeclared source "
                               f"{s.source_id!r}", f"{path}.source_id"))
        else:
            w, h = sizes.get(src.source_id) or src.expected_pixel_size()
            for j, (x, y) in enumerate(s.mask):
                if not (0 <= x <= w and 0 <= y <= h):
                    diags.append(error("MASK_OUT_OF_BOUNDS",
                                       f"vertex ({x:g}, {y:g}) lies outside the {w}x{h} px source",
                                       f"{path}.mask[{j}]"))
        if abs(signed_area(s.mask)) == 0.0:
            diags.append(error("MASK_DEGENERATE", "mask polygon has zero area", f"{path}.mask"))
        elif not is_simple(s.mask):
            diags.append(error("MASK_NOT_SIMPLE", "mask polygon intersects itself", f"{path}.mask"))
        if isinstance(s.transfer, ArchitectureRef):
            if not any(a.arch_id == s.transfer.arch_id for a in m.architectures):
                diags.append(error("UNRESOLVED_ARCH", f"unknown architecture {s.transfer.arch_id!r}",
                                   f"{path}.transfer.arch_id"))
        if isinstance(s.transfer, SkyboxBand) and s.effects:
            diags.append(error("BAND_WITH_EFFECTS", "skybox band slices cannot carry motion effects",
                               f"{path}.effects"))
        if isinstance(s.transfer, (FaceToEye, Cross)) and s.placement is None:
            diags.append(error("MISSING_PLACEMENT", f"slice {s.slice_id!r} needs a placement",
                               path))

    def need_slice(ident: str, path: str, transfer=None):
        s = m.slice(ident)
        if s is None:
            diags.append(error("UNRESOLVED_SOURCE", f"unknown slice {ident!r}", path))
        elif transfer is not None and not isinstance(s.transfer, transfer):
            diags.append(error("TRANSFER_MISMATCH",
                               f"slice {ident!r} must use the {transfer.__name__} transfer", path))

    for i, a in enumerate(m.architectures):
        for j, st in enumerate(a.storeys):
            need_slice(st.wall_slice_id, f"architectures[{i}].storeys[{j}].wall_slice_id",
                       ArchitectureRef)
            if st.roof is not None:
                need_slice(st.roof.roof_slice_id,
                           f"architectures[{i}].storeys[{j}].roof.roof_slice_id", ArchitectureRef)

    if m.skybox is not None:
        for j, ident in enumerate(m.skybox.horizon_slices):
            need_slice(ident, f"skybox.horizon_slices[{j}]", SkyboxBand)
        if not m.skybox.horizon_slices and m.skybox.band_height_frac > 0:
            diags.append(error("MISSING_HORIZON", "band_height_frac > 0 needs horizon_slices",
                               "skybox.horizon_slices"))
    if m.skybox is not None and m.panorama is not None:
        diags.append(error("CONFLICTING_SKY", "give either a skybox recipe or a panorama, not both",
                           "panorama"))
    if m.scene_kind is SceneKind.RECONSTRUCTED and m.skybox is None:
        diags.append(error("MISSING_SKYBOX", "a Reconstructed scene needs a skybox recipe", ""))

    if m.narrative is not None:
        for d in validate_graph(m.narrative, m.entity_ids()):
            path = f"narrative.{d.path}" if d.path else "narrative"
            diags.append(Diagnostic(d.severity, d.code, d.message, path))

    return [_at(m, d) for d in diags]
