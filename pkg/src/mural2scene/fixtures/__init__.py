"""Deterministic fixtures used by the tests and the examples in the README."""

from .foguang import (
    IMAGE_NAME,
    MANIFEST_NAME,
    SCRIPT_NAME,
    canonical_script,
    foguang_graph,
    foguang_manifest,
    paint_mural,
    pixel_size,
    write_foguang,
)

__all__ = [
    "IMAGE_NAME",
    "MANIFEST_NAME",
    "SCRIPT_NAME",
    "canonical_script",
    "foguang_graph",
    "foguang_manifest",
    "paint_mural",
    "pixel_size",
    "write_foguang",
]
