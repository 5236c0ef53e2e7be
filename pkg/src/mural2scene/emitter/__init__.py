"""Emitter: scene IR, glTF 2.0 writer and a structural validator for its output."""

from .gltf import build_gltf, emit_gltf
from .ir import IRNode, SceneIR, lower_manifest, narrative_targets
from .validate import validate_gltf_structure
