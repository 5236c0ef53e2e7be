"""Engine-neutral scene IR: one node per placed entity, sorted by id."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

from ..codec import encode
from ..errors import CompileError
from ..geometry.mesh import Mesh
from ..manifest.model import ArchitectureSpec, SceneManifest, SliceSpec
from ..narrative.model import COMPLETION_TRIGGERS, Dialogue, Task, trigger_target
from ..values import Placement

ROOT_NAME = "scene_root"


@dataclass(frozen=True, eq=False)
class IRNode:
    name: str
    translation: tuple[float, float, float]
    rotation: tuple[float, float, float, float]  # quaternion x, y, z, w
    scale: float
    mesh: Mesh
    atlas_of: dict[str, int]  # primitive slice id -> atlas index
    extras: dict = field(default_factory=dict)


@dataclass(frozen=True, eq=False)
class SceneIR:
    scene_id: str
    nodes: tuple[IRNode, ...]
    atlas_uris: tuple[str, ...]
    extras: dict = field(default_factory=dict)


def yaw_quaternion(yaw: float) -> tuple[float, float, float, float]:
    return (0.0, math.sin(yaw / 2), 0.0, math.cos(yaw / 2))


def narrative_targets(m: SceneManifest) -> dict[str, list[str]]:
    """Entity id -> sorted ids of narrative nodes whose triggers or roles name it."""
    out: dict[str, set[str]] = {}
    g = m.narrative
    if g is None:
        return {}
    for e in g.edges:
        if not isinstance(e.trigger, COMPLETION_TRIGGERS):
            out.setdefault(trigger_target(e.trigger), set()).add(e.from_node)
    for n in g.nodes:
        if isinstance(n.kind, Dialogue):
            out.setdefault(n.kind.speaker_slice_id, set()).add(n.node_id)
        elif isinstance(n.kind, Task):
            for t in n.kind.target_ids:
                out.setdefault(t, set()).add(n.node_id)
    return {k: sorted(v) for k, v in out.items()}


def lower_manifest(m: SceneManifest, meshes: Mapping[str, Mesh],
                   atlas_of: Mapping[str, int], atlas_uris: tuple[str, ...],
                   extras: dict | None = None) -> SceneIR:
    """Assemble the IR from per-entity meshes (keyed by slice or arch id).

    Raises UNBOUND_TARGET when the narrative names an entity the scene lacks.
    """
    targets = narrative_targets(m)
    entities: dict[str, SliceSpec | ArchitectureSpec] = {s.slice_id: s for s in m.placed_slices()}
    entities.update({a.arch_id: a for a in m.architectures})
    for ident in sorted(targets):
        if ident not in entities:
            raise CompileError("UNBOUND_TARGET",
                               f"narrative refers to {ident!r}, which is not an entity in the scene")

    nodes = []
    for ident in sorted(entities):
        spec = entities[ident]
        mesh = meshes[ident]
        if isinstance(spec, ArchitectureSpec):
            placement, scale = spec.placement, spec.placement.scale
        else:
            # sprite scale is baked into the quad
            placement, scale = spec.placement or Placement(), 1.0
        node_extras: dict = {}
        if mesh.billboard is not None:
            node_extras["billboard"] = mesh.billboard.axis_lock.value
        if mesh.animation:
            node_extras["effects"] = encode(mesh.animation)
        if ident in targets:
            node_extras["narrative_target"] = targets[ident]
        nodes.append(IRNode(
            ident,
            tuple(float(v) for v in placement.position),
            yaw_quaternion(placement.yaw),
            float(scale),
            mesh,
            {p.slice_id: atlas_of[p.slice_id] for p in mesh.primitives},
            node_extras,
        ))
    return SceneIR(m.scene_id, tuple(nodes), tuple(atlas_uris), dict(extras or {}))
