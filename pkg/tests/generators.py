"""Seeded random inputs for the property and acceptance tests."""

from __future__ import annotations

import math

import numpy as np

from mural2scene.manifest import (
    ArchitectureRef,
    ArchitectureSpec,
    AxisLock,
    Bob,
    Cross,
    FaceToEye,
    Flip,
    MuralSource,
    PanoramaSpec,
    Pulse,
    RoofSpec,
    SceneKind,
    SceneManifest,
    SkyboxBand,
    SkyboxSpec,
    SliceSpec,
    Storey,
    ViewCalibration,
    validate_manifest,
)
from mural2scene.narrative import (
    Clean,
    CleanComplete,
    Dialogue,
    DialogueEnd,
    Edge,
    GazeDwell,
    Grab,
    GuidanceConfig,
    KnowledgeItem,
    KnowledgeSource,
    Media,
    MediaEnd,
    NarrativeGraph,
    NarrativeNode,
    Proximity,
    RayClick,
    Task,
    Teleport,
    ToggleGuidance,
)
from mural2scene.values import Placement

from oracles import random_star_polygon

ENTITIES = ("e0", "e1", "e2", "e3")


def _pick(rng, seq):
    return seq[int(rng.integers(len(seq)))]


# -- narrative graphs ---------------------------------------------------------

def random_graph(rng: np.random.Generator, max_nodes: int = 8,
                 entities=ENTITIES) -> NarrativeGraph:
    """A structurally sound graph: edges name real nodes, triggers are unambiguous.

    Cycles, unreachable nodes and dead ends are all allowed.
    """
    n = int(rng.integers(2, max_nodes + 1))
    ids = [f"n{i}" for i in range(n)]
    nodes = []
    for nid in ids:
        r = rng.random()
        if r < 0.35:
            kind = Dialogue(_pick(rng, entities), ("line",), auto_start=bool(rng.random() < 0.4))
        elif r < 0.6:
            k = int(rng.integers(0, 3))
            targets = tuple(rng.choice(entities, size=k, replace=False).tolist())
            kind = Task(int(rng.integers(1, 3)), targets)
        elif r < 0.8:
            kind = Media(float(rng.integers(1, 100)))
        else:
            kind = Teleport("elsewhere")
        nodes.append(NarrativeNode(nid, kind))

    edges = []
    for node in nodes:
        nid = node.node_id
        used = set()
        completion = {Dialogue: DialogueEnd(nid), Task: CleanComplete(nid),
                      Media: MediaEnd(nid)}.get(type(node.kind))
        for _ in range(int(rng.integers(0, 4))):
            to = _pick(rng, ids)
            if completion is not None and rng.random() < 0.3:
                trig = completion
            else:
                cls = _pick(rng, (GazeDwell, RayClick, Proximity, Grab))
                target = _pick(rng, entities)
                # one threshold per target keeps every event in canonical form;
                # threshold matching itself is covered by the unit tests
                if cls is GazeDwell:
                    trig = GazeDwell(target, 1.0 + entities.index(target))
                elif cls is Proximity:
                    trig = Proximity(target, 2.0 + entities.index(target))
                else:
                    trig = cls(target)
            key = (type(trig), getattr(trig, "target_id", None))
            if key in used:
                continue
            used.add(key)
            edges.append(Edge(nid, to, trig))

    k = int(rng.integers(1, max(2, n // 2) + 1))
    terminals = frozenset(rng.choice(ids, size=min(k, n), replace=False).tolist())
    return NarrativeGraph(tuple(nodes), _pick(rng, ids), terminals, tuple(edges))


def alphabet(g: NarrativeGraph) -> list:
    """Every event that can matter to ``g``, in canonical form, plus two neutral ones."""
    out = []
    for e in g.edges:
        out.append(e.trigger)
    for node in g.nodes:
        k = node.kind
        if isinstance(k, Dialogue):
            out += [RayClick(k.speaker_slice_id), DialogueEnd(node.node_id)]
        elif isinstance(k, Task):
            out += [Grab(t) for t in k.target_ids] + [Clean(node.node_id)]
        elif isinstance(k, Media):
            out.append(MediaEnd(node.node_id))
    out += [ToggleGuidance()]
    return list(dict.fromkeys(out))


def random_scripts(rng, g: NarrativeGraph, accepting: list[tuple], count: int,
                   max_events: int) -> list[list]:
    """Mix of accepting scripts, near misses and random noise, none longer than ``max_events``."""
    alpha = alphabet(g)
    scripts = []
    for i in range(count):
        mode = i % 3
        if mode == 0 and accepting:
            s = list(accepting[int(rng.integers(len(accepting)))])
        elif mode == 1 and accepting:
            s = list(accepting[int(rng.integers(len(accepting)))])
            op = rng.integers(3)
            if op == 0 and s:
                del s[int(rng.integers(len(s)))]
            elif op == 1 and len(s) > 1:
                a, b = rng.choice(len(s), size=2, replace=False)
                s[a], s[b] = s[b], s[a]
            else:
                s.insert(int(rng.integers(len(s) + 1)), _pick(rng, alpha))
        else:
            s = [_pick(rng, alpha) for _ in range(int(rng.integers(0, max_events + 1)))]
        scripts.append(s[:max_events])
    return scripts


# -- manifests -------------------------------------------------------------------

def _text(rng) -> str:
    pool = "abcxyz_-. 0123:#'\"éü中\\"
    return "".join(_pick(rng, pool) for _ in range(int(rng.integers(1, 9))))


def _placement(rng) -> Placement:
    return Placement(tuple(float(v) for v in rng.uniform(-50, 50, 3)),
                     float(rng.uniform(-math.pi, math.pi)), float(rng.uniform(0.1, 20)))


def _effect(rng):
    r = rng.integers(3)
    if r == 0:
        return Flip(float(rng.uniform(0.1, 5)))
    if r == 1:
        return Bob(float(rng.uniform(0.01, 2)), float(rng.uniform(0.1, 5)))
    lo = float(rng.uniform(0.5, 1.0))
    return Pulse(lo, lo + float(rng.uniform(0.0, 1.0)), float(rng.uniform(0.1, 5)))


def random_manifest(rng: np.random.Generator) -> SceneManifest:
    """A manifest that passes ``validate_manifest`` with no errors."""
    while True:
        m = _draft(rng)
        if not any(d.is_error for d in validate_manifest(m)):
            return m


def _draft(rng) -> SceneManifest:
    size = 64
    sources = tuple(
        MuralSource(f"src{i}", f"img{i}.png", size / 300 * 0.0254 * 4, size / 300 * 0.0254 * 4,
                    300 * 4)
        for i in range(int(rng.integers(1, 3))))
    # pixel size is 4 * 64 = 256 on each side
    px = 256

    def mask():
        while True:
            p = random_star_polygon(rng, px)
            if p is not None:
                return tuple(p)

    slices = []
    archs = []
    n_arch = int(rng.integers(0, 2))
    for a in range(n_arch):
        wall = f"wall{a}"
        slices.append(SliceSpec(wall, _pick(rng, sources).source_id, mask(),
                                ArchitectureRef(f"arch{a}")))
        roof = None
        if rng.random() < 0.7:
            slices.append(SliceSpec(f"roof{a}", _pick(rng, sources).source_id, mask(),
                                    ArchitectureRef(f"arch{a}")))
            roof = RoofSpec(float(rng.uniform(0, 3)), float(rng.uniform(0, 5)), f"roof{a}")
        cal = None
        if rng.random() < 0.5:
            cal = ViewCalibration((0.0, 5.0, 60.0), (0.0, 5.0, 0.0), float(rng.uniform(0.3, 1.2)),
                                  (-0.5, -0.4, 0.5, 0.4))
        archs.append(ArchitectureSpec(f"arch{a}", float(rng.uniform(1, 40)),
                                      float(rng.uniform(1, 40)),
                                      (Storey(float(rng.uniform(1, 10)), wall, roof),),
                                      _placement(rng), cal, float(rng.uniform(0.5, 0.95))))
    for i in range(int(rng.integers(1, 6))):
        r = rng.random()
        src = _pick(rng, sources).source_id
        tags = tuple(_text(rng) for _ in range(int(rng.integers(0, 3))))
        if r < 0.5:
            lock = None if rng.random() < 0.3 else _pick(rng, list(AxisLock))
            effects = tuple(_effect(rng) for _ in range(int(rng.integers(0, 3))))
            slices.append(SliceSpec(f"s{i}", src, mask(), FaceToEye(lock), _placement(rng),
                                    effects, tags))
        elif r < 0.75:
            slices.append(SliceSpec(f"s{i}", src, mask(), Cross(), _placement(rng), (), tags))
        else:
            slices.append(SliceSpec(f"s{i}", src, mask(), SkyboxBand(), None, (), tags))
    bands = tuple(s.slice_id for s in slices if isinstance(s.transfer, SkyboxBand))

    skybox = panorama = None
    kind = SceneKind.RECONSTRUCTED if bands or rng.random() < 0.5 else SceneKind.PANORAMA
    if kind is SceneKind.RECONSTRUCTED:
        lo = float(rng.uniform(0.5, 1.0))
        skybox = SkyboxSpec(bands, int(2 ** rng.integers(2, 10)), float(rng.uniform(0.05, 0.5)),
                            tuple(int(v) for v in rng.integers(0, 256, 3)),
                            tuple(int(v) for v in rng.integers(0, 256, 3)),
                            tuple(int(v) for v in rng.integers(0, 256, 3)),
                            int(rng.integers(-2**31, 2**31)), (lo, lo + float(rng.uniform(0, 1))))
    else:
        panorama = PanoramaSpec("pano.png", int(2 ** rng.integers(2, 10)))

    narrative = None
    placed = [s.slice_id for s in slices if not isinstance(s.transfer, (SkyboxBand, ArchitectureRef))]
    placed += [a.arch_id for a in archs]
    if placed and rng.random() < 0.7:
        narrative = _valid_story(rng, tuple(placed))
    return SceneManifest(1, "scene " + _text(rng), kind, sources, tuple(slices), tuple(archs), skybox,
                         panorama, narrative, int(rng.integers(0, 4)))


def _valid_story(rng, entities) -> NarrativeGraph:
    """A linear story: every node delivers an item and the last one is terminal."""
    n = int(rng.integers(2, 6))
    nodes, edges, items = [], [], []
    for i in range(n):
        nid = f"node {i}"
        if i == n - 1:
            kind = Teleport(_text(rng), _placement(rng))
        elif rng.random() < 0.5:
            kind = Dialogue(_pick(rng, entities), tuple(_text(rng) for _ in range(2)),
                            bool(rng.random() < 0.5))
        elif rng.random() < 0.5:
            kind = Task(int(rng.integers(1, 4)), (_pick(rng, entities),))
        else:
            kind = Media(float(rng.uniform(1, 300)))
        item = f"k{i}"
        src = KnowledgeSource.MEDIA_NODE if isinstance(kind, Media) else KnowledgeSource.DIALOGUE_LINE
        items.append(KnowledgeItem(item, _text(rng), src))
        nodes.append(NarrativeNode(nid, kind, frozenset({item})))
        if i:
            prev = nodes[i - 1]
            trig = {Dialogue: DialogueEnd(prev.node_id), Task: CleanComplete(prev.node_id),
                    Media: MediaEnd(prev.node_id)}.get(type(prev.kind))
            if trig is None or rng.random() < 0.5:
                trig = RayClick(_pick(rng, entities))
            edges.append(Edge(prev.node_id, nid, trig))
    paths = {node.node_id: tuple(tuple(float(v) for v in rng.uniform(-9, 9, 3))
                                 for _ in range(int(rng.integers(1, 4))))
             for node in nodes[:-1] if rng.random() < 0.6}
    return NarrativeGraph(tuple(nodes), nodes[0].node_id, frozenset({nodes[-1].node_id}),
                          tuple(edges), tuple(items), GuidanceConfig(waypoint_paths=paths))

