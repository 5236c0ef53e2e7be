from __future__ import annotations

from collections import defaultdict, deque
from typing import Iterable

from ..errors import Diagnostic, error, warning
from .model import (
    COMPLETION_TRIGGERS,
    CleanComplete,
    Dialogue,
    DialogueEnd,
    KnowledgeSource,
    Media,
    MediaEnd,
    NarrativeGraph,
    Task,
    Teleport,
    trigger_node,
    trigger_target,
)

_COMPLETION_KIND = {CleanComplete: Task, MediaEnd: Media, DialogueEnd: Dialogue}


def _reachable(g: NarrativeGraph, start: str, nodes: set[str]) -> set[str]:
    """Nodes reachable from ``start``; play stops at terminals, so they are not expanded."""
    succ = defaultdict(list)
    for e in g.edges:
        succ[e.from_node].append(e.to_node)
    seen = {start}
    todo = deque([start])
    while todo:
        v = todo.popleft()
        if v in g.terminal_nodes:
            continue
        for w in succ[v]:
            if w in nodes and w not in seen:
                seen.add(w)
                todo.append(w)
    return seen


def _reaches_terminal(g: NarrativeGraph, nodes: set[str]) -> set[str]:
    pred = defaultdict(list)
    for e in g.edges:
        if e.from_node not in g.terminal_nodes:
            pred[e.to_node].append(e.from_node)
    seen = {t for t in g.terminal_nodes if t in nodes}
    todo = deque(seen)
    while todo:
        v = todo.popleft()
        for u in pred[v]:
            if u in nodes and u not in seen:
                seen.add(u)
                todo.append(u)
    return seen


def validate_graph(g: NarrativeGraph, entity_ids: Iterable[str] | None = None) -> list[Diagnostic]:
    """Well-formedness of a narrative graph.

    Errors: duplicate or dangling ids, mismatched completion triggers,
    ambiguous edges, no start-to-terminal path, undelivered knowledge items.
    Warnings: unreachable nodes, dead ends, guidance gaps, shadowed edges.
    When ``entity_ids`` is given, trigger targets and speakers must be in it.
    """
    diags: list[Diagnostic] = []
    entities = set(entity_ids) if entity_ids is not None else None

    node_ids: set[str] = set()
    for i, n in enumerate(g.nodes):
        if n.node_id in node_ids:
            diags.append(error("DUPLICATE_ID", f"duplicate node id {n.node_id!r}",
                               f"nodes[{i}].node_id"))
        node_ids.add(n.node_id)
    item_ids: set[str] = set()
    for i, k in enumerate(g.knowledge_items):
        if k.item_id in item_ids:
            diags.append(error("DUPLICATE_ID", f"duplicate knowledge item {k.item_id!r}",
                               f"knowledge_items[{i}].item_id"))
        item_ids.add(k.item_id)

    if g.start_node not in node_ids:
        diags.append(error("DANGLING_NODE", f"start node {g.start_node!r} does not exist",
                           "start_node"))
    for t in sorted(g.terminal_nodes):
        if t not in node_ids:
            diags.append(error("DANGLING_NODE", f"terminal node {t!r} does not exist",
                               "terminal_nodes"))
    if not g.terminal_nodes:
        diags.append(error("NO_TERMINAL_PATH", "the graph declares no terminal node",
                           "terminal_nodes"))

    def check_entity(ref: str, path: str):
        if entities is not None and ref not in entities:
            diags.append(error("DANGLING_TARGET", f"{ref!r} is not an entity in the scene", path))

    for i, n in enumerate(g.nodes):
        for item in sorted(n.delivers):
            if item not in item_ids:
                diags.append(error("UNKNOWN_ITEM", f"node {n.node_id!r} delivers unknown item {item!r}",
                                   f"nodes[{i}].delivers"))
        if isinstance(n.kind, Dialogue):
            check_entity(n.kind.speaker_slice_id, f"nodes[{i}].kind.speaker_slice_id")
        elif isinstance(n.kind, Task):
            for j, t in enumerate(n.kind.target_ids):
                check_entity(t, f"nodes[{i}].kind.target_ids[{j}]")

    by_id = {n.node_id: n for n in g.nodes}
    for i, e in enumerate(g.edges):
        path = f"edges[{i}]"
        for end in (e.from_node, e.to_node):
            if end not in node_ids:
                diags.append(error("DANGLING_EDGE", f"edge endpoint {end!r} does not exist", path))
        trig = e.trigger
        if isinstance(trig, COMPLETION_TRIGGERS):
            ref = trigger_node(trig)
            want = _COMPLETION_KIND[type(trig)]
            if ref not in node_ids:
                diags.append(error("DANGLING_TARGET", f"{type(trig).__name__} names unknown node {ref!r}",
                                   f"{path}.trigger"))
            elif ref != e.from_node or not isinstance(by_id[ref].kind, want):
                diags.append(error("TRIGGER_MISMATCH",
                                   f"{type(trig).__name__} must name its own {want.__name__} node "
                                   f"({e.from_node!r})", f"{path}.trigger"))
        else:
            check_entity(trigger_target(trig), f"{path}.trigger.target_id")

    # one event must never match two edges of the same node
    seen_keys: dict[tuple, int] = {}
    for i, e in enumerate(g.edges):
        key = (e.from_node, type(e.trigger).__name__, trigger_target(e.trigger) or trigger_node(e.trigger))
        if key in seen_keys:
            diags.append(error("AMBIGUOUS_TRIGGER",
                               f"edges[{seen_keys[key]}] and edges[{i}] leave {e.from_node!r} on the "
                               f"same trigger", f"edges[{i}].trigger"))
        else:
            seen_keys[key] = i
    for v in sorted(node_ids):
        out = g.outgoing(v)
        if any(isinstance(e.trigger, COMPLETION_TRIGGERS) for e in out) and len(out) > 1:
            diags.append(warning("SHADOWED_EDGE",
                                 f"node {v!r} leaves on completion, so its other edges never fire",
                                 "edges"))

    for i, n in enumerate(g.nodes):
        for item in sorted(n.delivers):
            k = next((k for k in g.knowledge_items if k.item_id == item), None)
            if k is None:
                continue
            ok = (isinstance(n.kind, Dialogue) if k.source is KnowledgeSource.DIALOGUE_LINE
                  else isinstance(n.kind, Media))
            if not ok:
                diags.append(warning("ITEM_SOURCE_MISMATCH",
                                     f"item {item!r} is a {k.source.value} item but node "
                                     f"{n.node_id!r} is a {type(n.kind).__name__}",
                                     f"nodes[{i}].delivers"))

    if any(d.is_error and d.code in ("DANGLING_NODE", "DUPLICATE_ID") for d in diags):
        return diags

    reach = _reachable(g, g.start_node, node_ids)
    live = _reaches_terminal(g, node_ids)
    for i, n in enumerate(g.nodes):
        if n.node_id not in reach:
            diags.append(warning("UNREACHABLE_NODE", f"node {n.node_id!r} is unreachable from the start",
                                 f"nodes[{i}]"))
        elif n.node_id not in live:
            diags.append(warning("DEAD_END", f"no terminal can be reached from node {n.node_id!r}",
                                 f"nodes[{i}]"))
    if not (reach & live & set(g.terminal_nodes)) or g.start_node not in live:
        diags.append(error("NO_TERMINAL_PATH", "no path leads from the start to a terminal node",
                           "start_node"))

    # a node hands out its items on completion; a terminal ends play on entry,
    # so only a Teleport terminal (complete on entry) delivers
    delivered: set[str] = set()
    for n in g.nodes:
        if n.node_id not in reach or n.node_id not in live:
            continue
        if n.node_id in g.terminal_nodes and not isinstance(n.kind, Teleport):
            continue
        delivered |= n.delivers
    for i, k in enumerate(g.knowledge_items):
        if k.item_id not in delivered:
            diags.append(error("ITEM_UNDELIVERED",
                               f"knowledge item {k.item_id!r} is not delivered on any completing path",
                               f"knowledge_items[{i}]"))

    for v in sorted(g.guidance.waypoint_paths):
        if v not in node_ids:
            diags.append(warning("UNKNOWN_GUIDANCE_NODE", f"guidance names unknown node {v!r}",
                                 f"guidance.waypoint_paths.{v}"))
    for i, n in enumerate(g.nodes):
        if (n.node_id in reach and n.node_id not in g.terminal_nodes
                and not isinstance(n.kind, Media) and not g.guidance.path_for(n.node_id)):
            diags.append(warning("GUIDANCE_GAP", f"node {n.node_id!r} has no light-point waypoint path",
                                 f"guidance.waypoint_paths.{n.node_id}"))
    return diags
