"""Brute-force enumeration of accepting scripts, the oracle for ``simulate``.

Walks edge paths from the start node depth-first and, for each node visited,
spells out the in-node events it needs (click the speaker, grab each tool in
every order, wipe each spot, end the media). Guidance toggles and dialogue
resets are left out; they never change whether a script completes.
"""

from __future__ import annotations

import itertools
from typing import Iterator

from ..errors import CompileError
from .model import (
    COMPLETION_TRIGGERS,
    Clean,
    Dialogue,
    DialogueEnd,
    Grab,
    Media,
    MediaEnd,
    NarrativeGraph,
    RayClick,
    Task,
)

MAX_EDGES = 20
MAX_SEQUENCES = 1_000_000


def _in_node(g: NarrativeGraph, node_id: str, via) -> list[tuple]:
    """Event sequences that take ``node_id`` from entry to completion."""
    kind = g.node(node_id).kind
    if isinstance(kind, Dialogue):
        engaged = kind.auto_start or via == RayClick(kind.speaker_slice_id)
        opener = () if engaged else (RayClick(kind.speaker_slice_id),)
        return [opener + (DialogueEnd(node_id),)]
    if isinstance(kind, Task):
        held = via.target_id if isinstance(via, Grab) else None
        todo = [t for t in dict.fromkeys(kind.target_ids) if t != held]
        cleans = (Clean(node_id),) * kind.spot_count
        return [tuple(Grab(t) for t in order) + cleans
                for order in itertools.permutations(todo)]
    if isinstance(kind, Media):
        return [(MediaEnd(node_id),)]
    return [()]


def completion_sequences(g: NarrativeGraph, max_len: int = MAX_EDGES,
                         max_events: int | None = None) -> Iterator[tuple]:
    """Yield accepting event sequences using at most ``max_len`` edges.

    Sequences may repeat when different edge paths spell the same events;
    callers wanting distinct sequences should collect them into a set.
    """
    if max_len > MAX_EDGES:
        raise CompileError("BOUND_EXCEEDED", f"max_len {max_len} exceeds {MAX_EDGES} edges")

    def visit(node_id, via, prefix, edges_used):
        if max_events is not None and len(prefix) > max_events:
            return
        if node_id in g.terminal_nodes:
            yield prefix
            return
        out = g.outgoing(node_id)
        auto = [e for e in out if isinstance(e.trigger, COMPLETION_TRIGGERS)]
        for body in _in_node(g, node_id, via):
            done = prefix + body
            if edges_used == max_len:
                continue
            if auto:
                # completion edge: the completing event (or the last wipe) moves on
                yield from visit(auto[0].to_node, auto[0].trigger, done, edges_used + 1)
                continue
            for e in out:
                yield from visit(e.to_node, e.trigger, done + (e.trigger,), edges_used + 1)

    yield from visit(g.start_node, None, (), 0)


def enumerate_completions(g: NarrativeGraph, max_len: int = MAX_EDGES) -> int:
    """Number of distinct accepting event sequences using at most ``max_len`` edges."""
    return len(accepting_set(g, max_len))


def accepting_set(g: NarrativeGraph, max_len: int = MAX_EDGES,
                  max_events: int | None = None) -> set[tuple]:
    seen: set[tuple] = set()
    for seq in completion_sequences(g, max_len, max_events):
        seen.add(seq)
        if len(seen) > MAX_SEQUENCES:
            raise CompileError("BOUND_EXCEEDED",
                               f"more than {MAX_SEQUENCES} accepting sequences")
    return seen
