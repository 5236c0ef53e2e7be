"""Headless replay of a narrative graph against a scripted event list.

Inside a node, events first drive the node's own progress (engaging and
finishing a dialogue, grabbing tools and wiping spots, ending media). Once
the node is complete its outgoing edges are live; completion triggers
(``DialogueEnd``, ``MediaEnd``, ``CleanComplete``) fire the moment the node
completes. Events that fit neither are rejected and skipped.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

from .model import (
    COMPLETION_TRIGGERS,
    Clean,
    CleanComplete,
    Dialogue,
    DialogueEnd,
    Grab,
    Media,
    MediaEnd,
    NarrativeGraph,
    NarrativeNode,
    RayClick,
    ResetDialogue,
    Task,
    Teleport,
    ToggleGuidance,
    event_matches,
)


@dataclass(frozen=True)
class Completed:
    pass


@dataclass(frozen=True)
class Stuck:
    at_node: str


@dataclass(frozen=True)
class RejectedEvent:
    index: int
    reason: str


Outcome = Union[Completed, Stuck, RejectedEvent]


@dataclass(frozen=True)
class TraceStep:
    index: int
    event: object
    accepted: bool
    node_entered: Optional[str]
    items_delivered: frozenset[str]
    note: str = ""


@dataclass(frozen=True)
class SimTrace:
    steps: tuple[TraceStep, ...]
    outcome: Outcome
    items_delivered: frozenset[str]
    final_node: str

    @property
    def accepted(self) -> bool:
        """Completed with every event consumed by the graph."""
        return isinstance(self.outcome, Completed) and all(s.accepted for s in self.steps)

    def rejected(self) -> list[TraceStep]:
        return [s for s in self.steps if not s.accepted]


@dataclass
class _NodeState:
    node: NarrativeNode
    engaged: bool = False
    complete: bool = False
    grabbed: set[str] = field(default_factory=set)
    cleaned: int = 0


class Simulator:
    """Mutable replay state over an immutable graph; one per run."""

    def __init__(self, g: NarrativeGraph):
        self.g = g
        self.delivered: set[str] = set()
        self.guidance_on = False
        self.finished = False
        self.state = self._enter(g.start_node, None)

    def _enter(self, node_id: str, via) -> _NodeState:
        node = self.g.node(node_id)
        st = _NodeState(node)
        kind = node.kind
        if node_id in self.g.terminal_nodes:
            self.finished = True
        if isinstance(kind, Dialogue):
            st.engaged = kind.auto_start or (
                isinstance(via, RayClick) and via.target_id == kind.speaker_slice_id)
        elif isinstance(kind, Task):
            if isinstance(via, Grab) and via.target_id in kind.target_ids:
                st.grabbed.add(via.target_id)
        elif isinstance(kind, Teleport):
            st.complete = True
            self.delivered |= node.delivers
        return st

    def _complete(self) -> Optional[str]:
        """Mark the current node complete; follow its completion edge if any."""
        st = self.state
        st.complete = True
        self.delivered |= st.node.delivers
        for e in self.g.outgoing(st.node.node_id):
            if isinstance(e.trigger, COMPLETION_TRIGGERS):
                self.state = self._enter(e.to_node, e.trigger)
                return e.to_node
        return None

    def step(self, event) -> tuple[bool, Optional[str], str]:
        """Apply one event: (accepted, node entered, note)."""
        if isinstance(event, ToggleGuidance):
            # neutral everywhere, even after the end
            self.guidance_on = not self.guidance_on
            return True, None, "guidance " + ("on" if self.guidance_on else "off")
        if self.finished:
            return False, None, "narrative already finished"
        if isinstance(event, CleanComplete):
            return False, None, "CleanComplete fires on its own after the last spot"
        st = self.state
        kind = st.node.kind
        nid = st.node.node_id

        if not st.complete:
            if isinstance(kind, Dialogue):
                if isinstance(event, RayClick) and event.target_id == kind.speaker_slice_id \
                        and not st.engaged:
                    st.engaged = True
                    return True, None, "dialogue started"
                if isinstance(event, DialogueEnd) and event.dialogue_node_id == nid:
                    if not st.engaged:
                        return False, None, "dialogue has not started"
                    return True, self._complete(), "dialogue finished"
                if isinstance(event, ResetDialogue) and event.dialogue_node_id == nid:
                    st.engaged = kind.auto_start
                    return True, None, "dialogue reset"
            elif isinstance(kind, Task):
                if isinstance(event, Grab) and event.target_id in kind.target_ids \
                        and event.target_id not in st.grabbed:
                    st.grabbed.add(event.target_id)
                    return True, None, f"grabbed {event.target_id}"
                if isinstance(event, Clean) and event.task_node_id == nid:
                    missing = [t for t in kind.target_ids if t not in st.grabbed]
                    if missing:
                        return False, None, f"grab {missing[0]} first"
                    st.cleaned += 1
                    if st.cleaned == kind.spot_count:
                        return True, self._complete(), "task complete"
                    return True, None, f"spot {st.cleaned}/{kind.spot_count}"
            elif isinstance(kind, Media):
                if isinstance(event, MediaEnd) and event.media_node_id == nid:
                    return True, self._complete(), "media finished"
            return False, None, f"node {nid!r} is not finished"

        for e in self.g.outgoing(nid):
            if not isinstance(e.trigger, COMPLETION_TRIGGERS) and event_matches(e.trigger, event):
                self.state = self._enter(e.to_node, event)
                return True, e.to_node, ""
        return False, None, f"no edge out of {nid!r} matches"


def simulate(g: NarrativeGraph, script: Iterable, *, strict: bool = False) -> SimTrace:
    """Replay ``script`` on ``g``.

    Rejected events are recorded and skipped. With ``strict`` the replay
    stops at the first rejected event and the outcome is ``RejectedEvent``;
    a strict Completed run is exactly a script in the graph's language.
    """
    sim = Simulator(g)
    steps: list[TraceStep] = []
    outcome: Outcome | None = None
    for i, ev in enumerate(script):
        ok, entered, note = sim.step(ev)
        steps.append(TraceStep(i, ev, ok, entered, frozenset(sim.delivered), note))
        if not ok and strict:
            outcome = RejectedEvent(i, note)
            break
    if outcome is None:
        outcome = Completed() if sim.finished else Stuck(sim.state.node.node_id)
    return SimTrace(tuple(steps), outcome, frozenset(sim.delivered), sim.state.node.node_id)
