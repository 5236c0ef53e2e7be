"""Narrative graph value types: nodes, trigger-labelled edges, knowledge items.

Triggers double as script events. As an event, ``GazeDwell.dwell_s`` is the
observed dwell time and ``Proximity.radius_m`` the observed distance; an
event matches an edge when it names the same target and meets the edge's
threshold.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Union

from ..codec import register_variants
from ..values import Placement, Vec3, require


DEFAULT_DWELL_S = 2.0
DEFAULT_SPOT_COUNT = 3


_require = require


# -- triggers ---------------------------------------------------------------


@dataclass(frozen=True)
class GazeDwell:
    target_id: str
    dwell_s: float = DEFAULT_DWELL_S

    def __post_init__(self):
        _require(math.isfinite(self.dwell_s) and self.dwell_s > 0, "dwell_s", "must be > 0")


@dataclass(frozen=True)
class RayClick:
    target_id: str


@dataclass(frozen=True)
class Proximity:
    target_id: str
    radius_m: float

    def __post_init__(self):
        _require(math.isfinite(self.radius_m) and self.radius_m > 0, "radius_m", "must be > 0")


@dataclass(frozen=True)
class Grab:
    target_id: str


@dataclass(frozen=True)
class CleanComplete:
    task_node_id: str


@dataclass(frozen=True)
class MediaEnd:
    media_node_id: str


@dataclass(frozen=True)
class DialogueEnd:
    dialogue_node_id: str


Trigger = Union[GazeDwell, RayClick, Proximity, Grab, CleanComplete, MediaEnd, DialogueEnd]
ENTITY_TRIGGERS = (GazeDwell, RayClick, Proximity, Grab)
COMPLETION_TRIGGERS = (CleanComplete, MediaEnd, DialogueEnd)


# -- script-only events ------------------------------------------------------


@dataclass(frozen=True)
class Clean:
    """One dust spot wiped inside a Clean task."""

    task_node_id: str


@dataclass(frozen=True)
class ResetDialogue:
    """The player walked away mid-conversation; it restarts from its first line."""

    dialogue_node_id: str


@dataclass(frozen=True)
class ToggleGuidance:
    """Controller button toggling light-point navigation."""


Event = Union[GazeDwell, RayClick, Proximity, Grab, CleanComplete, MediaEnd,
              DialogueEnd, Clean, ResetDialogue, ToggleGuidance]


def trigger_target(trigger) -> str | None:
    """Scene entity id a trigger refers to, or None for completion triggers."""
    return getattr(trigger, "target_id", None)


def trigger_node(trigger) -> str | None:
    for name in ("task_node_id", "media_node_id", "dialogue_node_id"):
        if hasattr(trigger, name):
            return getattr(trigger, name)
    return None


def event_matches(edge_trigger, event) -> bool:
    if type(edge_trigger) is not type(event):
        return False
    if isinstance(event, GazeDwell):
        return event.target_id == edge_trigger.target_id and event.dwell_s >= edge_trigger.dwell_s
    if isinstance(event, Proximity):
        return event.target_id == edge_trigger.target_id and event.radius_m <= edge_trigger.radius_m
    return event == edge_trigger


# -- nodes ------------------------------------------------------------------


@dataclass(frozen=True)
class Dialogue:
    speaker_slice_id: str
    lines: tuple[str, ...]
    # auto_start dialogues begin on entry; others wait for a click on the speaker
    auto_start: bool = False

    def __post_init__(self):
        _require(len(self.lines) >= 1, "lines", "a dialogue needs at least one line")


@dataclass(frozen=True)
class Task:
    """A Clean task: grab every ``target_ids`` tool, then wipe ``spot_count`` spots."""

    spot_count: int = DEFAULT_SPOT_COUNT
    target_ids: tuple[str, ...] = ()
    task_kind: str = "Clean"

    def __post_init__(self):
        _require(self.task_kind == "Clean", "task_kind", "only Clean tasks are supported")
        _require(self.spot_count >= 1, "spot_count", "must be >= 1")


@dataclass(frozen=True)
class Media:
    duration_s: float

    def __post_init__(self):
        _require(math.isfinite(self.duration_s) and self.duration_s > 0,
                 "duration_s", "must be > 0")


@dataclass(frozen=True)
class Teleport:
    target_scene_id: str
    spawn: Placement = Placement()


NodeKind = Union[Dialogue, Task, Media, Teleport]


@dataclass(frozen=True)
class NarrativeNode:
    node_id: str
    kind: NodeKind
    delivers: frozenset[str] = frozenset()


@dataclass(frozen=True)
class Edge:
    from_node: str
    to_node: str
    trigger: Trigger


class KnowledgeSource(str, enum.Enum):
    DIALOGUE_LINE = "DialogueLine"
    MEDIA_NODE = "MediaNode"


@dataclass(frozen=True)
class KnowledgeItem:
    item_id: str
    summary: str
    source: KnowledgeSource


@dataclass(frozen=True)
class GuidanceConfig:
    enabled_by: str = "ControllerButton"
    waypoint_paths: dict[str, tuple[Vec3, ...]] = field(default_factory=dict)

    def __post_init__(self):
        _require(self.enabled_by == "ControllerButton", "enabled_by",
                 "only ControllerButton is supported")

    def path_for(self, node_id: str) -> tuple[Vec3, ...]:
        return self.waypoint_paths.get(node_id, ())


@dataclass(frozen=True)
class NarrativeGraph:
    nodes: tuple[NarrativeNode, ...]
    start_node: str
    terminal_nodes: frozenset[str]
    edges: tuple[Edge, ...] = ()
    knowledge_items: tuple[KnowledgeItem, ...] = ()
    guidance: GuidanceConfig = GuidanceConfig()

    def node(self, node_id: str) -> NarrativeNode | None:
        return self._index().get(node_id)

    def outgoing(self, node_id: str) -> list[Edge]:
        return [e for e in self.edges if e.from_node == node_id]

    def item_ids(self) -> set[str]:
        return {k.item_id for k in self.knowledge_items}

    def _index(self) -> dict[str, NarrativeNode]:
        # frozen: cache through object.__setattr__ on first use
        idx = self.__dict__.get("_node_index")
        if idx is None:
            idx = {}
            for n in self.nodes:
                idx.setdefault(n.node_id, n)
            object.__setattr__(self, "_node_index", idx)
        return idx


register_variants(Event, NodeKind)
