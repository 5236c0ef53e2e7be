"""The engine-neutral runtime narrative file (``narrative.json``).

Layout, documented in docs/narrative.md::

    {"format": "mural2scene.narrative", "version": 1, "graph": {...}}

``graph`` is the graph in the same field/``type`` encoding the manifest uses.
"""

from __future__ import annotations

import json

from ..codec import Decoder, encode, from_plain
from ..errors import CompileError, Diagnostic, error, has_errors
from .model import NarrativeGraph
from .validate import validate_graph

FORMAT = "mural2scene.narrative"
VERSION = 1


def compile_narrative(g: NarrativeGraph, entity_ids=None) -> str:
    """Runtime file text for ``g``; refuses graphs with validation errors."""
    diags = validate_graph(g, entity_ids)
    if has_errors(diags):
        raise CompileError("NARRATIVE_INVALID", "narrative graph has errors",
                           [d for d in diags if d.is_error])
    doc = {"format": FORMAT, "version": VERSION, "graph": encode(g)}
    return json.dumps(doc, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def load_narrative(text: str) -> NarrativeGraph | list[Diagnostic]:
    try:
        doc = json.loads(text)
    except ValueError as exc:
        return [error("SYNTAX_ERROR", f"not JSON: {exc}")]
    if not isinstance(doc, dict) or doc.get("format") != FORMAT:
        return [error("INVALID_VALUE", f"not a {FORMAT} file")]
    if doc.get("version") != VERSION:
        return [error("INVALID_VALUE", f"unsupported version {doc.get('version')!r}")]
    dec = Decoder()
    g = dec.decode(from_plain(doc.get("graph")), NarrativeGraph, "graph")
    if dec.diagnostics or not isinstance(g, NarrativeGraph):
        return dec.diagnostics or [error("INVALID_VALUE", "invalid graph")]
    return g
