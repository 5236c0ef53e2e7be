"""Event scripts on disk: a YAML (or JSON) list of tagged events."""

from __future__ import annotations

import yaml

from ..codec import Decoder, encode
from ..errors import Diagnostic, error
from .model import Event


def parse_script(document: str | bytes, *, file: str | None = None) -> tuple | list[Diagnostic]:
    """A tuple of events, or a list of located diagnostics."""
    # imported here: manifest.parse pulls in the manifest package, which imports this one
    from ..manifest.parse import DocumentError, _clamp, _located, build_tree

    if isinstance(document, (bytes, bytearray)):
        try:
            document = bytes(document).decode("utf-8-sig")
        except UnicodeDecodeError as exc:
            return [error("ENCODING_ERROR", f"invalid UTF-8 at byte {exc.start}", file=file)]
    try:
        tree = build_tree(document)
    except DocumentError as exc:
        line, col = _clamp(document, exc.mark)
        return [error(exc.code, exc.message, line=line, column=col, file=file)]
    except yaml.YAMLError as exc:
        return [error("SYNTAX_ERROR", str(getattr(exc, "problem", None) or exc), file=file)]
    if tree is None:
        return ()
    dec = Decoder()
    events = dec.decode(tree, tuple[Event, ...])
    if dec.diagnostics:
        return _located(dec.diagnostics, document, file)
    return events


def serialize_script(events) -> str:
    return yaml.safe_dump([encode(e) for e in events], sort_keys=False, default_flow_style=None)
