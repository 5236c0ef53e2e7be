"""Manifest front end: bytes/text -> located tree -> SceneManifest or diagnostics.

The tree is built from the YAML event stream with an explicit stack; the
node-composing loaders recurse and cannot be trusted with hostile nesting.
"""

from __future__ import annotations

import re

import yaml

from ..codec import Decoder, LMap, LNode, LScalar, LSeq, Mark
from ..errors import Diagnostic, error, has_errors
from .model import SceneManifest

MAX_DEPTH = 64
# line breaks as YAML 1.1 counts them
_BREAKS = re.compile("\r\n|[\n\r\x85\u2028\u2029]")

try:
    _Loader = yaml.CSafeLoader
except AttributeError:  # pragma: no cover - pure-python PyYAML build
    _Loader = yaml.SafeLoader

_resolver = yaml.resolver.Resolver()
_constructor = yaml.constructor.SafeConstructor()


class DocumentError(Exception):
    def __init__(self, code: str, message: str, mark: Mark):
        self.code = code
        self.message = message
        self.mark = mark
        super().__init__(message)


def _mark(m) -> Mark:
    return (m.line + 1, m.column + 1) if m is not None else None


def _scalar(ev: yaml.ScalarEvent) -> LScalar:
    mark = _mark(ev.start_mark)
    tag = ev.tag
    if tag is None or tag == "!":
        tag = _resolver.resolve(yaml.ScalarNode, ev.value, ev.implicit)
    node = yaml.ScalarNode(tag, ev.value, ev.start_mark, ev.end_mark, ev.style)
    construct = yaml.constructor.SafeConstructor.yaml_constructors.get(tag)
    try:
        # scalar constructors keep no per-instance state, so one instance is shared
        constructed = construct(_constructor, node) if construct else ev.value
    except Exception:
        constructed = ev.value
    if not isinstance(constructed, (str, int, float, bool, type(None))):
        # timestamps, binary and friends are treated as their source text
        constructed = ev.value
    return LScalar(constructed, ev.value, mark)


def build_tree(text: str) -> LNode | None:
    """Located tree of a single YAML document; None for an empty document."""
    stack: list[tuple[LNode, list]] = []  # (container, pending key for maps)
    root: LNode | None = None
    docs = 0

    def attach(node: LNode):
        nonlocal root
        if not stack:
            root = node
            return
        parent, pending = stack[-1]
        if isinstance(parent, LSeq):
            parent.items.append(node)
        elif not pending:
            if not isinstance(node, LScalar):
                raise DocumentError("TYPE_ERROR", "mapping keys must be plain scalars", node.mark)
            pending.append(node)
        else:
            key = pending.pop()
            parent.items.append((key.raw, key.mark, node))

    for ev in yaml.parse(text, Loader=_Loader):
        if isinstance(ev, yaml.DocumentStartEvent):
            docs += 1
            if docs > 1:
                raise DocumentError("SYNTAX_ERROR", "expected a single document",
                                    _mark(ev.start_mark))
        elif isinstance(ev, yaml.AliasEvent):
            raise DocumentError("ALIAS_NOT_ALLOWED", "anchors and aliases are not supported",
                                _mark(ev.start_mark))
        elif isinstance(ev, yaml.ScalarEvent):
            if ev.anchor:
                raise DocumentError("ALIAS_NOT_ALLOWED", "anchors and aliases are not supported",
                                    _mark(ev.start_mark))
            attach(_scalar(ev))
        elif isinstance(ev, (yaml.SequenceStartEvent, yaml.MappingStartEvent)):
            if ev.anchor:
                raise DocumentError("ALIAS_NOT_ALLOWED", "anchors and aliases are not supported",
                                    _mark(ev.start_mark))
            if len(stack) >= MAX_DEPTH:
                raise DocumentError("NESTING_TOO_DEEP", f"nesting deeper than {MAX_DEPTH} levels",
                                    _mark(ev.start_mark))
            cls = LSeq if isinstance(ev, yaml.SequenceStartEvent) else LMap
            node = cls([], _mark(ev.start_mark))
            attach(node)
            stack.append((node, []))
        elif isinstance(ev, (yaml.SequenceEndEvent, yaml.MappingEndEvent)):
            stack.pop()
    return root


def _clamp(text: str, mark: Mark) -> tuple[int, int]:
    """Pull a mark back inside the document (parsers may point one past the end)."""
    lines = _BREAKS.split(text)
    if lines and lines[-1] == "" and len(lines) > 1:
        lines.pop()
    if mark is None:
        return 1, 1
    line, col = mark
    line = min(max(line, 1), max(len(lines), 1))
    width = len(lines[line - 1]) if lines else 0
    return line, min(max(col, 1), width + 1)


def _position_mark(text: str, index: int) -> Mark:
    before = text[:index]
    breaks = list(_BREAKS.finditer(before))
    start = breaks[-1].end() if breaks else 0
    return len(breaks) + 1, index - start + 1


def _bytes_mark(data: bytes, index: int) -> Mark:
    before = data[:index]
    line = before.count(b"\n") + 1
    return line, index - (before.rfind(b"\n") + 1) + 1


def _yaml_error_mark(exc: Exception, text: str) -> Mark:
    mark = getattr(exc, "problem_mark", None) or getattr(exc, "context_mark", None)
    if mark is not None:
        return _mark(mark)
    position = getattr(exc, "position", None)
    if isinstance(position, int):
        return _position_mark(text, position)
    return None


def _located(diags: list[Diagnostic], text: str, file: str | None) -> list[Diagnostic]:
    out = []
    for d in diags:
        line, col = _clamp(text, (d.line, d.column) if d.line is not None else None)
        out.append(Diagnostic(d.severity, d.code, d.message, d.path, line, col, file))
    return out


def parse_manifest(document: str | bytes, *, file: str | None = None,
                   validate: bool = True) -> SceneManifest | list[Diagnostic]:
    """Parse a manifest document.

    Returns the manifest, or a nonempty list of diagnostics that contains at
    least one error; never both. Every diagnostic carries a line/column
    inside the document. With ``validate`` the cross-entity checks of
    :func:`validate_manifest` also run, and their errors reject the document.
    """
    if isinstance(document, (bytes, bytearray)):
        data = bytes(document)
        try:
            text = data.decode("utf-8-sig")
        except UnicodeDecodeError as exc:
            line, col = _bytes_mark(data, exc.start)
            return [error("ENCODING_ERROR", f"invalid UTF-8 at byte {exc.start}",
                          line=line, column=col, file=file)]
    else:
        text = document
    try:
        tree = build_tree(text)
    except DocumentError as exc:
        line, col = _clamp(text, exc.mark)
        return [error(exc.code, exc.message, line=line, column=col, file=file)]
    except yaml.YAMLError as exc:
        line, col = _clamp(text, _yaml_error_mark(exc, text))
        problem = getattr(exc, "problem", None) or str(exc).splitlines()[0]
        return [error("SYNTAX_ERROR", str(problem), line=line, column=col, file=file)]
    except Exception as exc:  # totality: never let a reader bug escape
        return [error("SYNTAX_ERROR", f"unreadable document ({type(exc).__name__})",
                      line=1, column=1, file=file)]
    if tree is None:
        return [error("EMPTY_DOCUMENT", "the manifest is empty", line=1, column=1, file=file)]

    decoder = Decoder()
    try:
        manifest = decoder.decode(tree, SceneManifest)
    except Exception as exc:
        return [error("INVALID_VALUE", f"could not build manifest ({type(exc).__name__})",
                      line=1, column=1, file=file)]
    if decoder.diagnostics or not isinstance(manifest, SceneManifest):
        diags = decoder.diagnostics or [error("INVALID_VALUE", "invalid manifest", line=1, column=1)]
        return _located(diags, text, file)
    manifest.locations.update(decoder.locations)

    if validate:
        from .validate import validate_manifest

        diags = validate_manifest(manifest)
        if has_errors(diags):
            return _located([d for d in diags if d.is_error], text, file)
    return manifest
