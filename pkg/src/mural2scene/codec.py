"""Annotation-driven conversion between located document trees and dataclasses.

Documents are first turned into ``LMap``/``LSeq``/``LScalar`` trees that remember
where each value came from; ``Decoder`` then walks a target type's annotations,
collecting diagnostics instead of raising. ``encode`` is the inverse, producing
plain dicts/lists ready for YAML or JSON.
"""

from __future__ import annotations

import dataclasses
import enum
import functools
import math
import types
import typing
from dataclasses import dataclass
from typing import Any, Union

from .errors import Diagnostic, error
from .values import InvalidField

Mark = tuple[int, int] | None  # 1-based (line, column)


@dataclass
class LScalar:
    value: Any
    raw: str
    mark: Mark = None


@dataclass
class LSeq:
    items: list
    mark: Mark = None


@dataclass
class LMap:
    # (key, key mark, value node)
    items: list
    mark: Mark = None


LNode = Union[LScalar, LSeq, LMap]

DISCRIMINATOR = "type"


def from_plain(value) -> LNode:
    """Wrap plain JSON-like data so it can go through the same decoder."""
    if isinstance(value, dict):
        return LMap([(str(k), None, from_plain(v)) for k, v in value.items()])
    if isinstance(value, (list, tuple)):
        return LSeq([from_plain(v) for v in value])
    raw = "" if value is None else str(value)
    return LScalar(value, raw)


class _Invalid:
    def __repr__(self):
        return "<invalid>"


INVALID = _Invalid()


@functools.lru_cache(maxsize=None)
def _hints(cls) -> dict[str, Any]:
    return typing.get_type_hints(cls)


def schema_fields(cls) -> list[dataclasses.Field]:
    return [f for f in dataclasses.fields(cls) if f.compare]


def _is_union(tp) -> bool:
    origin = typing.get_origin(tp)
    return origin is Union or (hasattr(types, "UnionType") and origin is types.UnionType)


def _required(f: dataclasses.Field) -> bool:
    return f.default is dataclasses.MISSING and f.default_factory is dataclasses.MISSING


class Decoder:
    def __init__(self):
        self.diagnostics: list[Diagnostic] = []
        self.locations: dict[str, tuple[int, int]] = {}

    def _err(self, code: str, message: str, path: str, mark: Mark) -> _Invalid:
        line, col = mark if mark else (None, None)
        self.diagnostics.append(error(code, message, path, line=line, column=col))
        return INVALID

    def decode(self, node: LNode, tp, path: str = ""):
        if node.mark is not None:
            self.locations.setdefault(path, node.mark)
        if _is_union(tp):
            args = [a for a in typing.get_args(tp) if a is not type(None)]
            if isinstance(node, LScalar) and node.value is None and len(args) < len(typing.get_args(tp)):
                return None
            if len(args) == 1:
                return self.decode(node, args[0], path)
            return self._variant(node, args, path)
        origin = typing.get_origin(tp)
        if origin is tuple:
            return self._tuple(node, typing.get_args(tp), path)
        if origin is frozenset:
            items = self._tuple(node, (typing.get_args(tp)[0], ...), path)
            return items if items is INVALID else frozenset(items)
        if origin is dict:
            return self._dict(node, typing.get_args(tp)[1], path)
        if dataclasses.is_dataclass(tp):
            return self._dataclass(node, tp, path)
        return self._scalar(node, tp, path)

    # -- scalars ------------------------------------------------------------

    def _scalar(self, node: LNode, tp, path: str):
        if not isinstance(node, LScalar):
            return self._err("TYPE_ERROR", f"expected a {_type_name(tp)}", path, node.mark)
        v = node.value
        if isinstance(tp, type) and issubclass(tp, enum.Enum):
            for member in tp:
                if member.value == node.raw and isinstance(v, str):
                    return member
            choices = ", ".join(m.value for m in tp)
            return self._err("INVALID_VALUE", f"expected one of: {choices}", path, node.mark)
        if tp is str:
            if v is None or isinstance(v, (list, dict)):
                return self._err("TYPE_ERROR", "expected a string", path, node.mark)
            return node.raw
        if tp is bool:
            if isinstance(v, bool):
                return v
            return self._err("TYPE_ERROR", "expected true or false", path, node.mark)
        if tp is int:
            if isinstance(v, int) and not isinstance(v, bool):
                return v
            return self._err("TYPE_ERROR", "expected an integer", path, node.mark)
        if tp is float:
            if isinstance(v, bool):
                return self._err("TYPE_ERROR", "expected a number", path, node.mark)
            if isinstance(v, (int, float)):
                try:
                    f = float(v)
                except OverflowError:
                    return self._err("INVALID_VALUE", "number out of range", path, node.mark)
                return f
            if isinstance(v, str):
                try:
                    f = float(v)
                except ValueError:
                    pass
                else:
                    if math.isfinite(f):
                        return f
            return self._err("TYPE_ERROR", "expected a number", path, node.mark)
        return self._err("TYPE_ERROR", f"unsupported type {tp!r}", path, node.mark)

    # -- containers -----------------------------------------------------------

    def _tuple(self, node: LNode, args, path: str):
        if not isinstance(node, LSeq):
            return self._err("TYPE_ERROR", "expected a list", path, node.mark)
        if len(args) == 2 and args[1] is Ellipsis:
            item_types = [args[0]] * len(node.items)
        else:
            if len(node.items) != len(args):
                return self._err("TYPE_ERROR", f"expected a list of {len(args)} values",
                                 path, node.mark)
            item_types = list(args)
        out = [self.decode(item, t, f"{path}[{i}]")
               for i, (item, t) in enumerate(zip(node.items, item_types))]
        return INVALID if any(o is INVALID for o in out) else tuple(out)

    def _dict(self, node: LNode, value_type, path: str):
        if not isinstance(node, LMap):
            return self._err("TYPE_ERROR", "expected a mapping", path, node.mark)
        out = {}
        bad = False
        for key, kmark, vnode in node.items:
            sub = f"{path}.{key}" if path else key
            if key in out:
                self._err("DUPLICATE_KEY", f"duplicate key {key!r}", sub, kmark)
                bad = True
                continue
            val = self.decode(vnode, value_type, sub)
            bad |= val is INVALID
            out[key] = val
        return INVALID if bad else out

    def _variant(self, node: LNode, classes, path: str):
        if not isinstance(node, LMap):
            return self._err("TYPE_ERROR", "expected a mapping with a 'type' key", path, node.mark)
        by_name = {c.__name__: c for c in classes}
        tag = next((v for k, _, v in node.items if k == DISCRIMINATOR), None)
        if tag is None:
            return self._err("MISSING_FIELD", f"missing field 'type' (one of: {', '.join(by_name)})",
                             path, node.mark)
        if not isinstance(tag, LScalar) or tag.raw not in by_name:
            return self._err("INVALID_VALUE", f"'type' must be one of: {', '.join(by_name)}",
                             f"{path}.type", tag.mark)
        return self._dataclass(node, by_name[tag.raw], path, skip=DISCRIMINATOR)

    def _dataclass(self, node: LNode, cls, path: str, skip: str | None = None):
        if not isinstance(node, LMap):
            return self._err("TYPE_ERROR", f"expected a mapping ({cls.__name__})", path, node.mark)
        fields = {f.name: f for f in schema_fields(cls)}
        hints = _hints(cls)
        kwargs: dict[str, Any] = {}
        marks: dict[str, Mark] = {}
        bad = False
        for key, kmark, vnode in node.items:
            sub = f"{path}.{key}" if path else key
            if key == skip:
                continue
            if key not in fields:
                self._err("UNKNOWN_FIELD", f"unknown field {key!r} in {cls.__name__}", sub, kmark)
                bad = True
                continue
            if key in kwargs:
                self._err("DUPLICATE_KEY", f"duplicate key {key!r}", sub, kmark)
                bad = True
                continue
            val = self.decode(vnode, hints[key], sub)
            bad |= val is INVALID
            kwargs[key] = val
            marks[key] = vnode.mark or kmark
        for name, f in fields.items():
            if name not in kwargs and _required(f):
                self._err("MISSING_FIELD", f"missing required field {name!r} in {cls.__name__}",
                          path, node.mark)
                bad = True
        if bad:
            return INVALID
        try:
            return cls(**kwargs)
        except InvalidField as exc:
            sub = f"{path}.{exc.field_name}" if path else exc.field_name
            return self._err("INVALID_VALUE", str(exc), sub, marks.get(exc.field_name, node.mark))
        except (TypeError, ValueError, OverflowError) as exc:
            return self._err("INVALID_VALUE", str(exc), path, node.mark)


def _type_name(tp) -> str:
    return getattr(tp, "__name__", str(tp))


def encode(obj):
    """Plain-data form of a model value; the exact inverse of ``Decoder.decode``."""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        out: dict[str, Any] = {}
        if _needs_tag(type(obj)):
            out[DISCRIMINATOR] = type(obj).__name__
        for f in schema_fields(type(obj)):
            value = getattr(obj, f.name)
            if value is None:
                continue
            out[f.name] = encode(value)
        return out
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, frozenset):
        return sorted(encode(v) for v in obj)
    if isinstance(obj, (tuple, list)):
        return [encode(v) for v in obj]
    if isinstance(obj, dict):
        return {k: encode(obj[k]) for k in sorted(obj)}
    return obj


_VARIANT_CLASSES: set[type] = set()


def register_variants(*unions) -> None:
    """Mark the members of each union as needing a ``type`` tag when encoded."""
    for u in unions:
        _VARIANT_CLASSES.update(typing.get_args(u))


def _needs_tag(cls) -> bool:
    return cls in _VARIANT_CLASSES
