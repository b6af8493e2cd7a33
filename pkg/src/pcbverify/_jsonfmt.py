"""Deterministic JSON writer shared by the circuit, KG and template formats.

Output is two-space indented with LF line endings and a trailing newline.
Leaf containers (holding only scalars, or lists of scalar-only lists) are
written on one line when they fit, which keeps pin tables and endpoint lists
readable without affecting determinism.
"""

from __future__ import annotations

import json
from typing import Any

_INLINE_WIDTH = 96


def _is_scalar(x: Any) -> bool:
    return not isinstance(x, (dict, list, tuple))


def _inlineable(x: Any) -> bool:
    if isinstance(x, dict):
        items = x.values()
    elif isinstance(x, (list, tuple)):
        items = x
    else:
        return True
    if all(_is_scalar(v) for v in items):
        return True
    return isinstance(x, (list, tuple)) and all(
        isinstance(v, (list, tuple)) and all(_is_scalar(w) for w in v) for v in x
    )


def _inline(x: Any) -> str:
    return json.dumps(x, ensure_ascii=False, separators=(", ", ": "))


def _render(x: Any, depth: int) -> str:
    if _is_scalar(x):
        return json.dumps(x, ensure_ascii=False)
    pad = "  " * (depth + 1)
    if _inlineable(x):
        text = _inline(x)
        if len(text) + len(pad) <= _INLINE_WIDTH or not x:
            return text
    if isinstance(x, dict):
        if not x:
            return "{}"
        body = ",\n".join(
            f"{pad}{json.dumps(k, ensure_ascii=False)}: {_render(v, depth + 1)}"
            for k, v in x.items()
        )
        return "{\n" + body + "\n" + "  " * depth + "}"
    if not x:
        return "[]"
    body = ",\n".join(f"{pad}{_render(v, depth + 1)}" for v in x)
    return "[\n" + body + "\n" + "  " * depth + "]"


def dumps(doc: Any) -> str:
    """Render ``doc`` with key order preserved as given."""
    return _render(doc, 0) + "\n"


def dump_bytes(doc: Any) -> bytes:
    return dumps(doc).encode("utf-8")
