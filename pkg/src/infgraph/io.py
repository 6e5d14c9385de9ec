"""Reading and writing presentation files (one JSON object per file, tagged by ``type``)."""
from __future__ import annotations

import json
from pathlib import Path

from .chr import ContextualSystem
from .errors import ValidationError
from .graph import Graph
from .hr import HRGrammar
from .prefixrec import PrefixRecGraph
from .rational import RationalGraph

LOADERS = {
    "rational": RationalGraph.from_json,
    "prefrec": PrefixRecGraph.from_json,
    "hr": HRGrammar.from_json,
    "chr": ContextualSystem.from_json,
    "contextual": ContextualSystem.from_json,
    "graph": Graph.from_json,
}


def from_dict(data: dict):
    if not isinstance(data, dict):
        raise ValidationError("a presentation file holds one JSON object")
    kind = data.get("type", "graph" if "arcs" in data else None)
    if kind not in LOADERS:
        raise ValidationError(f"unknown presentation type {kind!r}; expected one of {sorted(LOADERS)}")
    try:
        return LOADERS[kind](data)
    except (KeyError, TypeError, IndexError) as e:
        raise ValidationError(f"malformed {kind} presentation: {e!r}") from e


def to_dict(obj) -> dict:
    data = obj.to_json()
    if isinstance(obj, Graph):
        data = {"type": "graph", **data}
    return data


def load(path: str | Path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ValidationError(f"cannot read {path}: {e.strerror}") from e
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ValidationError(f"{path}: invalid JSON ({e.msg} at line {e.lineno})") from e
    return from_dict(data)


def dumps(obj) -> str:
    return json.dumps(to_dict(obj), indent=2, ensure_ascii=False, sort_keys=False) + "\n"


def save(obj, path: str | Path) -> None:
    Path(path).write_text(dumps(obj), encoding="utf-8")
