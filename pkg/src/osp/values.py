"""Property values: kinds, defaults, instance references and rendering."""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass
from typing import Any

VALUE_KINDS = ("int", "float", "str", "bool", "list", "map", "ref")

_DEFAULTS: dict[str, Any] = {
    "int": 0,
    "float": 0.0,
    "str": "",
    "bool": False,
    "list": [],
    "map": {},
    "ref": None,
}


@dataclass(frozen=True, order=True)
class Ref:
    """A reference to an instance by id; liveness is checked on dereference."""

    id: int

    def __repr__(self) -> str:
        return f"@{self.id}"


def default_for(kind: str) -> Any:
    return copy.deepcopy(_DEFAULTS[kind])


def is_property_value(value: Any) -> bool:
    if value is None or isinstance(value, (bool, int, float, str, Ref)):
        return True
    if isinstance(value, list):
        return all(is_property_value(v) for v in value)
    if isinstance(value, dict):
        return all(isinstance(k, str) and is_property_value(v) for k, v in value.items())
    return False


def conforms(kind: str, value: Any) -> bool:
    """True when ``value`` may be stored in a field of the given kind."""
    if kind == "int":
        return isinstance(value, int) and not isinstance(value, bool)
    if kind == "float":
        return isinstance(value, (int, float)) and not isinstance(value, bool)
    if kind == "str":
        return isinstance(value, str)
    if kind == "bool":
        return isinstance(value, bool)
    if kind == "list":
        return isinstance(value, list) and is_property_value(value)
    if kind == "map":
        return isinstance(value, dict) and is_property_value(value)
    if kind == "ref":
        return value is None or isinstance(value, Ref)
    return False


def coerce(kind: str, value: Any) -> Any:
    if kind == "float" and isinstance(value, int):
        return float(value)
    return value


def render_value(value: Any) -> str:
    """Deterministic text form used by snapshots, reports and traces."""
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, Ref)):
        return repr(value)
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, str):
        return json.dumps(value, ensure_ascii=False)
    if isinstance(value, list):
        return "[" + ", ".join(render_value(v) for v in value) + "]"
    if isinstance(value, dict):
        inner = ", ".join(
            f"{json.dumps(k, ensure_ascii=False)}: {render_value(v)}" for k, v in value.items()
        )
        return "{" + inner + "}"
    return repr(value)


def render_props(props: dict[str, Any]) -> str:
    return "{" + ", ".join(f"{k}={render_value(v)}" for k, v in props.items()) + "}"
