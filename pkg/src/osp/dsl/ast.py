"""Syntax tree. Positions are carried but ignored by equality."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Union

Pos = tuple[int, int]


def _pos() -> Any:
    return field(default=(0, 0), compare=False, repr=False, kw_only=True)


# -- expressions -------------------------------------------------------------


@dataclass
class Literal:
    value: Any
    pos: Pos = _pos()


@dataclass
class ListLit:
    items: list["Expr"]
    pos: Pos = _pos()


@dataclass
class MapLit:
    pairs: list[tuple[str, "Expr"]]
    pos: Pos = _pos()


@dataclass
class Name:
    id: str
    pos: Pos = _pos()


@dataclass
class Ctx:
    """One of ``self``, ``here``, ``visitor`` or ``path``."""

    which: str
    pos: Pos = _pos()


@dataclass
class Attr:
    obj: "Expr"
    name: str
    pos: Pos = _pos()


@dataclass
class Index:
    obj: "Expr"
    index: "Expr"
    pos: Pos = _pos()


@dataclass
class Call:
    func: "Expr"
    args: list["Expr"]
    kwargs: list[tuple[str, "Expr"]]
    pos: Pos = _pos()


@dataclass
class Unary:
    op: str
    operand: "Expr"
    pos: Pos = _pos()


@dataclass
class Binary:
    op: str
    left: "Expr"
    right: "Expr"
    pos: Pos = _pos()


@dataclass
class Connect:
    src: "Expr"
    edge_type: str
    fields: list[tuple[str, "Expr"]]
    dst: "Expr"
    pos: Pos = _pos()


Expr = Union[Literal, ListLit, MapLit, Name, Ctx, Attr, Index, Call, Unary, Binary, Connect]

# -- statements --------------------------------------------------------------


@dataclass
class Let:
    name: str
    value: Expr
    pos: Pos = _pos()


@dataclass
class Assign:
    target: Expr
    op: str  # "=", "+=" or "-="
    value: Expr
    pos: Pos = _pos()


@dataclass
class If:
    cond: Expr
    then: list["Stmt"]
    orelse: list["Stmt"] | None = None
    pos: Pos = _pos()


@dataclass
class For:
    var: str
    iter: Expr
    body: list["Stmt"]
    pos: Pos = _pos()


@dataclass
class Spawn:
    walker: Expr
    target: Expr
    entry: Expr | None = None
    pos: Pos = _pos()


@dataclass
class Visit:
    """``visit <expr>;`` or ``visit --> [Type];`` style direction visits."""

    target: Expr | None
    direction: str | None = None
    type_name: str | None = None
    pos: Pos = _pos()


@dataclass
class Skip:
    pos: Pos = _pos()


@dataclass
class Disengage:
    pos: Pos = _pos()


@dataclass
class Del:
    target: Expr
    pos: Pos = _pos()


@dataclass
class Report:
    value: Expr
    pos: Pos = _pos()


@dataclass
class ExprStmt:
    expr: Expr
    pos: Pos = _pos()


Stmt = Union[Let, Assign, If, For, Spawn, Visit, Skip, Disengage, Del, Report, ExprStmt]

# -- declarations ------------------------------------------------------------


@dataclass
class FieldDecl:
    name: str
    kind: str
    default: Expr | None = None
    pos: Pos = _pos()


@dataclass
class AbilityDecl:
    name: str
    trigger: str | None
    phase: str
    body: list[Stmt]
    pos: Pos = _pos()


@dataclass
class ArchetypeDecl:
    kind: str
    name: str
    parent: str | None
    fields: list[FieldDecl]
    abilities: list[AbilityDecl]
    pos: Pos = _pos()


@dataclass
class Program:
    decls: list[ArchetypeDecl]
    driver: list[Stmt]
    pos: Pos = _pos()


def walk(node: Any):
    """Yield ``node`` and every syntax node beneath it, depth first."""
    yield node
    if isinstance(node, list):
        for item in node:
            yield from walk(item)
        return
    if isinstance(node, tuple):
        for item in node:
            yield from walk(item)
        return
    if not hasattr(node, "__dataclass_fields__"):
        return
    for name in node.__dataclass_fields__:
        if name == "pos":
            continue
        yield from walk(getattr(node, name))
