"""Canonical source rendering of a syntax tree (parses back to an equal tree)."""

from __future__ import annotations

import json

from . import ast as A
from .parser import DIRECTIONS

_PREC = {"or": 1, "and": 2, "==": 4, "!=": 4, "<": 4, "<=": 4, ">": 4, ">=": 4,
         "+": 5, "-": 5, "*": 6, "/": 6, "%": 6}
_ARROWS = {v: k for k, v in DIRECTIONS.items()}
INDENT = "    "


def _literal(value) -> str:
    if value is None:
        return "null"
    if value is True:
        return "true"
    if value is False:
        return "false"
    if isinstance(value, str):
        return json.dumps(value, ensure_ascii=False)
    return repr(value)


def expr(e: A.Expr, prec: int = 0) -> str:
    """Render ``e``; parenthesise when its binding is looser than ``prec``."""
    if isinstance(e, A.Literal):
        text, own = _literal(e.value), 9
        if isinstance(e.value, (int, float)) and not isinstance(e.value, bool) and e.value < 0:
            own = 7
    elif isinstance(e, A.ListLit):
        text, own = "[" + ", ".join(expr(i) for i in e.items) + "]", 9
    elif isinstance(e, A.MapLit):
        text = "{" + ", ".join(f"{_literal(k)}: {expr(v)}" for k, v in e.pairs) + "}"
        own = 9
    elif isinstance(e, A.Name):
        text, own = e.id, 9
    elif isinstance(e, A.Ctx):
        text, own = e.which, 9
    elif isinstance(e, A.Attr):
        text, own = f"{expr(e.obj, 8)}.{e.name}", 8
    elif isinstance(e, A.Index):
        text, own = f"{expr(e.obj, 8)}[{expr(e.index)}]", 8
    elif isinstance(e, A.Call):
        parts = [expr(a) for a in e.args] + [f"{k}={expr(v)}" for k, v in e.kwargs]
        text, own = f"{expr(e.func, 8)}({', '.join(parts)})", 8
    elif isinstance(e, A.Unary):
        if e.op == "not":
            text, own = f"not {expr(e.operand, 3)}", 3
        else:
            inner = expr(e.operand, 7)
            # "-[" would lex as the connect arrow.
            text, own = (f"- {inner}" if inner.startswith("[") else f"-{inner}"), 7
    elif isinstance(e, A.Binary):
        own = _PREC[e.op]
        text = f"{expr(e.left, own)} {e.op} {expr(e.right, own + 1)}"
    elif isinstance(e, A.Connect):
        fields = ""
        if e.fields:
            fields = "{" + ", ".join(f"{k}={expr(v)}" for k, v in e.fields) + "}"
        text = f"connect {expr(e.src, 8)} -[{e.edge_type}{fields}]-> {expr(e.dst, 8)}"
        own = 0
    else:
        raise TypeError(f"not an expression: {e!r}")
    return f"({text})" if own < prec or (own == 0 and prec > 0) else text


def _block(stmts: list[A.Stmt], depth: int) -> list[str]:
    out = []
    for s in stmts:
        out.extend(stmt(s, depth))
    return out


def _braced(head: str, body: list[A.Stmt], depth: int) -> list[str]:
    pad = INDENT * depth
    if not body:
        return [f"{pad}{head} {{}}"]
    return [f"{pad}{head} {{", *_block(body, depth + 1), f"{pad}}}"]


def stmt(s: A.Stmt, depth: int = 0) -> list[str]:
    pad = INDENT * depth
    if isinstance(s, A.Let):
        return [f"{pad}let {s.name} = {expr(s.value)};"]
    if isinstance(s, A.Assign):
        return [f"{pad}{expr(s.target)} {s.op} {expr(s.value)};"]
    if isinstance(s, A.If):
        lines = _braced(f"if {expr(s.cond)}", s.then, depth)
        if s.orelse is not None:
            if len(s.orelse) == 1 and isinstance(s.orelse[0], A.If):
                tail = stmt(s.orelse[0], depth)
                lines[-1] += " else " + tail[0].lstrip()
                lines.extend(tail[1:])
            else:
                tail = _braced("else", s.orelse, depth)
                lines[-1] += " " + tail[0].lstrip()
                lines.extend(tail[1:])
        return lines
    if isinstance(s, A.For):
        return _braced(f"for {s.var} in {expr(s.iter)}", s.body, depth)
    if isinstance(s, A.Spawn):
        tail = f" from {expr(s.entry)}" if s.entry is not None else ""
        return [f"{pad}spawn {expr(s.walker)} on {expr(s.target)}{tail};"]
    if isinstance(s, A.Visit):
        if s.target is None:
            arrow = _ARROWS[s.direction]
            kind = f"[{s.type_name}]" if s.type_name else ""
            return [f"{pad}visit {arrow}{kind};"]
        return [f"{pad}visit {expr(s.target)};"]
    if isinstance(s, A.Skip):
        return [f"{pad}skip;"]
    if isinstance(s, A.Disengage):
        return [f"{pad}disengage;"]
    if isinstance(s, A.Del):
        return [f"{pad}del {expr(s.target)};"]
    if isinstance(s, A.Report):
        return [f"{pad}report {expr(s.value)};"]
    if isinstance(s, A.ExprStmt):
        return [f"{pad}{expr(s.expr)};"]
    raise TypeError(f"not a statement: {s!r}")


def decl(d: A.ArchetypeDecl) -> list[str]:
    head = f"{d.kind} {d.name}" + (f" : {d.parent}" if d.parent else "")
    if not d.fields and not d.abilities:
        return [f"{head} {{}}"]
    lines = [f"{head} {{"]
    for f in d.fields:
        default = f" = {expr(f.default)}" if f.default is not None else ""
        lines.append(f"{INDENT}has {f.name}: {f.kind}{default};")
    for a in d.abilities:
        trigger = f"{a.trigger} " if a.trigger else ""
        lines.extend(_braced(f"can {a.name} with {trigger}{a.phase}", a.body, 1))
    lines.append("}")
    return lines


def pretty(program: A.Program) -> str:
    chunks = ["\n".join(decl(d)) for d in program.decls]
    if program.driver:
        chunks.append("\n".join(line for s in program.driver for line in stmt(s)))
    return "\n\n".join(chunks) + ("\n" if chunks else "")
