"""Static checks: names, archetype kinds, triggers, operands, arities and contexts."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..values import VALUE_KINDS, conforms
from . import ast as A
from .builtins import BUILTINS
from .diagnostics import Diagnostic

INSTANCE_KINDS = ("object", "node", "edge", "walker")


@dataclass
class Scope:
    names: set[str] = field(default_factory=set)
    # Statically known archetype kind of a variable, when a constructor bound it.
    kinds: dict[str, str | None] = field(default_factory=dict)

    def copy(self) -> "Scope":
        return Scope(set(self.names), dict(self.kinds))


class Checker:
    def __init__(self, program: A.Program) -> None:
        self.program = program
        self.diags: list[Diagnostic] = []
        self.decls: dict[str, A.ArchetypeDecl] = {}
        self.owner: str | None = None  # enclosing ability owner kind

    def error(self, pos, message: str) -> None:
        line, col = pos
        self.diags.append(Diagnostic("error", max(line, 1), max(col, 1), message))

    # -- archetypes -------------------------------------------------------

    def kind_of(self, name: str) -> str | None:
        d = self.decls.get(name)
        return d.kind if d else None

    def fields_of(self, name: str) -> list[str]:
        out, seen = [], set()
        cur = self.decls.get(name)
        while cur is not None and cur.name not in seen:
            seen.add(cur.name)
            out = [f.name for f in cur.fields] + out
            cur = self.decls.get(cur.parent) if cur.parent else None
        return out

    def check_decls(self) -> None:
        for d in self.program.decls:
            if d.name in self.decls:
                self.error(d.pos, f"archetype {d.name!r} is already defined")
                continue
            if d.name in BUILTINS:
                self.error(d.pos, f"archetype {d.name!r} shadows a builtin function")
            self.decls[d.name] = d
        for d in self.program.decls:
            if self.decls.get(d.name) is not d:
                continue
            if d.parent is not None:
                parent = self.decls.get(d.parent)
                if parent is None:
                    self.error(d.pos, f"unknown parent archetype {d.parent!r}")
                elif parent.kind != d.kind:
                    self.error(d.pos, f"{d.kind} {d.name} cannot extend {parent.kind} {parent.name}")
                elif self._cyclic(d):
                    self.error(d.pos, f"inheritance cycle through {d.name!r}")
            inherited = set(self.fields_of(d.parent)) if d.parent and not self._cyclic(d) else set()
            seen: set[str] = set()
            for f in d.fields:
                if f.kind not in VALUE_KINDS:
                    self.error(f.pos, f"unknown field kind {f.kind!r}; expected one of {', '.join(VALUE_KINDS)}")
                if f.name in seen or f.name in inherited:
                    self.error(f.pos, f"field {f.name!r} is already declared")
                seen.add(f.name)
                if f.default is not None:
                    if not _constant(f.default):
                        self.error(f.default.pos, "field defaults must be constant literals")
                    elif f.kind in VALUE_KINDS and not conforms(f.kind, _const_value(f.default)):
                        self.error(f.default.pos, f"default for {f.name!r} is not a {f.kind}")
            if d.abilities and d.kind == "object":
                self.error(d.abilities[0].pos, f"object {d.name} cannot have abilities; only node, edge and walker archetypes can")
            for ab in d.abilities:
                if ab.trigger is not None:
                    tk = self.kind_of(ab.trigger)
                    if tk is None:
                        self.error(ab.pos, f"unknown trigger archetype {ab.trigger!r}")
                    elif d.kind == "walker" and tk not in ("node", "edge"):
                        self.error(ab.pos, f"walker ability {ab.name} must be triggered by a node or edge, not {tk} {ab.trigger}")
                    elif d.kind in ("node", "edge") and tk != "walker":
                        self.error(ab.pos, f"{d.kind} ability {ab.name} must be triggered by a walker, not {tk} {ab.trigger}")

    def _cyclic(self, d: A.ArchetypeDecl) -> bool:
        seen = set()
        cur: A.ArchetypeDecl | None = d
        while cur is not None and cur.parent is not None:
            if cur.name in seen:
                return True
            seen.add(cur.name)
            cur = self.decls.get(cur.parent)
        return False

    # -- statements -------------------------------------------------------

    def run(self) -> list[Diagnostic]:
        self.check_decls()
        global_names = set()
        for node in A.walk(self.program.driver):
            if isinstance(node, A.Let):
                global_names.add(node.name)
            elif isinstance(node, A.For):
                global_names.add(node.var)
        for d in self.program.decls:
            for ab in d.abilities:
                self.owner = d.kind
                self.block(ab.body, Scope(set(global_names)))
        self.owner = None
        self.block(self.program.driver, Scope())
        return self.diags

    def block(self, stmts: list[A.Stmt], scope: Scope) -> None:
        for s in stmts:
            self.stmt(s, scope)

    def stmt(self, s: A.Stmt, scope: Scope) -> None:
        if isinstance(s, A.Let):
            kind = self.expr(s.value, scope)
            scope.names.add(s.name)
            scope.kinds[s.name] = kind
        elif isinstance(s, A.Assign):
            kind = self.expr(s.value, scope)
            self.expr(s.target, scope)
            if isinstance(s.target, A.Name) and scope.kinds.get(s.target.id) != kind:
                scope.kinds[s.target.id] = None
        elif isinstance(s, A.If):
            self.expr(s.cond, scope)
            self.block(s.then, scope)
            if s.orelse is not None:
                self.block(s.orelse, scope)
        elif isinstance(s, A.For):
            self.expr(s.iter, scope)
            scope.names.add(s.var)
            scope.kinds[s.var] = None
            self.block(s.body, scope)
        elif isinstance(s, A.Spawn):
            wk = self.expr(s.walker, scope)
            if wk not in (None, "walker"):
                self.error(s.walker.pos, f"spawn needs a walker, got {_describe(wk)}")
            tk = self.expr(s.target, scope)
            if tk not in (None, "node", "edge"):
                self.error(s.target.pos, f"spawn target must be a node, edge or path, got {_describe(tk)}")
            if s.entry is not None:
                ek = self.expr(s.entry, scope)
                if tk == "node":
                    self.error(s.entry.pos, "'from' only applies when spawning on an edge")
                if ek not in (None, "node"):
                    self.error(s.entry.pos, f"spawn entry must be a node, got {_describe(ek)}")
        elif isinstance(s, A.Visit):
            self.need_ability(s.pos, "visit")
            if s.target is None:
                if s.type_name is not None and self.kind_of(s.type_name) not in ("node", "edge"):
                    self.error(s.pos, f"{s.type_name!r} is not a node or edge archetype")
            else:
                k = self.expr(s.target, scope)
                if k not in (None, "node", "edge"):
                    self.error(s.target.pos, f"visit target must be a node, edge, list or path, got {_describe(k)}")
        elif isinstance(s, (A.Skip, A.Disengage)):
            self.need_ability(s.pos, "skip" if isinstance(s, A.Skip) else "disengage")
        elif isinstance(s, A.Del):
            k = self.expr(s.target, scope)
            if k == "value":
                self.error(s.target.pos, "del needs an instance")
        elif isinstance(s, A.Report):
            self.expr(s.value, scope)
        elif isinstance(s, A.ExprStmt):
            self.expr(s.expr, scope)

    def need_ability(self, pos, what: str) -> None:
        if self.owner is None:
            self.error(pos, f"'{what}' is only allowed inside an ability body")

    # -- expressions ------------------------------------------------------

    def expr(self, e: A.Expr, scope: Scope) -> str | None:
        """Check ``e`` and return its static kind: an archetype kind, "value" or None (unknown)."""
        if isinstance(e, A.Literal):
            return "value"
        if isinstance(e, A.ListLit):
            for i in e.items:
                self.expr(i, scope)
            return None
        if isinstance(e, A.MapLit):
            for _, v in e.pairs:
                self.expr(v, scope)
            return "value"
        if isinstance(e, A.Name):
            if e.id in scope.names:
                return scope.kinds.get(e.id)
            if e.id in self.decls:
                return "value"
            self.error(e.pos, f"unknown name {e.id!r}")
            return None
        if isinstance(e, A.Ctx):
            return self.ctx(e)
        if isinstance(e, A.Attr):
            self.expr(e.obj, scope)
            return None
        if isinstance(e, A.Index):
            self.expr(e.obj, scope)
            self.expr(e.index, scope)
            return None
        if isinstance(e, A.Call):
            return self.call(e, scope)
        if isinstance(e, A.Unary):
            self.expr(e.operand, scope)
            return "value"
        if isinstance(e, A.Binary):
            self.expr(e.left, scope)
            self.expr(e.right, scope)
            return "value"
        if isinstance(e, A.Connect):
            ek = self.kind_of(e.edge_type)
            if ek is None:
                self.error(e.pos, f"unknown edge archetype {e.edge_type!r}")
            elif ek != "edge":
                self.error(e.pos, f"{e.edge_type} is a {ek}, not an edge archetype")
            else:
                known = self.fields_of(e.edge_type)
                for k, _ in e.fields:
                    if k not in known:
                        self.error(e.pos, f"edge {e.edge_type} has no field {k!r}")
            for _, v in e.fields:
                self.expr(v, scope)
            for operand in (e.src, e.dst):
                k = self.expr(operand, scope)
                if k not in (None, "node"):
                    self.error(operand.pos, f"edge creation needs two node operands, got {_describe(k)}")
            return "edge"
        raise TypeError(f"unexpected expression {e!r}")

    def ctx(self, e: A.Ctx) -> str | None:
        if self.owner is None:
            self.error(e.pos, f"'{e.which}' is only allowed inside an ability body")
            return None
        if e.which == "here":
            if self.owner != "walker":
                self.error(e.pos, "'here' is only allowed inside walker abilities")
            return None
        if e.which == "visitor":
            if self.owner == "walker":
                self.error(e.pos, "'visitor' is only allowed inside node and edge abilities")
            return "walker"
        if e.which == "self":
            return self.owner
        return "value"

    def call(self, e: A.Call, scope: Scope) -> str | None:
        for a in e.args:
            self.expr(a, scope)
        for _, v in e.kwargs:
            self.expr(v, scope)
        if isinstance(e.func, A.Attr):
            self.expr(e.func.obj, scope)
            return None
        if not isinstance(e.func, A.Name):
            self.error(e.pos, "only builtins, constructors and methods can be called")
            return None
        name = e.func.id
        if name in scope.names:
            self.error(e.func.pos, f"{name!r} is a variable, not a function")
            return None
        if name in self.decls:
            kind = self.decls[name].kind
            if kind == "edge":
                self.error(e.pos, f"edge {name} must be created with connect")
            if e.args:
                self.error(e.pos, f"{name}(...) takes keyword arguments only")
            known = self.fields_of(name)
            for k, _ in e.kwargs:
                if k not in known:
                    self.error(e.pos, f"{name} has no field {k!r}")
            return kind
        if name in BUILTINS:
            lo, hi, _ = BUILTINS[name]
            if e.kwargs:
                self.error(e.pos, f"{name}() takes no keyword arguments")
            if not lo <= len(e.args) <= hi:
                self.error(e.pos, f"{name}() takes {lo}..{hi} arguments, got {len(e.args)}")
            return None
        self.error(e.func.pos, f"unknown function {name!r}")
        return None


def _constant(e: A.Expr) -> bool:
    if isinstance(e, A.Literal):
        return True
    if isinstance(e, A.ListLit):
        return all(_constant(i) for i in e.items)
    if isinstance(e, A.MapLit):
        return all(_constant(v) for _, v in e.pairs)
    if isinstance(e, A.Unary) and e.op == "-":
        return isinstance(e.operand, A.Literal) and isinstance(e.operand.value, (int, float))
    return False


def _const_value(e: A.Expr):
    if isinstance(e, A.Literal):
        return e.value
    if isinstance(e, A.ListLit):
        return [_const_value(i) for i in e.items]
    if isinstance(e, A.MapLit):
        return {k: _const_value(v) for k, v in e.pairs}
    return -e.operand.value


def _describe(kind: str | None) -> str:
    return "a plain value" if kind == "value" else f"a {kind}"


def check(program: A.Program) -> list[Diagnostic]:
    return Checker(program).run()
