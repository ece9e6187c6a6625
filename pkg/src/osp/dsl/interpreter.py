"""Tree-walking interpreter lowering programs onto the graph, path and engine layers."""

from __future__ import annotations

import operator
from typing import Any, Callable

from ..abilities import AbilityDef, ExecutionContext, Phase, register_ability
from ..engine import DEFAULT_BUDGET, EdgeEntry, Engine, TraceEvent, Towards
from ..errors import OSPError
from ..graph import ArchetypeDef, Direction, FieldSpec, SystemState
from ..path import PathCollection
from ..values import Ref, coerce, conforms
from . import ast as A
from .builtins import BUILTINS, QueueView, TypeRef, render_report, type_name
from .checker import check
from .diagnostics import DiagnosticError, DslRuntimeError
from .parser import parse_source

_BINARY: dict[str, Callable[[Any, Any], Any]] = {
    "+": operator.add,
    "-": operator.sub,
    "*": operator.mul,
    "/": operator.truediv,
    "%": operator.mod,
    "==": operator.eq,
    "!=": operator.ne,
    "<": operator.lt,
    "<=": operator.le,
    ">": operator.gt,
    ">=": operator.ge,
}


class Env:
    def __init__(self, parent: "Env | None" = None) -> None:
        self.vars: dict[str, Any] = {}
        self.parent = parent

    def find(self, name: str) -> "Env | None":
        env: Env | None = self
        while env is not None:
            if name in env.vars:
                return env
            env = env.parent
        return None


class Interpreter:
    def __init__(
        self,
        program: A.Program,
        state: SystemState | None = None,
        budget: int = DEFAULT_BUDGET,
        on_event: Callable[[TraceEvent], None] | None = None,
    ) -> None:
        self.program = program
        self.state = state if state is not None else SystemState()
        self.engine = Engine(self.state, budget, on_event)
        self.globals = Env()
        self.types: dict[str, ArchetypeDef] = {}
        self.reports: list[str] = []

    @property
    def trace(self) -> list[TraceEvent]:
        return self.engine.trace

    # -- setup ------------------------------------------------------------

    def setup(self) -> None:
        by_name = {d.name: d for d in self.program.decls}
        done: set[str] = set()

        def define(d: A.ArchetypeDecl) -> None:
            if d.name in done:
                return
            if d.parent is not None:
                define(by_name[d.parent])
            fields = []
            for f in d.fields:
                if f.default is None:
                    fields.append(FieldSpec(f.name, f.kind))
                else:
                    value = coerce(f.kind, self.eval(f.default, self.globals, None))
                    fields.append(FieldSpec(f.name, f.kind, value, True))
            parent = self.types[d.parent] if d.parent else None
            try:
                arch = self.state.define(ArchetypeDef(d.name, d.kind, fields, parent))
            except OSPError as exc:
                raise DslRuntimeError(str(exc), d.pos) from exc
            self.types[d.name] = arch
            done.add(d.name)

        for d in self.program.decls:
            define(d)
        for d in self.program.decls:
            owner = self.types[d.name]
            for ab in d.abilities:
                trigger = self.types[ab.trigger] if ab.trigger else None
                register_ability(
                    AbilityDef(ab.name, owner, trigger, Phase(ab.phase), self._body(ab))
                )

    def _body(self, decl: A.AbilityDecl) -> Callable[[ExecutionContext], None]:
        def body(ctx: ExecutionContext) -> None:
            self.exec_block(decl.body, Env(self.globals), ctx)

        return body

    def run(self) -> None:
        self.setup()
        self.exec_block(self.program.driver, self.globals, None)

    # -- statements -------------------------------------------------------

    def exec_block(self, stmts: list[A.Stmt], env: Env, ctx: ExecutionContext | None) -> None:
        for s in stmts:
            self.exec(s, env, ctx)

    def exec(self, s: A.Stmt, env: Env, ctx: ExecutionContext | None) -> None:
        try:
            getattr(self, f"_x_{type(s).__name__}")(s, env, ctx)
        except OSPError as exc:
            if exc.pos is None:
                exc.pos = s.pos
            raise

    def _x_Let(self, s: A.Let, env, ctx) -> None:
        env.vars[s.name] = self.eval(s.value, env, ctx)

    def _x_Assign(self, s: A.Assign, env, ctx) -> None:
        value = self.eval(s.value, env, ctx)
        if s.op != "=":
            value = self._binary(s.op[0], self.eval(s.target, env, ctx), value, s.pos)
        t = s.target
        if isinstance(t, A.Name):
            scope = env.find(t.id)
            if scope is None:
                raise DslRuntimeError(f"assignment to undeclared name {t.id!r}", t.pos)
            scope.vars[t.id] = value
        elif isinstance(t, A.Attr):
            self._set_field(self.eval(t.obj, env, ctx), t.name, value, t.pos)
        else:
            self._set_index(self.eval(t.obj, env, ctx), self.eval(t.index, env, ctx), value, t.pos)

    def _x_If(self, s: A.If, env, ctx) -> None:
        if self._truth(self.eval(s.cond, env, ctx)):
            self.exec_block(s.then, env, ctx)
        elif s.orelse is not None:
            self.exec_block(s.orelse, env, ctx)

    def _x_For(self, s: A.For, env, ctx) -> None:
        for item in self._iterate(self.eval(s.iter, env, ctx), s.iter.pos):
            env.vars[s.var] = item
            self.exec_block(s.body, env, ctx)

    def _x_Spawn(self, s: A.Spawn, env, ctx) -> None:
        w = self.eval(s.walker, env, ctx)
        if not isinstance(w, Ref) or w.id not in self.state.walkers:
            raise DslRuntimeError(f"spawn needs a walker, got {self._show(w)}", s.walker.pos)
        target = self._location(self.eval(s.target, env, ctx), s.target.pos, allow_path=True)
        if s.entry is not None:
            entry = self.eval(s.entry, env, ctx)
            if not isinstance(entry, Ref) or entry.id not in self.state.nodes:
                raise DslRuntimeError(f"spawn entry must be a node, got {self._show(entry)}", s.entry.pos)
            target = EdgeEntry(target, entry.id)
        self.engine.spawn(w.id, target)

    def _x_Visit(self, s: A.Visit, env, ctx) -> None:
        if s.target is None:
            arch = self.types[s.type_name] if s.type_name else None
            target: Any = Towards(Direction.parse(s.direction), arch)
        else:
            value = self.eval(s.target, env, ctx)
            if isinstance(value, list):
                target = [self._location(v, s.target.pos, allow_path=True) for v in value]
            else:
                target = self._location(value, s.target.pos, allow_path=True)
        ctx.visit(target)

    def _x_Skip(self, s: A.Skip, env, ctx) -> None:
        ctx.skip()

    def _x_Disengage(self, s: A.Disengage, env, ctx) -> None:
        ctx.disengage()

    def _x_Del(self, s: A.Del, env, ctx) -> None:
        v = self.eval(s.target, env, ctx)
        if not isinstance(v, Ref):
            raise DslRuntimeError(f"del needs an instance, got {self._show(v)}", s.target.pos)
        self.state.delete(v.id)

    def _x_Report(self, s: A.Report, env, ctx) -> None:
        value = self.eval(s.value, env, ctx)
        text = render_report(self.state, value)
        self.reports.append(text)
        walker = ctx.walker if ctx is not None else None
        loc = self.state.location.get(walker) if walker is not None else None
        self.engine.report(value, walker=walker, location=loc, text=text)

    def _x_ExprStmt(self, s: A.ExprStmt, env, ctx) -> None:
        self.eval(s.expr, env, ctx)

    # -- expressions ------------------------------------------------------

    def eval(self, e: A.Expr, env: Env, ctx: ExecutionContext | None) -> Any:
        return getattr(self, f"_e_{type(e).__name__}")(e, env, ctx)

    def _e_Literal(self, e: A.Literal, env, ctx):
        return e.value

    def _e_ListLit(self, e: A.ListLit, env, ctx):
        return [self.eval(i, env, ctx) for i in e.items]

    def _e_MapLit(self, e: A.MapLit, env, ctx):
        return {k: self.eval(v, env, ctx) for k, v in e.pairs}

    def _e_Name(self, e: A.Name, env, ctx):
        scope = env.find(e.id)
        if scope is not None:
            return scope.vars[e.id]
        if e.id in self.types:
            return TypeRef(self.types[e.id])
        raise DslRuntimeError(f"unknown name {e.id!r}", e.pos)

    def _e_Ctx(self, e: A.Ctx, env, ctx):
        if ctx is None:
            raise DslRuntimeError(f"'{e.which}' used outside an ability", e.pos)
        if e.which == "self":
            return Ref(ctx.self_ref)
        if e.which == "here":
            return Ref(ctx.here)
        if e.which == "visitor":
            return Ref(ctx.visitor)
        return QueueView(self.state, ctx.walker)

    def _e_Attr(self, e: A.Attr, env, ctx):
        obj = self.eval(e.obj, env, ctx)
        inst = self._instance(obj, e.pos)
        if e.name not in inst.props:
            raise DslRuntimeError(f"{inst.archetype.name} has no field {e.name!r}", e.pos)
        return inst.props[e.name]

    def _e_Index(self, e: A.Index, env, ctx):
        obj = self.eval(e.obj, env, ctx)
        key = self.eval(e.index, env, ctx)
        if isinstance(obj, QueueView):
            seq: Any = [Ref(x) for x in obj.items]
        elif isinstance(obj, PathCollection):
            seq = [Ref(x) for x in obj.elements]
        else:
            seq = obj
        try:
            if isinstance(seq, dict):
                return seq[key]
            if isinstance(seq, (list, str)) and isinstance(key, int) and not isinstance(key, bool):
                return seq[key]
        except (KeyError, IndexError):
            raise DslRuntimeError(f"index {self._show(key)} out of range", e.pos) from None
        raise DslRuntimeError(f"cannot index {type_name(obj)} with {type_name(key)}", e.pos)

    def _e_Call(self, e: A.Call, env, ctx):
        if isinstance(e.func, A.Attr):
            obj = self.eval(e.func.obj, env, ctx)
            args = [self.eval(a, env, ctx) for a in e.args]
            return self._method(obj, e.func.name, args, e.pos)
        if not isinstance(e.func, A.Name):
            raise DslRuntimeError("only builtins, constructors and methods can be called", e.pos)
        name = e.func.id
        if env.find(name) is None and name in self.types:
            if e.args:
                raise DslRuntimeError(f"{name}(...) takes keyword arguments only", e.pos)
            arch = self.types[name]
            if arch.kind == "edge":
                raise DslRuntimeError(f"edge {name} must be created with connect", e.pos)
            props = {k: self.eval(v, env, ctx) for k, v in e.kwargs}
            return Ref(self.state.create_object(arch, props))
        if name in BUILTINS:
            lo, hi, fn = BUILTINS[name]
            if e.kwargs:
                raise DslRuntimeError(f"{name}() takes no keyword arguments", e.pos)
            args = [self.eval(a, env, ctx) for a in e.args]
            if not lo <= len(args) <= hi:
                raise DslRuntimeError(f"{name}() takes {lo}..{hi} arguments, got {len(args)}", e.pos)
            return fn(self, args, e.pos)
        raise DslRuntimeError(f"unknown function {name!r}", e.pos)

    def _e_Unary(self, e: A.Unary, env, ctx):
        v = self.eval(e.operand, env, ctx)
        if e.op == "not":
            return not self._truth(v)
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise DslRuntimeError(f"cannot negate {type_name(v)}", e.pos)
        return -v

    def _e_Binary(self, e: A.Binary, env, ctx):
        left = self.eval(e.left, env, ctx)
        if e.op == "and":
            return self._truth(left) and self._truth(self.eval(e.right, env, ctx))
        if e.op == "or":
            return self._truth(left) or self._truth(self.eval(e.right, env, ctx))
        return self._binary(e.op, left, self.eval(e.right, env, ctx), e.pos)

    def _e_Connect(self, e: A.Connect, env, ctx):
        src = self.eval(e.src, env, ctx)
        dst = self.eval(e.dst, env, ctx)
        props = {k: self.eval(v, env, ctx) for k, v in e.fields}
        for v, p in ((src, e.src.pos), (dst, e.dst.pos)):
            if not isinstance(v, Ref) or v.id not in self.state.nodes:
                raise DslRuntimeError(f"connect needs live nodes, got {self._show(v)}", p)
        return Ref(self.state.create_edge(self.types[e.edge_type], src.id, dst.id, props))

    # -- helpers ----------------------------------------------------------

    def _show(self, v: Any) -> str:
        return render_report(self.state, v)

    @staticmethod
    def _truth(v: Any) -> bool:
        if isinstance(v, QueueView):
            return bool(v.items)
        if isinstance(v, PathCollection):
            return bool(v.elements)
        return bool(v)

    def _binary(self, op: str, left: Any, right: Any, pos) -> Any:
        if op in ("==", "!="):
            return _BINARY[op](left, right)
        numeric = all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in (left, right))
        allowed = numeric or (
            op == "+" and type(left) is type(right) and isinstance(left, (str, list))
        ) or (op in ("<", "<=", ">", ">=") and isinstance(left, str) and isinstance(right, str))
        if not allowed:
            raise DslRuntimeError(
                f"unsupported operands for {op}: {type_name(left)} and {type_name(right)}", pos
            )
        try:
            return _BINARY[op](left, right)
        except ZeroDivisionError:
            raise DslRuntimeError("division by zero", pos) from None

    def _instance(self, v: Any, pos):
        if not isinstance(v, Ref):
            raise DslRuntimeError(f"field access on {type_name(v)}", pos)
        inst = self.state.instances.get(v.id)
        if inst is None:
            raise DslRuntimeError(f"instance {v!r} no longer exists", pos)
        return inst

    def _set_field(self, obj: Any, name: str, value: Any, pos) -> None:
        inst = self._instance(obj, pos)
        spec = next((f for f in inst.archetype.all_fields() if f.name == name), None)
        if spec is None:
            raise DslRuntimeError(f"{inst.archetype.name} has no field {name!r}", pos)
        if not conforms(spec.kind, value):
            raise DslRuntimeError(
                f"{inst.archetype.name}.{name} expects {spec.kind}, got {type_name(value)}", pos
            )
        inst.props[name] = coerce(spec.kind, value)

    def _set_index(self, obj: Any, key: Any, value: Any, pos) -> None:
        if isinstance(obj, dict) and isinstance(key, str):
            obj[key] = value
            return
        if isinstance(key, int) and not isinstance(key, bool):
            try:
                if isinstance(obj, list):
                    obj[key] = value
                    return
                if isinstance(obj, QueueView):
                    obj.items[key] = self._location(value, pos)
                    return
            except IndexError:
                raise DslRuntimeError(f"index {key} out of range", pos) from None
        raise DslRuntimeError(f"cannot assign into {type_name(obj)} with {type_name(key)}", pos)

    def _location(self, v: Any, pos, allow_path: bool = False) -> Any:
        if allow_path and isinstance(v, PathCollection):
            return v
        if isinstance(v, Ref) and self.state.is_location(v.id):
            return v.id
        raise DslRuntimeError(f"expected a live node or edge, got {self._show(v)}", pos)

    def _iterate(self, v: Any, pos) -> list:
        if isinstance(v, list):
            return list(v)
        if isinstance(v, dict):
            return list(v)
        if isinstance(v, str):
            return list(v)
        if isinstance(v, QueueView):
            return [Ref(x) for x in v.items]
        if isinstance(v, PathCollection):
            return [Ref(x) for x in v.elements]
        raise DslRuntimeError(f"cannot iterate over {type_name(v)}", pos)

    def _method(self, obj: Any, name: str, args: list, pos) -> Any:
        def need(lo: int, hi: int | None = None) -> None:
            hi = lo if hi is None else hi
            if not lo <= len(args) <= hi:
                raise DslRuntimeError(f".{name}() takes {lo}..{hi} arguments", pos)

        try:
            if isinstance(obj, QueueView):
                q = obj.items
                if name == "append":
                    need(1)
                    q.append(self._location(args[0], pos))
                    return None
                if name == "extend":
                    need(1)
                    q.extend(self._location(a, pos) for a in self._iterate(args[0], pos))
                    return None
                if name == "insert":
                    need(2)
                    q.insert(args[0], self._location(args[1], pos))
                    return None
                if name == "pop":
                    need(0, 1)
                    return Ref(q.pop(*args))
                if name == "clear":
                    need(0)
                    q.clear()
                    return None
            elif isinstance(obj, list):
                if name == "append":
                    need(1)
                    obj.append(args[0])
                    return None
                if name == "extend":
                    need(1)
                    obj.extend(self._iterate(args[0], pos))
                    return None
                if name == "insert":
                    need(2)
                    obj.insert(args[0], args[1])
                    return None
                if name == "pop":
                    need(0, 1)
                    return obj.pop(*args)
                if name == "clear":
                    need(0)
                    obj.clear()
                    return None
                if name == "copy":
                    need(0)
                    return list(obj)
                if name == "index":
                    need(1)
                    return obj.index(args[0])
            elif isinstance(obj, dict):
                if name == "keys":
                    need(0)
                    return list(obj)
                if name == "values":
                    need(0)
                    return list(obj.values())
                if name == "get":
                    need(1, 2)
                    return obj.get(args[0], args[1] if len(args) > 1 else None)
            elif isinstance(obj, str):
                if name in ("upper", "lower", "strip"):
                    need(0)
                    return getattr(obj, name)()
                if name == "split":
                    need(0, 1)
                    return obj.split(*args)
                if name in ("startswith", "endswith"):
                    need(1)
                    return getattr(obj, name)(args[0])
        except (IndexError, ValueError, TypeError) as exc:
            raise DslRuntimeError(f".{name}(): {exc}", pos) from None
        raise DslRuntimeError(f"{type_name(obj)} has no method {name!r}", pos)


def load(source: str) -> A.Program:
    """Parse and statically check ``source``; raises DiagnosticError on problems."""
    program = parse_source(source)
    diags = check(program)
    if diags:
        raise DiagnosticError(diags)
    return program


def run_source(
    source: str,
    budget: int = DEFAULT_BUDGET,
    on_event: Callable[[TraceEvent], None] | None = None,
) -> Interpreter:
    interp = Interpreter(load(source), budget=budget, on_event=on_event)
    interp.run()
    return interp
