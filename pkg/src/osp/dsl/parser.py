"""Recursive-descent parser; the grammar is written out in docs/grammar.md.

Context rules are enforced while parsing: ``visit``, ``skip``, ``disengage``,
``self`` and ``path`` need an enclosing ability, ``here`` a walker ability
and ``visitor`` a node or edge ability.
"""

from __future__ import annotations

from . import ast as A
from .diagnostics import Diagnostic, DiagnosticError
from .lexer import Token, tokenize

ARCHETYPE_KEYWORDS = ("node", "edge", "walker", "object")
DIRECTIONS = {"-->": "outgoing", "<--": "incoming", "<-->": "any"}
COMPARISONS = ("==", "!=", "<", "<=", ">", ">=")


class Parser:
    def __init__(self, tokens: list[Token], end: tuple[int, int] | None = None) -> None:
        if end is None:
            end = (tokens[-1].line, tokens[-1].col + 1) if tokens else (1, 1)
        self.toks = [*tokens, Token("eof", None, *end)]
        self.i = 0
        self.ability_owner: str | None = None  # kind of the enclosing ability's owner

    # -- token helpers ----------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, kind: str, value: object = None) -> bool:
        return self.tok.is_(kind, value)

    def at_op(self, *ops: str) -> bool:
        return self.tok.kind == "op" and self.tok.value in ops

    def at_kw(self, *words: str) -> bool:
        return self.tok.kind == "kw" and self.tok.value in words

    def advance(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def error(self, message: str, tok: Token | None = None) -> DiagnosticError:
        tok = tok or self.tok
        return DiagnosticError([Diagnostic("error", tok.line, tok.col, message)])

    def expected(self, *what: str) -> DiagnosticError:
        return self.error(f"expected {' or '.join(what)}, found {self.tok.describe()}")

    def expect_op(self, op: str) -> Token:
        if not self.at_op(op):
            raise self.expected(f"'{op}'")
        return self.advance()

    def expect_kw(self, *words: str) -> Token:
        if not self.at_kw(*words):
            raise self.expected(*(f"'{w}'" for w in words))
        return self.advance()

    def expect_ident(self) -> Token:
        if not self.at("ident"):
            raise self.expected("identifier")
        return self.advance()

    # -- program ----------------------------------------------------------

    def program(self) -> A.Program:
        decls, driver = [], []
        while not self.at("eof"):
            if self.at_kw(*ARCHETYPE_KEYWORDS):
                decls.append(self.archetype())
            else:
                driver.append(self.statement())
        return A.Program(decls, driver, pos=(1, 1))

    def archetype(self) -> A.ArchetypeDecl:
        kw = self.advance()
        name = self.expect_ident().value
        parent = None
        if self.at_op(":"):
            self.advance()
            parent = self.expect_ident().value
        self.expect_op("{")
        fields, abilities = [], []
        while not self.at_op("}"):
            if self.at_kw("has"):
                fields.append(self.field_decl())
            elif self.at_kw("can"):
                abilities.append(self.ability_decl(kw.value))
            else:
                raise self.expected("'has'", "'can'", "'}'")
        self.advance()
        return A.ArchetypeDecl(kw.value, name, parent, fields, abilities, pos=kw.pos)

    def field_decl(self) -> A.FieldDecl:
        start = self.advance()
        name = self.expect_ident().value
        self.expect_op(":")
        kind = self.expect_ident().value
        default = None
        if self.at_op("="):
            self.advance()
            default = self.expression()
        self.expect_op(";")
        return A.FieldDecl(name, kind, default, pos=start.pos)

    def ability_decl(self, owner_kind: str) -> A.AbilityDecl:
        start = self.advance()
        name = self.expect_ident().value
        self.expect_kw("with")
        trigger = None
        if self.at("ident"):
            trigger = self.advance().value
        phase = self.expect_kw("entry", "exit").value
        saved = self.ability_owner
        self.ability_owner = owner_kind
        try:
            body = self.block()
        finally:
            self.ability_owner = saved
        return A.AbilityDecl(name, trigger, phase, body, pos=start.pos)

    # -- statements -------------------------------------------------------

    def block(self) -> list[A.Stmt]:
        self.expect_op("{")
        body = []
        while not self.at_op("}"):
            if self.at("eof"):
                raise self.expected("'}'")
            body.append(self.statement())
        self.advance()
        return body

    def require_ability(self, tok: Token) -> None:
        if self.ability_owner is None:
            raise self.error(f"'{tok.value}' is only allowed inside an ability body", tok)

    def statement(self) -> A.Stmt:
        t = self.tok
        if t.kind == "kw":
            handler = getattr(self, f"stmt_{t.value}", None)
            if handler is not None:
                return handler()
        expr = self.expression()
        if self.at_op("=", "+=", "-="):
            op = self.advance().value
            if not isinstance(expr, (A.Name, A.Attr, A.Index)):
                raise self.error("left side of assignment must be a name, field or index", t)
            value = self.expression()
            self.expect_op(";")
            return A.Assign(expr, op, value, pos=t.pos)
        self.expect_op(";")
        return A.ExprStmt(expr, pos=t.pos)

    def stmt_let(self) -> A.Let:
        t = self.advance()
        name = self.expect_ident().value
        self.expect_op("=")
        value = self.expression()
        self.expect_op(";")
        return A.Let(name, value, pos=t.pos)

    def stmt_if(self) -> A.If:
        t = self.advance()
        cond = self.expression()
        then = self.block()
        orelse = None
        if self.at_kw("else"):
            self.advance()
            orelse = [self.stmt_if()] if self.at_kw("if") else self.block()
        return A.If(cond, then, orelse, pos=t.pos)

    def stmt_for(self) -> A.For:
        t = self.advance()
        var = self.expect_ident().value
        self.expect_kw("in")
        it = self.expression()
        return A.For(var, it, self.block(), pos=t.pos)

    def stmt_spawn(self) -> A.Spawn:
        t = self.advance()
        walker = self.expression()
        self.expect_kw("on")
        target = self.expression()
        entry = None
        if self.at_kw("from"):
            self.advance()
            entry = self.expression()
        self.expect_op(";")
        return A.Spawn(walker, target, entry, pos=t.pos)

    def stmt_visit(self) -> A.Visit:
        t = self.advance()
        self.require_ability(t)
        if self.at_op(*DIRECTIONS):
            direction = DIRECTIONS[self.advance().value]
            type_name = None
            if self.at_op("["):
                self.advance()
                type_name = self.expect_ident().value
                self.expect_op("]")
            self.expect_op(";")
            return A.Visit(None, direction, type_name, pos=t.pos)
        target = self.expression()
        self.expect_op(";")
        return A.Visit(target, pos=t.pos)

    def stmt_skip(self) -> A.Skip:
        t = self.advance()
        self.require_ability(t)
        self.expect_op(";")
        return A.Skip(pos=t.pos)

    def stmt_disengage(self) -> A.Disengage:
        t = self.advance()
        self.require_ability(t)
        self.expect_op(";")
        return A.Disengage(pos=t.pos)

    def stmt_del(self) -> A.Del:
        t = self.advance()
        target = self.expression()
        self.expect_op(";")
        return A.Del(target, pos=t.pos)

    def stmt_report(self) -> A.Report:
        t = self.advance()
        value = self.expression()
        self.expect_op(";")
        return A.Report(value, pos=t.pos)

    # -- expressions ------------------------------------------------------

    def expression(self) -> A.Expr:
        return self.or_expr()

    def or_expr(self) -> A.Expr:
        left = self.and_expr()
        while self.at_kw("or"):
            t = self.advance()
            left = A.Binary("or", left, self.and_expr(), pos=t.pos)
        return left

    def and_expr(self) -> A.Expr:
        left = self.not_expr()
        while self.at_kw("and"):
            t = self.advance()
            left = A.Binary("and", left, self.not_expr(), pos=t.pos)
        return left

    def not_expr(self) -> A.Expr:
        if self.at_kw("not"):
            t = self.advance()
            return A.Unary("not", self.not_expr(), pos=t.pos)
        return self.comparison()

    def comparison(self) -> A.Expr:
        left = self.additive()
        while self.at_op(*COMPARISONS):
            t = self.advance()
            left = A.Binary(t.value, left, self.additive(), pos=t.pos)
        return left

    def additive(self) -> A.Expr:
        left = self.term()
        while self.at_op("+", "-"):
            t = self.advance()
            left = A.Binary(t.value, left, self.term(), pos=t.pos)
        return left

    def term(self) -> A.Expr:
        left = self.unary()
        while self.at_op("*", "/", "%"):
            t = self.advance()
            left = A.Binary(t.value, left, self.unary(), pos=t.pos)
        return left

    def unary(self) -> A.Expr:
        if self.at_op("-"):
            t = self.advance()
            return A.Unary("-", self.unary(), pos=t.pos)
        return self.postfix()

    def postfix(self) -> A.Expr:
        expr = self.primary()
        while True:
            if self.at_op("."):
                t = self.advance()
                expr = A.Attr(expr, self.expect_ident().value, pos=t.pos)
            elif self.at_op("["):
                t = self.advance()
                index = self.expression()
                self.expect_op("]")
                expr = A.Index(expr, index, pos=t.pos)
            elif self.at_op("("):
                expr = self.call(expr)
            else:
                return expr

    def call(self, func: A.Expr) -> A.Call:
        t = self.expect_op("(")
        args, kwargs = [], []
        while not self.at_op(")"):
            if self.at("ident") and self.peek().is_("op", "="):
                key = self.advance()
                self.advance()
                if any(k == key.value for k, _ in kwargs):
                    raise self.error(f"duplicate keyword argument {key.value!r}", key)
                kwargs.append((key.value, self.expression()))
            else:
                if kwargs:
                    raise self.error("positional argument after keyword argument")
                args.append(self.expression())
            if not self.at_op(","):
                break
            self.advance()
        self.expect_op(")")
        return A.Call(func, args, kwargs, pos=t.pos)

    def primary(self) -> A.Expr:
        t = self.tok
        if t.kind in ("int", "float", "str"):
            self.advance()
            return A.Literal(t.value, pos=t.pos)
        if t.kind == "ident":
            self.advance()
            return A.Name(t.value, pos=t.pos)
        if t.kind == "kw":
            if t.value in ("true", "false", "null"):
                self.advance()
                return A.Literal({"true": True, "false": False, "null": None}[t.value], pos=t.pos)
            if t.value in ("self", "here", "visitor", "path"):
                self.advance()
                self.check_context(t)
                return A.Ctx(t.value, pos=t.pos)
            if t.value == "in" and self.peek().is_("op", "("):
                # ``in(...)`` is the incoming-neighbour query, not the keyword.
                self.advance()
                return A.Name("in", pos=t.pos)
            if t.value == "connect":
                return self.connect()
        if t.kind == "op":
            if t.value == "(":
                self.advance()
                inner = self.expression()
                self.expect_op(")")
                return inner
            if t.value == "[":
                self.advance()
                items = []
                while not self.at_op("]"):
                    items.append(self.expression())
                    if not self.at_op(","):
                        break
                    self.advance()
                self.expect_op("]")
                return A.ListLit(items, pos=t.pos)
            if t.value == "{":
                self.advance()
                pairs = []
                while not self.at_op("}"):
                    if not self.at("str"):
                        raise self.expected("string key")
                    key = self.advance().value
                    self.expect_op(":")
                    pairs.append((key, self.expression()))
                    if not self.at_op(","):
                        break
                    self.advance()
                self.expect_op("}")
                return A.MapLit(pairs, pos=t.pos)
        raise self.expected("expression")

    def check_context(self, t: Token) -> None:
        owner = self.ability_owner
        if owner is None:
            raise self.error(f"'{t.value}' is only allowed inside an ability body", t)
        if t.value == "here" and owner != "walker":
            raise self.error("'here' is only allowed inside walker abilities", t)
        if t.value == "visitor" and owner == "walker":
            raise self.error("'visitor' is only allowed inside node and edge abilities", t)

    def connect(self) -> A.Connect:
        t = self.advance()
        src = self.postfix()
        self.expect_op("-[")
        edge_type = self.expect_ident().value
        fields = []
        if self.at_op("{"):
            self.advance()
            while not self.at_op("}"):
                key = self.expect_ident().value
                self.expect_op("=")
                fields.append((key, self.expression()))
                if not self.at_op(","):
                    break
                self.advance()
            self.expect_op("}")
        self.expect_op("]->")
        dst = self.postfix()
        return A.Connect(src, edge_type, fields, dst, pos=t.pos)


def _end_of(source: str) -> tuple[int, int]:
    lines = source.split("\n")
    return (len(lines), len(lines[-1]) + 1)


def parse(tokens: list[Token], end: tuple[int, int] | None = None) -> A.Program:
    return Parser(tokens, end).program()


def parse_source(source: str) -> A.Program:
    return parse(tokenize(source), _end_of(source))
