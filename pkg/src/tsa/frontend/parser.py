"""Lexer, recursive-descent parser and name resolution for TSL."""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

from ..contracts import ANNOTATION_KINDS
from ..errors import NameResolutionError, TslSyntaxError, TslTypeError
from .ast import (
    AccessPath,
    Annotation,
    CallStmt,
    ClassDecl,
    FieldDecl,
    FunctionDecl,
    IfStmt,
    LocalDecl,
    LoopStmt,
    MethodDecl,
    Param,
    Program,
    SourceLoc,
)

KEYWORDS = frozenset({"class", "void", "if", "else", "loop", "this"})

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>//[^\n]*)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>[@(){};,.?])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # "ident", "kw", "punct" or "eof"
    text: str
    line: int
    col: int


def tokenize(source: str, filename: str = "<input>") -> list[Token]:
    tokens = []
    pos = 0
    line, line_start = 1, 0
    n = len(source)
    while pos < n:
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise TslSyntaxError(
                f"unexpected character {source[pos]!r}", filename, line, pos - line_start + 1
            )
        kind = m.lastgroup
        text = m.group()
        if kind == "ident":
            tokens.append(Token("kw" if text in KEYWORDS else "ident", text, line, pos - line_start + 1))
        elif kind == "punct":
            tokens.append(Token("punct", text, line, pos - line_start + 1))
        newlines = text.count("\n")
        if newlines:
            line += newlines
            line_start = pos + text.rfind("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


class Parser:
    def __init__(self, source: str, filename: str = "<input>"):
        self.filename = filename
        self.tokens = tokenize(source, filename)
        self.pos = 0

    # token helpers

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, k: int = 1) -> Token:
        return self.tokens[min(self.pos + k, len(self.tokens) - 1)]

    def loc(self, tok: Token | None = None) -> SourceLoc:
        tok = tok or self.tok
        return SourceLoc(self.filename, tok.line, tok.col)

    def error(self, expected: str):
        tok = self.tok
        found = "end of input" if tok.kind == "eof" else repr(tok.text)
        raise TslSyntaxError(f"expected {expected}, found {found}", self.filename, tok.line, tok.col, expected)

    def at(self, text: str) -> bool:
        return self.tok.kind in ("punct", "kw") and self.tok.text == text

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.error(repr(text))
        tok = self.tok
        self.pos += 1
        return tok

    def ident(self, what: str = "identifier") -> str:
        if self.tok.kind != "ident":
            self.error(what)
        text = self.tok.text
        self.pos += 1
        return text

    # grammar

    def program(self) -> Program:
        prog = Program()
        while self.tok.kind != "eof":
            if self.at("class"):
                prog.classes.append(self.classdecl())
            elif self.at("void"):
                prog.functions.append(self.funcdecl())
            else:
                self.error("'class' or 'void'")
        return prog

    def classdecl(self) -> ClassDecl:
        loc = self.loc()
        self.expect("class")
        cls = ClassDecl(self.ident("class name"), loc=loc)
        self.expect("{")
        while not self.at("}"):
            anns = []
            while self.at("@"):
                anns.append(self.annotation())
            if self.at("void"):
                cls.methods.append(self.methoddecl(anns))
            elif self.tok.kind == "ident" and self.peek().text == "(":
                cls.methods.append(self.constructor(cls.name, anns))
            elif self.tok.kind == "ident" and not anns:
                floc = self.loc()
                type_name = self.ident()
                name = self.ident("field name")
                self.expect(";")
                cls.fields.append(FieldDecl(type_name, name, floc))
            else:
                self.error("method declaration" if anns else "field or method declaration")
        self.expect("}")
        return cls

    def annotation(self) -> Annotation:
        loc = self.loc()
        self.expect("@")
        kind = self.ident("annotation name")
        if kind not in ANNOTATION_KINDS:
            self.pos -= 1
            self.error("one of " + ", ".join(ANNOTATION_KINDS))
        names: list[str] = []
        if kind in ("EnableAll", "DisableAll"):
            return Annotation(kind, (), loc)
        self.expect("(")
        names.append(self.ident("method name"))
        while self.at(","):
            self.pos += 1
            names.append(self.ident("method name"))
        self.expect(")")
        return Annotation(kind, tuple(names), loc)

    def constructor(self, class_name: str, anns) -> MethodDecl:
        loc = self.loc()
        name = self.ident()
        if name != class_name:
            self.pos -= 1
            self.error(f"constructor {class_name}() or 'void'")
        self.expect("(")
        self.expect(")")
        self.expect(";")
        return MethodDecl(name, [], list(anns), None, True, loc)

    def methoddecl(self, anns) -> MethodDecl:
        loc = self.loc()
        self.expect("void")
        name = self.ident("method name")
        self.expect("(")
        params = []
        if not self.at(")"):
            params.append(self.param())
            while self.at(","):
                self.pos += 1
                params.append(self.param())
        self.expect(")")
        if self.at(";"):
            self.pos += 1
            body = None
        else:
            body = self.block()
        return MethodDecl(name, params, list(anns), body, False, loc)

    def param(self) -> Param:
        type_name = self.ident("parameter type")
        return Param(type_name, self.ident("parameter name"))

    def funcdecl(self) -> FunctionDecl:
        loc = self.loc()
        self.expect("void")
        name = self.ident("function name")
        self.expect("(")
        self.expect(")")
        return FunctionDecl(name, self.block(), loc)

    def block(self) -> list:
        self.expect("{")
        stmts = []
        while not self.at("}"):
            stmts.append(self.stmt())
        self.expect("}")
        return stmts

    def stmt(self):
        loc = self.loc()
        if self.at("if"):
            self.pos += 1
            self.expect("(")
            self.expect("?")
            self.expect(")")
            then = self.block()
            orelse = None
            if self.at("else"):
                self.pos += 1
                orelse = self.block()
            return IfStmt(then, orelse, loc)
        if self.at("loop"):
            self.pos += 1
            return LoopStmt(self.block(), loc)
        if self.tok.kind == "ident" and self.peek().kind == "ident":
            type_name = self.ident()
            name = self.ident()
            self.expect(";")
            return LocalDecl(type_name, name, loc)
        if self.tok.kind == "ident" or self.at("this"):
            parts = [self.tok.text]
            self.pos += 1
            while self.at("."):
                self.pos += 1
                parts.append(self.ident("field or method name"))
            if len(parts) < 2:
                self.error("'.'")
            self.expect("(")
            args = []
            if not self.at(")"):
                args.append(self.path())
                while self.at(","):
                    self.pos += 1
                    args.append(self.path())
            self.expect(")")
            self.expect(";")
            return CallStmt(AccessPath(parts[0], tuple(parts[1:-1])), parts[-1], tuple(args), loc)
        self.error("statement")

    def path(self) -> AccessPath:
        if self.at("this"):
            root = "this"
            self.pos += 1
        else:
            root = self.ident("argument")
        fields = []
        while self.at("."):
            self.pos += 1
            fields.append(self.ident("field name"))
        return AccessPath(root, tuple(fields))


def parse_source(source: str, filename: str = "<input>") -> Program:
    """Parse without name resolution (useful when combining several files)."""
    return Parser(source, filename).program()


def parse_program(source: str, filename: str = "<input>") -> Program:
    return resolve_program(parse_source(source, filename))


def parse_files(paths) -> Program:
    prog = Program()
    for p in paths:
        p = Path(p)
        prog = prog.merged(parse_source(p.read_text(encoding="utf-8"), str(p)))
    return resolve_program(prog)


# name resolution


class _Resolver:
    def __init__(self, program: Program):
        self.program = program
        self.classes = {}
        for c in program.classes:
            if c.name in self.classes:
                raise NameResolutionError(f"{c.loc}: duplicate class {c.name}")
            self.classes[c.name] = c
        seen = set()
        for f in program.functions:
            if f.name in seen:
                raise NameResolutionError(f"{f.loc}: duplicate function {f.name}")
            seen.add(f.name)

    def run(self):
        for c in self.program.classes:
            self.check_class(c)
        self.check_field_cycles()
        for c in self.program.classes:
            if not c.is_base:
                for m in c.methods:
                    scope = {"this": c.name}
                    used = set(scope)
                    for p in m.params:
                        if p.name in used:
                            raise NameResolutionError(f"{m.loc}: duplicate parameter {p.name}")
                        scope[p.name] = p.type_name
                        used.add(p.name)
                    self.block(m.body, scope, used)
        for f in self.program.functions:
            self.block(f.body, {}, set())

    def check_class(self, c: ClassDecl):
        names = set()
        for f in c.fields:
            if f.name in names:
                raise NameResolutionError(f"{f.loc}: duplicate field {c.name}.{f.name}")
            names.add(f.name)
        names = set()
        for m in c.methods:
            if m.is_constructor:
                continue
            if m.name in names:
                raise NameResolutionError(f"{m.loc}: duplicate method {c.name}.{m.name}")
            names.add(m.name)
        if c.is_base:
            if c.fields:
                raise TslTypeError(f"{c.loc}: class {c.name} carries a contract and cannot declare fields")
            for m in c.methods:
                if m.body is not None:
                    raise TslTypeError(
                        f"{m.loc}: {c.name}.{m.name} has a body, but {c.name} carries a contract"
                    )

    def check_field_cycles(self):
        state = {}

        def visit(name, trail):
            state[name] = 1
            for f in self.classes[name].fields:
                if f.type_name not in self.classes:
                    continue
                if state.get(f.type_name) == 1:
                    cycle = trail + [f.type_name]
                    raise TslTypeError("recursive field types: " + " -> ".join(cycle))
                if f.type_name not in state:
                    visit(f.type_name, trail + [f.type_name])
            state[name] = 2

        for name in self.classes:
            if name not in state:
                visit(name, [name])

    def path_type(self, path: AccessPath, scope, loc) -> str:
        if path.root not in scope:
            what = "'this' outside a method" if path.root == "this" else f"undeclared variable {path.root}"
            raise NameResolutionError(f"{loc}: {what}")
        t = scope[path.root]
        for f in path.fields:
            cls = self.classes.get(t)
            ft = cls.field_type(f) if cls is not None else None
            if ft is None:
                raise NameResolutionError(f"{loc}: type {t} has no field {f}")
            t = ft
        return t

    def block(self, stmts, scope, used):
        scope = dict(scope)
        for s in stmts:
            if isinstance(s, LocalDecl):
                if s.name in used:
                    raise NameResolutionError(f"{s.loc}: variable {s.name} is already declared")
                scope[s.name] = s.type_name
                used.add(s.name)
            elif isinstance(s, CallStmt):
                self.call(s, scope)
            elif isinstance(s, IfStmt):
                self.block(s.then, scope, used)
                if s.orelse is not None:
                    self.block(s.orelse, scope, used)
            elif isinstance(s, LoopStmt):
                self.block(s.body, scope, used)

    def call(self, s: CallStmt, scope):
        rtype = self.path_type(s.receiver, scope, s.loc)
        cls = self.classes.get(rtype)
        if cls is None:
            raise TslTypeError(f"{s.loc}: {s.receiver} has type {rtype}, which declares no methods")
        m = cls.method(s.method)
        if m is None:
            raise TslTypeError(f"{s.loc}: class {rtype} has no method {s.method}")
        if len(s.args) != len(m.params):
            raise TslTypeError(
                f"{s.loc}: {rtype}.{s.method} takes {len(m.params)} argument(s), {len(s.args)} given"
            )
        arg_types = []
        for a, p in zip(s.args, m.params):
            t = self.path_type(a, scope, s.loc)
            if t != p.type_name:
                raise TslTypeError(f"{s.loc}: argument {a} has type {t}, expected {p.type_name}")
            arg_types.append(t)
        tracked = [s.receiver] + [a for a, t in zip(s.args, arg_types) if t in self.classes]
        for i, a in enumerate(tracked):
            for b in tracked[i + 1:]:
                if a.has_prefix(b) or b.has_prefix(a):
                    raise TslTypeError(f"{s.loc}: {a} and {b} may alias in this call")
        s.receiver_type = rtype
        s.arg_types = tuple(arg_types)


def resolve_program(program: Program) -> Program:
    """Check names and types in place and return the program."""
    _Resolver(program).run()
    return program
