"""Syntax tree of TSL programs.

Source locations never take part in equality, so a pretty-printed and
re-parsed program compares equal to the original.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union


@dataclass(frozen=True)
class SourceLoc:
    file: str
    line: int
    col: int

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.col}"


NOWHERE = SourceLoc("<unknown>", 0, 0)


def _loc():
    return field(default=NOWHERE, compare=False, repr=False)


@dataclass(frozen=True, order=True)
class AccessPath:
    """A root variable (or ``this``) followed by field selections."""

    root: str
    fields: tuple[str, ...] = ()

    def __str__(self) -> str:
        return ".".join((self.root,) + self.fields)

    @classmethod
    def parse(cls, text: str) -> "AccessPath":
        root, *rest = text.split(".")
        return cls(root, tuple(rest))

    def child(self, name: str) -> "AccessPath":
        return AccessPath(self.root, self.fields + (name,))

    def has_prefix(self, other: "AccessPath") -> bool:
        return self.root == other.root and self.fields[: len(other.fields)] == other.fields

    def rebase(self, prefix: "AccessPath", new: "AccessPath") -> "AccessPath":
        """Replace ``prefix`` (which must be a prefix of self) by ``new``."""
        return AccessPath(new.root, new.fields + self.fields[len(prefix.fields):])


@dataclass
class Annotation:
    kind: str
    names: tuple[str, ...] = ()
    loc: SourceLoc = _loc()


@dataclass
class Param:
    type_name: str
    name: str


@dataclass
class FieldDecl:
    type_name: str
    name: str
    loc: SourceLoc = _loc()


@dataclass
class LocalDecl:
    type_name: str
    name: str
    loc: SourceLoc = _loc()


@dataclass
class CallStmt:
    receiver: AccessPath
    method: str
    args: tuple[AccessPath, ...] = ()
    loc: SourceLoc = _loc()
    # filled in by name resolution
    receiver_type: str = field(default="", compare=False, repr=False)
    arg_types: tuple[str, ...] = field(default=(), compare=False, repr=False)


@dataclass
class IfStmt:
    then: list
    orelse: Optional[list] = None
    loc: SourceLoc = _loc()


@dataclass
class LoopStmt:
    body: list
    loc: SourceLoc = _loc()


Stmt = Union[LocalDecl, CallStmt, IfStmt, LoopStmt]


@dataclass
class MethodDecl:
    name: str
    params: list[Param] = field(default_factory=list)
    annotations: list[Annotation] = field(default_factory=list)
    body: Optional[list] = None
    is_constructor: bool = False
    loc: SourceLoc = _loc()


@dataclass
class ClassDecl:
    name: str
    fields: list[FieldDecl] = field(default_factory=list)
    methods: list[MethodDecl] = field(default_factory=list)
    loc: SourceLoc = _loc()

    @property
    def is_base(self) -> bool:
        """Carries a contract: any annotation, explicit constructor or bodyless method."""
        return any(m.annotations or m.is_constructor or m.body is None for m in self.methods)

    def method(self, name: str) -> Optional[MethodDecl]:
        for m in self.methods:
            if m.name == name and not m.is_constructor:
                return m
        return None

    def field_type(self, name: str) -> Optional[str]:
        for f in self.fields:
            if f.name == name:
                return f.type_name
        return None


@dataclass
class FunctionDecl:
    name: str
    body: list = field(default_factory=list)
    loc: SourceLoc = _loc()


@dataclass
class Program:
    classes: list[ClassDecl] = field(default_factory=list)
    functions: list[FunctionDecl] = field(default_factory=list)

    def cls(self, name: str) -> Optional[ClassDecl]:
        for c in self.classes:
            if c.name == name:
                return c
        return None

    def function(self, name: str) -> Optional[FunctionDecl]:
        for f in self.functions:
            if f.name == name:
                return f
        return None

    def merged(self, other: "Program") -> "Program":
        return Program(self.classes + other.classes, self.functions + other.functions)


def walk_stmts(stmts):
    """Yield every statement, nested ones included, in source order."""
    for s in stmts:
        yield s
        if isinstance(s, IfStmt):
            yield from walk_stmts(s.then)
            if s.orelse is not None:
                yield from walk_stmts(s.orelse)
        elif isinstance(s, LoopStmt):
            yield from walk_stmts(s.body)
