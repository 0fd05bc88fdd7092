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
from .cfg import Cfg, Node, build_cfg
from .parser import parse_files, parse_program, parse_source, resolve_program, tokenize
from .printer import format_program

__all__ = [
    "AccessPath",
    "Annotation",
    "CallStmt",
    "Cfg",
    "ClassDecl",
    "FieldDecl",
    "FunctionDecl",
    "IfStmt",
    "LocalDecl",
    "LoopStmt",
    "MethodDecl",
    "Node",
    "Param",
    "Program",
    "SourceLoc",
    "build_cfg",
    "format_program",
    "parse_files",
    "parse_program",
    "parse_source",
    "resolve_program",
    "tokenize",
]
