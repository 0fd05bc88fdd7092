"""Pretty-printer producing canonical TSL text."""

from __future__ import annotations

from .ast import CallStmt, ClassDecl, FunctionDecl, IfStmt, LocalDecl, LoopStmt, MethodDecl, Program

INDENT = "    "


def _annotation(a) -> str:
    if a.names:
        return f"@{a.kind}({', '.join(a.names)})"
    return f"@{a.kind}"


def _block(stmts, depth: int, out: list[str]):
    pad = INDENT * depth
    for s in stmts:
        if isinstance(s, LocalDecl):
            out.append(f"{pad}{s.type_name} {s.name};")
        elif isinstance(s, CallStmt):
            args = ", ".join(map(str, s.args))
            out.append(f"{pad}{s.receiver}.{s.method}({args});")
        elif isinstance(s, IfStmt):
            out.append(f"{pad}if (?) {{")
            _block(s.then, depth + 1, out)
            if s.orelse is None:
                out.append(f"{pad}}}")
            else:
                out.append(f"{pad}}} else {{")
                _block(s.orelse, depth + 1, out)
                out.append(f"{pad}}}")
        elif isinstance(s, LoopStmt):
            out.append(f"{pad}loop {{")
            _block(s.body, depth + 1, out)
            out.append(f"{pad}}}")
        else:
            raise TypeError(f"not a statement: {s!r}")


def _method(cls: ClassDecl, m: MethodDecl, out: list[str]):
    for a in m.annotations:
        out.append(INDENT + _annotation(a))
    if m.is_constructor:
        out.append(f"{INDENT}{cls.name}();")
        return
    params = ", ".join(f"{p.type_name} {p.name}" for p in m.params)
    head = f"{INDENT}void {m.name}({params})"
    if m.body is None:
        out.append(head + ";")
    else:
        out.append(head + " {")
        _block(m.body, 2, out)
        out.append(INDENT + "}")


def format_class(cls: ClassDecl) -> str:
    out = [f"class {cls.name} {{"]
    for f in cls.fields:
        out.append(f"{INDENT}{f.type_name} {f.name};")
    for m in cls.methods:
        _method(cls, m, out)
    out.append("}")
    return "\n".join(out) + "\n"


def format_function(fn: FunctionDecl) -> str:
    out = [f"void {fn.name}() {{"]
    _block(fn.body, 1, out)
    out.append("}")
    return "\n".join(out) + "\n"


def format_program(program: Program) -> str:
    parts = [format_class(c) for c in program.classes]
    parts += [format_function(f) for f in program.functions]
    return "\n".join(parts)
