"""Program-level facts shared by both analyzers."""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property

from ..contracts import ContractMap, build_contract
from ..errors import RecursionUnsupported
from ..frontend.ast import AccessPath, CallStmt, Program, SourceLoc, walk_stmts
from ..frontend.cfg import Cfg, build_cfg


@dataclass(frozen=True)
class TypestateWarning:
    """A call whose pre-condition may be violated.

    ``path`` is the caller-side access path found in a disabled state and
    ``required`` the methods it needed enabled.
    """

    loc: SourceLoc
    class_name: str
    method: str
    path: AccessPath
    required: tuple[str, ...]
    reason: str = "disabled here"

    def sort_key(self):
        return (self.loc.file, self.loc.line, self.loc.col, self.method, str(self.path), self.required)

    @property
    def site(self) -> tuple:
        """What the differential tests compare: where, and which callee."""
        return (self.loc.file, self.loc.line, self.loc.col, self.class_name, self.method)

    def __str__(self) -> str:
        req = ",".join(self.required)
        return (
            f"WARN {self.loc}: call to {self.class_name}.{self.method} on {self.path}: "
            f"requires {{{req}}} but {self.reason}"
        )

    def to_json(self) -> str:
        return json.dumps(
            {
                "file": self.loc.file,
                "line": self.loc.line,
                "col": self.loc.col,
                "callee": f"{self.class_name}.{self.method}",
                "path": str(self.path),
                "required": list(self.required),
                "reason": self.reason,
            },
            sort_keys=True,
        )


def sorted_warnings(warnings) -> list[TypestateWarning]:
    return sorted(set(warnings), key=TypestateWarning.sort_key)


class ProgramModel:
    """Contracts, member layout, CFGs and call order of a resolved program."""

    def __init__(self, program: Program):
        self.program = program
        self.classes = {c.name: c for c in program.classes}
        self.contracts: dict[str, ContractMap] = {
            c.name: build_contract(c) for c in program.classes if c.is_base
        }
        self._tracked: dict[str, tuple] = {}
        self._cfgs: dict[tuple[str, str], Cfg] = {}

    def is_base(self, class_name: str) -> bool:
        return class_name in self.contracts

    def is_composed(self, class_name: str) -> bool:
        return class_name in self.classes and class_name not in self.contracts

    def tracked_members(self, class_name: str) -> tuple[tuple[tuple[str, ...], str], ...]:
        """``(field chain, base class)`` for every contract object inside a value of this type."""
        hit = self._tracked.get(class_name)
        if hit is not None:
            return hit
        if class_name in self.contracts:
            out = (((), class_name),)
        elif class_name in self.classes:
            out = tuple(
                ((f.name,) + sub, base)
                for f in self.classes[class_name].fields
                for sub, base in self.tracked_members(f.type_name)
            )
        else:
            out = ()
        self._tracked[class_name] = out
        return out

    def tracked_paths(self, root: str, class_name: str) -> list[tuple[AccessPath, str]]:
        return [(AccessPath(root, sub), base) for sub, base in self.tracked_members(class_name)]

    def entry_paths(self, class_name: str, method_name: str) -> list[tuple[AccessPath, str]]:
        """Contract objects reachable from ``this`` and the formals of a composed method."""
        m = self.classes[class_name].method(method_name)
        out = self.tracked_paths("this", class_name)
        for p in m.params:
            out += self.tracked_paths(p.name, p.type_name)
        return out

    def formals(self, class_name: str, method_name: str) -> list[str]:
        return [p.name for p in self.classes[class_name].method(method_name).params]

    def method_cfg(self, class_name: str, method_name: str) -> Cfg:
        key = (class_name, method_name)
        cfg = self._cfgs.get(key)
        if cfg is None:
            m = self.classes[class_name].method(method_name)
            cfg = build_cfg(m, self.classes, f"{class_name}.{method_name}")
            self._cfgs[key] = cfg
        return cfg

    def function_cfg(self, name: str) -> Cfg:
        key = ("", name)
        cfg = self._cfgs.get(key)
        if cfg is None:
            cfg = build_cfg(self.program.function(name), self.classes)
            self._cfgs[key] = cfg
        return cfg

    @cached_property
    def composed_methods(self) -> list[tuple[str, str]]:
        return [
            (c.name, m.name)
            for c in self.program.classes
            if not c.is_base
            for m in c.methods
        ]

    @cached_property
    def summary_order(self) -> list[tuple[str, str]]:
        """Composed methods, callees before callers.

        Raises RecursionUnsupported on a cyclic call graph.
        """
        callees = {}
        for key in self.composed_methods:
            body = self.classes[key[0]].method(key[1]).body
            callees[key] = [
                (s.receiver_type, s.method)
                for s in walk_stmts(body)
                if isinstance(s, CallStmt) and self.is_composed(s.receiver_type)
            ]
        order = []
        state = {}

        def visit(key, trail):
            state[key] = 1
            for callee in callees[key]:
                if state.get(callee) == 1:
                    start = trail.index(callee)
                    cycle = trail[start:] + [callee]
                    raise RecursionUnsupported([f"{c}.{m}" for c, m in cycle])
                if callee not in state:
                    visit(callee, trail + [callee])
            state[key] = 2
            order.append(key)

        for key in self.composed_methods:
            if key not in state:
                visit(key, [key])
        return order
