"""Control-flow graphs of method and function bodies."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..contracts import CONSTRUCTOR
from .ast import AccessPath, CallStmt, IfStmt, LocalDecl, LoopStmt, NOWHERE, SourceLoc

ENTRY = "entry"
CALL = "call"
SPLIT = "split"
MERGE = "merge"
LOOP_HEAD = "loop"
EXIT = "exit"


@dataclass(frozen=True)
class Node:
    id: int
    kind: str
    # call nodes only
    class_name: str = ""
    method: str = ""
    receiver: AccessPath | None = None
    args: tuple[AccessPath, ...] = ()
    arg_types: tuple[str, ...] = ()
    loc: SourceLoc = NOWHERE

    @property
    def is_constructor(self) -> bool:
        return self.kind == CALL and self.method == CONSTRUCTOR

    def __str__(self) -> str:
        if self.kind != CALL:
            return f"{self.id}:{self.kind}"
        if self.is_constructor:
            return f"{self.id}:new {self.class_name} {self.receiver}"
        return f"{self.id}:{self.receiver}.{self.method}({', '.join(map(str, self.args))})"


@dataclass
class Cfg:
    name: str
    formals: tuple[tuple[str, str], ...]
    nodes: list[Node] = field(default_factory=list)
    succ: list[list[int]] = field(default_factory=list)
    pred: list[list[int]] = field(default_factory=list)
    entry: int = 0
    exit: int = -1

    def add(self, kind: str, **kw) -> int:
        i = len(self.nodes)
        self.nodes.append(Node(i, kind, **kw))
        self.succ.append([])
        self.pred.append([])
        return i

    def edge(self, a: int, b: int):
        if b not in self.succ[a]:
            self.succ[a].append(b)
            self.pred[b].append(a)

    def calls(self) -> list[Node]:
        return [n for n in self.nodes if n.kind == CALL]

    def reverse_postorder(self) -> list[int]:
        seen = set()
        order = []
        stack = [(self.entry, iter(self.succ[self.entry]))]
        seen.add(self.entry)
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                stack.pop()
                order.append(node)
            elif nxt not in seen:
                seen.add(nxt)
                stack.append((nxt, iter(self.succ[nxt])))
        order.reverse()
        return order


def build_cfg(method, class_names=None, name: str | None = None) -> Cfg:
    """Lower a resolved method (or top-level function) body to a CFG.

    ``class_names`` restricts which local declarations become constructor
    nodes; locals of other (opaque) types leave no trace. When omitted, every
    declaration produces one.
    """
    formals = tuple((p.type_name, p.name) for p in getattr(method, "params", ()))
    cfg = Cfg(name or method.name, formals)
    cfg.add(ENTRY)

    def lower(stmts, cur: int) -> int:
        for s in stmts:
            if isinstance(s, LocalDecl):
                if class_names is None or s.type_name in class_names:
                    n = cfg.add(
                        CALL,
                        class_name=s.type_name,
                        method=CONSTRUCTOR,
                        receiver=AccessPath(s.name),
                        loc=s.loc,
                    )
                    cfg.edge(cur, n)
                    cur = n
            elif isinstance(s, CallStmt):
                n = cfg.add(
                    CALL,
                    class_name=s.receiver_type,
                    method=s.method,
                    receiver=s.receiver,
                    args=tuple(s.args),
                    arg_types=tuple(s.arg_types),
                    loc=s.loc,
                )
                cfg.edge(cur, n)
                cur = n
            elif isinstance(s, IfStmt):
                split = cfg.add(SPLIT, loc=s.loc)
                cfg.edge(cur, split)
                a = lower(s.then, split)
                b = lower(s.orelse or [], split)
                merge = cfg.add(MERGE, loc=s.loc)
                cfg.edge(a, merge)
                cfg.edge(b, merge)
                cur = merge
            elif isinstance(s, LoopStmt):
                head = cfg.add(LOOP_HEAD, loc=s.loc)
                cfg.edge(cur, head)
                end = lower(s.body, head)
                if end != head:
                    cfg.edge(end, head)
                cur = head
        return cur

    last = lower(method.body or [], 0)
    cfg.exit = cfg.add(EXIT)
    cfg.edge(last, cfg.exit)
    return cfg
