"""Synthetic client programs over a set of contract classes.

Generated code is checked while it is produced by simulating every object's
set of possible states, so call sequences are valid unless a violation is
requested on purpose (``violation_rate`` or ``inject_bug``).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from ..analysis.dfa import ClassAutomaton
from ..analysis.model import ProgramModel
from ..contracts import build_contract
from ..errors import SpecInvalid
from ..frontend.ast import (
    AccessPath,
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
)
from ..frontend.parser import parse_program, parse_source
from ..frontend.printer import format_class, format_function


@dataclass(frozen=True)
class ClientSpec:
    loc_target: int
    num_base_classes: int = 1
    composition_depth: int = 1
    branch_density: float = 0.1
    loop_density: float = 0.05
    seed: int = 0
    inject_bug: bool = False
    violation_rate: float = 0.0
    max_calls: int | None = None

    def validate(self):
        for name in ("branch_density", "loop_density", "violation_rate"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise SpecInvalid(f"{name} must lie in [0, 1], got {v}")
        if self.loc_target < 10:
            raise SpecInvalid("loc_target must be at least 10")
        if self.num_base_classes < 1:
            raise SpecInvalid("num_base_classes must be at least 1")
        if self.composition_depth < 0:
            raise SpecInvalid("composition_depth must be non-negative")


@dataclass
class GeneratedClient:
    text: str
    loc: int  # lines of client code (contract classes excluded)
    calls: int
    bug_site: tuple[str, int, int] | None = None  # (function, line, col)
    base_classes: list[str] = field(default_factory=list)
    client_text: str = ""  # composed classes and functions only


def count_lines(stmts) -> int:
    """Lines the printer uses for ``stmts``."""
    n = 0
    for s in stmts:
        if isinstance(s, IfStmt):
            n += 2 + count_lines(s.then)
            if s.orelse is not None:
                n += 1 + count_lines(s.orelse)
        elif isinstance(s, LoopStmt):
            n += 2 + count_lines(s.body)
        else:
            n += 1
    return n


def count_calls(stmts) -> int:
    n = 0
    for s in stmts:
        if isinstance(s, CallStmt):
            n += 1
        elif isinstance(s, IfStmt):
            n += count_calls(s.then) + count_calls(s.orelse or [])
        elif isinstance(s, LoopStmt):
            n += count_calls(s.body)
    return n


def _union(a: dict, b: dict) -> dict:
    out = dict(a)
    for k, v in b.items():
        out[k] = out[k] | v if k in out else v
    return out


class Simulator:
    """Runs statements on sets of explicit states.

    ``strict`` runs stop (returning None) at the first call that is not
    enabled in every possible state; lenient runs take the call anyway.
    """

    def __init__(self, model: ProgramModel, automata: dict[str, ClassAutomaton]):
        self.model = model
        self.automata = automata
        self._fresh = 0

    def seed(self, env: dict, root: AccessPath, type_name: str):
        for path, base in self.model.tracked_paths(root.root, type_name):
            env[AccessPath(root.root, root.fields + path.fields)] = frozenset((self.automata[base].start,))

    def call(self, env: dict, recv: AccessPath, rtype: str, method: str, args, strict: bool):
        auto = self.automata.get(rtype)
        if auto is not None:
            states = env.get(recv)
            if states is None:
                return env
            i = auto.contract.index(method)
            if strict and any(not s >> i & 1 for s in states):
                return None
            out = dict(env)
            out[recv] = frozenset(auto.succ(s, i) for s in states)
            return out
        m = self.model.classes[rtype].method(method)
        subst = {"this": recv}
        subst.update({p.name: a for p, a in zip(m.params, args)})
        return self.block(m.body, env, subst, strict)

    def block(self, stmts, env: dict, subst: dict, strict: bool):
        def mapped(p: AccessPath) -> AccessPath:
            base = subst.get(p.root)
            return p if base is None else AccessPath(base.root, base.fields + p.fields)

        for s in stmts:
            if isinstance(s, LocalDecl):
                if s.type_name in self.model.classes:
                    self._fresh += 1
                    root = AccessPath(f"{s.name}${self._fresh}") if subst else AccessPath(s.name)
                    if subst:
                        subst = dict(subst)
                        subst[s.name] = root
                    env = dict(env)
                    self.seed(env, root, s.type_name)
            elif isinstance(s, CallStmt):
                env = self.call(env, mapped(s.receiver), s.receiver_type, s.method, [mapped(a) for a in s.args], strict)
            elif isinstance(s, IfStmt):
                a = self.block(s.then, env, subst, strict)
                b = self.block(s.orelse or [], env, subst, strict)
                env = None if a is None or b is None else _union(a, b)
            elif isinstance(s, LoopStmt):
                cur = env
                while True:
                    nxt = self.block(s.body, cur, subst, strict)
                    if nxt is None:
                        return None
                    merged = _union(cur, nxt)
                    if merged == cur:
                        break
                    cur = merged
                env = cur
            if env is None:
                return None
        return env


class _Context:
    def __init__(self, handles, can_declare: bool):
        self.handles = list(handles)  # (path, type)
        self.can_declare = can_declare
        self.nest = 0
        self.used: set[str] = set()


class ClientGenerator:
    def __init__(self, spec: ClientSpec, contracts: list[ClassDecl]):
        spec.validate()
        if not contracts:
            raise SpecInvalid("at least one contract class is required")
        self.spec = spec
        self.rng = random.Random(spec.seed)
        self.bases = self._base_classes(contracts)
        self.composed: list[ClassDecl] = []
        self.program = Program(list(self.bases), [])
        self.model = ProgramModel(self.program)
        self.automata = {name: ClassAutomaton(c) for name, c in self.model.contracts.items()}
        self.sim = Simulator(self.model, self.automata)
        self.calls = 0

    def _base_classes(self, contracts):
        out = []
        names = set()
        i = 0
        while len(out) < self.spec.num_base_classes:
            src = contracts[i % len(contracts)]
            cls = parse_source(format_class(src)).classes[0]
            if cls.name in names:
                cls.name = f"{src.name}_{i}"
                for m in cls.methods:
                    if m.is_constructor:
                        m.name = cls.name
            names.add(cls.name)
            out.append(cls)
            i += 1
        return out

    # class lookups

    def methods_of(self, type_name: str) -> list[MethodDecl]:
        cls = self.model.classes[type_name]
        return [m for m in cls.methods if not m.is_constructor]

    def sub_handles(self, root: AccessPath, type_name: str):
        out = [(root, type_name)]
        cls = self.model.classes.get(type_name)
        if cls is not None and not cls.is_base:
            for f in cls.fields:
                out += self.sub_handles(root.child(f.name), f.type_name)
        return out

    # statements

    def _call_candidates(self, ctx: _Context):
        rng = self.rng
        for recv, rtype in rng.sample(ctx.handles, len(ctx.handles)):
            if rtype not in self.model.classes:
                continue
            methods = self.methods_of(rtype)
            for m in rng.sample(methods, len(methods)):
                args = []
                for p in m.params:
                    options = [
                        h for h, t in ctx.handles
                        if t == p.type_name and not (h.has_prefix(recv) or recv.has_prefix(h))
                        and all(not (h.has_prefix(a) or a.has_prefix(h)) for a in args)
                    ]
                    if not options:
                        break
                    args.append(rng.choice(options))
                else:
                    yield CallStmt(recv, m.name, tuple(args), receiver_type=rtype, arg_types=tuple(p.type_name for p in m.params))

    def _apply(self, stmt, env, strict):
        return self.sim.block([stmt], env, {}, strict)

    def pick_call(self, env, ctx: _Context):
        want_bad = self.spec.violation_rate and self.rng.random() < self.spec.violation_rate
        fallback = None
        for tries, c in enumerate(self._call_candidates(ctx)):
            ok = self._apply(c, env, True)
            if (ok is None) == bool(want_bad):
                return c, ok if ok is not None else self._apply(c, env, False)
            if fallback is None and ok is not None:
                fallback = (c, ok)
            if tries > 40:
                break
        return fallback if fallback else (None, env)

    def declare(self, ctx: _Context, env, type_name: str | None = None):
        if type_name is None:
            pool = self.top_types() if self.rng.random() < 0.7 else [c.name for c in self.bases]
            type_name = self.rng.choice(pool)
        name = f"v{len(ctx.used)}"
        ctx.used.add(name)
        stmt = LocalDecl(type_name, name)
        env = dict(env)
        self.sim.seed(env, AccessPath(name), type_name)
        ctx.handles += self.sub_handles(AccessPath(name), type_name)
        return stmt, env

    def top_types(self) -> list[str]:
        if not self.composed:
            return [c.name for c in self.bases]
        depth = max(self._layer.values())
        return [c.name for c in self.composed if self._layer[c.name] == depth]

    def gen_block(self, env, n: int, ctx: _Context, strict: bool):
        rng = self.rng
        spec = self.spec
        stmts = []
        for _ in range(n):
            if spec.max_calls is not None and self.calls >= spec.max_calls:
                break
            r = rng.random()
            if ctx.nest < 2 and r < spec.branch_density:
                ctx.nest += 1
                scope = len(ctx.handles)
                a, ea = self.gen_block(env, rng.randint(1, 3), ctx, strict)
                del ctx.handles[scope:]
                if rng.random() < 0.5:
                    b, eb = self.gen_block(env, rng.randint(1, 3), ctx, strict)
                    del ctx.handles[scope:]
                else:
                    b, eb = None, env
                ctx.nest -= 1
                if a or b:
                    stmts.append(IfStmt(a, b))
                    env = _union(ea, eb)
                continue
            if ctx.nest < 2 and r < spec.branch_density + spec.loop_density:
                ctx.nest += 1
                saved = self.calls
                scope = len(ctx.handles)
                body, _ = self.gen_block(env, rng.randint(1, 2), ctx, strict)
                del ctx.handles[scope:]
                ctx.nest -= 1
                loop = LoopStmt(body)
                after = self._apply(loop, env, strict) if body else None
                if after is not None:
                    stmts.append(loop)
                    env = after
                else:
                    self.calls = saved
                continue
            call, new_env = self.pick_call(env, ctx)
            if call is None:
                if not ctx.can_declare:
                    break
                decl, env = self.declare(ctx, env)
                stmts.append(decl)
                continue
            stmts.append(call)
            self.calls += 1
            env = new_env
        return stmts, env

    # classes

    def build_composed(self):
        rng = self.rng
        spec = self.spec
        self._layer = {c.name: 0 for c in self.bases}
        layers = [[c.name for c in self.bases]]
        width = max(1, min(3, spec.num_base_classes))
        for depth in range(1, spec.composition_depth + 1):
            layer = []
            for j in range(width):
                name = f"Comp{depth}_{j}"
                below = layers[-1]
                picks = [below[j % len(below)]]
                if rng.random() < 0.5:
                    picks.append(rng.choice(below))
                if depth > 1 and rng.random() < 0.3:
                    picks.append(rng.choice(layers[0]))
                cls = ClassDecl(name, [FieldDecl(t, f"f{i}") for i, t in enumerate(picks)], [])
                self.program.classes.append(cls)
                self.model.classes[name] = cls
                self.composed.append(cls)
                self._layer[name] = depth
                for k in range(rng.randint(2, 4)):
                    self._add_method(cls, f"op{k}")
                layer.append(name)
            layers.append(layer)

    def _reference_env(self, cls: ClassDecl, params) -> dict:
        env = {}
        for f in cls.fields:
            self.sim.seed(env, AccessPath("this", (f.name,)), f.type_name)
        for p in params:
            self.sim.seed(env, AccessPath(p.name), p.type_name)
        # wander a little so methods are not all written against fresh objects
        for path in list(env):
            auto = self.automata[self._leaf_types[path]]
            s = next(iter(env[path]))
            for _ in range(self.rng.randint(0, 3)):
                options = [i for i in range(1, auto.contract.width) if s >> i & 1]
                if not options:
                    break
                s = auto.succ(s, self.rng.choice(options))
            env[path] = frozenset((s,))
        return env

    def _add_method(self, cls: ClassDecl, name: str):
        rng = self.rng
        params = []
        if rng.random() < 0.3:
            params.append(Param(rng.choice(self.bases).name, "p"))
        m = MethodDecl(name, params, [], [])
        cls.methods.append(m)
        handles = [(AccessPath("this"), cls.name)]
        for f in cls.fields:
            handles += self.sub_handles(AccessPath("this", (f.name,)), f.type_name)
        for p in params:
            handles.append((AccessPath(p.name), p.type_name))
        self._leaf_types = {}
        for root, t in handles:
            for path, base in self.model.tracked_paths(root.root, t):
                self._leaf_types[AccessPath(root.root, root.fields + path.fields)] = base
        env = self._reference_env(cls, params)
        # only members and formals are receivers; `this` itself is never called
        ctx = _Context([(h, t) for h, t in handles if h != AccessPath("this") and len(h.fields) <= 1], False)
        strict = not self.spec.violation_rate
        body, _ = self.gen_block(env, rng.randint(1, 4), ctx, strict)
        under_cap = self.spec.max_calls is None or self.calls < self.spec.max_calls
        if not body and under_cap:
            call, _ = self.pick_call(env, ctx)
            if call is not None:
                body = [call]
                self.calls += 1
        m.body = body

    # driver

    def generate(self) -> GeneratedClient:
        spec = self.spec
        rng = self.rng
        self.build_composed()
        client_lines = sum(len(format_class(c).splitlines()) for c in self.composed)
        if self.composed and client_lines > spec.loc_target // 2:
            self.program.classes = list(self.bases)
            for c in self.composed:
                del self.model.classes[c.name]
            self.composed = []
            self._layer = {c.name: 0 for c in self.bases}
            client_lines = 0
        strict = not spec.violation_rate
        functions = []
        total = client_lines
        while total < spec.loc_target and (spec.max_calls is None or self.calls < spec.max_calls):
            fn = FunctionDecl(f"client{len(functions)}", [])
            functions.append(fn)
            ctx = _Context([], True)
            env = {}
            decl, env = self.declare(ctx, env)
            fn.body.append(decl)
            total += 3
            goal = min(spec.loc_target - total, rng.randint(20, 60))
            if spec.loc_target - total - goal < 6:
                goal = spec.loc_target - total
            used = 0
            while used < goal and (spec.max_calls is None or self.calls < spec.max_calls):
                saved = self.calls
                stmts, new_env = self.gen_block(env, 1, ctx, strict)
                if count_lines(stmts) > goal - used + 1:
                    # a branch or loop would overshoot the budget; fall back to a single line
                    self.calls = saved
                    ctx.nest = 2
                    stmts, new_env = self.gen_block(env, 1, ctx, strict)
                    ctx.nest = 0
                env = new_env
                if not stmts:
                    decl, env = self.declare(ctx, env)
                    stmts = [decl]
                fn.body += stmts
                used += count_lines(stmts)
            total += used
        self.program.functions = functions

        bug = None
        if spec.inject_bug:
            bug = self._inject(functions)

        client_text = "".join(format_class(c) + "\n" for c in self.composed)
        client_text += "\n".join(format_function(f) for f in functions)
        text = "".join(format_class(c) + "\n" for c in self.bases) + client_text
        loc = client_lines + sum(count_lines(f.body) + 2 for f in functions)
        calls = sum(count_calls(c.method(m.name).body or []) for c in self.composed for m in c.methods)
        calls += sum(count_calls(f.body) for f in functions)
        result = GeneratedClient(text, loc, calls, None, [c.name for c in self.bases], client_text)
        if bug is not None:
            prog = parse_program(text, "<gen>")
            fn = prog.function(bug)
            last = fn.body[-1]
            result.bug_site = (bug, last.loc.line, last.loc.col)
        return result

    def _inject(self, functions) -> str:
        rng = self.rng
        order = rng.sample(functions, len(functions))
        for fn in order:
            env = self.sim.block(fn.body, {}, {}, False)
            handles = []
            for s in fn.body:
                if isinstance(s, LocalDecl):
                    handles += self.sub_handles(AccessPath(s.name), s.type_name)
            ctx = _Context(handles, False)
            for c in self._call_candidates(ctx):
                if self._apply(c, env, True) is None:
                    fn.body.append(c)
                    return fn.name
        # nothing to misuse yet: a fresh object of a base class whose constructor leaves some method disabled
        for base in rng.sample(self.bases, len(self.bases)):
            contract = self.model.contracts[base.name]
            start = contract.constructed_state
            off = [m for i, m in enumerate(contract.alphabet) if i and not start >> i & 1]
            if off:
                fn = order[0]
                name = "misused"
                fn.body.append(LocalDecl(base.name, name))
                fn.body.append(CallStmt(AccessPath(name), rng.choice(off), (), receiver_type=base.name))
                return fn.name
        raise SpecInvalid("the contracts allow every call sequence; no bug can be injected")


def gen_client(spec: ClientSpec, contracts) -> GeneratedClient:
    """Generate a client program; ``contracts`` are class declarations or TSL texts."""
    decls = []
    for c in contracts:
        if isinstance(c, str):
            decls += [k for k in parse_source(c).classes]
        else:
            decls.append(c)
    for d in decls:
        if not d.is_base:
            raise SpecInvalid(f"{d.name} is not a contract class")
        build_contract(d)
    return ClientGenerator(spec, decls).generate()


def random_program(seed: int, max_methods: int = 8, max_calls: int = 60, violation_rate: float = 0.25) -> GeneratedClient:
    """A small random program over random live contracts, violations included."""
    from .contracts import random_contract_decl

    rng = random.Random(seed)
    n_bases = rng.randint(1, 3)
    contracts = [random_contract_decl(rng, rng.randint(1, max_methods), f"C{i}") for i in range(n_bases)]
    depth = rng.randint(0, 3)
    spec = ClientSpec(
        # composed classes are dropped when they would take over half the budget
        loc_target=rng.randint(30, 90) + 150 * depth,
        num_base_classes=n_bases,
        composition_depth=depth,
        branch_density=rng.uniform(0.0, 0.3),
        loop_density=rng.uniform(0.0, 0.2),
        seed=rng.randrange(2**31),
        violation_rate=violation_rate,
        max_calls=max_calls,
    )
    return ClientGenerator(spec, contracts).generate()
