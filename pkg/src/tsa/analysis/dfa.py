"""Baseline typestate analysis over sets of explicit automaton states.

Objects created in the analyzed code are tracked as the set of states they
may be in. Objects reachable from ``this`` or a formal of a composed method
start in an unknown state, so they are tracked as a table from every
possible entry state to the set of current states, together with the
methods that must already have been enabled on entry ("blame"). The table
at a method's exit is its summary; applying it costs one lookup per state.

After a call that was not allowed, analysis continues with the state the
call would have produced had it been allowed, so one mistake is reported
once rather than at every later call.
"""

from __future__ import annotations

from collections import deque

from ..automata import DEFAULT_STATE_LIMIT, expand_dfa
from ..contracts import ContractMap
from ..errors import StateExplosionLimit
from ..frontend.ast import AccessPath, Program
from ..frontend.cfg import CALL, Cfg, Node
from .dataflow import forward_fixpoint
from .model import ProgramModel, TypestateWarning, sorted_warnings

THIS = AccessPath("this")


class ClassAutomaton:
    """Explicit states of one contract class, closed under forced transitions."""

    def __init__(self, contract: ContractMap, state_limit: int = DEFAULT_STATE_LIMIT):
        self.contract = contract
        self.dfa = expand_dfa(contract, state_limit)
        self.start = contract.constructed_state
        self._succ: dict[tuple[int, int], int] = {}
        states = [self.start]
        seen = {self.start}
        queue = deque(states)
        while queue:
            s = queue.popleft()
            for i in range(1, contract.width):
                t = self.succ(s, i)
                if t not in seen:
                    if len(seen) >= state_limit:
                        raise StateExplosionLimit(state_limit, contract.class_name)
                    seen.add(t)
                    states.append(t)
                    queue.append(t)
        self.states = tuple(states)

    def succ(self, s: int, i: int) -> int:
        """Successor of ``s`` under method ``i``, taken even when ``i`` is disabled."""
        key = (s, i)
        t = self._succ.get(key)
        if t is None:
            t = self.dfa.delta.get(key)
            if t is None:
                e = self.contract.entries[i]
                t = (s | e.enable) & ~e.disable
            self._succ[key] = t
        return t

    def identity_table(self) -> dict:
        return {s: (frozenset((s,)), 0) for s in self.states}


def _join_value(a, b):
    if a is b:
        return a
    if isinstance(a, frozenset):
        return a | b
    out = {}
    for s, (outs, blame) in a.items():
        outs2, blame2 = b[s]
        out[s] = (outs | outs2, blame | blame2)
    return out


def join_dfa_state(a: dict, b: dict) -> dict:
    out = dict(a)
    for k, v in b.items():
        mine = out.get(k)
        out[k] = v if mine is None else _join_value(mine, v)
    return out


class DfaAnalyzer:
    def __init__(self, model: ProgramModel, state_limit: int = DEFAULT_STATE_LIMIT):
        self.model = model
        self.automata = {name: ClassAutomaton(c, state_limit) for name, c in model.contracts.items()}
        self.summaries: dict[tuple[str, str], dict[AccessPath, dict]] = {}
        self._formal_index: dict[tuple[str, str], dict[str, int]] = {}
        self.results = {}

    def bind(self, node: Node, ap: AccessPath) -> AccessPath:
        if ap.root == "this":
            return ap.rebase(THIS, node.receiver)
        key = (node.class_name, node.method)
        idx = self._formal_index.get(key)
        if idx is None:
            idx = {n: i for i, n in enumerate(self.model.formals(*key))}
            self._formal_index[key] = idx
        return ap.rebase(AccessPath(ap.root), node.args[idx[ap.root]])

    # transfer

    def transfer(self, node: Node, sigma: dict) -> dict:
        if node.kind != CALL:
            return sigma
        out = dict(sigma)
        if node.is_constructor:
            for path, base in self.model.tracked_paths(node.receiver.root, node.class_name):
                out[path] = frozenset((self.automata[base].start,))
            return out
        auto = self.automata.get(node.class_name)
        if auto is not None:
            v = out.get(node.receiver)
            if v is not None:
                out[node.receiver] = self._direct(auto, auto.contract.index(node.method), v)
            return out
        for ap, table in self.summaries[(node.class_name, node.method)].items():
            target = self.bind(node, ap)
            v = out.get(target)
            if v is not None:
                out[target] = self._apply(table, v)
        return out

    @staticmethod
    def _direct(auto: ClassAutomaton, i: int, v):
        succ = auto.succ
        if isinstance(v, frozenset):
            return frozenset(succ(s, i) for s in v)
        bit = 1 << i
        out = {}
        for s_in, (outs, blame) in v.items():
            if not s_in & bit and any(not t & bit for t in outs):
                blame |= bit
            out[s_in] = (frozenset(succ(t, i) for t in outs), blame)
        return out

    @staticmethod
    def _apply(table: dict, v):
        if isinstance(v, frozenset):
            return frozenset().union(*(table[t][0] for t in v))
        out = {}
        for s_in, (outs, blame) in v.items():
            new = set()
            for t in outs:
                t_outs, t_blame = table[t]
                new |= t_outs
                blame |= t_blame & ~s_in
            out[s_in] = (frozenset(new), blame)
        return out

    # checking

    def violations(self, node: Node, sigma: dict) -> list[tuple[AccessPath, str, int]]:
        if node.kind != CALL or node.is_constructor:
            return []
        auto = self.automata.get(node.class_name)
        if auto is not None:
            v = sigma.get(node.receiver)
            if v is None:
                return []
            bit = 1 << auto.contract.index(node.method)
            if isinstance(v, frozenset):
                bad = any(not s & bit for s in v)
            else:
                bad = any(s_in & bit and any(not t & bit for t in outs) for s_in, (outs, _) in v.items())
            return [(node.receiver, node.class_name, bit)] if bad else []
        found = []
        classes = dict(self.model.entry_paths(node.class_name, node.method))
        for ap, table in self.summaries[(node.class_name, node.method)].items():
            target = self.bind(node, ap)
            v = sigma.get(target)
            if v is None:
                continue
            req = 0
            if isinstance(v, frozenset):
                for t in v:
                    req |= table[t][1]
            else:
                for s_in, (outs, _) in v.items():
                    for t in outs:
                        req |= table[t][1] & s_in
            if req:
                found.append((target, classes[ap], req))
        return found

    # drivers

    def analyze_cfg(self, cfg: Cfg, entry_state: dict):
        fix = forward_fixpoint(cfg, entry_state, self.transfer, join_dfa_state)
        warnings = []
        for node in cfg.calls():
            sigma = fix.inputs[node.id]
            if sigma is None:
                continue
            for path, base, bits in self.violations(node, sigma):
                names = tuple(self.model.contracts[base].names(bits))
                warnings.append(TypestateWarning(node.loc, node.class_name, node.method, path, names))
        return fix, warnings

    def analyze_method(self, class_name: str, method: str):
        entry_paths = self.model.entry_paths(class_name, method)
        entry = {p: self.automata[b].identity_table() for p, b in entry_paths}
        cfg = self.model.method_cfg(class_name, method)
        fix, warnings = self.analyze_cfg(cfg, entry)
        exit_state = fix.inputs[cfg.exit] or {}
        summary = {}
        for p, b in entry_paths:
            table = exit_state[p]
            if any(outs != frozenset((s,)) or blame for s, (outs, blame) in table.items()):
                summary[p] = table
        self.summaries[(class_name, method)] = summary
        self.results[f"{class_name}.{method}"] = fix
        return warnings

    def run(self) -> list[TypestateWarning]:
        warnings = []
        for cls, m in self.model.summary_order:
            warnings += self.analyze_method(cls, m)
        for f in self.model.program.functions:
            fix, w = self.analyze_cfg(self.model.function_cfg(f.name), {})
            self.results[f.name] = fix
            warnings += w
        return sorted_warnings(warnings)


def dfa_analyze_program(program: Program | ProgramModel, state_limit: int = DEFAULT_STATE_LIMIT) -> list[TypestateWarning]:
    model = program if isinstance(program, ProgramModel) else ProgramModel(program)
    return DfaAnalyzer(model, state_limit).run()
