"""Compositional typestate analysis over the triple domain.

An abstract state maps access paths to triples: the accumulated effect of
the calls made on that object so far, plus the methods it needed enabled
beforehand. Each composed method gets a summary (its exit state restricted
to ``this`` and the formals) which call sites apply like a contract entry.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..automata import dtransfer, join_state
from ..contracts import BfaTriple, ContractMap
from ..errors import MissingSummary
from ..frontend.ast import AccessPath, Program
from ..frontend.cfg import CALL, Cfg, Node
from .dataflow import Fixpoint, forward_fixpoint
from .model import ProgramModel, TypestateWarning, sorted_warnings

THIS = AccessPath("this")


def compose(cur: BfaTriple, eff: BfaTriple) -> BfaTriple:
    """Effect of ``eff`` applied after ``cur``."""
    return BfaTriple(
        (cur.enable | eff.enable) & ~eff.disable,
        (cur.disable | eff.disable) & ~eff.enable,
        cur.pre | (eff.pre & ~cur.enable),
        cur.width,
    )


def seed_triple(contract: ContractMap) -> BfaTriple:
    """The effect of construction, relative to the pre-constructor state."""
    start = BfaTriple(1, contract.initial_state ^ ((1 << contract.width) - 1), 0, contract.width)
    return dtransfer(contract, 0, start)


@dataclass
class Summary:
    method: str
    state: dict[AccessPath, BfaTriple]
    classes: dict[AccessPath, str]

    def __str__(self) -> str:
        parts = [f"{p} -> {t!r}" for p, t in sorted(self.state.items())]
        return f"{self.method}: {{{'; '.join(parts)}}}"


@dataclass
class MethodResult:
    cfg: Cfg
    fixpoint: Fixpoint
    warnings: list[TypestateWarning] = field(default_factory=list)
    summary: Summary | None = None

    def state_before(self, node: int) -> dict:
        return self.fixpoint.inputs[node]

    def state_after(self, node: int) -> dict:
        return self.fixpoint.outputs[node]


class BfaAnalyzer:
    def __init__(self, model: ProgramModel):
        self.model = model
        self.summaries: dict[tuple[str, str], Summary] = {}
        self.results: dict[str, MethodResult] = {}
        self._seeds = {name: seed_triple(c) for name, c in model.contracts.items()}
        self._identity = {name: BfaTriple.empty(c.width) for name, c in model.contracts.items()}
        self._base_summaries: dict[tuple[str, str], Summary] = {}
        self._formal_index: dict[tuple[str, str], dict[str, int]] = {}

    # summaries

    def summary(self, class_name: str, method: str) -> Summary:
        key = (class_name, method)
        contract = self.model.contracts.get(class_name)
        if contract is not None:
            s = self._base_summaries.get(key)
            if s is None:
                s = Summary(f"{class_name}.{method}", {THIS: contract[method]}, {THIS: class_name})
                self._base_summaries[key] = s
            return s
        try:
            return self.summaries[key]
        except KeyError:
            raise MissingSummary(f"no summary for {class_name}.{method}") from None

    def bind(self, node: Node, ap: AccessPath) -> AccessPath:
        """Callee-side path to caller-side path at ``node``."""
        if ap.root == "this":
            return ap.rebase(THIS, node.receiver)
        key = (node.class_name, node.method)
        idx = self._formal_index.get(key)
        if idx is None:
            idx = {n: i for i, n in enumerate(self.model.formals(*key))}
            self._formal_index[key] = idx
        return ap.rebase(AccessPath(ap.root), node.args[idx[ap.root]])

    # transfer and guard

    def transfer(self, node: Node, sigma: dict) -> dict:
        if node.kind != CALL:
            return sigma
        out = dict(sigma)
        if node.is_constructor:
            for path, base in self.model.tracked_paths(node.receiver.root, node.class_name):
                out[path] = self._seeds[base]
            return out
        s = self.summary(node.class_name, node.method)
        for ap, eff in s.state.items():
            target = self.bind(node, ap)
            cur = out.get(target)
            out[target] = eff if cur is None else compose(cur, eff)
        return out

    def violations(self, node: Node, sigma: dict) -> list[tuple[AccessPath, str, int]]:
        """``(caller path, base class, required-but-disabled bits)`` at a call."""
        if node.kind != CALL or node.is_constructor:
            return []
        s = self.summary(node.class_name, node.method)
        found = []
        for ap, eff in s.state.items():
            target = self.bind(node, ap)
            cur = sigma.get(target)
            if cur is not None and eff.pre & cur.disable:
                found.append((target, s.classes[ap], eff.pre & cur.disable))
        return found

    def guard(self, node: Node, sigma: dict) -> bool:
        return not self.violations(node, sigma)

    # drivers

    def analyze_cfg(self, cfg: Cfg, entry_state: dict) -> MethodResult:
        fix = forward_fixpoint(cfg, entry_state, self.transfer, join_state)
        result = MethodResult(cfg, fix)
        for node in cfg.calls():
            sigma = fix.inputs[node.id]
            if sigma is None:
                continue
            for path, base, bits in self.violations(node, sigma):
                names = tuple(self.model.contracts[base].names(bits))
                result.warnings.append(TypestateWarning(node.loc, node.class_name, node.method, path, names))
        return result

    def analyze_method(self, class_name: str, method: str) -> MethodResult:
        entry_paths = self.model.entry_paths(class_name, method)
        entry = {p: self._identity[b] for p, b in entry_paths}
        cfg = self.model.method_cfg(class_name, method)
        result = self.analyze_cfg(cfg, entry)
        formals = set(self.model.formals(class_name, method))
        exit_state = result.fixpoint.inputs[cfg.exit] or {}
        classes = dict(entry_paths)
        kept = {
            p: t
            for p, t in exit_state.items()
            if (p.root == "this" or p.root in formals) and not t.is_identity
        }
        result.summary = Summary(f"{class_name}.{method}", kept, {p: classes[p] for p in kept})
        self.summaries[(class_name, method)] = result.summary
        self.results[f"{class_name}.{method}"] = result
        return result

    def analyze_function(self, name: str) -> MethodResult:
        result = self.analyze_cfg(self.model.function_cfg(name), {})
        self.results[name] = result
        return result

    def run(self) -> list[TypestateWarning]:
        warnings = []
        for cls, m in self.model.summary_order:
            warnings += self.analyze_method(cls, m).warnings
        for f in self.model.program.functions:
            warnings += self.analyze_function(f.name).warnings
        return sorted_warnings(warnings)


def analyze_program(program: Program | ProgramModel) -> list[TypestateWarning]:
    model = program if isinstance(program, ProgramModel) else ProgramModel(program)
    return BfaAnalyzer(model).run()
