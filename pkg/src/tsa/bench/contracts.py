"""Synthetic contract classes with a controllable number of automaton states."""

from __future__ import annotations

import random
from dataclasses import dataclass

from ..automata import constructed_dfa, minimize_dfa, moore_state_count
from ..contracts import ContractMap, build_contract, count_annotation_terms
from ..errors import SpecInvalid
from ..frontend.ast import Annotation, ClassDecl, MethodDecl, Param
from ..frontend.printer import format_class


@dataclass(frozen=True)
class ContractSpec:
    """Shape of a generated contract.

    Each toggle pair ``(a, b)`` alternates: ``a`` enables ``b`` and disables
    itself, and vice versa, so ``k`` pairs give ``2**k`` states. The guarded
    chain ``c1 .. cL`` has ``c1`` enabling the rest and every other link
    disabling the whole tail. Remaining methods are unconstrained.
    """

    methods: int
    toggle_pairs: int = 0
    chain_length: int = 0
    seed: int = 0
    name: str = ""

    def validate(self):
        if self.methods < 1:
            raise SpecInvalid("a contract needs at least one method")
        if min(self.toggle_pairs, self.chain_length) < 0:
            raise SpecInvalid("toggle_pairs and chain_length must be non-negative")
        if 2 * self.toggle_pairs + self.chain_length > self.methods:
            raise SpecInvalid(
                f"2*toggle_pairs + chain_length = {2 * self.toggle_pairs + self.chain_length} "
                f"exceeds methods = {self.methods}"
            )

    @property
    def class_name(self) -> str:
        return self.name or f"Gen_m{self.methods}_t{self.toggle_pairs}_c{self.chain_length}_s{self.seed}"


def _decl(name, anns, param=None):
    return MethodDecl(name, [Param(param, "d")] if param else [], anns)


def contract_decl(spec: ContractSpec) -> ClassDecl:
    spec.validate()
    rng = random.Random(spec.seed)
    methods = []
    ctor_on = []
    for i in range(spec.toggle_pairs):
        a, b = f"t{i}a", f"t{i}b"
        methods.append(_decl(a, [Annotation("Enable", (b,)), Annotation("Disable", (a,))]))
        methods.append(_decl(b, [Annotation("Enable", (a,)), Annotation("Disable", (b,))]))
        ctor_on.append(a if rng.random() < 0.5 else b)
    chain = [f"c{i}" for i in range(1, spec.chain_length + 1)]
    if chain:
        tail = tuple(chain[1:])
        methods.append(_decl(chain[0], [Annotation("Enable", tail)] if tail else []))
        for c in tail:
            methods.append(_decl(c, [Annotation("Disable", tail)]))
        ctor_on.append(chain[0])
    free = spec.methods - 2 * spec.toggle_pairs - spec.chain_length
    for i in range(free):
        name = f"f{i}"
        methods.append(_decl(name, []))
        ctor_on.append(name)
    cls = ClassDecl(spec.class_name, [], methods)
    if spec.toggle_pairs:
        # both halves of a pair name each other, so the implicit rule would enable neither
        cls.methods.insert(0, MethodDecl(cls.name, [], [Annotation("EnableOnly", tuple(ctor_on))], None, True))
    return cls


def gen_contract(spec: ContractSpec) -> str:
    """TSL text of the generated base class."""
    return format_class(contract_decl(spec))


@dataclass(frozen=True)
class ContractStats:
    name: str
    methods: int
    states_min: int
    transitions_min: int
    annotations_bfa: int
    annotations_dfa: int


def contract_stats(cls: ClassDecl, contract: ContractMap | None = None, check: bool = False) -> ContractStats:
    """Size figures of a contract, measured on the automaton after construction.

    ``annotations_dfa`` counts one term per transition of the minimal
    automaton. With ``check`` the minimal state count is recomputed by naive
    refinement and compared.
    """
    contract = contract or build_contract(cls)
    dfa = constructed_dfa(contract)
    mini = minimize_dfa(dfa)
    if check and moore_state_count(dfa) != mini.num_states:
        raise AssertionError(f"minimization disagrees with the reference for {cls.name}")
    return ContractStats(
        cls.name,
        len(contract.methods),
        mini.num_states,
        mini.num_transitions,
        count_annotation_terms(cls),
        mini.num_transitions,
    )


_KINDS = ("none", "none", "Enable", "Disable", "EnableOnly", "DisableOnly", "EnableAll", "DisableAll", "both")


def random_contract_decl(rng: random.Random, n_methods: int, name: str, live: bool = True, tries: int = 200) -> ClassDecl:
    """A random base class; with ``live`` every method is enabled in some reachable state."""
    names = [f"m{i}" for i in range(n_methods)]
    for _ in range(tries):
        methods = []
        for m in names:
            kind = rng.choice(_KINDS)
            anns = []
            if kind == "both":
                picked = [x for x in names if rng.random() < 0.4]
                split = rng.random()
                en = tuple(x for x in picked if rng.random() < split)
                dis = tuple(x for x in picked if x not in en)
                if en:
                    anns.append(Annotation("Enable", en))
                if dis:
                    anns.append(Annotation("Disable", dis))
            elif kind in ("EnableAll", "DisableAll"):
                anns.append(Annotation(kind))
            elif kind != "none":
                picked = tuple(x for x in names if rng.random() < 0.4) or (rng.choice(names),)
                anns.append(Annotation(kind, picked))
            methods.append(_decl(m, anns, None))
        cls = ClassDecl(name, [], methods)
        if rng.random() < 0.3:
            on = tuple(x for x in names if rng.random() < 0.5) or (names[0],)
            cls.methods.insert(0, MethodDecl(name, [], [Annotation("EnableOnly", on)], None, True))
        try:
            contract = build_contract(cls)
        except Exception:
            continue
        if not live or _is_live(contract):
            return cls
    raise SpecInvalid(f"no live contract found for {n_methods} methods")


def _is_live(contract: ContractMap) -> bool:
    dfa = constructed_dfa(contract)
    seen = 0
    for s in dfa.states:
        seen |= s
    want = ((1 << contract.width) - 1) & ~1
    return seen & want == want
