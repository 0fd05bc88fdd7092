"""BFA contracts: enable/disable/pre-condition triples per method.

Method sets are plain ``int`` bit masks. Bit ``i`` stands for the method at
index ``i`` of the owning class's alphabet; index 0 is always the constructor,
spelled ``<init>``. Every other method follows in lexicographic order of its
name, so the alphabet of a class does not depend on declaration order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import (
    AlphabetMismatch,
    ContractError,
    InvalidAnnotation,
    OverlappingEnableDisable,
    UnknownMethodName,
    WellFormednessViolation,
)

CONSTRUCTOR = "<init>"

ENABLE = "Enable"
DISABLE = "Disable"
ENABLE_ONLY = "EnableOnly"
DISABLE_ONLY = "DisableOnly"
ENABLE_ALL = "EnableAll"
DISABLE_ALL = "DisableAll"

ANNOTATION_KINDS = (ENABLE, DISABLE, ENABLE_ONLY, DISABLE_ONLY, ENABLE_ALL, DISABLE_ALL)
_NULLARY = (ENABLE_ALL, DISABLE_ALL)


def mask(width: int) -> int:
    return (1 << width) - 1


def bits_of(indices: Iterable[int]) -> int:
    out = 0
    for i in indices:
        out |= 1 << i
    return out


def indices_of(bits: int) -> list[int]:
    out = []
    i = 0
    while bits:
        if bits & 1:
            out.append(i)
        bits >>= 1
        i += 1
    return out


def bit_string(bits: int, width: int) -> str:
    """Render ``bits`` with index 0 leftmost, e.g. ``10000`` for the initial state."""
    return "".join("1" if bits >> i & 1 else "0" for i in range(width))


def parse_bit_string(text: str) -> int:
    return sum(1 << i for i, ch in enumerate(text) if ch == "1")


@dataclass(frozen=True, slots=True)
class BfaTriple:
    """An ``<E, D, P>`` triple of method sets over a fixed-width alphabet."""

    enable: int
    disable: int
    pre: int
    width: int

    @classmethod
    def empty(cls, width: int) -> "BfaTriple":
        return cls(0, 0, 0, width)

    @property
    def is_identity(self) -> bool:
        return not (self.enable or self.disable or self.pre)

    def __repr__(self) -> str:
        def fmt(b):
            return "{" + ",".join(map(str, indices_of(b))) + "}"

        return f"<{fmt(self.enable)}, {fmt(self.disable)}, {fmt(self.pre)}>/{self.width}"


@dataclass(frozen=True)
class ContractMap:
    """The per-class mapping from methods to triples.

    ``entries[i]`` is the triple of ``alphabet[i]``; ``alphabet[0]`` is the
    constructor.
    """

    class_name: str
    alphabet: tuple[str, ...]
    entries: tuple[BfaTriple, ...]

    def __post_init__(self):
        if not self.alphabet or self.alphabet[0] != CONSTRUCTOR:
            raise ContractError("alphabet must start with the constructor")
        if len(self.entries) != len(self.alphabet):
            raise ContractError("one triple per alphabet entry is required")
        object.__setattr__(self, "_index", {n: i for i, n in enumerate(self.alphabet)})

    @property
    def width(self) -> int:
        return len(self.alphabet)

    @property
    def methods(self) -> tuple[str, ...]:
        """Non-constructor method names in alphabet order."""
        return self.alphabet[1:]

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownMethodName(name, self.class_name) from None

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def __getitem__(self, key: int | str) -> BfaTriple:
        if isinstance(key, str):
            key = self.index(key)
        return self.entries[key]

    def bits(self, names: Iterable[str]) -> int:
        return bits_of(self.index(n) for n in names)

    def names(self, bits: int) -> list[str]:
        return [self.alphabet[i] for i in indices_of(bits)]

    @property
    def initial_state(self) -> int:
        """Only the constructor enabled."""
        return 1

    @property
    def constructed_state(self) -> int:
        """The state right after the constructor ran."""
        ctor = self.entries[0]
        return (self.initial_state | ctor.enable) & ~ctor.disable

    def describe(self, triple: BfaTriple) -> str:
        def fmt(b):
            return "{" + ", ".join(self.names(b)) + "}"

        return f"({fmt(triple.enable)}, {fmt(triple.disable)}, {fmt(triple.pre)})"


def desugar(annotations, alphabet: Sequence[str], method: str | None = None) -> tuple[int, int]:
    """Expand a method's annotations into its enable and disable sets.

    ``annotations`` is an iterable of objects with ``kind`` and ``names``
    attributes (or ``(kind, names)`` pairs). Sugared forms expand over every
    method except the constructor. Multiple annotations are unioned per
    component; an overlap between the resulting sets is an error.
    """
    index = {n: i for i, n in enumerate(alphabet)}
    everything = mask(len(alphabet)) & ~1
    enable = disable = 0
    for ann in annotations:
        kind, names = (ann.kind, ann.names) if hasattr(ann, "kind") else ann
        if kind not in ANNOTATION_KINDS:
            raise InvalidAnnotation(f"unknown annotation @{kind}")
        if kind in _NULLARY and names:
            raise InvalidAnnotation(f"@{kind} takes no arguments")
        if kind not in _NULLARY and not names:
            raise InvalidAnnotation(f"@{kind} needs at least one method name")
        named = 0
        for n in names:
            i = index.get(n)
            if i is None:
                raise UnknownMethodName(n)
            if i == 0:
                raise InvalidAnnotation("the constructor cannot be enabled or disabled")
            named |= 1 << i
        if kind == ENABLE:
            enable |= named
        elif kind == DISABLE:
            disable |= named
        elif kind == ENABLE_ONLY:
            enable |= named
            disable |= everything & ~named
        elif kind == DISABLE_ONLY:
            disable |= named
            enable |= everything & ~named
        elif kind == ENABLE_ALL:
            enable |= everything
        else:
            disable |= everything
    overlap = enable & disable
    if overlap:
        raise OverlappingEnableDisable(method or "?", [alphabet[i] for i in indices_of(overlap)])
    return enable, disable


def _guarded_names(class_decl) -> set[str]:
    """Methods explicitly named by another method's @Enable / @EnableOnly."""
    guarded = set()
    for m in class_decl.methods:
        if m.is_constructor:
            continue
        for ann in m.annotations:
            if ann.kind in (ENABLE, ENABLE_ONLY):
                guarded.update(n for n in ann.names if n != m.name)
    return guarded


def build_contract(class_decl) -> ContractMap:
    """Build the contract map of an annotated class declaration.

    Without constructor annotations, the constructor enables exactly the
    methods that no other method names in an ``@Enable``/``@EnableOnly``.
    The constructor always disables itself.
    """
    ctor_decls = [m for m in class_decl.methods if m.is_constructor]
    methods = [m for m in class_decl.methods if not m.is_constructor]
    if len(ctor_decls) > 1:
        raise ContractError(f"class {class_decl.name} declares more than one constructor")
    seen = set()
    for m in methods:
        if m.name in seen:
            raise ContractError(f"duplicate method {m.name!r} in class {class_decl.name}")
        seen.add(m.name)
    if not methods:
        raise ContractError(f"class {class_decl.name} has no methods besides the constructor")

    alphabet = (CONSTRUCTOR,) + tuple(sorted(m.name for m in methods))
    width = len(alphabet)
    full = mask(width)
    entries: list[BfaTriple | None] = [None] * width

    for m in methods:
        i = alphabet.index(m.name)
        try:
            e, d = desugar(m.annotations, alphabet, m.name)
        except UnknownMethodName as exc:
            raise UnknownMethodName(exc.name, class_decl.name) from None
        entries[i] = BfaTriple(e, d, 1 << i, width)

    ctor_anns = ctor_decls[0].annotations if ctor_decls else ()
    if ctor_anns:
        e0, d0 = desugar(ctor_anns, alphabet, CONSTRUCTOR)
    else:
        guarded = _guarded_names(class_decl)
        e0 = bits_of(i for i, n in enumerate(alphabet) if i and n not in guarded)
        d0 = full & ~e0
    d0 |= 1
    entries[0] = BfaTriple(e0, d0, 1, width)

    contract = ContractMap(class_decl.name, alphabet, tuple(entries))
    problems = check_well_formed(contract)
    if problems:
        raise WellFormednessViolation(f"class {class_decl.name}: " + "; ".join(problems))
    return contract


def check_well_formed(contract: ContractMap) -> list[str]:
    """Return the list of well-formedness violations; empty means well formed."""
    problems = []
    full = mask(contract.width)
    for name, t in zip(contract.alphabet, contract.entries):
        if t.width != contract.width:
            problems.append(f"{name}: triple width {t.width} != {contract.width}")
        if t.enable & t.disable:
            both = ", ".join(contract.names(t.enable & t.disable))
            problems.append(f"{name}: enables and disables {{{both}}}")
    ctor = contract.entries[0]
    if ctor.enable | ctor.disable != full:
        missing = ", ".join(contract.names(full & ~(ctor.enable | ctor.disable)))
        problems.append(f"constructor neither enables nor disables {{{missing}}}")
    for i, t in enumerate(contract.entries[1:], start=1):
        if t.pre != 1 << i:
            problems.append(f"{contract.alphabet[i]}: pre-condition must be the method itself")
    return problems


def first_subsumption_failure(sub: ContractMap, sup: ContractMap, polarity: str = "language"):
    """Name the first method violating the subsumption condition, or None.

    ``polarity="language"`` asks whether ``sub`` accepts every call sequence
    ``sup`` accepts: per method, ``sub`` enables a superset, disables a
    subset and requires a subset. ``polarity="literal"`` is the reverse
    inclusion direction, which characterises ``L(sub) ⊆ L(sup)`` instead.
    """
    if sub.alphabet[1:] != sup.alphabet[1:]:
        raise AlphabetMismatch(
            f"{sub.class_name} and {sup.class_name} have different method sets"
        )
    if polarity not in ("language", "literal"):
        raise ValueError(f"unknown polarity {polarity!r}")
    for name, a, b in zip(sub.alphabet, sub.entries, sup.entries):
        if a.pre & ~b.pre:
            return name
        if polarity == "literal":
            a, b = b, a
        # a must enable at least and disable at most what b does
        if b.enable & ~a.enable or a.disable & ~b.disable:
            return name
    return None


def subsumes(sub: ContractMap, sup: ContractMap, polarity: str = "language") -> bool:
    return first_subsumption_failure(sub, sup, polarity) is None


def count_annotation_terms(class_decl) -> int:
    """Number of standalone ``@...`` terms written in a class, constructor included."""
    return sum(len(m.annotations) for m in class_decl.methods)
