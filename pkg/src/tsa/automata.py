"""Triple semantics, explicit automata and the brute-force checks built on them.

States are ``int`` bit masks over a contract's alphabet (bit ``i`` set means
method ``i`` is enabled). Undefined transitions are simply absent from
``ExplicitDfa.delta`` and undefined results are ``None``.
"""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .contracts import BfaTriple, ContractMap, bit_string
from .errors import AlphabetMismatch, StateExplosionLimit, UnknownState, WidthMismatch

DEFAULT_STATE_LIMIT = 2**22


def _check_state(b: int, width: int) -> None:
    if b < 0 or b >> width:
        raise WidthMismatch(f"state {b:#x} does not fit in {width} bits")


def apply_triple(t: BfaTriple, b: int) -> int | None:
    """``(b | E) & ~D`` when ``P`` is a subset of ``b``, else ``None``."""
    _check_state(b, t.width)
    if t.pre & ~b:
        return None
    return (b | t.enable) & ~t.disable


def _method_index(contract: ContractMap, m: int | str) -> int:
    return contract.index(m) if isinstance(m, str) else m


def dtransfer(contract: ContractMap, m: int | str, t: BfaTriple) -> BfaTriple | None:
    """Accumulate the effect of calling ``m`` after the effect ``t``."""
    em = contract.entries[_method_index(contract, m)]
    if em.width != t.width:
        raise WidthMismatch(f"triple width {t.width} != contract width {em.width}")
    if em.pre & t.disable:
        return None
    return BfaTriple(
        (t.enable | em.enable) & ~em.disable,
        (t.disable | em.disable) & ~em.enable,
        t.pre | (em.pre & ~t.enable),
        t.width,
    )


def dtransfer_seq(contract: ContractMap, seq: Iterable[int | str], t: BfaTriple) -> BfaTriple | None:
    for m in seq:
        t = dtransfer(contract, m, t)
        if t is None:
            return None
    return t


def join_triple(a: BfaTriple, b: BfaTriple) -> BfaTriple:
    if a.width != b.width:
        raise WidthMismatch(f"cannot join triples of widths {a.width} and {b.width}")
    disable = a.disable | b.disable
    return BfaTriple(a.enable & b.enable & ~disable, disable, a.pre | b.pre, a.width)


def join_state(a: Mapping, b: Mapping) -> dict:
    """Pointwise join on shared keys; keys present on one side only are kept."""
    out = dict(a)
    for key, t in b.items():
        mine = out.get(key)
        out[key] = t if mine is None else join_triple(mine, t)
    return out


@dataclass(frozen=True)
class ExplicitDfa:
    """A partial DFA whose states are all accepting.

    ``delta`` maps ``(state, symbol_index)`` to the successor state; a missing
    key is an undefined transition. ``states`` lists states in discovery
    order, initial state first.
    """

    alphabet: tuple[str, ...]
    states: tuple[int, ...]
    initial: int
    delta: Mapping[tuple[int, int], int]
    width: int | None = None
    name: str = ""
    _state_set: frozenset = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_state_set", frozenset(self.states))

    def __contains__(self, state: int) -> bool:
        return state in self._state_set

    @property
    def num_states(self) -> int:
        return len(self.states)

    @property
    def num_transitions(self) -> int:
        return len(self.delta)

    def step(self, state: int, symbol: int) -> int | None:
        return self.delta.get((state, symbol))

    def symbol(self, name: str | int) -> int:
        if isinstance(name, int):
            return name
        try:
            return self.alphabet.index(name)
        except ValueError:
            raise AlphabetMismatch(f"{name!r} is not in the alphabet") from None

    def label(self, state: int) -> str:
        return bit_string(state, self.width) if self.width is not None else str(state)


def expand_dfa(contract: ContractMap, state_limit: int = DEFAULT_STATE_LIMIT, start: int | None = None) -> ExplicitDfa:
    """Breadth-first closure of the contract's transition relation.

    Methods are tried in alphabet order and states are numbered by discovery,
    so the result is deterministic. ``start`` defaults to the initial state
    in which only the constructor is enabled.
    """
    initial = contract.initial_state if start is None else start
    entries = [(i, t.enable, t.disable, t.pre) for i, t in enumerate(contract.entries)]
    seen = {initial}
    order = [initial]
    delta = {}
    queue = deque(order)
    while queue:
        b = queue.popleft()
        for i, e, d, p in entries:
            if p & ~b:
                continue
            nb = (b | e) & ~d
            delta[(b, i)] = nb
            if nb not in seen:
                if len(seen) >= state_limit:
                    raise StateExplosionLimit(state_limit, contract.class_name)
                seen.add(nb)
                order.append(nb)
                queue.append(nb)
    return ExplicitDfa(contract.alphabet, tuple(order), initial, delta, contract.width, contract.class_name)


def constructed_dfa(contract: ContractMap, state_limit: int = DEFAULT_STATE_LIMIT) -> ExplicitDfa:
    """The automaton of a freshly constructed object (constructor already called)."""
    return expand_dfa(contract, state_limit, start=contract.constructed_state)


def delta_hat(dfa: ExplicitDfa, b: int, seq: Iterable[int | str]) -> int | None:
    if b not in dfa:
        raise UnknownState(f"{dfa.label(b)} is not a state of {dfa.name or 'the automaton'}")
    for m in seq:
        b = dfa.delta.get((b, dfa.symbol(m)))
        if b is None:
            return None
    return b


def accepts(dfa: ExplicitDfa, seq: Iterable[int | str]) -> bool:
    return delta_hat(dfa, dfa.initial, seq) is not None


def _completed(dfa: ExplicitDfa):
    """Dense transition table with an extra rejecting sink at index ``n``."""
    index = {s: i for i, s in enumerate(dfa.states)}
    n = len(dfa.states)
    k = len(dfa.alphabet)
    table = [[n] * k for _ in range(n + 1)]
    for (s, a), t in dfa.delta.items():
        table[index[s]][a] = index[t]
    return table, n


def minimal_partition(dfa: ExplicitDfa) -> list[list[int]]:
    """Hopcroft partition refinement on the sink-completed automaton.

    Returns the blocks of language-equivalent states (sink excluded), each
    listed in discovery order, blocks ordered by their first member.
    """
    table, sink = _completed(dfa)
    n = sink + 1
    k = len(dfa.alphabet)
    inverse = [[[] for _ in range(n)] for _ in range(k)]
    for p in range(n):
        row = table[p]
        for a in range(k):
            inverse[a][row[a]].append(p)

    blocks = [set(range(sink))] if sink else []
    blocks.append({sink})
    block_of = [0] * n
    block_of[sink] = len(blocks) - 1
    worklist = {len(blocks) - 1}

    while worklist:
        splitter = list(blocks[worklist.pop()])
        for a in range(k):
            inv = inverse[a]
            touched = defaultdict(set)
            for q in splitter:
                for p in inv[q]:
                    touched[block_of[p]].add(p)
            for y, inter in touched.items():
                if len(inter) == len(blocks[y]):
                    continue
                rest = blocks[y] - inter
                blocks[y] = inter
                new = len(blocks)
                blocks.append(rest)
                for p in rest:
                    block_of[p] = new
                if y in worklist:
                    worklist.add(new)
                else:
                    worklist.add(y if len(inter) <= len(rest) else new)

    out = [sorted(b) for b in blocks if sink not in b]
    out.sort(key=lambda b: b[0])
    return [[dfa.states[i] for i in b] for b in out]


def minimize_dfa(dfa: ExplicitDfa) -> ExplicitDfa:
    """Merge language-equivalent states.

    Each block is represented by its earliest-discovered member, so the
    result keeps bit-vector labels and remains a partial, all-accepting DFA.
    """
    blocks = minimal_partition(dfa)
    rep = {}
    for block in blocks:
        for s in block:
            rep[s] = block[0]
    delta = {}
    for block in blocks:
        r = block[0]
        for a in range(len(dfa.alphabet)):
            t = dfa.delta.get((r, a))
            if t is not None:
                delta[(r, a)] = rep[t]
    states = tuple(b[0] for b in blocks)
    # keep discovery order of the representatives
    position = {s: i for i, s in enumerate(dfa.states)}
    states = tuple(sorted(states, key=position.__getitem__))
    return ExplicitDfa(dfa.alphabet, states, rep[dfa.initial], delta, dfa.width, dfa.name)


def moore_state_count(dfa: ExplicitDfa) -> int:
    """Minimal state count by naive signature refinement (slow reference)."""
    table, sink = _completed(dfa)
    cls = [0] * sink + [1]
    while True:
        sigs = {}
        new = []
        for p, row in enumerate(table):
            sig = (cls[p],) + tuple(cls[q] for q in row)
            new.append(sigs.setdefault(sig, len(sigs)))
        if len(sigs) == len(set(cls)):
            return len(sigs) - 1
        cls = new


def language_included(a: ExplicitDfa, b: ExplicitDfa) -> bool:
    """Whether every sequence accepted by ``a`` is accepted by ``b``."""
    if tuple(a.alphabet) != tuple(b.alphabet):
        raise AlphabetMismatch("automata have different alphabets")
    k = len(a.alphabet)
    start = (a.initial, b.initial)
    seen = {start}
    queue = deque([start])
    while queue:
        qa, qb = queue.popleft()
        for s in range(k):
            ta = a.delta.get((qa, s))
            if ta is None:
                continue
            tb = b.delta.get((qb, s))
            if tb is None:
                return False
            pair = (ta, tb)
            if pair not in seen:
                seen.add(pair)
                queue.append(pair)
    return True


@dataclass(frozen=True)
class ContextCounterexample:
    """Witnesses that a DFA's effect of ``method`` depends on the preceding calls.

    ``prefix`` shows one effect of ``method`` on ``follower`` and ``context``
    shows the opposite one.
    """

    item: int
    method: str
    follower: str
    prefix: tuple[str, ...]
    context: tuple[str, ...]


def _shortest_words(dfa: ExplicitDfa, max_len: int) -> dict[int, tuple[int, ...]]:
    words = {dfa.initial: ()}
    frontier = [dfa.initial]
    for _ in range(max_len):
        nxt = []
        for q in frontier:
            w = words[q]
            for a in range(len(dfa.alphabet)):
                t = dfa.delta.get((q, a))
                if t is not None and t not in words:
                    words[t] = w + (a,)
                    nxt.append(t)
        frontier = nxt
    return words


def context_independency_check(dfa: ExplicitDfa, max_len: int) -> ContextCounterexample | None:
    """Exhaustively test the context-independency property up to ``max_len``.

    Over all accepted words ``p``, ``w`` of length at most ``max_len`` and
    all method pairs ``m``, ``n`` (with ``p.m`` and ``w.m`` accepted):

    1. if ``p.n`` is rejected but ``p.m.n`` accepted, ``w.m.n`` is accepted;
    2. if ``p.n`` is accepted but ``p.m.n`` rejected, ``w.m.n`` is rejected.

    Acceptance of a word only depends on the state it reaches, so words are
    enumerated through the states reachable within ``max_len`` steps.
    """
    words = _shortest_words(dfa, max_len)
    k = len(dfa.alphabet)
    delta = dfa.delta
    names = dfa.alphabet

    def spell(w):
        return tuple(names[a] for a in w)

    for m in range(k):
        for n in range(k):
            enabled_after = disabled_after = None
            gained = lost = None
            for q, w in words.items():
                qm = delta.get((q, m))
                if qm is None:
                    continue
                after = (qm, n) in delta
                before = (q, n) in delta
                if after:
                    enabled_after = w if enabled_after is None else enabled_after
                    if not before:
                        gained = w if gained is None else gained
                else:
                    disabled_after = w if disabled_after is None else disabled_after
                    if before:
                        lost = w if lost is None else lost
            if gained is not None and disabled_after is not None:
                return ContextCounterexample(1, names[m], names[n], spell(gained), spell(disabled_after))
            if lost is not None and enabled_after is not None:
                return ContextCounterexample(2, names[m], names[n], spell(lost), spell(enabled_after))
    return None


def dump_dfa(dfa: ExplicitDfa) -> str:
    """Tab-separated transition listing, sorted, under an alphabet header."""
    lines = sorted(
        f"{dfa.label(s)}\t{dfa.alphabet[a]}\t{dfa.label(t)}" for (s, a), t in dfa.delta.items()
    )
    return "\n".join([f"# alphabet: {','.join(dfa.alphabet)}"] + lines) + "\n"


def parse_dump(text: str) -> tuple[tuple[str, ...], list[tuple[str, str, str]]]:
    alphabet: tuple[str, ...] = ()
    rows = []
    for line in text.splitlines():
        if line.startswith("# alphabet:"):
            alphabet = tuple(line.split(":", 1)[1].strip().split(","))
        elif line and not line.startswith("#"):
            src, m, dst = line.split("\t")
            rows.append((src, m, dst))
    return alphabet, rows


def from_transitions(alphabet: Sequence[str], initial, transitions: Iterable[tuple], name: str = "") -> ExplicitDfa:
    """Build a hand-written DFA from ``(state, method_name, state)`` triples.

    States may be any hashable labels; they are renumbered in BFS order from
    ``initial``, and unreachable states are dropped.
    """
    alphabet = tuple(alphabet)
    edges = defaultdict(dict)
    for s, m, t in transitions:
        edges[s][alphabet.index(m)] = t
    number = {initial: 0}
    queue = deque([initial])
    delta = {}
    while queue:
        s = queue.popleft()
        for a in sorted(edges[s]):
            t = edges[s][a]
            if t not in number:
                number[t] = len(number)
                queue.append(t)
            delta[(number[s], a)] = number[t]
    return ExplicitDfa(alphabet, tuple(range(len(number))), 0, delta, None, name)
