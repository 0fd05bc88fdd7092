from __future__ import annotations

import itertools

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from helpers import contract_of, contracts, fixture_text, raw_contract, triples
from tsa.automata import (
    accepts,
    apply_triple,
    constructed_dfa,
    context_independency_check,
    delta_hat,
    dtransfer,
    dtransfer_seq,
    dump_dfa,
    expand_dfa,
    from_transitions,
    join_state,
    join_triple,
    language_included,
    minimal_partition,
    minimize_dfa,
    moore_state_count,
    parse_dump,
)
from tsa.bench import ContractSpec, contract_decl
from tsa.contracts import BfaTriple, build_contract, parse_bit_string
from tsa.errors import AlphabetMismatch, StateExplosionLimit, UnknownState, WidthMismatch


@pytest.fixture(scope="module")
def lu():
    return contract_of(fixture_text("sparselu.tsl"))


def T(lu, e, d, p):
    return BfaTriple(lu.bits(e), lu.bits(d), lu.bits(p), lu.width)


# triple operations


def test_apply_triple(lu):
    b = lu.bits(["analyzePattern", "compute"])
    assert apply_triple(lu["analyzePattern"], b) == lu.bits(["factorize"])
    assert apply_triple(BfaTriple.empty(5), b) == b
    assert apply_triple(BfaTriple(0, 0, 0b10, 5), 0) is None
    with pytest.raises(WidthMismatch):
        apply_triple(lu["solve"], 1 << 7)


def test_dtransfer_known_values(lu):
    s2 = dtransfer(lu, "compute", BfaTriple.empty(5))
    assert s2 == T(lu, ["solve"], ["analyzePattern", "factorize", "compute"], ["compute"])
    s3 = dtransfer(lu, "solve", s2)
    assert s3 == T(lu, ["solve", "analyzePattern", "factorize", "compute"], [], ["compute"])
    assert dtransfer_seq(lu, ["compute", "solve"], BfaTriple.empty(5)) == s3
    assert dtransfer_seq(lu, [], s2) == s2
    assert dtransfer(lu, "compute", s2) is None
    assert dtransfer_seq(lu, ["compute", "factorize", "solve"], BfaTriple.empty(5)) is None


def test_join_known_values(lu):
    s2 = T(lu, ["solve"], ["analyzePattern", "factorize", "compute"], ["compute"])
    s3 = T(lu, ["solve", "analyzePattern", "factorize", "compute"], [], ["compute"])
    assert join_triple(s2, s3) == s2
    assert join_triple(BfaTriple.empty(5), T(lu, ["solve"], [], [])) == BfaTriple.empty(5)
    assert join_state({"p": s2}, {"p": s3}) == {"p": s2}
    assert join_state({}, {"p": s3}) == {"p": s3}
    assert join_state({"p": s2}, {"q": s3}) == {"p": s2, "q": s3}
    with pytest.raises(WidthMismatch):
        join_triple(BfaTriple.empty(4), BfaTriple.empty(5))


@given(st.integers(2, 8).flatmap(lambda w: st.tuples(triples(w), triples(w))))
def test_join_is_commutative_and_idempotent(pair):
    a, b = pair
    assert join_triple(a, b) == join_triple(b, a)
    assert join_triple(a, a) == a


@given(contracts(), st.data())
def test_partition_preservation(c, data):
    full = (1 << c.width) - 1
    e = data.draw(st.integers(0, full))
    t = BfaTriple(e, full & ~e, data.draw(st.integers(0, full)), c.width)
    m = data.draw(st.integers(0, c.width - 1))
    out = dtransfer(c, m, t)
    assume(out is not None)
    assert out.enable | out.disable == full and not out.enable & out.disable


@given(contracts(), st.data())
def test_enable_disable_idempotence(c, data):
    # build only defined compositions instead of filtering
    t = BfaTriple.empty(c.width)
    for _ in range(data.draw(st.integers(0, 6))):
        options = [u for u in (dtransfer(c, m, t) for m in range(c.width)) if u is not None]
        if not options:
            break
        t = data.draw(st.sampled_from(options))
    pairs = []
    for m in range(c.width):
        once = dtransfer(c, m, t)
        twice = once and dtransfer(c, m, once)
        if twice is not None:
            pairs.append((once, twice))
    assume(pairs)
    once, twice = data.draw(st.sampled_from(pairs))
    assert (twice.enable, twice.disable) == (once.enable, once.disable)
    assert once.pre & ~twice.pre == 0


@given(contracts(), st.data())
def test_join_soundness(c, data):
    w = c.width
    seqs = st.lists(st.integers(0, w - 1), max_size=5)
    t1 = dtransfer_seq(c, data.draw(seqs), BfaTriple.empty(w))
    t2 = dtransfer_seq(c, data.draw(seqs), BfaTriple.empty(w))
    assume(t1 is not None and t2 is not None)
    j = join_triple(t1, t2)
    for b in range(1 << w):
        r1, r2, rj = apply_triple(t1, b), apply_triple(t2, b), apply_triple(j, b)
        if None not in (r1, r2, rj):
            assert r1 & r2 == rj


@settings(max_examples=150)
@given(contracts(max_width=6), st.lists(st.integers(0, 5), max_size=6))
def test_dtransfer_correctness(c, raw):
    seq = [m % c.width for m in raw]
    t = dtransfer_seq(c, seq, BfaTriple.empty(c.width))
    for b in range(1 << c.width):
        cur = b
        for m in seq:
            cur = apply_triple(c.entries[m], cur)
            if cur is None:
                break
        if t is None:
            assert cur is None
        else:
            assert cur == apply_triple(t, b)


@given(contracts(max_width=6))
def test_intersection_property(c):
    dfa = expand_dfa(c)
    for size in (1, 2, 3):
        for subset in itertools.combinations(dfa.states, size):
            meet = (1 << c.width) - 1
            for s in subset:
                meet &= s
            for m in range(c.width):
                images = [dfa.step(s, m) for s in subset]
                at_meet = apply_triple(c.entries[m], meet)
                assert (None not in images) == (at_meet is not None)
                if at_meet is not None:
                    img = (1 << c.width) - 1
                    for x in images:
                        img &= x
                    assert img == at_meet


@given(contracts())
def test_delta_agrees_with_apply_triple(c):
    dfa = expand_dfa(c)
    for s in dfa.states:
        for m in range(c.width):
            assert dfa.step(s, m) == apply_triple(c.entries[m], s)


# explicit automata


def test_sparselu_expansion(lu):
    dfa = expand_dfa(lu)
    assert (dfa.num_states, dfa.num_transitions) == (5, 9)
    assert dfa.initial == parse_bit_string("10000")
    assert delta_hat(dfa, dfa.initial, ["<init>", "compute", "solve"]) == parse_bit_string("01111")
    assert delta_hat(dfa, dfa.initial, []) == dfa.initial
    assert delta_hat(dfa, dfa.initial, ["<init>", "solve"]) is None
    assert accepts(dfa, ["<init>", "analyzePattern", "factorize", "solve"])
    assert accepts(dfa, [])
    assert not accepts(dfa, ["<init>", "factorize"])
    with pytest.raises(UnknownState):
        delta_hat(dfa, parse_bit_string("00100"), [])


@pytest.mark.parametrize("k", range(1, 9))
def test_toggle_pairs_give_exponential_states(k):
    c = build_contract(contract_decl(ContractSpec(methods=2 * k, toggle_pairs=k)))
    assert constructed_dfa(c).num_states == 2**k
    assert expand_dfa(c).num_states == 2**k + 1


def test_one_method_class():
    c = raw_contract(2, [(0, 0)], 0b10)
    assert expand_dfa(c).num_states == 2


def test_state_limit(lu):
    with pytest.raises(StateExplosionLimit):
        expand_dfa(lu, state_limit=3)


def test_minimize_sparselu_and_two_state(lu):
    dfa = expand_dfa(lu)
    assert minimize_dfa(dfa).num_states == moore_state_count(dfa) == 5
    two = expand_dfa(raw_contract(2, [(0, 0)], 0b10))
    assert minimize_dfa(two).num_states == 2


def test_minimize_merges_equivalent_states():
    dfa = from_transitions(
        ("a", "b"),
        "s",
        [("s", "a", "x"), ("s", "b", "y"), ("x", "a", "x"), ("y", "a", "y")],
    )
    mini = minimize_dfa(dfa)
    assert (dfa.num_states, mini.num_states) == (3, 2)
    assert minimal_partition(dfa) == [[0], [1, 2]]
    assert language_included(dfa, mini) and language_included(mini, dfa)


@given(contracts())
def test_expanded_contracts_are_already_minimal(c):
    # distinct bit vectors differ in which method is accepted next
    dfa = expand_dfa(c)
    assert minimize_dfa(dfa).num_states == dfa.num_states


@settings(max_examples=200)
@given(contracts(max_width=7))
def test_minimization_matches_reference_and_language(c):
    dfa = expand_dfa(c)
    mini = minimize_dfa(dfa)
    assert mini.num_states == moore_state_count(dfa)
    assert sum(len(b) for b in minimal_partition(dfa)) == dfa.num_states
    assert language_included(dfa, mini) and language_included(mini, dfa)


@settings(max_examples=40)
@given(contracts(max_width=4))
def test_minimization_preserves_acceptance(c):
    dfa = expand_dfa(c)
    mini = minimize_dfa(dfa)
    for n in range(6):
        for seq in itertools.product(range(c.width), repeat=n):
            assert accepts(dfa, seq) == accepts(mini, seq)


def test_language_inclusion_pair():
    permissive = raw_contract(3, [(0, 0), (0, 0)], 0b110)
    restrictive = raw_contract(3, [(0, 0b100), (0, 0)], 0b110)
    a, b = expand_dfa(restrictive), expand_dfa(permissive)
    assert language_included(a, a)
    assert language_included(a, b)
    assert not language_included(b, a)
    other = from_transitions(("<init>", "x"), 0, [(0, "<init>", 1)])
    with pytest.raises(AlphabetMismatch):
        language_included(a, other)


def test_context_independency(lu):
    assert context_independency_check(expand_dfa(lu), 6) is None
    single = from_transitions(("<init>",), 0, [])
    assert context_independency_check(single, 3) is None
    # a counter: the second call of `a` takes `b` away again
    counter = from_transitions(("a", "b"), 0, [(0, "a", 1), (1, "a", 2), (1, "b", 1)])
    cx = context_independency_check(counter, 4)
    assert cx is not None and cx.item == 2
    assert accepts(counter, cx.prefix + (cx.follower,))
    assert not accepts(counter, cx.prefix + (cx.method, cx.follower))
    assert accepts(counter, cx.context + (cx.method, cx.follower))


@given(contracts())
def test_expanded_contracts_are_context_independent(c):
    dfa = expand_dfa(c)
    assert context_independency_check(dfa, dfa.num_states) is None


def test_dump_round_trip(lu):
    text = dump_dfa(expand_dfa(lu))
    alphabet, rows = parse_dump(text)
    assert alphabet == lu.alphabet
    assert len(rows) == 9
    assert ("10000", "<init>", "01100") in rows
    assert text.splitlines()[1:] == sorted(text.splitlines()[1:])
