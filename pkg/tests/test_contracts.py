from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import contract_of, contracts, fixture_text, raw_contract
from tsa.automata import constructed_dfa, expand_dfa, language_included
from tsa.contracts import (
    BfaTriple,
    bit_string,
    build_contract,
    check_well_formed,
    count_annotation_terms,
    desugar,
    first_subsumption_failure,
    parse_bit_string,
    subsumes,
)
from tsa.errors import (
    AlphabetMismatch,
    ContractError,
    InvalidAnnotation,
    OverlappingEnableDisable,
    UnknownMethodName,
)
from tsa.frontend import parse_program

SIGMA = ("<init>", "a", "b", "c", "d")


@pytest.fixture(scope="module")
def sparselu():
    return contract_of(fixture_text("sparselu.tsl"))


def test_sparselu_alphabet_and_entries(sparselu):
    assert sparselu.alphabet == ("<init>", "analyzePattern", "compute", "factorize", "solve")
    lu = sparselu
    assert lu.describe(lu["analyzePattern"]) == "({factorize}, {analyzePattern, compute, solve}, {analyzePattern})"
    assert lu.describe(lu["compute"]) == "({solve}, {analyzePattern, compute, factorize}, {compute})"
    assert lu.describe(lu["solve"]) == "({analyzePattern, compute, factorize, solve}, {}, {solve})"
    assert lu.describe(lu["<init>"]) == "({analyzePattern, compute}, {<init>, factorize, solve}, {<init>})"


def test_sparselu_states(sparselu):
    assert bit_string(sparselu.initial_state, 5) == "10000"
    assert bit_string(sparselu.constructed_state, 5) == "01100"
    assert parse_bit_string("01111") == 0b11110


@pytest.mark.parametrize(
    "anns, enable, disable",
    [
        ([("Enable", ("a", "b"))], {"a", "b"}, set()),
        ([("Disable", ("c",))], set(), {"c"}),
        ([("EnableOnly", ("a",))], {"a"}, {"b", "c", "d"}),
        ([("DisableOnly", ("a",))], {"b", "c", "d"}, {"a"}),
        ([("EnableAll", ())], {"a", "b", "c", "d"}, set()),
        ([("DisableAll", ())], set(), {"a", "b", "c", "d"}),
        ([("Enable", ("a",)), ("Disable", ("b",))], {"a"}, {"b"}),
        ([], set(), set()),
    ],
)
def test_desugar(anns, enable, disable):
    e, d = desugar(anns, SIGMA)
    names = lambda bits: {SIGMA[i] for i in range(len(SIGMA)) if bits >> i & 1}  # noqa: E731
    assert names(e) == enable
    assert names(d) == disable


@given(st.sets(st.sampled_from(SIGMA[1:]), min_size=1))
def test_sugar_partitions_methods(named):
    everything = sum(1 << i for i in range(1, len(SIGMA)))
    for kind in ("EnableOnly", "DisableOnly"):
        e, d = desugar([(kind, tuple(named))], SIGMA)
        assert e | d == everything and not e & d


@pytest.mark.parametrize(
    "anns, error",
    [
        ([("Enable", ("zz",))], UnknownMethodName),
        ([("Enable", ("a",)), ("Disable", ("a",))], OverlappingEnableDisable),
        ([("EnableAll", ("a",))], InvalidAnnotation),
        ([("Enable", ())], InvalidAnnotation),
        ([("Toggle", ("a",))], InvalidAnnotation),
        ([("Enable", ("<init>",))], InvalidAnnotation),
    ],
)
def test_desugar_errors(anns, error):
    with pytest.raises(error):
        desugar(anns, SIGMA, "a")


def test_unknown_method_names_class():
    src = "class K {\n    @Enable(nope)\n    void a();\n}\n"
    with pytest.raises(UnknownMethodName) as exc:
        contract_of(src)
    assert "nope" in str(exc.value)


def test_implicit_constructor_enables_unguarded_methods():
    src = """class K {
    @Enable(b)
    void a();
    @Disable(a)
    void b();
    void c();
}
"""
    k = contract_of(src)
    assert k.names(k["<init>"].enable) == ["a", "c"]
    assert k.names(k["<init>"].disable) == ["<init>", "b"]


def test_explicit_constructor_annotation():
    src = """class K {
    @EnableOnly(b)
    K();
    @Enable(b)
    void a();
    void b();
}
"""
    k = contract_of(src)
    assert k.names(k["<init>"].enable) == ["b"]
    assert k.names(k["<init>"].disable) == ["<init>", "a"]


def test_self_enable_is_not_a_guard():
    src = "class K {\n    @EnableAll\n    void a();\n    @Disable(b)\n    void b();\n}\n"
    k = contract_of(src)
    assert k.names(k["<init>"].enable) == ["a", "b"]


def test_duplicate_method_rejected():
    src = "class K {\n    @EnableAll\n    void a();\n}\n"
    cls = parse_program(src).classes[0]
    cls.methods.append(cls.methods[0])
    with pytest.raises(ContractError):
        build_contract(cls)


def test_well_formedness_reports_problems():
    good = raw_contract(3, [(0b100, 0b010), (0, 0)], 0b110)
    assert check_well_formed(good) == []
    bad = raw_contract(3, [(0b100, 0b100), (0, 0)], 0b110)
    assert any("enables and disables" in p for p in check_well_formed(bad))


@given(contracts())
def test_generated_contracts_are_well_formed(c):
    assert check_well_formed(c) == []
    assert c.entries[0].enable | c.entries[0].disable == (1 << c.width) - 1


def test_triple_identity():
    assert BfaTriple.empty(4).is_identity
    assert not BfaTriple(0, 0, 1, 4).is_identity


# subsumption


def _pair(sub_rows, sup_rows, ctor=0b110):
    return raw_contract(3, sub_rows, ctor, "Sub"), raw_contract(3, sup_rows, ctor, "Sup")


def test_subsumption_reflexive(sparselu):
    assert subsumes(sparselu, sparselu)
    assert subsumes(sparselu, sparselu, "literal")


def test_subsumption_polarities_disagree_on_extra_enable():
    # Sub's m1 additionally enables m2: it accepts more sequences.
    sub, sup = _pair([(0b100, 0), (0, 0b100)], [(0, 0), (0, 0b100)], ctor=0b010)
    assert subsumes(sub, sup, "language")
    assert first_subsumption_failure(sub, sup, "literal") == "m1"
    assert language_included(constructed_dfa(sup), constructed_dfa(sub))


def test_subsumption_alphabet_mismatch(sparselu):
    other = raw_contract(3, [(0, 0), (0, 0)], 0b110)
    with pytest.raises(AlphabetMismatch):
        subsumes(other, sparselu)


def test_method_wise_condition_is_not_necessary():
    # m2 is never enabled, so what m2 does is irrelevant to the language.
    sub, sup = _pair([(0, 0), (0, 0b010)], [(0, 0), (0, 0)], ctor=0b010)
    assert language_included(constructed_dfa(sup), constructed_dfa(sub))
    assert not subsumes(sub, sup)


@settings(max_examples=300)
@given(contracts(max_width=5), st.data())
def test_subsumption_implies_language_inclusion(sup, data):
    methods = (1 << sup.width) - 2
    rows = []
    for t in sup.entries[1:]:
        e = t.enable | (data.draw(st.integers(0, methods)) & ~t.disable)
        d = t.disable & data.draw(st.integers(0, methods))
        rows.append((e & ~d, d))
    sub = raw_contract(sup.width, rows, sup.entries[0].enable)
    assert subsumes(sub, sup)
    assert language_included(expand_dfa(sup), expand_dfa(sub))


def test_annotation_terms_counted_per_term(sparselu):
    cls = parse_program(fixture_text("sparselu.tsl")).classes[0]
    assert count_annotation_terms(cls) == 4
