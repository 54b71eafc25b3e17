import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dkb.dkbtext import parse_dkb
from dkb.dlprog import (
    COMPLETE,
    FACT_PREDICATES,
    MODES,
    BASE,
    Const,
    DAtom,
    DLiteral,
    ProgramError,
    assemble_program,
    deduction_rules,
    emit_text,
    format_rule,
    input_translation,
    output_atom,
    parse_rule,
)
from dkb.fuzz import corpus
from dkb.kb import DKB, Assertion
from dkb.normalize import normalize

from conftest import GOLDEN


def facts_text(k):
    return {str(f) for f in input_translation(normalize(k)[0])}


def test_input_translation_examples(dept):
    t = facts_text(dept)
    assert 'subClass("Professor","DeptMember")' in t
    assert 'supEx("_ex_hasCourse",hasCourse,"_aux_1")' in t
    assert 'def_subclass("DeptMember","_ex_hasCourse")' in t
    assert 'supNot("PhDStudent","_ex_hasCourse")' in t


@pytest.mark.parametrize("mode", MODES)
def test_deduction_rule_examples(mode):
    rules = {str(r) for r in deduction_rules(mode)}
    assert "tripled(X,R,X1) :- supEx(Y,R,X1), instd(X,Y)." in rules
    assert "-instd(X,Y) :- supEx(Y,R,W), const(X), all_nrel(X,R)." in rules
    assert "instd(X,Z) :- def_subclass(Y,Z), instd(X,Y), not ovr(subClass,X,Y,Z)." in rules
    assert "ovr(subClass,X,Y,Z) :- def_subclass(Y,Z), instd(X,Y), -instd(X,Z)." in rules


def test_base_rules_subset_of_complete():
    base = {str(r) for r in deduction_rules(BASE)}
    assert base <= {str(r) for r in deduction_rules(COMPLETE)}


def test_cyclic_replaces_supex():
    rules = {str(r) for r in deduction_rules(COMPLETE, cyclic=True)}
    assert "tripled(X,R,X1) :- supEx(Y,R,W), instd(X,Y), sk(X,W,X1)." in rules
    assert "tripled(X,R,X1) :- supEx(Y,R,X1), instd(X,Y)." not in rules


@pytest.mark.parametrize("mode", MODES)
def test_rules_safe_and_closed(mode):
    rules = deduction_rules(mode, cyclic=True) + deduction_rules(mode)
    assert all(r.is_safe() for r in rules)
    heads = {r.head.atom.pred for r in rules}
    body = {l.atom.pred for r in rules for l in r.body_pos + r.body_naf}
    assert body <= heads | FACT_PREDICATES
    assert all(l.atom.pred == "ovr" for r in rules for l in r.body_naf)


def test_rule_text_round_trip():
    for r in deduction_rules(COMPLETE, cyclic=True):
        assert str(parse_rule(format_rule(r), r.label)) == str(r)


def test_assemble_kdept_constants(dept):
    p = assemble_program(normalize(dept)[0])
    assert set(p.constants) == {"alice", "bob", "_aux_1"}
    text = set(emit_text(p).splitlines())
    assert {"first(alice).", "next(alice,bob).", 'next(bob,"_aux_1").', 'last("_aux_1").'} <= text


def test_assemble_empty():
    p = assemble_program(DKB())
    assert not any(f.atom.pred == "const" for f in p.facts)
    assert [str(r) for r in p.rules] == [str(r) for r in deduction_rules()]


def test_assemble_refuses_unsafe(supervisor):
    with pytest.raises(ProgramError) as e:
        assemble_program(normalize(supervisor)[0])
    assert e.value.report is not None and not e.value.report.exception_safe


def test_assemble_refuses_non_normal(dept):
    with pytest.raises(Exception):
        assemble_program(dept)


def test_output_atoms(dept):
    assert str(output_atom(Assertion("DeptMember", ("alice",)))) == 'instd(alice,"DeptMember")'
    assert str(output_atom(Assertion("hasAdvisor", ("bob", "alice")))) == "tripled(bob,hasAdvisor,alice)"
    assert str(output_atom(Assertion("Professor", ("bob",), False))) == '-instd(bob,"Professor")'
    with pytest.raises(ValueError):
        output_atom(Assertion("Nope", ("alice",)), dept)
    with pytest.raises(ValueError):
        output_atom(Assertion("Professor", ("carol",)), dept)


def test_emit_examples(dept):
    text = emit_text(assemble_program(normalize(dept)[0]))
    assert "instd(X,Z) :- def_subclass(Y,Z), instd(X,Y), not ovr(subClass,X,Y,Z)." in text
    assert "nom(alice)." in text
    assert "-instd(" not in "".join(l for l in text.splitlines() if ":-" not in l)


def test_emit_matches_golden(dept):
    assert emit_text(assemble_program(normalize(dept)[0])) == (GOLDEN / "dept.lp").read_text()


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6))
def test_emit_deterministic(seed):
    k = next(corpus(seed, 1))
    n = normalize(k)[0]
    a = emit_text(assemble_program(n))
    assert a == emit_text(assemble_program(normalize(k)[0]))
    facts = [l for l in a.splitlines() if ":-" not in l]
    assert facts == sorted(facts)
