import random
import warnings

import pytest

from dkb.dkbtext import parse_dkb
from dkb.fuzz import corpus
from dkb.kb import Assertion, ClashingAssumption, Exists, RoleExpr
from dkb.reason import (
    ConjunctiveQuery,
    QueryAtom,
    QuerySyntaxError,
    ReasoningError,
    certain_answers,
    entails,
    is_satisfiable,
    justified_assumptions,
    parse_query,
)


def ex(r, a, positive=True):
    return Assertion(Exists(RoleExpr(r)), (a,), positive)


def test_satisfiability(dept, inconsistent, supervisor):
    assert is_satisfiable(dept)
    assert not is_satisfiable(inconsistent)
    assert is_satisfiable(parse_dkb("D: A [= B.\nD: A [= not B.\nA(a)."))
    # safety is not required
    assert is_satisfiable(supervisor)


def test_entails_kdept(dept):
    assert entails(dept, ex("hasCourse", "alice")).verdict
    assert not entails(dept, ex("hasCourse", "bob")).verdict
    assert entails(dept, ex("hasCourse", "bob", False)).verdict
    assert entails(dept, Assertion("DeptMember", ("bob",))).verdict


def test_entails_nixon(nixon):
    q = Assertion("Pacifist", ("nixon",))
    assert not entails(nixon, q).verdict
    r = entails(nixon, q, "brave")
    assert r.verdict and r.mode == "brave" and len(r.witnesses) == 1


def test_entails_unsatisfiable(inconsistent):
    q = Assertion("B", ("a",))
    c, b = entails(inconsistent, q), entails(inconsistent, q, "brave")
    assert c.verdict and c.unsatisfiable
    assert not b.verdict


def test_entails_errors(dept, supervisor):
    with pytest.raises(ReasoningError) as e:
        entails(supervisor, Assertion("Employee", ("alice",)))
    assert e.value.report is not None and not e.value.report.exception_safe
    with pytest.raises(ReasoningError):
        entails(dept, Assertion("Nope", ("alice",)))
    with pytest.raises(ReasoningError):
        entails(dept, Assertion("Professor", ("carol",)))
    with pytest.raises(ReasoningError):
        entails(parse_dkb("@no-una.\nA(a)."), Assertion("A", ("a",)))
    with pytest.raises(ValueError):
        entails(dept, Assertion("Professor", ("alice",)), "sometimes")


def test_justified_assumptions(dept, nixon):
    (j,) = justified_assumptions(dept)
    assert j.chi == {ClashingAssumption("d1", ("bob",))}
    assert j.render() == ["override: DeptMember [= exists hasCourse @ bob  by {DeptMember(bob), not _ex_hasCourse(bob)}"]
    (j,) = justified_assumptions(parse_dkb("A [= B.\nA(a)."))
    assert j.chi == frozenset()
    a, b = justified_assumptions(nixon)
    assert len(a.chi) == len(b.chi) == 1 and a.chi != b.chi


def test_query_parse(dept):
    q = parse_query("?(x) :- DeptMember(x), hasCourse(x,y).", dept.vocab.individuals)
    assert q.answer_vars == ("x",) and q.exist_vars == ("y",)
    q = parse_query("?() :- hasCourse(alice, y).", dept.vocab.individuals)
    assert q.atoms[0].args == ("alice", "y") and q.exist_vars == ("y",)
    q = parse_query("?() :- hasCourse('carol', y).")
    assert q.exist_vars == ("y",)
    for bad in ("DeptMember(x)", "?(x) :- .", "?(x) :- R(x,y,z).", "?(z) :- A(x)."):
        with pytest.raises((QuerySyntaxError, ValueError)):
            parse_query(bad)
    with pytest.raises(ValueError):
        ConjunctiveQuery(("x",), ("x",), (QueryAtom("A", ("x",)),))


def test_certain_answers_kdept(dept):
    q = parse_query("?(x) :- DeptMember(x), hasCourse(x,y).", dept.vocab.individuals)
    assert certain_answers(dept, q) == {("alice",)}
    assert certain_answers(dept, parse_query("?() :- Professor(x).")) == {()}
    assert certain_answers(dept, parse_query("?(x) :- PhDStudent(x).")) == {("bob",)}


def test_certain_answers_nixon(nixon):
    assert certain_answers(nixon, parse_query("?() :- Pacifist(nixon).", ["nixon"])) == set()


def test_certain_answers_unsat(inconsistent):
    assert certain_answers(inconsistent, parse_query("?(x) :- B(x).")) == {("a",)}


def test_certain_answers_warning():
    k = parse_dkb("A [= exists R.\nexists R^- [= A.\nA(a).")
    with pytest.warns(UserWarning, match="chain bound"):
        certain_answers(k, parse_query("?(x) :- A(x)."))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        certain_answers(parse_dkb("A [= exists R.\nA(a)."), parse_query("?(x) :- A(x)."))


def test_certain_answers_errors(dept, supervisor):
    with pytest.raises(ReasoningError):
        certain_answers(dept, parse_query("?(x) :- Nope(x)."))
    with pytest.raises(ReasoningError):
        certain_answers(supervisor, parse_query("?(x) :- Employee(x)."))


CORPUS = list(corpus(13, 100))


@pytest.mark.parametrize("i", range(0, 100, 4))
def test_single_atom_agreement_and_mode_order(i):
    k = CORPUS[i]
    v = k.vocab
    rng = random.Random(i)
    for _ in range(4):
        if rng.random() < 0.5:
            q = Assertion(rng.choice(v.concepts), (rng.choice(v.individuals),))
            text = f"?() :- {q.pred}('{q.args[0]}')."
        else:
            q = Assertion(rng.choice(v.roles), (rng.choice(v.individuals), rng.choice(v.individuals)))
            text = f"?() :- {q.pred}('{q.args[0]}', '{q.args[1]}')."
        c = entails(k, q).verdict
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            assert (certain_answers(k, parse_query(text)) == {()}) == c
        if is_satisfiable(k) and c:
            assert entails(k, q, "brave").verdict
