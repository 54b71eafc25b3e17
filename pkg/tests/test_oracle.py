import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dkb.dkbtext import parse_dkb
from dkb.fuzz import corpus
from dkb.kb import DKB, App, Assertion, ClashingAssumption, Exists, RoleExpr
from dkb.normalize import normalize
from dkb.oracle import (
    CONSISTENT,
    INCONSISTENT,
    OracleBudgetError,
    candidate_assumptions,
    default_depth,
    is_justified,
    least_cas_model,
    oracle_entails,
    oracle_justified_chis,
    refutes,
    strict_satisfiable,
)

BOB = ClashingAssumption("d1", ("bob",))
ALICE = ClashingAssumption("d1", ("alice",))


@pytest.fixture
def ndept(dept):
    return normalize(dept)[0]


def test_candidates(ndept):
    assert candidate_assumptions(ndept) == {ALICE, BOB}
    k = parse_dkb("D: R [= S.\nR(a, b).")
    assert len(candidate_assumptions(k)) == 4
    assert candidate_assumptions(parse_dkb("A [= B.\nA(a).")) == frozenset()


def test_least_model_kdept(ndept):
    m = least_cas_model(ndept, {BOB}, 1)
    assert m.status == CONSISTENT
    assert Assertion("hasCourse", ("alice", App("hasCourse", "alice"))) in m
    assert Assertion("_ex_hasCourse", ("bob",), False) in m
    assert least_cas_model(ndept, (), 1).status == INCONSISTENT


def test_least_model_empty():
    m = least_cas_model(DKB(), (), 3)
    assert m.consistent and m.literals == frozenset()


def test_is_justified_examples(ndept):
    j = is_justified(ndept, {BOB})
    assert j.ok
    assert {str(e) for e in j.evidence[BOB].elements} == {"DeptMember(bob)", "not _ex_hasCourse(bob)"}
    assert not is_justified(ndept, {ALICE, BOB})
    assert is_justified(parse_dkb("D: A [= B.\nA(a)."), set())


def test_is_justified_precondition(ndept):
    with pytest.raises(ValueError):
        is_justified(ndept, set(), 1)


def test_justified_chis(ndept, nixon, inconsistent):
    assert oracle_justified_chis(ndept) == [frozenset({BOB})]
    chis = oracle_justified_chis(nixon)
    assert len(chis) == 2 and all(len(c) == 1 for c in chis)
    assert oracle_justified_chis(inconsistent) == []


def test_budget():
    inds = ", ".join(f"a{i}" for i in range(6))
    k = parse_dkb(f"D: R [= S.\n@individuals {inds}.\n" + "".join(
        f"R(a{i}, a{j}).\nnot S(a{i}, a{j}).\n" for i in range(6) for j in range(6)))
    with pytest.raises(OracleBudgetError):
        oracle_justified_chis(k)


def test_refutation_and_entailment(ndept):
    ex = Assertion(Exists(RoleExpr("hasCourse")), ("bob",))
    assert refutes(ndept, {BOB}, ex)
    assert not refutes(ndept, {BOB}, Assertion(Exists(RoleExpr("hasCourse")), ("alice",)))
    assert oracle_entails(ndept, Assertion("DeptMember", ("bob",)))
    assert oracle_entails(ndept, ex.negate())
    with pytest.raises(ValueError):
        refutes(ndept, set(), ex.negate())


def test_strict_satisfiable(dept, inconsistent):
    assert strict_satisfiable(dept)
    assert not strict_satisfiable(inconsistent)
    assert strict_satisfiable(parse_dkb("D: A [= B.\nD: A [= not B.\nA(a)."))


def test_default_depth(ndept):
    assert default_depth(ndept) == 2


def _founded(m):
    """Every positive literal reaches assertions through stored derivations."""
    ok = {}

    def visit(lit, stack):
        if lit in ok:
            return ok[lit]
        if lit in stack:
            return False
        label, prem = m.derivation(lit)
        if label == "assertion":
            ok[lit] = not prem
            return ok[lit]
        ok[lit] = all(p in m.literals and visit(p, stack | {lit}) for p in prem) and bool(prem)
        return ok[lit]

    return all(visit(l, frozenset()) for l in m.positive())


CORPUS = list(corpus(5, 150))


@pytest.mark.parametrize("i", range(0, 150, 5))
def test_foundedness_and_monotonicity(i):
    n = normalize(CORPUS[i])[0]
    for chi in oracle_justified_chis(n):
        m = least_cas_model(n, chi)
        assert m.consistent and _founded(m)
        deeper = least_cas_model(n, chi, m.depth + 1)
        assert m.positive() <= deeper.positive()
        chain = [least_cas_model(n, chi, d).positive() for d in range(m.depth + 1)]
        assert all(a <= b for a, b in zip(chain, chain[1:]))


@pytest.mark.parametrize("i", range(0, 150, 5))
def test_antichain_and_justified(i):
    n = normalize(CORPUS[i])[0]
    chis = oracle_justified_chis(n)
    assert not any(a < b for a, b in itertools.permutations(chis, 2))
    for chi in chis:
        assert chi <= candidate_assumptions(n)
        assert is_justified(n, chi)


@pytest.mark.parametrize("i", range(0, 150, 10))
def test_identification_does_not_change_results(i):
    n = normalize(CORPUS[i])[0]
    assert oracle_justified_chis(n, identify=True) == oracle_justified_chis(n, identify=False)
