import pytest

from dkb.dkbtext import parse_dkb
from dkb.kb import (
    DKB,
    App,
    Assertion,
    Atomic,
    ConceptIncl,
    Dis,
    Exists,
    Inv,
    Irr,
    Not,
    RoleExpr,
    RoleIncl,
    axiom_arity,
    instantiate_axiom,
    minimal_clashing_sets,
    validate_dkb,
)
from dkb.kb import Ref

R, S = RoleExpr("R"), RoleExpr("S")


def test_validate_dept(dept):
    rep = validate_dkb(dept)
    assert rep.ok and not rep.errors


def test_validate_empty():
    assert validate_dkb(DKB()).ok


def test_validate_reflexivity():
    k = DKB(strict=(Ref("R"),))
    rep = validate_dkb(k)
    assert not rep.ok
    assert any("reflexivity unsupported" in d.message for d in rep.errors)


def test_clashing_set_subclass():
    (s,) = minimal_clashing_sets(ConceptIncl(Atomic("A"), Atomic("B")), ("e",))
    assert s.elements == {Assertion("A", ("e",)), Assertion("B", ("e",), False)}


def test_clashing_sets_inv():
    sets = minimal_clashing_sets(Inv("R", "S"), ("e1", "e2"))
    assert [s.elements for s in sets] == [
        {Assertion("R", ("e1", "e2")), Assertion("S", ("e2", "e1"), False)},
        {Assertion("R", ("e1", "e2"), False), Assertion("S", ("e2", "e1"))},
    ]


def test_clashing_set_irr():
    (s,) = minimal_clashing_sets(Irr("R"), ("e",))
    assert s.elements == {Assertion("R", ("e", "e"))}


def test_clashing_set_negative_inclusion_and_exists():
    (s,) = minimal_clashing_sets(ConceptIncl(Atomic("A"), Not(Exists(R))), ("e",))
    assert s.elements == {Assertion("A", ("e",)), Assertion(Exists(R), ("e",))}
    (s,) = minimal_clashing_sets(RoleIncl(R, S.inverse()), ("a", "b"))
    assert s.elements == {Assertion("R", ("a", "b")), Assertion("S", ("b", "a"), False)}


def test_clashing_set_arity_checked():
    with pytest.raises(ValueError):
        minimal_clashing_sets(Irr("R"), ("a", "b"))
    with pytest.raises(ValueError):
        axiom_arity(Ref("R"))


def test_clashing_sets_deterministic():
    a = [str(s) for s in minimal_clashing_sets(Inv("R", "S"), ("x", "y"))]
    b = [str(s) for s in minimal_clashing_sets(Inv("R", "S"), ("x", "y"))]
    assert a == b


def test_instantiate_existential_skolemizes():
    (c,) = instantiate_axiom(ConceptIncl(Atomic("A"), Exists(R)), ("a",))
    assert c.body == (Assertion("A", ("a",)),)
    assert c.head == Assertion("R", ("a", App("R", "a")))
    assert str(c) == "A(a) -> R(a, f_R(a))"


def test_instantiate_subclass_and_dis():
    (c,) = instantiate_axiom(ConceptIncl(Atomic("A"), Atomic("B")), ("a",))
    assert str(c) == "A(a) -> B(a)"
    c1, c2 = instantiate_axiom(Dis(R, S), ("a", "b"))
    assert str(c1) == "R(a, b) -> not S(a, b)"
    assert str(c2) == "S(a, b) -> not R(a, b)"
    with pytest.raises(ValueError):
        instantiate_axiom(Dis(R, S), ("a",))


def _unit_propagate(lits: set, clauses) -> bool:
    """True iff propagation reaches a complementary pair."""
    lits = set(lits)
    changed = True
    while changed:
        changed = False
        for c in clauses:
            if all(b in lits for b in c.body) and c.head not in lits:
                lits.add(c.head)
                changed = True
    return any(l.negate() in lits for l in lits)


SHAPES = [
    (ConceptIncl(Atomic("A"), Atomic("B")), ("e",)),
    (ConceptIncl(Atomic("A"), Not(Atomic("B"))), ("e",)),
    (ConceptIncl(Atomic("A"), Exists(R)), ("e",)),
    (RoleIncl(R, S), ("e1", "e2")),
    (RoleIncl(R.inverse(), S), ("e1", "e2")),
    (Dis(R, S), ("e1", "e2")),
    (Inv("R", "S"), ("e1", "e2")),
    (Irr("R"), ("e",)),
]


@pytest.mark.parametrize("alpha,args", SHAPES, ids=[str(a) for a, _ in SHAPES])
def test_clashing_sets_clash_with_instance(alpha, args):
    clauses = instantiate_axiom(alpha, args)
    for s in minimal_clashing_sets(alpha, args):
        els = set(s.elements)
        assert not any(e.negate() in els for e in els)
        if isinstance(alpha, ConceptIncl) and isinstance(alpha.rhs, Exists):
            # R(e, f_R(e)) contradicts ¬∃R(e) only through the ∃ reading
            assert Assertion(alpha.rhs, args, False) in els
            continue
        assert _unit_propagate(els, clauses), (alpha, s)


def test_parsed_kdept_shape(dept):
    assert dept.vocab.individuals == ("alice", "bob")
    assert len(dept.defeasible) == 1
    assert dept.defeasible[0].inner == ConceptIncl(Atomic("DeptMember"), Exists(RoleExpr("hasCourse")))


def test_ref_rejected_by_parser():
    from dkb.dkbtext import DKBParseError

    with pytest.raises(DKBParseError):
        parse_dkb("Ref(R).")
