import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dkb.dkbtext import DKBParseError, parse_assertion, parse_dkb, serialize_dkb
from dkb.fuzz import random_dkb
from dkb.kb import DKB, Assertion, ConceptIncl, Exists, RoleExpr
from dkb.normalize import normalize

from conftest import DEPT


def test_parse_kdept(dept):
    assert dept.vocab.concepts == ("DeptMember", "Professor", "PhDStudent")
    assert dept.vocab.roles == ("hasCourse",)
    assert len(dept.strict) == 3 and len(dept.abox) == 2
    assert dept.defeasible[0].id == "d1"


def test_parse_empty():
    k = parse_dkb("")
    assert k.is_empty() and k == DKB()


def test_parse_inverse_exists():
    k = parse_dkb("A [= exists R^-.")
    assert k.strict == (ConceptIncl(k.strict[0].lhs, Exists(RoleExpr("R", True))),)


def test_round_trip_kdept(dept):
    assert parse_dkb(serialize_dkb(dept)) == dept


def test_serialize_empty():
    assert serialize_dkb(DKB()) == "# dkb\n"


def test_serialize_normalized_has_ex_symbols(dept):
    text = serialize_dkb(normalize(dept)[0])
    assert "_ex_hasCourse" in text
    assert parse_dkb(text) == normalize(dept)[0]


def test_syntax_error_has_span():
    with pytest.raises(DKBParseError) as e:
        parse_dkb("A [= B.\nC [= .")
    (d,) = e.value.diagnostics[:1]
    assert d.span is not None and d.span.line == 2


def test_semantic_errors():
    for bad in ("Ref(R).", "Inv(R^-, S).", "A(a).\nA(a, b).", "A [= exists A."):
        with pytest.raises(DKBParseError):
            parse_dkb(bad)


def test_no_una_flag():
    assert parse_dkb("@no-una.\nA(a).").una is False


def test_defeasible_assertion_and_explicit_id():
    k = parse_dkb("D[x7]: A [= B.\nD: C(a).")
    assert [d.id for d in k.defeasible] == ["x7", "d2"]
    assert parse_dkb(serialize_dkb(k)) == k


def test_parse_assertion_forms():
    assert parse_assertion("A(a)") == Assertion("A", ("a",))
    assert parse_assertion("not R(a, b)") == Assertion("R", ("a", "b"), False)
    assert parse_assertion("exists R(a)") == Assertion(Exists(RoleExpr("R")), ("a",))
    assert parse_assertion("R^-(a, b)") == Assertion("R", ("b", "a"))
    for bad in ("A(", "exists R(a, b)", "R^-(a)", "not(a)"):
        with pytest.raises(DKBParseError):
            parse_assertion(bad)


@settings(max_examples=300, deadline=None)
@given(st.binary(max_size=200))
def test_parser_total_on_bytes(data):
    try:
        parse_dkb(data)
    except DKBParseError as e:
        assert e.diagnostics


TOKENS = ["A", "B", "R", "a", "b", "[=", "exists", "not", "^-", "(", ")", ",", ".", "D:", "\n",
          "Dis", "Inv", "Irr", "bottom", "@no-una", "#", " "]


@settings(max_examples=300, deadline=None)
@given(st.lists(st.sampled_from(TOKENS), max_size=30))
def test_parser_total_on_token_soup(toks):
    try:
        k = parse_dkb(" ".join(toks))
    except DKBParseError:
        return
    assert parse_dkb(serialize_dkb(k)) == k


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**9))
def test_round_trip_random(seed):
    k = random_dkb(random.Random(seed))
    assert parse_dkb(serialize_dkb(k)) == k
    n = normalize(k)[0]
    assert parse_dkb(serialize_dkb(n)) == n


def test_bytes_input_utf8():
    assert parse_dkb(DEPT.encode()) == parse_dkb(DEPT)
