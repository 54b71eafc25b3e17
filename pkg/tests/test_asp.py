import itertools
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dkb.asp import (
    HAVE_NUMBA,
    UnsupportedProgramError,
    answer_sets,
    answer_sets_bruteforce,
    answer_sets_naive,
    ground,
    is_answer_set,
    least_model,
    reduct,
)
from dkb.asp.kernels import NUMBA_MIN_RULES, Kernel
from dkb.dlprog import DProgram, assemble_program, parse_rule
from dkb.fuzz import corpus
from dkb.normalize import normalize

from conftest import GOLDEN


def prog(*lines):
    return DProgram(rules=tuple(parse_rule(l) for l in lines))


def texts(gp, ids):
    return sorted(gp.literal_text(i) for i in ids)


def pk(k):
    return assemble_program(normalize(k)[0])


# -- grounding


def test_ground_kdept_universe(dept):
    p = pk(dept)
    gp = ground(p)
    consts = {f.atom.args[0].name for f in p.facts if f.atom.pred == "const"}
    assert consts == {"alice", "bob", "_aux_1"}
    assert consts <= {getattr(c, "name", c) for c in gp.universe}


def test_ground_facts_only():
    gp = ground(prog("a(c).", "b(d)."))
    assert texts(gp, least_model(gp)) == ["a(c)", "b(d)"]


def test_ground_two_variable_rule():
    gp = ground(prog("p(a).", "p(b).", "p(c).", "q(X,Y) :- p(X), p(Y)."))
    heads = [r for r in gp.rules if r.head.atom.pred == "q"]
    assert len(heads) == 9


def test_ground_program_has_no_variables(dept):
    from dkb.dlprog import Var

    gp = ground(pk(dept))
    for r in gp.rules:
        for l in (r.head,) + r.body_pos + r.body_naf:
            assert not any(isinstance(t, Var) for t in l.atom.args)


# -- least model and reduct


def test_least_model_chain():
    gp = ground(prog("a.", "b :- a."))
    assert texts(gp, least_model(gp)) == ["a", "b"]


def test_least_model_inconsistent():
    assert least_model(ground(prog("a.", "-a."))) is None


def test_reduct_items():
    gp = ground(prog("x.", "ovr(t) :- x.", "h :- x, not ovr(t).", "g :- x."))
    o = gp.lookup(parse_rule("ovr(t).").head)
    kept = {str(r) for r in reduct(gp, {o}).rules}
    assert "h :- x." not in kept and "g :- x." in kept
    kept = {str(r) for r in reduct(gp, set()).rules}
    assert "h :- x." in kept and "g :- x." in kept


def test_reduct_replay_kdept(dept):
    gp = ground(pk(dept))
    (s,) = answer_sets(gp)
    assert least_model(reduct(gp, s.ids)) == s.ids


# -- answer sets


def test_kdept_answer_set(dept):
    (s,) = answer_sets(pk(dept))
    t = set(s.text())
    assert 'ovr(subClass,bob,"DeptMember","_ex_hasCourse")' in t
    assert 'instd(alice,"_ex_hasCourse")' in t
    assert 'tripled(alice,hasCourse,"_aux_1")' in t
    assert '-instd(bob,"_ex_hasCourse")' in t


def test_nixon_two_sets(nixon):
    sets = answer_sets(pk(nixon))
    assert len(sets) == 2
    a, b = (s.chi for s in sets)
    assert a and b and not a <= b and not b <= a


def test_inconsistent_no_sets(inconsistent):
    assert answer_sets(pk(inconsistent)) == []


def test_limit(nixon):
    assert len(answer_sets(pk(nixon), limit=1)) == 1


def test_unsupported_class():
    p = prog("q(c).", "p(X) :- q(X), not r(X).", "r(X) :- q(X), not p(X).")
    with pytest.raises(UnsupportedProgramError):
        answer_sets(p)
    got = [s.text() for s in answer_sets(p, general=True)]
    assert got == [s.text() for s in answer_sets_naive(p)]
    assert sorted(got) == [["p(c)", "q(c)"], ["q(c)", "r(c)"]]


def test_naive_limit():
    with pytest.raises(ValueError):
        answer_sets_naive(prog(*[f"a{i}." for i in range(25)]))


# -- properties on the corpus


CORPUS = list(corpus(11, 120))


@pytest.mark.parametrize("i", range(0, 120, 3))
def test_gl_and_bruteforce(i):
    k = CORPUS[i]
    gp = ground(pk(k))
    sets = answer_sets(gp)
    for s in sets:
        assert is_answer_set(gp, s.ids)
    chis = [s.chi for s in sets]
    assert not any(a < b for a, b in itertools.permutations(chis, 2))
    try:
        ref = answer_sets_bruteforce(gp)
    except ValueError:
        return
    assert [s.ids for s in ref] == [s.ids for s in sets]


@pytest.mark.skipif(not HAVE_NUMBA, reason="numba not installed")
@pytest.mark.parametrize("i", range(0, 120, 7))
def test_numba_matches_numpy(i):
    gp = ground(pk(CORPUS[i]))
    a = [s.ids for s in answer_sets(gp, use_numba=True)]
    b = [s.ids for s in answer_sets(gp, use_numba=False)]
    assert a == b


def _random_kernel(rng, n_lits, n_rules):
    head, bptr, bidx, nptr, nidx = [], [0], [], [0], []
    for _ in range(n_rules):
        head.append(rng.randrange(n_lits))
        bidx += rng.sample(range(n_lits), rng.randint(0, min(3, n_lits)))
        bptr.append(len(bidx))
        nidx += rng.sample(range(n_lits), rng.randint(0, 1))
        nptr.append(len(nidx))
    return head, bptr, bidx, nptr, nidx


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**9))
def test_kernels_agree_random(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 12)
    arrays = _random_kernel(rng, n, rng.randint(0, 20))
    chosen = np.array([rng.random() < 0.3 for _ in range(n)], dtype=np.bool_)
    ref = Kernel(n, *arrays, use_numba=False)
    act = ref.active(chosen)
    want = ref.least_model(act)
    # plain fixpoint
    head, bptr, bidx = arrays[0], arrays[1], arrays[2]
    m = [False] * n
    changed = True
    while changed:
        changed = False
        for r, h in enumerate(head):
            if act[r] and not m[h] and all(m[j] for j in bidx[bptr[r]:bptr[r + 1]]):
                m[h] = changed = True
    assert want.tolist() == m
    if HAVE_NUMBA:
        fast = Kernel(n, *arrays, use_numba=True)
        assert fast.active(chosen).tolist() == act.tolist()
        assert fast.least_model(act).tolist() == m


def _chain(n_rules):
    head = np.arange(1, n_rules + 1, dtype=np.int32)
    ptr = np.arange(n_rules + 1, dtype=np.int32)
    return n_rules + 1, head, ptr, np.arange(n_rules, dtype=np.int32), np.zeros(n_rules + 1, np.int32), np.zeros(0, np.int32)


def test_kernel_choice_by_size(monkeypatch):
    monkeypatch.delenv("DKB_NO_NUMBA", raising=False)
    assert not Kernel(*_chain(10)).use_numba
    assert Kernel(*_chain(NUMBA_MIN_RULES)).use_numba == HAVE_NUMBA
    assert Kernel(*_chain(10), use_numba=True).use_numba == HAVE_NUMBA
    monkeypatch.setenv("DKB_NO_NUMBA", "1")
    assert not Kernel(*_chain(NUMBA_MIN_RULES)).use_numba


# -- external solver


def _clingo_sets(text):
    clingo = pytest.importorskip("clingo")
    ctl = clingo.Control(["0", "--warn=none"])
    ctl.add("base", [], text)
    ctl.ground([("base", [])])
    out = []
    ctl.solve(on_model=lambda m: out.append(sorted(str(s) for s in m.symbols(atoms=True))))
    return sorted(out)


def test_clingo_agrees_on_golden(dept):
    ours = sorted(s.text() for s in answer_sets(pk(dept)))
    assert _clingo_sets((GOLDEN / "dept.lp").read_text()) == ours


@pytest.mark.parametrize("i", range(0, 120, 10))
def test_clingo_agrees_on_corpus(i):
    from dkb.dlprog import emit_text

    p = pk(CORPUS[i])
    assert _clingo_sets(emit_text(p)) == sorted(s.text() for s in answer_sets(p))
