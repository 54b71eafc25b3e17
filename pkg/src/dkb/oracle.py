"""Brute-force reference semantics: Skolem chase, justification, χ enumeration.

Everything runs on the normal form.  Positive facts come from a forward
chase of the Horn clauses of the DKB over Skolem terms; a CAS-model under
χ skips the defeasible instances listed in χ.  Inconsistency is a violated
denial (A ⊑ ¬B, Dis, Irr).  A negative literal ¬β holds in every CAS-model
under χ iff adding β makes every model candidate inconsistent.

Models may interpret a Skolem term as a named individual.  This matters
only when that individual carries an exception in χ, so refutation
branches each Skolem term created by the hypothesis over "fresh" and the
individuals mentioned in χ (``identify=False`` switches this off and gives
plain Herbrand reasoning).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

from .kb import (
    DKB,
    App,
    Assertion,
    Atomic,
    ClashingAssumption,
    ClashingSet,
    ConceptIncl,
    Dis,
    Exists,
    Inv,
    Irr,
    Not,
    RoleIncl,
    Term,
    minimal_clashing_sets,
    term_depth,
)
from .normalize import existential_roles, is_normal_form, normalize

SkTerm = Term

CONSISTENT = "CONSISTENT"
INCONSISTENT = "INCONSISTENT"

DEFAULT_BUDGET = 20

# internal facts: ("c", A, t) and ("r", R, t, u)
Fact = tuple


class OracleBudgetError(RuntimeError):
    pass


def _to_assertion(f: Fact, positive: bool = True) -> Assertion:
    return Assertion(f[1], tuple(f[2:]), positive)


def _to_fact(a: Assertion) -> Fact:
    if not isinstance(a.pred, str):
        raise ValueError(f"expected an atomic predicate: {a}")
    return ("c", a.pred, a.args[0]) if a.is_concept else ("r", a.pred, a.args[0], a.args[1])


@dataclass
class _Rules:
    sub: dict = field(default_factory=dict)  # A -> [(B, id|None)]
    neg: dict = field(default_factory=dict)  # A -> [B]   denial A(t), B(t)
    supex: dict = field(default_factory=dict)  # A -> [R]
    subex: dict = field(default_factory=dict)  # R -> [A]
    subrole: dict = field(default_factory=dict)  # R -> [(S, id|None)]
    dis: dict = field(default_factory=dict)  # R -> [S]
    inv_fwd: dict = field(default_factory=dict)  # R -> [(S, id|None)]  R(x,y) -> S(y,x), instance (x,y)
    inv_bwd: dict = field(default_factory=dict)  # S -> [(R, id|None)]  S(y,x) -> R(x,y), instance (x,y)
    irr: dict = field(default_factory=dict)  # R -> [id|None]


def _compile(k: DKB) -> _Rules:
    r = _Rules()

    def add(table, key, val):
        table.setdefault(key, []).append(val)

    items = [(ax, None) for ax in k.strict] + [(d.inner, d.id) for d in k.defeasible]
    for ax, ident in items:
        if isinstance(ax, ConceptIncl):
            lhs, rhs = ax.lhs, ax.rhs
            if isinstance(lhs, Exists):
                add(r.subex, lhs.role.name, rhs.name)
            elif isinstance(rhs, Exists):
                add(r.supex, lhs.name, rhs.role.name)
            elif isinstance(rhs, Not):
                add(r.neg, lhs.name, rhs.inner.name)
                add(r.neg, rhs.inner.name, lhs.name)
            else:
                add(r.sub, lhs.name, (rhs.name, ident))
        elif isinstance(ax, RoleIncl):
            add(r.subrole, ax.sub.name, (ax.sup.name, ident))
        elif isinstance(ax, Dis):
            add(r.dis, ax.first.name, ax.second.name)
            add(r.dis, ax.second.name, ax.first.name)
        elif isinstance(ax, Inv):
            add(r.inv_fwd, ax.first, (ax.second, ident))
            add(r.inv_bwd, ax.second, (ax.first, ident))
        elif isinstance(ax, Irr):
            add(r.irr, ax.role, ident)
    return r


@dataclass
class _Run:
    facts: dict  # fact -> (label, premises)
    conflict: Optional[tuple] = None
    created: list = field(default_factory=list)  # Skolem terms not in the base set, creation order


class _Chaser:
    def __init__(self, k: DKB):
        self.k = k
        self.rules = _compile(k)

    def run(
        self,
        chi: frozenset,
        depth: int,
        extra: Iterable[Fact] = (),
        assign: Optional[dict] = None,
        base_terms: Optional[set] = None,
        stop_on_conflict: bool = True,
    ) -> _Run:
        R = self.rules
        facts: dict = {}
        out_c: dict = {}  # term -> set of concepts
        role_out: dict = {}  # (R, t) -> set u
        agenda: list = []
        run = _Run(facts)
        assign = assign or {}

        def excepted(ident, args) -> bool:
            return ident is not None and ClashingAssumption(ident, args) in chi

        def add(f: Fact, label: str, prem: tuple) -> None:
            if f not in facts:
                facts[f] = (label, prem)
                agenda.append(f)

        for a in self.k.abox:
            add(_to_fact(a), "assertion", ())
        def place(u):
            if isinstance(u, App) and base_terms is not None and u not in base_terms:
                tgt = assign.get(u)
                if tgt is not None:
                    return tgt
                if u not in assign and u not in run.created:
                    run.created.append(u)
            return u

        for f in extra:
            add(f[:2] + tuple(place(x) for x in f[2:]), "hypothesis", ())

        while agenda:
            f = agenda.pop()
            if f[0] == "c":
                _, a, t = f
                cs = out_c.setdefault(t, set())
                cs.add(a)
                for b in R.neg.get(a, ()):
                    if b in cs and run.conflict is None:
                        run.conflict = (f, ("c", b, t))
                for b, ident in R.sub.get(a, ()):
                    if not excepted(ident, (t,)):
                        add(("c", b, t), ident or "strict", (f,))
                for role in R.supex.get(a, ()):
                    if term_depth(t) >= depth:
                        continue
                    u = place(App(role, t))
                    add(("r", role, t, u), "strict", (f,))
            else:
                _, rl, t, u = f
                role_out.setdefault((rl, t), set()).add(u)
                for s in R.dis.get(rl, ()):
                    if u in role_out.get((s, t), ()) and run.conflict is None:
                        run.conflict = (f, ("r", s, t, u))
                if t == u:
                    for ident in R.irr.get(rl, ()):
                        if not excepted(ident, (t,)) and run.conflict is None:
                            run.conflict = (f, None)
                for a in R.subex.get(rl, ()):
                    add(("c", a, t), "strict", (f,))
                for s, ident in R.subrole.get(rl, ()):
                    if not excepted(ident, (t, u)):
                        add(("r", s, t, u), ident or "strict", (f,))
                for s, ident in R.inv_fwd.get(rl, ()):
                    if not excepted(ident, (t, u)):
                        add(("r", s, u, t), ident or "strict", (f,))
                for s, ident in R.inv_bwd.get(rl, ()):
                    # S(t,u) -> R(u,t) is the instance at (u,t)
                    if not excepted(ident, (u, t)):
                        add(("r", s, u, t), ident or "strict", (f,))
            if run.conflict is not None and stop_on_conflict:
                break
        return run


_CHASERS: dict[int, tuple[DKB, _Chaser]] = {}


def _chaser(k: DKB) -> _Chaser:
    hit = _CHASERS.get(id(k))
    if hit is not None and hit[0] is k:
        return hit[1]
    if len(_CHASERS) > 256:
        _CHASERS.clear()
    c = _Chaser(k)
    _CHASERS[id(k)] = (k, c)
    return c


def _normal(k: DKB) -> DKB:
    return k if is_normal_form(k) else normalize(k)[0]


def default_depth(k: DKB) -> int:
    """Every Skolem f_R(t) has a type fixed by R, so one layer per
    existential role (plus one) reaches every type combination."""
    return len(existential_roles(k)) + 1


# ---------------------------------------------------------------------------
# Least CAS-models


@dataclass(frozen=True)
class LeastCASModel:
    chi: frozenset[ClashingAssumption]
    literals: frozenset[Assertion]
    status: str
    depth: int
    derivations: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def consistent(self) -> bool:
        return self.status == CONSISTENT

    def positive(self) -> frozenset[Assertion]:
        return frozenset(l for l in self.literals if l.positive)

    def __contains__(self, lit: Assertion) -> bool:
        return lit in self.literals

    def derivation(self, lit: Assertion) -> tuple[str, tuple[Assertion, ...]]:
        label, prem = self.derivations[_to_fact(lit)]
        return label, tuple(_to_assertion(p) for p in prem)


def _negative_closure(k: DKB, chi: frozenset, facts: dict) -> set[Fact]:
    """Negative literals obtained by contraposition from the positive facts."""
    rules = _compile(k)
    terms = set()
    for f in facts:
        terms.update(f[2:])
    neg: set[Fact] = set()
    todo: list[Fact] = []

    def add(f):
        if f not in neg:
            neg.add(f)
            todo.append(f)

    def excepted(ident, args):
        return ident is not None and ClashingAssumption(ident, args) in chi

    for f in facts:
        if f[0] == "c":
            for b in rules.neg.get(f[1], ()):
                add(("c", b, f[2]))
        else:
            for s in rules.dis.get(f[1], ()):
                add(("r", s, f[2], f[3]))
    for rl, ids in rules.irr.items():
        for t in terms:
            if any(not excepted(i, (t,)) for i in ids):
                add(("r", rl, t, t))
    back_sub: dict = {}
    for a, lst in rules.sub.items():
        for b, ident in lst:
            back_sub.setdefault(b, []).append((a, ident))
    back_subex: dict = {}
    for rl, lst in rules.subex.items():
        for a in lst:
            back_subex.setdefault(a, []).append(rl)
    back_role: dict = {}
    for rl, lst in rules.subrole.items():
        for s, ident in lst:
            back_role.setdefault(s, []).append((rl, ident))
    while todo:
        f = todo.pop()
        if f[0] == "c":
            _, b, t = f
            for a, ident in back_sub.get(b, ()):
                if not excepted(ident, (t,)):
                    add(("c", a, t))
            for rl in back_subex.get(b, ()):
                for u in terms:
                    add(("r", rl, t, u))
        else:
            _, s, t, u = f
            for rl, ident in back_role.get(s, ()):
                if not excepted(ident, (t, u)):
                    add(("r", rl, t, u))
            for r2, ident in rules.inv_fwd.get(s, ()):
                # ¬R2(u,t) from ¬S... R(x,y) <-> R2(y,x): ¬s(t,u) with s=R gives ¬R2(u,t)
                if not excepted(ident, (t, u)):
                    add(("r", r2, u, t))
            for r2, ident in rules.inv_bwd.get(s, ()):
                if not excepted(ident, (u, t)):
                    add(("r", r2, u, t))
    return neg


def least_cas_model(k: DKB, chi: Iterable[ClashingAssumption] = (), depth: int | None = None) -> LeastCASModel:
    k = _normal(k)
    chi = frozenset(chi)
    depth = default_depth(k) if depth is None else depth
    run = _chaser(k).run(chi, depth, stop_on_conflict=False)
    lits = {_to_assertion(f) for f in run.facts}
    if run.conflict is not None:
        return LeastCASModel(chi, frozenset(lits), INCONSISTENT, depth, dict(run.facts))
    lits |= {_to_assertion(f, False) for f in _negative_closure(k, chi, run.facts)}
    return LeastCASModel(chi, frozenset(lits), CONSISTENT, depth, dict(run.facts))


def _chi_individuals(chi: frozenset) -> list[str]:
    seen: dict[str, None] = {}
    for c in sorted(chi):
        for a in c.args:
            if isinstance(a, str):
                seen.setdefault(a, None)
    return list(seen)


def _has_model(k: DKB, chi: frozenset, depth: int, extra: tuple, identify: bool = True, base_terms=None) -> bool:
    chaser = _chaser(k)
    targets = _chi_individuals(chi) if identify else []
    if not targets:
        return chaser.run(chi, depth, extra).conflict is None
    if base_terms is None:
        base = chaser.run(chi, depth, stop_on_conflict=False)
        base_terms = {x for f in base.facts for x in f[2:] if isinstance(x, App)}

    def go(assign: dict) -> bool:
        run = chaser.run(chi, depth, extra, assign, base_terms)
        if run.conflict is None:
            return True
        pending = [u for u in run.created if u not in assign]
        if not pending:
            return False
        u = pending[0]
        for tgt in targets:
            if go({**assign, u: tgt}):
                return True
        return go({**assign, u: None})

    return go({})


def refutes(k: DKB, chi: Iterable[ClashingAssumption], beta: Assertion, depth: int | None = None, identify: bool = True) -> bool:
    """True iff no CAS-model under χ satisfies the positive literal β."""
    k = _normal(k)
    chi = frozenset(chi)
    depth = default_depth(k) if depth is None else depth
    if not beta.positive:
        raise ValueError("refutation takes a positive literal")
    if isinstance(beta.pred, Exists):
        # ∃R(e): a fresh R-successor
        r = beta.pred.role
        fresh = App(r.name + "#hyp", beta.args[0])
        f = ("r", r.name, fresh, beta.args[0]) if r.inverted else ("r", r.name, beta.args[0], fresh)
        return not _has_model(k, chi, depth, (f,), identify)
    return not _has_model(k, chi, depth, (_to_fact(beta),), identify)


def holds(k: DKB, model: LeastCASModel, lit: Assertion, identify: bool = True) -> bool:
    """Literal true in every CAS-model under model.chi (model must be consistent)."""
    if lit.positive:
        if isinstance(lit.pred, Exists):
            r = lit.pred.role
            e = lit.args[0]
            return any(
                (a.pred == r.name and a.positive and len(a.args) == 2
                 and (a.args[1] if r.inverted else a.args[0]) == e)
                for a in model.literals
            )
        return lit in model.literals
    return refutes(k, model.chi, lit.negate(), model.depth, identify)


# ---------------------------------------------------------------------------
# Justification


def candidate_assumptions(k: DKB) -> frozenset[ClashingAssumption]:
    k = _normal(k)
    inds = list(k.vocab.individuals)
    out = set()
    for d in k.defeasible:
        ar = 1 if isinstance(d.inner, (ConceptIncl, Irr)) else 2
        for args in itertools.product(inds, repeat=ar):
            out.add(ClashingAssumption(d.id, tuple(args)))
    return frozenset(out)


@dataclass(frozen=True)
class Justification:
    ok: bool
    evidence: dict = field(default_factory=dict)  # assumption -> ClashingSet | None

    def __bool__(self) -> bool:
        return self.ok


def _clashing_sets(k: DKB, c: ClashingAssumption) -> list[ClashingSet]:
    ax = k.defeasible_by_id()[c.axiom_id].inner
    return minimal_clashing_sets(ax, c.args)


def is_justified(k: DKB, chi: Iterable[ClashingAssumption], depth: int | None = None, identify: bool = True) -> Justification:
    k = _normal(k)
    chi = frozenset(chi)
    model = least_cas_model(k, chi, depth)
    if not model.consistent:
        raise ValueError("χ has no CAS-model; justification is undefined")
    evidence = {}
    ok = True
    for c in sorted(chi):
        found = None
        for s in _clashing_sets(k, c):
            if all(holds(k, model, b, identify) for b in sorted(s.elements, key=str)):
                found = s
                break
        evidence[c] = found
        ok &= found is not None
    return Justification(ok, evidence)


def _prune(k: DKB, depth: int, identify: bool) -> list[ClashingAssumption]:
    """Drop candidates that cannot be justified under any χ containing them."""
    # with no exceptions the positive chase is largest
    full = _chaser(k).run(frozenset(), depth, stop_on_conflict=False)
    pos = {_to_assertion(f) for f in full.facts}
    keep = []
    for c in sorted(candidate_assumptions(k)):
        for s in _clashing_sets(k, c):
            ok = True
            for b in s.elements:
                if b.positive and b not in pos:
                    ok = False
                    break
            if ok:
                for b in s.elements:
                    if not b.positive and not refutes(k, {c}, b.negate(), depth, identify):
                        ok = False
                        break
            if ok:
                keep.append(c)
                break
    return keep


def oracle_justified_chis(
    k: DKB, depth: int | None = None, budget: int = DEFAULT_BUDGET, identify: bool = True
) -> list[frozenset[ClashingAssumption]]:
    """All justified χ with a consistent least CAS-model, in canonical order."""
    k = _normal(k)
    depth = default_depth(k) if depth is None else depth
    cands = _prune(k, depth, identify)
    if len(cands) > budget:
        raise OracleBudgetError(f"{len(cands)} candidate assumptions exceed the budget of {budget}")
    out = []
    for bits in itertools.product((0, 1), repeat=len(cands)):
        chi = frozenset(c for c, b in zip(cands, bits) if b)
        if not least_cas_model(k, chi, depth).consistent:
            continue
        if is_justified(k, chi, depth, identify):
            out.append(chi)
    for a, b in itertools.permutations(out, 2):
        assert not a < b, f"justified χ not an antichain: {sorted(a)} ⊂ {sorted(b)}"
    return sorted(out, key=lambda s: [int(c in s) for c in cands])


def oracle_entails(k: DKB, lit: Assertion, depth: int | None = None, identify: bool = True,
                   chis: list | None = None) -> bool:
    """Cautious entailment: true in every justified CAS-model (vacuous if none)."""
    k = _normal(k)
    depth = default_depth(k) if depth is None else depth
    if chis is None:
        chis = oracle_justified_chis(k, depth, identify=identify)
    for chi in chis:
        if not holds(k, least_cas_model(k, chi, depth), lit, identify):
            return False
    return True


def strict_satisfiable(k: DKB, depth: int | None = None) -> bool:
    """Satisfiability of the strict part (defeasible axioms dropped)."""
    k = _normal(k)
    s = DKB(k.vocab, k.strict, (), k.abox, k.una)
    depth = default_depth(s) if depth is None else depth
    return _chaser(s).run(frozenset(), depth).conflict is None
