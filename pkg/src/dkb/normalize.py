"""Rewriting of arbitrary DKBs into normal form.

Strict axioms end up as A ⊑ B, A ⊑ ¬B, ∃R ⊑ A_∃R, A_∃R ⊑ ∃R, R ⊑ S,
Dis(R,S), Inv(R,S), Irr(R); defeasible axioms as D(A ⊑ B), D(R ⊑ S),
D(Inv(R,S)), D(Irr(R)); assertions as positive atomic facts.  Fresh names
are derived from the statement position so equal inputs give equal outputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from .kb import (
    DKB,
    Assertion,
    Atomic,
    Bottom,
    ConceptIncl,
    DefeasibleAxiom,
    Dis,
    Exists,
    Inv,
    Irr,
    Not,
    Ref,
    RoleExpr,
    RoleIncl,
)

BOTTOM = "_nf_bot"
BOTTOM_FLAG = "_nf_f"


def ex_concept(role: str) -> str:
    return f"_ex_{role}"


def inverse_role(role: str) -> str:
    return f"_nf_{role}_inv"


@dataclass
class NormalizationTrace:
    introduced_symbols: dict[str, str] = field(default_factory=dict)
    rewrite_steps: list[tuple[str, tuple[str, ...]]] = field(default_factory=list)

    def explain(self) -> str:
        lines = []
        for src, produced in self.rewrite_steps:
            lines.append(f"{src}")
            for p in produced:
                lines.append(f"    => {p}")
        return "\n".join(lines)


Statement = Union[ConceptIncl, RoleIncl, Dis, Inv, Irr, DefeasibleAxiom, Assertion]


class _Normalizer:
    def __init__(self, k: DKB):
        self.k = k
        self.strict: list = []
        self.defeasible: list[DefeasibleAxiom] = []
        self.abox: list[Assertion] = []
        self.seen: set = set()
        self.new_concepts: list[str] = []
        self.new_roles: list[str] = []
        self.ex_roles: list[str] = []
        self.trace = NormalizationTrace()
        self._produced: list[str] = []
        self._source = ""

    # -- bookkeeping -------------------------------------------------------
    def _fresh(self, name: str, kind: str) -> str:
        target = self.new_concepts if kind == "concept" else self.new_roles
        known = self.k.vocab.concepts if kind == "concept" else self.k.vocab.roles
        if name not in target and name not in known:
            target.append(name)
            self.trace.introduced_symbols.setdefault(name, self._source)
        return name

    def _emit(self, st: Statement) -> None:
        if isinstance(st, DefeasibleAxiom):
            key = ("d", st.inner)
        elif isinstance(st, Assertion):
            key = ("a", st)
        else:
            key = ("s", st)
        if key in self.seen:
            return
        self.seen.add(key)
        if isinstance(st, DefeasibleAxiom):
            self.defeasible.append(st)
        elif isinstance(st, Assertion):
            self.abox.append(st)
        else:
            self.strict.append(st)
        self._produced.append(str(st))

    def role(self, r: RoleExpr) -> str:
        if not r.inverted:
            return r.name
        inv = self._fresh(inverse_role(r.name), "role")
        self._emit(Inv(r.name, inv))
        return inv

    def ex(self, r: RoleExpr) -> str:
        name = self.role(r)
        if name not in self.ex_roles:
            self.ex_roles.append(name)
        return self._fresh(ex_concept(name), "concept")

    def left(self, c) -> str:
        if isinstance(c, Atomic):
            return c.name
        return self.ex(c.role)

    def bottom(self) -> str:
        self._fresh(BOTTOM, "concept")
        self._fresh(BOTTOM_FLAG, "concept")
        self._emit(ConceptIncl(Atomic(BOTTOM), Atomic(BOTTOM_FLAG)))
        self._emit(ConceptIncl(Atomic(BOTTOM), Not(Atomic(BOTTOM_FLAG))))
        return BOTTOM

    def pair(self, a: RoleExpr, b: RoleExpr) -> tuple[str, str]:
        if a.inverted and b.inverted:
            return a.name, b.name
        return self.role(a), self.role(b)

    # -- statements --------------------------------------------------------
    def strict_axiom(self, ax, i: int) -> None:
        if isinstance(ax, ConceptIncl):
            lhs, rhs = ax.lhs, ax.rhs
            # bridge axioms only register their role; they are re-added at the end
            if isinstance(rhs, Exists) and isinstance(lhs, Atomic) and not rhs.role.inverted and lhs.name == ex_concept(rhs.role.name):
                self.ex(rhs.role)
                return
            if isinstance(lhs, Exists) and isinstance(rhs, Atomic) and not lhs.role.inverted and rhs.name == ex_concept(lhs.role.name):
                self.ex(lhs.role)
                return
            a = self.left(lhs)
            if isinstance(rhs, Atomic):
                self._emit(ConceptIncl(Atomic(a), rhs))
            elif isinstance(rhs, Exists):
                self._emit(ConceptIncl(Atomic(a), Atomic(self.ex(rhs.role))))
            elif isinstance(rhs, Not):
                self._emit(ConceptIncl(Atomic(a), Not(Atomic(self.left(rhs.inner)))))
            elif isinstance(rhs, Bottom):
                self._emit(ConceptIncl(Atomic(a), Atomic(self.bottom())))
        elif isinstance(ax, RoleIncl):
            self._emit(RoleIncl(*map(RoleExpr, self.pair(ax.sub, ax.sup))))
        elif isinstance(ax, Dis):
            self._emit(Dis(*map(RoleExpr, self.pair(ax.first, ax.second))))
        elif isinstance(ax, (Inv, Irr)):
            self._emit(ax)
        elif isinstance(ax, Ref):
            raise ValueError("reflexivity unsupported")
        else:
            raise TypeError(f"not an axiom: {ax!r}")

    def defeasible_axiom(self, d: DefeasibleAxiom, i: int) -> None:
        ax, ident = d.inner, d.id

        def emit(inner) -> None:
            self._emit(DefeasibleAxiom(inner, ident))

        if isinstance(ax, ConceptIncl):
            a = self.left(ax.lhs)
            rhs = ax.rhs
            if isinstance(rhs, Atomic):
                emit(ConceptIncl(Atomic(a), rhs))
            elif isinstance(rhs, Exists):
                emit(ConceptIncl(Atomic(a), Atomic(self.ex(rhs.role))))
            elif isinstance(rhs, Bottom):
                emit(ConceptIncl(Atomic(a), Atomic(self.bottom())))
            elif isinstance(rhs, Not):
                b = self.left(rhs.inner)
                fresh = self._fresh(f"_nf_a{i}_{b}", "concept")
                emit(ConceptIncl(Atomic(a), Atomic(fresh)))
                self._emit(ConceptIncl(Atomic(b), Not(Atomic(fresh))))
        elif isinstance(ax, RoleIncl):
            emit(RoleIncl(*map(RoleExpr, self.pair(ax.sub, ax.sup))))
        elif isinstance(ax, Dis):
            r, s = self.pair(ax.first, ax.second)
            fresh = self._fresh(f"_nf_r{i}_{s}", "role")
            emit(RoleIncl(RoleExpr(r), RoleExpr(fresh)))
            self._emit(Dis(RoleExpr(fresh), RoleExpr(s)))
        elif isinstance(ax, (Inv, Irr)):
            emit(ax)
        elif isinstance(ax, Assertion):
            self.defeasible_assertion(ax, ident, i)
        else:
            raise ValueError(f"unsupported defeasible statement: {ax}")

    def defeasible_assertion(self, a: Assertion, ident: str, i: int) -> None:
        p = a.pred
        if a.is_concept:
            fresh = self._fresh(f"_nf_a{i}_{p}", "concept")
            self._emit(Assertion(fresh, a.args))
            if a.positive:
                self._emit(DefeasibleAxiom(ConceptIncl(Atomic(fresh), Atomic(p)), ident))
            else:
                neg = self._fresh(f"_nf_b{i}_{p}", "concept")
                self._emit(DefeasibleAxiom(ConceptIncl(Atomic(fresh), Atomic(neg)), ident))
                self._emit(ConceptIncl(Atomic(p), Not(Atomic(neg))))
        else:
            fresh = self._fresh(f"_nf_r{i}_{p}", "role")
            self._emit(Assertion(fresh, a.args))
            if a.positive:
                self._emit(DefeasibleAxiom(RoleIncl(RoleExpr(fresh), RoleExpr(p)), ident))
            else:
                other = self._fresh(f"_nf_s{i}_{p}", "role")
                self._emit(DefeasibleAxiom(RoleIncl(RoleExpr(fresh), RoleExpr(other)), ident))
                self._emit(Dis(RoleExpr(p), RoleExpr(other)))

    def assertion(self, a: Assertion, i: int) -> None:
        if a.positive:
            self._emit(a)
            return
        if a.is_concept:
            fresh = self._fresh(f"_nf_a{i}_{a.pred}", "concept")
            self._emit(Assertion(fresh, a.args))
            self._emit(ConceptIncl(Atomic(fresh), Not(Atomic(a.pred))))
        else:
            fresh = self._fresh(f"_nf_r{i}_{a.pred}", "role")
            self._emit(Assertion(fresh, a.args))
            self._emit(Dis(RoleExpr(a.pred), RoleExpr(fresh)))

    def run(self) -> tuple[DKB, NormalizationTrace]:
        k = self.k
        items: list = [*k.strict, *k.defeasible, *k.abox]
        for i, st in enumerate(items, start=1):
            self._source = str(st)
            self._produced = []
            if isinstance(st, DefeasibleAxiom):
                self.defeasible_axiom(st, i)
            elif isinstance(st, Assertion):
                self.assertion(st, i)
            else:
                self.strict_axiom(st, i)
            self.trace.rewrite_steps.append((self._source, tuple(self._produced)))
        self._source = "existential bridge"
        self._produced = []
        for r in self.ex_roles:
            e = ex_concept(r)
            self._emit(ConceptIncl(Exists(RoleExpr(r)), Atomic(e)))
            self._emit(ConceptIncl(Atomic(e), Exists(RoleExpr(r))))
        if self._produced:
            self.trace.rewrite_steps.append((self._source, tuple(self._produced)))
        vocab = k.vocab.extended(
            concepts=self.new_concepts,
            roles=self.new_roles,
            generated=[*self.new_concepts, *self.new_roles],
        )
        out = DKB(vocab, tuple(self.strict), tuple(self.defeasible), tuple(self.abox), k.una)
        return out, self.trace


def normalize(k: DKB) -> tuple[DKB, NormalizationTrace]:
    return _Normalizer(k).run()


# ---------------------------------------------------------------------------


def _plain(r: RoleExpr) -> bool:
    return not r.inverted


def _strict_shape_ok(ax) -> bool:
    if isinstance(ax, ConceptIncl):
        lhs, rhs = ax.lhs, ax.rhs
        if isinstance(lhs, Atomic):
            if isinstance(rhs, Atomic):
                return True
            if isinstance(rhs, Not):
                return isinstance(rhs.inner, Atomic)
            if isinstance(rhs, Exists):
                return _plain(rhs.role) and lhs.name == ex_concept(rhs.role.name)
            return False
        if isinstance(lhs, Exists):
            return _plain(lhs.role) and isinstance(rhs, Atomic) and rhs.name == ex_concept(lhs.role.name)
        return False
    if isinstance(ax, RoleIncl):
        return _plain(ax.sub) and _plain(ax.sup)
    if isinstance(ax, Dis):
        return _plain(ax.first) and _plain(ax.second)
    return isinstance(ax, (Inv, Irr))


def _defeasible_shape_ok(ax) -> bool:
    if isinstance(ax, ConceptIncl):
        return isinstance(ax.lhs, Atomic) and isinstance(ax.rhs, Atomic)
    if isinstance(ax, RoleIncl):
        return _plain(ax.sub) and _plain(ax.sup)
    return isinstance(ax, (Inv, Irr))


def existential_roles(k: DKB) -> list[str]:
    """Roles occurring under ∃ anywhere, in first-occurrence order."""
    out: list[str] = []

    def visit(c) -> None:
        if isinstance(c, Exists) and c.role.name not in out:
            out.append(c.role.name)
        elif isinstance(c, Not):
            visit(c.inner)

    for ax in [*k.strict, *(d.inner for d in k.defeasible)]:
        if isinstance(ax, ConceptIncl):
            visit(ax.lhs)
            visit(ax.rhs)
    return out


def is_normal_form(k: DKB) -> bool:
    if not all(_strict_shape_ok(ax) for ax in k.strict):
        return False
    if not all(_defeasible_shape_ok(d.inner) for d in k.defeasible):
        return False
    if not all(a.positive and isinstance(a.pred, str) for a in k.abox):
        return False
    strict = set(k.strict)
    for r in existential_roles(k):
        e = ex_concept(r)
        if ConceptIncl(Exists(RoleExpr(r)), Atomic(e)) not in strict:
            return False
        if ConceptIncl(Atomic(e), Exists(RoleExpr(r))) not in strict:
            return False
    return True


def dkb_size(k: DKB) -> int:
    """Number of syntax-tree nodes over all statements."""

    def role(r: RoleExpr) -> int:
        return 2 if r.inverted else 1

    def concept(c) -> int:
        if isinstance(c, Atomic) or isinstance(c, Bottom):
            return 1
        if isinstance(c, Exists):
            return 1 + role(c.role)
        if isinstance(c, Not):
            return 1 + concept(c.inner)
        raise TypeError(c)

    def stmt(s) -> int:
        if isinstance(s, DefeasibleAxiom):
            return 1 + stmt(s.inner)
        if isinstance(s, ConceptIncl):
            return 1 + concept(s.lhs) + concept(s.rhs)
        if isinstance(s, RoleIncl):
            return 1 + role(s.sub) + role(s.sup)
        if isinstance(s, Dis):
            return 1 + role(s.first) + role(s.second)
        if isinstance(s, Inv):
            return 3
        if isinstance(s, (Irr, Ref)):
            return 2
        if isinstance(s, Assertion):
            return (2 if s.positive else 3) + len(s.args)
        raise TypeError(s)

    return sum(stmt(s) for s in [*k.strict, *k.defeasible, *k.abox])
