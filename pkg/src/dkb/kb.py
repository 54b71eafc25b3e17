"""Domain model for DL-Lite_R knowledge bases with defeasible axioms."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Union

RESERVED_PREFIXES: tuple[str, ...] = ("_ex_", "_nf_", "_aux_")


def is_reserved(name: str) -> bool:
    return name.startswith(RESERVED_PREFIXES)


# ---------------------------------------------------------------------------
# Vocabulary


@dataclass(frozen=True)
class Vocabulary:
    """Ordered name sets. Tuples keep declaration order, which fixes every
    downstream enumeration."""

    concepts: tuple[str, ...] = ()
    roles: tuple[str, ...] = ()
    individuals: tuple[str, ...] = ()
    generated: frozenset[str] = frozenset()
    reserved_prefixes: tuple[str, ...] = RESERVED_PREFIXES

    def kind_of(self, name: str) -> str | None:
        if name in self.concepts:
            return "concept"
        if name in self.roles:
            return "role"
        if name in self.individuals:
            return "individual"
        return None

    def extended(
        self,
        concepts: Iterable[str] = (),
        roles: Iterable[str] = (),
        individuals: Iterable[str] = (),
        generated: Iterable[str] = (),
    ) -> "Vocabulary":
        def add(base: tuple[str, ...], extra: Iterable[str]) -> tuple[str, ...]:
            seen = set(base)
            out = list(base)
            for n in extra:
                if n not in seen:
                    seen.add(n)
                    out.append(n)
            return tuple(out)

        return Vocabulary(
            add(self.concepts, concepts),
            add(self.roles, roles),
            add(self.individuals, individuals),
            self.generated | frozenset(generated),
            self.reserved_prefixes,
        )


# ---------------------------------------------------------------------------
# Concepts and roles


@dataclass(frozen=True)
class RoleExpr:
    name: str
    inverted: bool = False

    def inverse(self) -> "RoleExpr":
        return RoleExpr(self.name, not self.inverted)

    def __str__(self) -> str:
        return self.name + ("^-" if self.inverted else "")


@dataclass(frozen=True)
class Atomic:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Exists:
    role: RoleExpr

    def __str__(self) -> str:
        return f"exists {self.role}"


@dataclass(frozen=True)
class Not:
    inner: Union[Atomic, Exists]

    def __str__(self) -> str:
        return f"not {self.inner}"


@dataclass(frozen=True)
class Bottom:
    def __str__(self) -> str:
        return "bottom"


LeftConcept = Union[Atomic, Exists]
RightConcept = Union[Atomic, Not, Exists, Bottom]


# ---------------------------------------------------------------------------
# Axioms


@dataclass(frozen=True)
class ConceptIncl:
    lhs: LeftConcept
    rhs: RightConcept

    def __str__(self) -> str:
        return f"{self.lhs} [= {self.rhs}"


@dataclass(frozen=True)
class RoleIncl:
    sub: RoleExpr
    sup: RoleExpr

    def __str__(self) -> str:
        return f"{self.sub} [= {self.sup}"


@dataclass(frozen=True)
class Dis:
    first: RoleExpr
    second: RoleExpr

    def __str__(self) -> str:
        return f"Dis({self.first}, {self.second})"


@dataclass(frozen=True)
class Inv:
    first: str
    second: str

    def __str__(self) -> str:
        return f"Inv({self.first}, {self.second})"


@dataclass(frozen=True)
class Irr:
    role: str

    def __str__(self) -> str:
        return f"Irr({self.role})"


@dataclass(frozen=True)
class Ref:
    """Reflexivity. Parsed so that it can be reported, never reasoned with."""

    role: str

    def __str__(self) -> str:
        return f"Ref({self.role})"


Axiom = Union[ConceptIncl, RoleIncl, Dis, Inv, Irr, Ref]


# ---------------------------------------------------------------------------
# Terms, assertions and literals


@dataclass(frozen=True)
class App:
    """Skolem term f_R(arg). ``role`` is the role name, suffixed with ``^-``
    for inverse roles."""

    role: str
    arg: "Term"

    @property
    def depth(self) -> int:
        return 1 + term_depth(self.arg)

    def __str__(self) -> str:
        return f"f_{self.role}({self.arg})"


Term = Union[str, App]


def term_depth(t: Term) -> int:
    return t.depth if isinstance(t, App) else 0


@dataclass(frozen=True)
class Assertion:
    """A ground literal. ``pred`` is a concept or role name; clashing sets also
    need ``Exists`` predicates for sets like {∃R(e), ¬B(e)}."""

    pred: Union[str, Exists]
    args: tuple[Term, ...]
    positive: bool = True

    @property
    def is_concept(self) -> bool:
        return len(self.args) == 1

    def negate(self) -> "Assertion":
        return Assertion(self.pred, self.args, not self.positive)

    def atom(self) -> "Assertion":
        return self if self.positive else self.negate()

    def __str__(self) -> str:
        sign = "" if self.positive else "not "
        args = ", ".join(str(a) for a in self.args)
        return f"{sign}{self.pred}({args})"


Literal = Assertion


def role_atom(r: RoleExpr, a: Term, b: Term, positive: bool = True) -> Assertion:
    if r.inverted:
        a, b = b, a
    return Assertion(r.name, (a, b), positive)


@dataclass(frozen=True)
class DefeasibleAxiom:
    """D(inner). Surface input may wrap an assertion; normalization turns
    those into defeasible inclusions."""

    inner: Union[Axiom, Assertion]
    id: str

    def __str__(self) -> str:
        return f"D({self.inner})"


@dataclass(frozen=True)
class DKB:
    vocab: Vocabulary = field(default_factory=Vocabulary)
    strict: tuple[Axiom, ...] = ()
    defeasible: tuple[DefeasibleAxiom, ...] = ()
    abox: tuple[Assertion, ...] = ()
    una: bool = True

    def strict_part(self) -> "DKB":
        return DKB(self.vocab, self.strict, (), self.abox, self.una)

    def defeasible_by_id(self) -> dict[str, DefeasibleAxiom]:
        return {d.id: d for d in self.defeasible}

    def is_empty(self) -> bool:
        return not (self.strict or self.defeasible or self.abox)


@dataclass(frozen=True, order=True)
class ClashingAssumption:
    axiom_id: str
    args: tuple[str, ...]

    def __str__(self) -> str:
        return f"<{self.axiom_id}, {', '.join(self.args)}>"


@dataclass(frozen=True)
class ClashingSet:
    elements: frozenset[Assertion]

    def positives(self) -> list[Assertion]:
        return sorted((e for e in self.elements if e.positive), key=str)

    def negatives(self) -> list[Assertion]:
        return sorted((e for e in self.elements if not e.positive), key=str)

    def __str__(self) -> str:
        return "{" + ", ".join(str(e) for e in self.positives() + self.negatives()) + "}"


# ---------------------------------------------------------------------------
# Validation


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    message: str
    statement: str | None = None

    def __str__(self) -> str:
        where = f" in `{self.statement}`" if self.statement else ""
        return f"{self.severity}: {self.message}{where}"


@dataclass
class ValidationReport:
    errors: list[Diagnostic] = field(default_factory=list)
    warnings: list[Diagnostic] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors


def _axiom_names(ax: Union[Axiom, Assertion]) -> Iterable[tuple[str, str]]:
    """(name, kind) pairs used by a statement."""
    def concept(c) -> Iterable[tuple[str, str]]:
        if isinstance(c, Atomic):
            yield c.name, "concept"
        elif isinstance(c, Exists):
            yield c.role.name, "role"
        elif isinstance(c, Not):
            yield from concept(c.inner)

    if isinstance(ax, ConceptIncl):
        yield from concept(ax.lhs)
        yield from concept(ax.rhs)
    elif isinstance(ax, RoleIncl):
        yield ax.sub.name, "role"
        yield ax.sup.name, "role"
    elif isinstance(ax, Dis):
        yield ax.first.name, "role"
        yield ax.second.name, "role"
    elif isinstance(ax, Inv):
        yield ax.first, "role"
        yield ax.second, "role"
    elif isinstance(ax, (Irr, Ref)):
        yield ax.role, "role"
    elif isinstance(ax, Assertion):
        if isinstance(ax.pred, Exists):
            yield ax.pred.role.name, "role"
        else:
            yield ax.pred, "concept" if len(ax.args) == 1 else "role"
        for a in ax.args:
            if isinstance(a, str):
                yield a, "individual"


def statements(k: DKB) -> list[Union[Axiom, Assertion, DefeasibleAxiom]]:
    return [*k.strict, *k.defeasible, *k.abox]


def validate_dkb(k: DKB) -> ValidationReport:
    rep = ValidationReport()
    v = k.vocab
    sets = {"concept": set(v.concepts), "role": set(v.roles), "individual": set(v.individuals)}
    for a, b in (("concept", "role"), ("concept", "individual"), ("role", "individual")):
        for n in sorted(sets[a] & sets[b]):
            rep.errors.append(Diagnostic("error", f"name `{n}` declared as both {a} and {b}"))
    for kind, names in sets.items():
        for n in sorted(names):
            if n.startswith(v.reserved_prefixes) and n not in v.generated:
                rep.errors.append(
                    Diagnostic("error", f"{kind} `{n}` uses a reserved prefix")
                )

    seen: set = set()
    for st in statements(k):
        inner = st.inner if isinstance(st, DefeasibleAxiom) else st
        text = str(st)
        if isinstance(inner, Ref):
            rep.errors.append(Diagnostic("error", "reflexivity unsupported", text))
        for name, kind in _axiom_names(inner):
            if name not in sets[kind]:
                rep.errors.append(Diagnostic("error", f"undeclared {kind} `{name}`", text))
        key = (isinstance(st, DefeasibleAxiom), inner)
        if key in seen:
            rep.warnings.append(Diagnostic("warning", "duplicate statement", text))
        seen.add(key)
    ids = [d.id for d in k.defeasible]
    if len(set(ids)) != len(ids):
        rep.errors.append(Diagnostic("error", "duplicate defeasible axiom id"))
    return rep


# ---------------------------------------------------------------------------
# Clashing sets and instantiation


def axiom_arity(alpha: Axiom) -> int:
    if isinstance(alpha, (ConceptIncl, Irr)):
        return 1
    if isinstance(alpha, (RoleIncl, Dis, Inv)):
        return 2
    raise ValueError(f"unsupported axiom shape: {alpha}")


def _concept_lit(c, e: Term, positive: bool = True) -> Assertion:
    if isinstance(c, Atomic):
        return Assertion(c.name, (e,), positive)
    if isinstance(c, Exists):
        return Assertion(c, (e,), positive)
    raise ValueError(f"unsupported concept in clashing set: {c}")


def _check_arity(alpha: Axiom, args: tuple) -> None:
    if len(args) != axiom_arity(alpha):
        raise ValueError(f"{alpha} takes {axiom_arity(alpha)} argument(s), got {len(args)}")


def minimal_clashing_sets(alpha: Union[Axiom, Assertion], args: tuple[Term, ...] = ()) -> list[ClashingSet]:
    """Minimal clashing sets for ⟨alpha, args⟩. Assertions take no args."""
    if isinstance(alpha, Assertion):
        if args:
            raise ValueError("assertions take no arguments")
        return [ClashingSet(frozenset({alpha.negate()}))]
    _check_arity(alpha, args)

    def cs(*els: Assertion) -> ClashingSet:
        return ClashingSet(frozenset(els))

    if isinstance(alpha, ConceptIncl):
        (e,) = args
        lhs, rhs = alpha.lhs, alpha.rhs
        if isinstance(rhs, Atomic) or isinstance(rhs, Exists):
            return [cs(_concept_lit(lhs, e), _concept_lit(rhs, e, False))]
        if isinstance(rhs, Not):
            return [cs(_concept_lit(lhs, e), _concept_lit(rhs.inner, e))]
        raise ValueError(f"unsupported axiom shape: {alpha}")
    if isinstance(alpha, RoleIncl):
        e1, e2 = args
        return [cs(role_atom(alpha.sub, e1, e2), role_atom(alpha.sup, e1, e2, False))]
    if isinstance(alpha, Dis):
        e1, e2 = args
        return [cs(role_atom(alpha.first, e1, e2), role_atom(alpha.second, e1, e2))]
    if isinstance(alpha, Inv):
        e1, e2 = args
        r, s = alpha.first, alpha.second
        return [
            cs(Assertion(r, (e1, e2)), Assertion(s, (e2, e1), False)),
            cs(Assertion(r, (e1, e2), False), Assertion(s, (e2, e1))),
        ]
    if isinstance(alpha, Irr):
        (e,) = args
        return [cs(Assertion(alpha.role, (e, e)))]
    raise ValueError(f"unsupported axiom shape: {alpha}")


@dataclass(frozen=True)
class Clause:
    """Ground Horn clause body -> head. Heads may be negative literals."""

    body: tuple[Assertion, ...]
    head: Assertion

    def __str__(self) -> str:
        return " & ".join(map(str, self.body)) + " -> " + str(self.head)


def skolem(r: RoleExpr, t: Term) -> App:
    return App(str(r), t)


def _right(rhs, e: Term) -> Assertion:
    if isinstance(rhs, Atomic):
        return Assertion(rhs.name, (e,))
    if isinstance(rhs, Exists):
        return role_atom(rhs.role, e, skolem(rhs.role, e))
    if isinstance(rhs, Not):
        return _concept_lit(rhs.inner, e, False)
    raise ValueError(f"bottom has no instance; normalize first: {rhs}")


def instantiate_axiom(alpha: Axiom, args: tuple[Term, ...]) -> tuple[Clause, ...]:
    """φ_α(args) as a conjunction of ground Horn clauses.

    Existentials on the left stay as Exists predicates, existentials on the
    right are Skolemized. Inv(R,S) at (e1,e2) covers both directions of the
    one tuple, matching its two clashing sets."""
    _check_arity(alpha, args)
    if isinstance(alpha, ConceptIncl):
        (e,) = args
        return (Clause((_concept_lit(alpha.lhs, e),), _right(alpha.rhs, e)),)
    if isinstance(alpha, RoleIncl):
        e1, e2 = args
        return (Clause((role_atom(alpha.sub, e1, e2),), role_atom(alpha.sup, e1, e2)),)
    if isinstance(alpha, Dis):
        e1, e2 = args
        a, b = role_atom(alpha.first, e1, e2), role_atom(alpha.second, e1, e2)
        return (Clause((a,), b.negate()), Clause((b,), a.negate()))
    if isinstance(alpha, Inv):
        e1, e2 = args
        a, b = Assertion(alpha.first, (e1, e2)), Assertion(alpha.second, (e2, e1))
        return (Clause((a,), b), Clause((b,), a))
    if isinstance(alpha, Irr):
        (e,) = args
        return (Clause((), Assertion(alpha.role, (e, e), False)),)
    raise ValueError(f"unsupported axiom shape: {alpha}")


def constant_order(k: DKB, extra: Iterable[str] = ()) -> list[str]:
    """Declaration order first, then remaining names lexicographically."""
    out = list(k.vocab.individuals)
    seen = set(out)
    for n in sorted(set(extra) - seen):
        out.append(n)
    return out
