"""Datalog syntax and the translation of normal-form DKBs into programs.

The program is P_dlr ∪ P_D plus input facts.  Rules are written in the
emitted text syntax and read back by a small parser, so the rule tables
below are exactly what ``emit_text`` prints.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Union

from .kb import (
    DKB,
    Assertion,
    Atomic,
    ClashingAssumption,
    ConceptIncl,
    Dis,
    Exists,
    Inv,
    Irr,
    Not,
    RoleIncl,
)
from .normalize import is_normal_form

# ---------------------------------------------------------------------------
# Syntax


@dataclass(frozen=True, order=True)
class Const:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, order=True)
class AuxConst:
    """Witness aux^α standing for every successor created by axiom α."""

    name: str
    axiom: str = ""

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, order=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


DTerm = Union[Const, AuxConst, Var]


ARITY: dict[str, int] = {
    "nom": 1, "cls": 1, "rol": 1,
    "insta": 2, "triplea": 3,
    "subClass": 2, "supNot": 2, "subEx": 2, "supEx": 3, "subRole": 2,
    "dis": 2, "inv": 2, "irr": 1,
    "instd": 2, "tripled": 3,
    "def_subclass": 2, "def_subr": 2, "def_inv": 2, "def_irr": 1,
    "const": 1, "first": 1, "next": 2, "last": 1,
    "all_nrel": 2, "all_nrel_step": 3,
    # completion rules
    "sk": 3, "edgef": 2, "edgeb": 2, "ty": 2, "unsat_ex": 1,
    "hx": 4, "hy": 4, "hxy": 4, "hyx": 4, "nh": 3,
    "nc_s": 3, "nc_all": 2, "nr_s": 4, "nr_x": 3, "nr_p": 3, "nr_all": 2,
    "ni_s": 4, "ni_x": 3, "ni_p": 3, "ni_all": 2,
}
# ovr is variadic: ovr(subClass,x,y,z), ovr(subRole,x,y,r,s), ovr(inv,x,y,r,s), ovr(irr,x,r)
OVR_ARITY = {"subClass": 4, "subRole": 5, "inv": 5, "irr": 3}

FACT_PREDICATES = frozenset({
    "nom", "cls", "rol", "insta", "triplea", "subClass", "supNot", "subEx", "supEx",
    "subRole", "dis", "inv", "irr", "def_subclass", "def_subr", "def_inv", "def_irr",
    "const", "first", "next", "last", "sk",
})

BASE = "base"
COMPLETE = "complete"
MODES = (BASE, COMPLETE)
AUX_COPIES = 3


@dataclass(frozen=True, order=True)
class DAtom:
    pred: str
    args: tuple[DTerm, ...]

    def is_ground(self) -> bool:
        return not any(isinstance(a, Var) for a in self.args)

    def variables(self) -> set[str]:
        return {a.name for a in self.args if isinstance(a, Var)}


@dataclass(frozen=True, order=True)
class DLiteral:
    atom: DAtom
    strong_neg: bool = False

    def complement(self) -> "DLiteral":
        return DLiteral(self.atom, not self.strong_neg)

    def __str__(self) -> str:
        return format_literal(self)


@dataclass(frozen=True)
class DRule:
    head: DLiteral
    body_pos: tuple[DLiteral, ...] = ()
    body_naf: tuple[DLiteral, ...] = ()
    label: str = ""

    def is_safe(self) -> bool:
        bound: set[str] = set()
        for lit in self.body_pos:
            bound |= lit.atom.variables()
        need = self.head.atom.variables()
        for lit in self.body_naf:
            need |= lit.atom.variables()
        return need <= bound

    def __str__(self) -> str:
        return format_rule(self)


@dataclass(frozen=True)
class DProgram:
    rules: tuple[DRule, ...] = ()
    facts: tuple[DLiteral, ...] = ()
    # (tag, symbols...) of an ovr atom minus its instance args -> axiom id
    defeasible_index: tuple[tuple[tuple[str, ...], str], ...] = ()
    constants: tuple[str, ...] = ()
    mode: str = COMPLETE

    def axiom_of(self, key: tuple[str, ...]) -> str | None:
        return dict(self.defeasible_index).get(key)


# ---------------------------------------------------------------------------
# Text syntax

_PLAIN = re.compile(r"[a-z][A-Za-z0-9_]*\Z")


def format_term(t: DTerm) -> str:
    if isinstance(t, Var):
        return t.name
    name = t.name
    if _PLAIN.match(name):
        return name
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def format_atom(a: DAtom) -> str:
    if not a.args:
        return a.pred
    return f"{a.pred}({','.join(format_term(t) for t in a.args)})"


def format_literal(lit: DLiteral) -> str:
    return ("-" if lit.strong_neg else "") + format_atom(lit.atom)


def format_rule(r: DRule) -> str:
    body = [format_literal(l) for l in r.body_pos]
    body += ["not " + format_literal(l) for l in r.body_naf]
    if not body:
        return format_literal(r.head) + "."
    return f"{format_literal(r.head)} :- {', '.join(body)}."


_LIT = re.compile(r'\s*(not\s+)?(-)?([a-z_][A-Za-z0-9_]*)\s*(?:\(([^)]*)\))?\s*')
_ARG = re.compile(r'\s*("(?:[^"\\]|\\.)*"|[A-Za-z_][A-Za-z0-9_]*)\s*')


def _parse_args(text: str) -> tuple[DTerm, ...]:
    out: list[DTerm] = []
    pos = 0
    text = text or ""
    while pos < len(text):
        m = _ARG.match(text, pos)
        if not m:
            raise ValueError(f"bad argument list: {text!r}")
        tok = m.group(1)
        if tok.startswith('"'):
            out.append(Const(re.sub(r"\\(.)", r"\1", tok[1:-1])))
        elif tok[0].isupper():
            out.append(Var(tok))
        else:
            out.append(Const(tok))
        pos = m.end()
        if pos < len(text):
            if text[pos] != ",":
                raise ValueError(f"bad argument list: {text!r}")
            pos += 1
    return tuple(out)


def parse_rule(text: str, label: str = "") -> DRule:
    """Read one rule in the emitted syntax."""
    text = text.strip()
    if not text.endswith("."):
        raise ValueError(f"rule must end with '.': {text!r}")
    text = text[:-1]
    head_txt, _, body_txt = text.partition(":-")

    def lits(s: str) -> list[tuple[bool, DLiteral]]:
        out = []
        pos = 0
        while pos < len(s):
            m = _LIT.match(s, pos)
            if not m or m.end() == pos:
                raise ValueError(f"cannot parse literal at {s[pos:]!r}")
            naf, neg, pred, args = m.groups()
            out.append((bool(naf), DLiteral(DAtom(pred, _parse_args(args)), bool(neg))))
            pos = m.end()
            if pos < len(s):
                if s[pos] != ",":
                    raise ValueError(f"expected ',' in {s!r}")
                pos += 1
        return out

    ((_, head),) = lits(head_txt)
    body = lits(body_txt) if body_txt.strip() else []
    return DRule(
        head,
        tuple(l for naf, l in body if not naf),
        tuple(l for naf, l in body if naf),
        label,
    )


# ---------------------------------------------------------------------------
# Rule tables

DEDUCTION_RULES: tuple[tuple[str, str], ...] = (
    ("pdlr-instd", "instd(X,Z) :- insta(X,Z)."),
    ("pdlr-tripled", "tripled(X,R,Y) :- triplea(X,R,Y)."),
    ("pdlr-subc", "instd(X,Z) :- subClass(Y,Z), instd(X,Y)."),
    ("pdlr-supnot", "-instd(X,Z) :- supNot(Y,Z), instd(X,Y)."),
    ("pdlr-subex", "instd(X,Z) :- subEx(V,Z), tripled(X,V,X1)."),
    ("pdlr-supex", "tripled(X,R,X1) :- supEx(Y,R,X1), instd(X,Y)."),
    ("pdlr-subr", "tripled(X,W,X1) :- subRole(V,W), tripled(X,V,X1)."),
    ("pdlr-dis1", "-tripled(X,U,Y) :- dis(U,V), tripled(X,V,Y)."),
    ("pdlr-dis2", "-tripled(X,V,Y) :- dis(U,V), tripled(X,U,Y)."),
    ("pdlr-inv1", "tripled(Y,V,X) :- inv(U,V), tripled(X,U,Y)."),
    ("pdlr-inv2", "tripled(Y,U,X) :- inv(U,V), tripled(X,V,Y)."),
    ("pdlr-irr", "-tripled(X,U,X) :- irr(U), const(X)."),
    ("pdlr-nsubc", "-instd(X,Y) :- subClass(Y,Z), -instd(X,Z)."),
    # contrapositive of pdlr-supnot: a positive head with a negated body
    # literal would derive membership from non-membership
    ("pdlr-nsupnot", "-instd(X,Y) :- supNot(Y,Z), instd(X,Z)."),
    ("pdlr-nsubex", "-tripled(X,V,X1) :- subEx(V,Z), const(X1), -instd(X,Z)."),
    ("pdlr-nsupex", "-instd(X,Y) :- supEx(Y,R,W), const(X), all_nrel(X,R)."),
    ("pdlr-nsubr", "-tripled(X,V,X1) :- subRole(V,W), -tripled(X,W,X1)."),
    ("pdlr-ninv1", "-tripled(Y,V,X) :- inv(U,V), -tripled(X,U,Y)."),
    ("pdlr-ninv2", "-tripled(Y,U,X) :- inv(U,V), -tripled(X,V,Y)."),
    ("pdlr-allnrel1", "all_nrel_step(X,R,Y) :- first(Y), -tripled(X,R,Y)."),
    ("pdlr-allnrel2", "all_nrel_step(X,R,Y) :- all_nrel_step(X,R,Y1), next(Y1,Y), -tripled(X,R,Y)."),
    ("pdlr-allnrel3", "all_nrel(X,R) :- last(Y), all_nrel_step(X,R,Y)."),
)

DEFEASIBLE_RULES: tuple[tuple[str, str], ...] = (
    ("ovr-subc", "ovr(subClass,X,Y,Z) :- def_subclass(Y,Z), instd(X,Y), -instd(X,Z)."),
    ("ovr-subr", "ovr(subRole,X,Y,R,S) :- def_subr(R,S), tripled(X,R,Y), -tripled(X,S,Y)."),
    ("ovr-inv1", "ovr(inv,X,Y,R,S) :- def_inv(R,S), tripled(X,R,Y), -tripled(Y,S,X)."),
    ("ovr-inv2", "ovr(inv,X,Y,R,S) :- def_inv(R,S), tripled(Y,S,X), -tripled(X,R,Y)."),
    ("ovr-irr", "ovr(irr,X,R) :- def_irr(R), tripled(X,R,X)."),
    ("app-subc", "instd(X,Z) :- def_subclass(Y,Z), instd(X,Y), not ovr(subClass,X,Y,Z)."),
    ("app-subr", "tripled(X,W,Y) :- def_subr(V,W), tripled(X,V,Y), not ovr(subRole,X,Y,V,W)."),
    ("app-inv1", "tripled(Y,V,X) :- def_inv(U,V), tripled(X,U,Y), not ovr(inv,X,Y,U,V)."),
    ("app-inv2", "tripled(X,U,Y) :- def_inv(U,V), tripled(Y,V,X), not ovr(inv,X,Y,U,V)."),
    ("app-irr", "-tripled(X,U,X) :- def_irr(U), const(X), not ovr(irr,X,U)."),
    ("app-nsubc", "-instd(X,Y) :- def_subclass(Y,Z), -instd(X,Z), not ovr(subClass,X,Y,Z)."),
    ("app-nsubr", "-tripled(X,V,Y) :- def_subr(V,W), -tripled(X,W,Y), not ovr(subRole,X,Y,V,W)."),
    ("app-ninv1", "-tripled(Y,V,X) :- def_inv(U,V), -tripled(X,U,Y), not ovr(inv,X,Y,U,V)."),
    ("app-ninv2", "-tripled(X,U,Y) :- def_inv(U,V), -tripled(Y,V,X), not ovr(inv,X,Y,U,V)."),
)


# Hypothetical closure.  A hypothesis H at (X,Y) is a concept H(X) (then
# Y = X) or a role H(X,Y); hx/hy collect concepts forced at X/Y, hxy/hyx
# roles forced on (X,Y)/(Y,X).  A contradictory hypothesis yields the
# negated literal.  edgef/edgeb/ty/unsat_ex describe the fresh successor
# created for an existential role.  That successor may be a named
# individual, so a defeasible axiom is used there only when it has no
# exception at all (nc_all/nr_all/ni_all, built by walking first/next).
COMPLETION_RULES: tuple[tuple[str, str], ...] = (
    ("cmp-nc1", "nc_s(A,B,X) :- def_subclass(A,B), first(X), not ovr(subClass,X,A,B)."),
    ("cmp-nc2", "nc_s(A,B,X) :- nc_s(A,B,X1), next(X1,X), not ovr(subClass,X,A,B)."),
    ("cmp-nc3", "nc_all(A,B) :- nc_s(A,B,X), last(X)."),
    ("cmp-nr1", "nr_s(S,T,X,Y) :- def_subr(S,T), const(X), first(Y), not ovr(subRole,X,Y,S,T)."),
    ("cmp-nr2", "nr_s(S,T,X,Y) :- nr_s(S,T,X,Y1), next(Y1,Y), not ovr(subRole,X,Y,S,T)."),
    ("cmp-nr3", "nr_x(S,T,X) :- nr_s(S,T,X,Y), last(Y)."),
    ("cmp-nr4", "nr_p(S,T,X) :- nr_x(S,T,X), first(X)."),
    ("cmp-nr5", "nr_p(S,T,X) :- nr_p(S,T,X1), next(X1,X), nr_x(S,T,X)."),
    ("cmp-nr6", "nr_all(S,T) :- nr_p(S,T,X), last(X)."),
    ("cmp-ni1", "ni_s(U,V,X,Y) :- def_inv(U,V), const(X), first(Y), not ovr(inv,X,Y,U,V)."),
    ("cmp-ni2", "ni_s(U,V,X,Y) :- ni_s(U,V,X,Y1), next(Y1,Y), not ovr(inv,X,Y,U,V)."),
    ("cmp-ni3", "ni_x(U,V,X) :- ni_s(U,V,X,Y), last(Y)."),
    ("cmp-ni4", "ni_p(U,V,X) :- ni_x(U,V,X), first(X)."),
    ("cmp-ni5", "ni_p(U,V,X) :- ni_p(U,V,X1), next(X1,X), ni_x(U,V,X)."),
    ("cmp-ni6", "ni_all(U,V) :- ni_p(U,V,X), last(X)."),
    ("cmp-edge0", "edgef(R,R) :- supEx(Y,R,W)."),
    ("cmp-edge1", "edgef(R,T) :- edgef(R,S), subRole(S,T)."),
    ("cmp-edge2", "edgeb(R,T) :- edgeb(R,S), subRole(S,T)."),
    ("cmp-edge3", "edgeb(R,V) :- edgef(R,U), inv(U,V)."),
    ("cmp-edge4", "edgeb(R,U) :- edgef(R,V), inv(U,V)."),
    ("cmp-edge5", "edgef(R,V) :- edgeb(R,U), inv(U,V)."),
    ("cmp-edge6", "edgef(R,U) :- edgeb(R,V), inv(U,V)."),
    ("cmp-edge7", "edgef(R,T) :- edgef(R,S), def_subr(S,T), nr_all(S,T)."),
    ("cmp-edge8", "edgeb(R,T) :- edgeb(R,S), def_subr(S,T), nr_all(S,T)."),
    ("cmp-edge9", "edgeb(R,V) :- edgef(R,U), def_inv(U,V), ni_all(U,V)."),
    ("cmp-edge10", "edgef(R,U) :- edgeb(R,V), def_inv(U,V), ni_all(U,V)."),
    ("cmp-edge11", "edgeb(R,U) :- edgef(R,V), def_inv(U,V), ni_all(U,V)."),
    ("cmp-edge12", "edgef(R,V) :- edgeb(R,U), def_inv(U,V), ni_all(U,V)."),
    ("cmp-ty0", "ty(R,A) :- edgeb(R,S), subEx(S,A)."),
    ("cmp-ty1", "ty(R,B) :- ty(R,A), subClass(A,B)."),
    ("cmp-ty3", "ty(R,B) :- ty(R,A), def_subclass(A,B), nc_all(A,B)."),
    ("cmp-ty2", "ty(R,C) :- ty(R,A), supEx(A,S,W), edgef(S,T), subEx(T,C)."),
    ("cmp-ux0", "unsat_ex(R) :- ty(R,A), ty(R,B), supNot(A,B)."),
    ("cmp-ux1", "unsat_ex(R) :- edgef(R,S), edgef(R,T), dis(S,T)."),
    ("cmp-ux2", "unsat_ex(R) :- edgeb(R,S), edgeb(R,T), dis(S,T)."),
    ("cmp-ux3", "unsat_ex(R) :- ty(R,A), supEx(A,S,W), unsat_ex(S)."),
    ("cmp-hc0", "hx(X,X,A,A) :- const(X), cls(A)."),
    ("cmp-hr0", "hxy(X,Y,R,R) :- const(X), const(Y), rol(R)."),
    ("cmp-hx1", "hx(X,Y,H,C) :- hx(X,Y,H,B), subClass(B,C)."),
    ("cmp-hx2", "hx(X,Y,H,C) :- hx(X,Y,H,B), def_subclass(B,C), not ovr(subClass,X,B,C)."),
    ("cmp-hx3", "hx(X,Y,H,C) :- hx(X,Y,H,B), supEx(B,R,W), edgef(R,S), subEx(S,C)."),
    ("cmp-hx4", "hx(X,Y,H,C) :- hxy(X,Y,H,S), subEx(S,C)."),
    ("cmp-hy1", "hy(X,Y,H,C) :- hy(X,Y,H,B), subClass(B,C)."),
    ("cmp-hy2", "hy(X,Y,H,C) :- hy(X,Y,H,B), def_subclass(B,C), not ovr(subClass,Y,B,C)."),
    ("cmp-hy3", "hy(X,Y,H,C) :- hy(X,Y,H,B), supEx(B,R,W), edgef(R,S), subEx(S,C)."),
    ("cmp-hy4", "hy(X,Y,H,C) :- hyx(X,Y,H,S), subEx(S,C)."),
    ("cmp-hr1", "hxy(X,Y,H,T) :- hxy(X,Y,H,S), subRole(S,T)."),
    ("cmp-hr2", "hyx(X,Y,H,T) :- hyx(X,Y,H,S), subRole(S,T)."),
    ("cmp-hr3", "hxy(X,Y,H,T) :- hxy(X,Y,H,S), def_subr(S,T), not ovr(subRole,X,Y,S,T)."),
    ("cmp-hr4", "hyx(X,Y,H,T) :- hyx(X,Y,H,S), def_subr(S,T), not ovr(subRole,Y,X,S,T)."),
    ("cmp-hr5", "hyx(X,Y,H,V) :- hxy(X,Y,H,U), inv(U,V)."),
    ("cmp-hr6", "hxy(X,Y,H,V) :- hyx(X,Y,H,U), inv(U,V)."),
    ("cmp-hr7", "hyx(X,Y,H,U) :- hxy(X,Y,H,V), inv(U,V)."),
    ("cmp-hr8", "hxy(X,Y,H,U) :- hyx(X,Y,H,V), inv(U,V)."),
    ("cmp-hr9", "hyx(X,Y,H,V) :- hxy(X,Y,H,U), def_inv(U,V), not ovr(inv,X,Y,U,V)."),
    ("cmp-hr10", "hxy(X,Y,H,U) :- hyx(X,Y,H,V), def_inv(U,V), not ovr(inv,X,Y,U,V)."),
    ("cmp-hr11", "hxy(X,Y,H,V) :- hyx(X,Y,H,U), def_inv(U,V), not ovr(inv,Y,X,U,V)."),
    ("cmp-hr12", "hyx(X,Y,H,U) :- hxy(X,Y,H,V), def_inv(U,V), not ovr(inv,Y,X,U,V)."),
    ("cmp-refl1", "hy(X,X,H,C) :- hx(X,X,H,C)."),
    ("cmp-refl2", "hx(X,X,H,C) :- hy(X,X,H,C)."),
    ("cmp-refl3", "hyx(X,X,H,S) :- hxy(X,X,H,S)."),
    ("cmp-refl4", "hxy(X,X,H,S) :- hyx(X,X,H,S)."),
    ("cmp-nh1", "nh(X,Y,H) :- hx(X,Y,H,B), hx(X,Y,H,C), supNot(B,C)."),
    ("cmp-nh2", "nh(X,Y,H) :- hy(X,Y,H,B), hy(X,Y,H,C), supNot(B,C)."),
    ("cmp-nh3", "nh(X,Y,H) :- hx(X,Y,H,B), -instd(X,B)."),
    ("cmp-nh4", "nh(X,Y,H) :- hy(X,Y,H,B), -instd(Y,B)."),
    ("cmp-nh5", "nh(X,Y,H) :- hxy(X,Y,H,S), -tripled(X,S,Y)."),
    ("cmp-nh6", "nh(X,Y,H) :- hyx(X,Y,H,S), -tripled(Y,S,X)."),
    ("cmp-nh7", "nh(X,Y,H) :- hxy(X,Y,H,S), hxy(X,Y,H,T), dis(S,T)."),
    ("cmp-nh8", "nh(X,Y,H) :- hyx(X,Y,H,S), hyx(X,Y,H,T), dis(S,T)."),
    ("cmp-nh9", "nh(X,Y,H) :- hx(X,Y,H,B), supEx(B,R,W), unsat_ex(R)."),
    ("cmp-nh10", "nh(X,Y,H) :- hy(X,Y,H,B), supEx(B,R,W), unsat_ex(R)."),
    ("cmp-neg1", "-instd(X,A) :- nh(X,X,A), cls(A)."),
    ("cmp-neg2", "-tripled(X,R,Y) :- nh(X,Y,R), rol(R)."),
)

# With a cycle among Skolem successors the aux witnesses come in copies;
# sk(X,W,X1) names the copy X1 of witness W used as successor of X.
CYCLIC_SUPEX = ("pdlr-supex", "tripled(X,R,X1) :- supEx(Y,R,W), instd(X,Y), sk(X,W,X1).")


def _read(table: Iterable[tuple[str, str]]) -> tuple[DRule, ...]:
    return tuple(parse_rule(text, label) for label, text in table)


def deduction_rules(mode: str = COMPLETE, cyclic: bool = False) -> tuple[DRule, ...]:
    """P_dlr followed by P_D, in table order; ``complete`` mode appends the
    hypothetical-closure rules."""
    if mode not in MODES:
        raise ValueError(f"unknown translation mode {mode!r}")
    table = list(DEDUCTION_RULES)
    if cyclic:
        table = [CYCLIC_SUPEX if lab == CYCLIC_SUPEX[0] else (lab, t) for lab, t in table]
    rules = _read(table) + _read(DEFEASIBLE_RULES)
    if mode == COMPLETE:
        rules += _read(COMPLETION_RULES)
    return rules


# ---------------------------------------------------------------------------
# Input translation and assembly


class ProgramError(ValueError):
    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


def _fact(pred: str, *args: Union[str, DTerm]) -> DLiteral:
    terms = tuple(a if isinstance(a, (Const, AuxConst, Var)) else Const(a) for a in args)
    return DLiteral(DAtom(pred, terms))


def aux_name(i: int) -> str:
    return f"_aux_{i}"


@dataclass
class InputFacts:
    facts: list[DLiteral] = field(default_factory=list)
    aux: list[AuxConst] = field(default_factory=list)
    defeasible_index: list[tuple[tuple[str, ...], str]] = field(default_factory=list)


def _input_facts(k: DKB) -> InputFacts:
    if not is_normal_form(k):
        raise ProgramError("input translation needs a normal-form DKB")
    out = InputFacts()
    f = out.facts.append
    v = k.vocab
    for a in v.individuals:
        f(_fact("nom", a))
    for c in v.concepts:
        f(_fact("cls", c))
    for r in v.roles:
        f(_fact("rol", r))
    for a in k.abox:
        if a.is_concept:
            f(_fact("insta", a.args[0], a.pred))
        else:
            f(_fact("triplea", a.args[0], a.pred, a.args[1]))
    for ax in k.strict:
        if isinstance(ax, ConceptIncl):
            lhs, rhs = ax.lhs, ax.rhs
            if isinstance(lhs, Exists):
                f(_fact("subEx", lhs.role.name, rhs.name))
            elif isinstance(rhs, Exists):
                aux = AuxConst(aux_name(len(out.aux) + 1), str(ax))
                out.aux.append(aux)
                f(_fact("supEx", lhs.name, rhs.role.name, aux))
            elif isinstance(rhs, Not):
                f(_fact("supNot", lhs.name, rhs.inner.name))
            else:
                f(_fact("subClass", lhs.name, rhs.name))
        elif isinstance(ax, RoleIncl):
            f(_fact("subRole", ax.sub.name, ax.sup.name))
        elif isinstance(ax, Dis):
            f(_fact("dis", ax.first.name, ax.second.name))
        elif isinstance(ax, Inv):
            f(_fact("inv", ax.first, ax.second))
        elif isinstance(ax, Irr):
            f(_fact("irr", ax.role))
    for d in k.defeasible:
        ax = d.inner
        if isinstance(ax, ConceptIncl):
            f(_fact("def_subclass", ax.lhs.name, ax.rhs.name))
            key = ("subClass", ax.lhs.name, ax.rhs.name)
        elif isinstance(ax, RoleIncl):
            f(_fact("def_subr", ax.sub.name, ax.sup.name))
            key = ("subRole", ax.sub.name, ax.sup.name)
        elif isinstance(ax, Inv):
            f(_fact("def_inv", ax.first, ax.second))
            key = ("inv", ax.first, ax.second)
        else:
            f(_fact("def_irr", ax.role))
            key = ("irr", ax.role)
        out.defeasible_index.append((key, d.id))
    return out


def input_translation(k: DKB) -> tuple[DLiteral, ...]:
    return tuple(_input_facts(k).facts)


def assemble_program(k: DKB, check_safety: bool = True, mode: str = COMPLETE) -> DProgram:
    """PK(K) for a normal-form, exception-safe DKB."""
    from .safety import UNBOUNDED, check_exception_safe, chain_bound

    if mode not in MODES:
        raise ValueError(f"unknown translation mode {mode!r}")
    if check_safety:
        report = check_exception_safe(k)
        if not report.exception_safe:
            raise ProgramError("DKB is not exception-safe", report)
    inp = _input_facts(k)
    facts = list(inp.facts)
    cyclic = bool(inp.aux) and chain_bound(k) == UNBOUNDED
    copies: list[list[AuxConst]] = []
    for a in inp.aux:
        row = [a]
        if cyclic:
            row += [AuxConst(f"{a.name}_{i}", a.axiom) for i in range(2, AUX_COPIES + 1)]
        copies.append(row)
    aux_all = [c for row in copies for c in row]
    consts: list[DTerm] = [Const(c) for c in k.vocab.individuals] + aux_all
    for c in consts:
        facts.append(_fact("const", c))
    if consts:
        facts.append(_fact("first", consts[0]))
        for a, b in zip(consts, consts[1:]):
            facts.append(_fact("next", a, b))
        facts.append(_fact("last", consts[-1]))
    if cyclic:
        for x in k.vocab.individuals:
            for row in copies:
                facts.append(_fact("sk", Const(x), row[0], row[0]))
        for row_x in copies:
            for i, c in enumerate(row_x):
                for row in copies:
                    facts.append(_fact("sk", c, row[0], row[(i + 1) % len(row)]))
    return DProgram(
        deduction_rules(mode, cyclic),
        tuple(facts),
        tuple(inp.defeasible_index),
        tuple(str(c) for c in consts),
        mode,
    )


def output_atom(q: Assertion, k: DKB | None = None) -> DLiteral:
    """instd(a,A) / tripled(a,R,b), strongly negated for negative q."""
    if not isinstance(q.pred, str):
        raise ValueError("output atoms take atomic predicates")
    if k is not None:
        v = k.vocab
        kinds = v.concepts if q.is_concept else v.roles
        if q.pred not in kinds:
            raise ValueError(f"undeclared {'concept' if q.is_concept else 'role'} `{q.pred}`")
        for a in q.args:
            if a not in v.individuals:
                raise ValueError(f"undeclared individual `{a}`")
    if q.is_concept:
        atom = DAtom("instd", (Const(q.args[0]), Const(q.pred)))
    else:
        atom = DAtom("tripled", (Const(q.args[0]), Const(q.pred), Const(q.args[1])))
    return DLiteral(atom, not q.positive)


def ovr_assumption(p: DProgram, lit: DLiteral) -> ClashingAssumption:
    """Map a ground ovr literal back to the clashing assumption it encodes."""
    args = [t.name for t in lit.atom.args]
    tag = args[0]
    if tag == "subClass":
        key, inst = (tag, args[2], args[3]), (args[1],)
    elif tag in ("subRole", "inv"):
        key, inst = (tag, args[3], args[4]), (args[1], args[2])
    elif tag == "irr":
        key, inst = (tag, args[2]), (args[1],)
    else:
        raise ValueError(f"not an ovr literal: {lit}")
    ident = p.axiom_of(key)
    if ident is None:
        raise ValueError(f"ovr literal without defeasible axiom: {lit}")
    return ClashingAssumption(ident, inst)


def emit_text(p: DProgram) -> str:
    facts = sorted(format_literal(f) + "." for f in p.facts)
    rules = [format_rule(r) for r in p.rules]
    return "\n".join(facts + rules) + "\n"
