"""Exception safety, chain safety and recursion detection.

Everything here runs over abstract atoms whose arguments are only typed
NAMED or SKOLEM, with defeasible axioms read as strict.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Union

from .kb import DKB, Assertion, Atomic, ConceptIncl, Exists, Inv, Irr, Not, RoleIncl
from .normalize import is_normal_form, normalize

NAMED = "N"
SKOLEM = "S"
UNBOUNDED = "unbounded"

ChainBound = Union[int, str]


@dataclass(frozen=True, order=True)
class AbstractAtom:
    predicate: str
    arg_types: tuple[str, ...]

    def __str__(self) -> str:
        names = {NAMED: "NAMED", SKOLEM: "SKOLEM"}
        return f"{self.predicate}({', '.join(names[t] for t in self.arg_types)})"


@dataclass(frozen=True)
class Step:
    atom: AbstractAtom
    via: str  # axiom text, or "assertion" for seeds
    premise: AbstractAtom | None = None

    def __str__(self) -> str:
        if self.premise is None:
            return f"{self.atom}  [{self.via}]"
        return f"{self.atom}  [from {self.premise} by {self.via}]"


@dataclass(frozen=True)
class Witness:
    axiom_id: str
    steps: tuple[Step, ...]

    def __str__(self) -> str:
        lines = [f"clashing atom for defeasible axiom {self.axiom_id} reaches a Skolem term:"]
        lines += [f"  {s}" for s in self.steps]
        return "\n".join(lines)


@dataclass(frozen=True)
class SafetyReport:
    exception_safe: bool
    chain_bound: ChainBound = 0
    recursive: bool = False
    witnesses: tuple[Witness, ...] = ()

    def summary(self) -> str:
        safe = "exception-safe" if self.exception_safe else "not exception-safe"
        if self.chain_bound == UNBOUNDED:
            chain = "chain bound unbounded"
        else:
            chain = f"chain bound {self.chain_bound}"
        out = f"{safe}, {chain}"
        if self.recursive:
            out += ", recursive"
        return out

    def render(self) -> str:
        parts = [self.summary()]
        parts += [str(w) for w in self.witnesses]
        return "\n".join(parts)

    def to_dict(self) -> dict:
        return {
            "exception_safe": self.exception_safe,
            "chain_bound": self.chain_bound,
            "recursive": self.recursive,
            "witnesses": [
                {"axiom": w.axiom_id, "steps": [str(s) for s in w.steps]} for w in self.witnesses
            ],
        }


class NotNormalError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Abstract closure


@dataclass
class _Rules:
    subclass: dict[str, list[tuple[str, str]]] = field(default_factory=dict)  # A -> [(B, via)]
    subex: dict[str, list[tuple[str, str]]] = field(default_factory=dict)  # R -> [(A, via)]
    supex: dict[str, list[tuple[str, str]]] = field(default_factory=dict)  # A -> [(R, via)]
    subrole: dict[str, list[tuple[str, str]]] = field(default_factory=dict)  # R -> [(S, via)]
    inv: dict[str, list[tuple[str, str]]] = field(default_factory=dict)  # R -> [(S, via)], both ways


def _rules(k: DKB) -> _Rules:
    r = _Rules()

    def add(table: dict, key: str, val: str, via: str) -> None:
        table.setdefault(key, []).append((val, via))

    axioms = [(ax, str(ax)) for ax in k.strict]
    axioms += [(d.inner, str(d)) for d in k.defeasible]
    for ax, via in axioms:
        if isinstance(ax, ConceptIncl):
            lhs, rhs = ax.lhs, ax.rhs
            if isinstance(lhs, Exists):
                add(r.subex, lhs.role.name, rhs.name, via)
            elif isinstance(rhs, Exists):
                add(r.supex, lhs.name, rhs.role.name, via)
            elif isinstance(rhs, Atomic):
                add(r.subclass, lhs.name, rhs.name, via)
        elif isinstance(ax, RoleIncl):
            add(r.subrole, ax.sub.name, ax.sup.name, via)
        elif isinstance(ax, Inv):
            add(r.inv, ax.first, ax.second, via)
            add(r.inv, ax.second, ax.first, via)
    return r


def _successors(rules: _Rules, atom: AbstractAtom) -> list[tuple[AbstractAtom, str]]:
    p, t = atom.predicate, atom.arg_types
    out: list[tuple[AbstractAtom, str]] = []
    if len(t) == 1:
        for b, via in rules.subclass.get(p, ()):
            out.append((AbstractAtom(b, t), via))
        for r, via in rules.supex.get(p, ()):
            out.append((AbstractAtom(r, (t[0], SKOLEM)), via))
    else:
        for a, via in rules.subex.get(p, ()):
            out.append((AbstractAtom(a, (t[0],)), via))
        for s, via in rules.subrole.get(p, ()):
            out.append((AbstractAtom(s, t), via))
        for s, via in rules.inv.get(p, ()):
            out.append((AbstractAtom(s, (t[1], t[0])), via))
    return out


def abstract_closure(k: DKB) -> dict[AbstractAtom, Step]:
    """All derivable abstract atoms, each with the step that first derived it."""
    rules = _rules(k)
    derived: dict[AbstractAtom, Step] = {}
    queue: deque[AbstractAtom] = deque()
    for a in k.abox:
        atom = AbstractAtom(a.pred, (NAMED,) * len(a.args))
        if atom not in derived:
            derived[atom] = Step(atom, "assertion")
            queue.append(atom)
    while queue:
        atom = queue.popleft()
        for nxt, via in _successors(rules, atom):
            if nxt not in derived:
                derived[nxt] = Step(nxt, via, atom)
                queue.append(nxt)
    return derived


def closure_bound(k: DKB) -> int:
    return 2 * len(k.vocab.concepts) + 4 * len(k.vocab.roles)


def _derivation(derived: dict[AbstractAtom, Step], atom: AbstractAtom) -> tuple[Step, ...]:
    steps = []
    cur: AbstractAtom | None = atom
    while cur is not None:
        st = derived[cur]
        steps.append(st)
        cur = st.premise
    return tuple(reversed(steps))


def clashing_patterns(k: DKB) -> list[tuple[str, str, str]]:
    """(axiom id, predicate, kind) for positive atoms in clashing sets.
    kind is "concept", "role" or "self" (R(e,e))."""
    out = []
    for d in k.defeasible:
        ax = d.inner
        if isinstance(ax, ConceptIncl):
            out.append((d.id, ax.lhs.name, "concept"))
        elif isinstance(ax, RoleIncl):
            out.append((d.id, ax.sub.name, "role"))
        elif isinstance(ax, Inv):
            out.append((d.id, ax.first, "role"))
            out.append((d.id, ax.second, "role"))
        elif isinstance(ax, Irr):
            out.append((d.id, ax.role, "self"))
    return out


def _offending(atom: AbstractAtom, pred: str, kind: str) -> bool:
    if atom.predicate != pred or SKOLEM not in atom.arg_types:
        return False
    if kind == "concept":
        return len(atom.arg_types) == 1
    if kind == "role":
        return len(atom.arg_types) == 2
    return atom.arg_types == (SKOLEM, SKOLEM)


def _require_normal(k: DKB) -> None:
    if not is_normal_form(k):
        raise NotNormalError("safety analysis needs a normal-form DKB")


def _unsafe_witnesses(k: DKB) -> list[Witness]:
    derived = abstract_closure(k)
    witnesses = []
    for ident, pred, kind in clashing_patterns(k):
        for atom in sorted(derived):
            if _offending(atom, pred, kind):
                witnesses.append(Witness(ident, _derivation(derived, atom)))
                break
    return witnesses


# ---------------------------------------------------------------------------
# Types of Skolem successors


@dataclass
class SkolemTypes:
    """For each existential role R: the roles holding on an edge
    (t, f_R(t)) in either direction and the concepts of f_R(t)."""

    edge: dict[str, set[tuple[str, bool]]]  # R -> {(S, forward)}
    types: dict[str, set[str]]
    succ: dict[str, set[str]]
    roots: list[str]


def skolem_types(k: DKB) -> SkolemTypes:
    rules = _rules(k)
    ex_roles: list[str] = []
    trigger: dict[str, list[str]] = {}  # concept -> roles it triggers
    for a, lst in rules.supex.items():
        for r, _ in lst:
            trigger.setdefault(a, []).append(r)
            if r not in ex_roles:
                ex_roles.append(r)

    edge: dict[str, set[tuple[str, bool]]] = {}
    for r in ex_roles:
        seen = {(r, True)}
        todo = [(r, True)]
        while todo:
            s, fwd = todo.pop()
            nxt = [(t, fwd) for t, _ in rules.subrole.get(s, ())]
            nxt += [(t, not fwd) for t, _ in rules.inv.get(s, ())]
            for n in nxt:
                if n not in seen:
                    seen.add(n)
                    todo.append(n)
        edge[r] = seen

    def from_edge(r: str, forward: bool) -> set[str]:
        return {a for s, fwd in edge[r] if fwd == forward for a, _ in rules.subex.get(s, ())}

    def close(concepts: set[str]) -> set[str]:
        out = set(concepts)
        todo = list(concepts)
        while todo:
            c = todo.pop()
            nxt = [b for b, _ in rules.subclass.get(c, ())]
            for t in trigger.get(c, ()):
                nxt += list(from_edge(t, True))
            for b in nxt:
                if b not in out:
                    out.add(b)
                    todo.append(b)
        return out

    types = {r: close(from_edge(r, False)) for r in ex_roles}
    succ = {r: {t for c in types[r] for t in trigger.get(c, ())} for r in ex_roles}
    derived = abstract_closure(k)
    roots = [r for r in ex_roles if any(AbstractAtom(c, (NAMED,)) in derived for c, lst in trigger.items() if r in lst)]
    return SkolemTypes(edge, types, succ, roots)


def _reachable(st: SkolemTypes) -> list[str]:
    seen: list[str] = []
    todo = list(st.roots)
    while todo:
        r = todo.pop(0)
        if r in seen:
            continue
        seen.append(r)
        todo.extend(sorted(st.succ[r]))
    return seen


def _on_or_below_cycle(st: SkolemTypes, nodes: list[str]) -> set[str]:
    """Nodes with infinitely many Skolem terms: reachable from a cycle."""
    cyclic = set()
    for r in nodes:
        # r lies on a cycle iff r is reachable from one of its successors
        todo, seen = list(st.succ[r]), set()
        while todo:
            n = todo.pop()
            if n == r:
                cyclic.add(r)
                break
            if n not in seen:
                seen.add(n)
                todo.extend(st.succ[n])
    out = set()
    todo = list(cyclic)
    while todo:
        n = todo.pop()
        if n not in out:
            out.add(n)
            todo.extend(st.succ[n])
    return out


def chain_bound(k: DKB, st: SkolemTypes | None = None) -> ChainBound:
    st = st or skolem_types(k)
    nodes = _reachable(st)
    if _on_or_below_cycle(st, nodes):
        return UNBOUNDED
    memo: dict[str, int] = {}

    def longest(r: str) -> int:
        if r not in memo:
            memo[r] = 1 + max((longest(t) for t in st.succ[r]), default=0)
        return memo[r]

    return max((longest(r) for r in st.roots), default=0)


def check_chain_safety(k: DKB) -> ChainBound:
    _require_normal(k)
    return chain_bound(k)


def _recursive(k: DKB, st: SkolemTypes) -> bool:
    infinite = _on_or_below_cycle(st, _reachable(st))
    # roles generated from Skolem parents: edges with two Skolem ends
    skolem_parented = {t for r in _reachable(st) for t in st.succ[r]}
    for _ident, pred, kind in clashing_patterns(k):
        for r in infinite:
            if kind == "concept" and pred in st.types[r]:
                return True
            roles = {s for s, _ in st.edge[r]}
            if kind == "role" and pred in roles:
                return True
            if kind == "self" and pred in roles and r in skolem_parented:
                return True
    return False


def check_exception_safe(k: DKB) -> SafetyReport:
    _require_normal(k)
    witnesses = _unsafe_witnesses(k)
    st = skolem_types(k)
    return SafetyReport(
        exception_safe=not witnesses,
        chain_bound=chain_bound(k, st),
        recursive=bool(witnesses) and _recursive(k, st),
        witnesses=tuple(witnesses),
    )


def classify(k: DKB) -> SafetyReport:
    n = k if is_normal_form(k) else normalize(k)[0]
    return check_exception_safe(n)


def replay_witness(k: DKB, w: Witness) -> bool:
    """True iff every step of the witness is licensed by an axiom of K_s."""
    rules = _rules(k)
    seeds = {AbstractAtom(a.pred, (NAMED,) * len(a.args)) for a in k.abox}
    for i, st in enumerate(w.steps):
        if st.premise is None:
            if i != 0 or st.atom not in seeds:
                return False
            continue
        if w.steps[i - 1].atom != st.premise:
            return False
        if (st.atom, st.via) not in _successors(rules, st.premise):
            return False
    return True
