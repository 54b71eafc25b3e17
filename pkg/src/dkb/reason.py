"""Reasoning tasks on exception-safe DKBs.

Instance entailment and justified χ go through the datalog translation and
answer-set search; conjunctive queries are matched against the least
CAS-models of the oracle chase, one per justified χ.
"""

from __future__ import annotations

import itertools
import re
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Literal, Sequence

from .asp import AnswerSet, answer_sets, ground
from .dlprog import (
    Const,
    DAtom,
    DLiteral,
    DProgram,
    assemble_program,
    output_atom,
)
from .kb import (
    DKB,
    App,
    Assertion,
    ClashingAssumption,
    ClashingSet,
    Exists,
    minimal_clashing_sets,
)
from .normalize import ex_concept, existential_roles, normalize
from .oracle import least_cas_model
from .safety import UNBOUNDED, SafetyReport, check_exception_safe

Mode = Literal["cautious", "brave"]


class ReasoningError(ValueError):
    """Input outside the supported class (unsafe, non-UNA, undeclared names)."""

    def __init__(self, message: str, report: SafetyReport | None = None):
        super().__init__(message)
        self.report = report


@dataclass
class Pipeline:
    source: DKB
    normal: DKB
    report: SafetyReport
    program: DProgram
    models: list[AnswerSet]


_CACHE: dict[int, tuple[DKB, int | None, Pipeline]] = {}


def pipeline(k: DKB, limit: int | None = None) -> Pipeline:
    """Normalize, check safety, translate and solve (memoized per object)."""
    hit = _CACHE.get(id(k))
    if hit is not None and hit[0] is k and hit[1] == limit:
        return hit[2]
    if not k.una:
        raise ReasoningError("reasoning requires the unique name assumption (@no-una given)")
    n, _ = normalize(k)
    report = check_exception_safe(n)
    if not report.exception_safe:
        raise ReasoningError("DKB is not exception-safe", report)
    prog = assemble_program(n, check_safety=False)
    models = answer_sets(ground(prog), limit)
    p = Pipeline(k, n, report, prog, models)
    if len(_CACHE) > 64:
        _CACHE.clear()
    _CACHE[id(k)] = (k, limit, p)
    return p


def is_satisfiable(k: DKB) -> bool:
    """Whether the strict part of k has a model.  Safety is not required:
    with no defeasible axioms every DKB is exception-safe."""
    s = DKB(k.vocab, k.strict, (), k.abox, k.una)
    n, _ = normalize(s)
    prog = assemble_program(n, check_safety=False)
    return bool(answer_sets(ground(prog), limit=1))


# ---------------------------------------------------------------------------
# Entailment


@dataclass(frozen=True)
class EntailmentResult:
    verdict: bool
    mode: str
    witnesses: tuple[AnswerSet, ...] = ()  # supporting (brave) or refuting (cautious) sets
    unsatisfiable: bool = False

    def __bool__(self) -> bool:
        return self.verdict


def _check_names(k: DKB, q: Assertion) -> None:
    v = k.vocab
    for a in q.args:
        if not isinstance(a, str) or a not in v.individuals:
            raise ReasoningError(f"undeclared individual `{a}`")
    if isinstance(q.pred, Exists):
        if q.pred.role.name not in v.roles:
            raise ReasoningError(f"undeclared role `{q.pred.role.name}`")
    elif q.is_concept and q.pred not in v.concepts:
        raise ReasoningError(f"undeclared concept `{q.pred}`")
    elif not q.is_concept and q.pred not in v.roles:
        raise ReasoningError(f"undeclared role `{q.pred}`")


def _test(p: Pipeline, q: Assertion):
    """A predicate over answer sets deciding q."""
    if isinstance(q.pred, Exists):
        r = q.pred.role
        a = q.args[0]
        if not r.inverted and r.name in existential_roles(p.normal):
            lit = output_atom(Assertion(ex_concept(r.name), (a,), q.positive))
            return lambda s: lit in s
        if q.positive:
            def test(s: AnswerSet) -> bool:
                for lt in s.literals:
                    at = lt.atom
                    if lt.strong_neg or at.pred != "tripled" or at.args[1] != Const(r.name):
                        continue
                    if (at.args[2] if r.inverted else at.args[0]).name == a:
                        return True
                return False

            return test
        if r.inverted:
            raise ReasoningError("negated ∃R⁻ queries need R⁻ to occur under ∃ in the DKB")
        lit = DLiteral(DAtom("all_nrel", (Const(a), Const(r.name))))
        return lambda s: lit in s
    lit = output_atom(q)
    return lambda s: lit in s


def entails(k: DKB, q: Assertion, mode: Mode = "cautious") -> EntailmentResult:
    if mode not in ("cautious", "brave"):
        raise ValueError(f"unknown mode {mode!r}")
    p = pipeline(k)
    _check_names(k, q)
    test = _test(p, q)
    if not p.models:
        return EntailmentResult(mode == "cautious", mode, (), True)
    if mode == "cautious":
        bad = tuple(s for s in p.models if not test(s))
        return EntailmentResult(not bad, mode, bad)
    good = tuple(s for s in p.models if test(s))
    return EntailmentResult(bool(good), mode, good)


# ---------------------------------------------------------------------------
# Justified clashing assumptions


@dataclass(frozen=True)
class JustifiedChi:
    chi: frozenset[ClashingAssumption]
    # (assumption, axiom text, clashing set found in the answer set)
    evidence: tuple[tuple[ClashingAssumption, str, ClashingSet | None], ...] = field(
        default=(), compare=False
    )

    def render(self) -> list[str]:
        out = []
        for c, ax, cs in self.evidence:
            args = ", ".join(map(str, c.args))
            why = "" if cs is None else "  by {" + ", ".join(sorted(map(str, cs.elements))) + "}"
            out.append(f"override: {ax} @ {args}{why}")
        return out


def _in_set(s: AnswerSet, b: Assertion) -> bool:
    if isinstance(b.pred, Exists):
        return False
    return output_atom(b) in s


def justified_assumptions(k: DKB) -> list[JustifiedChi]:
    p = pipeline(k)
    by_id = p.normal.defeasible_by_id()
    src = k.defeasible_by_id()
    out = []
    for s in p.models:
        ev = []
        for c in sorted(s.chi):
            ax = by_id[c.axiom_id].inner
            found = None
            for cs in minimal_clashing_sets(ax, c.args):
                if all(_in_set(s, b) for b in cs.elements):
                    found = cs
                    break
            text = str(src[c.axiom_id].inner) if c.axiom_id in src else str(ax)
            ev.append((c, text, found))
        out.append(JustifiedChi(s.chi, tuple(ev)))
    return out


# ---------------------------------------------------------------------------
# Conjunctive queries


@dataclass(frozen=True)
class QueryAtom:
    pred: str
    args: tuple[str, ...]  # variables and constants; see ConjunctiveQuery.is_var


@dataclass(frozen=True)
class ConjunctiveQuery:
    answer_vars: tuple[str, ...]
    exist_vars: tuple[str, ...]
    atoms: tuple[QueryAtom, ...]

    def __post_init__(self):
        if set(self.answer_vars) & set(self.exist_vars):
            raise ValueError("answer and existential variables overlap")
        used = {a for at in self.atoms for a in at.args}
        missing = [v for v in (*self.answer_vars, *self.exist_vars) if v not in used]
        if missing:
            raise ValueError(f"variables not used in any atom: {', '.join(missing)}")

    def is_var(self, s: str) -> bool:
        return s in self.answer_vars or s in self.exist_vars

    def __str__(self) -> str:
        body = ", ".join(f"{a.pred}({','.join(a.args)})" for a in self.atoms)
        return f"?({','.join(self.answer_vars)}) :- {body}."


class QuerySyntaxError(ValueError):
    pass


_Q_HEAD = re.compile(r"\s*\?\s*\(([^)]*)\)\s*:-\s*(.*?)\s*\.?\s*\Z", re.S)
_Q_ATOM = re.compile(r"\s*([A-Za-z_][A-Za-z0-9_]*)\s*\(([^)]*)\)\s*(?:,|\Z)")
_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def parse_query(text: str, individuals: Iterable[str] | None = None) -> ConjunctiveQuery:
    """Parse ``?(x) :- A(x), R(x,y).``.

    Arguments that are declared individuals (or quoted with '') are
    constants; every other name is a variable.  Variables in the head are
    answer variables, the rest are existential."""
    m = _Q_HEAD.match(text)
    if not m:
        raise QuerySyntaxError("expected `?(vars) :- atom, ... .`")
    inds = set(individuals or ())
    head = [v.strip() for v in m.group(1).split(",") if v.strip()]
    body = m.group(2)
    atoms = []
    pos = 0
    while pos < len(body):
        am = _Q_ATOM.match(body, pos)
        if not am:
            raise QuerySyntaxError(f"cannot read query atom at `{body[pos:]}`")
        args = tuple(a.strip() for a in am.group(2).split(","))
        if not 1 <= len(args) <= 2:
            raise QuerySyntaxError(f"atom {am.group(1)} must have one or two arguments")
        for a in args:
            if not (_NAME.match(a) or (a.startswith("'") and a.endswith("'") and len(a) > 2)):
                raise QuerySyntaxError(f"bad argument `{a}`")
        atoms.append(QueryAtom(am.group(1), args))
        pos = am.end()
    if not atoms:
        raise QuerySyntaxError("query needs at least one atom")
    for v in head:
        if not _NAME.match(v):
            raise QuerySyntaxError(f"bad answer variable `{v}`")
        if v in inds:
            raise QuerySyntaxError(f"answer variable `{v}` clashes with an individual")
    names = []
    for at in atoms:
        for a in at.args:
            if a.startswith("'") or a in inds or a in head:
                continue
            if a not in names:
                names.append(a)
    atoms = [QueryAtom(at.pred, tuple(a.strip("'") if a.startswith("'") else a for a in at.args)) for at in atoms]
    return ConjunctiveQuery(tuple(head), tuple(names), tuple(atoms))


def _matches(q: ConjunctiveQuery, facts: Iterable[Assertion], fixed: dict[str, object]) -> list[dict]:
    concepts: dict[str, set] = {}
    roles: dict[str, set] = {}
    for f in facts:
        if not f.positive or not isinstance(f.pred, str):
            continue
        if f.is_concept:
            concepts.setdefault(f.pred, set()).add(f.args[0])
        else:
            roles.setdefault(f.pred, set()).add(f.args)
    atoms = list(q.atoms)
    out: list[dict] = []

    def val(a, env):
        if q.is_var(a):
            return env.get(a)
        return a

    def go(i: int, env: dict) -> None:
        if i == len(atoms):
            out.append(dict(env))
            return
        # pick the remaining atom with most bound arguments
        rest = atoms[i:]
        best = max(range(len(rest)), key=lambda j: sum(val(x, env) is not None for x in rest[j].args))
        atoms[i], atoms[i + best] = atoms[i + best], atoms[i]
        at = atoms[i]
        if len(at.args) == 1:
            cand = [(t,) for t in concepts.get(at.pred, ())]
        else:
            cand = list(roles.get(at.pred, ()))
        for tup in cand:
            new = dict(env)
            ok = True
            for a, t in zip(at.args, tup):
                cur = val(a, new)
                if cur is None:
                    new[a] = t
                elif cur != t:
                    ok = False
                    break
            if ok:
                go(i + 1, new)
        atoms[i], atoms[i + best] = atoms[i + best], atoms[i]

    go(0, dict(fixed))
    return out


def default_query_depth(k: DKB, q: ConjunctiveQuery) -> int:
    n, _ = normalize(k)
    n_ex = sum(1 for ax in n.strict if getattr(ax, "rhs", None) is not None and isinstance(ax.rhs, Exists))
    return len(q.atoms) + n_ex


def certain_answers(k: DKB, q: ConjunctiveQuery, skolem_depth: int | None = None) -> set[tuple[str, ...]]:
    p = pipeline(k)
    v = p.source.vocab
    for at in q.atoms:
        kinds = v.concepts if len(at.args) == 1 else v.roles
        if at.pred not in kinds:
            raise ReasoningError(f"undeclared {'concept' if len(at.args) == 1 else 'role'} `{at.pred}`")
        for a in at.args:
            if not q.is_var(a) and a not in v.individuals:
                raise ReasoningError(f"undeclared individual `{a}`")
    depth = default_query_depth(k, q) if skolem_depth is None else skolem_depth
    cb = p.report.chain_bound
    if cb == UNBOUNDED or cb > depth:
        warnings.warn(
            f"chain bound {cb} exceeds query depth {depth}; answers may be incomplete",
            stacklevel=2,
        )
    inds = tuple(v.individuals)
    if not p.models:
        # strict part unsatisfiable: every tuple is a certain answer
        return set(itertools.product(inds, repeat=len(q.answer_vars)))
    result: set[tuple[str, ...]] | None = None
    for s in p.models:
        m = least_cas_model(p.normal, s.chi, depth)
        found = set()
        for env in _matches(q, m.positive(), {}):
            tup = tuple(env[x] for x in q.answer_vars)
            if all(isinstance(t, str) and not isinstance(t, App) for t in tup):
                found.add(tup)
        result = found if result is None else result & found
        if not result:
            break
    return result or set()
