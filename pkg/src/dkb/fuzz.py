"""Random small DKBs and the oracle-vs-pipeline differential check."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Iterator

from .dkbtext import serialize_dkb
from .dlprog import COMPLETE, assemble_program, output_atom
from .asp import answer_sets, ground
from .kb import (
    DKB,
    Assertion,
    Atomic,
    ConceptIncl,
    DefeasibleAxiom,
    Dis,
    Exists,
    Inv,
    Irr,
    Not,
    RoleExpr,
    RoleIncl,
    Vocabulary,
)
from .normalize import normalize
from .oracle import default_depth, least_cas_model, holds, oracle_justified_chis
from .safety import check_exception_safe


@dataclass(frozen=True)
class FuzzConfig:
    concepts: int = 3
    roles: int = 2
    individuals: int = 3
    max_axioms: int = 6
    max_assertions: int = 4
    defeasible_ratio: float = 0.4
    negative_assertion_ratio: float = 0.15


CONCEPT_NAMES = ("A", "B", "C", "E")
ROLE_NAMES = ("R", "S", "T")
INDIVIDUAL_NAMES = ("a", "b", "c", "d")


def random_dkb(rng: random.Random, cfg: FuzzConfig = FuzzConfig()) -> DKB:
    cs = CONCEPT_NAMES[: cfg.concepts]
    rs = ROLE_NAMES[: cfg.roles]
    ins = INDIVIDUAL_NAMES[: cfg.individuals]

    def role() -> RoleExpr:
        return RoleExpr(rng.choice(rs), rng.random() < 0.25)

    def basic():
        return Atomic(rng.choice(cs)) if rng.random() < 0.7 else Exists(role())

    def axiom():
        shape = rng.random()
        if shape < 0.55:
            lhs = basic()
            rhs = basic()
            if rng.random() < 0.3:
                rhs = Not(rhs)
            return ConceptIncl(lhs, rhs)
        if shape < 0.75:
            return RoleIncl(role(), role())
        if shape < 0.85:
            return Dis(role(), role())
        if shape < 0.93:
            r, s = rng.sample(rs, 2) if len(rs) > 1 else (rs[0], rs[0])
            return Inv(r, s)
        return Irr(rng.choice(rs))

    strict, defeasible = [], []
    for _ in range(rng.randint(1, cfg.max_axioms)):
        ax = axiom()
        if rng.random() < cfg.defeasible_ratio:
            defeasible.append(DefeasibleAxiom(ax, f"d{len(defeasible) + 1}"))
        else:
            strict.append(ax)
    abox = []
    for _ in range(rng.randint(1, cfg.max_assertions)):
        pos = rng.random() >= cfg.negative_assertion_ratio
        if rng.random() < 0.6:
            abox.append(Assertion(rng.choice(cs), (rng.choice(ins),), pos))
        else:
            abox.append(Assertion(rng.choice(rs), (rng.choice(ins), rng.choice(ins)), pos))
    vocab = Vocabulary(tuple(cs), tuple(rs), tuple(ins))
    return DKB(vocab, tuple(dict.fromkeys(strict)), tuple(defeasible), tuple(dict.fromkeys(abox)))


def corpus(seed: int, count: int, cfg: FuzzConfig = FuzzConfig(), safe_only: bool = True) -> Iterator[DKB]:
    """``count`` seeded DKBs; with ``safe_only`` unsafe draws are skipped."""
    rng = random.Random(seed)
    made = 0
    while made < count:
        k = random_dkb(rng, cfg)
        if safe_only and not check_exception_safe(normalize(k)[0]).exception_safe:
            continue
        made += 1
        yield k


def ground_atoms(k: DKB) -> list[Assertion]:
    """All positive and negative atoms over the vocabulary of k and its individuals."""
    v = k.vocab
    out = []
    for c in v.concepts:
        for a in v.individuals:
            out.append(Assertion(c, (a,)))
    for r in v.roles:
        for a in v.individuals:
            for b in v.individuals:
                out.append(Assertion(r, (a, b)))
    return out + [x.negate() for x in out]


@dataclass
class Mismatch:
    kind: str
    dkb: DKB
    detail: str

    def render(self) -> str:
        return f"[{self.kind}] {self.detail}\n{serialize_dkb(self.dkb)}"


@dataclass
class DiffReport:
    checked: int = 0
    atoms: int = 0
    mismatches: list[Mismatch] = field(default_factory=list)


def differential(k: DKB, identify: bool = True, mode: str = COMPLETE) -> list[Mismatch]:
    """Compare pipeline and oracle on one exception-safe DKB."""
    n, _ = normalize(k)
    prog = assemble_program(n, check_safety=False, mode=mode)
    models = answer_sets(ground(prog))
    pipe = {s.chi for s in models}
    depth = default_depth(n)
    chis = oracle_justified_chis(n, depth, identify=identify)
    orc = set(chis)
    out = []
    if pipe != orc:
        fmt = lambda fam: sorted(sorted(map(str, c)) for c in fam)
        out.append(Mismatch("chi", k, f"pipeline {fmt(pipe)} vs oracle {fmt(orc)}"))
        return out
    lcms = [least_cas_model(n, chi, depth) for chi in chis]
    for q in ground_atoms(n):
        lit = output_atom(q)
        p_ent = all(lit in s for s in models)
        o_ent = all(holds(n, m, q, identify) for m in lcms)
        if p_ent != o_ent:
            out.append(Mismatch("entail", k, f"{q}: pipeline {p_ent}, oracle {o_ent}"))
    return out


def minimize(k: DKB, failing: Callable[[DKB], bool]) -> DKB:
    """Greedily drop statements while ``failing`` stays true."""
    changed = True
    while changed:
        changed = False
        for part in ("strict", "defeasible", "abox"):
            items = list(getattr(k, part))
            for i in range(len(items)):
                cand_items = items[:i] + items[i + 1 :]
                cand = DKB(k.vocab, *(
                    tuple(cand_items) if p == part else getattr(k, p)
                    for p in ("strict", "defeasible", "abox")
                ), k.una)
                try:
                    if not check_exception_safe(normalize(cand)[0]).exception_safe:
                        continue
                    bad = failing(cand)
                except Exception:
                    continue
                if bad:
                    k = cand
                    changed = True
                    break
            if changed:
                break
    return k


def run_fuzz(seed: int, count: int, cfg: FuzzConfig = FuzzConfig(), identify: bool = True,
             check: Callable[[DKB], list[Mismatch]] | None = None, mode: str = COMPLETE) -> DiffReport:
    check = check or (lambda k: differential(k, identify, mode))
    rep = DiffReport()
    for k in corpus(seed, count, cfg):
        rep.checked += 1
        rep.mismatches.extend(check(k))
    return rep
