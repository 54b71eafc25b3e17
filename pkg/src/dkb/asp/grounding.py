"""Relevance grounding of Datalog programs with strong and default negation.

Instances are generated by a semi-naive fixpoint over the *possible*
literals: a rule instance is kept when every positive body literal is
derivable from the facts while ignoring default negation.  A ``not l``
whose ``l`` never becomes possible is always true and is dropped.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from ..dlprog import AuxConst, Const, DAtom, DLiteral, DProgram, DRule, Var
from .kernels import Kernel

# literal key: (strong_neg, pred, args as constant ids)
LitKey = tuple[bool, str, tuple[int, ...]]


class GroundingError(ValueError):
    pass


@dataclass
class _Relation:
    tuples: list[tuple[int, ...]] = field(default_factory=list)
    seen: set[tuple[int, ...]] = field(default_factory=set)
    indexes: dict[tuple[int, ...], dict[tuple[int, ...], list[tuple[int, ...]]]] = field(
        default_factory=dict
    )

    def add(self, t: tuple[int, ...]) -> bool:
        if t in self.seen:
            return False
        self.seen.add(t)
        self.tuples.append(t)
        for pos, idx in self.indexes.items():
            idx.setdefault(tuple(t[p] for p in pos), []).append(t)
        return True

    def lookup(self, pos: tuple[int, ...], key: tuple[int, ...]) -> Sequence[tuple[int, ...]]:
        if not pos:
            return self.tuples
        idx = self.indexes.get(pos)
        if idx is None:
            idx = {}
            for t in self.tuples:
                idx.setdefault(tuple(t[p] for p in pos), []).append(t)
            self.indexes[pos] = idx
        return idx.get(key, ())


# Compiled literal: relation key, and per argument either ("c", const id) or ("v", var slot)
@dataclass(frozen=True)
class _CLit:
    rel: tuple[bool, str, int]
    args: tuple[tuple[str, int], ...]


@dataclass(frozen=True)
class _Step:
    lit: int
    bound_pos: tuple[int, ...]  # argument positions known before the lookup
    bound_src: tuple[tuple[str, int], ...]
    bind: tuple[tuple[int, int], ...]  # (arg position, var slot) newly bound
    check: tuple[tuple[int, int], ...]  # repeated new vars within the literal


@dataclass
class _CRule:
    rule: DRule
    n_vars: int
    head: _CLit
    pos: tuple[_CLit, ...]
    naf: tuple[_CLit, ...]
    plans: tuple[tuple[_Step, ...], ...]  # plan when body literal i is the delta


class GroundProgram:
    """A ground program over integer literal ids.

    ``literals[i]`` is the literal key of id ``i``; ``complement[i]`` is the id
    of its complement or -1 when the complement is not possible.
    """

    def __init__(self, universe, literals, rules, source=None, labels=None):
        self.universe: tuple[object, ...] = tuple(universe)
        self.literals: tuple[LitKey, ...] = tuple(literals)
        self.ids: dict[LitKey, int] = {k: i for i, k in enumerate(self.literals)}
        # rules: (head, pos ids, naf ids)
        self.rule_rows: tuple[tuple[int, tuple[int, ...], tuple[int, ...]], ...] = tuple(rules)
        self.labels = tuple(labels) if labels is not None else ("",) * len(self.rule_rows)
        self.source: DProgram | None = source
        comp = np.full(len(self.literals), -1, dtype=np.int64)
        for i, (neg, pred, args) in enumerate(self.literals):
            j = self.ids.get((not neg, pred, args))
            if j is not None:
                comp[i] = j
        self.complement = comp
        self.ovr_ids: tuple[int, ...] = tuple(
            sorted(
                (i for i, (neg, pred, _) in enumerate(self.literals) if pred == "ovr" and not neg),
                key=lambda i: self.literal_text(i),
            )
        )
        self._kernel: Kernel | None = None
        self._kernel_backend = None

    # -- views -------------------------------------------------------------
    def __len__(self) -> int:
        return len(self.rule_rows)

    def term(self, cid: int):
        return self.universe[cid]

    def to_literal(self, i: int) -> DLiteral:
        neg, pred, args = self.literals[i]
        return DLiteral(DAtom(pred, tuple(self.universe[a] for a in args)), neg)

    def literal_text(self, i: int) -> str:
        return str(self.to_literal(i))

    def lookup(self, lit: DLiteral) -> int | None:
        """Id of a ground literal, or None when it is not possible."""
        try:
            args = tuple(self._cid[t] for t in lit.atom.args)
        except KeyError:
            return None
        return self.ids.get((lit.strong_neg, lit.atom.pred, args))

    @property
    def _cid(self) -> dict[object, int]:
        d = getattr(self, "_cid_cache", None)
        if d is None:
            d = {}
            for i, t in enumerate(self.universe):
                d[t] = i
                # AuxConst and Const with the same name denote the same constant
                d.setdefault(Const(t.name), i)
            self._cid_cache = d
        return d

    @property
    def rules(self) -> tuple[DRule, ...]:
        out = []
        for (h, pos, naf), label in zip(self.rule_rows, self.labels):
            out.append(
                DRule(
                    self.to_literal(h),
                    tuple(self.to_literal(i) for i in pos),
                    tuple(self.to_literal(i) for i in naf),
                    label,
                )
            )
        return tuple(out)

    def kernel(self, use_numba: bool | None = None) -> Kernel:
        if self._kernel is None or (use_numba is not None and use_numba != self._kernel.use_numba):
            heads = np.array([r[0] for r in self.rule_rows], dtype=np.int32)
            body_ptr = np.zeros(len(self.rule_rows) + 1, dtype=np.int32)
            naf_ptr = np.zeros(len(self.rule_rows) + 1, dtype=np.int32)
            body, naf = [], []
            for j, (_, pos, neg) in enumerate(self.rule_rows):
                body.extend(pos)
                naf.extend(neg)
                body_ptr[j + 1] = len(body)
                naf_ptr[j + 1] = len(naf)
            self._kernel = Kernel(
                len(self.literals),
                heads,
                body_ptr,
                np.array(body, dtype=np.int32),
                naf_ptr,
                np.array(naf, dtype=np.int32),
                use_numba=use_numba,
            )
        return self._kernel


def _compile_rule(rule: DRule, const_id) -> _CRule:
    slots: dict[str, int] = {}

    def clit(lit: DLiteral) -> _CLit:
        args = []
        for t in lit.atom.args:
            if isinstance(t, Var):
                args.append(("v", slots.setdefault(t.name, len(slots))))
            else:
                args.append(("c", const_id(t)))
        return _CLit((lit.strong_neg, lit.atom.pred, len(args)), tuple(args))

    pos = tuple(clit(l) for l in rule.body_pos)
    if not rule.is_safe():
        raise GroundingError(f"unsafe rule: {rule}")
    head = clit(rule.head)
    naf = tuple(clit(l) for l in rule.body_naf)

    def plan(first: int) -> tuple[_Step, ...]:
        bound: set[int] = set()
        order = [first]
        rest = [i for i in range(len(pos)) if i != first]
        for v in (s for k, s in pos[first].args if k == "v"):
            bound.add(v)
        while rest:
            # prefer the literal with most bound arguments, then fact-like predicates
            def score(i):
                b = sum(1 for k, s in pos[i].args if k == "c" or s in bound)
                return (-(b / max(1, len(pos[i].args))), -b, i)

            nxt = min(rest, key=score)
            rest.remove(nxt)
            order.append(nxt)
            bound |= {s for k, s in pos[nxt].args if k == "v"}
        steps = []
        bound = set()
        for i in order:
            bp, bs, bind, check = [], [], [], []
            fresh: dict[int, int] = {}
            for p, (k, s) in enumerate(pos[i].args):
                if k == "c" or s in bound:
                    bp.append(p)
                    bs.append((k, s))
                elif s in fresh:
                    check.append((p, fresh[s]))
                else:
                    fresh[s] = p
                    bind.append((p, s))
            bound |= set(fresh)
            steps.append(_Step(i, tuple(bp), tuple(bs), tuple(bind), tuple(check)))
        return tuple(steps)

    plans = tuple(plan(i) for i in range(len(pos)))
    return _CRule(rule, len(slots), head, pos, naf, plans)


def ground(p: DProgram | Iterable[DRule], facts: Iterable[DLiteral] = ()) -> GroundProgram:
    """Relevance-ground a program.  Facts become body-less ground rules."""
    if isinstance(p, DProgram):
        rules, facts, source = tuple(p.rules), tuple(p.facts) + tuple(facts), p
    else:
        rules, facts, source = tuple(p), tuple(facts), None
    ground_facts = [f for f in facts]
    for r in rules:
        if not r.body_pos and not r.body_naf:
            ground_facts.append(r.head)
    rules = tuple(r for r in rules if r.body_pos or r.body_naf)

    universe: list[object] = []
    cids: dict[object, int] = {}

    def const_id(t) -> int:
        key = t.name if isinstance(t, (Const, AuxConst)) else t
        i = cids.get(key)
        if i is None:
            i = cids[key] = len(universe)
            universe.append(t)
        elif isinstance(t, AuxConst) and not isinstance(universe[i], AuxConst):
            universe[i] = t
        return i

    for f in ground_facts:
        if not f.atom.is_ground():
            raise GroundingError(f"non-ground fact: {f}")
        for t in f.atom.args:
            const_id(t)
    compiled = [_compile_rule(r, const_id) for r in rules]
    for cr in compiled:
        if not cr.pos:
            raise GroundingError(f"rule without positive body: {cr.rule}")

    rels: dict[tuple[bool, str, int], _Relation] = {}

    def rel(key) -> _Relation:
        r = rels.get(key)
        if r is None:
            r = rels[key] = _Relation()
        return r

    fact_keys: list[LitKey] = []
    for f in ground_facts:
        args = tuple(const_id(t) for t in f.atom.args)
        if rel((f.strong_neg, f.atom.pred, len(args))).add(args):
            fact_keys.append((f.strong_neg, f.atom.pred, args))

    instances: dict[tuple[int, tuple[int, ...]], None] = {}
    inst_list: list[tuple[int, tuple[int, ...]]] = []
    marks = {k: 0 for k in rels}

    def build(cl: _CLit, env) -> tuple[int, ...]:
        return tuple(s if k == "c" else env[s] for k, s in cl.args)

    def join(ri: int, cr: _CRule, steps, env, depth, out):
        if depth == len(steps):
            b = tuple(env)
            key = (ri, b)
            if key not in instances:
                instances[key] = None
                out.append(key)
            return
        st = steps[depth]
        cl = cr.pos[st.lit]
        key = tuple(s if k == "c" else env[s] for k, s in st.bound_src)
        r = rels.get(cl.rel)
        if r is None:
            return
        for t in r.lookup(st.bound_pos, key):
            ok = True
            for p, q in st.check:
                if t[p] != t[q]:
                    ok = False
                    break
            if not ok:
                continue
            for p, s in st.bind:
                env[s] = t[p]
            join(ri, cr, steps, env, depth + 1, out)

    while True:
        snapshot = {k: len(r.tuples) for k, r in rels.items()}
        new_inst: list[tuple[int, tuple[int, ...]]] = []
        for ri, cr in enumerate(compiled):
            for i, cl in enumerate(cr.pos):
                r = rels.get(cl.rel)
                if r is None:
                    continue
                lo, hi = marks.get(cl.rel, 0), snapshot.get(cl.rel, 0)
                if lo >= hi:
                    continue
                steps = cr.plans[i]
                first = steps[0]
                for t in r.tuples[lo:hi]:
                    env = [0] * cr.n_vars
                    ok = all(
                        t[p] == (s if k == "c" else None)
                        for p, (k, s) in zip(first.bound_pos, first.bound_src)
                    )
                    if not ok:
                        continue
                    if any(t[p] != t[q] for p, q in first.check):
                        continue
                    for p, s in first.bind:
                        env[s] = t[p]
                    join(ri, cr, steps, env, 1, new_inst)
        marks = snapshot
        changed = False
        for ri, b in new_inst:
            cr = compiled[ri]
            h = build(cr.head, b)
            changed |= rel(cr.head.rel).add(h)
        inst_list.extend(new_inst)
        if not changed and all(len(r.tuples) == marks.get(k, 0) for k, r in rels.items()):
            break

    # literal numbering: facts first, then heads in derivation order
    lit_ids: dict[LitKey, int] = {}
    literals: list[LitKey] = []

    def lid(key: LitKey) -> int:
        i = lit_ids.get(key)
        if i is None:
            i = lit_ids[key] = len(literals)
            literals.append(key)
        return i

    rows: list[tuple[int, tuple[int, ...], tuple[int, ...]]] = []
    labels: list[str] = []
    for key in fact_keys:
        rows.append((lid(key), (), ()))
        labels.append("fact")
    for ri, b in inst_list:
        cr = compiled[ri]
        pos = []
        for cl in cr.pos:
            pos.append(lid((cl.rel[0], cl.rel[1], build(cl, b))))
        naf = []
        for cl in cr.naf:
            args = build(cl, b)
            r = rels.get(cl.rel)
            if r is not None and args in r.seen:
                naf.append(lid((cl.rel[0], cl.rel[1], args)))
        head = lid((cr.head.rel[0], cr.head.rel[1], build(cr.head, b)))
        rows.append((head, tuple(dict.fromkeys(pos)), tuple(dict.fromkeys(naf))))
        labels.append(cr.rule.label)
    return GroundProgram(universe, literals, rows, source, labels)
