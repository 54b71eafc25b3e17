"""Answer sets of ground programs with strong negation.

Default negation only ever applies to ``ovr`` atoms in translated DKB
programs, so an answer set is fixed by its set ``O`` of true ``ovr`` atoms:
``S`` is an answer set iff ``S = LM(P^O)`` is consistent and its ``ovr``
atoms are exactly ``O``.  The search walks over ``O`` with two monotone
bounds; :func:`answer_sets_bruteforce` and :func:`answer_sets_naive` are
slower references used in tests.

Programs with ``not`` on other predicates are refused unless
``general=True``; then the candidate set is every literal under ``not``
and the same characterisation holds.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np

from ..dlprog import DLiteral, DProgram, ovr_assumption
from ..kb import ClashingAssumption
from .grounding import GroundProgram, ground


@dataclass(frozen=True)
class AnswerSet:
    ids: frozenset[int]
    program: GroundProgram = field(compare=False, repr=False, hash=False)
    chi: frozenset[ClashingAssumption] = frozenset()

    def __contains__(self, lit: DLiteral) -> bool:
        i = self.program.lookup(lit)
        return i is not None and i in self.ids

    def __len__(self) -> int:
        return len(self.ids)

    @property
    def literals(self) -> frozenset[DLiteral]:
        return frozenset(self.program.to_literal(i) for i in self.ids)

    def ovr_literals(self) -> list[DLiteral]:
        return [self.program.to_literal(i) for i in self.program.ovr_ids if i in self.ids]

    def text(self) -> list[str]:
        return sorted(self.program.literal_text(i) for i in self.ids)


class UnsupportedProgramError(ValueError):
    """Default negation on a non-``ovr`` literal."""


def _check_class(gp: GroundProgram) -> None:
    ovr = set(gp.ovr_ids)
    for h, _, naf in gp.rule_rows:
        for i in naf:
            if i not in ovr:
                raise UnsupportedProgramError(
                    f"`not {gp.literal_text(i)}` in a rule for {gp.literal_text(h)}: "
                    "default negation is only supported on ovr atoms"
                )


def _as_ground(p) -> GroundProgram:
    return p if isinstance(p, GroundProgram) else ground(p)


def _mask(gp: GroundProgram, ids: Iterable[int]) -> np.ndarray:
    m = np.zeros(len(gp.literals), dtype=np.bool_)
    ids = list(ids)
    if ids:
        m[np.array(ids, dtype=np.int64)] = True
    return m


def consistent(gp: GroundProgram, true: np.ndarray) -> bool:
    comp = gp.complement
    has = comp >= 0
    if not has.any():
        return True
    idx = np.nonzero(true & has)[0]
    return not true[comp[idx]].any()


def least_model_mask(gp: GroundProgram, chosen: Iterable[int] = (), use_numba=None) -> np.ndarray:
    """LM of the reduct of ``gp`` w.r.t. the literal ids in ``chosen``."""
    k = gp.kernel(use_numba)
    return k.least_model(k.active(_mask(gp, chosen)))


def least_model(gp: GroundProgram, chosen: Iterable[int] = (), use_numba=None) -> frozenset[int] | None:
    """Least model of P^chosen as literal ids, or None when it is inconsistent."""
    true = least_model_mask(gp, chosen, use_numba)
    if not consistent(gp, true):
        return None
    return frozenset(np.nonzero(true)[0].tolist())


def reduct(gp: GroundProgram, s: Iterable[int]) -> GroundProgram:
    """Gelfond-Lifschitz reduct: drop rules blocked by ``s``, strip ``not``."""
    s = set(s)
    rows, labels = [], []
    for (h, pos, naf), lab in zip(gp.rule_rows, gp.labels):
        if any(i in s for i in naf):
            continue
        rows.append((h, pos, ()))
        labels.append(lab)
    return GroundProgram(gp.universe, gp.literals, rows, gp.source, labels)


def _candidates(gp: GroundProgram) -> tuple[int, ...]:
    naf = {i for _, _, n in gp.rule_rows for i in n}
    ovr = [i for i in gp.ovr_ids if i in naf]
    other = sorted(naf - set(ovr), key=gp.literal_text)
    return tuple(ovr) + tuple(other)


def _chi(gp: GroundProgram, ids) -> frozenset[ClashingAssumption]:
    p = gp.source
    if p is None or not p.defeasible_index:
        return frozenset()
    out = set()
    for i in gp.ovr_ids:
        if i in ids:
            out.add(ovr_assumption(p, gp.to_literal(i)))
    return frozenset(out)


def _finish(gp: GroundProgram, found: list[frozenset[int]], cands, limit) -> list[AnswerSet]:
    pos = {c: j for j, c in enumerate(cands)}

    def key(s):
        bits = [0] * len(cands)
        for i in s:
            j = pos.get(i)
            if j is not None:
                bits[j] = 1
        return bits

    found = sorted(set(found), key=key)
    if limit is not None:
        found = found[:limit]
    return [AnswerSet(s, gp, _chi(gp, s)) for s in found]


def answer_sets(
    p: DProgram | GroundProgram, limit: int | None = None, use_numba=None, general: bool = False
) -> list[AnswerSet]:
    """All answer sets (at most ``limit``), ordered by their ovr atoms."""
    gp = _as_ground(p)
    if not general:
        _check_class(gp)
    cands = _candidates(gp)
    k = gp.kernel(use_numba)
    n = len(gp.literals)
    comp = gp.complement
    has_comp = comp >= 0
    cand_arr = np.array(cands, dtype=np.int64)
    found: list[frozenset[int]] = []

    def lm(state: np.ndarray) -> np.ndarray:
        chosen = np.zeros(n, dtype=np.bool_)
        if cand_arr.size:
            chosen[cand_arr[state == 1]] = True
        return k.least_model(k.active(chosen))

    def lm_upper(state: np.ndarray) -> np.ndarray:
        chosen = np.zeros(n, dtype=np.bool_)
        if cand_arr.size:
            chosen[cand_arr[state != 0]] = True
        return k.least_model(k.active(chosen))

    def is_consistent(true):
        idx = np.nonzero(true & has_comp)[0]
        return not true[comp[idx]].any()

    # state: 1 in O, 0 out of O, -1 undecided
    def search(state: np.ndarray):
        while True:
            m_max = lm(state)  # fewest blocked rules: the largest model
            d_max = m_max[cand_arr] if cand_arr.size else np.zeros(0, dtype=np.bool_)
            if np.any((state == 1) & ~d_max):
                return
            m_min = lm_upper(state)
            if not is_consistent(m_min):
                return
            d_min = m_min[cand_arr] if cand_arr.size else np.zeros(0, dtype=np.bool_)
            if np.any((state == 0) & d_min):
                return
            und = state == -1
            force_in = und & d_min
            force_out = und & ~d_max
            if not force_in.any() and not force_out.any():
                break
            state = state.copy()
            state[force_in] = 1
            state[force_out] = 0
        und = np.nonzero(state == -1)[0]
        if und.size == 0:
            # m_max == m_min here and both bounds agree with state
            found.append(frozenset(np.nonzero(m_max)[0].tolist()))
            return
        j = und[0]
        s1 = state.copy()
        s1[j] = 1
        search(s1)
        s0 = state.copy()
        s0[j] = 0
        search(s0)

    search(np.full(len(cands), -1, dtype=np.int8))
    return _finish(gp, found, cands, limit)


def is_answer_set(gp: GroundProgram, s: Iterable[int]) -> bool:
    s = frozenset(s)
    m = least_model(reduct(gp, s))
    return m is not None and m == s


def answer_sets_bruteforce(p: DProgram | GroundProgram, max_candidates: int = 20) -> list[AnswerSet]:
    """Try every subset of the ``not``-literals as the guessed set O."""
    gp = _as_ground(p)
    cands = _candidates(gp)
    if len(cands) > max_candidates:
        raise ValueError(f"{len(cands)} candidates exceed the brute-force limit")
    found = []
    for r in range(len(cands) + 1):
        for sub in itertools.combinations(cands, r):
            m = least_model(gp, sub)
            if m is None:
                continue
            if {c for c in cands if c in m} == set(sub):
                found.append(m)
    return _finish(gp, found, cands, None)


def answer_sets_naive(p: DProgram | GroundProgram, max_atoms: int = 20) -> list[AnswerSet]:
    """Definition-level check over every consistent interpretation."""
    gp = _as_ground(p)
    n = len(gp.literals)
    if n > max_atoms:
        raise ValueError(f"{n} literals exceed the naive limit")
    found = []
    for bits in range(1 << n):
        s = frozenset(i for i in range(n) if bits >> i & 1)
        if any(gp.complement[i] in s for i in s):
            continue
        if is_answer_set(gp, s):
            found.append(s)
    return _finish(gp, found, _candidates(gp), None)


def iter_answer_sets(p, limit=None, general: bool = False) -> Iterator[AnswerSet]:
    yield from answer_sets(p, limit, general=general)
