"""Least-model kernels over integer-encoded ground positive programs.

A ground program is stored as CSR arrays: rule ``r`` has head ``head[r]``
and body literals ``body_idx[body_ptr[r]:body_ptr[r+1]]``.  ``occ_ptr`` /
``occ_idx`` invert the body relation (literal -> rules using it).

The numba kernel is a counter-based unit propagation; the numpy kernel
iterates a vectorized immediate-consequence step.  Set
``DKB_NO_NUMBA=1`` to force the numpy path.  Without an explicit choice,
programs below ``NUMBA_MIN_RULES`` use numpy: on them a cold JIT compile
costs more than the kernel ever saves.
"""

from __future__ import annotations

import os

import numpy as np

try:  # numba is optional at runtime
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        return wrap if not (args and callable(args[0])) else args[0]


NUMBA_MIN_RULES = 2000


def numba_enabled() -> bool:
    flag = os.environ.get("DKB_NO_NUMBA", "").strip().lower()
    return HAVE_NUMBA and flag not in ("1", "true", "yes", "on")


@njit(cache=True)
def _active_numba(n_rules, naf_ptr, naf_idx, chosen):
    active = np.ones(n_rules, dtype=np.bool_)
    for r in range(n_rules):
        for j in range(naf_ptr[r], naf_ptr[r + 1]):
            if chosen[naf_idx[j]]:
                active[r] = False
                break
    return active


@njit(cache=True)
def _least_model_numba(n_lits, head, body_ptr, occ_ptr, occ_idx, active):
    n_rules = head.shape[0]
    missing = np.empty(n_rules, dtype=np.int32)
    true = np.zeros(n_lits, dtype=np.bool_)
    stack = np.empty(n_rules + 1, dtype=np.int32)
    top = 0
    for r in range(n_rules):
        missing[r] = body_ptr[r + 1] - body_ptr[r]
        if missing[r] == 0 and active[r]:
            stack[top] = head[r]
            top += 1
    while top > 0:
        top -= 1
        lit = stack[top]
        if true[lit]:
            continue
        true[lit] = True
        for j in range(occ_ptr[lit], occ_ptr[lit + 1]):
            r = occ_idx[j]
            missing[r] -= 1
            if missing[r] == 0 and active[r] and not true[head[r]]:
                stack[top] = head[r]
                top += 1
    return true


def _active_numpy(n_rules, naf_owner, naf_idx, chosen):
    blocked = np.bincount(naf_owner, weights=chosen[naf_idx], minlength=n_rules)
    return blocked == 0


def _least_model_numpy(n_lits, head, body_owner, body_idx, body_len, active):
    n_rules = head.shape[0]
    true = np.zeros(n_lits, dtype=np.bool_)
    while True:
        sat = np.bincount(body_owner, weights=true[body_idx], minlength=n_rules)
        fire = active & (sat == body_len)
        heads = head[fire]
        new = heads[~true[heads]]
        if new.size == 0:
            return true
        true[new] = True


class Kernel:
    """Precomputed arrays for one ground program plus the chosen backend."""

    def __init__(self, n_lits, head, body_ptr, body_idx, naf_ptr, naf_idx, use_numba=None):
        self.n_lits = int(n_lits)
        self.head = np.ascontiguousarray(head, dtype=np.int32)
        self.body_ptr = np.ascontiguousarray(body_ptr, dtype=np.int32)
        self.body_idx = np.ascontiguousarray(body_idx, dtype=np.int32)
        self.naf_ptr = np.ascontiguousarray(naf_ptr, dtype=np.int32)
        self.naf_idx = np.ascontiguousarray(naf_idx, dtype=np.int32)
        n_rules = self.head.shape[0]
        if use_numba is None:
            use_numba = numba_enabled() and n_rules >= NUMBA_MIN_RULES
        self.use_numba = bool(use_numba and HAVE_NUMBA)
        self.n_rules = n_rules
        body_len = np.diff(self.body_ptr)
        self.body_len = body_len
        self.body_owner = np.repeat(np.arange(n_rules, dtype=np.int32), body_len)
        self.naf_owner = np.repeat(np.arange(n_rules, dtype=np.int32), np.diff(self.naf_ptr))
        # literal -> rules whose body contains it
        order = np.argsort(self.body_idx, kind="stable")
        self.occ_idx = np.ascontiguousarray(self.body_owner[order], dtype=np.int32)
        counts = np.bincount(self.body_idx, minlength=self.n_lits)
        self.occ_ptr = np.zeros(self.n_lits + 1, dtype=np.int32)
        np.cumsum(counts, out=self.occ_ptr[1:])

    def active(self, chosen: np.ndarray) -> np.ndarray:
        """Rules surviving the reduct w.r.t. the literals marked in ``chosen``."""
        if self.use_numba:
            return _active_numba(self.n_rules, self.naf_ptr, self.naf_idx, chosen)
        return _active_numpy(self.n_rules, self.naf_owner, self.naf_idx, chosen)

    def least_model(self, active: np.ndarray) -> np.ndarray:
        if self.use_numba:
            return _least_model_numba(
                self.n_lits, self.head, self.body_ptr, self.occ_ptr, self.occ_idx, active
            )
        return _least_model_numpy(
            self.n_lits, self.head, self.body_owner, self.body_idx, self.body_len, active
        )
