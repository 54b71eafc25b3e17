"""Compare the numba and numpy least-model kernels.

Two workloads:

* ``lm``: repeated least-model runs on one large ground program, the inner
  loop of answer-set search;
* ``solve``: full answer-set enumeration over a seeded DKB corpus.

Usage: python benchmarks/bench_kernels.py [--individuals 60] [--repeat 20]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from dkb.asp import HAVE_NUMBA, answer_sets, ground
from dkb.dkbtext import parse_dkb
from dkb.dlprog import assemble_program
from dkb.fuzz import corpus
from dkb.normalize import normalize


def scaled_dkb(n: int) -> str:
    """A department with n members, a third of them exceptional."""
    lines = [
        "D: Member [= exists teaches.",
        "Professor [= Member.",
        "Student [= Member.",
        "Student [= not exists teaches.",
        "teaches [= involvedIn.",
        "D: Member [= Staff.",
        "Visitor [= not Staff.",
    ]
    for i in range(n):
        kind = ("Professor", "Student", "Visitor")[i % 3]
        lines.append(f"{kind}(p{i}).")
        if kind == "Visitor":
            lines.append(f"Member(p{i}).")
        if i:
            lines.append(f"involvedIn(p{i - 1}, p{i}).")
    return "\n".join(lines)


def bench_lm(gp, repeat: int, use_numba: bool) -> tuple[float, np.ndarray]:
    k = gp.kernel(use_numba)
    chosen = np.zeros(len(gp.literals), dtype=np.bool_)
    chosen[list(gp.ovr_ids)] = True
    k.least_model(k.active(chosen))  # warm-up, JIT compile
    t = time.perf_counter()
    for _ in range(repeat):
        m = k.least_model(k.active(chosen))
    return (time.perf_counter() - t) / repeat, m


def bench_solve(ks, use_numba: bool) -> tuple[float, list]:
    progs = [ground(assemble_program(normalize(k)[0], check_safety=False)) for k in ks]
    answer_sets(progs[0], use_numba=use_numba)
    t = time.perf_counter()
    out = [[s.ids for s in answer_sets(gp, use_numba=use_numba)] for gp in progs]
    return time.perf_counter() - t, out


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--individuals", type=int, default=60)
    ap.add_argument("--repeat", type=int, default=20)
    ap.add_argument("--corpus", type=int, default=200)
    args = ap.parse_args()
    if not HAVE_NUMBA:
        print("numba is not installed; only the numpy kernel is available")
        return

    gp = ground(assemble_program(normalize(parse_dkb(scaled_dkb(args.individuals)))[0]))
    print(f"ground program: {len(gp.literals)} literals, {len(gp.rule_rows)} rules")
    t_np, m_np = bench_lm(gp, args.repeat, False)
    t_nb, m_nb = bench_lm(gp, args.repeat, True)
    assert np.array_equal(m_np, m_nb)
    print(f"lm     numpy {t_np * 1e3:8.2f} ms   numba {t_nb * 1e3:8.2f} ms   speedup {t_np / t_nb:5.1f}x")

    ks = list(corpus(1, args.corpus))
    s_np, a_np = bench_solve(ks, False)
    s_nb, a_nb = bench_solve(ks, True)
    assert a_np == a_nb
    print(f"solve  numpy {s_np:8.2f} s    numba {s_nb:8.2f} s    speedup {s_np / s_nb:5.1f}x"
          f"   ({len(ks)} DKBs)")


if __name__ == "__main__":
    main()
