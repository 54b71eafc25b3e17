"""Command-line front end: ``dkb check|compile|models|entail|query|fuzz``.

Exit codes: 0 success, 1 refused (not exception-safe) or fuzz mismatch,
2 invalid input or usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from . import __version__
from .dkbtext import DKBParseError, parse_assertion, parse_dkb, serialize_dkb
from .dlprog import COMPLETE, MODES, ProgramError, assemble_program, emit_text
from .kb import DKB
from .normalize import normalize
from .reason import (
    QuerySyntaxError,
    ReasoningError,
    certain_answers,
    entails,
    justified_assumptions,
    parse_query,
    pipeline,
)
from .safety import classify

EXIT_OK = 0
EXIT_REFUSED = 1
EXIT_INVALID = 2


@dataclass(frozen=True)
class CliConfig:
    command: str
    inputs: tuple[str, ...] = ()
    fmt: str = "text"
    depth: int | None = None
    limit: int | None = None
    seed: int = 1
    count: int = 100


class _Fail(Exception):
    def __init__(self, code: int, payload: dict, text: str):
        super().__init__(text)
        self.code = code
        self.payload = payload
        self.text = text


def pretty(text: str) -> str:
    """Render the ASCII DKB syntax with logical symbols."""
    return (
        text.replace(" [= ", " ⊑ ")
        .replace("not exists ", "¬∃")
        .replace("exists ", "∃")
        .replace("not ", "¬")
        .replace("^-", "⁻")
    )


def _load(path: str) -> DKB:
    try:
        data = Path(path).read_bytes() if path != "-" else sys.stdin.buffer.read()
    except OSError as e:
        raise _Fail(EXIT_INVALID, {"error": str(e)}, f"error: {e}") from None
    try:
        return parse_dkb(data)
    except DKBParseError as e:
        diags = [str(d) for d in e.diagnostics]
        raise _Fail(
            EXIT_INVALID,
            {"error": "invalid DKB", "diagnostics": diags},
            "\n".join(f"{path}:{d}" for d in diags),
        ) from None


def _refuse(e: ReasoningError) -> _Fail:
    payload = {"error": str(e)}
    text = f"refused: {e}"
    if e.report is not None:
        payload["safety"] = e.report.to_dict()
        text += "\n" + e.report.render()
    code = EXIT_REFUSED if e.report is not None else EXIT_INVALID
    return _Fail(code, payload, text)


# ---------------------------------------------------------------------------
# Commands


def cmd_check(args) -> tuple[int, dict, str]:
    k = _load(args.file)
    n, trace = normalize(k)
    report = classify(n)
    payload = {"valid": True, **report.to_dict(), "introduced_symbols": list(trace.introduced_symbols)}
    text = report.render()
    if args.verbose:
        text += "\n" + trace.explain()
    return (EXIT_OK if report.exception_safe else EXIT_REFUSED), payload, text


def cmd_compile(args) -> tuple[int, dict, str]:
    k = _load(args.file)
    n, _ = normalize(k)
    try:
        prog = assemble_program(n, mode=args.translation)
    except ProgramError as e:
        raise _refuse_program(e) from None
    text = emit_text(prog)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
        return EXIT_OK, {"written": args.output, "rules": len(prog.rules), "facts": len(prog.facts)}, ""
    return EXIT_OK, {"program": text}, text.rstrip("\n")


def _refuse_program(e: ProgramError) -> _Fail:
    payload = {"error": str(e)}
    text = f"refused: {e}"
    if e.report is not None:
        payload["safety"] = e.report.to_dict()
        text += "\n" + e.report.render()
    return _Fail(EXIT_REFUSED, payload, text)


def _abox_view(s, k: DKB) -> list[str]:
    """Named-individual literals over the input vocabulary, ∃R for _ex_R."""
    from .normalize import ex_concept

    v = k.vocab
    ex_names = {ex_concept(r): r for r in v.roles}
    inds = set(v.individuals)
    out = []
    for lit in s.literals:
        a = lit.atom
        if a.pred not in ("instd", "tripled"):
            continue
        names = [t.name for t in a.args]
        sign = "¬" if lit.strong_neg else ""
        if a.pred == "instd":
            x, c = names
            if x not in inds:
                continue
            if c in v.concepts:
                out.append(f"{sign}{c}({x})")
            elif c in ex_names:
                out.append(f"{sign}∃{ex_names[c]}({x})")
        else:
            x, r, y = names
            if x in inds and y in inds and r in v.roles:
                out.append(f"{sign}{r}({x}, {y})")
    return sorted(out)


def cmd_models(args) -> tuple[int, dict, str]:
    k = _load(args.file)
    try:
        p = pipeline(k)
        chis = justified_assumptions(k)
    except ReasoningError as e:
        raise _refuse(e) from None
    models = p.models if args.limit is None else p.models[: args.limit]
    if not p.models:
        return EXIT_OK, {"satisfiable": False, "models": []}, "UNSATISFIABLE (strict)"
    lines = [f"{len(p.models)} model(s)"]
    out = []
    for i, (s, j) in enumerate(zip(models, chis), start=1):
        lines.append(f"model {i}:")
        overrides = [pretty(x) for x in j.render()]
        lines += [f"  {x}" for x in overrides] or ["  (no overrides)"]
        view = _abox_view(s, k)
        lines.append("  " + ", ".join(view))
        out.append({
            "chi": [{"axiom": c.axiom_id, "args": list(c.args)} for c in sorted(j.chi)],
            "overrides": j.render(),
            "abox": view,
        })
    return EXIT_OK, {"satisfiable": True, "count": len(p.models), "models": out}, "\n".join(lines)


def cmd_entail(args) -> tuple[int, dict, str]:
    k = _load(args.file)
    try:
        q = parse_assertion(args.assertion)
    except DKBParseError as e:
        raise _Fail(EXIT_INVALID, {"error": str(e)}, f"error: {e}") from None
    try:
        res = entails(k, q, args.mode)
    except ReasoningError as e:
        raise _refuse(e) from None
    verdict = "yes" if res.verdict else "no"
    text = f"{pretty(str(q))}: {verdict} ({res.mode})"
    if res.unsatisfiable:
        text = "UNSATISFIABLE (strict): entailment is vacuous\n" + text
    payload = {"assertion": str(q), "mode": res.mode, "verdict": res.verdict,
               "unsatisfiable": res.unsatisfiable, "witnesses": len(res.witnesses)}
    return EXIT_OK, payload, text


def cmd_query(args) -> tuple[int, dict, str]:
    k = _load(args.file)
    try:
        q = parse_query(args.query, k.vocab.individuals)
    except (QuerySyntaxError, ValueError) as e:
        raise _Fail(EXIT_INVALID, {"error": str(e)}, f"error: {e}") from None
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            ans = certain_answers(k, q, args.depth)
        except ReasoningError as e:
            raise _refuse(e) from None
    rows = sorted(ans)
    notes = [str(w.message) for w in caught]
    p = pipeline(k)
    lines = []
    if not p.models:
        lines.append("UNSATISFIABLE (strict): every tuple is a certain answer")
    lines += [f"warning: {n}" for n in notes]
    if not q.answer_vars:
        lines.append("true" if rows else "false")
    else:
        lines.append(f"{len(rows)} answer(s)")
        lines += ["  (" + ", ".join(r) + ")" for r in rows]
    payload = {"query": str(q), "answers": [list(r) for r in rows], "warnings": notes}
    return EXIT_OK, payload, "\n".join(lines)


def cmd_fuzz(args) -> tuple[int, dict, str]:
    from .fuzz import corpus, differential, minimize

    checked = 0
    bad = []
    for k in corpus(args.seed, args.count):
        checked += 1
        ms = differential(k, mode=args.translation)
        if ms:
            bad.append((k, ms))
    if not bad:
        return EXIT_OK, {"checked": checked, "mismatches": 0}, f"{checked} DKBs checked, 0 mismatches"
    k, ms = bad[0]
    small = minimize(k, lambda c: bool(differential(c, mode=args.translation)))
    detail = differential(small, mode=args.translation)
    text = [f"{checked} DKBs checked, {len(bad)} with mismatches", "minimized counterexample:"]
    text.append(serialize_dkb(small).rstrip("\n"))
    text += [f"  {m.kind}: {m.detail}" for m in detail]
    payload = {
        "checked": checked,
        "mismatches": len(bad),
        "counterexample": serialize_dkb(small),
        "details": [{"kind": m.kind, "detail": m.detail} for m in detail],
    }
    return EXIT_REFUSED, payload, "\n".join(text)


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dkb", description="Defeasible DL-Lite_R reasoning via datalog.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("--format", choices=("text", "json"), default="text", dest="fmt")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default=argparse.SUPPRESS, dest="fmt")
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", parents=[common], help="validate, normalize and classify safety")
    c.add_argument("file")
    c.add_argument("-v", "--verbose", action="store_true", help="print the normalization trace")

    c = sub.add_parser("compile", parents=[common], help="emit the datalog program")
    c.add_argument("file")
    c.add_argument("-o", "--output")
    c.add_argument("--translation", choices=MODES, default=COMPLETE)

    c = sub.add_parser("models", parents=[common], help="list answer sets with their overrides")
    c.add_argument("file")
    c.add_argument("--limit", type=int)

    c = sub.add_parser("entail", parents=[common], help="decide an assertion")
    c.add_argument("file")
    c.add_argument("assertion")
    c.add_argument("--mode", choices=("cautious", "brave"), default="cautious")

    c = sub.add_parser("query", parents=[common], help="certain answers of a conjunctive query")
    c.add_argument("file")
    c.add_argument("query")
    c.add_argument("--depth", type=int)

    c = sub.add_parser("fuzz", parents=[common], help="differential test: oracle vs pipeline")
    c.add_argument("--seed", type=int, default=1)
    c.add_argument("--count", type=int, default=100)
    c.add_argument("--translation", choices=MODES, default=COMPLETE)
    return ap


COMMANDS = {
    "check": cmd_check,
    "compile": cmd_compile,
    "models": cmd_models,
    "entail": cmd_entail,
    "query": cmd_query,
    "fuzz": cmd_fuzz,
}


def config_of(args: argparse.Namespace) -> CliConfig:
    inputs = tuple(x for x in (getattr(args, "file", None),) if x)
    return CliConfig(
        args.command, inputs, args.fmt, getattr(args, "depth", None),
        getattr(args, "limit", None), getattr(args, "seed", 1), getattr(args, "count", 100),
    )


def main(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_INVALID if e.code not in (0, None) else EXIT_OK
    config_of(args)
    if getattr(args, "limit", None) is not None and args.limit < 0:
        ap.error("--limit must be non-negative")
    if getattr(args, "count", None) is not None and args.count < 0:
        print("error: --count must be non-negative", file=sys.stderr)
        return EXIT_INVALID
    try:
        code, payload, text = COMMANDS[args.command](args)
    except _Fail as f:
        code, payload, text = f.code, f.payload, f.text
    if args.fmt == "json":
        doc = {"command": args.command, "exit": code, **payload}
        print(json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False))
    elif text:
        stream = sys.stdout if code == EXIT_OK or args.command in ("check", "fuzz") else sys.stderr
        print(text, file=stream)
    return code


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
