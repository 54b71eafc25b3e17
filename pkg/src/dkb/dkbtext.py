"""Text format for DKBs (``.dkb`` files).

Statements end with ``.``; ``#`` starts a comment::

    D: DeptMember [= exists hasCourse.      # defeasible inclusion
    PhDStudent [= not exists hasCourse.
    hasAdvisor^- [= supervises.            # role inclusion
    Dis(R, S).  Inv(R, S).  Irr(R).
    Professor(alice).  not hasCourse(bob, c1).
    D: A(a).                                # defeasible assertion
    @no-una.

Declaration directives ``@concepts``, ``@roles``, ``@individuals`` and
``@generated`` fix vocabulary order; names are otherwise auto-declared on
first use.  ``D[id]:`` gives a defeasible statement an explicit id.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Union

from .kb import (
    DKB,
    Assertion,
    Atomic,
    Bottom,
    ConceptIncl,
    DefeasibleAxiom,
    Dis,
    Exists,
    Inv,
    Irr,
    Not,
    Ref,
    RoleExpr,
    RoleIncl,
    Vocabulary,
    validate_dkb,
)


@dataclass(frozen=True)
class SourceSpan:
    line: int
    column: int
    length: int = 1

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


@dataclass(frozen=True)
class ParseDiagnostic:
    message: str
    span: SourceSpan | None = None

    def __str__(self) -> str:
        return f"{self.span}: {self.message}" if self.span else self.message


class DKBParseError(ValueError):
    def __init__(self, diagnostics: list[ParseDiagnostic]):
        self.diagnostics = diagnostics
        super().__init__("\n".join(str(d) for d in diagnostics))


_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r\n\f\v]+)
  | (?P<comment>\#[^\n]*)
  | (?P<directive>@[A-Za-z][A-Za-z-]*)
  | (?P<incl>\[=)
  | (?P<inv>\^-)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>[().,:\[\]])
    """,
    re.VERBOSE,
)

KEYWORDS = {"exists", "not", "bottom", "Dis", "Inv", "Irr", "Ref"}
DIRECTIVES = {"@no-una", "@concepts", "@roles", "@individuals", "@generated"}


@dataclass
class _Tok:
    kind: str
    text: str
    span: SourceSpan


def _tokenize(text: str, diags: list[ParseDiagnostic]) -> list[_Tok]:
    toks: list[_Tok] = []
    pos, line, col = 0, 1, 1
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            diags.append(ParseDiagnostic(f"unexpected character {text[pos]!r}", SourceSpan(line, col)))
            chunk = text[pos]
            pos += 1
        else:
            chunk = m.group()
            kind = m.lastgroup
            if kind not in ("ws", "comment"):
                toks.append(_Tok(kind, chunk, SourceSpan(line, col, len(chunk))))
            pos = m.end()
        nl = chunk.count("\n")
        if nl:
            line += nl
            col = len(chunk) - chunk.rfind("\n")
        else:
            col += len(chunk)
    return toks


class _Syntax(Exception):
    def __init__(self, msg: str, span: SourceSpan | None):
        self.diag = ParseDiagnostic(msg, span)


# Parsed statement before name kinds are resolved. Ambiguous inclusions
# between two bare names are kept as ("incl?", lhs, rhs).
@dataclass
class _Raw:
    defeasible: bool
    explicit_id: str | None
    body: tuple
    span: SourceSpan


class _Parser:
    def __init__(self, toks: list[_Tok]):
        self.toks = toks
        self.i = 0

    def peek(self, k: int = 0) -> _Tok | None:
        j = self.i + k
        return self.toks[j] if j < len(self.toks) else None

    def span(self) -> SourceSpan | None:
        t = self.peek()
        if t is not None:
            return t.span
        return self.toks[-1].span if self.toks else None

    def next(self) -> _Tok:
        t = self.peek()
        if t is None:
            raise _Syntax("unexpected end of input", self.span())
        self.i += 1
        return t

    def expect(self, text: str) -> _Tok:
        t = self.next()
        if t.text != text:
            raise _Syntax(f"expected `{text}`, found `{t.text}`", t.span)
        return t

    def name(self) -> _Tok:
        t = self.next()
        if t.kind != "name" or t.text in KEYWORDS:
            raise _Syntax(f"expected a name, found `{t.text}`", t.span)
        return t

    def at(self, text: str, k: int = 0) -> bool:
        t = self.peek(k)
        return t is not None and t.text == text

    def skip_statement(self) -> None:
        while self.peek() is not None and not self.at("."):
            self.i += 1
        if self.at("."):
            self.i += 1

    # role := NAME ['^-']
    def role(self) -> tuple:
        t = self.name()
        inv = False
        if self.peek() is not None and self.peek().kind == "inv":
            self.next()
            inv = True
        return ("role", t.text, inv, t.span)

    def left(self) -> tuple:
        if self.at("exists"):
            self.next()
            return ("exists", self.role())
        t = self.peek()
        if t is not None and t.kind == "name" and t.text not in KEYWORDS:
            r = self.role()
            return r if r[2] else ("name", r[1], r[3])
        raise _Syntax("expected a concept or role", self.span())

    def right(self) -> tuple:
        if self.at("not"):
            self.next()
            inner = self.left()
            if inner[0] == "role":
                raise _Syntax("`not` applies to concepts only", inner[3])
            return ("not", inner)
        if self.at("bottom"):
            self.next()
            return ("bottom",)
        return self.left()

    def statement(self) -> _Raw | tuple:
        start = self.span()
        t = self.peek()
        if t.kind == "directive":
            return self.directive()
        defeasible, explicit_id = False, None
        if self.at("D") and (self.at(":", 1) or self.at("[", 1)):
            self.next()
            defeasible = True
            if self.at("["):
                self.next()
                explicit_id = self.name().text
                self.expect("]")
            self.expect(":")
        body = self.body()
        self.expect(".")
        return _Raw(defeasible, explicit_id, body, start)

    def directive(self) -> tuple:
        t = self.next()
        if t.text not in DIRECTIVES:
            raise _Syntax(f"unknown directive `{t.text}`", t.span)
        if t.text == "@no-una":
            if self.at("."):
                self.next()
            return ("@no-una",)
        names = []
        if not self.at("."):
            names.append(self.name())
            while self.at(","):
                self.next()
                names.append(self.name())
        self.expect(".")
        return (t.text, names)

    def body(self) -> tuple:
        t = self.peek()
        if t is None:
            raise _Syntax("unexpected end of input", self.span())
        if t.text in ("Dis", "Inv", "Irr", "Ref") and self.at("(", 1):
            kw = self.next().text
            self.expect("(")
            if kw == "Dis":
                a = self.role()
                self.expect(",")
                b = self.role()
                self.expect(")")
                return ("Dis", a, b)
            if kw == "Inv":
                a = self.role()
                self.expect(",")
                b = self.role()
                self.expect(")")
                for r in (a, b):
                    if r[2]:
                        raise _Syntax("Inv(...) takes role names, not inverse roles", r[3])
                return ("Inv", a, b)
            a = self.role()
            self.expect(")")
            if a[2]:
                raise _Syntax(f"{kw}(...) takes a role name, not an inverse role", a[3])
            return (kw, a)
        negated = False
        if self.at("not"):
            self.next()
            negated = True
            t = self.peek()
            if t is None:
                raise _Syntax("unexpected end of input", self.span())
        if t.kind == "name" and t.text not in KEYWORDS and self.at("(", 1):
            pred = self.name()
            self.expect("(")
            args = [self.name()]
            if self.at(","):
                self.next()
                args.append(self.name())
            self.expect(")")
            return ("assert", pred, args, not negated)
        if negated:
            raise _Syntax("`not` must start an assertion here", t.span)
        lhs = self.left()
        self.expect("[=")
        rhs = self.right()
        return ("incl", lhs, rhs)


class _Names:
    """Tracks name kinds and first-use order while resolving."""

    def __init__(self) -> None:
        self.first: dict[str, int] = {}
        self.kind: dict[str, str] = {}
        self.declared: dict[str, str] = {}
        self.errors: list[ParseDiagnostic] = []
        self.counter = 0

    def see(self, name: str) -> None:
        if name not in self.first:
            self.first[name] = self.counter
            self.counter += 1

    def mark(self, name: str, kind: str, span: SourceSpan | None) -> None:
        self.see(name)
        old = self.kind.get(name)
        if old is None:
            self.kind[name] = kind
        elif old != kind:
            self.errors.append(ParseDiagnostic(f"`{name}` used as both {old} and {kind}", span))

    def ordered(self, kind: str) -> tuple[str, ...]:
        return tuple(sorted((n for n, k in self.kind.items() if k == kind), key=self.first.__getitem__))


def _collect_kinds(raws: list, names: _Names) -> None:
    """First pass: mark names whose kind is fixed by their position."""

    def role(r: tuple) -> None:
        names.mark(r[1], "role", r[3])

    def concept_side(c: tuple) -> None:
        tag = c[0]
        if tag == "exists":
            role(c[1])
        elif tag == "role":
            role(c)
        elif tag == "not":
            concept_side(c[1])
            if c[1][0] == "name":
                names.mark(c[1][1], "concept", c[1][2])
        elif tag == "name":
            names.see(c[1])

    for raw in raws:
        if isinstance(raw, tuple):
            kind_map = {"@concepts": "concept", "@roles": "role", "@individuals": "individual"}
            if raw[0] in kind_map:
                for t in raw[1]:
                    names.mark(t.text, kind_map[raw[0]], t.span)
            elif raw[0] == "@generated":
                for t in raw[1]:
                    names.see(t.text)
            continue
        b = raw.body
        if b[0] == "assert":
            _, pred, args, _pos = b
            names.mark(pred.text, "concept" if len(args) == 1 else "role", pred.span)
            for a in args:
                names.mark(a.text, "individual", a.span)
        elif b[0] in ("Dis", "Inv"):
            role(b[1])
            role(b[2])
        elif b[0] in ("Irr", "Ref"):
            role(b[1])
        elif b[0] == "incl":
            _, lhs, rhs = b
            concept_side(lhs)
            if rhs[0] != "bottom":
                concept_side(rhs)
            if lhs[0] == "exists" or rhs[0] in ("exists", "not", "bottom"):
                for side in (lhs, rhs):
                    if side[0] == "name":
                        names.mark(side[1], "concept", side[2])
            if lhs[0] == "role" or rhs[0] == "role":
                for side in (lhs, rhs):
                    if side[0] == "name":
                        names.mark(side[1], "role", side[2])


def _resolve_ambiguous(raws: list, names: _Names) -> None:
    # Inclusions between two bare names take their kind from each other;
    # iterate since role-ness can travel along chains R [= S, S [= T.
    changed = True
    while changed:
        changed = False
        for raw in raws:
            if isinstance(raw, tuple) or raw.body[0] != "incl":
                continue
            _, lhs, rhs = raw.body
            if lhs[0] != "name" or rhs[0] != "name":
                continue
            kl, kr = names.kind.get(lhs[1]), names.kind.get(rhs[1])
            if kl is None and kr is not None:
                names.mark(lhs[1], kr, lhs[2])
                changed = True
            elif kr is None and kl is not None:
                names.mark(rhs[1], kl, rhs[2])
                changed = True
    for raw in raws:
        if isinstance(raw, tuple) or raw.body[0] != "incl":
            continue
        for side in raw.body[1:]:
            if side[0] == "name" and side[1] not in names.kind:
                names.mark(side[1], "concept", side[2])


def _build(raw: _Raw, names: _Names):
    b = raw.body

    def role(r: tuple) -> RoleExpr:
        return RoleExpr(r[1], r[2])

    def concept(c: tuple):
        if c[0] == "name":
            return Atomic(c[1])
        if c[0] == "exists":
            return Exists(role(c[1]))
        if c[0] == "not":
            return Not(concept(c[1]))
        if c[0] == "bottom":
            return Bottom()
        raise _Syntax("expected a concept", c[3] if c[0] == "role" else raw.span)

    if b[0] == "assert":
        _, pred, args, pos = b
        return Assertion(pred.text, tuple(a.text for a in args), pos)
    if b[0] == "Dis":
        return Dis(role(b[1]), role(b[2]))
    if b[0] == "Inv":
        return Inv(b[1][1], b[2][1])
    if b[0] == "Irr":
        return Irr(b[1][1])
    if b[0] == "Ref":
        return Ref(b[1][1])
    _, lhs, rhs = b
    is_role = lambda s: s[0] == "role" or (s[0] == "name" and names.kind.get(s[1]) == "role")
    if is_role(lhs) or is_role(rhs):
        if not (is_role(lhs) and is_role(rhs)):
            raise _Syntax("role inclusion mixes a role with a concept", raw.span)
        sub = lhs if lhs[0] == "role" else ("role", lhs[1], False, lhs[2])
        sup = rhs if rhs[0] == "role" else ("role", rhs[1], False, rhs[2])
        return RoleIncl(role(sub), role(sup))
    return ConceptIncl(concept(lhs), concept(rhs))


def parse_dkb(text: Union[str, bytes]) -> DKB:
    """Parse and validate. Raises DKBParseError with diagnostics."""
    diags: list[ParseDiagnostic] = []
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as e:
            raise DKBParseError([ParseDiagnostic(f"input is not UTF-8: {e.reason}")]) from None
    toks = _tokenize(text, diags)
    p = _Parser(toks)
    raws: list = []
    while p.peek() is not None:
        try:
            raws.append(p.statement())
        except _Syntax as e:
            diags.append(e.diag)
            p.skip_statement()

    names = _Names()
    _collect_kinds(raws, names)
    _resolve_ambiguous(raws, names)
    diags.extend(names.errors)

    una = True
    generated: set[str] = set()
    strict, defeasible, abox = [], [], []
    used_ids: set[str] = set()
    n_def = 0
    for raw in raws:
        if isinstance(raw, tuple):
            if raw[0] == "@no-una":
                una = False
            elif raw[0] == "@generated":
                generated.update(t.text for t in raw[1])
            continue
        try:
            st = _build(raw, names)
        except _Syntax as e:
            diags.append(e.diag)
            continue
        if raw.defeasible:
            n_def += 1
            ident = raw.explicit_id or f"d{n_def}"
            if ident in used_ids:
                diags.append(ParseDiagnostic(f"duplicate defeasible id `{ident}`", raw.span))
                continue
            used_ids.add(ident)
            defeasible.append(DefeasibleAxiom(st, ident))
        elif isinstance(st, Assertion):
            abox.append(st)
        else:
            strict.append(st)

    if diags:
        raise DKBParseError(diags)
    vocab = Vocabulary(
        names.ordered("concept"),
        names.ordered("role"),
        names.ordered("individual"),
        frozenset(generated),
    )
    k = DKB(vocab, tuple(strict), tuple(defeasible), tuple(abox), una)
    report = validate_dkb(k)
    if not report.ok:
        raise DKBParseError([ParseDiagnostic(str(d)) for d in report.errors])
    return k


# ---------------------------------------------------------------------------
# Serialization

HEADER = "# dkb\n"


def format_statement(st) -> str:
    return str(st)


def serialize_dkb(k: DKB) -> str:
    lines = [HEADER.rstrip("\n")]
    if not k.una:
        lines.append("@no-una.")
    for directive, names in (
        ("@concepts", k.vocab.concepts),
        ("@roles", k.vocab.roles),
        ("@individuals", k.vocab.individuals),
        ("@generated", tuple(sorted(k.vocab.generated))),
    ):
        if names:
            lines.append(f"{directive} {', '.join(names)}.")
    for ax in k.strict:
        lines.append(f"{ax}.")
    for n, d in enumerate(k.defeasible, start=1):
        prefix = "D:" if d.id == f"d{n}" else f"D[{d.id}]:"
        lines.append(f"{prefix} {d.inner}.")
    for a in k.abox:
        lines.append(f"{a}.")
    return "\n".join(lines) + "\n"


_ASSERTION = re.compile(
    r"\s*(not\s+)?(exists\s+)?([A-Za-z_][A-Za-z0-9_]*)(\^-)?\s*"
    r"\(\s*([A-Za-z_][A-Za-z0-9_]*)\s*(?:,\s*([A-Za-z_][A-Za-z0-9_]*)\s*)?\)\s*\.?\s*\Z"
)


def parse_assertion(text: str) -> Assertion:
    """Read one ground literal: ``A(a)``, ``not R(a, b)``, ``exists R(a)``,
    ``not exists R^-(a)``."""
    m = _ASSERTION.match(text)
    if not m:
        raise DKBParseError([ParseDiagnostic(f"cannot read assertion `{text.strip()}`")])
    neg, ex, pred, inv, a, b = m.groups()
    if ex:
        if b is not None:
            raise DKBParseError([ParseDiagnostic("an existential assertion takes one argument")])
        return Assertion(Exists(RoleExpr(pred, bool(inv))), (a,), not neg)
    if inv:
        if b is None:
            raise DKBParseError([ParseDiagnostic("an inverse role needs two arguments")])
        return Assertion(pred, (b, a), not neg)
    if pred in KEYWORDS:
        raise DKBParseError([ParseDiagnostic(f"`{pred}` is a keyword")])
    return Assertion(pred, (a,) if b is None else (a, b), not neg)
