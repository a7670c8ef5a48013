"""Text front-end for problems, formulas and signed atoms.

Problem files are line-oriented; ``#`` starts a comment.  Each line is one of

    nom <ident>                  declare a nominal
    lang km|kmnot                fix the language (default: inferred)
    frame irr|imm-pred           request a frame condition
    rel(<relation>, a, b)        positive relational assertion
    ~rel(<relation>, a, b)       negative relational assertion
    @<label> <formula>           labelled assertion
    <formula>                    bare assertion, gets a fresh root constant

Formula grammar: ``~`` binds tightest, then ``[rel]`` / ``<rel>``, then
``&``, then ``|``; the binary connectives are left-associative.  Relations
are identifiers with any number of ``-`` prefixes.  Conjunction and diamond
are sugar and are eliminated while parsing, so ASTs only ever contain
negation, disjunction and box.

Labelled lines absorb one top-level ``~`` into the atom polarity: ``@b ~p``
asserts that p is false at b.  Bare formula lines do not (they assert the
written formula, negations and all, at a fresh constant).
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .syntax import (
    KM,
    KMNOT,
    DConst,
    Equal,
    FBox,
    FNot,
    FOr,
    Formula,
    HoldsF,
    HoldsR,
    IMMEDIATE_PREDECESSOR,
    IRREFLEXIVE,
    Nom,
    ProblemSpec,
    Prop,
    RelConst,
    Relation,
    RelNot,
    SignedAtom,
    SkF,
    SkG,
    DomainTerm,
    encode_labelled,
    fand,
    fdia,
    neg,
    pos,
    validate_problem,
)

RESERVED = {"nom", "lang", "frame", "rel"}

_TOKEN_RE = re.compile(
    r"""(?P<ws>\s+)
      | (?P<ident>[a-z_][A-Za-z0-9_]*)
      | (?P<punct>[~|&\[\]<>()@,\-])
    """,
    re.VERBOSE,
)


class ParseError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, column {col}: {message}")
        self.line = line
        self.col = col


@dataclass
class _Token:
    kind: str  # "ident" | punctuation itself | "end"
    text: str
    line: int
    col: int


def _tokenize(text: str, line: int) -> list[_Token]:
    tokens: list[_Token] = []
    i = 0
    while i < len(text):
        if text[i] == "#":
            break
        m = _TOKEN_RE.match(text, i)
        if not m:
            raise ParseError(f"unexpected character {text[i]!r}", line, i + 1)
        if m.lastgroup == "ident":
            tokens.append(_Token("ident", m.group(), line, i + 1))
        elif m.lastgroup == "punct":
            tokens.append(_Token(m.group(), m.group(), line, i + 1))
        i = m.end()
    tokens.append(_Token("end", "", line, len(text) + 1))
    return tokens


class _Parser:
    """Recursive-descent parser over one line of tokens."""

    def __init__(self, tokens: list[_Token], nominals: frozenset[str]):
        self.tokens = tokens
        self.pos = 0
        self.nominals = nominals

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        if tok.kind != "end":
            self.pos += 1
        return tok

    def expect(self, kind: str) -> _Token:
        tok = self.next()
        if tok.kind != kind:
            what = "identifier" if kind == "ident" else repr(kind)
            raise self.error(f"expected {what}", tok)
        return tok

    def error(self, message: str, tok: _Token | None = None) -> ParseError:
        tok = tok or self.peek()
        got = f", got {tok.text!r}" if tok.kind != "end" else ", got end of line"
        return ParseError(message + got, tok.line, tok.col)

    def at_end(self) -> bool:
        return self.peek().kind == "end"

    def finish(self) -> None:
        if not self.at_end():
            raise self.error("expected end of line")

    # grammar -------------------------------------------------------------

    def relation(self) -> Relation:
        if self.peek().kind == "-":
            self.next()
            return RelNot(self.relation())
        tok = self.expect("ident")
        if tok.text in RESERVED:
            raise self.error(f"{tok.text!r} is a reserved word", tok)
        return RelConst(tok.text)

    def formula(self) -> Formula:
        left = self.conjunction()
        while self.peek().kind == "|":
            self.next()
            left = FOr(left, self.conjunction())
        return left

    def conjunction(self) -> Formula:
        left = self.unary()
        while self.peek().kind == "&":
            self.next()
            left = fand(left, self.unary())
        return left

    def unary(self) -> Formula:
        tok = self.peek()
        if tok.kind == "~":
            self.next()
            return FNot(self.unary())
        if tok.kind == "[":
            self.next()
            rel = self.relation()
            self.expect("]")
            return FBox(rel, self.unary())
        if tok.kind == "<":
            self.next()
            rel = self.relation()
            self.expect(">")
            return fdia(rel, self.unary())
        if tok.kind == "(":
            self.next()
            inner = self.formula()
            self.expect(")")
            return inner
        if tok.kind == "ident":
            self.next()
            if tok.text in RESERVED:
                raise self.error(f"{tok.text!r} is a reserved word", tok)
            if tok.text in self.nominals:
                return Nom(tok.text)
            return Prop(tok.text)
        raise self.error("expected a formula")

    def label(self) -> str:
        tok = self.expect("ident")
        if tok.text in RESERVED:
            raise self.error(f"{tok.text!r} is a reserved word", tok)
        return tok.text


def parse_formula(text: str, nominals: frozenset[str] = frozenset()) -> Formula:
    parser = _Parser(_tokenize(text, 1), nominals)
    fml = parser.formula()
    parser.finish()
    return fml


def parse_problem(text: str) -> ProblemSpec:
    """Parse a problem document into a validated ProblemSpec."""
    lines = text.splitlines()
    # First pass: directives, so declarations work file-wide and fresh root
    # constants can avoid every mentioned label.
    nominals: set[str] = set()
    language: str | None = None
    frames: set[str] = set()
    used_labels: set[str] = set()
    parsed: list[tuple[int, list[_Token]]] = []
    for lineno, raw in enumerate(lines, start=1):
        tokens = _tokenize(raw, lineno)
        if tokens[0].kind == "end":
            continue
        head = tokens[0]
        if head.kind == "ident" and head.text == "nom":
            p = _Parser(tokens, frozenset())
            p.next()
            nominals.add(p.label())
            p.finish()
            continue
        if head.kind == "ident" and head.text == "lang":
            p = _Parser(tokens, frozenset())
            p.next()
            tok = p.expect("ident")
            if tok.text not in (KM, KMNOT):
                raise ParseError(
                    f"expected 'km' or 'kmnot', got {tok.text!r}", tok.line, tok.col
                )
            if language is not None and language != tok.text:
                raise ParseError("conflicting lang directives", tok.line, tok.col)
            language = tok.text
            p.finish()
            continue
        if head.kind == "ident" and head.text == "frame":
            p = _Parser(tokens, frozenset())
            p.next()
            tok = p.expect("ident")
            name = tok.text
            # allow the hyphenated spelling imm-pred
            while p.peek().kind == "-":
                p.next()
                name += "-" + p.expect("ident").text
            if name not in (IRREFLEXIVE, IMMEDIATE_PREDECESSOR):
                raise ParseError(
                    f"unknown frame condition {name!r} "
                    f"(expected 'irr' or 'imm-pred')",
                    tok.line,
                    tok.col,
                )
            frames.add(name)
            p.finish()
            continue
        parsed.append((lineno, tokens))
        for i, tok in enumerate(tokens):
            if tok.kind == "ident" and tok.text not in RESERVED:
                prev = tokens[i - 1] if i > 0 else None
                if prev is not None and prev.kind in ("@", ","):
                    used_labels.add(tok.text)

    used_labels |= nominals  # nominals become labels when encoded
    assertions: list[SignedAtom] = []
    fresh_counter = 0

    def fresh_label() -> str:
        nonlocal fresh_counter
        while True:
            name = f"a{fresh_counter}"
            fresh_counter += 1
            if name not in used_labels:
                used_labels.add(name)
                return name

    for lineno, tokens in parsed:
        p = _Parser(tokens, frozenset(nominals))
        head = p.peek()
        if head.kind == "@":
            p.next()
            label = p.label()
            fml = p.formula()
            p.finish()
            try:
                assertions.append(encode_labelled(label, fml))
            except ValueError as exc:
                raise ParseError(str(exc), head.line, head.col) from exc
        elif head.kind in ("~", "ident") and _is_rel_line(tokens):
            positive = True
            if head.kind == "~":
                p.next()
                positive = False
            p.expect("ident")  # the rel keyword
            p.expect("(")
            rel = p.relation()
            p.expect(",")
            src = p.label()
            p.expect(",")
            dst = p.label()
            p.expect(")")
            p.finish()
            payload = HoldsR(rel, DConst(src), DConst(dst))
            assertions.append(pos(payload) if positive else neg(payload))
        else:
            fml = p.formula()
            p.finish()
            assertions.append(pos(HoldsF(fml, DConst(fresh_label()))))

    if language is None:
        language = KMNOT if _mentions_relnot(assertions) else KM
    spec = ProblemSpec(
        assertions=tuple(assertions),
        language=language,
        frame_conditions=frozenset(frames),
    )
    validate_problem(spec)
    return spec


def _is_rel_line(tokens: list[_Token]) -> bool:
    idx = 1 if tokens[0].kind == "~" else 0
    return (
        tokens[idx].kind == "ident"
        and tokens[idx].text == "rel"
        and idx + 1 < len(tokens)
        and tokens[idx + 1].kind == "("
    )


def _mentions_relnot(assertions: list[SignedAtom]) -> bool:
    from .syntax import has_relnot, rel_is_atomic

    for a in assertions:
        if isinstance(a.payload, HoldsF) and has_relnot(a.payload.fml):
            return True
        if isinstance(a.payload, HoldsR) and not rel_is_atomic(a.payload.rel):
            return True
    return False


# ---------------------------------------------------------------------------
# signed-atom syntax (round-trips with render_atom)


def parse_atom(text: str) -> SignedAtom:
    """Parse one signed atom in either fo or labelled syntax."""
    tokens = _tokenize(text, 1)
    p = _Parser(tokens, frozenset())
    if p.peek().kind == "@":
        p.next()
        label = p.label()
        fml = p.formula()
        p.finish()
        return _decode_labelled(label, fml)
    positive = True
    if p.peek().kind == "-":
        p.next()
        positive = False
    tok = p.expect("ident")
    if tok.text == "nu_f":
        p.expect("(")
        fml = p.formula()
        p.expect(",")
        term = _parse_term(p)
        p.expect(")")
        p.finish()
        payload: HoldsF | HoldsR | Equal = HoldsF(fml, term)
    elif tok.text == "nu_r":
        p.expect("(")
        rel = p.relation()
        p.expect(",")
        t1 = _parse_term(p)
        p.expect(",")
        t2 = _parse_term(p)
        p.expect(")")
        p.finish()
        payload = HoldsR(rel, t1, t2)
    elif tok.text == "eq":
        p.expect("(")
        t1 = _parse_term(p)
        p.expect(",")
        t2 = _parse_term(p)
        p.expect(")")
        p.finish()
        payload = Equal(t1, t2)
    else:
        raise p.error("expected 'nu_f', 'nu_r' or 'eq'", tok)
    return SignedAtom(positive, payload)


def _parse_term(p: _Parser) -> DomainTerm:
    tok = p.expect("ident")
    if tok.text == "f" and p.peek().kind == "(":
        p.next()
        rel = p.relation()
        p.expect(",")
        fml = p.formula()
        p.expect(",")
        arg = _parse_term(p)
        p.expect(")")
        return SkF(rel, fml, arg)
    if tok.text == "g" and p.peek().kind == "(":
        p.next()
        rel = p.relation()
        p.expect(",")
        arg = _parse_term(p)
        p.expect(")")
        return SkG(rel, arg)
    if tok.text in RESERVED:
        raise p.error(f"{tok.text!r} is a reserved word", tok)
    return DConst(tok.text)


def _decode_labelled(label: str, fml: Formula) -> SignedAtom:
    """Labelled atom syntax never has declared nominals, so the relational
    patterns are recognized structurally (the renderer only emits them for
    relational atoms)."""
    at = DConst(label)
    if (
        isinstance(fml, FNot)
        and isinstance(fml.inner, FBox)
        and isinstance(fml.inner.inner, FNot)
        and isinstance(fml.inner.inner.inner, (Prop, Nom))
    ):
        return pos(HoldsR(fml.inner.rel, at, DConst(fml.inner.inner.inner.name)))
    if (
        isinstance(fml, FBox)
        and isinstance(fml.inner, FNot)
        and isinstance(fml.inner.inner, (Prop, Nom))
    ):
        return neg(HoldsR(fml.rel, at, DConst(fml.inner.inner.name)))
    if isinstance(fml, FNot):
        return neg(HoldsF(fml.inner, at))
    return pos(HoldsF(fml, at))
