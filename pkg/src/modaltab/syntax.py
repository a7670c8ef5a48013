"""Core syntax: formula/relation/term ASTs, signed atoms, and text rendering.

Two layers of language live here.  The logic language has formulas built from
propositions with negation, disjunction and indexed boxes, and relation
expressions built from relation constants (optionally closed under relation
negation).  The tableau language consists of ground signed atoms over that
logic: nu_f(formula, term), nu_r(relation, term, term) and term equalities,
each carrying a polarity.

Everything is an immutable dataclass; values are hashable and safe to share.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

KM = "km"
KMNOT = "kmnot"

IRREFLEXIVE = "irr"
IMMEDIATE_PREDECESSOR = "imm-pred"

FRAME_CONDITIONS = (IRREFLEXIVE, IMMEDIATE_PREDECESSOR)


# ---------------------------------------------------------------------------
# relations


@dataclass(frozen=True)
class RelConst:
    name: str


@dataclass(frozen=True)
class RelNot:
    inner: "Relation"


Relation = RelConst | RelNot


def rel_constant(rel: Relation) -> RelConst:
    """Strip relation negations down to the underlying constant."""
    while isinstance(rel, RelNot):
        rel = rel.inner
    return rel


def rel_is_atomic(rel: Relation) -> bool:
    return isinstance(rel, RelConst)


# ---------------------------------------------------------------------------
# formulas


@dataclass(frozen=True)
class Prop:
    name: str


@dataclass(frozen=True)
class Nom:
    """A nominal: names a single point.  Only the labelled input surface and
    the labelled rendering use these; engine formulas are nominal-free."""

    name: str


@dataclass(frozen=True)
class FNot:
    inner: "Formula"


@dataclass(frozen=True)
class FOr:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class FBox:
    rel: Relation
    inner: "Formula"


Formula = Prop | Nom | FNot | FOr | FBox


def fand(left: Formula, right: Formula) -> Formula:
    """Conjunction as definitional sugar: a & b == ~(~a | ~b)."""
    return FNot(FOr(FNot(left), FNot(right)))


def fdia(rel: Relation, inner: Formula) -> Formula:
    """Diamond as definitional sugar: <a>f == ~[a]~f."""
    return FNot(FBox(rel, FNot(inner)))


def fsize(fml: Formula) -> int:
    """Number of AST nodes (relation subterms not counted)."""
    if isinstance(fml, (Prop, Nom)):
        return 1
    if isinstance(fml, FNot):
        return 1 + fsize(fml.inner)
    if isinstance(fml, FOr):
        return 1 + fsize(fml.left) + fsize(fml.right)
    return 1 + fsize(fml.inner)


def modal_depth(fml: Formula) -> int:
    if isinstance(fml, (Prop, Nom)):
        return 0
    if isinstance(fml, FNot):
        return modal_depth(fml.inner)
    if isinstance(fml, FOr):
        return max(modal_depth(fml.left), modal_depth(fml.right))
    return 1 + modal_depth(fml.inner)


def fml_is_atomic(fml: Formula) -> bool:
    return isinstance(fml, (Prop, Nom))


def is_negated_atomic(fml: Formula) -> bool:
    return isinstance(fml, FNot) and fml_is_atomic(fml.inner)


def flatten_or(fml: Formula) -> tuple[Formula, ...]:
    """Disjuncts of a (possibly nested) disjunction, in occurrence order."""
    if isinstance(fml, FOr):
        return flatten_or(fml.left) + flatten_or(fml.right)
    return (fml,)


def subformulas(fml: Formula) -> Iterator[Formula]:
    """All subformulas including the formula itself (preorder)."""
    yield fml
    if isinstance(fml, FNot):
        yield from subformulas(fml.inner)
    elif isinstance(fml, FOr):
        yield from subformulas(fml.left)
        yield from subformulas(fml.right)
    elif isinstance(fml, FBox):
        yield from subformulas(fml.inner)


def subformula_closure(
    fmls: Iterable[Formula],
) -> tuple[frozenset[Formula], frozenset[Relation]]:
    """Smallest superset of ``fmls`` closed under immediate subformulas,
    plus all relation expressions occurring in it with their negation-peeled
    suffixes (so ``--r`` contributes ``--r``, ``-r`` and ``r``)."""
    formulas: set[Formula] = set()
    relations: set[Relation] = set()
    stack = list(fmls)
    while stack:
        f = stack.pop()
        if f in formulas:
            continue
        formulas.add(f)
        if isinstance(f, FNot):
            stack.append(f.inner)
        elif isinstance(f, FOr):
            stack.append(f.left)
            stack.append(f.right)
        elif isinstance(f, FBox):
            stack.append(f.inner)
            rel = f.rel
            while True:
                relations.add(rel)
                if isinstance(rel, RelNot):
                    rel = rel.inner
                else:
                    break
    return frozenset(formulas), frozenset(relations)


def props_of(fml: Formula) -> frozenset[str]:
    return frozenset(f.name for f in subformulas(fml) if isinstance(f, Prop))


def has_relnot(fml: Formula) -> bool:
    return any(
        isinstance(f, FBox) and not rel_is_atomic(f.rel) for f in subformulas(fml)
    )


def has_nominal(fml: Formula) -> bool:
    return any(isinstance(f, Nom) for f in subformulas(fml))


# ---------------------------------------------------------------------------
# ground domain terms


@dataclass(frozen=True)
class DConst:
    name: str


@dataclass(frozen=True)
class SkF:
    """Skolem witness f(rel, fml, arg) for a missing successor of arg."""

    rel: Relation
    fml: Formula
    arg: "DomainTerm"


@dataclass(frozen=True)
class SkG:
    """Skolem witness g(rel, arg) for the predecessor of arg."""

    rel: Relation
    arg: "DomainTerm"


DomainTerm = DConst | SkF | SkG


def term_depth(term: DomainTerm) -> int:
    depth = 0
    while not isinstance(term, DConst):
        term = term.arg
        depth += 1
    return depth


def term_arg(term: DomainTerm) -> DomainTerm | None:
    """Immediate subterm of a Skolem term, None for constants."""
    if isinstance(term, DConst):
        return None
    return term.arg


def subterms(term: DomainTerm) -> Iterator[DomainTerm]:
    """The term and, for Skolem terms, the chain of argument subterms."""
    while term is not None:
        yield term
        term = term_arg(term)


# ---------------------------------------------------------------------------
# signed atoms


@dataclass(frozen=True)
class HoldsF:
    fml: Formula
    at: DomainTerm


@dataclass(frozen=True)
class HoldsR:
    rel: Relation
    src: DomainTerm
    dst: DomainTerm


@dataclass(frozen=True)
class Equal:
    lhs: DomainTerm
    rhs: DomainTerm


Payload = HoldsF | HoldsR | Equal


@dataclass(frozen=True)
class SignedAtom:
    positive: bool
    payload: Payload

    def negated(self) -> "SignedAtom":
        return SignedAtom(not self.positive, self.payload)

    def __str__(self) -> str:
        return render_atom(self, "fo")


def pos(payload: Payload) -> SignedAtom:
    return SignedAtom(True, payload)


def neg(payload: Payload) -> SignedAtom:
    return SignedAtom(False, payload)


def atom_terms(atom: SignedAtom) -> tuple[DomainTerm, ...]:
    p = atom.payload
    if isinstance(p, HoldsF):
        return (p.at,)
    if isinstance(p, HoldsR):
        return (p.src, p.dst)
    return (p.lhs, p.rhs)


def atom_is_l_atomic(atom: SignedAtom) -> bool:
    """True when the atom's embedded logic expression is atomic (a
    proposition, nominal or relation constant); equalities always qualify."""
    p = atom.payload
    if isinstance(p, HoldsF):
        return fml_is_atomic(p.fml)
    if isinstance(p, HoldsR):
        return rel_is_atomic(p.rel)
    return True


# ---------------------------------------------------------------------------
# problems


@dataclass(frozen=True)
class ProblemSpec:
    assertions: tuple[SignedAtom, ...]
    language: str = KM
    frame_conditions: frozenset[str] = frozenset()

    def propositions(self) -> tuple[str, ...]:
        names: set[str] = set()
        for a in self.assertions:
            if isinstance(a.payload, HoldsF):
                names |= props_of(a.payload.fml)
        return tuple(sorted(names))

    def relation_constants(self) -> tuple[str, ...]:
        names: set[str] = set()
        for a in self.assertions:
            if isinstance(a.payload, HoldsF):
                _, rels = subformula_closure([a.payload.fml])
                names |= {r.name for r in rels if isinstance(r, RelConst)}
            elif isinstance(a.payload, HoldsR):
                names.add(rel_constant(a.payload.rel).name)
        return tuple(sorted(names))

    def root_constants(self) -> tuple[str, ...]:
        """Constants in first-occurrence order across the assertions."""
        seen: list[str] = []
        for a in self.assertions:
            for t in atom_terms(a):
                if isinstance(t, DConst) and t.name not in seen:
                    seen.append(t.name)
        return tuple(seen)


class LanguageViolation(ValueError):
    """A relation negation (or other construct) outside its language."""


def validate_problem(spec: ProblemSpec) -> None:
    for a in spec.assertions:
        p = a.payload
        if isinstance(p, HoldsF) and has_nominal(p.fml):
            raise LanguageViolation(
                f"nominal left unencoded in assertion {render_atom(a, 'fo')}"
            )
        if spec.language == KM:
            bad = None
            if isinstance(p, HoldsF) and has_relnot(p.fml):
                bad = p.fml
            if isinstance(p, HoldsR) and not rel_is_atomic(p.rel):
                bad = p.rel
            if bad is not None:
                raise LanguageViolation(
                    "relation negation is not part of the km language "
                    f"(in {render_atom(a, 'fo')})"
                )


# ---------------------------------------------------------------------------
# labelled encoding
#
# The labelled surface writes nu_f(f, a) as "@a f" and nu_r(rel, a, b) as
# "@a <rel>b" with b a nominal; its negation "@a [rel]~b" is -nu_r(rel, a, b).


class LabelledEncodingError(ValueError):
    """Nominal used in a position the labelled encoding does not support."""


def encode_labelled(label: str, fml: Formula) -> SignedAtom:
    """Turn a labelled assertion ``@label fml`` into a signed atom.

    The two relational patterns ``~[a]~j`` and ``[a]~j`` (j a nominal) map to
    positive and negative nu_r atoms.  Otherwise one top-level negation is
    absorbed into the polarity and the rest must be nominal-free.
    """
    at = DConst(label)
    if (
        isinstance(fml, FNot)
        and isinstance(fml.inner, FBox)
        and isinstance(fml.inner.inner, FNot)
        and isinstance(fml.inner.inner.inner, Nom)
    ):
        return pos(HoldsR(fml.inner.rel, at, DConst(fml.inner.inner.inner.name)))
    if (
        isinstance(fml, FBox)
        and isinstance(fml.inner, FNot)
        and isinstance(fml.inner.inner, Nom)
    ):
        return neg(HoldsR(fml.rel, at, DConst(fml.inner.inner.name)))
    if isinstance(fml, FNot) and not has_nominal(fml.inner):
        return neg(HoldsF(fml.inner, at))
    if not has_nominal(fml):
        return pos(HoldsF(fml, at))
    raise LabelledEncodingError(
        f"nominal in unsupported position: @{label} {render_formula(fml)}"
    )


def in_labelled_image(atom: SignedAtom) -> bool:
    """Whether the atom is expressible on the labelled surface such that
    parsing the rendering gives the atom back."""
    p = atom.payload
    if isinstance(p, HoldsR):
        return isinstance(p.src, DConst) and isinstance(p.dst, DConst)
    if not isinstance(p, HoldsF) or not isinstance(p.at, DConst):
        return False
    if has_nominal(p.fml):
        return False
    # [a]~x renders identically to the negative nu_r surface, so atoms with
    # that shape must go through fo syntax instead.
    if (
        isinstance(p.fml, FBox)
        and isinstance(p.fml.inner, FNot)
        and isinstance(p.fml.inner.inner, (Prop, Nom))
    ):
        return False
    if atom.positive:
        # "@a ~f" always reads back with negative polarity.
        return not isinstance(p.fml, FNot)
    return True


# ---------------------------------------------------------------------------
# rendering
#
# Text grammar (one assertion per line): ~ binds tightest, then [] and <>,
# then &, then | (both left-associative).


def render_relation(rel: Relation) -> str:
    if isinstance(rel, RelConst):
        return rel.name
    return "-" + render_relation(rel.inner)


def _render_unary_operand(fml: Formula) -> str:
    if isinstance(fml, FOr):
        return "(" + render_formula(fml) + ")"
    return render_formula(fml)


def render_formula(fml: Formula) -> str:
    if isinstance(fml, (Prop, Nom)):
        return fml.name
    if isinstance(fml, FNot):
        return "~" + _render_unary_operand(fml.inner)
    if isinstance(fml, FBox):
        return "[" + render_relation(fml.rel) + "]" + _render_unary_operand(fml.inner)
    left = render_formula(fml.left)
    right = fml.right
    right_text = (
        "(" + render_formula(right) + ")"
        if isinstance(right, FOr)
        else render_formula(right)
    )
    return left + " | " + right_text


def render_term(term: DomainTerm) -> str:
    if isinstance(term, DConst):
        return term.name
    if isinstance(term, SkF):
        return (
            "f("
            + render_relation(term.rel)
            + ", "
            + render_formula(term.fml)
            + ", "
            + render_term(term.arg)
            + ")"
        )
    return "g(" + render_relation(term.rel) + ", " + render_term(term.arg) + ")"


def render_atom(atom: SignedAtom, style: str = "fo") -> str:
    """Render a signed atom.  ``fo`` is total; ``labelled`` covers the
    labelled image and falls back to fo with a marker outside it."""
    if style == "labelled":
        if in_labelled_image(atom):
            p = atom.payload
            if isinstance(p, HoldsR):
                if atom.positive:
                    return (
                        f"@{p.src.name} <{render_relation(p.rel)}>{p.dst.name}"
                    )
                return f"@{p.src.name} [{render_relation(p.rel)}]~{p.dst.name}"
            assert isinstance(p, HoldsF) and isinstance(p.at, DConst)
            if atom.positive:
                return f"@{p.at.name} {render_formula(p.fml)}"
            return f"@{p.at.name} ~{_render_unary_operand(p.fml)}"
        return "fo: " + render_atom(atom, "fo")
    if style != "fo":
        raise ValueError(f"unknown render style: {style!r}")
    sign = "" if atom.positive else "-"
    p = atom.payload
    if isinstance(p, HoldsF):
        return f"{sign}nu_f({render_formula(p.fml)}, {render_term(p.at)})"
    if isinstance(p, HoldsR):
        return (
            f"{sign}nu_r({render_relation(p.rel)}, "
            f"{render_term(p.src)}, {render_term(p.dst)})"
        )
    return f"{sign}eq({render_term(p.lhs)}, {render_term(p.rhs)})"


def atom_sort_key(atom: SignedAtom) -> str:
    """Canonical ordering key used wherever determinism matters."""
    return render_atom(atom, "fo")
