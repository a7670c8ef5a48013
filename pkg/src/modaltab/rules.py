"""Tableau rules as data: schema patterns, matching, instantiation.

A rule is a numerator (premise patterns) over zero or more denominators
(conclusion patterns); no denominators means a closure rule.  Patterns reuse
the formula/atom constructors from :mod:`modaltab.syntax` with schema
variables at the leaves: ``FVar`` (formula sort), ``RVar`` (relation sort),
``DVar`` (domain sort), plus Skolem-term patterns and a flattened
disjunction pattern for clause-oriented rules.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Callable, Iterable, Iterator

from modaltab.models import atoms_signature, branch_atoms
from modaltab.syntax import (
    DConst,
    DomainTerm,
    Equal,
    FBox,
    FNot,
    FOr,
    HoldsF,
    HoldsR,
    Nom,
    Prop,
    RelConst,
    RelNot,
    SignedAtom,
    SkF,
    SkG,
    atom_sort_key,
    atom_terms,
    flatten_or,
    fml_is_atomic,
    is_negated_atomic,
    rel_is_atomic,
    render_formula,
    render_relation,
    render_term,
    subterms,
    term_depth,
)


class RuleError(ValueError):
    """Malformed rule, pattern, or instantiation request."""


# ---------------------------------------------------------------------------
# pattern leaves and side conditions


@dataclass(frozen=True)
class FVar:
    name: str


@dataclass(frozen=True)
class RVar:
    name: str


@dataclass(frozen=True)
class DVar:
    name: str


@dataclass(frozen=True)
class PSkF:
    """Pattern for an f-Skolem term; fields are patterns themselves."""

    rel: object
    fml: object
    arg: object


@dataclass(frozen=True)
class PSkG:
    rel: object
    arg: object


@dataclass(frozen=True)
class ClauseShape:
    """Disjunction pattern matched modulo flattening: exactly ``m`` negated
    atomic literals and ``n`` other literals, bound in occurrence order."""

    negatives: tuple[FVar, ...]
    positives: tuple[FVar, ...]


@dataclass(frozen=True)
class OrShape:
    """Disjunction pattern matched modulo flattening with no literal
    classification: exactly ``k`` disjuncts, bound in occurrence order."""

    parts: tuple[FVar, ...]


@dataclass(frozen=True)
class AtomicOnly:
    var: object


@dataclass(frozen=True)
class NotNegAtomic:
    var: object


SchemaVar = FVar | RVar | DVar


def pattern_vars(obj) -> Iterator[SchemaVar]:
    """Schema variables in a pattern object, in traversal order."""
    if isinstance(obj, (FVar, RVar, DVar)):
        yield obj
    elif isinstance(obj, SignedAtom):
        yield from pattern_vars(obj.payload)
    elif isinstance(obj, HoldsF):
        yield from pattern_vars(obj.fml)
        yield from pattern_vars(obj.at)
    elif isinstance(obj, HoldsR):
        yield from pattern_vars(obj.rel)
        yield from pattern_vars(obj.src)
        yield from pattern_vars(obj.dst)
    elif isinstance(obj, Equal):
        yield from pattern_vars(obj.lhs)
        yield from pattern_vars(obj.rhs)
    elif isinstance(obj, (FNot, RelNot)):
        yield from pattern_vars(obj.inner)
    elif isinstance(obj, FOr):
        yield from pattern_vars(obj.left)
        yield from pattern_vars(obj.right)
    elif isinstance(obj, FBox):
        yield from pattern_vars(obj.rel)
        yield from pattern_vars(obj.inner)
    elif isinstance(obj, PSkF):
        yield from pattern_vars(obj.rel)
        yield from pattern_vars(obj.fml)
        yield from pattern_vars(obj.arg)
    elif isinstance(obj, PSkG):
        yield from pattern_vars(obj.rel)
        yield from pattern_vars(obj.arg)
    elif isinstance(obj, ClauseShape):
        yield from obj.negatives
        yield from obj.positives
    elif isinstance(obj, OrShape):
        yield from obj.parts


# ---------------------------------------------------------------------------
# rule


@dataclass(frozen=True)
class Rule:
    id: str
    numerator: frozenset
    denominators: tuple[frozenset, ...]
    side_conditions: frozenset = frozenset()

    @property
    def is_closure(self) -> bool:
        return not self.denominators

    def variables(self) -> frozenset:
        out = set()
        for atom in self.numerator:
            out.update(pattern_vars(atom))
        for denom in self.denominators:
            for atom in denom:
                out.update(pattern_vars(atom))
        return frozenset(out)

    def numerator_variables(self) -> frozenset:
        out = set()
        for atom in self.numerator:
            out.update(pattern_vars(atom))
        return frozenset(out)

    def free_variables(self) -> frozenset:
        """Variables occurring in denominators only."""
        return self.variables() - self.numerator_variables()


# ---------------------------------------------------------------------------
# rendering patterns (fo text syntax with bare variable names)


def render_pattern_relation(rel) -> str:
    if isinstance(rel, RVar):
        return rel.name
    if isinstance(rel, RelConst):
        return rel.name
    if isinstance(rel, RelNot):
        return "-" + render_pattern_relation(rel.inner)
    raise RuleError(f"not a relation pattern: {rel!r}")


def _pwrap(fml) -> str:
    text = render_pattern_formula(fml)
    if isinstance(fml, (FOr, ClauseShape, OrShape)):
        return "(" + text + ")"
    return text


def render_pattern_formula(fml) -> str:
    if isinstance(fml, (FVar, Prop, Nom)):
        return fml.name
    if isinstance(fml, FNot):
        return "~" + _pwrap(fml.inner)
    if isinstance(fml, FBox):
        return "[" + render_pattern_relation(fml.rel) + "]" + _pwrap(fml.inner)
    if isinstance(fml, FOr):
        right = (
            "(" + render_pattern_formula(fml.right) + ")"
            if isinstance(fml.right, (FOr, ClauseShape, OrShape))
            else render_pattern_formula(fml.right)
        )
        return render_pattern_formula(fml.left) + " | " + right
    if isinstance(fml, ClauseShape):
        parts = ["~" + p.name for p in fml.negatives] + [q.name for q in fml.positives]
        return " | ".join(parts)
    if isinstance(fml, OrShape):
        return " | ".join(p.name for p in fml.parts)
    raise RuleError(f"not a formula pattern: {fml!r}")


def render_pattern_term(term) -> str:
    if isinstance(term, (DVar, DConst)):
        return term.name
    if isinstance(term, (PSkF, SkF)):
        return (
            "f("
            + render_pattern_relation(term.rel)
            + ", "
            + render_pattern_formula(term.fml)
            + ", "
            + render_pattern_term(term.arg)
            + ")"
        )
    if isinstance(term, (PSkG, SkG)):
        return (
            "g(" + render_pattern_relation(term.rel) + ", " + render_pattern_term(term.arg) + ")"
        )
    raise RuleError(f"not a term pattern: {term!r}")


def render_pattern_atom(atom: SignedAtom) -> str:
    sign = "" if atom.positive else "-"
    p = atom.payload
    if isinstance(p, HoldsF):
        return f"{sign}nu_f({render_pattern_formula(p.fml)}, {render_pattern_term(p.at)})"
    if isinstance(p, HoldsR):
        return (
            f"{sign}nu_r({render_pattern_relation(p.rel)}, "
            f"{render_pattern_term(p.src)}, {render_pattern_term(p.dst)})"
        )
    return f"{sign}eq({render_pattern_term(p.lhs)}, {render_pattern_term(p.rhs)})"


def render_side_condition(cond) -> str:
    if isinstance(cond, AtomicOnly):
        return f"atomic-only({cond.var.name})"
    if isinstance(cond, NotNegAtomic):
        return f"not-neg-atomic({cond.var.name})"
    raise RuleError(f"unknown side condition: {cond!r}")


# ---------------------------------------------------------------------------
# substitution


def subst_relation(pat, sub: dict):
    if isinstance(pat, RVar):
        return sub[pat]
    if isinstance(pat, RelConst):
        return pat
    if isinstance(pat, RelNot):
        return RelNot(subst_relation(pat.inner, sub))
    raise RuleError(f"not a relation pattern: {pat!r}")


def subst_formula(pat, sub: dict):
    if isinstance(pat, FVar):
        return sub[pat]
    if isinstance(pat, (Prop, Nom)):
        return pat
    if isinstance(pat, FNot):
        return FNot(subst_formula(pat.inner, sub))
    if isinstance(pat, FOr):
        return FOr(subst_formula(pat.left, sub), subst_formula(pat.right, sub))
    if isinstance(pat, FBox):
        return FBox(subst_relation(pat.rel, sub), subst_formula(pat.inner, sub))
    if isinstance(pat, (ClauseShape, OrShape)):
        if isinstance(pat, ClauseShape):
            lits = [FNot(sub[p]) for p in pat.negatives] + [sub[q] for q in pat.positives]
        else:
            lits = [sub[p] for p in pat.parts]
        out = lits[0]
        for lit in lits[1:]:
            out = FOr(out, lit)
        return out
    raise RuleError(f"not a formula pattern: {pat!r}")


def subst_term(pat, sub: dict):
    if isinstance(pat, DVar):
        return sub[pat]
    if isinstance(pat, DConst):
        return pat
    if isinstance(pat, (PSkF, SkF)):
        return SkF(
            subst_relation(pat.rel, sub),
            subst_formula(pat.fml, sub),
            subst_term(pat.arg, sub),
        )
    if isinstance(pat, (PSkG, SkG)):
        return SkG(subst_relation(pat.rel, sub), subst_term(pat.arg, sub))
    raise RuleError(f"not a term pattern: {pat!r}")


def subst_atom(pat: SignedAtom, sub: dict) -> SignedAtom:
    p = pat.payload
    if isinstance(p, HoldsF):
        payload = HoldsF(subst_formula(p.fml, sub), subst_term(p.at, sub))
    elif isinstance(p, HoldsR):
        payload = HoldsR(
            subst_relation(p.rel, sub), subst_term(p.src, sub), subst_term(p.dst, sub)
        )
    else:
        payload = Equal(subst_term(p.lhs, sub), subst_term(p.rhs, sub))
    return SignedAtom(pat.positive, payload)


# ---------------------------------------------------------------------------
# branch protocol (duck-typed; plain iterables of atoms work for tests)


def _branch_same(branch) -> Callable:
    fn = getattr(branch, "same_class", None)
    return fn if fn is not None else (lambda a, b: a == b)


def _branch_members(branch) -> Callable:
    fn = getattr(branch, "class_members", None)
    return fn if fn is not None else (lambda t: (t,))


def term_key(term: DomainTerm) -> tuple[int, str]:
    return (term_depth(term), render_term(term))


def _branch_terms(branch) -> tuple[DomainTerm, ...]:
    fn = getattr(branch, "term_set", None)
    if fn is not None:
        terms = set(fn())
    else:
        terms = set()
        for atom in branch_atoms(branch):
            for top in atom_terms(atom):
                terms.update(subterms(top))
    return tuple(sorted(terms, key=term_key))


def _branch_relation_names(branch) -> tuple[str, ...]:
    fn = getattr(branch, "relation_names", None)
    if fn is not None:
        return tuple(sorted(fn()))
    _, rels = atoms_signature(branch_atoms(branch))
    return tuple(sorted(rels))


def _equality_pairs(branch) -> list[tuple[DomainTerm, DomainTerm]]:
    """Term pairs known equal: the congruence when the branch has one,
    stored positive equations otherwise, plus reflexive pairs."""
    fn = getattr(branch, "equal_pairs", None)
    if fn is not None:
        pairs = list(fn())
    else:
        pairs = []
        for atom in branch_atoms(branch):
            if atom.positive and isinstance(atom.payload, Equal):
                pairs.append((atom.payload.lhs, atom.payload.rhs))
                pairs.append((atom.payload.rhs, atom.payload.lhs))
    pairs.extend((t, t) for t in _branch_terms(branch))
    return pairs


# ---------------------------------------------------------------------------
# matching


class _Ctx:
    __slots__ = ("same", "members", "side_ok")

    def __init__(self, same, members, side_ok):
        self.same = same
        self.members = members
        self.side_ok = side_ok


def _side_checker(rule: Rule) -> Callable:
    atomic_only = frozenset(
        c.var for c in rule.side_conditions if isinstance(c, AtomicOnly)
    )
    not_neg = frozenset(
        c.var for c in rule.side_conditions if isinstance(c, NotNegAtomic)
    )

    def ok(var, value) -> bool:
        if var in atomic_only:
            if isinstance(var, FVar) and not fml_is_atomic(value):
                return False
            if isinstance(var, RVar) and not rel_is_atomic(value):
                return False
        if var in not_neg and isinstance(var, FVar) and is_negated_atomic(value):
            return False
        return True

    return ok


_FORMULA_TYPES = (Prop, Nom, FNot, FOr, FBox)
_RELATION_TYPES = (RelConst, RelNot)
_TERM_TYPES = (DConst, SkF, SkG)


def _bind(ctx: _Ctx, var, value, sub: dict) -> list[dict]:
    if isinstance(var, FVar) and not isinstance(value, _FORMULA_TYPES):
        return []
    if isinstance(var, RVar) and not isinstance(value, _RELATION_TYPES):
        return []
    if isinstance(var, DVar) and not isinstance(value, _TERM_TYPES):
        return []
    if not ctx.side_ok(var, value):
        return []
    bound = sub.get(var)
    if bound is not None:
        if isinstance(var, DVar):
            return [sub] if ctx.same(bound, value) else []
        return [sub] if bound == value else []
    new = dict(sub)
    new[var] = value
    return [new]


def match_relation(ctx: _Ctx, pat, rel, sub: dict) -> list[dict]:
    if isinstance(pat, RVar):
        return _bind(ctx, pat, rel, sub)
    if isinstance(pat, RelConst):
        return [sub] if pat == rel else []
    if isinstance(pat, RelNot):
        if isinstance(rel, RelNot):
            return match_relation(ctx, pat.inner, rel.inner, sub)
        return []
    raise RuleError(f"not a relation pattern: {pat!r}")


def match_formula(ctx: _Ctx, pat, fml, sub: dict) -> list[dict]:
    if isinstance(pat, FVar):
        return _bind(ctx, pat, fml, sub)
    if isinstance(pat, (Prop, Nom)):
        return [sub] if pat == fml else []
    if isinstance(pat, FNot):
        if isinstance(fml, FNot):
            return match_formula(ctx, pat.inner, fml.inner, sub)
        return []
    if isinstance(pat, FOr):
        if not isinstance(fml, FOr):
            return []
        out = []
        for s in match_formula(ctx, pat.left, fml.left, sub):
            out.extend(match_formula(ctx, pat.right, fml.right, s))
        return out
    if isinstance(pat, FBox):
        if not isinstance(fml, FBox):
            return []
        out = []
        for s in match_relation(ctx, pat.rel, fml.rel, sub):
            out.extend(match_formula(ctx, pat.inner, fml.inner, s))
        return out
    if isinstance(pat, ClauseShape):
        lits = flatten_or(fml)
        negs = [l.inner for l in lits if is_negated_atomic(l)]
        poss = [l for l in lits if not is_negated_atomic(l)]
        if len(negs) != len(pat.negatives) or len(poss) != len(pat.positives):
            return []
        return _bind_each(ctx, pat.negatives + pat.positives, negs + poss, sub)
    if isinstance(pat, OrShape):
        lits = flatten_or(fml)
        if len(lits) != len(pat.parts):
            return []
        return _bind_each(ctx, pat.parts, list(lits), sub)
    raise RuleError(f"not a formula pattern: {pat!r}")


def _bind_each(ctx: _Ctx, vars_, values, sub: dict) -> list[dict]:
    subs = [sub]
    for var, value in zip(vars_, values):
        subs = [s2 for s in subs for s2 in _bind(ctx, var, value, s)]
        if not subs:
            return []
    return subs


def match_term(ctx: _Ctx, pat, term, sub: dict) -> list[dict]:
    if isinstance(pat, DVar):
        return _bind(ctx, pat, term, sub)
    if isinstance(pat, DConst):
        return [sub] if ctx.same(pat, term) else []
    if isinstance(pat, (PSkF, SkF)):
        out = []
        for member in ctx.members(term):
            if not isinstance(member, SkF):
                continue
            for s1 in match_relation(ctx, pat.rel, member.rel, sub):
                for s2 in match_formula(ctx, pat.fml, member.fml, s1):
                    out.extend(match_term(ctx, pat.arg, member.arg, s2))
        return out
    if isinstance(pat, (PSkG, SkG)):
        out = []
        for member in ctx.members(term):
            if not isinstance(member, SkG):
                continue
            for s1 in match_relation(ctx, pat.rel, member.rel, sub):
                out.extend(match_term(ctx, pat.arg, member.arg, s1))
        return out
    raise RuleError(f"not a term pattern: {pat!r}")


def match_payload(ctx: _Ctx, pat, payload, sub: dict) -> list[dict]:
    if isinstance(pat, HoldsF) and isinstance(payload, HoldsF):
        out = []
        for s in match_formula(ctx, pat.fml, payload.fml, sub):
            out.extend(match_term(ctx, pat.at, payload.at, s))
        return out
    if isinstance(pat, HoldsR) and isinstance(payload, HoldsR):
        out = []
        for s1 in match_relation(ctx, pat.rel, payload.rel, sub):
            for s2 in match_term(ctx, pat.src, payload.src, s1):
                out.extend(match_term(ctx, pat.dst, payload.dst, s2))
        return out
    if isinstance(pat, Equal) and isinstance(payload, Equal):
        out = []
        for s1 in match_term(ctx, pat.lhs, payload.lhs, sub):
            out.extend(match_term(ctx, pat.rhs, payload.rhs, s1))
        return out
    return []


@dataclass(frozen=True)
class Instantiation:
    rule: Rule
    substitution: tuple[tuple[object, object], ...]  # (schema var, value)
    matched: frozenset

    @property
    def mapping(self) -> dict:
        return dict(self.substitution)

    @property
    def closes(self) -> bool:
        return self.rule.is_closure

    def numerator_atoms(self) -> tuple[SignedAtom, ...]:
        sub = self.mapping
        out = [subst_atom(p, sub) for p in self.numerator_patterns()]
        return tuple(sorted(out, key=atom_sort_key))

    def numerator_patterns(self):
        return sorted(self.rule.numerator, key=render_pattern_atom)

    def denominator_atoms(self, i: int) -> tuple[SignedAtom, ...]:
        sub = self.mapping
        out = [subst_atom(p, sub) for p in self.rule.denominators[i]]
        return tuple(sorted(out, key=atom_sort_key))

    def all_denominators(self) -> tuple[tuple[SignedAtom, ...], ...]:
        return tuple(self.denominator_atoms(i) for i in range(len(self.rule.denominators)))

    def rendered_substitution(self) -> tuple[tuple[str, str], ...]:
        out = []
        for var, value in self.substitution:
            if isinstance(var, FVar):
                text = render_formula(value)
            elif isinstance(var, RVar):
                text = render_relation(value)
            else:
                text = render_term(value)
            out.append((var.name, text))
        return tuple(sorted(out))


def _var_order(var) -> tuple[str, str]:
    return (type(var).__name__, var.name)


def _pattern_priority(atom: SignedAtom) -> tuple[int, str]:
    # clause patterns first: they bind the most variables in one step
    has_clause = isinstance(atom.payload, HoldsF) and isinstance(
        atom.payload.fml, (ClauseShape, OrShape)
    )
    return (0 if has_clause else 1, render_pattern_atom(atom))


def match_rule(rule: Rule, branch) -> tuple[Instantiation, ...]:
    """All maximal well-sorted instantiations whose numerator lies on the
    branch; denominator-only variables are enumerated over branch terms
    (domain sort) and branch relation constants (relation sort)."""
    atoms = sorted(branch_atoms(branch), key=atom_sort_key)
    ctx = _Ctx(_branch_same(branch), _branch_members(branch), _side_checker(rule))
    pats = sorted(rule.numerator, key=_pattern_priority)

    eq_atoms: list[SignedAtom] | None = None

    def candidates(pat: SignedAtom) -> Iterable[SignedAtom]:
        nonlocal eq_atoms
        if isinstance(pat.payload, Equal) and pat.positive:
            if eq_atoms is None:
                eq_atoms = [
                    SignedAtom(True, Equal(a, b)) for a, b in _equality_pairs(branch)
                ]
            return eq_atoms
        return [a for a in atoms if a.positive == pat.positive]

    partial: list[tuple[dict, tuple[SignedAtom, ...]]] = []

    def backtrack(i: int, sub: dict, matched: tuple[SignedAtom, ...]) -> None:
        if i == len(pats):
            partial.append((sub, matched))
            return
        pat = pats[i]
        for atom in candidates(pat):
            for s in match_payload(ctx, pat.payload, atom.payload, sub):
                backtrack(i + 1, s, matched + (atom,))

    backtrack(0, {}, ())
    if not partial:
        return ()

    free = sorted(rule.free_variables(), key=_var_order)
    for var in free:
        if isinstance(var, FVar):
            raise RuleError(
                f"rule {rule.id} has free formula variable {var.name}; "
                "cannot enumerate the formula sort"
            )
    dterm_values = _branch_terms(branch)
    rel_values = tuple(RelConst(n) for n in _branch_relation_names(branch))

    results: dict[tuple, Instantiation] = {}
    for sub, matched in partial:
        missing = [v for v in free if v not in sub]
        pools = [
            dterm_values if isinstance(v, DVar) else rel_values for v in missing
        ]
        for combo in product(*pools):
            full = dict(sub)
            ok = True
            for var, value in zip(missing, combo):
                if not ctx.side_ok(var, value):
                    ok = False
                    break
                full[var] = value
            if not ok:
                continue
            inst = Instantiation(
                rule=rule,
                substitution=tuple(
                    sorted(full.items(), key=lambda kv: _var_order(kv[0]))
                ),
                matched=frozenset(matched),
            )
            key = inst.rendered_substitution()
            if key not in results:
                results[key] = inst
    return tuple(results[k] for k in sorted(results))


def apply_instantiation(branch, inst: Instantiation) -> list[frozenset[SignedAtom]]:
    """Ground conclusion sets, one per denominator; empty for closure rules.
    The branch is not mutated; callers decide how to fork."""
    return [frozenset(inst.denominator_atoms(i)) for i in range(len(inst.rule.denominators))]


# ---------------------------------------------------------------------------
# rule identity modulo variable renaming


def _blanked(atom: SignedAtom) -> str:
    sub = {}
    for var in pattern_vars(atom):
        if var not in sub:
            sub[var] = type(var)("?" + type(var).__name__[0].lower())
    return render_pattern_atom(_rename_atom(atom, sub))


def _rename_atom(atom: SignedAtom, names: dict) -> SignedAtom:
    def walk(obj):
        if isinstance(obj, (FVar, RVar, DVar)):
            return names.get(obj, obj)
        if isinstance(obj, SignedAtom):
            return SignedAtom(obj.positive, walk(obj.payload))
        if isinstance(obj, HoldsF):
            return HoldsF(walk(obj.fml), walk(obj.at))
        if isinstance(obj, HoldsR):
            return HoldsR(walk(obj.rel), walk(obj.src), walk(obj.dst))
        if isinstance(obj, Equal):
            return Equal(walk(obj.lhs), walk(obj.rhs))
        if isinstance(obj, FNot):
            return FNot(walk(obj.inner))
        if isinstance(obj, RelNot):
            return RelNot(walk(obj.inner))
        if isinstance(obj, FOr):
            return FOr(walk(obj.left), walk(obj.right))
        if isinstance(obj, FBox):
            return FBox(walk(obj.rel), walk(obj.inner))
        if isinstance(obj, PSkF):
            return PSkF(walk(obj.rel), walk(obj.fml), walk(obj.arg))
        if isinstance(obj, PSkG):
            return PSkG(walk(obj.rel), walk(obj.arg))
        if isinstance(obj, ClauseShape):
            return ClauseShape(
                tuple(walk(v) for v in obj.negatives),
                tuple(walk(v) for v in obj.positives),
            )
        if isinstance(obj, OrShape):
            return OrShape(tuple(walk(v) for v in obj.parts))
        return obj

    return walk(atom)


def canonical_rule(rule: Rule) -> tuple:
    """Identity of a rule up to variable renaming and its id.

    Variables are renumbered in order of first occurrence along a
    deterministic atom traversal; symmetric premises therefore canonicalize
    identically however they were named.
    """
    ordered: list[SignedAtom] = sorted(
        rule.numerator, key=lambda a: (_blanked(a), render_pattern_atom(a))
    )
    for denom in rule.denominators:
        ordered.extend(sorted(denom, key=lambda a: (_blanked(a), render_pattern_atom(a))))
    names: dict = {}
    for atom in ordered:
        for var in pattern_vars(atom):
            if var not in names:
                sort = type(var).__name__[0].lower()
                names[var] = type(var)(f"{sort}{len(names)}")

    def rename_set(atoms) -> frozenset[str]:
        return frozenset(render_pattern_atom(_rename_atom(a, names)) for a in atoms)

    side = frozenset(
        render_side_condition(type(c)(names.get(c.var, c.var)))
        for c in rule.side_conditions
    )
    return (
        rename_set(rule.numerator),
        tuple(rename_set(d) for d in rule.denominators),
        side,
    )


def rules_equal(a: Rule, b: Rule) -> bool:
    return canonical_rule(a) == canonical_rule(b)


def rule_to_json(rule: Rule) -> dict:
    return {
        "id": rule.id,
        "numerator": sorted(render_pattern_atom(a) for a in rule.numerator),
        "denominators": [
            sorted(render_pattern_atom(a) for a in d) for d in rule.denominators
        ],
        "side_conditions": sorted(
            render_side_condition(c) for c in rule.side_conditions
        ),
        "closure": rule.is_closure,
    }
