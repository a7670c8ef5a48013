"""Calculus-to-calculus transformations: rule refinement, the atomic
refinement condition, clausification, and the hypertableau transformation.

Denominator positions are 1-based throughout (position 1 is the leftmost
denominator), matching the convention of the refinement diagnostics.
"""

from __future__ import annotations

from dataclasses import dataclass

from modaltab.catalog import (
    HYP_FAMILY,
    NOT_NEG,
    NOT_POS,
    OR_NEG,
    OR_POS,
    SPLIT_GENERIC_FAMILY,
    SPLIT_PLUS_FAMILY,
    Calculus,
    RuleFamily,
)
from modaltab.rules import (
    AtomicOnly,
    DVar,
    FVar,
    RVar,
    Rule,
    render_pattern_atom,
    rules_equal,
)
from modaltab.syntax import (
    KM,
    Equal,
    FNot,
    FOr,
    Formula,
    HoldsF,
    HoldsR,
    Nom,
    Prop,
    RelConst,
    SignedAtom,
    fml_is_atomic,
    is_negated_atomic,
    render_formula,
)


class RefineError(ValueError):
    """Invalid refinement, clausification, or transformation request."""


def _check_position(rule: Rule, denom_index: int) -> int:
    if rule.is_closure:
        raise RefineError(f"rule {rule.id} is a closure rule; nothing to refine")
    if not 1 <= denom_index <= len(rule.denominators):
        raise RefineError(
            f"rule {rule.id} has {len(rule.denominators)} denominators; "
            f"position {denom_index} is out of range"
        )
    return denom_index - 1


# ---------------------------------------------------------------------------
# rule refinement


def refine_rule(rule: Rule, denom_index: int) -> list[Rule]:
    """Move the chosen denominator into the numerator, one new rule per
    formula in it, with the formula's polarity flipped."""
    idx = _check_position(rule, denom_index)
    chosen = sorted(rule.denominators[idx], key=render_pattern_atom)
    rest = rule.denominators[:idx] + rule.denominators[idx + 1 :]
    out = []
    for j, psi in enumerate(chosen, start=1):
        flipped = SignedAtom(not psi.positive, psi.payload)
        out.append(
            Rule(
                id=f"{rule.id}.{j}",
                numerator=rule.numerator | {flipped},
                denominators=rest,
                side_conditions=rule.side_conditions,
            )
        )
    return out


def refine_calculus(calc: Calculus, rule_id: str, denom_index: int) -> Calculus:
    """Replace one rule by its refinements at the given denominator."""
    replaced = calc.rule(rule_id)  # raises RuleError for unknown ids
    new_rules: list[Rule] = []
    for rule in calc.rules:
        if rule.id == rule_id:
            new_rules.extend(refine_rule(rule, denom_index))
        else:
            new_rules.append(rule)
    return Calculus(
        name=f"ref({rule_id},{calc.name})",
        rules=tuple(new_rules),
        language=calc.language,
        schema_families=calc.schema_families,
        frame_conditions=calc.frame_conditions,
        complete=calc.complete,
    )


# ---------------------------------------------------------------------------
# atomic refinement condition


@dataclass(frozen=True)
class AtomicCheck:
    ok: bool
    explanation: str

    def __bool__(self) -> bool:
        return self.ok


def check_atomic_condition(rule: Rule, denom_index: int, language: str) -> AtomicCheck:
    """Syntactic test that the chosen denominator consists of negative
    patterns whose payloads can only instantiate to atomic formulas in the
    given language."""
    idx = _check_position(rule, denom_index)
    atomic_vars = frozenset(
        c.var for c in rule.side_conditions if isinstance(c, AtomicOnly)
    )
    for pat in sorted(rule.denominators[idx], key=render_pattern_atom):
        text = render_pattern_atom(pat)
        if pat.positive:
            return AtomicCheck(False, f"pattern {text} is not negative")
        payload = pat.payload
        if isinstance(payload, Equal):
            continue  # equations are atomic in every language
        if isinstance(payload, HoldsF):
            arg = payload.fml
            if isinstance(arg, (Prop, Nom)):
                continue
            if isinstance(arg, FVar) and arg in atomic_vars:
                continue
            return AtomicCheck(
                False,
                f"pattern {text}: formula argument may instantiate to a "
                "compound formula",
            )
        arg = payload.rel
        if isinstance(arg, RelConst):
            continue
        if isinstance(arg, RVar) and (language == KM or arg in atomic_vars):
            continue
        return AtomicCheck(
            False,
            f"pattern {text}: relation argument may instantiate to a "
            f"negated relation in {language}",
        )
    return AtomicCheck(True, "all denominator patterns are negative and atomic")


# ---------------------------------------------------------------------------
# clausification


@dataclass(frozen=True)
class Clause:
    """Flat disjunction in normal form: negated atomic literals (stored
    unnegated) before all other literals."""

    negatives: tuple[Formula, ...]
    positives: tuple[Formula, ...]

    def __post_init__(self) -> None:
        if not self.negatives and not self.positives:
            raise RefineError("empty clause")
        for f in self.negatives:
            if not fml_is_atomic(f):
                raise RefineError(f"negative literal {render_formula(f)} not atomic")
        for f in self.positives:
            if is_negated_atomic(f):
                raise RefineError(
                    f"literal {render_formula(f)} belongs in the negative block"
                )

    @property
    def width(self) -> int:
        return len(self.negatives) + len(self.positives)

    def literals(self) -> tuple[Formula, ...]:
        return tuple(FNot(f) for f in self.negatives) + self.positives

    def formula(self) -> Formula:
        lits = self.literals()
        out = lits[0]
        for lit in lits[1:]:
            out = FOr(out, lit)
        return out

    def render(self) -> str:
        return " | ".join(render_formula(lit) for lit in self.literals())


def _make_clause(literals) -> Clause:
    negs = sorted(
        {l.inner for l in literals if is_negated_atomic(l)}, key=render_formula
    )
    poss = sorted(
        {l for l in literals if not is_negated_atomic(l)}, key=render_formula
    )
    return Clause(tuple(negs), tuple(poss))


class _DefAllocator:
    """Fresh definition propositions d0, d1, ... skipping names already
    used in the input."""

    def __init__(self, used: set[str]):
        self._used = used
        self._next = 0

    def fresh(self) -> Prop:
        while f"d{self._next}" in self._used:
            self._next += 1
        name = f"d{self._next}"
        self._next += 1
        return Prop(name)


def _used_prop_names(fml: Formula) -> set[str]:
    out: set[str] = set()

    def walk(f: Formula) -> None:
        if isinstance(f, Prop):
            out.add(f.name)
        elif isinstance(f, FNot):
            walk(f.inner)
        elif isinstance(f, FOr):
            walk(f.left)
            walk(f.right)
        # boxed subformulas are opaque literals; their insides cannot
        # collide with definition propositions at the clause level

    walk(fml)
    return out


def _conjuncts(f: Formula, positive: bool) -> list[tuple[Formula, bool]]:
    """Top-level conjunction parts of f at the given polarity; parts carry
    their own polarity and are never negations."""
    if isinstance(f, FNot):
        return _conjuncts(f.inner, not positive)
    if not positive and isinstance(f, FOr):
        return _conjuncts(f.left, False) + _conjuncts(f.right, False)
    return [(f, positive)]


def _disjuncts(f: Formula, positive: bool) -> list[tuple[Formula, bool]]:
    if isinstance(f, FNot):
        return _disjuncts(f.inner, not positive)
    if positive and isinstance(f, FOr):
        return _disjuncts(f.left, True) + _disjuncts(f.right, True)
    return [(f, positive)]


def clausify(fml: Formula, reserved: set[str] | None = None) -> list[Clause]:
    """Polarity-aware definitional clausal form of the Boolean skeleton.

    Boxed subformulas and their negations are opaque literals.  Conjunctive
    subtrees under a disjunction get a fresh definition proposition with
    implication-only defining clauses; top-level conjunctions split into
    separate clauses.  `reserved` adds proposition names the definitions
    must avoid beyond those in the formula itself.
    """
    alloc = _DefAllocator(_used_prop_names(fml) | (reserved or set()))
    clauses: list[Clause] = []

    def emit(f: Formula, positive: bool, guard: Prop | None = None) -> None:
        for part, pol in _conjuncts(f, positive):
            literals: list[Formula] = [] if guard is None else [FNot(guard)]
            for d, dpol in _disjuncts(part, pol):
                if isinstance(d, FOr):
                    # only reachable with dpol False: a nested conjunction
                    defn = alloc.fresh()
                    literals.append(defn)
                    emit(d, dpol, guard=defn)
                else:
                    literals.append(d if dpol else FNot(d))
            clauses.append(_make_clause(literals))

    emit(fml, True)
    return clauses


# ---------------------------------------------------------------------------
# hypertableau transformation


def _find_content(calc: Calculus, rule: Rule) -> list[str]:
    return [r.id for r in calc.rules if rules_equal(r, rule)]


def _require(calc: Calculus, rule: Rule, what: str) -> list[str]:
    found = _find_content(calc, rule)
    if not found:
        raise RefineError(f"calculus {calc.name} lacks the {what} rule")
    return found


def _replace_or_with_family(
    calc: Calculus, name: str, family: RuleFamily, drop_or_neg: bool
) -> Calculus:
    drop = set(_require(calc, OR_POS, "positive disjunction"))
    if drop_or_neg:
        drop.update(_require(calc, OR_NEG, "negative disjunction"))
    families = calc.schema_families + tuple(
        f for f in (family,) if f.name not in {g.name for g in calc.schema_families}
    )
    return Calculus(
        name=name,
        rules=tuple(r for r in calc.rules if r.id not in drop),
        language=calc.language,
        schema_families=families,
        frame_conditions=calc.frame_conditions,
        complete=calc.complete,
    )


def split_calculus(calc: Calculus) -> Calculus:
    """Replace the positive disjunction rule by the unguarded k-way split
    family; verdict-equivalent to the input calculus."""
    return _replace_or_with_family(
        calc, f"split({calc.name})", SPLIT_GENERIC_FAMILY, drop_or_neg=False
    )


def split_plus_calculus(calc: Calculus) -> Calculus:
    """Replace the positive disjunction rule by the guarded clause split
    family (atomic substitutions into negated literals only)."""
    return _replace_or_with_family(
        calc, f"split+({calc.name})", SPLIT_PLUS_FAMILY, drop_or_neg=False
    )


def hypertableau_transform(calc: Calculus) -> Calculus:
    """Clause-oriented variant of the calculus: both disjunction rules are
    dropped in favour of the guarded split family plus the hyp family, with
    hyp preferred (family order is the matching preference)."""
    _require(calc, NOT_POS, "positive negation")
    _require(calc, NOT_NEG, "negative negation")
    out = _replace_or_with_family(
        calc, f"hyper({calc.name})", SPLIT_PLUS_FAMILY, drop_or_neg=True
    )
    families = (HYP_FAMILY,) + tuple(
        f for f in out.schema_families if f.name != HYP_FAMILY.name
    )
    return Calculus(
        name=out.name,
        rules=out.rules,
        language=out.language,
        schema_families=families,
        frame_conditions=out.frame_conditions,
        complete=out.complete,
    )
