"""Kripke models: extraction from branches, evaluation, reflection, frame checks.

A model's domain is a set of opaque class ids.  Extracted models use the
canonical representative term of each equivalence class as the id; the
brute-force search in :mod:`modaltab.oracle` uses plain integers.  Evaluation
only ever tests ids for membership, so both work uniformly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from modaltab.syntax import (
    IMMEDIATE_PREDECESSOR,
    IRREFLEXIVE,
    DConst,
    DomainTerm,
    Equal,
    FBox,
    FNot,
    FOr,
    Formula,
    HoldsF,
    HoldsR,
    Nom,
    Prop,
    RelConst,
    Relation,
    RelNot,
    SignedAtom,
    SkF,
    SkG,
    atom_terms,
    render_atom,
    render_term,
    subterms,
    term_depth,
)


class ModelError(Exception):
    """Raised on closed-branch extraction, unknown classes, or nominals."""


@dataclass(frozen=True, eq=True)
class Model:
    """A finite Kripke model over an explicit signature.

    ``prop_val`` and ``rel_val`` hold exactly the positive atomic facts;
    compound formulas are never stored, only evaluated.  ``class_of`` maps
    the ground terms the model was built from to their class ids (for
    extracted models: every term of the branch; for oracle models: the
    problem's root constants).
    """

    domain: frozenset[object]
    props: frozenset[str]
    rels: frozenset[str]
    prop_val: frozenset[tuple[str, object]]
    rel_val: frozenset[tuple[str, object, object]]
    class_of: Mapping[DomainTerm, object] = field(default_factory=dict)

    def class_id(self, term: DomainTerm) -> object:
        try:
            return self.class_of[term]
        except KeyError:
            raise ModelError(f"term {render_term(term)} has no class in this model")


def class_label(cls: object) -> str:
    if isinstance(cls, (DConst, SkF, SkG)):
        return render_term(cls)
    return str(cls)


def model_to_json(m: Model) -> dict:
    """JSON-friendly view with class names in first-order term syntax."""
    order = sorted(m.domain, key=class_label)
    return {
        "domain": [class_label(c) for c in order],
        "prop_val": sorted([p, class_label(c)] for p, c in m.prop_val),
        "rel_val": sorted([a, class_label(c), class_label(d)] for a, c, d in m.rel_val),
    }


# ---------------------------------------------------------------------------
# evaluation


def eval_relation(m: Model, rel: Relation, src: object, dst: object) -> bool:
    """Truth of ``rel`` between two classes; complement for negated relations."""
    if src not in m.domain or dst not in m.domain:
        raise ModelError("relation evaluated at unknown class")
    if isinstance(rel, RelConst):
        return (rel.name, src, dst) in m.rel_val
    return not eval_relation(m, rel.inner, src, dst)


def eval_formula(m: Model, fml: Formula, at: object) -> bool:
    """Truth of a nominal-free formula at a class, by the semantic clauses."""
    if at not in m.domain:
        raise ModelError("formula evaluated at unknown class")
    if isinstance(fml, Prop):
        return (fml.name, at) in m.prop_val
    if isinstance(fml, Nom):
        raise ModelError("nominals have no model-level meaning; encode them away")
    if isinstance(fml, FNot):
        return not eval_formula(m, fml.inner, at)
    if isinstance(fml, FOr):
        return eval_formula(m, fml.left, at) or eval_formula(m, fml.right, at)
    if isinstance(fml, FBox):
        return all(
            eval_formula(m, fml.inner, other)
            for other in m.domain
            if eval_relation(m, fml.rel, at, other)
        )
    raise ModelError(f"cannot evaluate {fml!r}")


def satisfies_atom(m: Model, atom: SignedAtom) -> bool:
    """Truth of a ground signed atom under the model's term classes."""
    payload = atom.payload
    if isinstance(payload, HoldsF):
        value = eval_formula(m, payload.fml, m.class_id(payload.at))
    elif isinstance(payload, HoldsR):
        value = eval_relation(m, payload.rel, m.class_id(payload.src), m.class_id(payload.dst))
    else:
        value = m.class_id(payload.lhs) == m.class_id(payload.rhs)
    return value == atom.positive


# ---------------------------------------------------------------------------
# extraction


def _rep_key(term: DomainTerm) -> tuple[int, str]:
    return (term_depth(term), render_term(term))


def _congruent_key(term: DomainTerm, find) -> tuple:
    if isinstance(term, SkF):
        return ("f", term.rel, term.fml, find(term.arg))
    if isinstance(term, SkG):
        return ("g", term.rel, find(term.arg))
    return ("c", term)


def _close_classes(universe: list[DomainTerm], equalities: list[tuple[DomainTerm, DomainTerm]]):
    """Ground congruence closure; returns a find() choosing minimal reps."""
    parent: dict[DomainTerm, DomainTerm] = {t: t for t in universe}

    def find(t: DomainTerm) -> DomainTerm:
        while parent[t] != t:
            parent[t] = parent[parent[t]]
            t = parent[t]
        return t

    def union(a: DomainTerm, b: DomainTerm) -> bool:
        ra, rb = find(a), find(b)
        if ra == rb:
            return False
        if _rep_key(rb) < _rep_key(ra):
            ra, rb = rb, ra
        parent[rb] = ra
        return True

    for a, b in equalities:
        union(a, b)
    changed = True
    while changed:  # propagate merges through skolem-term arguments
        changed = False
        sigs: dict[tuple, DomainTerm] = {}
        for t in universe:
            key = _congruent_key(t, find)
            seen = sigs.get(key)
            if seen is None:
                sigs[key] = t
            elif union(seen, t):
                changed = True
    return find


def branch_atoms(branch) -> frozenset[SignedAtom]:
    """Accept an engine branch or any iterable of signed atoms."""
    getter = getattr(branch, "atom_set", None)
    if getter is not None:
        return getter()
    return frozenset(branch)


def atoms_signature(atoms: Iterable[SignedAtom]) -> tuple[frozenset[str], frozenset[str]]:
    props: set[str] = set()
    rels: set[str] = set()

    def walk_rel(rel: Relation) -> None:
        while isinstance(rel, RelNot):
            rel = rel.inner
        rels.add(rel.name)

    def walk_fml(fml: Formula) -> None:
        if isinstance(fml, Prop):
            props.add(fml.name)
        elif isinstance(fml, FNot):
            walk_fml(fml.inner)
        elif isinstance(fml, FOr):
            walk_fml(fml.left)
            walk_fml(fml.right)
        elif isinstance(fml, FBox):
            walk_rel(fml.rel)
            walk_fml(fml.inner)

    def walk_term(term: DomainTerm) -> None:
        if isinstance(term, SkF):
            walk_rel(term.rel)
            walk_fml(term.fml)
            walk_term(term.arg)
        elif isinstance(term, SkG):
            walk_rel(term.rel)
            walk_term(term.arg)

    for atom in atoms:
        payload = atom.payload
        if isinstance(payload, HoldsF):
            walk_fml(payload.fml)
            walk_term(payload.at)
        elif isinstance(payload, HoldsR):
            walk_rel(payload.rel)
            walk_term(payload.src)
            walk_term(payload.dst)
        else:
            walk_term(payload.lhs)
            walk_term(payload.rhs)
    return frozenset(props), frozenset(rels)


def normalize_atom(atom: SignedAtom, find) -> SignedAtom:
    payload = atom.payload
    if isinstance(payload, HoldsF):
        rewritten = HoldsF(payload.fml, find(payload.at))
    elif isinstance(payload, HoldsR):
        rewritten = HoldsR(payload.rel, find(payload.src), find(payload.dst))
    else:
        lhs, rhs = sorted((find(payload.lhs), find(payload.rhs)), key=_rep_key)
        rewritten = Equal(lhs, rhs)
    return SignedAtom(atom.positive, rewritten)


def extract_model(branch) -> Model:
    """Build I(B): term classes plus the branch's positive atomic facts."""
    if getattr(branch, "is_closed", False):
        raise ModelError("cannot extract a model from a closed branch")
    atoms = branch_atoms(branch)
    universe: list[DomainTerm] = []
    seen: set[DomainTerm] = set()
    for atom in atoms:
        for top in atom_terms(atom):
            for t in subterms(top):
                if t not in seen:
                    seen.add(t)
                    universe.append(t)
    if not universe:
        raise ModelError("branch mentions no terms; nothing to build a domain from")
    equalities = [
        (a.payload.lhs, a.payload.rhs)
        for a in atoms
        if a.positive and isinstance(a.payload, Equal)
    ]
    find = _close_classes(universe, equalities)
    domain = frozenset(find(t) for t in universe)
    prop_val: set[tuple[str, object]] = set()
    rel_val: set[tuple[str, object, object]] = set()
    for atom in atoms:
        if not atom.positive:
            continue
        payload = atom.payload
        if isinstance(payload, HoldsF) and isinstance(payload.fml, Prop):
            prop_val.add((payload.fml.name, find(payload.at)))
        elif isinstance(payload, HoldsR) and isinstance(payload.rel, RelConst):
            rel_val.add((payload.rel.name, find(payload.src), find(payload.dst)))
    props, rels = atoms_signature(atoms)
    return Model(
        domain=domain,
        props=props,
        rels=rels,
        prop_val=frozenset(prop_val),
        rel_val=frozenset(rel_val),
        class_of={t: find(t) for t in universe},
    )


# ---------------------------------------------------------------------------
# reflection


@dataclass(frozen=True)
class ReflectionReport:
    violations: tuple[SignedAtom, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def describe(self) -> str:
        if self.ok:
            return "model reflects the branch"
        lines = [f"{len(self.violations)} atom(s) not reflected:"]
        lines += [f"  {render_atom(a, 'fo')}" for a in self.violations]
        return "\n".join(lines)


def reflects(m: Model, branch) -> ReflectionReport:
    """Check every branch atom against the model, listing the failures."""
    bad = tuple(
        atom
        for atom in sorted(branch_atoms(branch), key=lambda a: render_atom(a, "fo"))
        if not satisfies_atom(m, atom)
    )
    return ReflectionReport(violations=bad)


# ---------------------------------------------------------------------------
# frame conditions


def check_frame_condition(m: Model, cond: str) -> bool:
    if cond == IRREFLEXIVE:
        return all((a, e, e) not in m.rel_val for a in m.rels for e in m.domain)
    if cond == IMMEDIATE_PREDECESSOR:
        return all(
            any(
                (a, prev, e) in m.rel_val
                and prev != e
                and all(
                    mid == e or mid == prev
                    for mid in m.domain
                    if (a, prev, mid) in m.rel_val and (a, mid, e) in m.rel_val
                )
                for prev in m.domain
            )
            for a in m.rels
            for e in m.domain
        )
    raise ModelError(f"unknown frame condition {cond!r}")


# ---------------------------------------------------------------------------
# refinement diagnostic


@dataclass(frozen=True)
class Counterexample:
    substitution: tuple[tuple[str, str], ...]  # var name -> rendered value
    unreflected: tuple[SignedAtom, ...]  # refined-denominator atoms false in I(B)

    def __str__(self) -> str:
        pairs = ", ".join(f"{v} -> {val}" for v, val in self.substitution)
        return f"{{{pairs}}}"


@dataclass(frozen=True)
class DiagnosticReport:
    rule_id: str
    denom_index: int
    counterexamples: tuple[Counterexample, ...]

    @property
    def ok(self) -> bool:
        return not self.counterexamples


def diagnose_general_condition(branch, rule, denom_index: int) -> DiagnosticReport:
    """Per-branch check of the rule refinement condition.

    `denom_index` is the 1-based position of the denominator that was refined
    away.  For each instantiation whose premises lie on the branch: if the
    model of the branch falsifies that denominator's instance, some other
    denominator instance must already be present.  Reports the substitutions
    where that fails.  This samples the condition on one branch only; the
    real condition quantifies over all derivations.
    """
    from modaltab.rules import match_rule  # local import, rules builds on models

    if not 1 <= denom_index <= len(rule.denominators):
        raise ModelError(
            f"rule {rule.id} has {len(rule.denominators)} denominators; "
            f"position {denom_index} is out of range"
        )
    idx = denom_index - 1
    m = extract_model(branch)
    atoms = frozenset(normalize_atom(a, lambda t: m.class_of.get(t, t)) for a in branch_atoms(branch))

    def on_branch(ground: Iterable[SignedAtom]) -> bool:
        return all(
            normalize_atom(a, lambda t: m.class_of.get(t, t)) in atoms for a in ground
        )

    bad = []
    for inst in match_rule(rule, branch):
        refined = inst.denominator_atoms(idx)
        if all(satisfies_atom(m, a) for a in refined):
            continue
        others = [i for i in range(len(rule.denominators)) if i != idx]
        if any(on_branch(inst.denominator_atoms(i)) for i in others):
            continue
        unreflected = tuple(a for a in refined if not satisfies_atom(m, a))
        bad.append(Counterexample(substitution=inst.rendered_substitution(), unreflected=unreflected))
    return DiagnosticReport(rule_id=rule.id, denom_index=denom_index, counterexamples=tuple(bad))
