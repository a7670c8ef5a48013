"""Tableau derivation: branch state with congruence closure over domain
terms, fair rule scheduling, closure detection, resource bounds, and
verdict computation.

A branch keeps its atoms normalized to congruence representatives.
Positive equational conclusions merge term classes (propagating through
Skolem-term structure and rewriting stored atoms to the new
representatives) instead of being stored; negative equations stay on the
branch and close it as soon as both sides fall into one class.  Rule
instantiations are drawn from a fair priority queue; forks are explored
depth-first, left to right.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from modaltab.catalog import Calculus
from modaltab.models import (
    Model,
    ModelError,
    ReflectionReport,
    atoms_signature,
    check_frame_condition,
    extract_model,
    model_to_json,
    normalize_atom,
    reflects,
)
from modaltab.refine import clausify
from modaltab.rules import (
    Instantiation,
    PSkF,
    PSkG,
    Rule,
    RuleError,
    match_rule,
    term_key,
)
from modaltab.syntax import (
    KMNOT,
    DConst,
    DomainTerm,
    Equal,
    FNot,
    FOr,
    HoldsF,
    HoldsR,
    ProblemSpec,
    SignedAtom,
    SkF,
    SkG,
    atom_terms,
    flatten_or,
    is_negated_atomic,
    render_atom,
    subterms,
)

SAT = "sat"
UNSAT = "unsat"
UNKNOWN = "unknown"


class EngineError(ValueError):
    """Bad engine input: incompatible language, bound, or strategy."""


@dataclass(frozen=True)
class Bounds:
    """Resource limits; hitting one yields verdict unknown, not an error."""

    max_terms: int = 64
    max_applications: int = 20000
    max_branches: int = 4096

    def __post_init__(self) -> None:
        for name in ("max_terms", "max_applications", "max_branches"):
            if getattr(self, name) < 1:
                raise EngineError(f"{name} must be positive")


@dataclass
class Stats:
    """Mutable counters shared by every branch of one derivation."""

    applications: dict[str, int] = field(default_factory=dict)
    branches: int = 0
    max_terms: int = 0

    @property
    def total_applications(self) -> int:
        return sum(self.applications.values())

    def record(self, rule_id: str) -> None:
        self.applications[rule_id] = self.applications.get(rule_id, 0) + 1

    def as_dict(self) -> dict:
        return {
            "applications": dict(sorted(self.applications.items())),
            "total_applications": self.total_applications,
            "branches": self.branches,
            "max_terms": self.max_terms,
        }


# ---------------------------------------------------------------------------
# branch state


class Branch:
    """One tableau branch: normalized atoms plus a term congruence.

    Exposes the matching protocol consumed by the rules module (atom_set,
    same_class, class_members, term_set, relation_names, equal_pairs) and
    the mutators the engine drives.  Atoms are stored with their top-level
    terms rewritten to class representatives; positive equalities are
    folded into the congruence rather than stored.
    """

    def __init__(self, branch_id: int = 0):
        self.branch_id = branch_id
        self.closed_reason: str | None = None
        self.saturated = False
        self.atoms: set[SignedAtom] = set()
        self.applied: set[tuple[str, tuple[tuple[str, str], ...]]] = set()
        self._parent: dict[DomainTerm, DomainTerm] = {}
        self._classes: dict[DomainTerm, set[DomainTerm]] = {}
        self._sigs: dict[tuple, DomainTerm] = {}
        self._deps: dict[DomainTerm, set[DomainTerm]] = {}
        self._props: set[str] = set()
        self._rels: set[str] = set()

    @classmethod
    def from_atoms(
        cls,
        atoms,
        relation_names: tuple[str, ...] = (),
        branch_id: int = 0,
    ) -> "Branch":
        b = cls(branch_id)
        b._rels.update(relation_names)
        for atom in atoms:
            b.add_atom(atom)
        return b

    def copy(self, branch_id: int) -> "Branch":
        b = Branch.__new__(Branch)
        b.branch_id = branch_id
        b.closed_reason = self.closed_reason
        b.saturated = False
        b.atoms = set(self.atoms)
        b.applied = set(self.applied)
        b._parent = dict(self._parent)
        b._classes = {rep: set(members) for rep, members in self._classes.items()}
        b._sigs = dict(self._sigs)
        b._deps = {rep: set(deps) for rep, deps in self._deps.items()}
        b._props = set(self._props)
        b._rels = set(self._rels)
        return b

    # -- status -------------------------------------------------------------

    @property
    def is_closed(self) -> bool:
        return self.closed_reason is not None

    @property
    def status(self) -> str:
        if self.closed_reason is not None:
            return f"closed: {self.closed_reason}"
        return "saturated" if self.saturated else "open"

    @property
    def disequalities(self) -> frozenset[Equal]:
        return frozenset(
            a.payload
            for a in self.atoms
            if not a.positive and isinstance(a.payload, Equal)
        )

    def term_count(self) -> int:
        return len(self._parent)

    # -- matching protocol ----------------------------------------------------

    def atom_set(self) -> frozenset[SignedAtom]:
        return frozenset(self.atoms)

    def find(self, term: DomainTerm) -> DomainTerm:
        if term not in self._parent:
            return term
        root = term
        while self._parent[root] is not root:
            root = self._parent[root]
        while self._parent[term] is not root:
            term, self._parent[term] = self._parent[term], root
        return root

    def same_class(self, a: DomainTerm, b: DomainTerm) -> bool:
        return self.find(a) == self.find(b)

    def class_members(self, term: DomainTerm) -> list[DomainTerm]:
        members = self._classes.get(self.find(term))
        if members is None:
            return [term]
        return sorted(members, key=term_key)

    def term_set(self) -> list[DomainTerm]:
        return sorted({self.find(t) for t in self._parent}, key=term_key)

    def relation_names(self) -> list[str]:
        return sorted(self._rels)

    def equal_pairs(self) -> list[tuple[DomainTerm, DomainTerm]]:
        pairs: list[tuple[DomainTerm, DomainTerm]] = []
        for rep in sorted(self._classes, key=term_key):
            members = self._classes[rep]
            if len(members) < 2:
                continue
            ordered = sorted(members, key=term_key)
            pairs.extend((a, b) for a in ordered for b in ordered if a != b)
        return pairs

    # -- mutation -------------------------------------------------------------

    def register_term(self, term: DomainTerm) -> list[tuple[DomainTerm, DomainTerm]]:
        """Add a term and its subterms; returns equations forced by Skolem
        terms that collide on (constructor, relation, formula, argument
        class) with an existing one."""
        pending: list[tuple[DomainTerm, DomainTerm]] = []
        for t in reversed(list(subterms(term))):
            if t in self._parent:
                continue
            self._parent[t] = t
            self._classes[t] = {t}
            if isinstance(t, (SkF, SkG)):
                self._deps.setdefault(self.find(t.arg), set()).add(t)
                sig = self._signature(t)
                other = self._sigs.get(sig)
                if other is None:
                    self._sigs[sig] = t
                elif self.find(other) != t:
                    pending.append((other, t))
        return pending

    def _signature(self, t: DomainTerm) -> tuple:
        if isinstance(t, SkF):
            return ("f", t.rel, t.fml, self.find(t.arg))
        return ("g", t.rel, self.find(t.arg))

    def add_atom(self, atom: SignedAtom) -> bool:
        """Store an atom (normalized); positive equalities merge classes
        instead.  Returns True when the branch state changed."""
        pending: list[tuple[DomainTerm, DomainTerm]] = []
        for t in atom_terms(atom):
            pending.extend(self.register_term(t))
        payload = atom.payload
        if atom.positive and isinstance(payload, Equal):
            if not pending and self.same_class(payload.lhs, payload.rhs):
                return False
            pending.append((payload.lhs, payload.rhs))
            self._merge(pending)
            return True
        if pending:
            self._merge(pending)
        normalized = normalize_atom(atom, self.find)
        if normalized in self.atoms:
            return False
        self.atoms.add(normalized)
        props, rels = atoms_signature([normalized])
        self._props |= props
        self._rels |= rels
        if not normalized.positive and isinstance(normalized.payload, Equal):
            if normalized.payload.lhs == normalized.payload.rhs:
                self._close(
                    f"disequality {render_atom(normalized, 'fo')} refuted by congruence"
                )
        return True

    def merge(self, lhs: DomainTerm, rhs: DomainTerm) -> bool:
        """Merge the classes of two terms; returns True when they were
        previously distinct (or registration forced other merges)."""
        pending = self.register_term(lhs) + self.register_term(rhs)
        if not pending and self.same_class(lhs, rhs):
            return False
        pending.append((lhs, rhs))
        self._merge(pending)
        return True

    def _merge(self, pending: list[tuple[DomainTerm, DomainTerm]]) -> None:
        self._union(pending)
        self._rewrite_skolems()
        self._renormalize()

    def _union(self, queue: list[tuple[DomainTerm, DomainTerm]]) -> None:
        queue = list(queue)
        while queue:
            a, b = queue.pop()
            ra, rb = self.find(a), self.find(b)
            if ra == rb:
                continue
            if term_key(rb) < term_key(ra):
                ra, rb = rb, ra
            self._parent[rb] = ra
            self._classes[ra].update(self._classes.pop(rb))
            # Skolem terms whose argument class just moved may now collide.
            for t in self._deps.pop(rb, ()):
                self._deps.setdefault(self.find(t.arg), set()).add(t)
                sig = self._signature(t)
                other = self._sigs.get(sig)
                if other is None:
                    self._sigs[sig] = t
                elif self.find(other) != self.find(t):
                    queue.append((other, t))

    def _rewrite_skolems(self) -> None:
        """Rewrite representative Skolem terms until their arguments are
        representatives too, merging each with its rewritten form."""
        changed = True
        while changed:
            changed = False
            for t in list(self._parent):
                if not isinstance(t, (SkF, SkG)) or self.find(t) != t:
                    continue
                arg_rep = self.find(t.arg)
                if arg_rep == t.arg:
                    continue
                canon: DomainTerm
                if isinstance(t, SkF):
                    canon = SkF(t.rel, t.fml, arg_rep)
                else:
                    canon = SkG(t.rel, arg_rep)
                pending = self.register_term(canon)
                pending.append((t, canon))
                self._union(pending)
                changed = True

    def _renormalize(self) -> None:
        fresh = {normalize_atom(a, self.find) for a in self.atoms}
        self.atoms = fresh
        for a in fresh:
            if SignedAtom(not a.positive, a.payload) in fresh:
                self._close(
                    "complementary pair on "
                    f"{render_atom(SignedAtom(True, a.payload), 'fo')} after merge"
                )
                break
        for a in fresh:
            payload = a.payload
            if not a.positive and isinstance(payload, Equal):
                if payload.lhs == payload.rhs:
                    self._close(
                        f"disequality {render_atom(a, 'fo')} refuted by congruence"
                    )
                    break

    def _close(self, reason: str) -> None:
        if self.closed_reason is None:
            self.closed_reason = reason


def assert_equality(branch: Branch, lhs: DomainTerm, rhs: DomainTerm) -> Branch:
    """Merge the classes of lhs and rhs on the branch, propagating the
    congruence through Skolem terms and re-normalizing stored atoms;
    closure against disequalities and complementary pairs is detected."""
    branch.merge(lhs, rhs)
    return branch


# ---------------------------------------------------------------------------
# scheduling


def _pattern_terms(payload) -> tuple:
    if isinstance(payload, HoldsF):
        return (payload.at,)
    if isinstance(payload, HoldsR):
        return (payload.src, payload.dst)
    return (payload.lhs, payload.rhs)


def _creates_terms(rule: Rule) -> bool:
    for den in rule.denominators:
        for atom in den:
            for t in _pattern_terms(atom.payload):
                if isinstance(t, (PSkF, PSkG, SkF, SkG)):
                    return True
    return False


def _rule_priority(rule: Rule) -> int:
    """Scheduling class: closure, then single-denominator non-term-creating,
    then equality-producing, then branching, then term-creating."""
    if rule.is_closure:
        return 0
    if _creates_terms(rule):
        return 4
    if len(rule.denominators) == 1:
        return 1
    if any(
        atom.positive and isinstance(atom.payload, Equal)
        for den in rule.denominators
        for atom in den
    ):
        return 2
    return 3


def _parse_strategy(strategy: str) -> random.Random | None:
    if strategy == "default":
        return None
    if strategy.startswith("shuffle:"):
        seed_text = strategy.split(":", 1)[1]
        try:
            seed = int(seed_text)
        except ValueError:
            raise EngineError(
                f"shuffle strategy needs an integer seed, got {seed_text!r}"
            )
        return random.Random(seed)
    raise EngineError(
        f"unknown strategy {strategy!r}; use 'default' or 'shuffle:<seed>'"
    )


class _Run:
    """Per-derivation context: calculus, bounds, scheduling state, stats."""

    def __init__(
        self,
        calc: Calculus,
        bounds: Bounds,
        strategy: str,
        regularity: bool,
        normalize: bool,
        stats: Stats,
        trace: list[str] | None,
        reserved: set[str],
        first_child_id: int = 1,
    ):
        self.calc = calc
        self.bounds = bounds
        self.rng = _parse_strategy(strategy)
        self.regularity = regularity
        self.normalize = normalize
        self.stats = stats
        self.trace = trace
        self.reserved = set(reserved)
        self.seq: dict[tuple, int] = {}
        self.counter = itertools.count()
        self.next_id = itertools.count(first_child_id)
        self.prio: dict[str, int] = {}
        self.exhausted_reason: str | None = None
        self.closed = 0

    def priority(self, rule: Rule) -> int:
        cached = self.prio.get(rule.id)
        if cached is None:
            cached = self.prio[rule.id] = _rule_priority(rule)
        return cached


def _clause_shapes(branch: Branch) -> list[tuple[int, int]]:
    """(negative, positive) literal counts of the positive disjunctions on
    the branch; these pick which schema instances can possibly match."""
    shapes: set[tuple[int, int]] = set()
    for atom in branch.atoms:
        if not atom.positive or not isinstance(atom.payload, HoldsF):
            continue
        if not isinstance(atom.payload.fml, FOr):
            continue
        literals = flatten_or(atom.payload.fml)
        negatives = sum(1 for lit in literals if is_negated_atomic(lit))
        shapes.add((negatives, len(literals) - negatives))
    return sorted(shapes)


def _active_rules(run: _Run, branch: Branch) -> list[Rule]:
    rules = list(run.calc.rules)
    if run.calc.schema_families:
        # family order is the matching preference order: the first family
        # that covers a clause shape claims it, so with hyp listed before
        # split a guarded clause waits for its premises instead of splitting
        for m, n in _clause_shapes(branch):
            for family in run.calc.schema_families:
                try:
                    rules.append(family.instantiate(m, n))
                except RuleError:
                    continue
                break
    seen: set[str] = set()
    unique = []
    for rule in rules:
        if rule.id in seen:
            continue
        seen.add(rule.id)
        unique.append(rule)
    return unique


def _holds(branch: Branch, atom: SignedAtom) -> bool:
    payload = atom.payload
    if atom.positive and isinstance(payload, Equal):
        return branch.same_class(payload.lhs, payload.rhs)
    return normalize_atom(atom, branch.find) in branch.atoms


def _satisfied(branch: Branch, inst: Instantiation) -> bool:
    """Some denominator already fully holds, so applying would not narrow
    the branch (the regularity skip)."""
    return any(
        all(_holds(branch, atom) for atom in inst.denominator_atoms(i))
        for i in range(len(inst.rule.denominators))
    )


def _select(run: _Run, branch: Branch):
    best = None
    pool = []
    for rule in _active_rules(run, branch):
        prio = run.priority(rule)
        for inst in match_rule(rule, branch):
            key = (rule.id, inst.rendered_substitution())
            if key in branch.applied:
                continue
            if run.regularity and not inst.closes and _satisfied(branch, inst):
                branch.applied.add(key)
                continue
            seq = run.seq.get(key)
            if seq is None:
                seq = run.seq[key] = next(run.counter)
            candidate = (prio, seq, rule, inst, key)
            if run.rng is None:
                if best is None or (prio, seq) < (best[0], best[1]):
                    best = candidate
            else:
                pool.append(candidate)
    if run.rng is None:
        return best
    if not pool:
        return None
    top = min(candidate[0] for candidate in pool)
    picks = sorted(
        (candidate for candidate in pool if candidate[0] == top),
        key=lambda candidate: candidate[1],
    )
    return picks[run.rng.randrange(len(picks))]


# ---------------------------------------------------------------------------
# conclusion normalization (clausal conclusions for hypertableau runs)


def _clausal_atoms(atom: SignedAtom, used: set[str]) -> list[SignedAtom]:
    """Rewrite a formula atom with compound Boolean structure into clause
    atoms: unit clauses become signed literals, wider ones stay positive
    disjunction atoms.  Other atoms pass through unchanged."""
    payload = atom.payload
    if not isinstance(payload, HoldsF):
        return [atom]
    if not isinstance(payload.fml, (FNot, FOr)):
        return [atom]
    target = payload.fml if atom.positive else FNot(payload.fml)
    out: list[SignedAtom] = []
    for clause in clausify(target, reserved=used):
        if clause.width == 1:
            if clause.negatives:
                out.append(SignedAtom(False, HoldsF(clause.negatives[0], payload.at)))
            else:
                lit = clause.positives[0]
                if isinstance(lit, FNot):
                    out.append(SignedAtom(False, HoldsF(lit.inner, payload.at)))
                else:
                    out.append(SignedAtom(True, HoldsF(lit, payload.at)))
        else:
            out.append(SignedAtom(True, HoldsF(clause.formula(), payload.at)))
    return out


def _normalized_batch(atoms, reserved: set[str]) -> list[SignedAtom]:
    used = set(reserved)
    out: list[SignedAtom] = []
    for atom in atoms:
        for produced in _clausal_atoms(atom, used):
            out.append(produced)
            props, _ = atoms_signature([produced])
            used |= props
    return out


# ---------------------------------------------------------------------------
# saturation


def _sub_str(inst: Instantiation) -> str:
    return "{" + ", ".join(f"{k} -> {v}" for k, v in inst.rendered_substitution()) + "}"


def _note(run: _Run, line: str) -> None:
    if run.trace is not None:
        run.trace.append(line)


def _step(branch: Branch, run: _Run):
    """Apply one instantiation; returns an event tag and its payload."""
    candidate = _select(run, branch)
    if candidate is None:
        branch.saturated = True
        return "saturated", None
    if run.stats.total_applications >= run.bounds.max_applications:
        return "exhausted", f"application bound {run.bounds.max_applications} reached"
    _, _, rule, inst, key = candidate
    branch.applied.add(key)
    run.stats.record(rule.id)
    if inst.closes:
        branch._close(f"{rule.id} with {_sub_str(inst)}")
        _note(
            run,
            f"branch={branch.branch_id} rule={rule.id} sub={_sub_str(inst)} closed",
        )
        return "closed", None
    conclusions = [
        list(inst.denominator_atoms(i)) for i in range(len(rule.denominators))
    ]
    if run.normalize:
        reserved = run.reserved | branch._props
        conclusions = [_normalized_batch(atoms, reserved) for atoms in conclusions]
    if len(conclusions) == 1:
        added = [a for a in conclusions[0] if branch.add_atom(a)]
        rendered = ", ".join(render_atom(a, "fo") for a in added)
        _note(
            run,
            f"branch={branch.branch_id} rule={rule.id}"
            f" sub={_sub_str(inst)} added=[{rendered}]",
        )
        return "extended", None
    if run.stats.branches + len(conclusions) > run.bounds.max_branches:
        return "exhausted", f"branch bound {run.bounds.max_branches} reached"
    children = []
    for atoms in conclusions:
        child = branch.copy(next(run.next_id))
        for a in atoms:
            child.add_atom(a)
        children.append(child)
    run.stats.branches += len(children)
    forks = ", ".join(
        f"{child.branch_id}: [" + ", ".join(render_atom(a, "fo") for a in atoms) + "]"
        for child, atoms in zip(children, conclusions)
    )
    _note(
        run,
        f"branch={branch.branch_id} rule={rule.id}"
        f" sub={_sub_str(inst)} forked=[{forks}]",
    )
    return "forked", children


def _drive(branch: Branch, run: _Run):
    """Expand one branch until it closes, saturates, forks, or exhausts."""
    while True:
        if branch.is_closed:
            return "closed", None
        run.stats.max_terms = max(run.stats.max_terms, branch.term_count())
        if branch.term_count() > run.bounds.max_terms:
            return "exhausted", f"term bound {run.bounds.max_terms} exceeded"
        event, payload = _step(branch, run)
        if event == "extended":
            continue
        return event, payload


def _explore(root: Branch, run: _Run):
    """Depth-first generator over open saturated branches below root."""
    stack = [root]
    while stack:
        branch = stack.pop()
        event, payload = _drive(branch, run)
        if event == "forked":
            stack.extend(reversed(payload))
        elif event == "saturated":
            yield branch
        elif event == "closed":
            run.closed += 1
        else:
            if run.exhausted_reason is None:
                run.exhausted_reason = payload


@dataclass
class BranchOutcome:
    """Result of saturating one branch (and the subtree it forked into)."""

    status: str  # "closed" | "saturated" | "exhausted"
    witness: Branch | None
    saturated: tuple[Branch, ...]
    reason: str | None


def saturate_branch(
    branch: Branch,
    calc: Calculus,
    bounds: Bounds = Bounds(),
    strategy: str = "default",
    *,
    regularity: bool = True,
    exhaustive: bool = False,
    clausify_conclusions: bool | None = None,
    stats: Stats | None = None,
    trace: list[str] | None = None,
) -> BranchOutcome:
    """Saturate a branch under a fair instantiation queue.

    Instantiation priority: closure rules first, then single-denominator
    non-term-creating, equality-producing, branching, and term-creating
    rules; FIFO within each class, so every enabled instantiation is
    eventually dequeued.  Rules with free denominator variables re-match
    whenever a new term appears.  Forks are explored depth-first, left to
    right.  With exhaustive=True every open saturated branch below the
    input is collected instead of stopping at the first.
    """
    if stats is None:
        stats = Stats()
    if stats.branches == 0:
        stats.branches = 1
    if branch.is_closed:
        return BranchOutcome("closed", None, (), branch.closed_reason)
    normalize = (
        clausify_conclusions
        if clausify_conclusions is not None
        else any(f.name == "hyp" for f in calc.schema_families)
    )
    run = _Run(
        calc,
        bounds,
        strategy,
        regularity,
        normalize,
        stats,
        trace,
        reserved=set(branch._props),
        first_child_id=branch.branch_id + 1,
    )
    saturated: list[Branch] = []
    for open_branch in _explore(branch, run):
        saturated.append(open_branch)
        if not exhaustive:
            break
    if saturated:
        return BranchOutcome(
            "saturated", saturated[0], tuple(saturated), run.exhausted_reason
        )
    if run.exhausted_reason is not None:
        return BranchOutcome("exhausted", None, (), run.exhausted_reason)
    return BranchOutcome("closed", None, (), "all branches closed")


# ---------------------------------------------------------------------------
# derivation


@dataclass
class TableauResult:
    verdict: str
    model: Model | None = None
    reason: str | None = None
    witness: Branch | None = None
    saturated_branches: tuple[Branch, ...] = ()
    reflection: ReflectionReport | None = None
    stats: Stats = field(default_factory=Stats)
    trace: tuple[str, ...] | None = None

    def to_json(self) -> dict:
        out: dict = {"verdict": self.verdict, "stats": self.stats.as_dict()}
        if self.reason is not None:
            out["reason"] = self.reason
        if self.model is not None:
            out["model"] = model_to_json(self.model)
        if self.witness is not None:
            out["witness"] = sorted(
                render_atom(a, "fo") for a in self.witness.atom_set()
            )
        if self.reflection is not None and not self.reflection.ok:
            out["unreflected"] = [
                render_atom(a, "fo") for a in self.reflection.violations
            ]
        if self.trace is not None:
            out["trace"] = list(self.trace)
        return out


def derive(
    problem: ProblemSpec,
    calc: Calculus,
    bounds: Bounds = Bounds(),
    strategy: str = "default",
    *,
    regularity: bool = True,
    clausify_conclusions: bool | None = None,
    trace: bool = False,
) -> TableauResult:
    """Run the tableau procedure on a problem under a calculus.

    Verdicts: unsat when every branch closes; sat when some branch
    saturates open and its extracted model reflects the branch (and meets
    the frame conditions in play); unknown when bounds are exhausted or
    when every open saturated branch fails reflection (the incompleteness
    diagnostic).
    """
    if problem.language == KMNOT and calc.language != KMNOT:
        raise EngineError(
            f"problem language {problem.language!r} is not supported by "
            f"calculus {calc.name!r} (language {calc.language!r})"
        )
    normalize = (
        clausify_conclusions
        if clausify_conclusions is not None
        else any(f.name == "hyp" for f in calc.schema_families)
    )
    stats = Stats(branches=1)
    log: list[str] | None = [] if trace else None
    root = Branch(0)
    root._rels.update(problem.relation_constants())
    for name in problem.root_constants():
        root.register_term(DConst(name))
    assertions = list(problem.assertions)
    if normalize:
        assertions = _normalized_batch(assertions, set(problem.propositions()))
    for atom in assertions:
        root.add_atom(atom)
    stats.max_terms = max(stats.max_terms, root.term_count())
    run = _Run(
        calc,
        bounds,
        strategy,
        regularity,
        normalize,
        stats,
        log,
        reserved=set(problem.propositions()) | set(root._props),
    )
    frames = sorted(set(problem.frame_conditions) | set(calc.frame_conditions))

    def done(log_list):
        return tuple(log_list) if log_list is not None else None

    if root.is_closed:
        return TableauResult(
            UNSAT, reason=root.closed_reason, stats=stats, trace=done(log)
        )
    first_bad: tuple[Branch, ReflectionReport | None, str] | None = None
    seen: list[Branch] = []
    for open_branch in _explore(root, run):
        seen.append(open_branch)
        try:
            model = extract_model(open_branch)
        except ModelError as err:
            if first_bad is None:
                first_bad = (open_branch, None, f"model extraction failed: {err}")
            continue
        report = reflects(model, open_branch)
        if not report.ok:
            if first_bad is None:
                first_bad = (
                    open_branch,
                    report,
                    "open saturated branch found, but its extracted model "
                    "does not reflect it (calculus incomplete for this input?)",
                )
            continue
        bad_frame = next(
            (c for c in frames if not check_frame_condition(model, c)), None
        )
        if bad_frame is not None:
            if first_bad is None:
                first_bad = (
                    open_branch,
                    report,
                    f"open saturated branch found, but its model violates "
                    f"frame condition {bad_frame!r}",
                )
            continue
        return TableauResult(
            SAT,
            model=model,
            witness=open_branch,
            saturated_branches=tuple(seen),
            reflection=report,
            stats=stats,
            trace=done(log),
        )
    if first_bad is not None:
        branch, report, reason = first_bad
        return TableauResult(
            UNKNOWN,
            reason=reason,
            witness=branch,
            saturated_branches=tuple(seen),
            reflection=report,
            stats=stats,
            trace=done(log),
        )
    if run.exhausted_reason is not None:
        return TableauResult(
            UNKNOWN, reason=run.exhausted_reason, stats=stats, trace=done(log)
        )
    return TableauResult(
        UNSAT, reason="all branches closed", stats=stats, trace=done(log)
    )
