"""Brute-force finite-model search over Kripke models.

Ground truth for satisfiability checks: domains of size 1..max_domain are
enumerated exhaustively, relation and proposition valuations as binary
counters over lexicographically ordered fact tuples, and root constants over
all (not necessarily injective) assignments into the domain.  The fixed
order makes the first model found a reproducible value.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from modaltab.models import Model, check_frame_condition
from modaltab.syntax import (
    DConst,
    Equal,
    FBox,
    FNot,
    FOr,
    Formula,
    HoldsF,
    HoldsR,
    Nom,
    ProblemSpec,
    Prop,
    Relation,
    RelNot,
    atom_terms,
)

MODEL_FOUND = "model_found"
NO_MODEL = "no_model_up_to"

DEFAULT_MAX_DOMAIN = 4
DEFAULT_MAX_MODELS = 10_000_000


class OracleError(ValueError):
    """Raised for problems the oracle cannot ground (non-constant terms)."""


@dataclass(frozen=True)
class OracleResult:
    outcome: str  # MODEL_FOUND or NO_MODEL
    model: Model | None
    bound: int  # the max_domain that was requested
    models_checked: int
    capped: bool  # True when the candidate cap stopped the search early
    exhausted_size: int  # largest domain size that was fully enumerated

    @property
    def found(self) -> bool:
        return self.outcome == MODEL_FOUND

    def to_json_dict(self) -> dict:
        from modaltab.models import model_to_json

        out = {
            "outcome": self.outcome,
            "bound": self.bound,
            "models_checked": self.models_checked,
            "capped": self.capped,
            "exhausted_size": self.exhausted_size,
        }
        if self.model is not None:
            out["model"] = model_to_json(self.model)
        return out


class _CapHit(Exception):
    pass


def _eval_rel(rel: Relation, i: int, j: int, rel_val: set) -> bool:
    flip = False
    while isinstance(rel, RelNot):
        rel = rel.inner
        flip = not flip
    return ((rel.name, i, j) in rel_val) != flip


def _eval_fml(fml: Formula, w: int, rel_val: set, prop_val: set, n: int) -> bool:
    if isinstance(fml, Prop):
        return (fml.name, w) in prop_val
    if isinstance(fml, FNot):
        return not _eval_fml(fml.inner, w, rel_val, prop_val, n)
    if isinstance(fml, FOr):
        return _eval_fml(fml.left, w, rel_val, prop_val, n) or _eval_fml(
            fml.right, w, rel_val, prop_val, n
        )
    if isinstance(fml, FBox):
        return all(
            _eval_fml(fml.inner, v, rel_val, prop_val, n)
            for v in range(n)
            if _eval_rel(fml.rel, w, v, rel_val)
        )
    raise OracleError(f"cannot evaluate {fml!r}")  # Nom reaches here


def oracle_search(
    problem: ProblemSpec,
    max_domain: int = DEFAULT_MAX_DOMAIN,
    conds: frozenset[str] | None = None,
    max_models: int = DEFAULT_MAX_MODELS,
) -> OracleResult:
    """Search for a model of all assertions plus the frame conditions."""
    if conds is None:
        conds = problem.frame_conditions
    for atom in problem.assertions:
        for t in atom_terms(atom):
            if not isinstance(t, DConst):
                raise OracleError(f"non-constant term {t!r} in oracle problem")
        if isinstance(atom.payload, HoldsF) and isinstance(atom.payload.fml, Nom):
            raise OracleError("nominal survived encoding; not a ground problem")

    consts = problem.root_constants()
    props = list(problem.propositions())
    rels = list(problem.relation_constants())
    rel_only = [a for a in problem.assertions if not isinstance(a.payload, HoldsF)]
    fml_only = [a for a in problem.assertions if isinstance(a.payload, HoldsF)]

    checked = 0
    exhausted = 0

    def bump() -> None:
        nonlocal checked
        if checked >= max_models:
            raise _CapHit
        checked += 1

    def structural_ok(sigma: dict, rel_val: set) -> bool:
        for atom in rel_only:
            payload = atom.payload
            if isinstance(payload, HoldsR):
                got = _eval_rel(payload.rel, sigma[payload.src.name], sigma[payload.dst.name], rel_val)
            else:
                got = sigma[payload.lhs.name] == sigma[payload.rhs.name]
            if got != atom.positive:
                return False
        return True

    try:
        for n in range(1, max_domain + 1):
            triples = [(a, i, j) for a in rels for i in range(n) for j in range(n)]
            pairs = [(p, i) for p in props for i in range(n)]
            if consts:
                sigmas = [
                    dict(zip(consts, (0,) + tail))
                    for tail in product(range(n), repeat=len(consts) - 1)
                ]
            else:
                sigmas = [{}]
            for rel_mask in range(1 << len(triples)):
                rel_val = {t for b, t in enumerate(triples) if rel_mask >> b & 1}
                if conds:
                    probe = Model(
                        domain=frozenset(range(n)),
                        props=frozenset(props),
                        rels=frozenset(rels),
                        prop_val=frozenset(),
                        rel_val=frozenset(rel_val),
                    )
                    if not all(check_frame_condition(probe, c) for c in conds):
                        bump()  # the whole rel_val prefix is pruned; count it once
                        continue
                for sigma in sigmas:
                    if not structural_ok(sigma, rel_val):
                        bump()
                        continue
                    for prop_mask in range(1 << len(pairs)):
                        bump()
                        prop_val = {p for b, p in enumerate(pairs) if prop_mask >> b & 1}
                        ok = True
                        for atom in fml_only:
                            payload = atom.payload
                            value = _eval_fml(payload.fml, sigma[payload.at.name], rel_val, prop_val, n)
                            if value != atom.positive:
                                ok = False
                                break
                        if ok:
                            model = Model(
                                domain=frozenset(range(n)),
                                props=frozenset(props),
                                rels=frozenset(rels),
                                prop_val=frozenset(prop_val),
                                rel_val=frozenset(rel_val),
                                class_of={DConst(c): sigma[c] for c in consts},
                            )
                            return OracleResult(
                                outcome=MODEL_FOUND,
                                model=model,
                                bound=max_domain,
                                models_checked=checked,
                                capped=False,
                                exhausted_size=exhausted,
                            )
            exhausted = n
    except _CapHit:
        return OracleResult(
            outcome=NO_MODEL,
            model=None,
            bound=max_domain,
            models_checked=checked,
            capped=True,
            exhausted_size=exhausted,
        )
    return OracleResult(
        outcome=NO_MODEL,
        model=None,
        bound=max_domain,
        models_checked=checked,
        capped=False,
        exhausted_size=exhausted,
    )
