"""Built-in calculus catalog: basic, refined, hypertableau, and
frame-condition rule sets, plus the parametric rule families."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

from modaltab.rules import (
    AtomicOnly,
    ClauseShape,
    DVar,
    FVar,
    NotNegAtomic,
    OrShape,
    PSkF,
    PSkG,
    RVar,
    Rule,
    RuleError,
    canonical_rule,
    rule_to_json,
)
from modaltab.syntax import (
    KM,
    KMNOT,
    IMMEDIATE_PREDECESSOR,
    IRREFLEXIVE,
    Equal,
    FBox,
    FNot,
    FOr,
    HoldsF,
    HoldsR,
    RelNot,
    SignedAtom,
)

_p, _q = FVar("p"), FVar("q")
_r = RVar("r")
_x, _y, _z = DVar("x"), DVar("y"), DVar("z")


def _pos(payload) -> SignedAtom:
    return SignedAtom(True, payload)


def _neg(payload) -> SignedAtom:
    return SignedAtom(False, payload)


CLOSE_F = Rule(
    "close-f",
    frozenset({_pos(HoldsF(_p, _x)), _neg(HoldsF(_p, _x))}),
    (),
)
CLOSE_R = Rule(
    "close-r",
    frozenset({_pos(HoldsR(_r, _x, _y)), _neg(HoldsR(_r, _x, _y))}),
    (),
)
NOT_POS = Rule(
    "not-pos",
    frozenset({_pos(HoldsF(FNot(_p), _x))}),
    (frozenset({_neg(HoldsF(_p, _x))}),),
)
NOT_NEG = Rule(
    "not-neg",
    frozenset({_neg(HoldsF(FNot(_p), _x))}),
    (frozenset({_pos(HoldsF(_p, _x))}),),
)
OR_POS = Rule(
    "or-pos",
    frozenset({_pos(HoldsF(FOr(_p, _q), _x))}),
    (frozenset({_pos(HoldsF(_p, _x))}), frozenset({_pos(HoldsF(_q, _x))})),
)
OR_NEG = Rule(
    "or-neg",
    frozenset({_neg(HoldsF(FOr(_p, _q), _x))}),
    (frozenset({_neg(HoldsF(_p, _x)), _neg(HoldsF(_q, _x))}),),
)
BOX = Rule(
    "box",
    frozenset({_pos(HoldsF(FBox(_r, _p), _x))}),
    (frozenset({_neg(HoldsR(_r, _x, _y))}), frozenset({_pos(HoldsF(_p, _y))})),
)
DIA = Rule(
    "dia",
    frozenset({_neg(HoldsF(FBox(_r, _p), _x))}),
    (
        frozenset(
            {
                _pos(HoldsR(_r, _x, PSkF(_r, _p, _x))),
                _neg(HoldsF(_p, PSkF(_r, _p, _x))),
            }
        ),
    ),
)
BOX_PLUS = Rule(
    "box-plus",
    frozenset({_pos(HoldsF(FBox(_r, _p), _x)), _pos(HoldsR(_r, _x, _y))}),
    (frozenset({_pos(HoldsF(_p, _y))}),),
)
BOX_NOT = Rule(
    "box-not",
    frozenset({_pos(HoldsF(FBox(RelNot(_r), _p), _x))}),
    (frozenset({_pos(HoldsR(_r, _x, _y))}), frozenset({_pos(HoldsF(_p, _y))})),
)
RNEG_POS = Rule(
    "rneg-pos",
    frozenset({_pos(HoldsR(RelNot(_r), _x, _y))}),
    (frozenset({_neg(HoldsR(_r, _x, _y))}),),
)
RNEG_NEG = Rule(
    "rneg-neg",
    frozenset({_neg(HoldsR(RelNot(_r), _x, _y))}),
    (frozenset({_pos(HoldsR(_r, _x, _y))}),),
)

IRR_CLOSE = Rule("irr-close", frozenset({_pos(HoldsR(_r, _x, _x))}), ())

IP_EXISTS = Rule(
    "ip-exists",
    frozenset(),
    (frozenset({_pos(HoldsR(_r, PSkG(_r, _x), _x))}),),
)
IP_DISTINCT = Rule(
    "ip-distinct",
    frozenset(),
    (frozenset({_neg(Equal(_x, PSkG(_r, _x)))}),),
)
IP_BETWEEN = Rule(
    "ip-between",
    frozenset(),
    (
        frozenset({_neg(HoldsR(_r, PSkG(_r, _x), _z))}),
        frozenset({_neg(HoldsR(_r, _z, _x))}),
        frozenset({_pos(Equal(PSkG(_r, _x), _z))}),
        frozenset({_pos(Equal(_z, _x))}),
    ),
)
IP_EQ_CLOSE = Rule(
    "ip-eq-close",
    frozenset({_pos(Equal(_x, PSkG(_r, _x)))}),
    (),
)
IP_MERGE = Rule(
    "ip-merge",
    frozenset({_pos(HoldsR(_r, PSkG(_r, _x), _z)), _pos(HoldsR(_r, _z, _x))}),
    (
        frozenset({_pos(Equal(PSkG(_r, _x), _z))}),
        frozenset({_pos(Equal(_z, _x))}),
    ),
)


# ---------------------------------------------------------------------------
# parametric rule families


@lru_cache(maxsize=None)
def hyp_rule(m: int, n: int) -> Rule:
    """Clause with m negated atomic literals and n others, all m premises
    present: conclude one branch per positive literal; closure when n=0."""
    if m < 0 or n < 0 or m + n < 1:
        raise RuleError(f"hyp rule needs clause width >= 1, got m={m}, n={n}")
    x = DVar("x")
    ps = tuple(FVar(f"p{i + 1}") for i in range(m))
    qs = tuple(FVar(f"q{j + 1}") for j in range(n))
    numerator = {_pos(HoldsF(ClauseShape(ps, qs), x))}
    numerator.update(_pos(HoldsF(p, x)) for p in ps)
    denominators = tuple(frozenset({_pos(HoldsF(q, x))}) for q in qs)
    side = {AtomicOnly(p) for p in ps}
    side.update(NotNegAtomic(q) for q in qs)
    return Rule(f"hyp-{m}-{n}", frozenset(numerator), denominators, frozenset(side))


@lru_cache(maxsize=None)
def split_plus_rule(m: int, n: int) -> Rule:
    """Guarded clause split: one branch per literal, negated atomic literals
    contributing negative conclusions; atomic substitutions only."""
    if m < 0 or n < 0 or m + n < 2:
        raise RuleError(f"split rule needs clause width >= 2, got m={m}, n={n}")
    x = DVar("x")
    ps = tuple(FVar(f"p{i + 1}") for i in range(m))
    qs = tuple(FVar(f"q{j + 1}") for j in range(n))
    numerator = frozenset({_pos(HoldsF(ClauseShape(ps, qs), x))})
    denominators = tuple(frozenset({_neg(HoldsF(p, x))}) for p in ps) + tuple(
        frozenset({_pos(HoldsF(q, x))}) for q in qs
    )
    side = {AtomicOnly(p) for p in ps}
    side.update(NotNegAtomic(q) for q in qs)
    return Rule(f"split-plus-{m}-{n}", numerator, denominators, frozenset(side))


@lru_cache(maxsize=None)
def split_generic_rule(k: int) -> Rule:
    """Unguarded k-way disjunction split, one branch per disjunct."""
    if k < 2:
        raise RuleError(f"generic split needs width >= 2, got {k}")
    x = DVar("x")
    ds = tuple(FVar(f"d{i + 1}") for i in range(k))
    numerator = frozenset({_pos(HoldsF(OrShape(ds), x))})
    denominators = tuple(frozenset({_pos(HoldsF(d, x))}) for d in ds)
    return Rule(f"split-{k}", numerator, denominators)


@dataclass(frozen=True)
class RuleFamily:
    """Parametric rule generator, instantiated on demand by clause shape
    (m negated atomic literals, n other literals)."""

    name: str
    make: Callable[[int, int], Rule] = field(compare=False)

    def instantiate(self, m: int, n: int) -> Rule:
        return self.make(m, n)


HYP_FAMILY = RuleFamily("hyp", hyp_rule)
SPLIT_PLUS_FAMILY = RuleFamily("split", split_plus_rule)
SPLIT_GENERIC_FAMILY = RuleFamily("split-k", lambda m, n: split_generic_rule(m + n))

_FAMILIES = {f.name: f for f in (HYP_FAMILY, SPLIT_PLUS_FAMILY, SPLIT_GENERIC_FAMILY)}


def rule_family(name: str) -> RuleFamily:
    try:
        return _FAMILIES[name]
    except KeyError:
        raise RuleError(f"unknown rule family: {name}") from None


# ---------------------------------------------------------------------------
# calculi


@dataclass(frozen=True)
class Calculus:
    """Named ordered rule set; family order doubles as the matching
    preference order (earlier families are tried first)."""

    name: str
    rules: tuple[Rule, ...]
    language: str
    schema_families: tuple[RuleFamily, ...] = ()
    frame_conditions: frozenset[str] = frozenset()
    complete: bool = True

    def __post_init__(self) -> None:
        ids = [r.id for r in self.rules]
        if len(set(ids)) != len(ids):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise RuleError(f"duplicate rule ids in calculus {self.name}: {dupes}")

    def rule(self, rule_id: str) -> Rule:
        for r in self.rules:
            if r.id == rule_id:
                return r
        raise RuleError(f"calculus {self.name} has no rule {rule_id!r}")

    def rule_ids(self) -> tuple[str, ...]:
        return tuple(r.id for r in self.rules)

    def has_rule(self, rule_id: str) -> bool:
        return any(r.id == rule_id for r in self.rules)


def rule_set_equal(a: Calculus, b: Calculus) -> bool:
    """Equality of rule content modulo rule ids and variable renaming,
    including the schema families by name."""
    if frozenset(f.name for f in a.schema_families) != frozenset(
        f.name for f in b.schema_families
    ):
        return False
    return frozenset(canonical_rule(r) for r in a.rules) == frozenset(
        canonical_rule(r) for r in b.rules
    )


_KM_BASIC = (CLOSE_F, CLOSE_R, NOT_POS, NOT_NEG, OR_POS, OR_NEG, BOX, DIA)
_KM_REFINED = (CLOSE_F, CLOSE_R, NOT_POS, NOT_NEG, OR_POS, OR_NEG, BOX_PLUS, DIA)
_KMNOT_BASIC = _KM_BASIC + (RNEG_POS, RNEG_NEG)
_KMNOT_PLUS = _KMNOT_BASIC + (BOX_NOT,)
_KMNOT_REFINED = _KM_REFINED + (RNEG_POS, RNEG_NEG, BOX_NOT)
_KMNOT_REFINED_INCOMPLETE = _KM_REFINED + (RNEG_POS, RNEG_NEG)
_KMNOT_HYPER = tuple(r for r in _KMNOT_REFINED if r.id not in ("or-pos", "or-neg"))

_CATALOG = {
    "km-basic": Calculus("km-basic", _KM_BASIC, KM),
    "km-refined": Calculus("km-refined", _KM_REFINED, KM),
    "kmnot-basic": Calculus("kmnot-basic", _KMNOT_BASIC, KMNOT),
    "kmnot-plus": Calculus("kmnot-plus", _KMNOT_PLUS, KMNOT),
    "kmnot-refined": Calculus("kmnot-refined", _KMNOT_REFINED, KMNOT),
    "kmnot-refined-incomplete": Calculus(
        "kmnot-refined-incomplete", _KMNOT_REFINED_INCOMPLETE, KMNOT, complete=False
    ),
    "kmnot-hyper": Calculus(
        "kmnot-hyper",
        _KMNOT_HYPER,
        KMNOT,
        schema_families=(HYP_FAMILY, SPLIT_PLUS_FAMILY),
    ),
    "irr": Calculus(
        "irr", (IRR_CLOSE,), KM, frame_conditions=frozenset({IRREFLEXIVE})
    ),
    "imm-pred-basic": Calculus(
        "imm-pred-basic",
        (IP_EXISTS, IP_DISTINCT, IP_BETWEEN),
        KM,
        frame_conditions=frozenset({IMMEDIATE_PREDECESSOR}),
    ),
    "imm-pred-refined": Calculus(
        "imm-pred-refined",
        (IP_EXISTS, IP_EQ_CLOSE, IP_MERGE),
        KM,
        frame_conditions=frozenset({IMMEDIATE_PREDECESSOR}),
    ),
}


def builtin_calculus(name: str) -> Calculus:
    try:
        return _CATALOG[name]
    except KeyError:
        known = ", ".join(sorted(_CATALOG))
        raise RuleError(f"unknown calculus {name!r}; known: {known}") from None


def builtin_names() -> tuple[str, ...]:
    return tuple(sorted(_CATALOG))


def extend_calculus(base: Calculus, extension: Calculus) -> Calculus:
    """Base calculus plus the extension's rules (frame add-ons); duplicate
    rule content is kept once."""
    have = {canonical_rule(r) for r in base.rules}
    extra = tuple(r for r in extension.rules if canonical_rule(r) not in have)
    return Calculus(
        name=f"{base.name}+{extension.name}",
        rules=base.rules + extra,
        language=base.language,
        schema_families=base.schema_families
        + tuple(
            f
            for f in extension.schema_families
            if f.name not in {g.name for g in base.schema_families}
        ),
        frame_conditions=base.frame_conditions | extension.frame_conditions,
        complete=base.complete and extension.complete,
    )


def calculus_to_json(calc: Calculus) -> dict:
    return {
        "name": calc.name,
        "language": calc.language,
        "complete": calc.complete,
        "frame_conditions": sorted(calc.frame_conditions),
        "rules": [rule_to_json(r) for r in calc.rules],
        "schema_families": [f.name for f in calc.schema_families],
    }
