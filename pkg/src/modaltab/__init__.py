"""Workbench for tableau calculi for the modal logics K_m and K_m(not).

Calculi are plain data (rules with premise and conclusion patterns over
signed atoms), so they can be run, compared, and transformed: rule
refinement, the atomic refinement condition, hypertableau conversion with a
definitional clausifier, frame-condition rules, model extraction from open
branches, and a brute-force finite Kripke-model oracle for cross-checking.
"""

from .syntax import (  # noqa: F401
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
    Nom,
    ProblemSpec,
    Prop,
    RelConst,
    RelNot,
    SignedAtom,
    SkF,
    SkG,
    neg,
    pos,
)
from .parser import ParseError, parse_atom, parse_formula, parse_problem  # noqa: F401

__all__ = [
    "KM",
    "KMNOT",
    "DConst",
    "Equal",
    "FBox",
    "FNot",
    "FOr",
    "Formula",
    "HoldsF",
    "HoldsR",
    "Nom",
    "ParseError",
    "ProblemSpec",
    "Prop",
    "RelConst",
    "RelNot",
    "SignedAtom",
    "SkF",
    "SkG",
    "neg",
    "parse_atom",
    "parse_formula",
    "parse_problem",
    "pos",
]
