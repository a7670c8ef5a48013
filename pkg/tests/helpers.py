"""Independent brute-force oracles used to pin down expected test values."""

from __future__ import annotations

from itertools import product

from modaltab.syntax import FBox, FNot, FOr, Formula, Nom, Prop


def boolean_atoms(fml: Formula) -> list[Formula]:
    """Atoms of the Boolean skeleton: propositions, nominals, and boxed
    subformulas treated as opaque units, in first-appearance order."""
    out: list[Formula] = []

    def walk(f: Formula) -> None:
        if isinstance(f, FNot):
            walk(f.inner)
        elif isinstance(f, FOr):
            walk(f.left)
            walk(f.right)
        else:
            if f not in out:
                out.append(f)

    walk(fml)
    return out


def eval_boolean(fml: Formula, assignment: dict) -> bool:
    if isinstance(fml, FNot):
        return not eval_boolean(fml.inner, assignment)
    if isinstance(fml, FOr):
        return eval_boolean(fml.left, assignment) or eval_boolean(fml.right, assignment)
    return assignment[fml]


def truth_table_satisfiable(fml: Formula) -> bool:
    atoms = boolean_atoms(fml)
    for bits in product((False, True), repeat=len(atoms)):
        if eval_boolean(fml, dict(zip(atoms, bits))):
            return True
    return False


def clauses_satisfiable(clauses) -> bool:
    """Satisfiability of a clause list (negatives/positives of Formula),
    enumerating every atom including introduced definitions."""
    atoms: list[Formula] = []
    for cl in clauses:
        for lit in tuple(cl.negatives) + tuple(cl.positives):
            for atom in boolean_atoms(lit):
                if atom not in atoms:
                    atoms.append(atom)
    if not atoms:
        return all(cl.negatives or cl.positives for cl in clauses) and not clauses
    for bits in product((False, True), repeat=len(atoms)):
        assignment = dict(zip(atoms, bits))
        if all(
            any(not eval_boolean(n, assignment) for n in cl.negatives)
            or any(eval_boolean(p, assignment) for p in cl.positives)
            for cl in clauses
        ):
            return True
    return False


def literal_count(fml: Formula) -> int:
    """Number of literal occurrences in the Boolean skeleton."""
    if isinstance(fml, FNot):
        inner = fml.inner
        if isinstance(inner, (FNot, FOr)):
            return literal_count(inner)
        return 1
    if isinstance(fml, FOr):
        return literal_count(fml.left) + literal_count(fml.right)
    return 1
