"""Walk one problem through several calculi and show where reflection breaks.

The default problem pairs a negated-relation box with a refuting atom two
worlds away.  The basic calculus and the fully refined one both close every
branch, while the half-refined variant saturates on an open branch whose
extracted model does not reflect the branch: the diagnostic that separates
a sound refinement step from an unsound one.

Usage:
    python3 scripts/counterexample_walk.py
    python3 scripts/counterexample_walk.py --trace problems/my_case.tab
"""

from __future__ import annotations

import argparse
import json
import sys

from modaltab.catalog import builtin_calculus, builtin_names
from modaltab.engine import SAT, derive
from modaltab.models import model_to_json, render_atom
from modaltab.parser import parse_problem

DEFAULT_PROBLEM = "@a [--r]p\nrel(r, a, b)\n@b ~p\n"
DEFAULT_CALCULI = "kmnot-basic,kmnot-refined-incomplete,kmnot-refined"


def walk(problem_text: str, calculi: list[str], show_trace: bool) -> None:
    problem = parse_problem(problem_text)
    for name in calculi:
        result = derive(problem, builtin_calculus(name), trace=show_trace)
        print(f"== {name}: {result.verdict}")
        if result.reason is not None:
            print(f"   reason: {result.reason}")
        applications = ", ".join(
            f"{rule}={count}"
            for rule, count in sorted(result.stats.applications.items())
        )
        print(f"   applications: {applications or 'none'}")
        print(f"   branches: {result.stats.branches}")
        if show_trace and result.trace:
            for line in result.trace:
                print(f"   | {line}")
        if result.witness is not None and result.verdict != SAT:
            print("   open saturated branch:")
            for atom in sorted(
                render_atom(a, "fo") for a in result.witness.atom_set()
            ):
                print(f"     {atom}")
        if result.verdict == SAT:
            print("   model:")
            for line in json.dumps(
                model_to_json(result.model), indent=2, sort_keys=True
            ).splitlines():
                print(f"     {line}")
        if result.reflection is not None and not result.reflection.ok:
            print("   branch atoms the model fails to reflect:")
            for atom in result.reflection.violations:
                print(f"     {render_atom(atom, 'fo')}")
        print()


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        description="derive one problem under several calculi and report "
        "verdicts, open branches, and reflection failures"
    )
    parser.add_argument(
        "problem",
        nargs="?",
        help="problem file (defaults to the built-in two-world case)",
    )
    parser.add_argument(
        "--calculi",
        default=DEFAULT_CALCULI,
        help=f"comma-separated calculus names (default: {DEFAULT_CALCULI})",
    )
    parser.add_argument(
        "--trace", action="store_true", help="print every rule application"
    )
    args = parser.parse_args(argv)
    calculi = [name.strip() for name in args.calculi.split(",") if name.strip()]
    known = set(builtin_names())
    for name in calculi:
        if name not in known:
            print(f"error: unknown calculus {name!r}", file=sys.stderr)
            return 1
    if args.problem is None:
        text = DEFAULT_PROBLEM
        print("problem (built-in):")
    else:
        with open(args.problem, encoding="utf-8") as handle:
            text = handle.read()
        print(f"problem ({args.problem}):")
    for line in text.strip().splitlines():
        print(f"   {line}")
    print()
    walk(text, calculi, args.trace)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
