"""Compare branching behaviour of calculi over a seeded random corpus.

Generates one corpus, derives every problem under each requested calculus,
and prints per-calculus aggregates: verdict counts, branch statistics, rule
applications, and wall time.  Handy for watching the hypertableau variant
keep premise-guarded problems on a single branch where the splitting
calculi fork.

Usage:
    python3 scripts/branching_stats.py --seed 11
    python3 scripts/branching_stats.py --seed 11 --language kmnot --count 500
"""

from __future__ import annotations

import argparse
import sys
import time

from modaltab.catalog import builtin_calculus, builtin_names
from modaltab.cli import CorpusParams, generate_corpus
from modaltab.engine import SAT, UNKNOWN, UNSAT, Bounds, derive
from modaltab.syntax import KM, KMNOT

DEFAULT_BY_LANGUAGE = {
    KM: "km-basic,km-refined",
    KMNOT: "kmnot-plus,kmnot-refined,kmnot-hyper",
}


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        description="derive a generated corpus under several calculi and "
        "print branching statistics"
    )
    parser.add_argument("--seed", type=int, required=True)
    parser.add_argument("--count", type=int, default=200)
    parser.add_argument("--max-formula-size", type=int, default=14)
    parser.add_argument("--max-modal-depth", type=int, default=3)
    parser.add_argument(
        "--language", choices=(KM, KMNOT), default=KMNOT
    )
    parser.add_argument(
        "--relnot-prob",
        type=float,
        default=0.4,
        help="probability of negating a relation under a box (kmnot only)",
    )
    parser.add_argument(
        "--calculi",
        default=None,
        help="comma-separated calculus names (default depends on language)",
    )
    parser.add_argument("--max-terms", type=int, default=64)
    parser.add_argument("--max-steps", type=int, default=20000)
    parser.add_argument("--max-branches", type=int, default=4096)
    args = parser.parse_args(argv)

    spec = args.calculi or DEFAULT_BY_LANGUAGE[args.language]
    calculi = [name.strip() for name in spec.split(",") if name.strip()]
    known = set(builtin_names())
    for name in calculi:
        if name not in known:
            print(f"error: unknown calculus {name!r}", file=sys.stderr)
            return 1
    relnot = args.relnot_prob if args.language == KMNOT else 0.0
    corpus = generate_corpus(
        CorpusParams(
            seed=args.seed,
            count=args.count,
            max_formula_size=args.max_formula_size,
            max_modal_depth=args.max_modal_depth,
            language=args.language,
            negation_on_relations_probability=relnot,
        )
    )
    bounds = Bounds(
        max_terms=args.max_terms,
        max_applications=args.max_steps,
        max_branches=args.max_branches,
    )
    print(
        f"corpus: seed={args.seed} count={args.count} "
        f"language={args.language}"
    )
    header = (
        f"{'calculus':<22} {'sat':>5} {'unsat':>5} {'unk':>5} "
        f"{'branches mean':>13} {'max':>5} {'applications':>12} "
        f"{'time':>8}"
    )
    print(header)
    print("-" * len(header))
    for name in calculi:
        calc = builtin_calculus(name)
        tallies = {SAT: 0, UNSAT: 0, UNKNOWN: 0}
        branch_counts = []
        applications = 0
        start = time.perf_counter()
        for problem in corpus:
            result = derive(problem, calc, bounds)
            tallies[result.verdict] += 1
            branch_counts.append(result.stats.branches)
            applications += result.stats.total_applications
        elapsed = time.perf_counter() - start
        mean = sum(branch_counts) / len(branch_counts)
        print(
            f"{name:<22} {tallies[SAT]:>5} {tallies[UNSAT]:>5} "
            f"{tallies[UNKNOWN]:>5} {mean:>13.2f} {max(branch_counts):>5} "
            f"{applications:>12} {elapsed:>7.2f}s"
        )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
