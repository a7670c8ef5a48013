"""Command-line front-end: proving, calculus comparison with statistics,
model-search oracle runs, clausification, corpus generation, and calculus
dumps.

Exit codes: 0 when the requested work completed (bound-limited verdicts
included), 1 on usage errors (bad flags, unreadable files, unknown names,
parse failures), 2 on internal invariant violations such as a reflection
failure under a calculus that is supposed to be complete, or a hard
sat/unsat disagreement between compared calculi.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from dataclasses import dataclass, field

from modaltab.catalog import (
    Calculus,
    RuleError,
    builtin_calculus,
    builtin_names,
    calculus_to_json,
    extend_calculus,
)
from modaltab.engine import (
    SAT,
    UNKNOWN,
    UNSAT,
    Bounds,
    EngineError,
    TableauResult,
    derive,
)
from modaltab.models import ModelError, model_to_json
from modaltab.oracle import DEFAULT_MAX_DOMAIN, OracleError, oracle_search
from modaltab.parser import ParseError, parse_formula, parse_problem
from modaltab.refine import RefineError, clausify
from modaltab.syntax import (
    KM,
    KMNOT,
    DConst,
    FBox,
    FNot,
    FOr,
    Formula,
    HoldsF,
    ProblemSpec,
    Prop,
    RelConst,
    RelNot,
    SignedAtom,
    render_formula,
)


class CorpusError(ValueError):
    """Invalid corpus parameters."""


# ---------------------------------------------------------------------------
# corpus generation


@dataclass(frozen=True)
class CorpusParams:
    """Replayable random-problem parameters; generation is a pure function
    of this record."""

    seed: int
    count: int = 10
    max_formula_size: int = 14
    max_modal_depth: int = 3
    n_props: int = 3
    n_rels: int = 2
    language: str = KM
    negation_on_relations_probability: float = 0.0

    def __post_init__(self) -> None:
        if self.count < 0:
            raise CorpusError("count must be non-negative")
        if self.max_formula_size < 1:
            raise CorpusError("max_formula_size must be at least 1")
        if self.max_modal_depth < 0:
            raise CorpusError("max_modal_depth must be non-negative")
        if self.n_props < 1:
            raise CorpusError("n_props must be at least 1")
        if self.n_rels < 0:
            raise CorpusError("n_rels must be non-negative")
        if self.language not in (KM, KMNOT):
            raise CorpusError(f"language must be {KM!r} or {KMNOT!r}")
        if not 0.0 <= self.negation_on_relations_probability <= 1.0:
            raise CorpusError(
                "negation_on_relations_probability must be a fraction in [0, 1]"
            )


def _name_pool(count: int, short: tuple[str, ...], prefix: str) -> list[str]:
    if count <= len(short):
        return list(short[:count])
    return [f"{prefix}{i}" for i in range(count)]


def _random_formula(
    rng: random.Random,
    size: int,
    depth: int,
    props: list[Prop],
    rels: list[RelConst],
    negation_on_relations_probability: float,
) -> Formula:
    options = ["prop"]
    weights = [1]
    if size >= 2:
        options.append("not")
        weights.append(2)
    if size >= 3:
        options.append("or")
        weights.append(3)
    if size >= 2 and depth >= 1 and rels:
        options.append("box")
        weights.append(3)
    pick = rng.choices(options, weights)[0]
    if pick == "prop":
        return rng.choice(props)
    if pick == "not":
        return FNot(
            _random_formula(
                rng, size - 1, depth, props, rels,
                negation_on_relations_probability,
            )
        )
    if pick == "box":
        rel = rng.choice(rels)
        nots = 0
        while nots < 2 and rng.random() < negation_on_relations_probability:
            rel = RelNot(rel)
            nots += 1
        inner = _random_formula(
            rng, size - 1, depth - 1, props, rels, negation_on_relations_probability
        )
        return FBox(rel, inner)
    left_size = rng.randint(1, size - 2)
    right_size = size - 1 - left_size
    return FOr(
        _random_formula(
            rng, left_size, depth, props, rels,
            negation_on_relations_probability,
        ),
        _random_formula(
            rng, right_size, depth, props, rels,
            negation_on_relations_probability,
        ),
    )


def generate_corpus(params: CorpusParams) -> list[ProblemSpec]:
    """Seeded random problems: each is a single positive root assertion at
    the constant a, honoring the size and modal-depth caps."""
    rng = random.Random(params.seed)
    props = [Prop(n) for n in _name_pool(params.n_props, ("p", "q", "s"), "p")]
    rels = [RelConst(n) for n in _name_pool(params.n_rels, ("r", "t"), "r")]
    relnot = (
        params.negation_on_relations_probability
        if params.language == KMNOT
        else 0.0
    )
    out = []
    for _ in range(params.count):
        fml = _random_formula(
            rng, params.max_formula_size, params.max_modal_depth, props, rels, relnot
        )
        atom = SignedAtom(True, HoldsF(fml, DConst("a")))
        out.append(ProblemSpec((atom,), language=params.language))
    return out


# ---------------------------------------------------------------------------
# comparison report


@dataclass(frozen=True)
class CompareCell:
    problem: str
    calculus: str
    verdict: str
    reason: str | None
    applications: dict[str, int]
    branches: int
    max_terms: int
    seconds: float
    reflection_failed: bool
    calculus_complete: bool

    def to_json(self) -> dict:
        return {
            "problem": self.problem,
            "calculus": self.calculus,
            "verdict": self.verdict,
            "reason": self.reason,
            "applications": dict(sorted(self.applications.items())),
            "branches": self.branches,
            "max_terms": self.max_terms,
            "seconds": round(self.seconds, 6),
        }


@dataclass(frozen=True)
class CompareReport:
    """Per problem-and-calculus derivation statistics plus the pairwise
    verdict-agreement matrix.  Hard disagreements (sat against unsat) and
    reflection failures under complete calculi are flagged."""

    problems: tuple[str, ...]
    calculi: tuple[str, ...]
    cells: tuple[CompareCell, ...] = field(default_factory=tuple)

    def _verdict(self, problem: str, calculus: str) -> str:
        for cell in self.cells:
            if cell.problem == problem and cell.calculus == calculus:
                return cell.verdict
        raise KeyError((problem, calculus))

    def agreement(self) -> dict[tuple[str, str], int]:
        """Symmetric matrix: problems on which two calculi gave the same
        verdict."""
        out: dict[tuple[str, str], int] = {}
        for a in self.calculi:
            for b in self.calculi:
                out[(a, b)] = sum(
                    1
                    for prob in self.problems
                    if self._verdict(prob, a) == self._verdict(prob, b)
                )
        return out

    def hard_disagreements(self) -> list[tuple[str, str, str, str, str]]:
        """(problem, calculus, verdict, calculus, verdict) entries where one
        side proved unsat and the other found a verified model; decided
        against unknown is tolerated."""
        out = []
        for prob in self.problems:
            for i, a in enumerate(self.calculi):
                for b in self.calculi[i + 1 :]:
                    va, vb = self._verdict(prob, a), self._verdict(prob, b)
                    if {va, vb} == {SAT, UNSAT}:
                        out.append((prob, a, va, b, vb))
        return out

    def reflection_flags(self) -> list[tuple[str, str]]:
        """(problem, calculus) cells where a calculus that should be
        complete produced an unreflected open branch."""
        return [
            (cell.problem, cell.calculus)
            for cell in self.cells
            if cell.reflection_failed and cell.calculus_complete
        ]

    @property
    def flagged(self) -> bool:
        return bool(self.hard_disagreements() or self.reflection_flags())

    def to_json(self) -> dict:
        return {
            "problems": list(self.problems),
            "calculi": list(self.calculi),
            "cells": [cell.to_json() for cell in self.cells],
            "agreement": {
                a: {b: self.agreement()[(a, b)] for b in self.calculi}
                for a in self.calculi
            },
            "hard_disagreements": [list(row) for row in self.hard_disagreements()],
            "reflection_flags": [list(row) for row in self.reflection_flags()],
        }


def _reflection_failed(result: TableauResult) -> bool:
    return (
        result.verdict == UNKNOWN
        and result.reflection is not None
        and not result.reflection.ok
    )


def compare_problems(
    problems: list[tuple[str, ProblemSpec]],
    calculi: list[Calculus],
    bounds: Bounds = Bounds(),
    strategy: str = "default",
) -> CompareReport:
    cells = []
    for label, problem in problems:
        for calc in calculi:
            start = time.perf_counter()
            result = derive(problem, calc, bounds, strategy)
            elapsed = time.perf_counter() - start
            cells.append(
                CompareCell(
                    problem=label,
                    calculus=calc.name,
                    verdict=result.verdict,
                    reason=result.reason,
                    applications=dict(result.stats.applications),
                    branches=result.stats.branches,
                    max_terms=result.stats.max_terms,
                    seconds=elapsed,
                    reflection_failed=_reflection_failed(result),
                    calculus_complete=calc.complete,
                )
            )
    return CompareReport(
        problems=tuple(label for label, _ in problems),
        calculi=tuple(calc.name for calc in calculi),
        cells=tuple(cells),
    )


# ---------------------------------------------------------------------------
# command-line plumbing


class _UsageError(Exception):
    pass


_FRAME_CALCULI = {
    "irr": "irr",
    "imm-pred": "imm-pred-refined",
    "imm-pred-basic": "imm-pred-basic",
}


def _load_problem(path: str) -> ProblemSpec:
    try:
        with open(path, encoding="utf-8") as handle:
            text = handle.read()
    except OSError as err:
        raise _UsageError(f"cannot read {path}: {err}")
    return parse_problem(text)


def _build_calculus(name: str, frames: list[str]) -> Calculus:
    calc = builtin_calculus(name)
    for frame in frames:
        calc = extend_calculus(calc, builtin_calculus(_FRAME_CALCULI[frame]))
    return calc


def _bounds_from(args: argparse.Namespace) -> Bounds:
    return Bounds(
        max_terms=args.max_terms,
        max_applications=args.max_steps,
        max_branches=args.max_branches,
    )


def _add_bounds_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--max-terms", type=int, default=64)
    sub.add_argument("--max-steps", type=int, default=20000)
    sub.add_argument("--max-branches", type=int, default=4096)
    sub.add_argument("--strategy", default="default")


def _add_corpus_flags(sub: argparse.ArgumentParser, require_seed: bool) -> None:
    sub.add_argument("--seed", type=int, required=require_seed)
    sub.add_argument("--count", type=int, default=10)
    sub.add_argument("--max-formula-size", type=int, default=14)
    sub.add_argument("--max-modal-depth", type=int, default=3)
    sub.add_argument("--n-props", type=int, default=3)
    sub.add_argument("--n-rels", type=int, default=2)
    sub.add_argument("--language", choices=[KM, KMNOT], default=KM)
    sub.add_argument("--relnot-prob", type=float, default=0.0)


def _params_from(args: argparse.Namespace) -> CorpusParams:
    return CorpusParams(
        seed=args.seed,
        count=args.count,
        max_formula_size=args.max_formula_size,
        max_modal_depth=args.max_modal_depth,
        n_props=args.n_props,
        n_rels=args.n_rels,
        language=args.language,
        negation_on_relations_probability=args.relnot_prob,
    )


def _emit_json(payload: dict) -> None:
    print(json.dumps(payload, indent=2, sort_keys=True))


def _cmd_prove(args: argparse.Namespace) -> int:
    problem = _load_problem(args.file)
    calc = _build_calculus(args.calculus, args.frame)
    result = derive(
        problem, calc, _bounds_from(args), args.strategy, trace=args.trace
    )
    invariant_broken = _reflection_failed(result) and calc.complete
    if args.json:
        payload = result.to_json()
        payload["problem"] = args.file
        payload["calculus"] = calc.name
        if invariant_broken:
            payload["invariant_violation"] = (
                "reflection failure under a complete calculus"
            )
        _emit_json(payload)
        return 2 if invariant_broken else 0
    print(f"verdict: {result.verdict}")
    if result.reason:
        print(f"reason: {result.reason}")
    apps = ", ".join(
        f"{rule}={count}"
        for rule, count in sorted(result.stats.applications.items())
    )
    print(f"applications: {apps if apps else 'none'}")
    print(f"branches: {result.stats.branches}")
    print(f"max terms: {result.stats.max_terms}")
    if result.reflection is not None and not result.reflection.ok:
        print(result.reflection.describe())
    if args.emit_model and result.model is not None:
        print(json.dumps(model_to_json(result.model), indent=2, sort_keys=True))
    if args.trace and result.trace:
        print("trace:")
        for line in result.trace:
            print(f"  {line}")
    if invariant_broken:
        print("invariant violation: reflection failure under a complete calculus")
        return 2
    return 0


def _cmd_compare(args: argparse.Namespace) -> int:
    if args.file:
        problems = [(path, _load_problem(path)) for path in args.file]
    elif args.seed is not None:
        corpus = generate_corpus(_params_from(args))
        problems = [(f"gen[{i}]", prob) for i, prob in enumerate(corpus)]
    else:
        raise _UsageError("compare needs problem files or --seed for a corpus")
    names = [name.strip() for name in args.calculi.split(",") if name.strip()]
    if not names:
        raise _UsageError("--calculi needs at least one calculus name")
    calculi = [_build_calculus(name, []) for name in names]
    report = compare_problems(problems, calculi, _bounds_from(args), args.strategy)
    if args.json:
        _emit_json(report.to_json())
        return 2 if report.flagged else 0
    for label, _ in problems:
        print(f"{label}:")
        for cell in report.cells:
            if cell.problem != label:
                continue
            print(
                f"  {cell.calculus}: {cell.verdict}"
                f" applications={sum(cell.applications.values())}"
                f" branches={cell.branches}"
                f" max-terms={cell.max_terms}"
                f" time={cell.seconds:.3f}s"
            )
    agreement = report.agreement()
    print("agreement:")
    for i, a in enumerate(report.calculi):
        for b in report.calculi[i + 1 :]:
            print(f"  {a} vs {b}: {agreement[(a, b)]}/{len(report.problems)}")
    hard = report.hard_disagreements()
    flags = report.reflection_flags()
    if hard:
        print("hard disagreements:")
        for prob, a, va, b, vb in hard:
            print(f"  {prob}: {a}={va} vs {b}={vb}")
    if flags:
        print("reflection failures under complete calculi:")
        for prob, calc_name in flags:
            print(f"  {prob}: {calc_name}")
    if not hard and not flags:
        print("no flags")
    return 2 if report.flagged else 0


def _cmd_oracle(args: argparse.Namespace) -> int:
    problem = _load_problem(args.file)
    conds = frozenset(problem.frame_conditions) | {
        "imm-pred" if f.startswith("imm-pred") else f for f in args.frame
    }
    result = oracle_search(problem, max_domain=args.max_domain, conds=conds)
    if args.json:
        _emit_json(result.to_json_dict())
        return 0
    print(f"outcome: {result.outcome}")
    print(f"bound: {result.bound}")
    print(f"models checked: {result.models_checked}")
    if result.model is not None:
        print(json.dumps(model_to_json(result.model), indent=2, sort_keys=True))
    return 0


def _cmd_clausify(args: argparse.Namespace) -> int:
    fml = parse_formula(args.formula)
    clauses = clausify(fml)
    if args.json:
        _emit_json(
            {
                "formula": render_formula(fml),
                "clauses": [clause.render() for clause in clauses],
            }
        )
        return 0
    for clause in clauses:
        print(clause.render())
    return 0


def _cmd_gen(args: argparse.Namespace) -> int:
    params = _params_from(args)
    corpus = generate_corpus(params)
    print(
        f"# corpus seed={params.seed} count={params.count}"
        f" size<={params.max_formula_size} depth<={params.max_modal_depth}"
        f" language={params.language}"
    )
    for problem in corpus:
        fml = problem.assertions[0].payload.fml
        print(f"@a {render_formula(fml)}")
    return 0


def _cmd_show_calculus(args: argparse.Namespace) -> int:
    calc = builtin_calculus(args.name)
    _emit_json(calculus_to_json(calc))
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="modaltab",
        description="Tableau workbench for multi-modal logic with relation negation.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    prove = subparsers.add_parser("prove", help="derive a verdict for a problem file")
    prove.add_argument("file")
    prove.add_argument("--calculus", default="kmnot-refined")
    prove.add_argument(
        "--frame",
        action="append",
        choices=sorted(_FRAME_CALCULI),
        default=[],
        help="extend the calculus with frame-condition rules",
    )
    prove.add_argument("--trace", action="store_true")
    prove.add_argument("--emit-model", action="store_true")
    prove.add_argument("--json", action="store_true")
    _add_bounds_flags(prove)
    prove.set_defaults(func=_cmd_prove)

    compare = subparsers.add_parser(
        "compare", help="run several calculi over problems and compare verdicts"
    )
    compare.add_argument("file", nargs="*")
    compare.add_argument("--calculi", required=True)
    compare.add_argument("--json", action="store_true")
    _add_bounds_flags(compare)
    _add_corpus_flags(compare, require_seed=False)
    compare.set_defaults(func=_cmd_compare)

    oracle = subparsers.add_parser(
        "oracle", help="brute-force model search over small domains"
    )
    oracle.add_argument("file")
    oracle.add_argument("--max-domain", type=int, default=DEFAULT_MAX_DOMAIN)
    oracle.add_argument(
        "--frame",
        action="append",
        choices=sorted(_FRAME_CALCULI),
        default=[],
    )
    oracle.add_argument("--json", action="store_true")
    oracle.set_defaults(func=_cmd_oracle)

    clause = subparsers.add_parser(
        "clausify", help="definitional clausal form of a formula's Boolean skeleton"
    )
    clause.add_argument("formula")
    clause.add_argument("--json", action="store_true")
    clause.set_defaults(func=_cmd_clausify)

    gen = subparsers.add_parser("gen", help="emit a seeded random problem corpus")
    _add_corpus_flags(gen, require_seed=True)
    gen.set_defaults(func=_cmd_gen)

    show = subparsers.add_parser(
        "show-calculus", help="dump a built-in calculus as JSON"
    )
    show.add_argument("name", choices=builtin_names())
    show.set_defaults(func=_cmd_show_calculus)

    return parser


def run_cli(argv: list[str]) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_request:
        return 0 if exit_request.code in (0, None) else 1
    try:
        return args.func(args)
    except _UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except (
        ParseError,
        RuleError,
        RefineError,
        EngineError,
        OracleError,
        ModelError,
        CorpusError,
    ) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


def main(argv: list[str] | None = None) -> int:
    return run_cli(list(sys.argv[1:]) if argv is None else list(argv))


if __name__ == "__main__":
    sys.exit(main())
