"""Rule matching, instantiation, application, and the built-in catalog."""

from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from modaltab.catalog import (
    BOX,
    BOX_NOT,
    BOX_PLUS,
    CLOSE_F,
    DIA,
    IP_BETWEEN,
    IP_EQ_CLOSE,
    IP_EXISTS,
    IRR_CLOSE,
    Calculus,
    builtin_calculus,
    builtin_names,
    calculus_to_json,
    extend_calculus,
    hyp_rule,
    rule_family,
    rule_set_equal,
    split_generic_rule,
    split_plus_rule,
)
from modaltab.models import ModelError, diagnose_general_condition
from modaltab.rules import (
    AtomicOnly,
    DVar,
    FVar,
    RVar,
    Rule,
    RuleError,
    apply_instantiation,
    match_rule,
    render_pattern_atom,
    rule_to_json,
    rules_equal,
)
from modaltab.syntax import (
    DConst,
    Equal,
    FBox,
    FNot,
    FOr,
    HoldsF,
    HoldsR,
    Prop,
    RelConst,
    RelNot,
    SignedAtom,
    SkF,
    SkG,
    flatten_or,
    is_negated_atomic,
    render_atom,
)

from .strategies import signed_atoms


def pos_f(fml, t):
    return SignedAtom(True, HoldsF(fml, t))


def neg_f(fml, t):
    return SignedAtom(False, HoldsF(fml, t))


def pos_r(rel, s, d):
    return SignedAtom(True, HoldsR(rel, s, d))


A, B, I = DConst("a"), DConst("b"), DConst("i")
P, Q, S = Prop("p"), Prop("q"), Prop("s")
R, T = RelConst("r"), RelConst("t")


def subs(instantiations):
    return [dict(inst.rendered_substitution()) for inst in instantiations]


class TestMatching:
    def test_box_enumerates_free_target_over_branch_terms(self):
        branch = {pos_f(FBox(R, P), A), pos_f(Q, B)}
        insts = match_rule(BOX, branch)
        assert subs(insts) == [
            {"p": "p", "r": "r", "x": "a", "y": "a"},
            {"p": "p", "r": "r", "x": "a", "y": "b"},
        ]

    def test_box_plus_matches_exactly_once(self):
        branch = {pos_f(FBox(R, P), A), pos_r(R, A, B)}
        insts = match_rule(BOX_PLUS, branch)
        assert subs(insts) == [{"p": "p", "r": "r", "x": "a", "y": "b"}]

    def test_hyp_premise_missing_yields_nothing(self):
        branch = {pos_f(FOr(FNot(P), Q), I)}
        assert match_rule(hyp_rule(1, 1), branch) == ()

    def test_hyp_premise_present_concludes_without_branching(self):
        branch = {pos_f(FOr(FNot(P), Q), I), pos_f(P, I)}
        (inst,) = match_rule(hyp_rule(1, 1), branch)
        assert apply_instantiation(branch, inst) == [frozenset({pos_f(Q, I)})]

    def test_hyp_all_negative_clause_closes(self):
        clause = FOr(FNot(P), FNot(Q))
        branch = {pos_f(clause, I), pos_f(P, I), pos_f(Q, I)}
        (inst,) = match_rule(hyp_rule(2, 0), branch)
        assert inst.closes
        assert apply_instantiation(branch, inst) == []

    def test_negated_compound_literal_counts_as_positive(self):
        clause = FOr(FNot(FOr(P, Q)), S)
        branch = {pos_f(clause, I)}
        assert match_rule(hyp_rule(1, 1), branch) == ()
        (inst,) = match_rule(hyp_rule(0, 2), branch)
        got = dict(inst.rendered_substitution())
        assert got == {"q1": "~(p | q)", "q2": "s", "x": "i"}

    def test_clause_matching_ignores_literal_order(self):
        branch = {pos_f(FOr(Q, FNot(P)), I), pos_f(P, I)}
        (inst,) = match_rule(hyp_rule(1, 1), branch)
        assert apply_instantiation(branch, inst) == [frozenset({pos_f(Q, I)})]

    def test_atomic_only_side_condition_rejects_compound_binding(self):
        p, x = FVar("p"), DVar("x")
        guarded = Rule(
            "guarded-not",
            frozenset({pos_f(FNot(p), x)}),
            (frozenset({neg_f(p, x)}),),
            frozenset({AtomicOnly(p)}),
        )
        assert match_rule(guarded, {pos_f(FNot(FOr(P, Q)), A)}) == ()
        assert len(match_rule(guarded, {pos_f(FNot(P), A)})) == 1

    def test_repeated_variable_requires_equal_arguments(self):
        assert len(match_rule(IRR_CLOSE, {pos_r(R, A, A)})) == 1
        assert match_rule(IRR_CLOSE, {pos_r(R, A, B)}) == ()

    def test_box_matches_negated_relation_modally(self):
        branch = {pos_f(FBox(RelNot(RelNot(R)), P), A), pos_f(Q, B)}
        insts = match_rule(BOX, branch)
        assert {s["r"] for s in subs(insts)} == {"--r"}

    def test_premise_free_rule_fires_per_term_and_relation(self):
        branch = {pos_f(P, A), pos_r(R, A, B)}
        insts = match_rule(IP_EXISTS, branch)
        assert subs(insts) == [{"r": "r", "x": "a"}, {"r": "r", "x": "b"}]
        assert insts[0].numerator_atoms() == ()

    def test_premise_free_rule_with_two_free_terms(self):
        branch = {pos_f(P, A), pos_r(R, A, B)}
        insts = match_rule(IP_BETWEEN, branch)
        assert len(insts) == 4  # x and z each over {a, b}

    def test_positive_equality_matches_through_stored_equations(self):
        g = SkG(R, A)
        branch = {SignedAtom(True, Equal(A, g)), pos_r(R, g, A)}
        insts = match_rule(IP_EQ_CLOSE, branch)
        assert len(insts) == 1 and insts[0].closes

    def test_positive_equality_needs_an_actual_equation(self):
        branch = {pos_r(R, A, SkG(R, A))}
        assert match_rule(IP_EQ_CLOSE, branch) == ()

    def test_free_formula_variable_is_an_error(self):
        p, x = FVar("p"), DVar("x")
        bad = Rule(
            "bad", frozenset({pos_f(P, x)}), (frozenset({pos_f(p, x)}),)
        )
        with pytest.raises(RuleError):
            match_rule(bad, {pos_f(P, A)})

    def test_match_is_deterministic(self):
        branch = {pos_f(FBox(R, P), A), pos_r(R, A, B), pos_f(Q, B)}
        first = match_rule(BOX, branch)
        second = match_rule(BOX, frozenset(branch))
        assert [i.rendered_substitution() for i in first] == [
            i.rendered_substitution() for i in second
        ]

    def test_matched_atoms_lie_on_branch(self):
        branch = {pos_f(FBox(R, P), A), pos_r(R, A, B)}
        for inst in match_rule(BOX_PLUS, branch):
            assert inst.matched <= branch


class TestApplication:
    def test_diamond_introduces_skolem_witness(self):
        branch = {neg_f(FBox(R, P), A)}
        (inst,) = match_rule(DIA, branch)
        w = SkF(R, P, A)
        assert apply_instantiation(branch, inst) == [
            frozenset({pos_r(R, A, w), neg_f(P, w)})
        ]

    def test_closure_rule_returns_empty_and_closes(self):
        branch = {pos_f(P, A), neg_f(P, A)}
        (inst,) = match_rule(CLOSE_F, branch)
        assert inst.closes
        assert apply_instantiation(branch, inst) == []

    def test_application_is_idempotent_on_atom_sets(self):
        branch = {neg_f(FBox(R, P), A)}
        (inst,) = match_rule(DIA, branch)
        [concl] = apply_instantiation(branch, inst)
        grown = frozenset(branch) | concl
        assert grown | concl == grown

    def test_skolem_terms_depend_only_on_substitution(self):
        branch = {neg_f(FBox(R, P), A)}
        first = apply_instantiation(branch, match_rule(DIA, branch)[0])
        second = apply_instantiation(set(branch), match_rule(DIA, set(branch))[0])
        assert first == second

    def test_generic_split_branches_per_disjunct(self):
        branch = {pos_f(FOr(FNot(P), Q), A)}
        (inst,) = match_rule(split_generic_rule(2), branch)
        assert apply_instantiation(branch, inst) == [
            frozenset({pos_f(FNot(P), A)}),
            frozenset({pos_f(Q, A)}),
        ]

    def test_guarded_split_negates_atomic_literals(self):
        branch = {pos_f(FOr(FNot(P), Q), A)}
        (inst,) = match_rule(split_plus_rule(1, 1), branch)
        assert apply_instantiation(branch, inst) == [
            frozenset({neg_f(P, A)}),
            frozenset({pos_f(Q, A)}),
        ]


class TestCatalog:
    def test_known_names(self):
        assert builtin_names() == (
            "imm-pred-basic",
            "imm-pred-refined",
            "irr",
            "km-basic",
            "km-refined",
            "kmnot-basic",
            "kmnot-hyper",
            "kmnot-plus",
            "kmnot-refined",
            "kmnot-refined-incomplete",
        )
        with pytest.raises(RuleError):
            builtin_calculus("km-ultra")

    def test_kmnot_plus_contains_exact_box_not(self):
        calc = builtin_calculus("kmnot-plus")
        rule = calc.rule("box-not")
        p, r, x, y = FVar("p"), RVar("r"), DVar("x"), DVar("y")
        expected = Rule(
            "any",
            frozenset({pos_f(FBox(RelNot(r), p), x)}),
            (frozenset({pos_r(r, x, y)}), frozenset({pos_f(p, y)})),
        )
        assert rules_equal(rule, expected)
        [(first_pat,), _] = [sorted(d, key=render_pattern_atom) for d in rule.denominators]
        assert isinstance(first_pat.payload, HoldsR) and first_pat.positive

    def test_km_refined_has_no_negative_relation_conclusion(self):
        calc = builtin_calculus("km-refined")
        for rule in calc.rules:
            for denom in rule.denominators:
                for pat in denom:
                    assert not (
                        isinstance(pat.payload, HoldsR) and not pat.positive
                    )

    def test_irr_is_a_single_closure_rule(self):
        calc = builtin_calculus("irr")
        assert len(calc.rules) == 1
        assert calc.rules[0].is_closure
        assert rules_equal(calc.rules[0], IRR_CLOSE)

    def test_basic_box_lists_relation_denominator_first(self):
        rule = builtin_calculus("km-basic").rule("box")
        (first,) = [
            i
            for i, d in enumerate(rule.denominators)
            if any(isinstance(p.payload, HoldsR) for p in d)
        ]
        assert first == 0

    def test_incomplete_variant_is_flagged(self):
        assert builtin_calculus("kmnot-refined").complete
        assert not builtin_calculus("kmnot-refined-incomplete").complete

    def test_hyper_catalog_drops_disjunction_rules_and_adds_families(self):
        calc = builtin_calculus("kmnot-hyper")
        assert not calc.has_rule("or-pos") and not calc.has_rule("or-neg")
        assert [f.name for f in calc.schema_families] == ["hyp", "split"]
        assert rules_equal(calc.schema_families[0].instantiate(1, 1), hyp_rule(1, 1))

    def test_rule_family_lookup(self):
        assert rule_family("hyp").instantiate(2, 1) is hyp_rule(2, 1)
        with pytest.raises(RuleError):
            rule_family("merge")

    def test_extend_calculus_merges_rules_and_conditions(self):
        base = builtin_calculus("km-refined")
        ext = extend_calculus(base, builtin_calculus("irr"))
        assert ext.name == "km-refined+irr"
        assert ext.has_rule("irr-close")
        assert ext.frame_conditions == frozenset({"irr"})
        again = extend_calculus(ext, builtin_calculus("irr"))
        assert len(again.rules) == len(ext.rules)

    def test_duplicate_rule_ids_rejected(self):
        with pytest.raises(RuleError):
            Calculus("twice", (IRR_CLOSE, IRR_CLOSE), "km")

    def test_rule_set_equality_ignores_ids_and_order(self):
        a = builtin_calculus("km-refined")
        shuffled = Calculus("other", tuple(reversed(a.rules)), a.language)
        assert rule_set_equal(a, shuffled)
        assert not rule_set_equal(a, builtin_calculus("km-basic"))
        assert not rule_set_equal(a, builtin_calculus("kmnot-hyper"))

    def test_json_views(self):
        rule_view = rule_to_json(BOX)
        assert rule_view["id"] == "box"
        assert rule_view["numerator"] == ["nu_f([r]p, x)"]
        assert rule_view["denominators"] == [["-nu_r(r, x, y)"], ["nu_f(p, y)"]]
        calc_view = calculus_to_json(builtin_calculus("kmnot-hyper"))
        assert calc_view["schema_families"] == ["hyp", "split"]
        assert any(r["id"] == "box-not" for r in calc_view["rules"])


class TestFamilyGenerators:
    def test_width_zero_rejected(self):
        with pytest.raises(RuleError):
            hyp_rule(0, 0)
        with pytest.raises(RuleError):
            split_plus_rule(1, 0)
        with pytest.raises(RuleError):
            split_generic_rule(1)

    def test_generators_cache_instances(self):
        assert hyp_rule(3, 2) is hyp_rule(3, 2)
        assert split_plus_rule(2, 2) is split_plus_rule(2, 2)

    def test_hyp_denominator_count_is_positive_width(self):
        assert len(hyp_rule(2, 3).denominators) == 3
        assert len(split_plus_rule(2, 3).denominators) == 5


def _shape(fml):
    lits = flatten_or(fml)
    m = sum(1 for l in lits if is_negated_atomic(l))
    return m, len(lits) - m


class TestProperties:
    @given(st.sets(signed_atoms(), min_size=1, max_size=6))
    @settings(max_examples=60, deadline=None)
    def test_match_apply_coherence(self, branch):
        for name in ("km-basic", "kmnot-plus"):
            for rule in builtin_calculus(name).rules:
                for inst in match_rule(rule, branch):
                    assert set(inst.numerator_atoms()) <= branch

    @given(st.sets(signed_atoms(), min_size=1, max_size=6))
    @settings(max_examples=40, deadline=None)
    def test_instantiations_are_well_sorted(self, branch):
        for rule in builtin_calculus("kmnot-refined").rules:
            for inst in match_rule(rule, branch):
                for var, value in inst.substitution:
                    if isinstance(var, FVar):
                        assert isinstance(value, (Prop, FNot, FOr, FBox))
                    elif isinstance(var, RVar):
                        assert isinstance(value, (RelConst, RelNot))
                    else:
                        assert isinstance(value, (DConst, SkF, SkG))

    @given(st.sets(signed_atoms(allow_relnot=False), min_size=1, max_size=5))
    @settings(max_examples=60, deadline=None)
    def test_side_conditions_never_bind_compounds(self, branch):
        shapes = {
            _shape(a.payload.fml)
            for a in branch
            if a.positive and isinstance(a.payload, HoldsF) and isinstance(a.payload.fml, FOr)
        }
        for m, n in shapes:
            for rule in (hyp_rule(m, n), *( [split_plus_rule(m, n)] if m + n >= 2 else [] )):
                for inst in match_rule(rule, branch):
                    mapping = inst.mapping
                    for cond in rule.side_conditions:
                        value = mapping[cond.var]
                        if isinstance(cond, AtomicOnly):
                            assert isinstance(value, Prop)
                        else:
                            assert not is_negated_atomic(value)


class TestRefinementDiagnostic:
    def test_saturated_refined_branch_has_no_counterexample(self):
        branch = {pos_f(FBox(R, P), A), pos_r(R, A, B), pos_f(P, B)}
        report = diagnose_general_condition(branch, BOX, 1)
        assert report.ok

    def test_stuck_branch_reports_the_blocked_substitution(self):
        rr = RelNot(RelNot(R))
        branch = {pos_f(FBox(rr, P), A), pos_r(R, A, B), neg_f(P, B)}
        report = diagnose_general_condition(branch, BOX, 1)
        assert not report.ok
        (ce,) = report.counterexamples
        assert dict(ce.substitution) == {"p": "p", "r": "--r", "x": "a", "y": "b"}
        assert [render_atom(a) for a in ce.unreflected] == ["-nu_r(--r, a, b)"]

    def test_branch_without_premises_is_vacuously_fine(self):
        report = diagnose_general_condition({pos_f(P, A)}, BOX, 1)
        assert report.ok

    def test_denominator_position_validated(self):
        with pytest.raises(ModelError):
            diagnose_general_condition({pos_f(P, A)}, BOX, 0)
        with pytest.raises(ModelError):
            diagnose_general_condition({pos_f(P, A)}, BOX, 3)
