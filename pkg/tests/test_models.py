"""Model extraction, evaluation, reflection, frame-condition checks."""

from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from modaltab.models import (
    Model,
    ModelError,
    check_frame_condition,
    eval_formula,
    eval_relation,
    extract_model,
    model_to_json,
    reflects,
    satisfies_atom,
)
from modaltab.syntax import (
    IMMEDIATE_PREDECESSOR,
    IRREFLEXIVE,
    DConst,
    Equal,
    FBox,
    FNot,
    FOr,
    HoldsF,
    HoldsR,
    Nom,
    Prop,
    RelConst,
    RelNot,
    SkF,
    fand,
    fdia,
    neg,
    pos,
)

from .strategies import kripke_models

P, Q = Prop("p"), Prop("q")
R = RelConst("r")
A, B, C = DConst("a"), DConst("b"), DConst("c")


class _StubBranch:
    def __init__(self, atoms, closed=False):
        self._atoms = frozenset(atoms)
        self.is_closed = closed

    def atom_set(self):
        return self._atoms


class TestExtraction:
    def test_single_prop_fact(self):
        m = extract_model({pos(HoldsF(P, A))})
        assert m.domain == frozenset({A})
        assert m.prop_val == frozenset({("p", A)})
        assert m.rel_val == frozenset()
        assert m.class_of == {A: A}

    def test_equality_merges_classes(self):
        m = extract_model({pos(HoldsR(R, A, B)), pos(Equal(A, B))})
        assert m.domain == frozenset({A})
        assert m.rel_val == frozenset({("r", A, A)})

    def test_congruence_propagates_through_skolem_terms(self):
        fa, fb = SkF(R, P, A), SkF(R, P, B)
        atoms = {pos(Equal(A, B)), pos(HoldsF(P, fa)), pos(HoldsR(R, fb, C))}
        m = extract_model(atoms)
        assert m.class_of[fb] == fa
        assert m.domain == frozenset({A, fa, C})
        assert m.rel_val == frozenset({("r", fa, C)})

    def test_negated_relation_facts_are_not_stored(self):
        m = extract_model({pos(HoldsR(RelNot(R), A, B))})
        assert m.rel_val == frozenset()
        assert m.rels == frozenset({"r"})

    def test_closed_branch_rejected(self):
        with pytest.raises(ModelError):
            extract_model(_StubBranch({pos(HoldsF(P, A))}, closed=True))

    def test_empty_branch_rejected(self):
        with pytest.raises(ModelError):
            extract_model(frozenset())

    def test_json_view(self):
        m = extract_model({pos(HoldsF(P, A)), pos(HoldsR(R, A, B))})
        assert model_to_json(m) == {
            "domain": ["a", "b"],
            "prop_val": [["p", "a"]],
            "rel_val": [["r", "a", "b"]],
        }


class TestEvaluation:
    def test_box_vacuously_true_without_successors(self):
        m = extract_model({pos(HoldsF(P, A))})
        assert eval_formula(m, FBox(R, Q), A) is True

    def test_unknown_class_rejected(self):
        m = extract_model({pos(HoldsF(P, A))})
        with pytest.raises(ModelError):
            eval_formula(m, P, B)

    def test_nominal_rejected(self):
        m = extract_model({pos(HoldsF(P, A))})
        with pytest.raises(ModelError):
            eval_formula(m, Nom("b"), A)

    @given(kripke_models())
    def test_negated_relation_is_complement(self, m: Model):
        for e in m.domain:
            for e2 in m.domain:
                assert eval_relation(m, RelNot(R), e, e2) == (
                    not eval_relation(m, R, e, e2)
                )

    def test_double_negated_relation_exhaustive_small(self):
        fml, plain = FBox(RelNot(RelNot(R)), P), FBox(R, P)
        for n in (1, 2, 3):
            triples = [("r", i, j) for i in range(n) for j in range(n)]
            pairs = [("p", i) for i in range(n)]
            for rel_bits in range(1 << len(triples)):
                for prop_bits in range(1 << len(pairs)):
                    m = Model(
                        domain=frozenset(range(n)),
                        props=frozenset({"p"}),
                        rels=frozenset({"r"}),
                        prop_val=frozenset(p for b, p in enumerate(pairs) if prop_bits >> b & 1),
                        rel_val=frozenset(t for b, t in enumerate(triples) if rel_bits >> b & 1),
                    )
                    for w in range(n):
                        assert eval_formula(m, fml, w) == eval_formula(m, plain, w)

    @given(kripke_models(), st.sampled_from([("p", "q"), ("q", "p")]))
    def test_desugared_conjunction_agrees(self, m: Model, names):
        f, g = Prop(names[0]), Prop(names[1])
        for e in m.domain:
            assert eval_formula(m, fand(f, g), e) == (
                eval_formula(m, f, e) and eval_formula(m, g, e)
            )

    @given(kripke_models())
    def test_desugared_diamond_agrees(self, m: Model):
        for e in m.domain:
            want = any(
                eval_formula(m, P, e2)
                for e2 in m.domain
                if eval_relation(m, R, e, e2)
            )
            assert eval_formula(m, fdia(R, P), e) == want

    @given(kripke_models())
    def test_atomic_evaluation_is_membership(self, m: Model):
        for p in m.props:
            for e in m.domain:
                assert eval_formula(m, Prop(p), e) == ((p, e) in m.prop_val)
        for a in m.rels:
            for e in m.domain:
                for e2 in m.domain:
                    assert eval_relation(m, RelConst(a), e, e2) == ((a, e, e2) in m.rel_val)


class TestReflection:
    def test_pure_fact_branch_reflects(self):
        atoms = {pos(HoldsF(P, A)), pos(HoldsR(R, A, B)), neg(HoldsF(Q, B))}
        report = reflects(extract_model(atoms), atoms)
        assert report.ok
        assert report.describe() == "model reflects the branch"

    def test_unexpanded_disjunction_is_flagged(self):
        atoms = {pos(HoldsF(FOr(P, Q), A))}
        report = reflects(extract_model(atoms), atoms)
        assert report.violations == (pos(HoldsF(FOr(P, Q), A)),)

    def test_stuck_branch_of_incomplete_calculus(self):
        # saturated branch of the double-negated-relation problem on which
        # the wrongly refined box rule can no longer act
        box = FBox(RelNot(RelNot(R)), P)
        atoms = {pos(HoldsF(box, A)), pos(HoldsR(R, A, B)), neg(HoldsF(P, B))}
        report = reflects(extract_model(atoms), atoms)
        assert report.violations == (pos(HoldsF(box, A)),)
        assert "nu_f" in report.describe()

    def test_disequality_respected(self):
        atoms = {pos(HoldsF(P, A)), pos(HoldsF(P, B)), neg(Equal(A, B))}
        assert reflects(extract_model(atoms), atoms).ok

    def test_satisfies_equal_atom(self):
        m = extract_model({pos(Equal(A, B)), pos(HoldsF(P, C))})
        assert satisfies_atom(m, pos(Equal(B, A)))
        assert satisfies_atom(m, neg(Equal(A, C)))


class TestFrameConditions:
    def test_loop_breaks_irreflexivity(self):
        m = extract_model({pos(HoldsR(R, A, A))})
        assert check_frame_condition(m, IRREFLEXIVE) is False

    def test_loop_free_model_is_irreflexive(self):
        m = extract_model({pos(HoldsR(R, A, B))})
        assert check_frame_condition(m, IRREFLEXIVE) is True

    def test_two_cycle_has_immediate_predecessors(self):
        atoms = {pos(HoldsR(R, A, B)), pos(HoldsR(R, B, A)), neg(Equal(A, B))}
        m = extract_model(atoms)
        assert check_frame_condition(m, IMMEDIATE_PREDECESSOR) is True

    def test_empty_relation_has_no_predecessors(self):
        m = extract_model({pos(HoldsF(FBox(R, P), A))})
        assert m.rels == frozenset({"r"})
        assert check_frame_condition(m, IMMEDIATE_PREDECESSOR) is False

    def test_rootless_node_fails(self):
        # a has no predecessor at all
        m = extract_model({pos(HoldsR(R, A, B)), pos(HoldsR(R, B, C))})
        assert check_frame_condition(m, IMMEDIATE_PREDECESSOR) is False

    def test_interposed_nodes_defeat_immediacy(self):
        # every predecessor of b (here a and c) has another node strictly
        # between itself and b, so none of them is immediate
        atoms = {
            pos(HoldsR(R, A, B)),
            pos(HoldsR(R, A, C)),
            pos(HoldsR(R, C, B)),
            pos(HoldsR(R, C, A)),
        }
        m = extract_model(atoms)
        assert check_frame_condition(m, IMMEDIATE_PREDECESSOR) is False

    def test_unknown_condition_rejected(self):
        m = extract_model({pos(HoldsF(P, A))})
        with pytest.raises(ModelError):
            check_frame_condition(m, "dense")
