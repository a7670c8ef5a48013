"""Shared hypothesis strategies for random ASTs, atoms and models."""

from __future__ import annotations

from hypothesis import strategies as st

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
)

PROP_NAMES = ("p", "q", "s")
REL_NAMES = ("r", "t")
CONST_NAMES = ("a", "b", "c")


def relations(allow_relnot: bool = True, max_nots: int = 2):
    base = st.sampled_from(REL_NAMES).map(RelConst)
    if not allow_relnot:
        return base
    return st.builds(
        lambda rel, nots: _wrap_relnot(rel, nots),
        base,
        st.integers(0, max_nots),
    )


def _wrap_relnot(rel, nots):
    for _ in range(nots):
        rel = RelNot(rel)
    return rel


def formulas(allow_relnot: bool = True, max_leaves: int = 6):
    props = st.sampled_from(PROP_NAMES).map(Prop)
    rels = relations(allow_relnot)
    return st.recursive(
        props,
        lambda inner: st.one_of(
            inner.map(FNot),
            st.tuples(inner, inner).map(lambda lr: FOr(*lr)),
            st.tuples(rels, inner).map(lambda ri: FBox(*ri)),
        ),
        max_leaves=max_leaves,
    )


def boolean_formulas(prop_names=PROP_NAMES, max_leaves: int = 10):
    props = st.sampled_from(prop_names).map(Prop)
    return st.recursive(
        props,
        lambda inner: st.one_of(
            inner.map(FNot),
            st.tuples(inner, inner).map(lambda lr: FOr(*lr)),
        ),
        max_leaves=max_leaves,
    )


def domain_terms(allow_relnot: bool = True, max_depth: int = 2):
    consts = st.sampled_from(CONST_NAMES).map(DConst)
    rels = relations(allow_relnot)
    fmls = formulas(allow_relnot, max_leaves=3)
    return st.recursive(
        consts,
        lambda inner: st.one_of(
            st.tuples(rels, fmls, inner).map(lambda x: SkF(*x)),
            st.tuples(rels, inner).map(lambda x: SkG(*x)),
        ),
        max_leaves=max_depth,
    )


def signed_atoms(allow_relnot: bool = True):
    terms = domain_terms(allow_relnot)
    payloads = st.one_of(
        st.tuples(formulas(allow_relnot), terms).map(lambda x: HoldsF(*x)),
        st.tuples(relations(allow_relnot), terms, terms).map(lambda x: HoldsR(*x)),
        st.tuples(terms, terms).map(lambda x: Equal(*x)),
    )
    return st.builds(SignedAtom, st.booleans(), payloads)


def kripke_models(max_size: int = 3, rel_names=REL_NAMES, prop_names=PROP_NAMES):
    """Random integer-domain models over the standard test signature."""
    from modaltab.models import Model

    def build(n, rel_bits, prop_bits):
        triples = [(a, i, j) for a in rel_names for i in range(n) for j in range(n)]
        pairs = [(p, i) for p in prop_names for i in range(n)]
        return Model(
            domain=frozenset(range(n)),
            props=frozenset(prop_names),
            rels=frozenset(rel_names),
            prop_val=frozenset(p for b, p in enumerate(pairs) if prop_bits >> b & 1),
            rel_val=frozenset(t for b, t in enumerate(triples) if rel_bits >> b & 1),
        )

    return st.integers(1, max_size).flatmap(
        lambda n: st.builds(
            build,
            st.just(n),
            st.integers(0, (1 << (len(rel_names) * n * n)) - 1),
            st.integers(0, (1 << (len(prop_names) * n)) - 1),
        )
    )
