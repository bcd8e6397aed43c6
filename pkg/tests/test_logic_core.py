import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slaflearn.action_model import GroundDomain, vocab_axioms
from slaflearn.errors import ClauseExplosion, MixedVocabulary
from slaflearn.logic import (
    FALSE,
    TRUE,
    CnfFormula,
    conj,
    disj,
    eliminate_vars,
    enumerate_models,
    lit,
    make_axiom_reducer,
    make_clause,
    model_mask,
    negate,
    read_dimacs,
    rename_primed,
    resolve_out,
    subsume,
    to_cnf,
    write_dimacs,
)
from slaflearn.logic.models import project_mask
from slaflearn.logic.nnf import dag_size, evaluate, substitute
from strategies import cnfs, nnfs

VOCAB6 = list(range(1, 7))


def test_make_clause_sorts_and_drops_tautologies():
    assert make_clause([3, -1, 2, 3]) == (-1, 2, 3)
    assert make_clause([2, -2, 5]) is None
    assert make_clause([]) == ()


def test_constant_folding_and_hash_consing():
    a, b = lit(1), lit(2)
    assert conj(a, TRUE) is a
    assert conj(a, FALSE) is FALSE
    assert disj(a, TRUE) is TRUE
    assert conj(a, lit(-1)) is FALSE
    assert disj(a, lit(-1)) is TRUE
    assert conj(a, b) is conj(a, b)
    assert conj(a, b) is not conj(b, a)  # child order is preserved


def test_deep_chain_is_iterative():
    f = lit(1)
    for i in range(6000):
        f = conj(f, disj(lit(2 + i % 3), lit(-(5 + i % 2))))
    assert dag_size([f]) > 6000
    cnf = to_cnf(f)
    assert len(cnf) <= 8


@settings(max_examples=150, deadline=None)
@given(nnfs(6))
def test_to_cnf_preserves_models(f):
    assert np.array_equal(model_mask(f, VOCAB6), model_mask(to_cnf(f), VOCAB6))


@settings(max_examples=100, deadline=None)
@given(nnfs(6))
def test_negate_complements(f):
    assert np.array_equal(model_mask(negate(f), VOCAB6), ~model_mask(f, VOCAB6))


@settings(max_examples=100, deadline=None)
@given(cnfs(6))
def test_subsume_keeps_equivalence_and_minimality(f):
    kept = subsume(f.clauses)
    g = CnfFormula(frozenset(kept), f.vocabulary)
    assert np.array_equal(model_mask(f, VOCAB6), model_mask(g, VOCAB6))
    for c in kept:
        for d in kept:
            assert c == d or not set(d) <= set(c)


@settings(max_examples=150, deadline=None)
@given(cnfs(6), st.integers(1, 6))
def test_resolve_out_is_projection(f, x):
    g = resolve_out(f, x)
    assert x not in g.atoms()
    keep = [i for i in range(6) if i != x - 1]
    expect = project_mask(model_mask(f, VOCAB6), 6, keep)
    got = project_mask(model_mask(g, VOCAB6), 6, keep)
    assert np.array_equal(expect, got)


@settings(max_examples=80, deadline=None)
@given(cnfs(6), st.sets(st.integers(1, 6), max_size=4))
def test_eliminate_vars_is_projection(f, xs):
    g = eliminate_vars(f, xs)
    keep = [i for i in range(6) if i + 1 not in xs]
    assert np.array_equal(
        project_mask(model_mask(f, VOCAB6), 6, keep), project_mask(model_mask(g, VOCAB6), 6, keep)
    )


def test_clause_explosion_is_raised():
    f = conj(*[disj(lit(2 * i + 1), lit(2 * i + 2)) for i in range(12)])
    with pytest.raises(ClauseExplosion):
        to_cnf(negate(f), limit=1000)


@settings(max_examples=60, deadline=None)
@given(cnfs(8, max_clauses=15))
def test_dimacs_round_trip(f):
    buf = io.StringIO()
    index = write_dimacs(f, buf)
    g, names = read_dimacs(buf.getvalue())
    back = CnfFormula.of([[index[abs(l)] * (1 if l > 0 else -1) for l in c] for c in g.clauses])
    assert back.clauses == f.clauses


def test_dimacs_rejects_bad_count():
    with pytest.raises(Exception):
        read_dimacs("p cnf 2 3\n1 2 0\n")


def test_dimacs_names_resolve_through_lookup():
    dom = GroundDomain(("p", "q"), ("a",))
    v = dom.vocab
    f = CnfFormula.of([[v.causes(0, 1, True), -v.fluent(0)]])
    buf = io.StringIO()
    write_dimacs(f, buf, name=v.name)
    g, names = read_dimacs(buf.getvalue(), lookup=v.lookup)
    assert g.clauses == f.clauses
    assert "(a causes q)" in names.values()


def test_rename_primed_refuses_mixed_vocabulary():
    dom = GroundDomain(("p", "q"), ("a",))
    v = dom.vocab
    f = CnfFormula.of([[v.primed(v.fluent(0)), v.fluent(1)]])
    with pytest.raises(MixedVocabulary):
        rename_primed(f, v)
    g = rename_primed(CnfFormula.of([[v.primed(v.fluent(0)), -v.primed(v.fluent(1))]]), v)
    assert g.clauses == {(1, -2)}


def test_substitute_and_evaluate():
    f = disj(conj(lit(1), lit(2)), lit(-3))
    g = substitute(f, lambda a: TRUE if a == 1 else None)
    assert g == disj(lit(2), lit(-3))
    assert evaluate(f, {1: True, 2: True, 3: True})
    assert not evaluate(f, {1: False, 2: True, 3: True})


@pytest.fixture
def two_by_two() -> GroundDomain:
    return GroundDomain(("p", "q"), ("a", "b"))


@settings(max_examples=150, deadline=None)
@given(st.data())
def test_axiom_reducer_is_sound_modulo_axioms(data):
    dom = GroundDomain(("p",), ("a", "b"))
    v = dom.vocab
    atoms = [v.prop(a, s, 0) for a in range(2) for s in range(5)] + [1]
    c = data.draw(st.lists(st.sampled_from(atoms + [-x for x in atoms]), min_size=1, max_size=6))
    c = make_clause(c)
    if c is None:
        return
    axioms = vocab_axioms(dom)
    reduced = make_axiom_reducer(v)(c)
    lhs = axioms.conjoin(CnfFormula.of([c]))
    rhs = axioms if reduced is None else axioms.conjoin(CnfFormula.of([reduced]))
    assert enumerate_models(lhs, atoms) == enumerate_models(rhs, atoms)
    if reduced is not None:
        assert len(reduced) <= len(c)


def test_enumerate_models_small():
    f = disj(lit(1), lit(2))
    assert enumerate_models(f, [1, 2]) == {frozenset({1, 2}), frozenset({1, -2}), frozenset({-1, 2})}
