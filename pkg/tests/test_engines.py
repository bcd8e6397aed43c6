import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slaflearn.action_model import GroundDomain, VectorOracle, model_space
from slaflearn.action_model.tiny import TinyVocab, all_relations, rho_of_models
from slaflearn.checks import (
    as_belief,
    check_as_oracle,
    check_pre,
    check_slaf0_as,
    oracle_mask,
    tiny_case,
)
from slaflearn.engines import (
    AsEngine,
    BeliefRenderer,
    GroundProvider,
    LiteralSlafTable,
    PreEngine,
    dump_belief,
    load_belief,
    slaf0_step,
)
from slaflearn.errors import InconsistentBelief, SlafError
from slaflearn.logic import CnfFormula, enumerate_models, model_mask, to_cnf
from slaflearn.logic.nnf import FALSE, TRUE, conj, conj_all, disj, from_clauses, lit
from slaflearn.pddl import load_fixture, parse_problem
from slaflearn.pddl.generators import blocksworld
from slaflearn.pddl.grounding import ground, strips_model
from slaflearn.simulator import TraceConfig, generate_trace
from strategies import nnfs


@pytest.fixture(scope="module")
def bw3():
    schema, _ = load_fixture("blocksworld")
    d, smap, init = ground(schema, parse_problem(blocksworld(3), schema))
    return d, strips_model(smap), init


def test_as_matches_oracle_on_random_tiny_cases():
    r = check_as_oracle(60, seed=11)
    assert r.ok, r.failures


def test_slaf0_agrees_with_as():
    r = check_slaf0_as(40, seed=12)
    assert r.ok, r.failures


def test_pre_is_safe_and_distribute_mode_exact():
    r = check_pre(60, seed=13)
    assert r.ok, r.failures
    assert r.notes["with_failures"] > 0


def test_locked_door_as_learns_the_working_key(locked_door):
    eng = AsEngine(locked_door)
    b = eng.initial([(0, True)])
    b = eng.step(b, 0, [(0, False)])
    v = locked_door.vocab
    space = model_space(locked_door, free_pre=True)
    vo = VectorOracle(space)
    rows = vo.evaluate(b.denotation(v.fluent))
    assert rows.any()
    # every surviving model makes unlock_1 cause not-locked
    assert (vo.column(v.causes(0, 0, False)) | ~rows).all()


def test_as_engine_rejects_failed_action(locked_door):
    eng = AsEngine(locked_door)
    with pytest.raises(SlafError):
        eng.step(eng.initial(), 0, (), ok=False)


class _Inert:
    """Every action keeps every fluent."""

    def props(self, a, f):
        return (FALSE, FALSE, TRUE, FALSE, FALSE)

    def affected(self, a):
        return []


def test_contradictory_trace_names_step_and_fluent(locked_door):
    eng = AsEngine(locked_door, _Inert())
    b = eng.initial([(0, True)])
    b = eng.step(b, 0, [(0, True)])
    with pytest.raises(InconsistentBelief) as e:
        eng.step(b, 1, [(0, False)])
    assert e.value.step == 2
    assert "locked" in str(e.value)


def test_append_mode_is_not_exact_but_distribute_is():
    dom = GroundDomain(("f", "g"), ("a", "b"))
    pre = {0: [(0, True), (1, True)], 1: []}
    space = model_space(dom, fixed_pre=pre, fixed_effects={"b": {"f": 0, "g": 2}})
    vo = VectorOracle(space)
    trace = [(0, [], False), (1, [], True)]
    want = vo.observe(vo.full(), [(0, True)])
    for a, o, ok in trace:
        want = vo.step(want, a, o, ok)
    got = {}
    for mode in ("append", "distribute"):
        eng = PreEngine(dom, pre, failure_mode=mode)
        b = eng.initial([(0, True)])
        for a, o, ok in trace:
            b = eng.step(b, a, o, ok)
        got[mode] = vo.evaluate(b.denotation(dom.vocab.fluent))
        assert not (want & ~got[mode]).any()
    assert np.array_equal(got["distribute"], want)
    assert not np.array_equal(got["append"], want)


def test_pre_engine_requires_ok_flag(locked_door):
    eng = PreEngine(locked_door, {})
    with pytest.raises(SlafError):
        eng.step(eng.initial(), 0, (), ok=None)


def test_snapshot_round_trip(rng):
    c = tiny_case(rng)
    b = as_belief(c)
    v = c.domain.vocab
    text = dump_belief(b, v.name)
    b2 = load_belief(text, v.lookup)
    assert dump_belief(b2, v.name) == text
    assert np.array_equal(c.oracle.evaluate(b2.denotation(v.fluent)), oracle_mask(c))


def test_pre_snapshot_round_trip(rng):
    c = tiny_case(rng, failures=True)
    eng = PreEngine(c.domain, c.pre, failure_mode="distribute")
    b = eng.initial(c.init_obs)
    for a, o, ok in c.steps:
        b = eng.step(b, a, o, ok)
    v = c.domain.vocab
    text = dump_belief(b, v.name)
    assert dump_belief(load_belief(text, v.lookup), v.name) == text


@pytest.mark.parametrize("k", [2, 3])
def test_strict_coverage_gives_k_cnf(bw3, k):
    d, hidden, init = bw3
    tr = generate_trace(d, hidden, init, TraceConfig(steps=300, obs_per_step=2, seed=5, coverage_k=k))
    eng = AsEngine(d, GroundProvider(d))
    r = BeliefRenderer(d)
    b = eng.initial(tr.init_obs)
    for s in tr.steps:
        b = eng.step(b, s.action, s.obs)
        if s.index % 100 == 0:
            assert r.render(b).max_clause_len() <= k


def test_literal_slaf_matches_slaf0_modulo_domain_axioms():
    for n in (1, 2):
        dom = GroundDomain(tuple(f"f{i}" for i in range(n)), ("a",))
        tv = TinyVocab(dom)
        table = LiteralSlafTable(dom, tv)
        atoms = tv.fluent_atoms() + tv.action_atoms(0)
        d_a = conj_all(
            disj(lit(-tv.eff(0, f, True, s)), lit(-tv.eff(0, f, False, s))) for s in range(1 << n) for f in range(n)
        )
        for l in [0] + [x for f in range(1, n + 1) for x in (f, -f)]:
            phi = CnfFormula.of([[l]] if l else [])
            s0 = from_clauses(slaf0_step(phi, 0, [], dom, tiny=tv).clauses)
            want = {(R[s], R) for R in all_relations(n) for s in range(1 << n)
                    if (l == 0 or ((s >> (abs(l) - 1)) & 1) == (l > 0)) and R[s] is not None}
            assert rho_of_models(enumerate_models(s0, atoms), 0, dom, tv) == want
            lhs = rho_of_models(enumerate_models(conj(table(0, l), d_a), atoms), 0, dom, tv)
            rhs = rho_of_models(enumerate_models(conj(s0, d_a), atoms), 0, dom, tv)
            assert lhs == rhs


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_slaf_distributes_over_or_and_weakens_and(data):
    n, m = data.draw(st.sampled_from([(1, 1), (1, 2), (2, 1)]))
    dom = GroundDomain(tuple(f"f{i}" for i in range(n)), tuple(f"a{j}" for j in range(m)))
    v = dom.vocab
    atoms = [v.fluent(f) for f in range(n)] + [v.prop(a, s, f) for a in range(m) for f in range(n) for s in range(5)]
    relabel = lambda f: _relabel(f, atoms)
    phi = relabel(data.draw(nnfs(len(atoms), 8)))
    psi = relabel(data.draw(nnfs(len(atoms), 8)))
    a = data.draw(st.integers(0, m - 1))

    def slaf(f):
        return model_mask(slaf0_step(to_cnf(f), a, [], dom), atoms)

    sp, ss = slaf(phi), slaf(psi)
    assert np.array_equal(slaf(disj(phi, psi)), sp | ss)
    both = slaf(conj(phi, psi))
    assert not (both & ~(sp & ss)).any()


def _relabel(f, atoms):
    from slaflearn.logic.nnf import substitute

    return substitute(f, lambda i: lit(atoms[i - 1]))
