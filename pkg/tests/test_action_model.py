import itertools

import numpy as np
import pytest

from slaflearn.action_model import (
    DomainDescription,
    Effect,
    GroundDomain,
    OracleBelief,
    StripsActionModel,
    TinyVocab,
    VectorOracle,
    apply,
    enumerate_models_for,
    initial_belief,
    model_space,
    oracle_slaf,
    relation_of_interpretation,
    tau_eff,
    teff_tiny,
    th_of_relation,
    vocab_axioms,
)
from slaflearn.action_model.tiny import all_relations
from slaflearn.errors import BeliefTooLarge, VocabularyTooLarge
from slaflearn.logic import CnfFormula, enumerate_models, to_cnf
from slaflearn.logic.nnf import conj, evaluate, term


def key_models(dom):
    """R1, R2, R3: key i unlocks the door, the other keys keep it."""
    out = []
    for k in range(3):
        eff = {a: {"locked": Effect.CAUSES_FALSE if i == k else Effect.KEEPS} for i, a in enumerate(dom.actions)}
        out.append(StripsActionModel.build(dom, eff))
    return out


def test_apply_unlock(locked_door):
    r1 = key_models(locked_door)[0]
    s1 = locked_door.state(["locked"])
    assert apply(r1, s1, 0) == 0
    assert apply(r1, s1, 1) == s1


def test_apply_identity_and_precondition(locked_door):
    m = StripsActionModel.build(locked_door)
    assert all(apply(m, s, a) == s for s in (0, 1) for a in range(3))
    guarded = StripsActionModel.build(locked_door, pre={"unlock_1": [("locked", True)]})
    assert apply(guarded, 0, 0) is None


def test_model_rejects_contradictions(locked_door):
    with pytest.raises(ValueError):
        StripsActionModel((1, 0, 0), (1, 0, 0), (0, 0, 0), (0, 0, 0))
    with pytest.raises(ValueError):
        StripsActionModel((0,), (0,), (1,), (1,))


def test_oracle_locked_door_example(locked_door):
    r1, r2, r3 = key_models(locked_door)
    s1, s2 = 1, 0
    rho = OracleBelief(frozenset({(s1, r1), (s1, r2), (s1, r3)}))
    after = oracle_slaf(rho, [(0, ())])
    assert after.pairs == {(s2, r1), (s1, r2), (s1, r3)}
    filtered = oracle_slaf(rho, [(0, ((0, False),))])
    assert filtered.pairs == {(s2, r1)}
    assert oracle_slaf(rho, []) == rho


def test_oracle_failure_keeps_violating_pairs(locked_door):
    space = model_space(locked_door, free_pre=True)
    b = initial_belief(space, [0, 1])
    failed = oracle_slaf(b, [(0, (), False)])
    assert failed.pairs
    for s, m in failed.pairs:
        assert apply(m, s, 0) is None
    # each state leaves exactly the models whose unlock_1 precondition it violates
    per_state = {s: sum(1 for t, _ in failed.pairs if t == s) for s in (0, 1)}
    assert per_state == {0: space.size // 3, 1: space.size // 3}


def test_enumerate_counts():
    one = GroundDomain(("f",), ("a",))
    assert len(enumerate_models_for(one, free_pre=False)) == 3
    assert len(enumerate_models_for(one)) == 9
    with pytest.raises(BeliefTooLarge):
        enumerate_models_for(GroundDomain(tuple("pqrstu"), ("a", "b")), cap=1000)


def test_light_switch_relation_count(light_switch):
    fixed = {a: {} for a in ("go-W", "go-E")}
    eff = {a: {f: Effect.KEEPS for f in light_switch.fluents} for a in ("go-W", "go-E")}
    models = enumerate_models_for(light_switch, free_pre=False, fixed_effects=eff)
    assert len(models) == 27


def test_vocab_axioms_single():
    one = GroundDomain(("f",), ("a",))
    ax = vocab_axioms(one)
    assert len(ax) == 5
    v = one.vocab
    atoms = [v.prop(0, s, 0) for s in range(5)]
    bad = {a: False for a in atoms}
    bad[v.causes(0, 0, True)] = bad[v.causes(0, 0, False)] = True
    assert not evaluate(to_node(ax), bad)


def to_node(f: CnfFormula):
    from slaflearn.logic.nnf import from_clauses

    return from_clauses(f.clauses)


def test_every_model_satisfies_axioms(light_switch):
    ax = to_node(vocab_axioms(light_switch))
    space = model_space(light_switch, free_pre=True, fixed_effects={"go-W": {}, "go-E": {}})
    for i, m in enumerate(space):
        assert evaluate(ax, lambda a, val=m.assignment(light_switch): val.get(a, False))
        if i > 200:
            break


def test_tau_eff_is_functional():
    dom = GroundDomain(("p", "q"), ("a",))
    v = dom.vocab
    tau = tau_eff(0, dom)
    for m in model_space(dom, free_pre=True):
        val = m.assignment(dom)
        for s in range(4):
            succ = apply(m, s, 0)
            ok = set()
            for s2 in range(4):
                env = dict(val)
                for f in range(2):
                    env[v.fluent(f)] = bool((s >> f) & 1)
                    env[v.primed(v.fluent(f))] = bool((s2 >> f) & 1)
                if evaluate(tau, env):
                    ok.add(s2)
            assert ok == (set() if succ is None else {succ})


def test_tau_eff_single_fluent_clauses():
    dom = GroundDomain(("f",), ("a",))
    v = dom.vocab
    got = to_cnf(tau_eff(0, dom))
    atoms = [1, 2] + [v.prop(0, s, 0) for s in range(5)]
    f, fp = 1, 2
    ct, cf, k, np_, nn = (v.prop(0, s, 0) for s in range(5))
    expect = CnfFormula.of([
        [-np_, f], [-nn, -f],
        [-ct, fp], [-k, -f, fp], [-fp, ct, k], [-fp, ct, f],
        [-cf, -fp], [-k, f, -fp], [fp, cf, k], [fp, cf, -f],
    ])
    assert enumerate_models(got, atoms) == enumerate_models(expect, atoms)


def test_vector_oracle_matches_set_oracle(rng):
    dom = GroundDomain(("p", "q"), ("a", "b"))
    space = model_space(dom, free_pre=True)
    vo = VectorOracle(space)
    b = initial_belief(space, range(4))
    mask = vo.full()
    assert np.array_equal(vo.encode(b), mask)
    for _ in range(4):
        a = int(rng.integers(2))
        obs = ((int(rng.integers(2)), bool(rng.integers(2))),)
        ok = bool(rng.integers(3))
        b = oracle_slaf(b, [(a, obs, ok)])
        mask = vo.step(mask, a, obs, ok)
        assert vo.decode(mask) == b


def test_description_round_trip(locked_door):
    m = key_models(locked_door)[1]
    desc = m.describe(locked_door)
    desc.validate(locked_door)
    assert desc.to_model(locked_door) == m
    with pytest.raises(ValueError):
        DomainDescription({"unlock_1": (("keeps", "locked", True), ("causes", "locked", True))}).validate(locked_door)


def test_teff_tiny_single_fluent():
    dom = GroundDomain(("f",), ("a",))
    f = teff_tiny(0, dom)
    cnf = to_cnf(f)
    # 2 literals x 2 states of effect clauses plus the two closure axioms
    assert sum(1 for c in cnf.clauses if len(c) == 3) >= 4
    with pytest.raises(VocabularyTooLarge):
        teff_tiny(0, GroundDomain(tuple("pqrstuv"), ("a",)))


def test_th_of_relation_pins_r1(locked_door):
    v = TinyVocab(locked_door)
    r1 = (0, 0)  # unlock_1 from locked and from unlocked ends unlocked
    th = th_of_relation(0, r1, locked_door, v)
    atoms = v.action_atoms(0)
    models = enumerate_models(th, atoms)
    assert models
    for m in models:
        val = {abs(x): x > 0 for x in m}
        assert relation_of_interpretation(0, val, locked_door, v) == r1


def test_th_of_relation_is_exact_on_two_fluents():
    dom = GroundDomain(("p", "q"), ("a",))
    v = TinyVocab(dom)
    atoms = v.action_atoms(0)
    for rel in itertools.islice(all_relations(2), 0, 625, 37):
        models = enumerate_models(th_of_relation(0, rel, dom, v), atoms)
        assert models
        assert {relation_of_interpretation(0, {abs(x): x > 0 for x in m}, dom, v) for m in models} == {rel}
