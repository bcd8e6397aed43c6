import io
import stat
import sys

import numpy as np
import pytest

from slaflearn.engines import AsEngine, GroundProvider
from slaflearn.errors import SolverFailure
from slaflearn.extraction import (
    DpllSolver,
    ExternalSolver,
    Label,
    bias_axioms,
    consistent_bias,
    emit_model,
    extract_model,
    group_axioms,
    make_instance,
    model_to_pddl,
    query_prop,
    schema_keys,
    schematize,
)
from slaflearn.logic import CnfFormula
from slaflearn.logic.atoms import SLOT_CAUSES_NEG, SLOT_CAUSES_POS, SLOT_KEEPS, SLOT_NEEDS_POS
from slaflearn.pddl import SchemaProvider, golden_rows, ground, load_fixture, parse_domain, strips_model
from slaflearn.simulator import TraceConfig, generate_trace


@pytest.fixture
def door():
    schema, prob = load_fixture("locked-door")
    d, smap, init = ground(schema, prob)
    return schema, d, smap, init


def _learn(d, provider, trace):
    eng = AsEngine(d, provider)
    b = eng.initial(trace.init_obs)
    for s in trace.steps:
        b = eng.step(b, s.action, s.obs)
    return b


def _door_belief(d):
    eng = AsEngine(d, GroundProvider(d))
    b = eng.initial([(0, True)])
    return eng.step(b, d.action_index["(unlock1)"], [(0, False)])


def test_trivial_belief_gives_only_axioms(door):
    _, d, _, _ = door
    eng = AsEngine(d, GroundProvider(d))
    inst = make_instance(eng.initial(), d)
    rows = d.n_actions * d.n_fluents
    assert inst.counts() == {"belief": 0, "vocab": 5 * rows}
    assert len(group_axioms(d.vocab, range(rows), needs=False)) == 4 * rows


def test_bias_is_two_clauses_per_row(door):
    _, d, _, _ = door
    assert len(bias_axioms(d.vocab, range(3)).clauses) == 6


def test_door_extraction_picks_the_right_key(door):
    _, d, _, _ = door
    m = extract_model(make_instance(_door_belief(d), d))
    assert m.effect_lines() == {
        "((unlock1) CAUSES (NOT (locked)))",
        "((unlock2) KEEPS (locked))",
        "((unlock3) KEEPS (locked))",
    }
    assert "((unlock1) NEEDS (locked))" not in m.lines()


def test_unsatisfiable_instance_gives_none(door):
    _, d, _, _ = door
    v = d.vocab
    inst = make_instance(_door_belief(d), d)
    bad = inst.with_group("extra", [(v.group_atom(0, SLOT_KEEPS),)])
    assert extract_model(bad) is None
    buf = io.StringIO()
    emit_model(None, buf)
    assert buf.getvalue() == ""


def test_query_trichotomy(door):
    _, d, _, _ = door
    v = d.vocab
    inst = make_instance(_door_belief(d), d)
    assert query_prop(inst, v.group_atom(0, SLOT_CAUSES_NEG)) is Label.ENTAILED
    assert query_prop(inst, v.group_atom(0, SLOT_CAUSES_POS)) is Label.REFUTED
    assert query_prop(inst, v.group_atom(1, SLOT_KEEPS)) is Label.UNKNOWN


def test_bias_forces_needs_on_the_caused_row(door):
    _, d, _, _ = door
    inst, dropped = consistent_bias(make_instance(_door_belief(d), d))
    assert dropped == []
    m = extract_model(inst)
    assert "((unlock1) NEEDS (locked))" in m.lines()


def test_consistent_bias_drops_contradicted_rows(door):
    _, d, _, _ = door
    v = d.vocab
    # row 1 causes not-locked but may not need locked: its bias clause cannot hold
    extra = [(-v.group_atom(1, SLOT_NEEDS_POS),), (v.group_atom(1, SLOT_CAUSES_NEG),)]
    inst = make_instance(_door_belief(d), d).with_group("data", extra)
    biased, dropped = consistent_bias(inst)
    assert dropped == [1]
    assert extract_model(biased) is not None


def test_schematize_positive_and_negative_literals():
    schema, prob = load_fixture("blocksworld")
    d, smap, _ = ground(schema, prob)
    v = d.vocab
    a, f = d.action_index["(stack a a)"], d.fluent_index["(on a a)"]
    ct = v.causes(a, f)
    pos = schematize(CnfFormula.of([[ct]]), smap)
    assert len(pos.clauses) == 1 and len(next(iter(pos.clauses))) == 4
    neg = schematize(CnfFormula.of([[-ct]]), smap)
    assert len(neg.clauses) == 4 and all(len(c) == 1 for c in neg.clauses)


def test_schematize_off_parameter_policies():
    schema, prob = load_fixture("blocksworld")
    d, smap, _ = ground(schema, prob)
    v = d.vocab
    a, f = d.action_index["(pickup a)"], d.fluent_index["(clear b)"]
    x = v.fluent(d.fluent_index["(clear a)"])
    f1 = CnfFormula.of([[v.keeps(a, f), x]])
    assert schematize(f1, smap).clauses == frozenset()  # keeps is true
    f2 = CnfFormula.of([[v.causes(a, f), x]])
    assert schematize(f2, smap).clauses == frozenset({(x,)})
    assert schematize(f2, smap, "keep-ground").clauses == f2.clauses
    with pytest.raises(ValueError):
        schematize(f2, smap, "drop")


def test_full_observability_recovers_every_effect(door):
    schema, d, smap, init = door
    hidden = strips_model(smap)
    tr = generate_trace(d, hidden, init, TraceConfig(steps=30, obs_per_step=1, seed=0, policy="any-action"))
    b = _learn(d, SchemaProvider(smap), tr)
    keys = schema_keys(smap)
    inst, _ = consistent_bias(make_instance(b, d, keys, bias=False))
    m = extract_model(inst)
    gold = golden_rows(smap)
    for (act, pat), row in m.rows.items():
        assert row.effect == gold[act][pat]


def test_model_to_pddl_parses_back(door):
    schema, d, smap, init = door
    hidden = strips_model(smap)
    tr = generate_trace(d, hidden, init, TraceConfig(steps=20, obs_per_step=1, seed=1, policy="any-action"))
    b = _learn(d, SchemaProvider(smap), tr)
    inst, _ = consistent_bias(make_instance(b, d, schema_keys(smap)))
    text = model_to_pddl(extract_model(inst), schema)
    learned = parse_domain(text)
    assert [a.name for a in learned.actions] == ["unlock1", "unlock2", "unlock3"]
    assert learned.action("unlock1").eff == schema.action("unlock1").eff
    assert learned.action("unlock2").eff == ()


def _brute_sat(clauses, n):
    return any(all(any((bits >> (abs(l) - 1)) & 1 == (l > 0) for l in c) for c in clauses) for bits in range(1 << n))


def test_dpll_agrees_with_brute_force():
    rng = np.random.default_rng(7)
    for _ in range(300):
        n = int(rng.integers(1, 9))
        clauses = []
        for _ in range(int(rng.integers(0, 4 * n + 1))):
            k = int(rng.integers(1, 4))
            atoms = rng.choice(np.arange(1, n + 1), size=min(k, n), replace=False)
            clauses.append([int(a) if rng.random() < 0.5 else -int(a) for a in atoms])
        r = DpllSolver(seed=int(rng.integers(100))).solve(clauses)
        assert r.sat == _brute_sat(clauses, n)
        if r.sat:
            assert all(any(r.model.get(abs(l), False) == (l > 0) for l in c) for c in clauses)


def test_dpll_assumptions():
    s = DpllSolver()
    assert s.solve([[1, 2]], [-1]).model[2] is True
    assert not s.solve([[1, 2]], [-1, -2]).sat


def _script(tmp_path, body):
    p = tmp_path / "solver.py"
    p.write_text(f"import sys\n{body}\n")
    p.chmod(p.stat().st_mode | stat.S_IEXEC)
    return [sys.executable, str(p)]


def test_external_solver_parses_verdicts(tmp_path):
    sat = ExternalSolver(_script(tmp_path, "print('s SATISFIABLE'); print('v 1 -2 0')"))
    r = sat.solve([[5, 9]])
    assert r.sat and r.model == {5: True, 9: False}
    unsat = ExternalSolver(_script(tmp_path, "print('s UNSATISFIABLE')"))
    assert not unsat.solve([[1], [-1]]).sat


def test_external_solver_failures(tmp_path):
    with pytest.raises(SolverFailure):
        ExternalSolver(_script(tmp_path, "sys.exit(3)")).solve([[1]])
    with pytest.raises(SolverFailure):
        ExternalSolver(["/nonexistent/solver"]).solve([[1]])
