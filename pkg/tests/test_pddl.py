from math import prod

import pytest

from slaflearn.action_model import apply
from slaflearn.errors import OffParameterFluent, ParseError, PddlTypeError
from slaflearn.pddl import (
    FIXTURES,
    GENERATORS,
    fixture_text,
    golden_rows,
    ground,
    load_fixture,
    parse_domain,
    parse_problem,
    print_domain,
    print_problem,
    schema_atoms_for,
    strips_model,
)
from slaflearn.pddl.grounding import objects_by_type
from slaflearn.simulator import TraceConfig, generate_trace

PUBLISHED_FLUENTS = {"driverlog": 231, "zenotravel": 91, "blocksworld": 209, "depots": 250}


@pytest.fixture(scope="module")
def bw():
    schema, prob = load_fixture("blocksworld")
    return (schema, prob, *ground(schema, prob))


def test_blocksworld_schema_shape(bw):
    schema = bw[0]
    assert [a.name for a in schema.actions] == ["pickup", "putdown", "stack", "unstack"]
    assert len(schema.predicates) == 5


def test_driverlog_drive_truck_has_four_parameters():
    schema, _ = load_fixture("driverlog")
    assert len(schema.actions) == 6
    assert len(schema.action("drive-truck").params) == 4


def test_empty_action_list_is_valid():
    s = parse_domain("(define (domain empty) (:predicates (p)))")
    assert s.actions == ()
    assert s.predicates[0].arity == 0


def test_one_block_grounding():
    schema, _ = load_fixture("blocksworld")
    p = parse_problem("(define (problem one) (:domain blocksworld) (:objects a) (:init (on-table a) (clear a) (arm-empty)))",
                      schema)
    d, _, init = ground(schema, p)
    assert set(d.fluents) == {"(clear a)", "(on-table a)", "(arm-empty)", "(holding a)", "(on a a)"}
    assert set(d.actions) == {"(pickup a)", "(putdown a)", "(stack a a)", "(unstack a a)"}
    assert set(d.true_fluents(init)) == {"(on-table a)", "(clear a)", "(arm-empty)"}


@pytest.mark.parametrize("name", sorted(PUBLISHED_FLUENTS))
def test_fixture_fluent_counts(name):
    schema, prob = load_fixture(name)
    d, _, _ = ground(schema, prob)
    assert d.n_fluents == PUBLISHED_FLUENTS[name]


@pytest.mark.parametrize("name", sorted(PUBLISHED_FLUENTS))
def test_grounding_count_law(name):
    schema, prob = load_fixture(name)
    d, _, _ = ground(schema, prob)
    objs = objects_by_type(schema, prob)
    assert d.n_actions == sum(prod(len(objs.get(t, [])) for _, t in a.params) for a in schema.actions)


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_print_parse_round_trip(name):
    schema, prob = load_fixture(name)
    again = parse_domain(print_domain(schema))
    assert again == schema
    assert parse_problem(print_problem(prob), again) == prob


@pytest.mark.parametrize("construct, text", [
    ("either", "(define (domain x) (:types a b)\n (:predicates (p ?x - (either a b))))"),
    ("or", "(define (domain x) (:predicates (p) (q))\n (:action go :parameters () :precondition (or (p) (q))))"),
    ("when", "(define (domain x) (:predicates (p) (q))\n (:action go :parameters () :effect (when (p) (q))))"),
    ("=", "(define (domain x) (:predicates (p ?x))\n (:action go :parameters (?x ?y) :precondition (= ?x ?y)))"),
])
def test_unsupported_constructs_are_named(construct, text):
    with pytest.raises(ParseError) as e:
        parse_domain(text)
    assert construct in str(e.value)
    assert e.value.line == 2


def test_unknown_type_is_a_type_error():
    with pytest.raises(PddlTypeError):
        parse_domain("(define (domain x) (:predicates (p ?x - widget)))")


def test_effect_variable_must_be_a_parameter():
    with pytest.raises(PddlTypeError):
        parse_domain("(define (domain x) (:predicates (p ?x)) (:action go :parameters () :effect (p ?x)))")


def test_complementary_effects_rejected():
    with pytest.raises(PddlTypeError):
        parse_domain("(define (domain x) (:predicates (p)) (:action go :parameters () :effect (and (p) (not (p)))))")


def test_ill_typed_init_rejected():
    schema, _ = load_fixture("driverlog")
    with pytest.raises(PddlTypeError):
        parse_problem("(define (problem p) (:domain driverlog) (:objects t - truck s - location)"
                      " (:init (driving t t)))", schema)


def _names(atoms):
    return sorted(a.pretty() for a in atoms)


def test_schema_atoms_unambiguous(bw):
    _, _, d, smap, _ = bw
    v = d.vocab
    a, f = d.action_index["(stack e g)"], d.fluent_index["(on e g)"]
    assert _names(schema_atoms_for(smap, v.causes(a, f))) == ["(STACK CAUSES (ON ?OB ?UNDEROB))"]


def test_schema_atoms_repeated_object(bw):
    _, _, d, smap, _ = bw
    v = d.vocab
    a, f = d.action_index["(stack a a)"], d.fluent_index["(on a a)"]
    got = _names(schema_atoms_for(smap, v.causes(a, f)))
    assert len(got) == 4
    assert "(STACK CAUSES (ON ?OB ?UNDEROB))" in got and "(STACK CAUSES (ON ?UNDEROB ?OB))" in got


def test_schema_atoms_nullary_fluent(bw):
    _, _, d, smap, _ = bw
    v = d.vocab
    a, f = d.action_index["(pickup a)"], d.fluent_index["(arm-empty)"]
    assert _names(schema_atoms_for(smap, v.keeps(a, f))) == ["(PICKUP KEEPS (ARM-EMPTY))"]


def test_off_parameter_fluent_raises(bw):
    _, _, d, smap, _ = bw
    a, f = d.action_index["(pickup a)"], d.fluent_index["(clear b)"]
    with pytest.raises(OffParameterFluent):
        schema_atoms_for(smap, d.vocab.keeps(a, f))


def test_substitution_reproduces_ground_atom(bw):
    _, _, d, smap, _ = bw
    for a in range(0, d.n_actions, 37):
        for f in smap.affected(a):
            for pat in smap.patterns(a, f):
                assert smap.instantiate(a, pat) == f


def test_golden_rows_follow_the_effects(bw):
    gold = golden_rows(bw[3])
    assert gold["pickup"][("holding", ("?ob",))] == "+"
    assert gold["pickup"][("arm-empty", ())] == "-"
    assert gold["stack"][("on", ("?ob", "?underob"))] == "+"
    assert gold["unstack"][("on", ("?ob", "?ob"))] == "keeps"


def test_blocksworld_physics_along_traces(bw):
    _, _, d, smap, init = bw
    hidden = strips_model(smap)
    blocks = "abcdefghijklm"
    holding = [d.fluent_index[f"(holding {b})"] for b in blocks]
    arm = d.fluent_index["(arm-empty)"]
    tr = generate_trace(d, hidden, init, TraceConfig(steps=400, obs_per_step=0, seed=3))
    s = init
    for st in tr.steps:
        s = apply(hidden, s, st.action)
        n_holding = sum((s >> h) & 1 for h in holding)
        assert ((s >> arm) & 1) ^ (n_holding == 1)
        assert n_holding <= 1


@pytest.mark.parametrize("name", sorted(GENERATORS))
def test_generated_problems_ground(name):
    schema, _ = load_fixture(name)
    small = ground(schema, parse_problem(GENERATORS[name](3), schema))[0]
    large = ground(schema, parse_problem(GENERATORS[name](5), schema))[0]
    assert 0 < small.n_fluents < large.n_fluents


def test_zenotravel_fixture_splits_either():
    schema = parse_domain(fixture_text(FIXTURES["zenotravel"][0]))
    assert {"at-person", "at-aircraft"} <= {p.name for p in schema.predicates}
