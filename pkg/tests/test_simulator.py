import io
import time
from dataclasses import replace

import pytest

from slaflearn.errors import DeadEnd
from slaflearn.pddl import ground, load_fixture, strips_model
from slaflearn.simulator import (
    TraceConfig,
    TraceStep,
    generate_trace,
    read_trace,
    replay_check,
    write_trace,
)


@pytest.fixture(scope="module")
def bw():
    schema, prob = load_fixture("blocksworld")
    d, smap, init = ground(schema, prob)
    return d, strips_model(smap), init


@pytest.fixture(scope="module")
def door():
    schema, prob = load_fixture("locked-door")
    d, smap, init = ground(schema, prob)
    return d, strips_model(smap), init


def _text(trace, d) -> str:
    buf = io.StringIO()
    write_trace(trace, d, buf)
    return buf.getvalue()


def test_same_config_gives_identical_bytes(bw):
    d, m, init = bw
    cfg = TraceConfig(steps=300, seed=42)
    assert _text(generate_trace(d, m, init, cfg), d) == _text(generate_trace(d, m, init, cfg), d)
    other = generate_trace(d, m, init, replace(cfg, seed=43))
    assert _text(other, d) != _text(generate_trace(d, m, init, cfg), d)


def test_executable_only_never_fails(bw):
    d, m, init = bw
    tr = generate_trace(d, m, init, TraceConfig(steps=500, seed=1))
    assert all(s.ok for s in tr.steps)
    assert [s.index for s in tr.steps] == list(range(1, 501))
    assert all(len(s.obs) == 10 and len({f for f, _ in s.obs}) == 10 for s in tr.steps)


def test_any_action_produces_failures_and_counts_sum(bw):
    d, m, init = bw
    tr = generate_trace(d, m, init, TraceConfig(steps=500, seed=1, policy="any-action"))
    assert any(not s.ok for s in tr.steps)
    dist = tr.action_distribution(d)
    assert set(dist) <= {"pickup", "putdown", "stack", "unstack"}
    assert sum(dist.values()) == 500


def test_replay_accepts_fresh_and_rejects_flipped(bw):
    d, m, init = bw
    tr = generate_trace(d, m, init, TraceConfig(steps=200, seed=9, policy="any-action"))
    assert replay_check(d, m, init, tr)
    st = tr.steps[57]
    f, v = st.obs[0]
    tr.steps[57] = TraceStep(st.index, st.action, st.ok, ((f, not v),) + st.obs[1:])
    assert not replay_check(d, m, init, tr)


def test_replay_of_1000_steps_is_fast(bw):
    d, m, init = bw
    tr = generate_trace(d, m, init, TraceConfig(steps=1000, seed=2))
    t0 = time.perf_counter()
    assert replay_check(d, m, init, tr)
    assert time.perf_counter() - t0 < 1.0


def test_zero_steps(bw):
    d, m, init = bw
    tr = generate_trace(d, m, init, TraceConfig(steps=0))
    assert len(tr) == 0
    assert replay_check(d, m, init, tr)


def test_obs_per_step_bounded(door):
    d, m, init = door
    with pytest.raises(ValueError):
        generate_trace(d, m, init, TraceConfig(steps=3, obs_per_step=2))


def test_bad_policy_rejected():
    with pytest.raises(ValueError):
        TraceConfig(steps=1, policy="greedy")


def test_wrong_key_succeeds_and_leaves_door_locked(door):
    d, m, init = door
    tr = generate_trace(d, m, init, TraceConfig(steps=40, obs_per_step=1, seed=0, policy="any-action"))
    assert all(s.ok for s in tr.steps)  # no preconditions: every key turns
    first_unlock = next(i for i, s in enumerate(tr.steps) if s.action == d.action_index["(unlock1)"])
    for s in tr.steps[:first_unlock]:
        assert s.obs == ((0, True),)
    assert tr.steps[first_unlock].obs == ((0, False),)


def test_dead_end_is_reported():
    from slaflearn.pddl import parse_domain, parse_problem

    schema = parse_domain("(define (domain once) (:predicates (fresh))"
                          " (:action use :parameters () :precondition (fresh) :effect (not (fresh))))")
    d, smap, init = ground(schema, parse_problem("(define (problem p) (:domain once) (:init (fresh)))", schema))
    with pytest.raises(DeadEnd):
        generate_trace(d, strips_model(smap), init, TraceConfig(steps=2, obs_per_step=0))


@pytest.mark.parametrize("k", [1, 3, 5])
def test_strict_coverage_observes_every_fluent_each_window(bw, k):
    d, m, init = bw
    tr = generate_trace(d, m, init, TraceConfig(steps=60, obs_per_step=2, seed=4, coverage_k=k))
    last = {f: 0 for f, _ in tr.init_obs}
    assert len(last) == d.n_fluents
    for s in tr.steps:
        for f, _ in s.obs:
            last[f] = s.index
        assert all(s.index - t < k for t in last.values())


def test_trace_file_round_trip(bw):
    d, m, init = bw
    tr = generate_trace(d, m, init, TraceConfig(steps=50, seed=5, policy="any-action"))
    text = _text(tr, d)
    back = read_trace(io.StringIO(text), d)
    assert back.steps == tr.steps and back.init_obs == tr.init_obs
    assert _text(back, d) == text
    first = text.splitlines()[0]
    assert first.startswith('{"domain":"blocksworld","fluents":209,"actions":364')
