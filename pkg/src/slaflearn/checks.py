"""Randomized equivalence checks of the engines against exact pair-set filtering on tiny domains."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .action_model.domain import GroundDomain, StripsActionModel, apply
from .action_model.oracle import VectorOracle, model_space
from .engines import AsEngine, PreEngine, slaf0_step
from .logic.cnf import CnfFormula


@dataclass
class TinyCase:
    domain: GroundDomain
    hidden: StripsActionModel
    init_obs: tuple
    steps: list  # (action, obs, ok)
    oracle: VectorOracle
    pre: Optional[dict] = None


@dataclass
class CheckResult:
    name: str
    instances: int = 0
    failures: list = field(default_factory=list)  # instance indices
    seconds: float = 0.0
    notes: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.instances > 0 and not self.failures

    def line(self) -> str:
        tag = "PASS" if self.ok else "FAIL"
        extra = "".join(f" {k}={v}" for k, v in self.notes.items())
        return f"{tag} {self.name}: {self.instances} instances, {len(self.failures)} failures, {self.seconds:.2f}s{extra}"


def _domain(rng: np.random.Generator, max_rows: int) -> GroundDomain:
    while True:
        n, m = int(rng.integers(1, 4)), int(rng.integers(1, 4))
        if n * m <= max_rows:
            return GroundDomain(tuple(f"f{i}" for i in range(n)), tuple(f"a{j}" for j in range(m)), "tiny")


def _obs(rng: np.random.Generator, s: int, n: int, p: float) -> tuple:
    return tuple((f, bool((s >> f) & 1)) for f in range(n) if rng.random() < p)


def tiny_case(rng: np.random.Generator, failures: bool = False, max_len: int = 8, max_rows: int = 5) -> TinyCase:
    """A random domain of at most 3 fluents and 3 actions, a hidden model and a trace.

    Without failures preconditions are free in the model space and only
    executable actions are taken; with failures they are known and fixed,
    and any action may be attempted.
    """
    d = _domain(rng, max_rows if not failures else 9)
    n, m = d.n_fluents, d.n_actions
    pre = None
    if failures:
        pre = {a: [(f, bool(rng.integers(2))) for f in range(n) if rng.random() < 0.5] for a in range(m)}
        space = model_space(d, free_pre=False, fixed_pre=pre)
    else:
        space = model_space(d, free_pre=True)
    hidden = space.model([int(rng.integers(len(o))) for o in space.options])
    s = int(rng.integers(1 << n))
    p = 0.4 if failures else 0.5
    init_obs = _obs(rng, s, n, p)
    steps = []
    for _ in range(int(rng.integers(1, max_len + 1))):
        if failures:
            a = int(rng.integers(m))
        else:
            ex = [a for a in range(m) if apply(hidden, s, a) is not None]
            if not ex:
                break
            a = int(rng.choice(ex))
        nxt = apply(hidden, s, a)
        ok = nxt is not None
        if ok:
            s = nxt
        steps.append((a, _obs(rng, s, n, p), ok))
    return TinyCase(d, hidden, init_obs, steps, VectorOracle(space), pre)


def oracle_mask(c: TinyCase) -> np.ndarray:
    mask = c.oracle.observe(c.oracle.full(), c.init_obs)
    for a, o, ok in c.steps:
        mask = c.oracle.step(mask, a, o, ok)
    return mask


def as_belief(c: TinyCase):
    eng = AsEngine(c.domain)
    b = eng.initial(c.init_obs)
    for a, o, ok in c.steps:
        b = eng.step(b, a, o, ok)
    return b


def slaf0_belief(c: TinyCase) -> CnfFormula:
    v = c.domain.vocab

    def lits(obs):
        return [v.fluent(f) if val else -v.fluent(f) for f, val in obs]

    b = CnfFormula.of([[l] for l in lits(c.init_obs)])
    for a, o, ok in c.steps:
        b = slaf0_step(b, a, lits(o), c.domain, ok)
    return b


def pre_belief(c: TinyCase, mode: str):
    eng = PreEngine(c.domain, c.pre or {}, failure_mode=mode)
    b = eng.initial(c.init_obs)
    for a, o, ok in c.steps:
        b = eng.step(b, a, o, ok)
    return b


def check_as_oracle(instances: int = 200, seed: int = 0) -> CheckResult:
    """Models of the always-successful belief (within the axioms) equal the oracle's pairs."""
    rng = np.random.default_rng(seed)
    res = CheckResult("as-vs-oracle")
    t0 = time.perf_counter()
    for i in range(instances):
        c = tiny_case(rng)
        got = c.oracle.evaluate(as_belief(c).denotation(c.domain.vocab.fluent))
        if not np.array_equal(got, oracle_mask(c)):
            res.failures.append(i)
        res.instances += 1
    res.seconds = time.perf_counter() - t0
    return res


def check_slaf0_as(instances: int = 200, seed: int = 0) -> CheckResult:
    """SLAF0 in the revised language and the always-successful engine have the same models."""
    rng = np.random.default_rng(seed)
    res = CheckResult("slaf0-vs-as")
    t0 = time.perf_counter()
    for i in range(instances):
        c = tiny_case(rng)
        x = c.oracle.evaluate(as_belief(c).denotation(c.domain.vocab.fluent))
        y = c.oracle.evaluate(slaf0_belief(c))
        if not np.array_equal(x, y):
            res.failures.append(i)
        res.instances += 1
    res.seconds = time.perf_counter() - t0
    return res


def check_pre(instances: int = 200, seed: int = 0, exact_mode: str = "distribute") -> CheckResult:
    """Known-precondition engine with failures: both failure modes are safe; ``exact_mode`` must be exact."""
    rng = np.random.default_rng(seed)
    res = CheckResult("pre-vs-oracle")
    t0 = time.perf_counter()
    exact = {"append": 0, "distribute": 0}
    with_failures = 0
    for i in range(instances):
        c = tiny_case(rng, failures=True)
        want = oracle_mask(c)
        with_failures += any(not ok for _, _, ok in c.steps)
        bad = False
        for mode in exact:
            got = c.oracle.evaluate(pre_belief(c, mode).denotation(c.domain.vocab.fluent))
            if (want & ~got).any():
                bad = True
            same = np.array_equal(got, want)
            exact[mode] += same
            if mode == exact_mode and not same:
                bad = True
        if bad:
            res.failures.append(i)
        res.instances += 1
    res.seconds = time.perf_counter() - t0
    res.notes = {"with_failures": with_failures, "exact_append": exact["append"], "exact_distribute": exact["distribute"]}
    return res
