"""Random action/observation traces from a hidden STRIPS model.

Randomness comes from numpy's PCG64 bit generator seeded with the 64-bit
config seed, so traces reproduce bit-for-bit across platforms.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, TextIO

import numpy as np

from .action_model.domain import GroundDomain, State, StripsActionModel, apply
from .errors import DeadEnd, SlafError

POLICIES = ("executable-only", "any-action")


@dataclass(frozen=True)
class TraceStep:
    index: int
    action: int
    ok: bool
    obs: tuple = ()  # ((fluent index, value), ...)


@dataclass
class TraceConfig:
    steps: int
    obs_per_step: int = 10
    policy: str = "executable-only"
    seed: int = 0
    record_every: int = 200
    # observe at t=0 (before any action) as well
    initial_obs: bool = True
    # every fluent observed at least once in each window of this many steps
    coverage_k: Optional[int] = None

    def __post_init__(self):
        if self.policy not in POLICIES:
            raise ValueError(f"policy must be one of {POLICIES}")
        if self.steps < 0 or self.obs_per_step < 0:
            raise ValueError("steps and obs_per_step must be non-negative")
        if self.coverage_k is not None and self.coverage_k < 1:
            raise ValueError("coverage_k must be positive")


@dataclass
class Trace:
    domain: str
    n_fluents: int
    n_actions: int
    seed: int
    obs_per_step: int
    policy: str = "executable-only"
    init_obs: tuple = ()
    steps: list = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.steps)

    def action_distribution(self, domain: GroundDomain) -> dict[str, int]:
        """Per-schema (or per-action) counts of attempted actions."""
        c: Counter = Counter()
        for st in self.steps:
            c[_action_head(domain, st.action)] += 1
        return dict(c)


def _action_head(domain: GroundDomain, a: int) -> str:
    if domain.action_keys is not None:
        return domain.action_keys[a][0]
    return domain.actions[a]


class _Observer:
    def __init__(self, n: int, cfg: TraceConfig, rng: np.random.Generator):
        if cfg.obs_per_step > n:
            raise ValueError(f"obs_per_step {cfg.obs_per_step} exceeds {n} fluents")
        self.n = n
        self.cfg = cfg
        self.rng = rng
        self.last_seen = np.full(n, -1, dtype=np.int64)

    def sample(self, t: int) -> np.ndarray:
        k, n = self.cfg.obs_per_step, self.n
        picked = self.rng.choice(n, size=k, replace=False) if k else np.empty(0, dtype=np.int64)
        if self.cfg.coverage_k is not None:
            # force fluents whose window would otherwise close without an observation
            due = np.flatnonzero(t - self.last_seen >= self.cfg.coverage_k)
            if t == 0:
                due = np.arange(n)
            picked = np.union1d(picked, due)
        picked = np.sort(picked)
        self.last_seen[picked] = t
        return picked


def _observe(s: State, fluents: np.ndarray) -> tuple:
    return tuple((int(f), bool((s >> int(f)) & 1)) for f in fluents)


def _words(s: State, n: int) -> np.ndarray:
    """State bits packed into little-endian uint64 words."""
    w = (n + 63) // 64
    return np.frombuffer(s.to_bytes(8 * w, "little"), dtype="<u8")


def _masks(m: StripsActionModel, n: int) -> tuple[np.ndarray, np.ndarray]:
    w = (n + 63) // 64

    def rows(xs):
        if not xs:
            return np.zeros((0, w), dtype="<u8")
        return np.stack([_words(x, n) for x in xs])

    return rows(m.pre_pos), rows(m.pre_neg)


def generate_trace(domain: GroundDomain, model: StripsActionModel, init: State, cfg: TraceConfig) -> Trace:
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    n, m = domain.n_fluents, domain.n_actions
    observer = _Observer(n, cfg, rng)
    trace = Trace(domain.name, n, m, cfg.seed, cfg.obs_per_step, cfg.policy)
    if cfg.initial_obs:
        trace.init_obs = _observe(init, observer.sample(0))
    pos = neg = None
    if cfg.policy == "executable-only":
        pos, neg = _masks(model, n)
    s = init
    for t in range(1, cfg.steps + 1):
        if cfg.policy == "executable-only":
            bits = _words(s, n)
            ok_rows = ~((pos & ~bits).any(axis=1) | (neg & bits).any(axis=1))
            choices = np.flatnonzero(ok_rows)
            if len(choices) == 0:
                raise DeadEnd(f"no executable action at step {t}")
            a = int(choices[rng.integers(len(choices))])
        else:
            a = int(rng.integers(m))
        nxt = apply(model, s, a)
        ok = nxt is not None
        if ok:
            s = nxt
        trace.steps.append(TraceStep(t, a, ok, _observe(s, observer.sample(t))))
    return trace


def replay_check(domain: GroundDomain, model: StripsActionModel, init: State, trace: Trace) -> bool:
    """True iff re-simulating the trace's actions reproduces every ok flag and observation."""
    s = init
    if any(((s >> f) & 1) != v for f, v in trace.init_obs):
        return False
    for st in trace.steps:
        nxt = apply(model, s, st.action)
        if (nxt is not None) != st.ok:
            return False
        if nxt is not None:
            s = nxt
        if any(((s >> f) & 1) != v for f, v in st.obs):
            return False
    return True


def _dumps(x) -> str:
    return json.dumps(x, separators=(",", ":"))


def write_trace(trace: Trace, domain: GroundDomain, sink: TextIO) -> None:
    header = {
        "domain": trace.domain,
        "fluents": trace.n_fluents,
        "actions": trace.n_actions,
        "seed": trace.seed,
        "obs_per_step": trace.obs_per_step,
        "policy": trace.policy,
    }
    sink.write(_dumps(header) + "\n")
    fl = domain.fluents
    if trace.init_obs:
        sink.write(_dumps({"t": 0, "obs": {fl[f]: v for f, v in trace.init_obs}}) + "\n")
    for st in trace.steps:
        if domain.action_keys is not None:
            head, args = domain.action_keys[st.action]
        else:
            head, args = domain.actions[st.action], ()
        row = {"t": st.index, "action": head, "args": list(args), "ok": st.ok, "obs": {fl[f]: v for f, v in st.obs}}
        sink.write(_dumps(row) + "\n")


def save_trace(trace: Trace, domain: GroundDomain, path: str | Path) -> None:
    with open(path, "w") as fh:
        write_trace(trace, domain, fh)


def read_trace(lines: Iterable[str], domain: GroundDomain) -> Trace:
    it = (l for l in lines if l.strip())
    try:
        header = json.loads(next(it))
    except StopIteration:
        raise SlafError("empty trace file") from None
    if header.get("fluents") != domain.n_fluents or header.get("actions") != domain.n_actions:
        raise SlafError("trace header does not match the domain size")
    keys = {k: i for i, k in enumerate(domain.action_keys)} if domain.action_keys is not None else None
    fidx = domain.fluent_index
    trace = Trace(header["domain"], header["fluents"], header["actions"], header["seed"],
                  header["obs_per_step"], header.get("policy", "executable-only"))
    for line in it:
        row = json.loads(line)
        try:
            obs = tuple((fidx[k], bool(v)) for k, v in row.get("obs", {}).items())
            if row["t"] == 0:
                trace.init_obs = obs
                continue
            if keys is not None:
                a = keys[(row["action"], tuple(row.get("args", ())))]
            else:
                a = domain.action_index[row["action"]]
        except KeyError as e:
            raise SlafError(f"trace step {row.get('t')}: unknown name {e}") from None
        trace.steps.append(TraceStep(int(row["t"]), a, bool(row["ok"]), obs))
    return trace


def load_trace(path: str | Path, domain: GroundDomain) -> Trace:
    with open(path) as fh:
        return read_trace(fh, domain)
