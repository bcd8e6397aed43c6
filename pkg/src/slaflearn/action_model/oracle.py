"""Brute-force SLAF over explicit (state, model) pairs.

Two flavours: ``oracle_slaf`` over a Python set of pairs (reference
semantics, small), and ``VectorOracle`` which encodes the same universe as
a numpy mask so formulas can be compared against it row by row.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import prod
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from ..errors import BeliefTooLarge, InconsistentObservation
from ..logic.atoms import (
    SLOT_CAUSES_NEG,
    SLOT_CAUSES_POS,
    SLOT_KEEPS,
    SLOT_NEEDS_NEG,
    SLOT_NEEDS_POS,
)
from .domain import Effect, GroundDomain, State, StripsActionModel, apply

DEFAULT_CAP = 10**6

# one (action, fluent) option: effect value and precondition (None, True=f, False=not f)
Option = tuple


@dataclass(frozen=True)
class OracleStep:
    action: int
    observation: tuple = ()  # (fluent index, value) pairs
    ok: bool = True


@dataclass(frozen=True)
class OracleBelief:
    pairs: frozenset

    def __len__(self) -> int:
        return len(self.pairs)

    def states(self) -> set:
        return {s for s, _ in self.pairs}

    def models(self) -> set:
        return {m for _, m in self.pairs}


def _term(obs) -> tuple:
    obs = tuple(obs)
    vals = {}
    for f, v in obs:
        if vals.get(f, v) != v:
            raise InconsistentObservation(f"fluent {f} observed both ways")
        vals[f] = v
    return tuple(sorted(vals.items()))


def satisfies(s: State, obs: Iterable[tuple[int, bool]]) -> bool:
    return all(bool((s >> f) & 1) == v for f, v in obs)


def oracle_slaf(b: OracleBelief, steps: Sequence, cap: int = DEFAULT_CAP) -> OracleBelief:
    """Progress and filter pair by pair; a failed action filters on a violated precondition."""
    if len(b) > cap:
        raise BeliefTooLarge(f"{len(b)} pairs exceeds cap {cap}")
    pairs = set(b.pairs)
    for st in steps:
        if not isinstance(st, OracleStep):
            st = OracleStep(*st)
        obs = _term(st.observation)
        nxt = set()
        for s, m in pairs:
            s2 = apply(m, s, st.action)
            if st.ok:
                if s2 is not None and satisfies(s2, obs):
                    nxt.add((s2, m))
            elif s2 is None and satisfies(s, obs):
                nxt.add((s, m))
        pairs = nxt
    return OracleBelief(frozenset(pairs))


@dataclass(frozen=True)
class ModelSpace:
    """Per (action, fluent) option lists; the product enumerates candidate models."""

    domain: GroundDomain
    options: tuple  # indexed a * n + f; each a tuple of Option

    @property
    def size(self) -> int:
        return prod(len(o) for o in self.options)

    def model(self, digits: Sequence[int]) -> StripsActionModel:
        d = self.domain
        n = d.n_fluents
        add, dele, pp, pn = [], [], [], []
        for a in range(d.n_actions):
            x = y = p = q = 0
            for f in range(n):
                eff, pre = self.options[a * n + f][digits[a * n + f]]
                if eff == Effect.CAUSES_TRUE:
                    x |= 1 << f
                elif eff == Effect.CAUSES_FALSE:
                    y |= 1 << f
                if pre is True:
                    p |= 1 << f
                elif pre is False:
                    q |= 1 << f
            add.append(x)
            dele.append(y)
            pp.append(p)
            pn.append(q)
        return StripsActionModel(tuple(add), tuple(dele), tuple(pp), tuple(pn))

    def digits_of(self, m: StripsActionModel) -> Optional[tuple]:
        n = self.domain.n_fluents
        out = []
        for a in range(self.domain.n_actions):
            for f in range(n):
                pre = True if (m.pre_pos[a] >> f) & 1 else False if (m.pre_neg[a] >> f) & 1 else None
                opt = (m.effect(a, f), pre)
                try:
                    out.append(self.options[a * n + f].index(opt))
                except ValueError:
                    return None
        return tuple(out)

    def __iter__(self):
        for digits in itertools.product(*(range(len(o)) for o in self.options)):
            yield self.model(digits)


def model_space(
    domain: GroundDomain,
    free_pre: bool = True,
    fixed_pre: Optional[Mapping] = None,
    fixed_effects: Optional[Mapping] = None,
) -> ModelSpace:
    """Candidate models consistent with the vocabulary axioms and any fixed parts.

    fixed_pre maps action -> iterable of (fluent, value); fixed_effects maps
    action -> {fluent: Effect}.  Names or indices are accepted.
    """
    fixed_pre = fixed_pre or {}
    fixed_effects = fixed_effects or {}

    def aidx(a):
        return domain.action_index[a] if isinstance(a, str) else a

    def fidx(f):
        return domain.fluent_index[f] if isinstance(f, str) else f

    pre_of = {aidx(a): {fidx(f): bool(v) for f, v in lits} for a, lits in fixed_pre.items()}
    eff_of = {aidx(a): {fidx(f): Effect(e) for f, e in effs.items()} for a, effs in fixed_effects.items()}
    opts = []
    for a in range(domain.n_actions):
        for f in range(domain.n_fluents):
            if a in eff_of and f in eff_of[a]:
                effs = (eff_of[a][f],)
            else:
                effs = (Effect.CAUSES_TRUE, Effect.CAUSES_FALSE, Effect.KEEPS)
            if a in pre_of:
                pres = (pre_of[a].get(f),)
            elif free_pre:
                pres = (None, True, False)
            else:
                pres = (None,)
            opts.append(tuple((e, p) for e in effs for p in pres))
    return ModelSpace(domain, tuple(opts))


def enumerate_models_for(domain: GroundDomain, cap: int = DEFAULT_CAP, **constraints) -> set:
    """All axiom-consistent STRIPS models, optionally with fixed preconditions or effects."""
    space = model_space(domain, **constraints)
    if space.size > cap:
        raise BeliefTooLarge(f"{space.size} models exceeds cap {cap}")
    return set(space)


def initial_belief(space: ModelSpace, states: Iterable[State], cap: int = DEFAULT_CAP) -> OracleBelief:
    states = list(states)
    if space.size * len(states) > cap:
        raise BeliefTooLarge(f"{space.size * len(states)} pairs exceeds cap {cap}")
    return OracleBelief(frozenset((s, m) for m in space for s in states))


class VectorOracle:
    """Universe of rows r = model_index * 2^|P| + state as a numpy belief mask.

    Every revised action atom and every fluent has a column over the
    universe, so formula masks and oracle masks are directly comparable.
    """

    def __init__(self, space: ModelSpace, cap: int = DEFAULT_CAP):
        self.space = space
        d = space.domain
        self.n = d.n_fluents
        self.n_models = space.size
        self.n_rows = self.n_models << self.n
        if self.n_rows > cap:
            raise BeliefTooLarge(f"{self.n_rows} rows exceeds cap {cap}")
        midx = np.arange(self.n_models, dtype=np.int64)
        self._digits = []
        stride = 1
        for o in reversed(space.options):
            self._digits.append((midx // stride) % len(o))
            stride *= len(o)
        self._digits.reverse()
        rows = np.arange(self.n_rows, dtype=np.int64)
        self.row_model = rows >> self.n
        self.row_state = rows & ((1 << self.n) - 1)
        self._cols: dict[int, np.ndarray] = {}
        self._masks: dict[int, tuple] = {}

    def _per_model(self, a: int, f: int, pick) -> np.ndarray:
        opts = self.space.options[a * self.n + f]
        table = np.array([pick(e, p) for e, p in opts], dtype=bool)
        return table[self._digits[a * self.n + f]]

    def action_masks(self, a: int) -> tuple:
        r = self._masks.get(a)
        if r is None:
            add = np.zeros(self.n_models, dtype=np.int64)
            dele = np.zeros_like(add)
            pp = np.zeros_like(add)
            pn = np.zeros_like(add)
            for f in range(self.n):
                bit = np.int64(1 << f)
                add |= np.where(self._per_model(a, f, lambda e, p: e == Effect.CAUSES_TRUE), bit, 0)
                dele |= np.where(self._per_model(a, f, lambda e, p: e == Effect.CAUSES_FALSE), bit, 0)
                pp |= np.where(self._per_model(a, f, lambda e, p: p is True), bit, 0)
                pn |= np.where(self._per_model(a, f, lambda e, p: p is False), bit, 0)
            r = (add, dele, pp, pn)
            self._masks[a] = r
        return r

    def column(self, atom: int) -> np.ndarray:
        c = self._cols.get(atom)
        if c is not None:
            return c
        v = self.space.domain.vocab
        if v.is_fluent(atom):
            c = ((self.row_state >> (atom - 1)) & 1).astype(bool)
        elif v.is_prop(atom):
            a, f, slot = v.decode_prop(atom)
            pick = {
                SLOT_CAUSES_POS: lambda e, p: e == Effect.CAUSES_TRUE,
                SLOT_CAUSES_NEG: lambda e, p: e == Effect.CAUSES_FALSE,
                SLOT_KEEPS: lambda e, p: e == Effect.KEEPS,
                SLOT_NEEDS_POS: lambda e, p: p is True,
                SLOT_NEEDS_NEG: lambda e, p: p is False,
            }[slot]
            c = self._per_model(a, f, pick)[self.row_model]
        else:
            raise KeyError(f"atom {atom} has no column in the oracle universe")
        self._cols[atom] = c
        return c

    def evaluate(self, formula) -> np.ndarray:
        from ..logic.models import evaluate_rows

        return evaluate_rows(formula, self.column, self.n_rows)

    def full(self) -> np.ndarray:
        return np.ones(self.n_rows, dtype=bool)

    def observe(self, mask: np.ndarray, obs: Iterable[tuple[int, bool]]) -> np.ndarray:
        out = mask.copy()
        for f, val in _term(obs):
            bitv = ((self.row_state >> f) & 1).astype(bool)
            out &= bitv if val else ~bitv
        return out

    def progress(self, mask: np.ndarray, a: int, ok: bool = True) -> np.ndarray:
        add, dele, pp, pn = self.action_masks(a)
        m, s = self.row_model, self.row_state
        ex = ((s & pp[m]) == pp[m]) & ((s & pn[m]) == 0)
        if not ok:
            return mask & ~ex
        live = mask & ex
        succ = (s[live] & ~dele[m[live]]) | add[m[live]]
        out = np.zeros_like(mask)
        out[(m[live] << self.n) | succ] = True
        return out

    def step(self, mask: np.ndarray, a: int, obs=(), ok: bool = True) -> np.ndarray:
        return self.observe(self.progress(mask, a, ok), obs)

    def run(self, mask: np.ndarray, steps: Sequence) -> np.ndarray:
        for st in steps:
            if not isinstance(st, OracleStep):
                st = OracleStep(*st)
            mask = self.step(mask, st.action, st.observation, st.ok)
        return mask

    def encode(self, b: OracleBelief) -> np.ndarray:
        out = np.zeros(self.n_rows, dtype=bool)
        strides = []
        acc = 1
        for o in reversed(self.space.options):
            strides.append(acc)
            acc *= len(o)
        strides.reverse()
        for s, m in b.pairs:
            dg = self.space.digits_of(m)
            if dg is None:
                continue
            idx = sum(d * k for d, k in zip(dg, strides))
            out[(idx << self.n) | s] = True
        return out

    def decode(self, mask: np.ndarray) -> OracleBelief:
        pairs = set()
        for r in np.flatnonzero(mask):
            midx = int(r) >> self.n
            dg = [int(self._digits[j][midx]) for j in range(len(self.space.options))]
            pairs.add((int(r) & ((1 << self.n) - 1), self.space.model(dg)))
        return OracleBelief(frozenset(pairs))
