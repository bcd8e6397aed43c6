"""Ground domains, STRIPS action models, states and the revised vocabulary."""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from enum import IntEnum
from functools import cached_property
from typing import Hashable, Iterable, Mapping, Optional, Sequence

from ..logic.atoms import (
    CAUSES,
    KEEPS,
    NEEDS,
    SLOT_CAUSES_NEG,
    SLOT_CAUSES_POS,
    SLOT_KEEPS,
    SLOT_NEEDS_NEG,
    SLOT_NEEDS_POS,
    ActionProp,
    Atom,
    AtomKind,
    SchemaProp,
    Vocabulary,
    slot_prop,
)
from ..sexp import dumps, parse_one

State = int  # bit i set <=> fluent i holds


class Effect(IntEnum):
    CAUSES_TRUE = 0
    CAUSES_FALSE = 1
    KEEPS = 2


@dataclass(frozen=True, eq=False)
class GroundDomain:
    """Ordered fluents P and ground actions A; order fixes atom ids."""

    fluents: tuple
    actions: tuple
    name: str = "domain"
    # optional back references: (predicate, args) / (schema, args)
    fluent_keys: Optional[tuple] = None
    action_keys: Optional[tuple] = None

    def __post_init__(self):
        if len(set(self.fluents)) != len(self.fluents):
            raise ValueError("duplicate fluent names")
        if len(set(self.actions)) != len(self.actions):
            raise ValueError("duplicate action names")

    @cached_property
    def fluent_index(self) -> dict:
        return {f: i for i, f in enumerate(self.fluents)}

    @cached_property
    def action_index(self) -> dict:
        return {a: i for i, a in enumerate(self.actions)}

    @cached_property
    def vocab(self) -> "GroundVocabulary":
        return GroundVocabulary(self)

    @property
    def n_fluents(self) -> int:
        return len(self.fluents)

    @property
    def n_actions(self) -> int:
        return len(self.actions)

    def state(self, true_fluents: Iterable[str]) -> State:
        s = 0
        for f in true_fluents:
            s |= 1 << self.fluent_index[f]
        return s

    def true_fluents(self, s: State) -> list[str]:
        return [f for i, f in enumerate(self.fluents) if (s >> i) & 1]


class GroundVocabulary(Vocabulary):
    """Arithmetic atom numbering for a ground domain.

    Fluents get ids 1..n, primed fluents n+1..2n, then the five revised
    propositions per (action, fluent) ordered by (action, fluent, kind).
    Extra atoms (schema propositions) are interned after that range.
    """

    def __init__(self, domain: GroundDomain):
        self.domain = domain
        self.n = domain.n_fluents
        self.m = domain.n_actions
        self.prop_base = 2 * self.n + 1
        self.extra_base = self.prop_base + 5 * self.n * self.m
        self._extra: list[Hashable] = []
        self._extra_index: dict[Hashable, int] = {}
        self._extra_names: dict[str, int] = {}
        self._names: dict[str, int] = {}
        self._lock = threading.Lock()

    # ids
    def fluent(self, f: int | str) -> int:
        if isinstance(f, str):
            f = self.domain.fluent_index[f]
        return f + 1

    def primed(self, i: int) -> int:
        return i + self.n

    def unprimed(self, i: int) -> int:
        return i - self.n

    def prop(self, a: int | str, slot: int, f: int | str) -> int:
        if isinstance(a, str):
            a = self.domain.action_index[a]
        if isinstance(f, str):
            f = self.domain.fluent_index[f]
        return self.prop_base + (a * self.n + f) * 5 + slot

    def causes(self, a, f, positive: bool = True) -> int:
        return self.prop(a, SLOT_CAUSES_POS if positive else SLOT_CAUSES_NEG, f)

    def keeps(self, a, f) -> int:
        return self.prop(a, SLOT_KEEPS, f)

    def needs(self, a, f, positive: bool = True) -> int:
        return self.prop(a, SLOT_NEEDS_POS if positive else SLOT_NEEDS_NEG, f)

    def decode_prop(self, i: int) -> tuple[int, int, int]:
        """(action index, fluent index, slot) of a revised action atom."""
        k = i - self.prop_base
        af, slot = divmod(k, 5)
        a, f = divmod(af, self.n)
        return a, f, slot

    def is_prop(self, i: int) -> bool:
        return self.prop_base <= i < self.extra_base

    def is_fluent(self, i: int) -> bool:
        return 1 <= i <= self.n

    # extras
    def add_extra(self, payload: Hashable) -> int:
        i = self._extra_index.get(payload)
        if i is not None:
            return i
        with self._lock:
            i = self._extra_index.get(payload)
            if i is None:
                i = self.extra_base + len(self._extra)
                self._extra.append(payload)
                self._extra_index[payload] = i
                self._extra_names[payload.pretty() if hasattr(payload, "pretty") else str(payload)] = i
        return i

    def extra_id(self, payload: Hashable) -> Optional[int]:
        return self._extra_index.get(payload)

    @property
    def n_extra(self) -> int:
        return len(self._extra)

    def extra_ids(self) -> range:
        return range(self.extra_base, self.extra_base + len(self._extra))

    # Vocabulary interface
    def atom(self, i: int) -> Atom:
        if 1 <= i <= self.n:
            return Atom(i, AtomKind.FLUENT, self.domain.fluents[i - 1])
        if i <= 2 * self.n:
            return Atom(i, AtomKind.PRIMED, self.domain.fluents[i - self.n - 1])
        if i < self.extra_base:
            a, f, slot = self.decode_prop(i)
            return Atom(i, AtomKind.ACTION, slot_prop(self.domain.actions[a], self.domain.fluents[f], slot))
        return Atom(i, AtomKind.ACTION, self._extra[i - self.extra_base])

    def name(self, i: int) -> str:
        if i >= self.extra_base:
            p = self._extra[i - self.extra_base]
            return p.pretty() if hasattr(p, "pretty") else str(p)
        return super().name(i)

    def kind(self, i: int) -> AtomKind:
        if 1 <= i <= self.n:
            return AtomKind.FLUENT
        if i <= 2 * self.n:
            return AtomKind.PRIMED
        return AtomKind.ACTION

    def axiom_slot(self, i: int) -> Optional[tuple]:
        if self.prop_base <= i < self.extra_base:
            k = i - self.prop_base
            af, slot = divmod(k, 5)
            return af, slot
        if i >= self.extra_base:
            p = self._extra[i - self.extra_base]
            return p.axiom_slot() if hasattr(p, "axiom_slot") else None
        return None

    def group_atom(self, key, slot: int) -> int:
        if isinstance(key, int):
            return self.prop_base + key * 5 + slot
        return self.add_extra(SchemaProp.of(key, slot))

    def lookup(self, name: str) -> int:
        if not self._names:
            for i, f in enumerate(self.domain.fluents):
                self._names[f] = i + 1
                self._names[f + "'"] = i + 1 + self.n
        i = self._names.get(name)
        if i is not None:
            return i
        i = self._extra_names.get(name)
        if i is not None:
            return i
        x = parse_one(name)
        if not isinstance(x, list) or len(x) != 3:
            raise KeyError(name)
        act, rel, litx = x
        act = act if isinstance(act, str) else dumps(act)
        positive = True
        if isinstance(litx, list) and litx and litx[0] == "not" and len(litx) == 2:
            positive, litx = False, litx[1]
        fl = litx if isinstance(litx, str) else dumps(litx)
        if rel == CAUSES:
            slot = SLOT_CAUSES_POS if positive else SLOT_CAUSES_NEG
        elif rel == KEEPS:
            slot = SLOT_KEEPS
        elif rel == NEEDS:
            slot = SLOT_NEEDS_POS if positive else SLOT_NEEDS_NEG
        else:
            raise KeyError(name)
        return self.prop(act, slot, fl)


@dataclass(frozen=True)
class StripsActionModel:
    """Unconditional STRIPS model as per-action bitmasks over fluent indices.

    add/delete encode CausesTrue/CausesFalse (everything else Keeps);
    pre_pos/pre_neg encode the precondition literals.
    """

    add: tuple
    delete: tuple
    pre_pos: tuple
    pre_neg: tuple

    def __post_init__(self):
        for a in range(len(self.add)):
            if self.add[a] & self.delete[a]:
                raise ValueError(f"action {a}: fluent both caused true and false")
            if self.pre_pos[a] & self.pre_neg[a]:
                raise ValueError(f"action {a}: precondition contains f and not f")

    @staticmethod
    def build(
        domain: GroundDomain,
        effects: Mapping[str, Mapping[str, Effect]] | None = None,
        pre: Mapping[str, Iterable[tuple[str, bool]]] | None = None,
    ) -> "StripsActionModel":
        effects = effects or {}
        pre = pre or {}
        add, dele, pp, pn = [], [], [], []
        for a in domain.actions:
            ad = de = p = q = 0
            for f, e in effects.get(a, {}).items():
                bit = 1 << domain.fluent_index[f]
                if e == Effect.CAUSES_TRUE:
                    ad |= bit
                elif e == Effect.CAUSES_FALSE:
                    de |= bit
            for f, v in pre.get(a, ()):
                bit = 1 << domain.fluent_index[f]
                if v:
                    p |= bit
                else:
                    q |= bit
            add.append(ad)
            dele.append(de)
            pp.append(p)
            pn.append(q)
        return StripsActionModel(tuple(add), tuple(dele), tuple(pp), tuple(pn))

    def effect(self, a: int, f: int) -> Effect:
        if (self.add[a] >> f) & 1:
            return Effect.CAUSES_TRUE
        if (self.delete[a] >> f) & 1:
            return Effect.CAUSES_FALSE
        return Effect.KEEPS

    def precondition(self, a: int) -> list[tuple[int, bool]]:
        out = []
        x, y = self.pre_pos[a], self.pre_neg[a]
        f = 0
        while x or y:
            if x & 1:
                out.append((f, True))
            if y & 1:
                out.append((f, False))
            x >>= 1
            y >>= 1
            f += 1
        return out

    def executable(self, a: int, s: State) -> bool:
        return (s & self.pre_pos[a]) == self.pre_pos[a] and not (s & self.pre_neg[a])

    def assignment(self, domain: GroundDomain) -> dict[int, bool]:
        """Truth values of every revised action atom under this model."""
        v = domain.vocab
        out = {}
        for a in range(domain.n_actions):
            for f in range(domain.n_fluents):
                e = self.effect(a, f)
                out[v.causes(a, f, True)] = e == Effect.CAUSES_TRUE
                out[v.causes(a, f, False)] = e == Effect.CAUSES_FALSE
                out[v.keeps(a, f)] = e == Effect.KEEPS
                out[v.needs(a, f, True)] = bool((self.pre_pos[a] >> f) & 1)
                out[v.needs(a, f, False)] = bool((self.pre_neg[a] >> f) & 1)
        return out

    def describe(self, domain: GroundDomain) -> "DomainDescription":
        rules = {}
        for a, name in enumerate(domain.actions):
            rs = []
            for f, fl in enumerate(domain.fluents):
                e = self.effect(a, f)
                if e == Effect.KEEPS:
                    rs.append((KEEPS, fl, True))
                else:
                    rs.append((CAUSES, fl, e == Effect.CAUSES_TRUE))
            rules[name] = tuple(rs)
        return DomainDescription(rules)


def apply(m: StripsActionModel, s: State, a: int) -> Optional[State]:
    """Successor state, or None when a precondition literal is false in s."""
    if (s & m.pre_pos[a]) != m.pre_pos[a] or (s & m.pre_neg[a]):
        return None
    return (s & ~m.delete[a]) | m.add[a]


@dataclass(frozen=True)
class DomainDescription:
    """Complete unconditional description: per action, rules (relation, fluent, sign)."""

    rules: Mapping[str, tuple] = field(default_factory=dict)

    def validate(self, domain: GroundDomain) -> None:
        for a, rs in self.rules.items():
            seen = [f for _, f, _ in rs]
            if len(seen) != len(set(seen)):
                raise ValueError(f"{a}: more than one rule for a fluent")
            if set(seen) != set(domain.fluents):
                raise ValueError(f"{a}: description is not complete")

    def to_model(self, domain: GroundDomain) -> StripsActionModel:
        self.validate(domain)
        effects = {}
        for a, rs in self.rules.items():
            effects[a] = {
                f: (Effect.KEEPS if rel == KEEPS else Effect.CAUSES_TRUE if pos else Effect.CAUSES_FALSE)
                for rel, f, pos in rs
            }
        return StripsActionModel.build(domain, effects)

    def lines(self) -> list[str]:
        out = []
        for a, rs in self.rules.items():
            for rel, f, pos in rs:
                out.append(f"{a} {rel} {f if pos else 'not ' + f}")
        return out


def toy_domain(fluents: Sequence[str], actions: Sequence[str], name: str = "toy") -> GroundDomain:
    return GroundDomain(tuple(fluents), tuple(actions), name)
