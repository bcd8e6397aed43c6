"""Atoms, literals and vocabularies.

Literals are signed ints in DIMACS style: atom ids start at 1 and ``-i`` is
the negation of atom ``i``.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from enum import Enum
from typing import Hashable, Iterable, Optional

CAUSES = "causes"
KEEPS = "keeps"
NEEDS = "needs"

# slots used by the axiom-aware clause reducer
SLOT_CAUSES_POS, SLOT_CAUSES_NEG, SLOT_KEEPS, SLOT_NEEDS_POS, SLOT_NEEDS_NEG = range(5)


class AtomKind(Enum):
    FLUENT = "fluent"
    PRIMED = "primed"
    ACTION = "action"


@dataclass(frozen=True)
class ActionProp:
    """Revised-language action proposition: a causes l, a keeps f, a needs l."""

    action: str
    relation: str
    fluent: str
    positive: bool = True

    @property
    def slot(self) -> int:
        if self.relation == CAUSES:
            return SLOT_CAUSES_POS if self.positive else SLOT_CAUSES_NEG
        if self.relation == KEEPS:
            return SLOT_KEEPS
        return SLOT_NEEDS_POS if self.positive else SLOT_NEEDS_NEG

    def pretty(self) -> str:
        lit = self.fluent if self.positive else f"(not {self.fluent})"
        return f"({self.action} {self.relation} {lit})"


@dataclass(frozen=True)
class EffectGivenTerm:
    """Tiny-language proposition a_G^l: a causes literal l when the complete term G holds."""

    action: str
    fluent: str
    positive: bool
    term: tuple  # tuple of (fluent, bool) pairs

    def pretty(self) -> str:
        lit = self.fluent if self.positive else f"(not {self.fluent})"
        term = " ".join(f if v else f"(not {f})" for f, v in self.term)
        return f"({self.action} [{term}] {lit})"


@dataclass(frozen=True)
class SchemaProp:
    """Schema-level action proposition, e.g. (STACK CAUSES (ON ?OB ?UNDEROB)).

    ``pattern`` is (predicate, parameter names); ``slot`` is one of SLOT_*.
    """

    schema: str
    pattern: tuple
    slot: int

    @property
    def relation(self) -> str:
        return _SLOT_PROPS[self.slot][0]

    @property
    def positive(self) -> bool:
        return _SLOT_PROPS[self.slot][1]

    def fluent_text(self) -> str:
        pred, params = self.pattern
        return "(" + " ".join([pred.upper(), *(p.upper() for p in params)]) + ")"

    def pretty(self) -> str:
        rel, pos = _SLOT_PROPS[self.slot]
        lit = self.fluent_text() if pos else f"(NOT {self.fluent_text()})"
        return f"({self.schema.upper()} {rel.upper()} {lit})"

    def axiom_slot(self) -> tuple:
        return (self.schema, self.pattern), self.slot

    @staticmethod
    def of(key: tuple, slot: int) -> "SchemaProp":
        return SchemaProp(key[0], key[1], slot)


@dataclass(frozen=True)
class Atom:
    id: int
    kind: AtomKind
    payload: Hashable


_SLOT_PROPS = {
    SLOT_CAUSES_POS: (CAUSES, True),
    SLOT_CAUSES_NEG: (CAUSES, False),
    SLOT_KEEPS: (KEEPS, True),
    SLOT_NEEDS_POS: (NEEDS, True),
    SLOT_NEEDS_NEG: (NEEDS, False),
}


def slot_prop(action: str, fluent: str, slot: int) -> ActionProp:
    rel, pos = _SLOT_PROPS[slot]
    return ActionProp(action, rel, fluent, pos)


def neg(lit: int) -> int:
    return -lit


def lit_sort_key(lit: int) -> int:
    # atom id first, positive before negative
    return 2 * abs(lit) + (lit < 0)


class Vocabulary:
    """Maps atom ids to atoms and pretty names (and back)."""

    def atom(self, i: int) -> Atom:
        raise NotImplementedError

    def name(self, i: int) -> str:
        a = self.atom(i)
        p = a.payload
        if a.kind is AtomKind.PRIMED:
            return f"{p}'"
        if isinstance(p, (ActionProp, EffectGivenTerm)):
            return p.pretty()
        return str(p)

    def lookup(self, name: str) -> int:
        raise NotImplementedError

    def lit_name(self, lit: int) -> str:
        n = self.name(abs(lit))
        return n if lit > 0 else f"(not {n})"

    def axiom_slot(self, i: int) -> Optional[tuple]:
        """(group key, slot) for revised-language action atoms, else None."""
        p = self.atom(i).payload
        if isinstance(p, ActionProp):
            return (p.action, p.fluent), p.slot
        return None

    def group_atom(self, key: tuple, slot: int) -> int:
        """Atom id of the given axiom slot for an (action, fluent) group."""
        raise NotImplementedError

    def primed(self, i: int) -> int:
        raise NotImplementedError

    def unprimed(self, i: int) -> int:
        raise NotImplementedError

    def kind(self, i: int) -> AtomKind:
        return self.atom(i).kind


class AtomTable(Vocabulary):
    """Generic interner; ids are assigned in insertion order and never reused."""

    def __init__(self):
        self._atoms: list[Atom] = []
        self._index: dict[tuple, int] = {}
        self._names: dict[str, int] = {}
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self._atoms)

    def intern(self, kind: AtomKind, payload: Hashable) -> int:
        key = (kind, payload)
        i = self._index.get(key)
        if i is not None:
            return i
        with self._lock:
            i = self._index.get(key)
            if i is None:
                i = len(self._atoms) + 1
                self._atoms.append(Atom(i, kind, payload))
                self._index[key] = i
                self._names[Vocabulary.name(self, i)] = i
        return i

    def fluent(self, name: str) -> int:
        return self.intern(AtomKind.FLUENT, name)

    def action(self, payload: Hashable) -> int:
        return self.intern(AtomKind.ACTION, payload)

    def primed(self, i: int) -> int:
        return self.intern(AtomKind.PRIMED, self.atom(i).payload)

    def unprimed(self, i: int) -> int:
        return self.intern(AtomKind.FLUENT, self.atom(i).payload)

    def atom(self, i: int) -> Atom:
        return self._atoms[i - 1]

    def group_atom(self, key: tuple, slot: int) -> int:
        action, fluent = key
        return self.action(slot_prop(action, fluent, slot))

    def lookup(self, name: str) -> int:
        return self._names[name]

    def ids(self) -> Iterable[int]:
        return range(1, len(self._atoms) + 1)
