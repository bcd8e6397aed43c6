"""The tiny effect-given-state language used by test fixtures.

Atoms a_s^l say "a causes literal l when executed in the complete state s".
Every interpretation maps to one deterministic relation per action; the
helpers below build effect axioms, relation theories and the inverse map.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Mapping, Optional

from ..errors import VocabularyTooLarge
from ..logic.atoms import AtomKind, AtomTable, EffectGivenTerm
from ..logic.nnf import Node, conj, conj_all, disj, disj_all, implies, lit, term
from .domain import GroundDomain, State

MAX_TINY_FLUENTS = 6

# relation for one action: tuple indexed by state, entry = successor or None
Relation = tuple


class TinyVocab(AtomTable):
    """Fluents, primed fluents and a_s^l atoms over a small ground domain."""

    def __init__(self, domain: GroundDomain):
        if domain.n_fluents > MAX_TINY_FLUENTS:
            raise VocabularyTooLarge(f"{domain.n_fluents} fluents exceeds {MAX_TINY_FLUENTS}")
        super().__init__()
        self.domain = domain
        self.n = domain.n_fluents
        for f in domain.fluents:
            self.fluent(f)
        for f in range(self.n):
            self.primed(f + 1)

    def state_term(self, s: State) -> tuple:
        return tuple((self.domain.fluents[i], bool((s >> i) & 1)) for i in range(self.n))

    def eff(self, a: int, f: int, positive: bool, s: State) -> int:
        d = self.domain
        return self.action(EffectGivenTerm(d.actions[a], d.fluents[f], positive, self.state_term(s)))

    def state_node(self, s: State, primed: bool = False) -> Node:
        off = self.n if primed else 0
        return term((i + 1 + off) if (s >> i) & 1 else -(i + 1 + off) for i in range(self.n))

    def action_atoms(self, a: int) -> list[int]:
        return [self.eff(a, f, pos, s) for s in range(1 << self.n) for f in range(self.n) for pos in (True, False)]

    def fluent_atoms(self) -> list[int]:
        return list(range(1, self.n + 1))


def _vocab(domain: GroundDomain, vocab: Optional[TinyVocab]) -> TinyVocab:
    return vocab if vocab is not None else TinyVocab(domain)


def teff_tiny(a: int | str, domain: GroundDomain, vocab: Optional[TinyVocab] = None) -> Node:
    """Effect and explanation-closure axioms with preconditions ranging over complete states."""
    v = _vocab(domain, vocab)
    if isinstance(a, str):
        a = domain.action_index[a]
    n = v.n
    parts = []
    for f in range(n):
        for positive in (True, False):
            sign = 1 if positive else -1
            lp = lit(sign * v.primed(f + 1))
            why = []
            for s in range(1 << n):
                g = conj(lit(v.eff(a, f, positive, s)), v.state_node(s))
                parts.append(implies(g, lp))
                why.append(g)
            parts.append(implies(lp, disj_all(why)))
    return conj_all(parts)


def th_of_relation(a: int, rel: Relation, domain: GroundDomain, vocab: Optional[TinyVocab] = None) -> Node:
    """Th0 (changes), Th1 (no inertia) and Th2 (inexecutable states) for one action."""
    v = _vocab(domain, vocab)
    n = v.n
    parts = []
    for s in range(1 << n):
        s2 = rel[s]
        for f in range(n):
            x, y = v.eff(a, f, True, s), v.eff(a, f, False, s)
            parts.append(disj(lit(x), lit(y)))  # Th1
            if s2 is not None:
                if (s2 >> f) & 1:
                    parts += [lit(x), lit(-y)]
                else:
                    parts += [lit(y), lit(-x)]
        if s2 is None:
            parts.append(disj_all(conj(lit(v.eff(a, f, True, s)), lit(v.eff(a, f, False, s))) for f in range(n)))
    return conj_all(parts)


def relation_of_interpretation(a: int, m: Mapping[int, bool], domain: GroundDomain, vocab: Optional[TinyVocab] = None) -> Relation:
    """R_M for action a: successor per state, None where both a_s^p and a_s^-p hold."""
    v = _vocab(domain, vocab)
    n = v.n
    out = []
    for s in range(1 << n):
        s2 = 0
        dead = False
        for f in range(n):
            x, y = m[v.eff(a, f, True, s)], m[v.eff(a, f, False, s)]
            if x and y:
                dead = True
                break
            if x or ((s >> f) & 1 and not y):
                s2 |= 1 << f
        out.append(None if dead else s2)
    return tuple(out)


def all_relations(n: int) -> Iterable[Relation]:
    """Every deterministic partial relation over 2^n states."""
    return itertools.product([None, *range(1 << n)], repeat=1 << n)


def rho_of_models(models: Iterable[frozenset], a: int, domain: GroundDomain, vocab: TinyVocab) -> set:
    """Map models (sets of signed literals over P and a's atoms) to (state, relation) pairs."""
    out = set()
    for m in models:
        val = {abs(x): x > 0 for x in m}
        s = sum(1 << (f - 1) for f in vocab.fluent_atoms() if val[f])
        out.add((s, relation_of_interpretation(a, val, domain, vocab)))
    return out


def th_of_rho(a: int, rho: Iterable[tuple], domain: GroundDomain, vocab: Optional[TinyVocab] = None) -> Node:
    v = _vocab(domain, vocab)
    return disj_all(conj(v.state_node(s), th_of_relation(a, r, domain, v)) for s, r in rho)


def is_tiny_atom(vocab: TinyVocab, i: int) -> bool:
    return vocab.kind(i) is AtomKind.ACTION
