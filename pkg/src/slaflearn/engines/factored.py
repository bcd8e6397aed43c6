"""Factored SLAF over the tiny language: closed-form literal SLAF plus distribution."""

from __future__ import annotations

from typing import Iterable, Optional

from ..action_model.domain import GroundDomain
from ..action_model.tiny import TinyVocab
from ..errors import VocabularyTooLarge
from ..logic.atoms import AtomKind
from ..logic.nnf import OP_AND, OP_LIT, OP_OR, OP_TRUE, Node, _build, conj, conj_all, disj, disj_all, lit, postorder, term

TRUE_LITERAL = 0


class LiteralSlafTable:
    """Caches SLAF[a](l) for the 2n fluent literals and TRUE, per action."""

    def __init__(self, domain: GroundDomain, vocab: Optional[TinyVocab] = None):
        self.domain = domain
        self.vocab = vocab if vocab is not None else TinyVocab(domain)
        self._cache: dict[tuple[int, int], Node] = {}

    def completeness(self, a: int) -> Node:
        """C_a: every effect-given-state atom pair has at least one member true."""
        v, n = self.vocab, self.vocab.n
        return conj_all(
            disj(lit(v.eff(a, f, True, s)), lit(v.eff(a, f, False, s))) for s in range(1 << n) for f in range(n)
        )

    def __call__(self, a: int, l: int = TRUE_LITERAL) -> Node:
        key = (a, l)
        hit = self._cache.get(key)
        if hit is None:
            hit = self._compute(a, l)
            self._cache[key] = hit
        return hit

    def _compute(self, a: int, l: int) -> Node:
        v, n = self.vocab, self.vocab.n
        if l != TRUE_LITERAL and v.kind(abs(l)) is AtomKind.ACTION:
            return conj(lit(l), self(a, TRUE_LITERAL))
        states = [s for s in range(1 << n) if l == TRUE_LITERAL or (((s >> (abs(l) - 1)) & 1) == (l > 0))]
        # conjunction over selections of per-state disjunctions, kept in factored form:
        # AND over (l_1..l_m) OR_i (l_i | a_Gi^-l_i)  ==  OR_i AND_l (l | a_Gi^-l)
        branches = []
        for s in states:
            branches.append(
                conj_all(
                    disj(lit(sign * (f + 1)), lit(v.eff(a, f, sign < 0, s)))
                    for f in range(n)
                    for sign in (1, -1)
                )
            )
        return conj(disj_all(branches), self.completeness(a))

    def __len__(self) -> int:
        return len(self._cache)


def literal_slaf(a: int, l: int, domain: GroundDomain, table: Optional[LiteralSlafTable] = None) -> Node:
    table = table if table is not None else LiteralSlafTable(domain)
    if table.vocab.n > 6:
        raise VocabularyTooLarge(f"{table.vocab.n} fluents")
    return table(a, l)


def factored_step(f: Node, a: int, o: Iterable[int], table: LiteralSlafTable) -> Node:
    """Map every literal leaf to its literal SLAF and keep the connectives; then conjoin o."""
    memo: dict[int, Node] = {}
    for n in postorder([f]):
        if n.op == OP_LIT:
            r = table(a, n.lit)
        elif n.op == OP_TRUE:
            r = table(a, TRUE_LITERAL)
        elif n.op in (OP_AND, OP_OR):
            r = _build(n.op, [memo[id(k)] for k in n.kids])
        else:
            r = n
        memo[id(n)] = r
    return conj(memo[id(f)], term(o))
