"""Clause sets: construction, subsumption, CNF conversion and variable elimination."""

from __future__ import annotations

import weakref
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

from ..errors import ClauseExplosion, MixedVocabulary
from .atoms import AtomKind, Vocabulary, lit_sort_key
from .nnf import OP_AND, OP_FALSE, OP_LIT, OP_OR, OP_TRUE, Node, postorder

Clause = tuple  # canonical: sorted by (atom id, sign), no duplicates, no tautologies
DEFAULT_CLAUSE_LIMIT = 10_000_000

Reducer = Callable[[Clause], Optional[Clause]]


def make_clause(lits: Iterable[int]) -> Optional[Clause]:
    """Canonical clause, or None when the literals form a tautology."""
    s = set(lits)
    for l in s:
        if -l in s:
            return None
    return tuple(sorted(s, key=lit_sort_key))


@dataclass(frozen=True)
class CnfFormula:
    clauses: frozenset = field(default_factory=frozenset)
    vocabulary: frozenset = field(default_factory=frozenset)

    @staticmethod
    def of(clauses: Iterable[Iterable[int]], vocabulary: Iterable[int] = ()) -> "CnfFormula":
        cs = set()
        for c in clauses:
            k = make_clause(c)
            if k is not None:
                cs.add(k)
        atoms = {abs(l) for c in cs for l in c} | set(vocabulary)
        return CnfFormula(frozenset(cs), frozenset(atoms))

    @property
    def is_false(self) -> bool:
        return () in self.clauses

    @property
    def is_true(self) -> bool:
        return not self.clauses

    def atoms(self) -> set[int]:
        return {abs(l) for c in self.clauses for l in c}

    def max_clause_len(self) -> int:
        return max((len(c) for c in self.clauses), default=0)

    def __len__(self) -> int:
        return len(self.clauses)

    def conjoin(self, other: "CnfFormula") -> "CnfFormula":
        return CnfFormula(self.clauses | other.clauses, self.vocabulary | other.vocabulary)

    def simplify(self) -> "CnfFormula":
        return CnfFormula(frozenset(subsume(self.clauses)), self.vocabulary)

    def sorted_clauses(self) -> list[Clause]:
        return sorted(self.clauses, key=lambda c: (len(c), [lit_sort_key(l) for l in c]))


TRUE_CNF = CnfFormula()
FALSE_CNF = CnfFormula(frozenset({()}))


def _signature(c: Clause) -> int:
    s = 0
    for l in c:
        s |= 1 << (lit_sort_key(l) & 63)
    return s


def subsume(clauses: Iterable[Clause]) -> list[Clause]:
    """Remove every clause that is a superset of another clause.

    A 64-bucket literal signature prefilters candidates before the subset
    test; each kept clause is indexed under its rarest literal.
    """
    cl = sorted(set(clauses), key=len)
    if not cl:
        return []
    if cl[0] == ():
        return [()]
    freq = Counter(l for c in cl for l in c)
    watch: dict[int, list] = defaultdict(list)
    kept: list[Clause] = []
    for c in cl:
        sc = _signature(c)
        cset = None
        hit = False
        for l in c:
            bucket = watch.get(l)
            if not bucket:
                continue
            for sd, d in bucket:
                if sd & ~sc:
                    continue
                if cset is None:
                    cset = set(c)
                if cset.issuperset(d):
                    hit = True
                    break
            if hit:
                break
        if not hit:
            kept.append(c)
            watch[min(c, key=freq.__getitem__)].append((sc, c))
    return kept


def _product(a: list, b: list, reducer: Optional[Reducer], limit: int) -> list:
    if len(a) * len(b) > limit:
        raise ClauseExplosion(limit)
    out = set()
    for c in a:
        for d in b:
            k = make_clause(c + d)
            if k is not None and reducer is not None:
                k = reducer(k)
            if k is not None:
                out.add(k)
    return subsume(out)


class CnfRenderer:
    """Memoized NNF to CNF conversion.

    Or-nodes (and And-nodes that sit under an Or) are memoized per node
    across calls, so re-rendering a belief that grew by a few nodes only
    converts the new nodes. And-chains at the top are walked into a single
    accumulator instead of being copied level by level.
    """

    def __init__(self, reducer: Optional[Reducer] = None, limit: int = DEFAULT_CLAUSE_LIMIT):
        self.reducer = reducer
        self.limit = limit
        # weak keys: memo entries vanish together with the nodes they describe
        self._memo: "weakref.WeakKeyDictionary[Node, list]" = weakref.WeakKeyDictionary()

    def _node_cnf(self, root: Node) -> list:
        memo = self._memo
        hit = memo.get(root)
        if hit is not None:
            return hit
        for n in postorder([root]):
            if n in memo:
                continue
            if n.op == OP_TRUE:
                r = []
            elif n.op == OP_FALSE:
                r = [()]
            elif n.op == OP_LIT:
                c = (n.lit,)
                if self.reducer is not None:
                    c = self.reducer(c)
                r = [] if c is None else [c]
            elif n.op == OP_AND:
                acc = set()
                for k in n.kids:
                    acc.update(memo[k])
                if len(acc) > self.limit:
                    raise ClauseExplosion(self.limit)
                r = subsume(acc)
            else:
                r = [()]
                for k in n.kids:
                    r = _product(r, memo[k], self.reducer, self.limit)
            memo[n] = r
        return memo[root]

    def clauses(self, roots: Iterable[Node], simplify: bool = True) -> list[Clause]:
        acc: set = set()
        seen: set[int] = set()
        stack = list(roots)
        while stack:
            n = stack.pop()
            if n.uid in seen:
                continue
            seen.add(n.uid)
            if n.op == OP_AND:
                stack.extend(n.kids)
            else:
                acc.update(self._node_cnf(n))
            if len(acc) > self.limit:
                raise ClauseExplosion(self.limit)
        return subsume(acc) if simplify else list(acc)

    def render(self, roots: Iterable[Node]) -> CnfFormula:
        return CnfFormula(frozenset(self.clauses(roots)))


def to_cnf(f: Node, limit: int = DEFAULT_CLAUSE_LIMIT, reducer: Optional[Reducer] = None) -> CnfFormula:
    """Equivalent CNF by distribution, with tautology removal and subsumption."""
    cs = CnfRenderer(reducer, limit).clauses([f])
    atoms = {abs(n.lit) for n in postorder([f]) if n.op == OP_LIT}
    return CnfFormula(frozenset(cs), frozenset(atoms))


def resolve_out(f: CnfFormula, x: int, limit: int = DEFAULT_CLAUSE_LIMIT) -> CnfFormula:
    """Keep clauses without x, add all resolvents on x, drop clauses with x."""
    x = abs(x)
    pos, negs, rest = [], [], []
    for c in f.clauses:
        if x in c:
            pos.append(c)
        elif -x in c:
            negs.append(c)
        else:
            rest.append(c)
    if len(pos) * len(negs) > limit:
        raise ClauseExplosion(limit)
    out = set(rest)
    for p in pos:
        ps = [l for l in p if l != x]
        for n in negs:
            k = make_clause(ps + [l for l in n if l != -x])
            if k is not None:
                out.add(k)
    return CnfFormula(frozenset(subsume(out)), f.vocabulary - {x})


def eliminate_vars(f: CnfFormula, xs: Iterable[int], limit: int = DEFAULT_CLAUSE_LIMIT) -> CnfFormula:
    """Existentially quantify xs, cheapest variable (fewest occurrences) first."""
    todo = {abs(x) for x in xs}
    while todo:
        occ = Counter(abs(l) for c in f.clauses for l in c)
        x = min(todo, key=lambda v: (occ.get(v, 0), v))
        todo.discard(x)
        f = resolve_out(f, x, limit)
        if len(f.clauses) > limit:
            raise ClauseExplosion(limit)
    return f


def rename_primed(f: CnfFormula, vocab: Vocabulary) -> CnfFormula:
    """Replace every primed fluent by its unprimed counterpart."""
    mapping: dict[int, int] = {}
    for a in f.atoms() | set(f.vocabulary):
        kind = vocab.kind(a)
        if kind is AtomKind.FLUENT:
            raise MixedVocabulary(f"unprimed fluent {vocab.name(a)} still present")
        mapping[a] = vocab.unprimed(a) if kind is AtomKind.PRIMED else a
    cs = set()
    for c in f.clauses:
        k = make_clause(mapping[abs(l)] if l > 0 else -mapping[abs(l)] for l in c)
        if k is not None:
            cs.add(k)
    return CnfFormula(frozenset(cs), frozenset(mapping.values()))


def make_axiom_reducer(vocab: Vocabulary) -> Reducer:
    """Clause rewriting that is sound modulo the vocabulary axioms.

    Per (action, fluent) group, a disjunction over the three exclusive effect
    atoms is replaced by its single-literal equivalent (or dropped/turned into
    a tautology), and clauses containing both negated precondition atoms are
    tautologies.
    """
    cache: dict[int, Optional[tuple]] = {}

    def info(a: int):
        r = cache.get(a, 0)
        if r == 0:
            r = vocab.axiom_slot(a)
            cache[a] = r
        return r

    def reduce(c: Clause) -> Optional[Clause]:
        if len(c) < 2:
            return c
        groups: dict = {}
        for l in c:
            i = info(abs(l))
            if i is not None:
                groups.setdefault(i[0], []).append((l, i[1]))
        if not groups or all(len(g) < 2 for g in groups.values()):
            return c
        drop: set[int] = set()
        add: list[int] = []
        for key, members in groups.items():
            if len(members) < 2:
                continue
            needs_neg = {s for l, s in members if s >= 3 and l < 0}
            if len(needs_neg) == 2:
                return None
            eff = [(l, s) for l, s in members if s < 3]
            if len(eff) < 2:
                continue
            sat: set[int] = set()
            for l, s in eff:
                sat |= {s} if l > 0 else {0, 1, 2} - {s}
            if len(sat) == 3:
                return None
            drop.update(l for l, _ in eff)
            if len(sat) == 2:
                (missing,) = {0, 1, 2} - sat
                add.append(-vocab.group_atom(key, missing))
            elif len(sat) == 1:
                (only,) = sat
                add.append(vocab.group_atom(key, only))
        if not drop:
            return c
        return make_clause([l for l in c if l not in drop] + add)

    return reduce
