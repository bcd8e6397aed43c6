"""Hash-consed negation normal form DAGs.

Nodes are immutable and interned, so structurally equal formulas built in the
same way are the same object. Children keep their construction order (no
sorting), which keeps printing stable across a parse/print round trip.
Constant folding happens at construction; nested connectives are not
flattened, so appending one conjunct to a long chain costs O(1).  The
intern table holds nodes weakly: once a belief drops a sub-DAG it is freed.
"""

from __future__ import annotations

import threading
import weakref
from typing import Callable, Iterable, Iterator, Mapping

OP_TRUE, OP_FALSE, OP_LIT, OP_AND, OP_OR = range(5)


class Node:
    __slots__ = ("op", "kids", "lit", "uid", "_h", "__weakref__")

    def __init__(self, op: int, kids: tuple = (), lit: int = 0):
        self.op = op
        self.kids = kids
        self.lit = lit
        self.uid = -1
        self._h = hash((op, lit, tuple(k.uid for k in kids)))

    def key(self) -> tuple:
        return (self.op, self.lit, tuple(k.uid for k in self.kids))

    def __hash__(self) -> int:
        return self._h

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if not isinstance(other, Node) or self.op != other.op or self.lit != other.lit:
            return False
        a, b = self.kids, other.kids
        return len(a) == len(b) and all(x is y for x, y in zip(a, b))

    def __repr__(self) -> str:
        if self.op == OP_TRUE:
            return "TRUE"
        if self.op == OP_FALSE:
            return "FALSE"
        if self.op == OP_LIT:
            return f"Lit({self.lit})"
        name = "And" if self.op == OP_AND else "Or"
        return f"{name}#{self.uid}({len(self.kids)})"

    @property
    def is_const(self) -> bool:
        return self.op <= OP_FALSE


# key (op, lit, kid uids) -> node; uids are never reused, so keys stay unique
_table: "weakref.WeakValueDictionary[tuple, Node]" = weakref.WeakValueDictionary()
_lock = threading.Lock()
_counter = [0]


def _intern(n: Node) -> Node:
    k = n.key()
    found = _table.get(k)
    if found is not None:
        return found
    with _lock:
        found = _table.get(k)
        if found is None:
            _counter[0] += 1
            n.uid = _counter[0]
            _table[k] = n
            found = n
    return found


TRUE = _intern(Node(OP_TRUE))
FALSE = _intern(Node(OP_FALSE))


def clear_intern_table() -> None:
    """Drop interned nodes (constants survive). Call between independent runs."""
    with _lock:
        _table.clear()
        _table[TRUE.key()] = TRUE
        _table[FALSE.key()] = FALSE


def intern_table_size() -> int:
    return len(_table)


def lit(l: int) -> Node:
    if l == 0:
        raise ValueError("literal 0 is not a literal")
    return _intern(Node(OP_LIT, (), l))


def _build(op: int, kids: Iterable[Node]) -> Node:
    absorbing, neutral = (FALSE, TRUE) if op == OP_AND else (TRUE, FALSE)
    out: list[Node] = []
    seen: set[int] = set()
    lits: set[int] = set()
    for k in kids:
        if k is absorbing:
            return absorbing
        if k is neutral or id(k) in seen:
            continue
        if k.op == OP_LIT:
            if -k.lit in lits:
                return absorbing
            lits.add(k.lit)
        seen.add(id(k))
        out.append(k)
    if not out:
        return neutral
    if len(out) == 1:
        return out[0]
    return _intern(Node(op, tuple(out)))


def conj(*kids: Node) -> Node:
    return _build(OP_AND, kids)


def disj(*kids: Node) -> Node:
    return _build(OP_OR, kids)


def conj_all(kids: Iterable[Node]) -> Node:
    return _build(OP_AND, kids)


def disj_all(kids: Iterable[Node]) -> Node:
    return _build(OP_OR, kids)


def implies(a: Node, b: Node) -> Node:
    return disj(negate(a), b)


def iff(a: Node, b: Node) -> Node:
    return conj(implies(a, b), implies(b, a))


def postorder(roots: Iterable[Node]) -> Iterator[Node]:
    """Each reachable node once, children before parents (iterative)."""
    done: set[int] = set()
    for root in roots:
        if id(root) in done:
            continue
        stack = [(root, False)]
        while stack:
            n, expanded = stack.pop()
            if id(n) in done:
                continue
            if expanded or not n.kids:
                done.add(id(n))
                yield n
                continue
            stack.append((n, True))
            for k in reversed(n.kids):
                if id(k) not in done:
                    stack.append((k, False))


def negate(f: Node) -> Node:
    memo: dict[int, Node] = {}
    for n in postorder([f]):
        if n.op == OP_TRUE:
            r = FALSE
        elif n.op == OP_FALSE:
            r = TRUE
        elif n.op == OP_LIT:
            r = lit(-n.lit)
        else:
            kids = [memo[id(k)] for k in n.kids]
            r = _build(OP_OR if n.op == OP_AND else OP_AND, kids)
        memo[id(n)] = r
    return memo[id(f)]


def atoms_of(f: Node) -> set[int]:
    return {abs(n.lit) for n in postorder([f]) if n.op == OP_LIT}


def dag_size(roots: Iterable[Node]) -> int:
    return sum(1 for _ in postorder(roots))


def evaluate(f: Node, value: Callable[[int], bool] | Mapping[int, bool]) -> bool:
    get = value.__getitem__ if isinstance(value, Mapping) else value
    memo: dict[int, bool] = {}
    for n in postorder([f]):
        if n.op == OP_TRUE:
            r = True
        elif n.op == OP_FALSE:
            r = False
        elif n.op == OP_LIT:
            v = bool(get(abs(n.lit)))
            r = v if n.lit > 0 else not v
        elif n.op == OP_AND:
            r = all(memo[id(k)] for k in n.kids)
        else:
            r = any(memo[id(k)] for k in n.kids)
        memo[id(n)] = r
    return memo[id(f)]


def substitute(f: Node, mapping: Callable[[int], Node | None]) -> Node:
    """Replace atoms by formulas; ``mapping`` returns None to keep an atom."""
    memo: dict[int, Node] = {}
    for n in postorder([f]):
        if n.op == OP_LIT:
            rep = mapping(abs(n.lit))
            if rep is None:
                r = n
            else:
                r = rep if n.lit > 0 else negate(rep)
        elif n.op in (OP_AND, OP_OR):
            r = _build(n.op, [memo[id(k)] for k in n.kids])
        else:
            r = n
        memo[id(n)] = r
    return memo[id(f)]


def from_clauses(clauses: Iterable[Iterable[int]]) -> Node:
    return conj_all(disj_all(lit(l) for l in c) for c in clauses)


def term(lits: Iterable[int]) -> Node:
    return conj_all(lit(l) for l in lits)
