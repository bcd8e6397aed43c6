"""Brute-force model enumeration with numpy, used as a test oracle."""

from __future__ import annotations

from typing import Callable, Sequence, Union

import numpy as np

from ..errors import VocabularyTooLarge
from .cnf import CnfFormula
from .nnf import OP_AND, OP_FALSE, OP_LIT, OP_OR, OP_TRUE, Node, postorder

DEFAULT_VOCAB_CAP = 24
Columns = Callable[[int], np.ndarray]


def eval_nnf(f: Node, column: Columns, n_rows: int) -> np.ndarray:
    memo: dict[int, np.ndarray] = {}
    for n in postorder([f]):
        if n.op == OP_TRUE:
            r = np.ones(n_rows, dtype=bool)
        elif n.op == OP_FALSE:
            r = np.zeros(n_rows, dtype=bool)
        elif n.op == OP_LIT:
            c = column(abs(n.lit))
            r = c if n.lit > 0 else ~c
        elif n.op == OP_AND:
            r = memo[id(n.kids[0])].copy()
            for k in n.kids[1:]:
                r &= memo[id(k)]
        else:
            r = memo[id(n.kids[0])].copy()
            for k in n.kids[1:]:
                r |= memo[id(k)]
        memo[id(n)] = r
    return memo[id(f)]


def eval_cnf(f: CnfFormula, column: Columns, n_rows: int) -> np.ndarray:
    out = np.ones(n_rows, dtype=bool)
    for c in f.clauses:
        cl = np.zeros(n_rows, dtype=bool)
        for l in c:
            v = column(abs(l))
            cl |= v if l > 0 else ~v
        out &= cl
    return out


def evaluate_rows(f: Union[Node, CnfFormula], column: Columns, n_rows: int) -> np.ndarray:
    if isinstance(f, CnfFormula):
        return eval_cnf(f, column, n_rows)
    return eval_nnf(f, column, n_rows)


def truth_table_columns(vocab: Sequence[int]) -> tuple[Columns, int]:
    """Column accessor for all 2^n assignments; bit i of the row index is vocab[i]."""
    n = len(vocab)
    rows = np.arange(1 << n, dtype=np.int64)
    pos = {a: i for i, a in enumerate(vocab)}

    def column(a: int) -> np.ndarray:
        if a not in pos:
            raise KeyError(f"atom {a} not in enumeration vocabulary")
        return ((rows >> pos[a]) & 1).astype(bool)

    return column, 1 << n


def model_mask(f: Union[Node, CnfFormula], vocab: Sequence[int], cap: int = DEFAULT_VOCAB_CAP) -> np.ndarray:
    if len(vocab) > cap:
        raise VocabularyTooLarge(f"{len(vocab)} atoms exceeds cap {cap}")
    column, n = truth_table_columns(list(vocab))
    return evaluate_rows(f, column, n)


def enumerate_models(f: Union[Node, CnfFormula], vocab: Sequence[int], cap: int = DEFAULT_VOCAB_CAP) -> set:
    """All total assignments over vocab satisfying f, as frozensets of signed literals."""
    vocab = list(vocab)
    mask = model_mask(f, vocab, cap)
    out = set()
    for r in np.flatnonzero(mask):
        out.add(frozenset(a if (r >> i) & 1 else -a for i, a in enumerate(vocab)))
    return out


def project_mask(mask: np.ndarray, n_vars: int, keep: Sequence[int]) -> np.ndarray:
    """Existential projection of a truth-table mask onto the variable positions in keep."""
    idx = np.flatnonzero(mask)
    out = np.zeros(1 << len(keep), dtype=bool)
    proj = np.zeros_like(idx)
    for j, i in enumerate(keep):
        proj |= ((idx >> i) & 1) << j
    out[proj] = True
    return out
