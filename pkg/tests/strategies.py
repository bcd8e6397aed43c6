"""Hypothesis strategies and small helpers shared by the test modules."""

from hypothesis import strategies as st

from slaflearn.logic.cnf import CnfFormula
from slaflearn.logic.nnf import conj_all, disj_all, lit


def literals(n_atoms: int):
    return st.integers(1, n_atoms).flatmap(lambda a: st.sampled_from([a, -a]))


def clauses(n_atoms: int, max_len: int = 4):
    return st.lists(literals(n_atoms), min_size=0, max_size=max_len)


def cnfs(n_atoms: int, max_clauses: int = 12, max_len: int = 4):
    return st.lists(clauses(n_atoms, max_len), max_size=max_clauses).map(
        lambda cs: CnfFormula.of(cs, range(1, n_atoms + 1))
    )


def nnfs(n_atoms: int, max_leaves: int = 12):
    leaf = literals(n_atoms).map(lit)

    def extend(children):
        return st.one_of(
            st.lists(children, min_size=2, max_size=3).map(conj_all),
            st.lists(children, min_size=2, max_size=3).map(disj_all),
        )

    return st.recursive(leaf, extend, max_leaves=max_leaves)
