"""Propositional logic core: atoms, NNF DAGs, CNF, resolution, enumeration, DIMACS."""

from .atoms import ActionProp, Atom, AtomKind, AtomTable, EffectGivenTerm, Vocabulary
from .cnf import (
    CnfFormula,
    CnfRenderer,
    FALSE_CNF,
    TRUE_CNF,
    eliminate_vars,
    make_axiom_reducer,
    make_clause,
    rename_primed,
    resolve_out,
    subsume,
    to_cnf,
)
from .dimacs import read_dimacs, write_dimacs
from .models import enumerate_models, model_mask
from .nnf import FALSE, TRUE, Node, conj, disj, lit, negate

__all__ = [
    "ActionProp", "Atom", "AtomKind", "AtomTable", "EffectGivenTerm", "Vocabulary",
    "CnfFormula", "CnfRenderer", "FALSE_CNF", "TRUE_CNF", "eliminate_vars", "make_axiom_reducer",
    "make_clause", "rename_primed", "resolve_out", "subsume", "to_cnf",
    "read_dimacs", "write_dimacs", "enumerate_models", "model_mask",
    "FALSE", "TRUE", "Node", "conj", "disj", "lit", "negate",
]
