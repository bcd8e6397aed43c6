"""Effect axioms tau_eff(a) and the vocabulary axioms of the revised language."""

from __future__ import annotations

from ..logic.cnf import CnfFormula
from ..logic.nnf import Node, conj, conj_all, disj, iff, implies, lit
from .domain import GroundDomain


def pre_eff(domain: GroundDomain, a: int, f: int) -> Node:
    """Pre_{a,f} and Eff_{a,f} for one fluent."""
    v = domain.vocab
    x, xp = v.fluent(f), v.primed(v.fluent(f))
    keep = lit(v.keeps(a, f))
    parts = []
    for sign in (1, -1):
        positive = sign > 0
        need = lit(v.needs(a, f, positive))
        parts.append(implies(need, lit(sign * x)))
    for sign in (1, -1):
        positive = sign > 0
        becomes = disj(lit(v.causes(a, f, positive)), conj(keep, lit(sign * x)))
        parts.append(iff(becomes, lit(sign * xp)))
    return conj_all(parts)


def tau_eff(a: int | str, domain: GroundDomain) -> Node:
    if isinstance(a, str):
        a = domain.action_index[a]
    return conj_all(pre_eff(domain, a, f) for f in range(domain.n_fluents))


def vocab_axiom_clauses(domain: GroundDomain, a: int, f: int, needs: bool = True) -> list[tuple]:
    v = domain.vocab
    ct, cf, k = v.causes(a, f, True), v.causes(a, f, False), v.keeps(a, f)
    out = [(ct, cf, k), (-ct, -cf), (-cf, -k), (-ct, -k)]
    if needs:
        out.append((-v.needs(a, f, True), -v.needs(a, f, False)))
    return out


def vocab_axioms(domain: GroundDomain, needs: bool = True) -> CnfFormula:
    """Exactly one effect atom per (action, fluent); never both precondition atoms."""
    cs = []
    for a in range(domain.n_actions):
        for f in range(domain.n_fluents):
            cs.extend(vocab_axiom_clauses(domain, a, f, needs))
    return CnfFormula.of(cs)


def action_atoms(domain: GroundDomain, actions=None, needs: bool = True) -> list[int]:
    v = domain.vocab
    acts = range(domain.n_actions) if actions is None else actions
    out = []
    for a in acts:
        for f in range(domain.n_fluents):
            out.extend(v.prop(a, s, f) for s in range(5 if needs else 3))
    return out
