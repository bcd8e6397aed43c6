"""SLAF0: conjoin the effect axioms, resolve away the old state, rename, filter."""

from __future__ import annotations

from typing import Iterable, Optional, Sequence

from ..action_model.axioms import tau_eff
from ..action_model.domain import GroundDomain
from ..action_model.tiny import TinyVocab, teff_tiny
from ..logic.atoms import Vocabulary
from ..logic.cnf import DEFAULT_CLAUSE_LIMIT, CnfFormula, eliminate_vars, rename_primed, to_cnf
from ..logic.nnf import Node, conj, disj_all, lit

Slaf0Belief = CnfFormula


def observation_cnf(obs: Iterable[int]) -> CnfFormula:
    return CnfFormula.of([[l] for l in obs])


def slaf0_update(
    b: CnfFormula,
    tau: Node,
    fluents: Sequence[int],
    vocab: Vocabulary,
    obs: Iterable[int] = (),
    limit: int = DEFAULT_CLAUSE_LIMIT,
) -> CnfFormula:
    """Cn over the non-state vocabulary of b and tau, primed renamed to unprimed, then o."""
    f = b.conjoin(to_cnf(tau, limit))
    f = eliminate_vars(f, fluents, limit)
    f = rename_primed(f, vocab)
    return f.conjoin(observation_cnf(obs)).simplify()


def failure_formula(domain: GroundDomain, a: int) -> Node:
    """Some precondition literal of a is false in the current state."""
    v = domain.vocab
    parts = []
    for f in range(domain.n_fluents):
        x = v.fluent(f)
        parts.append(conj(lit(v.needs(a, f, True)), lit(-x)))
        parts.append(conj(lit(v.needs(a, f, False)), lit(x)))
    return disj_all(parts)


def slaf0_step(
    b: CnfFormula,
    a: int | str,
    o: Iterable[int],
    domain: GroundDomain,
    ok: bool = True,
    tiny: Optional[TinyVocab] = None,
    limit: int = DEFAULT_CLAUSE_LIMIT,
) -> CnfFormula:
    """One SLAF0 step in the revised language, or in the tiny language when ``tiny`` is given.

    Observations are signed fluent ids (unprimed).
    """
    if isinstance(a, str):
        a = domain.action_index[a]
    if not ok:
        if tiny is not None:
            raise ValueError("failure steps are only supported in the revised language")
        return b.conjoin(to_cnf(failure_formula(domain, a), limit)).conjoin(observation_cnf(o)).simplify()
    if tiny is not None:
        return slaf0_update(b, teff_tiny(a, domain, tiny), tiny.fluent_atoms(), tiny, o, limit)
    fluents = [domain.vocab.fluent(f) for f in range(domain.n_fluents)]
    return slaf0_update(b, tau_eff(a, domain), fluents, domain.vocab, o, limit)
