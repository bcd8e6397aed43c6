"""Fluent-factored beliefs and the always-successful STRIPS update."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Protocol, Sequence

from ..action_model.domain import GroundDomain
from ..errors import InconsistentBelief, InconsistentObservation, SlafError
from ..logic.cnf import DEFAULT_CLAUSE_LIMIT, CnfFormula, CnfRenderer, make_axiom_reducer
from ..logic.nnf import FALSE, TRUE, Node, atoms_of, conj, conj_all, disj, lit, negate

Observation = Sequence[tuple[int, bool]]  # (fluent index, value)


class PropositionProvider(Protocol):
    """Supplies the formulas standing for a's effect and precondition atoms on fluent f."""

    def props(self, a: int, f: int) -> tuple[Node, Node, Node, Node, Node]:
        """(causes f, causes not f, keeps f, needs f, needs not f)"""

    def affected(self, a: int) -> Optional[Sequence[int]]:
        """Fluents whose update is not the identity; None means all."""


class GroundProvider:
    """One atom per (action, fluent, kind) from the domain's revised vocabulary."""

    def __init__(self, domain: GroundDomain, needs: bool = True):
        self.domain = domain
        self.vocab = domain.vocab
        self.needs = needs
        self._cache: dict[tuple[int, int], tuple] = {}

    def props(self, a: int, f: int) -> tuple:
        key = (a, f)
        r = self._cache.get(key)
        if r is None:
            v = self.vocab
            base = v.prop(a, 0, f)
            r = (lit(base), lit(base + 1), lit(base + 2))
            r += (lit(base + 3), lit(base + 4)) if self.needs else (FALSE, FALSE)
            self._cache[key] = r
        return r

    def affected(self, a: int) -> Optional[Sequence[int]]:
        return None


@dataclass(frozen=True)
class FluentFactoredBelief:
    """Per fluent: explanation of f, explanation of not f, and action-only context."""

    expl_pos: tuple
    expl_neg: tuple
    ctx: tuple

    @staticmethod
    def unknown(n: int) -> "FluentFactoredBelief":
        return FluentFactoredBelief((TRUE,) * n, (TRUE,) * n, (TRUE,) * n)

    @property
    def n(self) -> int:
        return len(self.ctx)

    def conjoin(self, other: "FluentFactoredBelief") -> "FluentFactoredBelief":
        return FluentFactoredBelief(
            tuple(conj(x, y) for x, y in zip(self.expl_pos, other.expl_pos)),
            tuple(conj(x, y) for x, y in zip(self.expl_neg, other.expl_neg)),
            tuple(conj(x, y) for x, y in zip(self.ctx, other.ctx)),
        )

    def inconsistent_fluent(self) -> Optional[int]:
        """First fluent whose component is structurally false, if any."""
        for f in range(self.n):
            if self.ctx[f] is FALSE or (self.expl_pos[f] is FALSE and self.expl_neg[f] is FALSE):
                return f
        return None

    def fluent_formula(self, f: int, atom: int) -> Node:
        return conj(disj(lit(-atom), self.expl_pos[f]), disj(lit(atom), self.expl_neg[f]), self.ctx[f])

    def denotation(self, fluent_atom) -> Node:
        """The belief as one NNF; fluent_atom maps a fluent index to its atom id."""
        return conj_all(self.fluent_formula(f, fluent_atom(f)) for f in range(self.n))

    def known(self, f: int) -> Optional[bool]:
        if self.expl_neg[f] is FALSE:
            return True
        if self.expl_pos[f] is FALSE:
            return False
        return None

    def roots(self) -> list[Node]:
        return list(self.expl_pos) + list(self.expl_neg) + list(self.ctx)

    def action_atoms(self) -> set[int]:
        out: set[int] = set()
        for r in self.roots():
            out |= atoms_of(r)
        return out


def as_effect_update(b: FluentFactoredBelief, a: int, provider: PropositionProvider) -> FluentFactoredBelief:
    """Progress with a successful action a.

    new ctx_f  = ctx_f & (~needs f | expl_f) & (~needs ~f | expl_~f)
    new expl_l = causes l | (keeps f & ~needs ~l & expl_l)
    """
    pos, neg, ctx = list(b.expl_pos), list(b.expl_neg), list(b.ctx)
    fl = provider.affected(a)
    for f in range(b.n) if fl is None else fl:
        ct, cf, k, np_, nn = provider.props(a, f)
        ep, en = pos[f], neg[f]
        not_np = negate(np_) if np_ is not FALSE else TRUE
        not_nn = negate(nn) if nn is not FALSE else TRUE
        if np_ is not FALSE or nn is not FALSE:
            ctx[f] = conj(ctx[f], disj(not_np, ep), disj(not_nn, en))
        pos[f] = disj(ct, conj(k, not_nn, ep))
        neg[f] = disj(cf, conj(k, not_np, en))
    return FluentFactoredBelief(tuple(pos), tuple(neg), tuple(ctx))


def check_term(obs: Iterable[tuple[int, bool]]) -> list[tuple[int, bool]]:
    seen: dict[int, bool] = {}
    for f, v in obs:
        if seen.get(f, v) != v:
            raise InconsistentObservation(f"fluent {f} observed both true and false")
        seen[f] = v
    return list(seen.items())


def as_observe(b: FluentFactoredBelief, obs: Iterable[tuple[int, bool]]) -> FluentFactoredBelief:
    """Unit-resolve the belief with observed fluent literals."""
    obs = check_term(obs)
    if not obs:
        return b
    pos, neg, ctx = list(b.expl_pos), list(b.expl_neg), list(b.ctx)
    for f, v in obs:
        if v:
            ctx[f] = conj(ctx[f], pos[f])
            pos[f], neg[f] = TRUE, FALSE
        else:
            ctx[f] = conj(ctx[f], neg[f])
            pos[f], neg[f] = FALSE, TRUE
    return FluentFactoredBelief(tuple(pos), tuple(neg), tuple(ctx))


class AsEngine:
    """Runs the always-successful update over a trace and tracks diagnostics."""

    def __init__(self, domain: GroundDomain, provider: Optional[PropositionProvider] = None):
        self.domain = domain
        self.provider = provider if provider is not None else GroundProvider(domain)
        self.steps = 0

    def initial(self, obs: Observation = ()) -> FluentFactoredBelief:
        return as_observe(FluentFactoredBelief.unknown(self.domain.n_fluents), obs)

    def step(self, b: FluentFactoredBelief, a: int, obs: Observation = (), ok: bool = True) -> FluentFactoredBelief:
        if not ok:
            raise SlafError("the always-successful engine cannot process a failed action")
        self.steps += 1
        b = as_observe(as_effect_update(b, a, self.provider), obs)
        bad = b.inconsistent_fluent()
        if bad is not None:
            raise InconsistentBelief(self.steps, self.domain.fluents[bad])
        return b


class BeliefRenderer:
    """Incremental CNF rendering of fluent-factored beliefs with the axiom reducer."""

    def __init__(self, domain: GroundDomain, reduce: bool = True, limit: int = DEFAULT_CLAUSE_LIMIT):
        self.domain = domain
        self.renderer = CnfRenderer(make_axiom_reducer(domain.vocab) if reduce else None, limit)

    def fluent_atom(self, f: int) -> int:
        return self.domain.vocab.fluent(f)

    def roots(self, b: FluentFactoredBelief) -> list[Node]:
        out = []
        for f in range(b.n):
            x = self.fluent_atom(f)
            out += [disj(lit(-x), b.expl_pos[f]), disj(lit(x), b.expl_neg[f]), b.ctx[f]]
        return out

    def render(self, b: FluentFactoredBelief) -> CnfFormula:
        return self.renderer.render(self.roots(b))
