"""Known-precondition SLAF with observed action failures.

A PreBelief is a conjunction of disjunct-lists of fluent-factored beliefs.
The first list carries the state knowledge; failure steps either append a
new list (one branch per violated precondition literal) or, in
``distribute`` mode, split every branch of the first list instead.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from ..action_model.domain import GroundDomain
from ..errors import InconsistentBelief, SlafError
from ..logic.nnf import FALSE, TRUE, Node, conj, conj_all, disj_all
from .fluent_factored import (
    FluentFactoredBelief,
    GroundProvider,
    PropositionProvider,
    as_effect_update,
    as_observe,
    check_term,
)

FAILURE_MODES = ("append", "distribute")


@dataclass(frozen=True)
class PreBelief:
    lists: tuple  # tuple of tuples of FluentFactoredBelief

    @staticmethod
    def unknown(n: int) -> "PreBelief":
        return PreBelief(((FluentFactoredBelief.unknown(n),),))

    def denotation(self, fluent_atom) -> Node:
        return conj_all(disj_all(phi.denotation(fluent_atom) for phi in lst) for lst in self.lists)

    def branches(self) -> Iterable[FluentFactoredBelief]:
        for lst in self.lists:
            yield from lst

    @property
    def n(self) -> int:
        return self.lists[0][0].n


def failure_branch(n: int, f: int, value: bool) -> FluentFactoredBelief:
    """F(l): l holds for fluent f; nothing else is known."""
    return as_observe(FluentFactoredBelief.unknown(n), [(f, value)])


def _map(b: PreBelief, fn) -> PreBelief:
    return PreBelief(tuple(tuple(fn(phi) for phi in lst) for lst in b.lists))


def merge_common(b: PreBelief) -> PreBelief:
    """Drop false branches, share identical state parts, fold singleton lists into the first list."""
    lists = []
    for lst in b.lists:
        kept = [phi for phi in lst if phi.inconsistent_fluent() is None]
        if not kept:
            n = lst[0].n
            bottom = FluentFactoredBelief((FALSE,) * n, (FALSE,) * n, (FALSE,) * n)
            return PreBelief(((bottom,),))
        if len(kept) > 1 and all(
            phi.expl_pos == kept[0].expl_pos and phi.expl_neg == kept[0].expl_neg for phi in kept
        ):
            # B & OR_j A_j, with the disjunction of contexts parked on fluent 0
            either = disj_all(conj_all(phi.ctx) for phi in kept)
            ctx = (either,) + (TRUE,) * (kept[0].n - 1)
            kept = [FluentFactoredBelief(kept[0].expl_pos, kept[0].expl_neg, ctx)]
        lists.append(kept)
    head, rest = lists[0], []
    for lst in lists[1:]:
        if len(lst) == 1:
            head = [phi.conjoin(lst[0]) for phi in head]
        else:
            rest.append(tuple(lst))
    head = [phi for phi in head if phi.inconsistent_fluent() is None] or head[:1]
    return PreBelief((tuple(head), *rest))


def pre_step(
    b: PreBelief,
    a: int,
    ok: bool,
    o: Sequence[tuple[int, bool]],
    pre_a: Sequence[tuple[int, bool]],
    provider: PropositionProvider,
    failure_mode: str = "append",
) -> PreBelief:
    if failure_mode not in FAILURE_MODES:
        raise ValueError(f"unknown failure mode {failure_mode!r}")
    o = check_term(o)
    pre_a = check_term(pre_a)
    n = b.n
    if not ok:
        if not pre_a:
            raise SlafError("an action without preconditions cannot fail")
        if failure_mode == "append":
            branch = tuple(failure_branch(n, f, not v) for f, v in pre_a)
            b = PreBelief(b.lists + (branch,))
        else:
            head = tuple(as_observe(phi, [(f, not v)]) for phi in b.lists[0] for f, v in pre_a)
            b = PreBelief((head,) + b.lists[1:])
        b = _map(b, lambda phi: as_observe(phi, o))
    else:
        b = _map(b, lambda phi: as_observe(as_effect_update(as_observe(phi, pre_a), a, provider), o))
    return merge_common(b)


class PreEngine:
    """Known preconditions, success flag observed every step."""

    def __init__(
        self,
        domain: GroundDomain,
        preconditions: dict,
        provider: Optional[PropositionProvider] = None,
        failure_mode: str = "append",
    ):
        self.domain = domain
        self.pre = {a: list(v) for a, v in preconditions.items()}
        self.provider = provider if provider is not None else GroundProvider(domain, needs=False)
        self.failure_mode = failure_mode
        self.steps = 0

    def initial(self, obs=()) -> PreBelief:
        return _map(PreBelief.unknown(self.domain.n_fluents), lambda phi: as_observe(phi, obs))

    def step(self, b: PreBelief, a: int, obs=(), ok: Optional[bool] = True) -> PreBelief:
        if ok is None:
            raise SlafError("the known-precondition engine needs the success flag on every step")
        self.steps += 1
        b = pre_step(b, a, ok, obs, self.pre.get(a, ()), self.provider, self.failure_mode)
        bad = b.lists[0][0].inconsistent_fluent()
        if bad is not None:
            raise InconsistentBelief(self.steps, self.domain.fluents[bad])
        return b
