"""Grounding schemas over an object universe and the ground/schema correspondence."""

from __future__ import annotations

from functools import cached_property
from itertools import product
from typing import Optional, Sequence

from ..action_model.domain import GroundDomain, State, StripsActionModel
from ..errors import OffParameterFluent, PddlTypeError
from ..logic.atoms import SLOT_CAUSES_NEG, SLOT_CAUSES_POS, SLOT_KEEPS, SLOT_NEEDS_NEG, SLOT_NEEDS_POS, SchemaProp
from ..logic.nnf import FALSE, TRUE, Node, conj_all, disj_all, lit
from .ast import DomainSchema, ProblemInstance

Pattern = tuple  # (predicate, (parameter names...))


def ground_name(head: str, args: Sequence[str]) -> str:
    return "(" + " ".join([head, *args]) + ")"


def objects_by_type(schema: DomainSchema, prob: ProblemInstance) -> dict[str, list[str]]:
    out: dict[str, list[str]] = {}
    for o, t in prob.objects:
        if not schema.known_type(t):
            raise PddlTypeError(f"object {o}: unknown type {t}")
        for anc in schema.ancestors(t):
            out.setdefault(anc, []).append(o)
    return out


class SchemaMap:
    """Ground fluents/actions with their schema keys and the pattern correspondence.

    A pattern is a predicate applied to action parameter names; instantiating
    it with a ground action's binding yields a ground fluent.
    """

    def __init__(self, schema: DomainSchema, domain: GroundDomain, objects: dict[str, list[str]]):
        self.schema = schema
        self.domain = domain
        self.objects = objects
        self.fluent_keys: tuple = domain.fluent_keys
        self.action_keys: tuple = domain.action_keys
        self.fluent_of = {k: i for i, k in enumerate(self.fluent_keys)}
        self._affected: dict[int, tuple] = {}

    @cached_property
    def actions_by_schema(self) -> dict[str, list[int]]:
        out: dict[str, list[int]] = {a.name: [] for a in self.schema.actions}
        for i, (s, _) in enumerate(self.action_keys):
            out[s].append(i)
        return out

    def binding(self, a: int) -> dict[str, str]:
        s, args = self.action_keys[a]
        return dict(zip(self.schema.action(s).variables, args))

    def instantiate(self, a: int, pattern: Pattern) -> int:
        """Ground fluent index of pattern under action a's binding."""
        b = self.binding(a)
        pred, vs = pattern
        return self.fluent_of[(pred, tuple(b[v] for v in vs))]

    def patterns(self, a: int, f: int) -> tuple:
        """All patterns of a's schema that instantiate to fluent f under a's binding."""
        s, args = self.action_keys[a]
        pred, fargs = self.fluent_keys[f]
        variables = self.schema.action(s).variables
        choices = []
        for o in fargs:
            vs = [v for v, x in zip(variables, args) if x == o]
            if not vs:
                raise OffParameterFluent(f"{self.domain.fluents[f]} is not over the arguments of {self.domain.actions[a]}")
            choices.append(vs)
        return tuple((pred, tuple(c)) for c in product(*choices))

    def in_parameter(self, a: int, f: int) -> bool:
        args = set(self.action_keys[a][1])
        return all(o in args for o in self.fluent_keys[f][1])

    def affected(self, a: int) -> tuple:
        """Fluents whose arguments are all among a's arguments."""
        r = self._affected.get(a)
        if r is None:
            s, args = self.action_keys[a]
            uniq = list(dict.fromkeys(args))
            out = []
            for p in self.schema.predicates:
                for combo in product(uniq, repeat=p.arity):
                    i = self.fluent_of.get((p.name, combo))
                    if i is not None:
                        out.append(i)
            r = tuple(sorted(out))
            self._affected[a] = r
        return r

    def census(self, schema_name: str) -> list[Pattern]:
        """Type-realizable patterns for one action schema, in canonical order."""
        a = self.schema.action(schema_name)
        ptype = dict(a.params)
        if any(not self.objects.get(t) for t in ptype.values()):
            return []
        out = []
        for p in self.schema.predicates:
            for vs in product(a.variables, repeat=p.arity):
                ok = True
                for v in set(vs):
                    pool = set(self.objects.get(ptype[v], ()))
                    for (_, t), w in zip(p.params, vs):
                        if w == v:
                            pool &= set(self.objects.get(t, ()))
                    if not pool:
                        ok = False
                        break
                if ok:
                    out.append((p.name, vs))
        return out

    def ground_props(self, schema_name: str, pattern: Pattern, slot: int) -> list[int]:
        """Inverse map: ground action-proposition ids whose patterns include this one."""
        v = self.domain.vocab
        out = []
        for a in self.actions_by_schema[schema_name]:
            try:
                f = self.instantiate(a, pattern)
            except KeyError:
                continue
            out.append(v.prop(a, slot, f))
        return out


def schema_atoms_for(smap: SchemaMap, ground_prop: int) -> tuple[SchemaProp, ...]:
    """Schema propositions whose instantiation is the given ground action proposition."""
    a, f, slot = smap.domain.vocab.decode_prop(ground_prop)
    s = smap.action_keys[a][0]
    return tuple(SchemaProp(s, p, slot) for p in smap.patterns(a, f))


def ground(schema: DomainSchema, prob: ProblemInstance) -> tuple[GroundDomain, SchemaMap, State]:
    prob.validate(schema)
    objs = objects_by_type(schema, prob)
    fluents, fkeys = [], []
    for p in schema.predicates:
        for combo in product(*(objs.get(t, []) for _, t in p.params)):
            fluents.append(ground_name(p.name, combo))
            fkeys.append((p.name, combo))
    actions, akeys = [], []
    for a in schema.actions:
        for combo in product(*(objs.get(t, []) for _, t in a.params)):
            actions.append(ground_name(a.name, combo))
            akeys.append((a.name, combo))
    domain = GroundDomain(tuple(fluents), tuple(actions), schema.name, tuple(fkeys), tuple(akeys))
    smap = SchemaMap(schema, domain, objs)
    s = 0
    for l in prob.init:
        i = smap.fluent_of.get((l.pred, l.args))
        if i is None:
            raise PddlTypeError(f"init atom {ground_name(l.pred, l.args)} is not a ground fluent")
        s |= 1 << i
    return domain, smap, s


def strips_model(smap: SchemaMap) -> StripsActionModel:
    """Hidden model of the grounded domain; a delete and an add on one fluent leave it true."""
    add, dele, pp, pn = [], [], [], []
    schemas = {a.name: a for a in smap.schema.actions}
    for s, args in smap.action_keys:
        sch = schemas[s]
        b = dict(zip(sch.variables, args))
        masks = [0, 0, 0, 0]
        for which, lits in ((0, sch.eff), (2, sch.pre)):
            for l in lits:
                bit = 1 << smap.fluent_of[(l.pred, tuple(b[x] for x in l.args))]
                masks[which + (0 if l.positive else 1)] |= bit
        masks[1] &= ~masks[0]
        add.append(masks[0])
        dele.append(masks[1])
        pp.append(masks[2])
        pn.append(masks[3])
    return StripsActionModel(tuple(add), tuple(dele), tuple(pp), tuple(pn))


def golden_rows(smap: SchemaMap) -> dict[str, dict[Pattern, str]]:
    """Effect tag per census pattern from the generating schemas: '+', '-' or 'keeps'."""
    out = {}
    for a in smap.schema.actions:
        eff = {(l.pred, l.args): ("+" if l.positive else "-") for l in a.eff}
        out[a.name] = {p: eff.get(p, "keeps") for p in smap.census(a.name)}
    return out


class SchemaProvider:
    """Effect/precondition formulas for ground (action, fluent) pairs over schema atoms.

    A ground proposition is replaced by the disjunction of the schema
    propositions that instantiate to it. Fluents outside the action's
    arguments are inert under ``assume-keeps`` and keep ground atoms under
    ``keep-ground``.
    """

    def __init__(self, smap: SchemaMap, needs: bool = True, policy: str = "assume-keeps"):
        if policy not in ("assume-keeps", "keep-ground"):
            raise ValueError(f"unknown off-parameter policy {policy}")
        self.smap = smap
        self.vocab = smap.domain.vocab
        self.needs = needs
        self.policy = policy
        self._cache: dict[tuple[int, int], tuple] = {}
        self._atoms: dict[tuple, int] = {}

    def atom(self, s: str, pattern: Pattern, slot: int) -> int:
        key = (s, pattern, slot)
        i = self._atoms.get(key)
        if i is None:
            i = self.vocab.add_extra(SchemaProp(s, pattern, slot))
            self._atoms[key] = i
        return i

    def props(self, a: int, f: int) -> tuple:
        key = (a, f)
        r = self._cache.get(key)
        if r is not None:
            return r
        if not self.smap.in_parameter(a, f):
            if self.policy == "keep-ground":
                base = self.vocab.prop(a, 0, f)
                r = (lit(base), lit(base + 1), lit(base + 2))
                r += (lit(base + 3), lit(base + 4)) if self.needs else (FALSE, FALSE)
            else:
                r = (FALSE, FALSE, TRUE, FALSE, FALSE)
        else:
            s = self.smap.action_keys[a][0]
            pats = self.smap.patterns(a, f)
            slots = (SLOT_CAUSES_POS, SLOT_CAUSES_NEG, SLOT_KEEPS, SLOT_NEEDS_POS, SLOT_NEEDS_NEG)
            r = tuple(
                disj_all(lit(self.atom(s, p, slot)) for p in pats) if (slot < 3 or self.needs) else FALSE
                for slot in slots
            )
        self._cache[key] = r
        return r

    def affected(self, a: int) -> Optional[Sequence[int]]:
        if self.policy == "keep-ground":
            return None
        return self.smap.affected(a)

    def schema_atoms(self) -> list[int]:
        return sorted(self._atoms.values())
