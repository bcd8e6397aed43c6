"""Typed-STRIPS domain and problem structures."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

from ..errors import PddlTypeError

ROOT_TYPE = "object"


@dataclass(frozen=True)
class Literal:
    pred: str
    args: tuple = ()
    positive: bool = True

    def negated(self) -> "Literal":
        return Literal(self.pred, self.args, not self.positive)

    def substitute(self, binding: dict) -> "Literal":
        return Literal(self.pred, tuple(binding.get(x, x) for x in self.args), self.positive)


@dataclass(frozen=True)
class Predicate:
    name: str
    params: tuple = ()  # ((var, type), ...)

    @property
    def arity(self) -> int:
        return len(self.params)


@dataclass(frozen=True)
class ActionSchema:
    name: str
    params: tuple = ()  # ((var, type), ...)
    pre: tuple = ()  # Literals
    eff: tuple = ()  # Literals

    @property
    def variables(self) -> tuple:
        return tuple(v for v, _ in self.params)

    def validate(self) -> None:
        vs = set(self.variables)
        if len(vs) != len(self.params):
            raise PddlTypeError(f"action {self.name}: duplicate parameter")
        for l in self.pre + self.eff:
            for x in l.args:
                if x not in vs:
                    raise PddlTypeError(f"action {self.name}: variable {x} is not a parameter")
        pos = {(l.pred, l.args) for l in self.eff if l.positive}
        if any((l.pred, l.args) in pos for l in self.eff if not l.positive):
            raise PddlTypeError(f"action {self.name}: complementary effect literals")


@dataclass(frozen=True)
class DomainSchema:
    name: str
    requirements: tuple = ()
    types: tuple = ()  # ((type, parent), ...) in declaration order
    predicates: tuple = ()
    actions: tuple = ()

    @cached_property
    def parent(self) -> dict:
        return dict(self.types)

    def known_type(self, t: str) -> bool:
        return t == ROOT_TYPE or t in self.parent

    def ancestors(self, t: str) -> list:
        out = [t]
        while t != ROOT_TYPE:
            t = self.parent.get(t, ROOT_TYPE)
            if t in out:
                raise PddlTypeError(f"cyclic type hierarchy at {t}")
            out.append(t)
        return out

    def is_subtype(self, t: str, of: str) -> bool:
        return of in self.ancestors(t)

    def predicate(self, name: str) -> Predicate:
        for p in self.predicates:
            if p.name == name:
                return p
        raise PddlTypeError(f"unknown predicate {name}")

    def action(self, name: str) -> ActionSchema:
        for a in self.actions:
            if a.name == name:
                return a
        raise PddlTypeError(f"unknown action {name}")

    def validate(self) -> None:
        for t, p in self.types:
            if not self.known_type(p):
                raise PddlTypeError(f"unknown type {p}")
            self.ancestors(t)
        names = [p.name for p in self.predicates]
        if len(set(names)) != len(names):
            raise PddlTypeError("duplicate predicate name")
        names = [a.name for a in self.actions]
        if len(set(names)) != len(names):
            raise PddlTypeError("duplicate action name")
        for p in self.predicates:
            for _, t in p.params:
                if not self.known_type(t):
                    raise PddlTypeError(f"predicate {p.name}: unknown type {t}")
        for a in self.actions:
            a.validate()
            types = dict(a.params)
            for _, t in a.params:
                if not self.known_type(t):
                    raise PddlTypeError(f"action {a.name}: unknown type {t}")
            for l in a.pre + a.eff:
                pred = self.predicate(l.pred)
                if pred.arity != len(l.args):
                    raise PddlTypeError(f"action {a.name}: wrong arity for {l.pred}")


@dataclass(frozen=True)
class ProblemInstance:
    name: str
    domain: str
    objects: tuple = ()  # ((name, type), ...)
    init: tuple = ()  # positive ground Literals
    goal: tuple = ()

    def validate(self, schema: DomainSchema) -> None:
        types = {}
        for o, t in self.objects:
            if not schema.known_type(t):
                raise PddlTypeError(f"object {o}: unknown type {t}")
            if o in types:
                raise PddlTypeError(f"object {o} declared twice")
            types[o] = t
        for l in self.init:
            pred = schema.predicate(l.pred)
            if pred.arity != len(l.args):
                raise PddlTypeError(f"init atom {l.pred}: wrong arity")
            for o, (_, t) in zip(l.args, pred.params):
                if o not in types:
                    raise PddlTypeError(f"init atom {l.pred}: unknown object {o}")
                if not schema.is_subtype(types[o], t):
                    raise PddlTypeError(f"init atom {l.pred}: {o} is not a {t}")
