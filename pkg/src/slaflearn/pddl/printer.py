"""Canonical upper-case PDDL output."""

from __future__ import annotations

from itertools import groupby

from .ast import ROOT_TYPE, ActionSchema, DomainSchema, Literal, ProblemInstance


def _u(x: str) -> str:
    return x.upper()


def literal_text(l: Literal) -> str:
    atom = "(" + " ".join([_u(l.pred), *map(_u, l.args)]) + ")"
    return atom if l.positive else f"(NOT {atom})"


def typed_text(items) -> str:
    groups = [(t, [_u(n) for n, _ in g]) for t, g in groupby(items, key=lambda x: x[1])]
    parts = []
    for i, (t, names) in enumerate(groups):
        # a trailing untyped group means object; elsewhere the type must be spelled out
        last = i == len(groups) - 1
        parts.append(" ".join(names) if t == ROOT_TYPE and last else " ".join(names) + " - " + _u(t))
    return " ".join(parts)


def conjunction_text(lits) -> str:
    if len(lits) == 1:
        return literal_text(lits[0])
    return "(AND " + " ".join(literal_text(l) for l in lits) + ")"


def action_text(a: ActionSchema) -> str:
    lines = [f"  (:ACTION {_u(a.name)}", f"   :PARAMETERS ({typed_text(a.params)})"]
    if a.pre:
        lines.append(f"   :PRECONDITION {conjunction_text(a.pre)}")
    if a.eff:
        lines.append(f"   :EFFECT {conjunction_text(a.eff)}")
    lines[-1] += ")"
    return "\n".join(lines)


def print_domain(d: DomainSchema) -> str:
    out = [f"(DEFINE (DOMAIN {_u(d.name)})"]
    if d.requirements:
        out.append("  (:REQUIREMENTS " + " ".join(map(_u, d.requirements)) + ")")
    if d.types:
        out.append(f"  (:TYPES {typed_text(d.types)})")
    if d.predicates:
        out.append("  (:PREDICATES")
        for p in d.predicates:
            body = " ".join([_u(p.name), typed_text(p.params)]).strip()
            out.append(f"    ({body})")
        out[-1] += ")"
    for a in d.actions:
        out.append(action_text(a))
    out[-1] += ")"
    return "\n".join(out) + "\n"


def print_problem(p: ProblemInstance) -> str:
    out = [f"(DEFINE (PROBLEM {_u(p.name)})"]
    if p.domain:
        out.append(f"  (:DOMAIN {_u(p.domain)})")
    out.append(f"  (:OBJECTS {typed_text(p.objects)})")
    out.append("  (:INIT")
    out.extend("    " + literal_text(l) for l in p.init)
    out[-1] += ")"
    if p.goal:
        out.append(f"  (:GOAL {conjunction_text(p.goal)})")
    out[-1] += ")"
    return "\n".join(out) + "\n"
