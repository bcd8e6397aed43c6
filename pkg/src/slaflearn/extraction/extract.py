"""From a learned belief to one consistent action model, plus entailment queries."""

from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Hashable, Iterable, Optional, Sequence, TextIO

from ..action_model.domain import GroundDomain, GroundVocabulary
from ..engines.fluent_factored import BeliefRenderer, FluentFactoredBelief
from ..engines.pre import PreBelief
from ..logic.atoms import (
    SLOT_CAUSES_NEG,
    SLOT_CAUSES_POS,
    SLOT_KEEPS,
    SLOT_NEEDS_NEG,
    SLOT_NEEDS_POS,
    SchemaProp,
)
from ..logic.cnf import DEFAULT_CLAUSE_LIMIT, CnfFormula, CnfRenderer, make_axiom_reducer, make_clause
from ..logic.nnf import Node
from ..pddl.ast import ActionSchema, DomainSchema, Literal
from ..pddl.grounding import SchemaMap
from ..pddl.printer import print_domain
from .solver import DpllSolver, SolverResult

OFF_PARAM_POLICIES = ("assume-keeps", "keep-ground")
EFFECT_SLOTS = {SLOT_CAUSES_POS: "+", SLOT_CAUSES_NEG: "-", SLOT_KEEPS: "keeps"}


# ---------------------------------------------------------------- row keys

def ground_keys(domain: GroundDomain) -> list[int]:
    return list(range(domain.n_actions * domain.n_fluents))


def schema_keys(smap: SchemaMap) -> list[tuple]:
    return [(a.name, p) for a in smap.schema.actions for p in smap.census(a.name)]


def row_namer(domain: GroundDomain) -> Callable[[Hashable], tuple[str, str]]:
    """(action text, fluent text) for a row key."""
    n = domain.n_fluents

    def name(key):
        if isinstance(key, int):
            a, f = divmod(key, n)
            return domain.actions[a], domain.fluents[f]
        s, pattern = key
        return s.upper(), SchemaProp(s, pattern, 0).fluent_text()

    return name


def group_axioms(vocab: GroundVocabulary, keys: Iterable[Hashable], needs: bool = True) -> list[tuple]:
    """Exactly one effect atom per row; never both precondition atoms."""
    out = []
    for key in keys:
        ct, cf, k = (vocab.group_atom(key, s) for s in (SLOT_CAUSES_POS, SLOT_CAUSES_NEG, SLOT_KEEPS))
        out += [make_clause((ct, cf, k)), make_clause((-ct, -cf)), make_clause((-ct, -k)), make_clause((-cf, -k))]
        if needs:
            out.append(make_clause((-vocab.group_atom(key, SLOT_NEEDS_POS), -vocab.group_atom(key, SLOT_NEEDS_NEG))))
    return out


def bias_axioms(vocab: GroundVocabulary, keys: Iterable[Hashable]) -> CnfFormula:
    """Causing a literal requires its complement beforehand (favours 1:1 models)."""
    cs = []
    for key in keys:
        g = lambda s: vocab.group_atom(key, s)
        cs.append((-g(SLOT_CAUSES_POS), g(SLOT_NEEDS_NEG)))
        cs.append((-g(SLOT_CAUSES_NEG), g(SLOT_NEEDS_POS)))
    return CnfFormula.of(cs)


# ---------------------------------------------------------------- belief to CNF

def render_belief(b, domain: GroundDomain, reduce: bool = True, limit: int = DEFAULT_CLAUSE_LIMIT) -> CnfFormula:
    """CNF of an engine belief (fluent-factored, PRE lists, or a plain formula)."""
    if isinstance(b, FluentFactoredBelief):
        return BeliefRenderer(domain, reduce, limit).render(b)
    renderer = CnfRenderer(make_axiom_reducer(domain.vocab) if reduce else None, limit)
    if isinstance(b, PreBelief):
        return renderer.render([b.denotation(domain.vocab.fluent)])
    if isinstance(b, Node):
        return renderer.render([b])
    if isinstance(b, CnfFormula):
        return b
    raise TypeError(f"cannot render {type(b).__name__}")


def belief_to_cnf(b, domain: GroundDomain, keys: Optional[Iterable[Hashable]] = None, needs: bool = True,
                  reduce: bool = True) -> CnfFormula:
    """Belief conjoined with the vocabulary axioms of ``keys`` (default: every ground row)."""
    keys = ground_keys(domain) if keys is None else keys
    body = render_belief(b, domain, reduce)
    return body.conjoin(CnfFormula.of(group_axioms(domain.vocab, keys, needs))).simplify()


def schematize(f: CnfFormula, smap: SchemaMap, policy: str = "assume-keeps") -> CnfFormula:
    """Replace ground action-proposition literals by their schema propositions.

    A positive literal becomes the disjunction of its schema atoms; a negative
    one the conjunction of their negations, which multiplies the clause out.
    Off-parameter propositions follow ``policy``.
    """
    if policy not in OFF_PARAM_POLICIES:
        raise ValueError(f"unknown policy {policy}")
    vocab = smap.domain.vocab
    cache: dict[int, Optional[list]] = {}

    def image(x: int):
        r = cache.get(x, 0)
        if r == 0:
            a, fl, slot = vocab.decode_prop(x)
            if smap.in_parameter(a, fl):
                s = smap.action_keys[a][0]
                r = [vocab.add_extra(SchemaProp(s, p, slot)) for p in smap.patterns(a, fl)]
            elif policy == "assume-keeps":
                r = "true" if slot == SLOT_KEEPS else "false"
            else:
                r = None
            cache[x] = r
        return r

    out = []
    for c in f.clauses:
        options: list[list[int]] = []
        satisfied = False
        for l in c:
            x = abs(l)
            if not vocab.is_prop(x):
                options.append([l])
                continue
            r = image(x)
            if r is None:
                options.append([l])
            elif isinstance(r, str):
                if (r == "true") == (l > 0):
                    satisfied = True
                    break
            elif l > 0:
                options.append(list(r))
            else:
                options.append([[-y] for y in r])  # type: ignore[list-item]
        if satisfied:
            continue
        fixed = [o for o in options if o and not isinstance(o[0], list)]
        flat = [y for o in fixed for y in o]
        multi = [[z[0] for z in o] for o in options if o and isinstance(o[0], list)]
        for pick in product(*multi):
            cl = make_clause(flat + list(pick))
            if cl is not None:
                out.append(cl)
    return CnfFormula.of(out)


# ---------------------------------------------------------------- instances

@dataclass
class SatInstance:
    vocab: GroundVocabulary
    keys: list
    namer: Callable[[Hashable], tuple[str, str]]
    groups: dict = field(default_factory=dict)  # provenance label -> clauses
    needs: bool = True

    def clauses(self) -> list:
        out: list = []
        for cs in self.groups.values():
            out.extend(cs)
        return out

    @property
    def cnf(self) -> CnfFormula:
        return CnfFormula.of(self.clauses())

    def counts(self) -> dict[str, int]:
        return {k: len(v) for k, v in self.groups.items()}

    def n_clauses(self) -> int:
        return sum(len(v) for v in self.groups.values())

    def n_vars(self) -> int:
        return len({abs(l) for c in self.clauses() for l in c})

    def with_group(self, label: str, clauses) -> "SatInstance":
        g = dict(self.groups)
        g[label] = list(clauses)
        return SatInstance(self.vocab, self.keys, self.namer, g, self.needs)

    def satisfied_by(self, model: dict) -> bool:
        return all(any(model.get(abs(l), False) == (l > 0) for l in c) for c in self.clauses())


def make_instance(
    belief,
    domain: GroundDomain,
    keys: Optional[Sequence[Hashable]] = None,
    bias: bool = False,
    needs: bool = True,
    reduce: bool = True,
) -> SatInstance:
    keys = ground_keys(domain) if keys is None else list(keys)
    v = domain.vocab
    groups = {
        "belief": sorted(render_belief(belief, domain, reduce).clauses),
        "vocab": group_axioms(v, keys, needs),
    }
    if bias:
        groups["bias"] = sorted(bias_axioms(v, keys).clauses)
    return SatInstance(v, keys, row_namer(domain), groups, needs)


def consistent_bias(inst: SatInstance, solver=None) -> tuple[SatInstance, list]:
    """Add bias clauses row by row, skipping rows whose bias contradicts the data.

    Returns the biased instance and the keys whose bias was dropped. When
    every bias clause is consistent this equals adding them all.
    """
    v = inst.vocab
    per_key = {k: sorted(bias_axioms(v, [k]).clauses) for k in inst.keys}
    everything = [c for cs in per_key.values() for c in cs]
    trial = inst.with_group("bias", everything)
    if _solve(trial, solver).sat:
        return trial, []
    kept: list = []
    dropped = []
    for k in inst.keys:
        cand = inst.with_group("bias", kept + per_key[k])
        if _solve(cand, solver).sat:
            kept += per_key[k]
        else:
            dropped.append(k)
    return inst.with_group("bias", kept), dropped


# ---------------------------------------------------------------- models

@dataclass(frozen=True)
class EffectRow:
    effect: Optional[str]  # '+', '-', 'keeps', or None when undecided
    needs: frozenset = frozenset()  # True: needs f, False: needs not f


@dataclass
class SchemaActionModel:
    rows: dict  # key -> EffectRow
    namer: Callable[[Hashable], tuple[str, str]]
    needs_source: str = "solver"
    stats: dict = field(default_factory=dict)

    def lines(self, kinds: Sequence[str] = ("NEEDS", "CAUSES", "KEEPS")) -> list[str]:
        by_action: dict[str, dict[str, list[str]]] = {}
        for key, row in self.rows.items():
            act, fl = self.namer(key)
            slot = by_action.setdefault(act, {"NEEDS": [], "CAUSES": [], "KEEPS": []})
            for v in sorted(row.needs, reverse=True):
                slot["NEEDS"].append(fl if v else f"(NOT {fl})")
            if row.effect == "+":
                slot["CAUSES"].append(fl)
            elif row.effect == "-":
                slot["CAUSES"].append(f"(NOT {fl})")
            elif row.effect == "keeps":
                slot["KEEPS"].append(fl)
        out = []
        for act, slots in by_action.items():
            for kind in kinds:
                out += [f"({act} {kind} {x})" for x in sorted(slots[kind])]
        return out

    def effect_lines(self) -> set[str]:
        return set(self.lines(("CAUSES", "KEEPS")))


def default_phase(vocab: GroundVocabulary) -> Callable[[int], bool]:
    """Keeps atoms first tried true, everything else false."""

    def phase(atom: int) -> bool:
        info = vocab.axiom_slot(atom)
        return info is not None and info[1] == SLOT_KEEPS

    return phase


def _solve(inst: SatInstance, solver, assumptions: Sequence[int] = ()) -> SolverResult:
    solver = solver if solver is not None else DpllSolver(default_phase(inst.vocab))
    return solver.solve(inst.clauses(), assumptions)


def decode(inst: SatInstance, model: dict, known_pre: Optional[dict] = None) -> SchemaActionModel:
    v = inst.vocab
    rows = {}
    for key in inst.keys:
        eff = None
        for slot, tag in EFFECT_SLOTS.items():
            if model.get(v.group_atom(key, slot), False):
                eff = tag
        if known_pre is not None:
            needs = frozenset(known_pre.get(key, ()))
        elif inst.needs:
            needs = frozenset(
                val for slot, val in ((SLOT_NEEDS_POS, True), (SLOT_NEEDS_NEG, False))
                if model.get(v.group_atom(key, slot), False)
            )
        else:
            needs = frozenset()
        rows[key] = EffectRow(eff, needs)
    return SchemaActionModel(rows, inst.namer, "known" if known_pre is not None else "solver")


def extract_model(
    inst: SatInstance,
    solver=None,
    prefer_keeps: bool = True,
    known_pre: Optional[dict] = None,
) -> Optional[SchemaActionModel]:
    """One satisfying model decoded into rows, or None when unsatisfiable.

    With ``prefer_keeps`` every row decoded as CAUSES is retried as KEEPS
    (keeping earlier choices); rows where that stays satisfiable become
    KEEPS, so unconstrained rows never report a spurious effect.
    """
    t0 = time.perf_counter()
    r = _solve(inst, solver)
    calls = 1
    if not r.sat:
        return None
    model = r.model
    if prefer_keeps:
        v = inst.vocab
        fixed: list[int] = []
        for key in inst.keys:
            k = v.group_atom(key, SLOT_KEEPS)
            if model.get(k, False):
                fixed.append(k)
                continue
            if not any(model.get(v.group_atom(key, s), False) for s in (SLOT_CAUSES_POS, SLOT_CAUSES_NEG)):
                continue
            calls += 1
            r2 = _solve(inst, solver, fixed + [k])
            if r2.sat:
                model = r2.model
                fixed.append(k)
    full = {abs(l): False for c in inst.clauses() for l in c}
    full.update(model)
    if not inst.satisfied_by(full):
        raise AssertionError("decoded assignment does not satisfy the instance")
    m = decode(inst, full, known_pre)
    m.stats = {"solver_calls": calls, "seconds": time.perf_counter() - t0, **r.stats}
    return m


class Label(enum.Enum):
    ENTAILED = "entailed"
    REFUTED = "refuted"
    UNKNOWN = "unknown"


def query_prop(inst: SatInstance, atom: int, solver=None) -> Label:
    """Entailed iff inst & ~p is unsatisfiable; refuted iff inst & p is."""
    neg = _solve(inst, solver, [-atom])
    if not neg.sat:
        return Label.ENTAILED
    pos = _solve(inst, solver, [atom])
    if not pos.sat:
        return Label.REFUTED
    return Label.UNKNOWN


# ---------------------------------------------------------------- output

def emit_model(m: Optional[SchemaActionModel], sink: TextIO) -> None:
    if m is None:
        return
    for line in m.lines():
        sink.write(line + "\n")


def model_to_pddl(m: SchemaActionModel, schema: DomainSchema) -> str:
    """A domain whose actions take effects from CAUSES rows and preconditions from NEEDS rows."""
    acts = []
    for a in schema.actions:
        pre, eff = [], []
        for key, row in m.rows.items():
            if not (isinstance(key, tuple) and key[0] == a.name):
                continue
            pred, vs = key[1]
            for val in sorted(row.needs, reverse=True):
                pre.append(Literal(pred, vs, val))
            if row.effect in ("+", "-"):
                eff.append(Literal(pred, vs, row.effect == "+"))
        acts.append(ActionSchema(a.name, a.params, tuple(pre), tuple(eff)))
    learned = DomainSchema(schema.name, schema.requirements, schema.types, schema.predicates, tuple(acts))
    return print_domain(learned)
