"""Typed-STRIPS PDDL subset: parsing, printing, grounding, schema correspondence."""

from importlib import resources

from .ast import ActionSchema, DomainSchema, Literal, Predicate, ProblemInstance
from .grounding import (
    SchemaMap,
    SchemaProvider,
    golden_rows,
    ground,
    ground_name,
    schema_atoms_for,
    strips_model,
)
from .generators import GENERATORS
from .parser import parse_domain, parse_problem
from .printer import literal_text, print_domain, print_problem

FIXTURES = {
    "blocksworld": ("blocksworld-domain.pddl", "blocksworld-13.pddl"),
    "driverlog": ("driverlog-domain.pddl", "driverlog-99.pddl"),
    "zenotravel": ("zenotravel-domain.pddl", "zenotravel-9.pddl"),
    "depots": ("depots-domain.pddl", "depots-5.pddl"),
    "locked-door": ("locked-door-domain.pddl", "locked-door-1.pddl"),
}
# alternative models a toy fixture's oracle belief starts from
CANDIDATES = {
    "locked-door": ("locked-door-domain.pddl", "locked-door-r2.pddl", "locked-door-r3.pddl"),
}
TRACES = {"locked-door": "locked-door-trace.jsonl"}


def fixture_text(name: str) -> str:
    return resources.files("slaflearn.data").joinpath(name).read_text()


def load_fixture(name: str) -> tuple[DomainSchema, ProblemInstance]:
    dom, prob = FIXTURES[name]
    schema = parse_domain(fixture_text(dom))
    return schema, parse_problem(fixture_text(prob), schema)
