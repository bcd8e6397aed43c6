"""Reader for the typed-STRIPS PDDL subset.

Symbols are read case-insensitively (folded to lower case). Anything outside
the subset raises ParseError naming the construct and where it starts.
"""

from __future__ import annotations

from ..errors import ParseError, PddlTypeError
from ..sexp import parse_all
from .ast import ROOT_TYPE, ActionSchema, DomainSchema, Literal, Predicate, ProblemInstance

SUPPORTED_REQUIREMENTS = {":strips", ":typing"}
UNSUPPORTED_FORMULAS = {"or", "when", "forall", "exists", "imply", "=", "either", "increase", "decrease"}
UNSUPPORTED_SECTIONS = {":constants", ":functions", ":derived", ":durative-action", ":axiom", ":constraints"}


class _Reader:
    def __init__(self, text: str):
        self.pos: dict = {}
        self.forms = parse_all(text.lower(), self.pos)

    def fail(self, msg: str, where) -> None:
        line, col = self.pos.get(id(where), (0, 0)) if isinstance(where, list) else (0, 0)
        raise ParseError(msg, line, col)

    def expect_list(self, x, what: str, where) -> list:
        if not isinstance(x, list):
            self.fail(f"expected {what}, got {x!r}", where)
        return x

    def symbol(self, x, what: str, where) -> str:
        if not isinstance(x, str):
            self.fail(f"expected {what}", x if isinstance(x, list) else where)
        return x

    def typed_list(self, items: list, where, variables: bool) -> list[tuple[str, str]]:
        """Parse `a b - t c` into [(a, t), (b, t), (c, object)]."""
        out: list[tuple[str, str]] = []
        pending: list[str] = []
        i = 0
        while i < len(items):
            x = items[i]
            if isinstance(x, list):
                head = x[0] if x and isinstance(x[0], str) else ""
                self.fail(f"unsupported construct '{head or 'list'}' in typed list", x)
            if x == "-":
                if i + 1 >= len(items):
                    self.fail("dangling '-' in typed list", where)
                t = items[i + 1]
                if isinstance(t, list):
                    head = t[0] if t and isinstance(t[0], str) else "list"
                    self.fail(f"unsupported construct '{head}' type", t)
                if not pending:
                    self.fail("type annotation without names", where)
                out.extend((p, t) for p in pending)
                pending = []
                i += 2
                continue
            if variables and not x.startswith("?"):
                self.fail(f"expected a variable, got {x!r}", where)
            pending.append(x)
            i += 1
        out.extend((p, ROOT_TYPE) for p in pending)
        return out

    def atom(self, x: list, variables: bool) -> Literal:
        head = self.symbol(x[0] if x else None, "predicate name", x)
        if head in UNSUPPORTED_FORMULAS:
            self.fail(f"unsupported construct '{head}'", x)
        args = []
        for a in x[1:]:
            a = self.symbol(a, "term", x)
            if variables != a.startswith("?"):
                self.fail(f"unexpected term {a!r}", x)
            args.append(a)
        return Literal(head, tuple(args), True)

    def literal(self, x, variables: bool) -> Literal:
        x = self.expect_list(x, "literal", x)
        if x and x[0] == "not":
            if len(x) != 2:
                self.fail("'not' takes one argument", x)
            inner = self.expect_list(x[1], "atom", x)
            if inner and inner[0] == "not":
                self.fail("unsupported construct 'nested not'", inner)
            return self.atom(inner, variables).negated()
        return self.atom(x, variables)

    def conjunction(self, x, variables: bool = True) -> tuple:
        x = self.expect_list(x, "formula", x)
        if not x:
            return ()
        if x[0] == "and":
            return tuple(self.literal(y, variables) for y in x[1:])
        return (self.literal(x, variables),)

    def header(self, form, kind: str) -> tuple[str, list]:
        form = self.expect_list(form, "define form", form)
        if len(form) < 2 or form[0] != "define":
            self.fail("expected (define ...)", form)
        head = self.expect_list(form[1], f"({kind} name)", form)
        if len(head) != 2 or head[0] != kind:
            self.fail(f"expected ({kind} name)", head)
        return self.symbol(head[1], "name", head), form[2:]

    def action(self, sec: list) -> ActionSchema:
        name = self.symbol(sec[1] if len(sec) > 1 else None, "action name", sec)
        fields = {}
        i = 2
        while i < len(sec):
            key = sec[i]
            if key not in (":parameters", ":precondition", ":effect"):
                self.fail(f"unsupported construct '{key}' in action {name}", sec)
            if i + 1 >= len(sec):
                self.fail(f"missing value for {key}", sec)
            fields[key] = sec[i + 1]
            i += 2
        params = self.typed_list(self.expect_list(fields.get(":parameters", []), "parameters", sec), sec, True)
        pre = self.conjunction(fields[":precondition"]) if ":precondition" in fields else ()
        eff = self.conjunction(fields[":effect"]) if ":effect" in fields else ()
        return ActionSchema(name, tuple(params), pre, eff)

    def domain(self) -> DomainSchema:
        if len(self.forms) != 1:
            raise ParseError("expected exactly one (define (domain ...)) form")
        name, sections = self.header(self.forms[0], "domain")
        reqs, types, preds, actions = [], [], [], []
        for sec in sections:
            sec = self.expect_list(sec, "domain section", sec)
            key = sec[0] if sec else None
            if key == ":requirements":
                for r in sec[1:]:
                    if r not in SUPPORTED_REQUIREMENTS:
                        self.fail(f"unsupported requirement '{r}'", sec)
                    reqs.append(r)
            elif key == ":types":
                types.extend(self.typed_list(sec[1:], sec, False))
            elif key == ":predicates":
                for p in sec[1:]:
                    p = self.expect_list(p, "predicate", sec)
                    pname = self.symbol(p[0] if p else None, "predicate name", p)
                    preds.append(Predicate(pname, tuple(self.typed_list(p[1:], p, True))))
            elif key == ":action":
                actions.append(self.action(sec))
            elif key in UNSUPPORTED_SECTIONS:
                self.fail(f"unsupported construct '{key}'", sec)
            else:
                self.fail(f"unknown domain section {key!r}", sec)
        d = DomainSchema(name, tuple(reqs), tuple(t for t in types if t[0] != ROOT_TYPE), tuple(preds), tuple(actions))
        d.validate()
        return d

    def problem(self) -> ProblemInstance:
        if len(self.forms) != 1:
            raise ParseError("expected exactly one (define (problem ...)) form")
        name, sections = self.header(self.forms[0], "problem")
        dom, objects, init, goal = "", [], [], ()
        for sec in sections:
            sec = self.expect_list(sec, "problem section", sec)
            key = sec[0] if sec else None
            if key == ":domain":
                dom = self.symbol(sec[1] if len(sec) > 1 else None, "domain name", sec)
            elif key == ":objects":
                objects.extend(self.typed_list(sec[1:], sec, False))
            elif key == ":init":
                for x in sec[1:]:
                    lit = self.literal(x, False)
                    if not lit.positive:
                        self.fail("negative init atoms are implicit", x)
                    init.append(lit)
            elif key == ":goal":
                goal = self.conjunction(sec[1] if len(sec) > 1 else [], False)
            elif key == ":requirements":
                continue
            else:
                self.fail(f"unsupported construct '{key}'", sec)
        return ProblemInstance(name, dom, tuple(objects), tuple(init), goal)


def parse_domain(text: str) -> DomainSchema:
    return _Reader(text).domain()


def parse_problem(text: str, schema: DomainSchema | None = None) -> ProblemInstance:
    p = _Reader(text).problem()
    if schema is not None:
        if p.domain and p.domain != schema.name:
            raise PddlTypeError(f"problem is for domain {p.domain}, not {schema.name}")
        p.validate(schema)
    return p
