"""Text snapshots of beliefs: an s-expression listing of the shared NNF DAG.

Nodes are numbered in post-order; literals carry the atom's pretty name, so a
snapshot can be read back against any vocabulary that knows those names.
Writing a parsed snapshot reproduces the original text byte for byte.
"""

from __future__ import annotations

from typing import Callable, Iterable

from ..errors import ParseError
from ..logic.nnf import FALSE, OP_AND, OP_FALSE, OP_LIT, OP_OR, OP_TRUE, TRUE, Node, _build, lit, postorder
from ..sexp import dumps, parse_all, parse_one
from .fluent_factored import FluentFactoredBelief
from .pre import PreBelief

VERSION = "1"


def _dump_nodes(roots: Iterable[Node], name: Callable[[int], str]) -> tuple[list[str], dict[int, int]]:
    index: dict[int, int] = {}
    lines = []
    for n in postorder(list(roots)):
        i = len(index) + 1
        index[id(n)] = i
        if n.op == OP_TRUE:
            body = "true"
        elif n.op == OP_FALSE:
            body = "false"
        elif n.op == OP_LIT:
            body = f"(lit {'+' if n.lit > 0 else '-'} {name(abs(n.lit))})"
        else:
            op = "and" if n.op == OP_AND else "or"
            body = f"({op} {' '.join(str(index[id(k)]) for k in n.kids)})"
        lines.append(f"  (n {i} {body})")
    return lines, index


def _ffb_line(phi: FluentFactoredBelief, index: dict[int, int], indent: str) -> str:
    def ref(xs):
        return " ".join(str(index[id(x)]) for x in xs)

    return f"{indent}(ffb (pos {ref(phi.expl_pos)}) (neg {ref(phi.expl_neg)}) (ctx {ref(phi.ctx)}))"


def dump_belief(b, name: Callable[[int], str]) -> str:
    """Serialize a FluentFactoredBelief or PreBelief."""
    if isinstance(b, FluentFactoredBelief):
        kind, lists = "as", ((b,),)
    elif isinstance(b, PreBelief):
        kind, lists = "pre", b.lists
    else:
        raise TypeError(f"cannot snapshot {type(b).__name__}")
    roots = [r for lst in lists for phi in lst for r in phi.roots()]
    lines, index = _dump_nodes(roots, name)
    out = [f"(belief {kind} (version {VERSION}) (fluents {lists[0][0].n})", " (nodes", *lines, " )"]
    for lst in lists:
        out.append(" (list")
        out += [_ffb_line(phi, index, "  ") for phi in lst]
        out.append(" )")
    out.append(")")
    return "\n".join(out) + "\n"


def _node_of(body, nodes: dict[int, Node], lookup: Callable[[str], int]) -> Node:
    if body == "true":
        return TRUE
    if body == "false":
        return FALSE
    if not isinstance(body, list) or not body:
        raise ParseError(f"bad node body {body!r}")
    head = body[0]
    if head == "lit":
        sign, nm = body[1], dumps(body[2])
        a = lookup(nm)
        return lit(a if sign == "+" else -a)
    if head in ("and", "or"):
        return _build(OP_AND if head == "and" else OP_OR, [nodes[int(k)] for k in body[1:]])
    raise ParseError(f"unknown node kind {head!r}")


def load_belief(text: str, lookup: Callable[[str], int]):
    x = parse_one(text)
    if not isinstance(x, list) or x[:1] != ["belief"]:
        raise ParseError("not a belief snapshot")
    kind = x[1]
    nodes: dict[int, Node] = {}
    lists = []
    for item in x[2:]:
        tag = item[0]
        if tag == "nodes":
            for entry in item[1:]:
                if entry[0] != "n":
                    raise ParseError(f"expected node entry, got {entry[0]!r}")
                nodes[int(entry[1])] = _node_of(entry[2], nodes, lookup)
        elif tag == "list":
            lst = []
            for ffb in item[1:]:
                parts = {p[0]: tuple(nodes[int(i)] for i in p[1:]) for p in ffb[1:]}
                lst.append(FluentFactoredBelief(parts["pos"], parts["neg"], parts["ctx"]))
            lists.append(tuple(lst))
    if kind == "as":
        return lists[0][0]
    return PreBelief(tuple(lists))
