"""DIMACS CNF reading and writing."""

from __future__ import annotations

from typing import IO, Callable, Optional

from ..errors import ParseError
from .atoms import lit_sort_key
from .cnf import CnfFormula, make_clause


def write_dimacs(f: CnfFormula, sink: IO[str], name: Optional[Callable[[int], str]] = None) -> dict[int, int]:
    """Write f in DIMACS format; returns the map from DIMACS index to atom id.

    Variables are numbered 1..V in ascending atom-id order and each one gets
    a ``c var <i> = <name>`` comment line.
    """
    atoms = sorted(f.atoms())
    index = {a: i + 1 for i, a in enumerate(atoms)}
    for a in atoms:
        sink.write(f"c var {index[a]} = {name(a) if name else a}\n")
    sink.write(f"p cnf {len(atoms)} {len(f.clauses)}\n")
    for c in sorted(f.clauses, key=lambda c: [lit_sort_key(l) for l in c]):
        sink.write(" ".join(str(index[abs(l)] if l > 0 else -index[abs(l)]) for l in c))
        sink.write(" 0\n" if c else "0\n")
    return {i: a for a, i in index.items()}


def read_dimacs(text: str, lookup: Optional[Callable[[str], int]] = None) -> tuple[CnfFormula, dict[int, str]]:
    """Parse DIMACS text.

    With ``lookup`` the ``c var`` comments map variables back to atom ids
    (the inverse of write_dimacs); otherwise DIMACS indices are used as ids.
    """
    names: dict[int, str] = {}
    clauses: list[list[int]] = []
    declared = None
    current: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("c"):
            parts = line.split(None, 4)
            if len(parts) == 5 and parts[1] == "var" and parts[3] == "=":
                names[int(parts[2])] = parts[4]
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ParseError("bad problem line", lineno, 1)
            declared = (int(parts[2]), int(parts[3]))
            continue
        for tok in line.split():
            try:
                v = int(tok)
            except ValueError:
                raise ParseError(f"bad literal {tok!r}", lineno, 1) from None
            if v == 0:
                clauses.append(current)
                current = []
            else:
                current.append(v)
    if current:
        clauses.append(current)
    if declared is None:
        raise ParseError("missing 'p cnf' line")
    if len(clauses) != declared[1]:
        raise ParseError(f"declared {declared[1]} clauses, found {len(clauses)}")
    if lookup is not None:
        ids = {i: lookup(n) for i, n in names.items()}
        clauses = [[ids[abs(l)] if l > 0 else -ids[abs(l)] for l in c] for c in clauses]
    cs = set()
    for c in clauses:
        k = make_clause(c)
        if k is not None:
            cs.add(k)
    return CnfFormula(frozenset(cs), frozenset(abs(l) for c in cs for l in c)), names
