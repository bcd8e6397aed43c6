"""Satisfiability back ends: an embedded DPLL and an external DIMACS solver."""

from __future__ import annotations

import os
import subprocess
import tempfile
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from ..errors import SolverFailure


@dataclass
class SolverResult:
    sat: bool
    model: Optional[dict] = None  # atom id -> bool
    stats: dict = field(default_factory=dict)


PhaseFn = Callable[[int], bool]


class DpllSolver:
    """Complete DPLL: two-watched-literal unit propagation, root-level pure
    literal elimination, activity-ordered branching with chronological
    backtracking.

    ``phase(atom)`` gives the first value tried for a decision; ``seed``
    jitters the initial activities so ties break reproducibly.
    """

    def __init__(self, phase: Optional[PhaseFn] = None, seed: int = 0, decay: float = 0.95):
        self.phase = phase or (lambda a: False)
        self.seed = seed
        self.decay = decay

    def solve(self, clauses: Iterable[Sequence[int]], assumptions: Sequence[int] = ()) -> SolverResult:
        t0 = time.perf_counter()
        run = _Run(list(clauses), list(assumptions), self)
        sat = run.search()
        stats = {
            "decisions": run.decisions,
            "conflicts": run.conflicts,
            "propagations": run.propagations,
            "variables": run.nvars,
            "clauses": run.nclauses,
            "seconds": time.perf_counter() - t0,
        }
        model = None
        if sat:
            model = {run.atoms[v]: run.value[v] > 0 for v in range(1, run.nvars + 1)}
        return SolverResult(sat, model, stats)


class _Run:
    def __init__(self, clauses: list, assumptions: list, cfg: DpllSolver):
        atoms = sorted({abs(l) for c in clauses for l in c} | {abs(l) for l in assumptions})
        self.atoms = [0] + atoms
        index = {a: i + 1 for i, a in enumerate(atoms)}
        self.nvars = n = len(atoms)
        self.cfg = cfg
        self.value = [0] * (n + 1)  # +1 true, -1 false, 0 unassigned
        self.level = [0] * (n + 1)
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.flipped: list[bool] = []
        self.watches: dict[int, list[int]] = {}
        self.clauses: list[list[int]] = []
        self.units: list[int] = []
        self.empty = False
        self.decisions = self.conflicts = self.propagations = 0
        rng = np.random.Generator(np.random.PCG64(cfg.seed))
        jitter = rng.random(n + 1) * 1e-3
        self.activity = [0.0] * (n + 1)
        self.bump = 1.0
        counts = [0] * (n + 1)
        polarity: dict[int, int] = {}
        for c in clauses:
            lits = sorted({(index[abs(l)] if l > 0 else -index[abs(l)]) for l in c})
            if any(-l in lits for l in lits):
                continue
            if not lits:
                self.empty = True
                continue
            for l in lits:
                counts[abs(l)] += 1
                polarity[abs(l)] = polarity.get(abs(l), 0) | (1 if l > 0 else 2)
            if len(lits) == 1:
                self.units.append(lits[0])
                continue
            ci = len(self.clauses)
            self.clauses.append(lits)
            self.watches.setdefault(lits[0], []).append(ci)
            self.watches.setdefault(lits[1], []).append(ci)
        self.nclauses = len(self.clauses) + len(self.units)
        for v in range(1, n + 1):
            self.activity[v] = counts[v] + jitter[v]
        self.assumptions = [index[abs(l)] if l > 0 else -index[abs(l)] for l in assumptions]
        assumed = {abs(l) for l in self.assumptions}
        # pure literals that no assumption touches can be fixed at the root
        self.pure = [v if polarity.get(v) == 1 else -v for v in range(1, n + 1)
                     if polarity.get(v) in (1, 2) and v not in assumed]
        self.pure = [l for l in self.pure if not any(abs(u) == abs(l) for u in self.units)]

    def lit_value(self, l: int) -> int:
        v = self.value[abs(l)]
        return v if l > 0 else -v

    def assign(self, l: int) -> bool:
        cur = self.lit_value(l)
        if cur:
            return cur > 0
        self.value[abs(l)] = 1 if l > 0 else -1
        self.level[abs(l)] = len(self.trail_lim)
        self.trail.append(l)
        return True

    def propagate(self, start: int) -> Optional[list]:
        """Unit propagation from trail position ``start``; returns a conflict clause or None."""
        i = start
        while i < len(self.trail):
            false_lit = -self.trail[i]
            i += 1
            ws = self.watches.get(false_lit)
            if not ws:
                continue
            j = 0
            while j < len(ws):
                ci = ws[j]
                c = self.clauses[ci]
                if c[0] == false_lit:
                    c[0], c[1] = c[1], c[0]
                if self.lit_value(c[0]) > 0:
                    j += 1
                    continue
                moved = False
                for k in range(2, len(c)):
                    if self.lit_value(c[k]) >= 0:
                        c[1], c[k] = c[k], c[1]
                        self.watches.setdefault(c[1], []).append(ci)
                        ws[j] = ws[-1]
                        ws.pop()
                        moved = True
                        break
                if moved:
                    continue
                if self.lit_value(c[0]) < 0:
                    return c
                self.propagations += 1
                self.assign(c[0])
                j += 1
        return None

    def pick(self) -> int:
        best, score = 0, -1.0
        act, value = self.activity, self.value
        for v in range(1, self.nvars + 1):
            if not value[v] and act[v] > score:
                best, score = v, act[v]
        return best

    def backtrack(self) -> Optional[int]:
        """Undo to the deepest unflipped decision and return its flipped literal."""
        while self.trail_lim:
            lim = self.trail_lim.pop()
            was_flipped = self.flipped.pop()
            decision = self.trail[lim]
            for l in self.trail[lim:]:
                self.value[abs(l)] = 0
            del self.trail[lim:]
            if not was_flipped:
                self.trail_lim.append(len(self.trail))
                self.flipped.append(True)
                self.assign(-decision)
                return lim
        return None

    def search(self) -> bool:
        if self.empty:
            return False
        for l in self.units + self.assumptions + self.pure:
            if not self.assign(l):
                return False
        if self.propagate(0) is not None:
            return False
        while True:
            v = self.pick()
            if v == 0:
                return True
            self.decisions += 1
            self.trail_lim.append(len(self.trail))
            self.flipped.append(False)
            start = len(self.trail)
            self.assign(v if self.cfg.phase(self.atoms[v]) else -v)
            while True:
                conflict = self.propagate(start)
                if conflict is None:
                    break
                self.conflicts += 1
                for l in conflict:
                    self.activity[abs(l)] += self.bump
                self.bump /= self.cfg.decay
                start = self.backtrack()
                if start is None:
                    return False


class ExternalSolver:
    """Runs ``command + [cnf path]`` and parses `s` / `v` lines from its output."""

    def __init__(self, command: Sequence[str], timeout: float = 600.0):
        self.command = list(command)
        self.timeout = timeout

    def solve(self, clauses: Iterable[Sequence[int]], assumptions: Sequence[int] = ()) -> SolverResult:
        clauses = [list(c) for c in clauses] + [[l] for l in assumptions]
        atoms = sorted({abs(l) for c in clauses for l in c})
        index = {a: i + 1 for i, a in enumerate(atoms)}
        t0 = time.perf_counter()
        fd, path = tempfile.mkstemp(suffix=".cnf")
        try:
            with os.fdopen(fd, "w") as fh:
                fh.write(f"p cnf {len(atoms)} {len(clauses)}\n")
                for c in clauses:
                    fh.write(" ".join(str(index[abs(l)] if l > 0 else -index[abs(l)]) for l in c) + " 0\n")
            try:
                out = subprocess.run(self.command + [path], capture_output=True, text=True, timeout=self.timeout)
            except (OSError, subprocess.TimeoutExpired) as e:
                raise SolverFailure(f"external solver failed: {e}") from None
        finally:
            os.unlink(path)
        status, vals = None, {}
        for line in out.stdout.splitlines():
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "s" and len(parts) > 1:
                status = parts[1]
            elif parts[0] == "v":
                for tok in parts[1:]:
                    x = int(tok)
                    if x:
                        vals[abs(x)] = x > 0
        stats = {"seconds": time.perf_counter() - t0, "variables": len(atoms), "clauses": len(clauses)}
        if status == "UNSATISFIABLE":
            return SolverResult(False, None, stats)
        if status != "SATISFIABLE":
            raise SolverFailure(f"external solver gave no verdict (exit {out.returncode})")
        model = {a: vals.get(index[a], False) for a in atoms}
        return SolverResult(True, model, stats)
