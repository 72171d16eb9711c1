"""A small DPLL solver for CNF over positive-integer variables.

Enough for refinement instances of a few dozen variables.  Clauses are lists
of non-zero ints in the DIMACS convention.
"""

from __future__ import annotations

from collections.abc import Sequence


def solve(n_vars: int, clauses: Sequence[Sequence[int]]) -> dict[int, bool] | None:
    """Return a satisfying assignment for every variable, or ``None``."""
    clauses = [list(c) for c in clauses]
    if any(not c for c in clauses):
        return None
    occurs: dict[int, list[int]] = {}
    for ci, clause in enumerate(clauses):
        for lit in clause:
            occurs.setdefault(abs(lit), []).append(ci)

    assign: dict[int, bool] = {}
    trail: list[int] = []

    def value(lit: int) -> bool | None:
        v = assign.get(abs(lit))
        if v is None:
            return None
        return v if lit > 0 else not v

    def set_lit(lit: int) -> None:
        assign[abs(lit)] = lit > 0
        trail.append(abs(lit))

    def propagate(start: int) -> bool:
        i = start
        while i < len(trail):
            var = trail[i]
            i += 1
            for ci in occurs.get(var, ()):
                unassigned = None
                n_free = 0
                satisfied = False
                for lit in clauses[ci]:
                    val = value(lit)
                    if val is True:
                        satisfied = True
                        break
                    if val is None:
                        n_free += 1
                        unassigned = lit
                if satisfied:
                    continue
                if n_free == 0:
                    return False
                if n_free == 1:
                    set_lit(unassigned)
        return True

    def undo(to: int) -> None:
        while len(trail) > to:
            del assign[trail.pop()]

    # initial units
    for clause in clauses:
        if len(clause) == 1:
            val = value(clause[0])
            if val is False:
                return None
            if val is None:
                set_lit(clause[0])
    if not propagate(0):
        return None

    def pick() -> int | None:
        # first literal of the shortest open clause
        best = None
        best_len = None
        for clause in clauses:
            free = []
            for lit in clause:
                val = value(lit)
                if val is True:
                    free = None
                    break
                if val is None:
                    free.append(lit)
            if free is None:
                continue
            if best_len is None or len(free) < best_len:
                best, best_len = free[0], len(free)
                if best_len == 2:
                    break
        return best

    def search() -> bool:
        lit = pick()
        if lit is None:
            return True
        for choice in (lit, -lit):
            mark = len(trail)
            set_lit(choice)
            if propagate(mark) and search():
                return True
            undo(mark)
        return False

    if not search():
        return None
    return {v: assign.get(v, False) for v in range(1, n_vars + 1)}


def check(clauses: Sequence[Sequence[int]], model: dict[int, bool]) -> bool:
    return all(any(model[abs(lit)] == (lit > 0) for lit in clause) for clause in clauses)
