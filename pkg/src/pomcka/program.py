"""Programs: downward-closed sets of partial strings, kept as maximal generators.

A :class:`Program` never materialises its closure.  It stores a finite set of
generators from which every member is obtained by adding order; generators
are pruned so that none refines another (which also removes isomorphic
duplicates).  ``0`` has no generators and ``1`` has the empty string alone.
"""

from __future__ import annotations

from collections.abc import Iterable

from .core import EMPTY, Join, PartialString, compose
from .errors import BoundExceeded
from .refine import refines


def _maximal(strings: Iterable[PartialString]) -> tuple[PartialString, ...]:
    # Fewer order pairs first: a later string can only refine, never strictly
    # generalise, something already kept of the same size.
    ordered = sorted(strings, key=lambda s: (len(s), s.n_order_pairs()))
    kept: list[PartialString] = []
    for g in ordered:
        same = [k for k in kept if len(k) == len(g)]
        if any(refines(g, k) for k in same):
            continue
        kept.append(g)
    return tuple(kept)


class Program:
    """The downward closure of ``generators`` under refinement."""

    __slots__ = ("generators",)

    def __init__(self, generators: Iterable[PartialString] = ()) -> None:
        self.generators: tuple[PartialString, ...] = _maximal(generators)

    def __len__(self) -> int:
        return len(self.generators)

    def __iter__(self):
        return iter(self.generators)

    def __repr__(self) -> str:
        return f"Program({list(self.generators)!r})"

    @property
    def is_zero(self) -> bool:
        return not self.generators

    def sizes(self) -> list[int]:
        return [len(g) for g in self.generators]

    def contains(self, x: PartialString) -> bool:
        """Membership of ``x`` in the (implicit) downward closure."""
        return any(refines(x, g) for g in self.generators)


ZERO = Program()
ONE = Program([EMPTY])


def prog_compose(X: Program, Y: Program, join: Join | str) -> Program:
    """Lift ``;`` or ``∥`` pointwise to generators.

    Composing generators only is enough because composition is monotone in
    both arguments with respect to refinement.
    """
    return Program(compose(x, y, join) for x in X for y in Y)


def prog_union(X: Program, Y: Program) -> Program:
    return Program((*X.generators, *Y.generators))


def prog_refines(X: Program, Y: Program) -> bool:
    """``↓X ⊆ ↓Y``: every generator of ``X`` refines some generator of ``Y``."""
    return all(Y.contains(x) for x in X)


def prog_equal(X: Program, Y: Program) -> bool:
    return prog_refines(X, Y) and prog_refines(Y, X)


def string_closure(x: PartialString) -> list[PartialString]:
    """Every refinement of ``x``, one representative per isomorphism class."""
    seen = {x.canonical(): x}
    frontier = [x]
    while frontier:
        nxt = []
        for s in frontier:
            for a in s.events:
                for b in range(a + 1, len(s)):
                    if s.comparable(a, b):
                        continue
                    for lo, hi in ((a, b), (b, a)):
                        t = s.with_edge(lo, hi)
                        key = t.canonical()
                        if key not in seen:
                            seen[key] = t
                            nxt.append(t)
        frontier = nxt
    return [seen[k] for k in sorted(seen)]


def enumerate_closure(X: Program, max_events: int) -> list[PartialString]:
    """Materialise ``↓X`` up to isomorphism by adding one order edge at a time."""
    for g in X:
        if len(g) > max_events:
            raise BoundExceeded(f"generator with {len(g)} events exceeds bound {max_events}")
    seen: dict = {}
    for g in X:
        for s in string_closure(g):
            seen.setdefault(s.canonical(), s)
    return [seen[k] for k in sorted(seen)]
