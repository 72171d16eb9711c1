"""Small named instances used by the tests, the CLI demo files and the README."""

from __future__ import annotations

from .core import Load, PartialString, Store, par_compose, seq_compose, singleton

ACQ_B = Load("acquire", "r0", "b")
LOAD_A = Load("none", "r1", "a")
STORE_A = Store("none", "a", 1)
REL_B = Store("release", "b", 1)


def message_passing() -> PartialString:
    """Two threads: ``r0 := [b]_acq ; r1 := [a]`` in parallel with ``[a] := 1 ; [b]_rel := 1``."""
    left = seq_compose(singleton(ACQ_B), singleton(LOAD_A))
    right = seq_compose(singleton(STORE_A), singleton(REL_B))
    ps = par_compose(left, right)
    return PartialString(ps.labels, ps.edges, ["e0", "e1", "e2", "e3"])


def message_passing_n() -> PartialString:
    """:func:`message_passing` with the acquire additionally ordered before the release."""
    return message_passing().with_edge(0, 3)
