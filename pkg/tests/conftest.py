import itertools
import random

import pytest
from hypothesis import strategies as st

from pomcka.core import PartialString
from pomcka.program import Program

ALPHABET = ("a", "b", "c")

ACCEPTANCE_LINES: list[str] = []


def random_string(rng: random.Random, max_events: int, alphabet=ALPHABET, density: float = 0.35,
                  min_events: int = 0) -> PartialString:
    n = rng.randint(min_events, max_events)
    labels = [rng.choice(alphabet) for _ in range(n)]
    # edges only from lower to higher index keep it acyclic; shuffle afterwards
    edges = [(i, j) for i, j in itertools.combinations(range(n), 2) if rng.random() < density]
    perm = list(range(n))
    rng.shuffle(perm)
    return PartialString(labels, edges).permuted(perm)


def random_program(rng: random.Random, max_gens: int = 3, max_events: int = 4,
                   alphabet=ALPHABET, min_events: int = 0) -> Program:
    k = rng.randint(1, max_gens)
    return Program(random_string(rng, max_events, alphabet, min_events=min_events) for _ in range(k))


@st.composite
def partial_strings(draw, max_events: int = 5, alphabet=ALPHABET):
    n = draw(st.integers(0, max_events))
    labels = draw(st.lists(st.sampled_from(alphabet), min_size=n, max_size=n))
    pairs = list(itertools.combinations(range(n), 2))
    chosen = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    perm = draw(st.permutations(list(range(n))))
    edges = [p for p, keep in zip(pairs, chosen) if keep]
    return PartialString(labels, edges).permuted(perm)


def warshall(n: int, edges) -> set:
    """Reflexive-transitive closure as a set of pairs, by Floyd-Warshall."""
    rel = {(i, i) for i in range(n)} | set(edges)
    for k in range(n):
        for i in range(n):
            for j in range(n):
                if (i, k) in rel and (k, j) in rel:
                    rel.add((i, j))
    return rel


def order_of(x: PartialString) -> set:
    return {(a, b) for a in x.events for b in x.events if x.leq(a, b)}


def brute_morphisms(x: PartialString, y: PartialString):
    """Every bijection f: E_y -> E_x that witnesses x ⊑ y, by enumeration."""
    if len(x) != len(y):
        return
    ox = order_of(x)
    oy = order_of(y)
    for perm in itertools.permutations(range(len(x))):
        if all(y.labels[e] == x.labels[perm[e]] for e in y.events) and all(
            (perm[a], perm[b]) in ox for a, b in oy
        ):
            yield perm


def brute_refines(x: PartialString, y: PartialString) -> bool:
    return next(brute_morphisms(x, y), None) is not None


def brute_iso(x: PartialString, y: PartialString) -> bool:
    if len(x) != len(y):
        return False
    ox, oy = order_of(x), order_of(y)
    for perm in itertools.permutations(range(len(x))):
        if all(y.labels[e] == x.labels[perm[e]] for e in y.events) and {
            (perm[a], perm[b]) for a, b in oy
        } == ox:
            return True
    return False


@pytest.fixture
def rng():
    return random.Random(20240611)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
