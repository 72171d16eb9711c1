"""Labelled partial orders ("partial strings") and their composition operators.

A :class:`PartialString` owns a tuple of labels, one per event, and an edge
set over event indices.  Events are the integers ``0 .. n-1``; identity
across strings is only ever established through refinement morphisms, never
through raw indices.  The reflexive-transitive closure of the edge set is
computed once at construction and kept as one bitmask per event.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass
from enum import Enum

from .errors import CycleError

LOAD_TAGS = ("none", "acquire")
STORE_TAGS = ("none", "release")


@dataclass(frozen=True)
class Opaque:
    """An uninterpreted alphabet symbol."""

    token: str

    def __str__(self) -> str:
        return self.token

    @property
    def sort_key(self) -> tuple:
        return (0, self.token, "", "")


@dataclass(frozen=True)
class Load:
    """``reg := [addr]_tag``."""

    tag: str
    reg: str
    addr: str

    def __post_init__(self) -> None:
        if self.tag not in LOAD_TAGS:
            raise ValueError(f"load tag must be one of {LOAD_TAGS}, got {self.tag!r}")

    def __str__(self) -> str:
        return f"{self.reg}:=[{self.addr}]_{self.tag}"

    @property
    def sort_key(self) -> tuple:
        return (1, self.tag, self.reg, self.addr)

    @property
    def is_acquire(self) -> bool:
        return self.tag == "acquire"


@dataclass(frozen=True)
class Store:
    """``[addr]_tag := bit``."""

    tag: str
    addr: str
    bit: int

    def __post_init__(self) -> None:
        if self.tag not in STORE_TAGS:
            raise ValueError(f"store tag must be one of {STORE_TAGS}, got {self.tag!r}")
        if self.bit not in (0, 1):
            raise ValueError(f"store bit must be 0 or 1, got {self.bit!r}")

    def __str__(self) -> str:
        return f"[{self.addr}]_{self.tag}:={self.bit}"

    @property
    def sort_key(self) -> tuple:
        return (2, self.tag, self.addr, str(self.bit))

    @property
    def is_release(self) -> bool:
        return self.tag == "release"


Label = Opaque | Load | Store


def as_label(value: Label | str) -> Label:
    if isinstance(value, (Opaque, Load, Store)):
        return value
    if isinstance(value, str):
        return Opaque(value)
    raise TypeError(f"cannot use {value!r} as a label")


class Join(str, Enum):
    SEQ = "seq"
    PAR = "par"


def _popcount(mask: int) -> int:
    return bin(mask).count("1")


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class PartialString:
    """A finite labelled partial order.

    ``edges`` is any acyclic relation on ``range(len(labels))``; the order is
    its reflexive-transitive closure.  Two partial strings compare equal when
    their labels and closures coincide component-wise (names are display only).
    """

    __slots__ = ("labels", "edges", "names", "_up", "_down", "_topo")

    def __init__(
        self,
        labels: Iterable[Label | str],
        edges: Iterable[tuple[int, int]] = (),
        names: Sequence[str] | None = None,
    ) -> None:
        self.labels: tuple[Label, ...] = tuple(as_label(lab) for lab in labels)
        n = len(self.labels)
        self.edges: frozenset[tuple[int, int]] = frozenset((int(a), int(b)) for a, b in edges)
        for a, b in self.edges:
            if not (0 <= a < n and 0 <= b < n):
                raise ValueError(f"edge ({a}, {b}) mentions an unknown event")
        if names is not None:
            names = tuple(str(s) for s in names)
            if len(names) != n or len(set(names)) != n:
                raise ValueError("names must be unique and one per event")
        self.names: tuple[str, ...] | None = names

        regs = {lab.reg for lab in self.labels if isinstance(lab, Load)}
        addrs = {lab.addr for lab in self.labels if isinstance(lab, (Load, Store))}
        clash = regs & addrs
        if clash:
            raise ValueError(f"names used both as register and address: {sorted(clash)}")

        succs: list[list[int]] = [[] for _ in range(n)]
        indeg = [0] * n
        for a, b in sorted(self.edges):
            succs[a].append(b)
            indeg[b] += 1
        # Kahn's algorithm, smallest index first so the order is deterministic
        ready = [i for i in range(n) if indeg[i] == 0]
        topo: list[int] = []
        while ready:
            i = min(ready)
            ready.remove(i)
            topo.append(i)
            for j in succs[i]:
                indeg[j] -= 1
                if indeg[j] == 0:
                    ready.append(j)
        if len(topo) != n:
            raise CycleError("edge relation is cyclic")
        up = [0] * n
        for i in reversed(topo):
            mask = 1 << i
            for j in succs[i]:
                mask |= up[j]
            up[i] = mask
        down = [0] * n
        for i in range(n):
            for j in _bits(up[i]):
                down[j] |= 1 << i
        self._up = tuple(up)
        self._down = tuple(down)
        self._topo = tuple(topo)

    # -- basic queries ----------------------------------------------------

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def events(self) -> range:
        return range(len(self.labels))

    @property
    def up_masks(self) -> tuple[int, ...]:
        """``up_masks[e]`` has bit ``f`` set iff ``e ⪯ f``."""
        return self._up

    @property
    def down_masks(self) -> tuple[int, ...]:
        """``down_masks[e]`` has bit ``f`` set iff ``f ⪯ e``."""
        return self._down

    def leq(self, a: int, b: int) -> bool:
        return bool((self._up[a] >> b) & 1)

    def lt(self, a: int, b: int) -> bool:
        return a != b and self.leq(a, b)

    def comparable(self, a: int, b: int) -> bool:
        return self.leq(a, b) or self.leq(b, a)

    def order_pairs(self) -> list[tuple[int, int]]:
        """All strict pairs ``(a, b)`` with ``a ≺ b``."""
        return [(a, b) for a in self.events for b in _bits(self._up[a] & ~(1 << a))]

    def n_order_pairs(self) -> int:
        return sum(_popcount(m) for m in self._up) - len(self)

    def covering_edges(self) -> list[tuple[int, int]]:
        """The Hasse diagram: strict pairs with nothing strictly in between."""
        out = []
        for a, b in self.order_pairs():
            between = (self._up[a] & ~(1 << a)) & (self._down[b] & ~(1 << b))
            if not between:
                out.append((a, b))
        return out

    def immediate_predecessors(self, b: int) -> list[int]:
        return [a for a, c in self.covering_edges() if c == b]

    def topological_order(self) -> tuple[int, ...]:
        return self._topo

    def minimal(self) -> list[int]:
        return [e for e in self.events if self._down[e] == 1 << e]

    def maximal(self) -> list[int]:
        return [e for e in self.events if self._up[e] == 1 << e]

    def is_total(self) -> bool:
        return all(self.comparable(a, b) for a, b in itertools.combinations(self.events, 2))

    def name(self, e: int) -> str:
        return self.names[e] if self.names is not None else f"e{e}"

    def index_of(self, name: str) -> int:
        if self.names is not None:
            return self.names.index(name)
        if name.startswith("e") and name[1:].isdigit() and int(name[1:]) < len(self):
            return int(name[1:])
        raise KeyError(name)

    def linear_extensions(self) -> Iterator[tuple[int, ...]]:
        """Every total order of the events compatible with the partial order."""
        n = len(self)
        full = (1 << n) - 1

        def rec(placed: int, prefix: list[int]) -> Iterator[tuple[int, ...]]:
            if placed == full:
                yield tuple(prefix)
                return
            for e in range(n):
                if not (placed >> e) & 1 and (self._down[e] & ~(1 << e)) & ~placed == 0:
                    prefix.append(e)
                    yield from rec(placed | (1 << e), prefix)
                    prefix.pop()

        yield from rec(0, [])

    # -- derived strings ------------------------------------------------

    def with_edge(self, a: int, b: int) -> PartialString:
        """Add ``a ⪯ b``; raises :class:`CycleError` when ``b ≺ a`` already."""
        return PartialString(self.labels, self.edges | {(a, b)}, self.names)

    def with_order(self, pairs: Iterable[tuple[int, int]]) -> PartialString:
        return PartialString(self.labels, self.edges | set(pairs), self.names)

    def reduced(self) -> PartialString:
        """Same order, edges replaced by the covering relation."""
        return PartialString(self.labels, self.covering_edges(), self.names)

    def permuted(self, perm: Sequence[int]) -> PartialString:
        """Rename event ``e`` to ``perm[e]``; the result is isomorphic to ``self``."""
        inv = [0] * len(perm)
        for old, new in enumerate(perm):
            inv[new] = old
        labels = [self.labels[inv[i]] for i in range(len(perm))]
        names = None if self.names is None else [self.names[inv[i]] for i in range(len(perm))]
        return PartialString(labels, {(perm[a], perm[b]) for a, b in self.edges}, names)

    # -- invariants used for hashing up to isomorphism ----------------------

    def profile(self) -> tuple:
        """Isomorphism invariant: sorted (label, |down|, |up|) multiset."""
        return tuple(
            sorted(
                (lab.sort_key, _popcount(self._down[e]), _popcount(self._up[e]))
                for e, lab in enumerate(self.labels)
            )
        )

    def canonical(self) -> tuple:
        """Exact isomorphism-class key.

        Events are first split into classes by colour refinement over labels
        and the covering relation; the key is the lexicographically least
        closure encoding over all orderings that respect the classes.
        """
        n = len(self)
        if n == 0:
            return ((), ())
        cover = self.covering_edges()
        preds: list[list[int]] = [[] for _ in range(n)]
        succs: list[list[int]] = [[] for _ in range(n)]
        for a, b in cover:
            preds[b].append(a)
            succs[a].append(b)
        colour: list = [
            (lab.sort_key, _popcount(self._down[e]), _popcount(self._up[e]))
            for e, lab in enumerate(self.labels)
        ]
        n_classes = len(set(colour))
        while True:
            sig = [
                (colour[e], tuple(sorted(colour[p] for p in preds[e])), tuple(sorted(colour[s] for s in succs[e])))
                for e in range(n)
            ]
            ranks = {s: i for i, s in enumerate(sorted(set(sig)))}
            new = [ranks[s] for s in sig]
            # keep the label inside the colour so keys stay comparable across strings
            colour = [(self.labels[e].sort_key, new[e]) for e in range(n)]
            if len(set(new)) == n_classes:
                break
            n_classes = len(set(new))
        groups: dict = {}
        for e in range(n):
            groups.setdefault(colour[e], []).append(e)
        keys = sorted(groups)
        label_part = tuple(k[0] for k in keys for _ in groups[k])
        colour_part = tuple(k for k in keys for _ in groups[k])
        best = None
        for choice in itertools.product(*(itertools.permutations(groups[k]) for k in keys)):
            order = [e for part in choice for e in part]
            pos = {e: i for i, e in enumerate(order)}
            enc = tuple(sum(1 << pos[f] for f in _bits(self._up[e])) for e in order)
            if best is None or enc < best:
                best = enc
        return (label_part, colour_part, best)

    # -- dunder ---------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PartialString):
            return NotImplemented
        return self.labels == other.labels and self._up == other._up

    def __hash__(self) -> int:
        return hash((self.labels, self._up))

    def __repr__(self) -> str:
        labels = ", ".join(str(lab) for lab in self.labels)
        order = ", ".join(f"{a}<{b}" for a, b in self.covering_edges())
        return f"PartialString([{labels}], order=[{order}])"


EMPTY = PartialString(())


def singleton(label: Label | str) -> PartialString:
    return PartialString((label,))


def chain(*labels: Label | str) -> PartialString:
    return PartialString(labels, [(i, i + 1) for i in range(len(labels) - 1)])


def antichain(*labels: Label | str) -> PartialString:
    return PartialString(labels)


def _merged_names(x: PartialString, y: PartialString) -> list[str] | None:
    if x.names is None and y.names is None:
        return None
    left = [x.name(e) for e in x.events]
    taken = set(left)
    right = []
    for e in y.events:
        name = y.name(e)
        while name in taken:
            name += "'"
        taken.add(name)
        right.append(name)
    return left + right


def _disjoint_union(x: PartialString, y: PartialString, cross: Iterable[tuple[int, int]]) -> PartialString:
    k = len(x)
    edges = set(x.edges)
    edges.update((a + k, b + k) for a, b in y.edges)
    edges.update(cross)
    return PartialString(x.labels + y.labels, edges, _merged_names(x, y))


def seq_compose(x: PartialString, y: PartialString) -> PartialString:
    """``x ; y``: every event of ``x`` happens before every event of ``y``."""
    k = len(x)
    # maximal(x) x minimal(y) generates the full E_x x E_y block under closure
    cross = [(a, b + k) for a in x.maximal() for b in y.minimal()]
    return _disjoint_union(x, y, cross)


def par_compose(x: PartialString, y: PartialString) -> PartialString:
    """``x ∥ y``: disjoint union with no cross edges."""
    return _disjoint_union(x, y, ())


def compose(x: PartialString, y: PartialString, join: Join | str) -> PartialString:
    return seq_compose(x, y) if Join(join) is Join.SEQ else par_compose(x, y)


def power(x: PartialString, n: int, join: Join | str) -> PartialString:
    """``n`` copies of ``x`` joined by ``join``; ``n == 0`` gives the empty string."""
    if n < 0:
        raise ValueError("power needs n >= 0")
    result = EMPTY
    for _ in range(n):
        result = compose(x, result, join)
    return result


def size(x: PartialString) -> int:
    return len(x)


def is_isomorphic(x: PartialString, y: PartialString) -> bool:
    """Mutual refinement; for finite strings this is label-preserving order isomorphism."""
    if len(x) != len(y) or x.profile() != y.profile() or x.n_order_pairs() != y.n_order_pairs():
        return False
    from .refine import refines

    return refines(x, y) and refines(y, x)
