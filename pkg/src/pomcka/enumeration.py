"""Exhaustive generators of small partial strings, one per isomorphism class."""

from __future__ import annotations

import itertools
from collections.abc import Iterator, Sequence
from functools import lru_cache

from .core import Label, PartialString, antichain, chain, par_compose


def _down_sets(x: PartialString) -> Iterator[int]:
    """Bitmasks of all down-closed subsets of ``x``."""
    n = len(x)
    downs = x.down_masks
    for mask in range(1 << n):
        if all(downs[e] & ~mask == 0 for e in range(n) if (mask >> e) & 1):
            yield mask


@lru_cache(maxsize=None)
def shapes(n: int) -> tuple[PartialString, ...]:
    """Unlabelled posets on ``n`` points up to isomorphism.

    Every poset on ``n`` points arises from one on ``n - 1`` points by adding
    a maximal element above some down-set.
    """
    if n == 0:
        return (PartialString(()),)
    out: dict = {}
    for base in shapes(n - 1):
        for mask in _down_sets(base):
            labels = ("*",) * n
            edges = set(base.edges) | {(e, n - 1) for e in range(n - 1) if (mask >> e) & 1}
            ps = PartialString(labels, edges).reduced()
            out.setdefault(ps.canonical(), ps)
    return tuple(out[k] for k in sorted(out))


def labelled_posets(n: int, alphabet: Sequence[Label]) -> Iterator[PartialString]:
    """Every partial string with ``n`` events over ``alphabet``, once per isomorphism class."""
    for shape in shapes(n):
        seen: set = set()
        for labels in itertools.product(alphabet, repeat=n):
            ps = PartialString(labels, shape.edges)
            key = ps.canonical()
            if key not in seen:
                seen.add(key)
                yield ps


def thread_skeletons(n: int, alphabet: Sequence[Label]) -> Iterator[PartialString]:
    """Parallel compositions of sequential threads with ``n`` events in total.

    Each skeleton is a multiset of label sequences, so no two results are
    isomorphic.
    """
    for parts in _partitions(n):
        by_len: dict[int, int] = {}
        for p in parts:
            by_len[p] = by_len.get(p, 0) + 1
        per_len = []
        for length, mult in sorted(by_len.items()):
            seqs = list(itertools.product(alphabet, repeat=length))
            per_len.append(list(itertools.combinations_with_replacement(seqs, mult)))
        for pick in itertools.product(*per_len):
            result = antichain()
            for group in pick:
                for seq in group:
                    result = par_compose(result, chain(*seq))
            yield result


def _partitions(n: int, largest: int | None = None) -> Iterator[tuple[int, ...]]:
    if n == 0:
        yield ()
        return
    largest = n if largest is None else largest
    for k in range(min(n, largest), 0, -1):
        for rest in _partitions(n - k, k):
            yield (k, *rest)
