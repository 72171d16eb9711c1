"""Deciding partial-string refinement ``x ⊑ y``.

``x ⊑ y`` holds when some bijection ``f: E_y → E_x`` preserves labels and is
monotone (``e ⪯_y e'`` implies ``f(e) ⪯_x f(e')``), i.e. ``x`` keeps every
ordering of ``y`` and possibly adds more.  Two independent deciders are
provided: a backtracking search and a CNF encoding solved by :mod:`pomcka.sat`.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from typing import Literal

from . import sat
from .core import PartialString, _bits, _popcount

Method = Literal["backtrack", "sat"]


@dataclass(frozen=True)
class Morphism:
    """A monotone label-preserving bijection from the events of ``source`` to ``target``.

    ``mapping[e] = f(e)``; ``source`` is the coarser string ``y`` and
    ``target`` the finer string ``x`` of ``x ⊑ y``.
    """

    source: PartialString
    target: PartialString
    mapping: tuple[int, ...]

    def __post_init__(self) -> None:
        if sorted(self.mapping) != list(range(len(self.target))) or len(self.source) != len(self.target):
            raise ValueError("morphism is not a bijection")

    def is_valid(self) -> bool:
        y, x, f = self.source, self.target, self.mapping
        if any(y.labels[e] != x.labels[f[e]] for e in y.events):
            return False
        return all(x.leq(f[a], f[b]) for a, b in y.order_pairs())

    def pairs(self) -> list[tuple[str, str]]:
        return [(self.source.name(e), self.target.name(self.mapping[e])) for e in self.source.events]


def _quick_reject(x: PartialString, y: PartialString) -> bool:
    """Cheap necessary conditions for ``x ⊑ y``; True means certainly not."""
    if len(x) != len(y):
        return True
    if Counter(x.labels) != Counter(y.labels):
        return True
    if x.n_order_pairs() < y.n_order_pairs():
        return True
    # per label, the k-th largest down/up set in y cannot exceed the k-th in x
    for masks_x, masks_y in ((x.down_masks, y.down_masks), (x.up_masks, y.up_masks)):
        by_label_x: dict = {}
        by_label_y: dict = {}
        for e in x.events:
            by_label_x.setdefault(x.labels[e], []).append(_popcount(masks_x[e]))
            by_label_y.setdefault(y.labels[e], []).append(_popcount(masks_y[e]))
        for lab, ys in by_label_y.items():
            xs = sorted(by_label_x[lab], reverse=True)
            if any(a < b for a, b in zip(xs, sorted(ys, reverse=True))):
                return True
    return False


def _backtrack(x: PartialString, y: PartialString) -> tuple[int, ...] | None:
    n = len(y)
    down_x = [_popcount(m) for m in x.down_masks]
    up_x = [_popcount(m) for m in x.up_masks]
    down_y = [_popcount(m) for m in y.down_masks]
    up_y = [_popcount(m) for m in y.up_masks]
    candidates = []
    for e in y.events:
        mask = 0
        for a in x.events:
            if x.labels[a] == y.labels[e] and down_x[a] >= down_y[e] and up_x[a] >= up_y[e]:
                mask |= 1 << a
        if not mask:
            return None
        candidates.append(mask)
    preds: list[list[int]] = [[] for _ in range(n)]
    for a, b in y.covering_edges():
        preds[b].append(a)
    # topological, and among equals the most constrained first
    order = sorted(y.events, key=lambda e: (down_y[e], _popcount(candidates[e]), e))
    f = [-1] * n
    up_masks = x.up_masks

    def rec(k: int, used: int) -> bool:
        if k == n:
            return True
        e = order[k]
        allowed = candidates[e] & ~used
        for p in preds[e]:
            allowed &= up_masks[f[p]]
        for a in _bits(allowed):
            f[e] = a
            if rec(k + 1, used | (1 << a)):
                return True
        f[e] = -1
        return False

    return tuple(f) if rec(0, 0) else None


@dataclass
class CnfInstance:
    """Propositional encoding of ``x ⊑ y``.

    ``variables[(e, a)]`` is true when the morphism sends ``e ∈ E_y`` to
    ``a ∈ E_x``; only label-compatible pairs get a variable.
    """

    x: PartialString
    y: PartialString
    variables: dict[tuple[int, int], int] = field(default_factory=dict)
    clauses: list[list[int]] = field(default_factory=list)

    @property
    def n_vars(self) -> int:
        return len(self.variables)

    def to_dimacs(self) -> str:
        lines = [f"p cnf {self.n_vars} {len(self.clauses)}"]
        lines.extend(" ".join(str(lit) for lit in clause) + " 0" for clause in self.clauses)
        return "\n".join(lines) + "\n"

    def variable_map(self) -> str:
        """Sidecar text: one ``<var> <event of y> <event of x>`` line per variable."""
        rows = sorted((v, e, a) for (e, a), v in self.variables.items())
        return "".join(f"{v} {self.y.name(e)} {self.x.name(a)}\n" for v, e, a in rows)

    def solve(self) -> tuple[int, ...] | None:
        model = sat.solve(self.n_vars, self.clauses)
        if model is None:
            return None
        f = [-1] * len(self.y)
        for (e, a), v in self.variables.items():
            if model[v]:
                f[e] = a
        return tuple(f)


def emit_cnf(x: PartialString, y: PartialString) -> CnfInstance:
    inst = CnfInstance(x, y)
    if len(x) != len(y):
        inst.clauses.append([])
        return inst
    for e in y.events:
        for a in x.events:
            if y.labels[e] == x.labels[a]:
                inst.variables[(e, a)] = len(inst.variables) + 1
    var = inst.variables
    by_source = {e: [v for (s, _), v in var.items() if s == e] for e in y.events}
    by_target = {a: [v for (_, t), v in var.items() if t == a] for a in x.events}
    for group in itertools.chain(by_source.values(), by_target.values()):
        inst.clauses.append(list(group))
        inst.clauses.extend([-u, -v] for u, v in itertools.combinations(group, 2))
    for e1, e2 in y.order_pairs():
        for a in x.events:
            v1 = var.get((e1, a))
            if v1 is None:
                continue
            for b in x.events:
                v2 = var.get((e2, b))
                if v2 is not None and not x.leq(a, b):
                    inst.clauses.append([-v1, -v2])
    return inst


def find_morphism(x: PartialString, y: PartialString, method: Method = "backtrack") -> Morphism | None:
    """A witness ``f: E_y → E_x`` for ``x ⊑ y``, or ``None`` when ``x`` does not refine ``y``."""
    if method not in ("backtrack", "sat"):
        raise ValueError(f"unknown method {method!r}")
    if len(x) != len(y) or Counter(x.labels) != Counter(y.labels):
        return None
    if method == "backtrack":
        if _quick_reject(x, y):
            return None
        f = _backtrack(x, y)
    else:
        f = emit_cnf(x, y).solve()
    if f is None:
        return None
    return Morphism(y, x, f)


def refines(x: PartialString, y: PartialString, method: Method = "backtrack") -> bool:
    """``x ⊑ y``: ``x`` is at least as ordered as ``y``."""
    return find_morphism(x, y, method) is not None
