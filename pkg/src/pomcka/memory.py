"""Release/acquire semantics over partial strings of memory accesses.

Axioms are evaluated on a single partial string together with a read-from
map.  By default (``scope="sync"``) only acquires and releases take part,
which is the setting in which SC-relaxed strings coincide with the
synchronizes-with + write-coherence + from-read conjunction.  ``scope="all"``
evaluates the same definitions over every load and store.

A load may read from :data:`BOTTOM`, the initial value.  It behaves like a
store placed before every event, so the axioms stay meaningful for loads that
have no store before them.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterator, Mapping
from dataclasses import dataclass, field
from typing import Literal

from .core import Load, PartialString, Store
from .errors import MalformedRf, PreconditionError
from .program import Program, enumerate_closure

Scope = Literal["sync", "all"]


class _Bottom:
    __slots__ = ()

    def __repr__(self) -> str:
        return "bottom"

    def __reduce__(self):
        return "BOTTOM"


BOTTOM = _Bottom()

Target = int | _Bottom


def address(x: PartialString, e: int) -> str | None:
    lab = x.labels[e]
    return lab.addr if isinstance(lab, (Load, Store)) else None


def loads(x: PartialString, scope: Scope = "all") -> list[int]:
    return [
        e for e, lab in enumerate(x.labels)
        if isinstance(lab, Load) and (scope == "all" or lab.is_acquire)
    ]


def stores(x: PartialString, scope: Scope = "all") -> list[int]:
    return [
        e for e, lab in enumerate(x.labels)
        if isinstance(lab, Store) and (scope == "all" or lab.is_release)
    ]


def addresses(x: PartialString) -> list[str]:
    return sorted({address(x, e) for e in x.events} - {None})


def _leq(x: PartialString, a: Target, b: Target) -> bool:
    if a is BOTTOM:
        return True
    if b is BOTTOM:
        return False
    return x.leq(a, b)


def _lt(x: PartialString, a: Target, b: Target) -> bool:
    return a is not b and _leq(x, a, b)


@dataclass(frozen=True)
class RfMap:
    """Read-from: each load mapped to a store on its address, or :data:`BOTTOM`."""

    targets: Mapping[int, Target] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "targets", dict(sorted(self.targets.items())))

    def __getitem__(self, load: int) -> Target:
        return self.targets[load]

    def __iter__(self):
        return iter(self.targets)

    def items(self):
        return self.targets.items()

    def __hash__(self) -> int:
        return hash(tuple(self.targets.items()))


def _require_load(x: PartialString, l: int) -> Load:
    lab = x.labels[l]
    if not isinstance(lab, Load):
        raise PreconditionError(f"event {x.name(l)} is not a load")
    return lab


def hb_stores(x: PartialString, l: int, scope: Scope = "all") -> frozenset[int]:
    """Stores on ``l``'s address that happen before (or equal) ``l``."""
    lab = _require_load(x, l)
    if scope == "sync" and not lab.is_acquire:
        scope = "all"
    return frozenset(s for s in stores(x, scope) if address(x, s) == lab.addr and x.leq(s, l))


def lub_hb_stores(x: PartialString, l: int, scope: Scope = "all") -> Target | None:
    """The ⪯-greatest element of :func:`hb_stores`.

    Returns :data:`BOTTOM` for an empty set and ``None`` when several
    maximal stores are incomparable.
    """
    hb = hb_stores(x, l, scope)
    if not hb:
        return BOTTOM
    top = [s for s in hb if not any(x.lt(s, t) for t in hb)]
    return top[0] if len(top) == 1 else None


def rf_candidates(x: PartialString, l: int, scope: Scope = "sync") -> list[Target]:
    """Targets a well-formed read-from map may assign to ``l``.

    Acquires under ``scope="sync"`` read from releases; every other load may
    read from any store on its address.  :data:`BOTTOM` is admissible only
    when no candidate store happens before the load.
    """
    lab = _require_load(x, l)
    sub = "sync" if scope == "sync" and lab.is_acquire else "all"
    cands: list[Target] = [s for s in stores(x, sub) if address(x, s) == lab.addr]
    if not any(x.leq(s, l) for s in cands):
        cands.append(BOTTOM)
    return cands


def validate_rf(x: PartialString, rf: RfMap, scope: Scope = "sync") -> None:
    all_loads = loads(x, "all")
    missing = [x.name(l) for l in all_loads if l not in rf.targets]
    if missing:
        raise MalformedRf(f"read-from is not total; no source for {', '.join(missing)}")
    for l, s in rf.items():
        if not (0 <= l < len(x)) or not isinstance(x.labels[l], Load):
            raise MalformedRf(f"read-from maps non-load event {l}")
        if s is not BOTTOM:
            if not (0 <= s < len(x)) or not isinstance(x.labels[s], Store):
                raise MalformedRf(f"{x.name(l)} reads from a non-store")
            if address(x, s) != address(x, l):
                raise MalformedRf(f"{x.name(l)} and {x.name(s)} access different addresses")
        if s not in rf_candidates(x, l, scope):
            what = "bottom" if s is BOTTOM else x.name(s)
            raise MalformedRf(f"{x.name(l)} cannot read from {what}")


def all_rf_maps(x: PartialString, scope: Scope = "sync") -> Iterator[RfMap]:
    ls = loads(x, "all")
    for choice in itertools.product(*(rf_candidates(x, l, scope) for l in ls)):
        yield RfMap(dict(zip(ls, choice)))


def sc_relaxed_violations(x: PartialString) -> list[tuple]:
    out: list[tuple] = []
    rels = stores(x, "sync")
    acqs = loads(x, "sync")
    for s, t in itertools.combinations(rels, 2):
        if address(x, s) == address(x, t) and not x.comparable(s, t):
            out.append(("releases", s, t))
    for l in acqs:
        for s in rels:
            if address(x, s) == address(x, l) and not x.comparable(l, s):
                out.append(("acquire-release", l, s))
    return out


def is_sc_relaxed(x: PartialString) -> bool:
    """Per address: releases form a chain and each acquire is comparable to each release."""
    return not sc_relaxed_violations(x)


@dataclass
class AxiomReport:
    sw: bool
    wc: bool
    fr: bool
    weak_rc: bool
    strong_rc: bool
    sc_relaxed: bool
    witnesses: list[tuple] = field(default_factory=list)

    def to_dict(self, x: PartialString | None = None) -> dict:
        def show(v):
            if v is BOTTOM:
                return "bottom"
            if isinstance(v, int) and x is not None:
                return x.name(v)
            return v

        return {
            "sw": self.sw,
            "wc": self.wc,
            "fr": self.fr,
            "weak_rc": self.weak_rc,
            "strong_rc": self.strong_rc,
            "sc_relaxed": self.sc_relaxed,
            "witnesses": [[w[0], *(show(v) for v in w[1:])] for w in self.witnesses],
        }


def check_axioms(x: PartialString, rf: RfMap, scope: Scope = "sync") -> AxiomReport:
    validate_rf(x, rf, scope)
    ls = loads(x, scope)
    ss = stores(x, scope)
    wit: list[tuple] = []

    sw = True
    for l in ls:
        if not _leq(x, rf[l], l):
            sw = False
            wit.append(("sw", l, rf[l]))

    wc = True
    for s, t in itertools.combinations(ss, 2):
        if address(x, s) == address(x, t) and not x.comparable(s, t):
            wc = False
            wit.append(("wc", s, t))

    fr = True
    for l in ls:
        s = rf[l]
        for t in ss:
            if address(x, t) == address(x, l) and _lt(x, s, t) and not x.leq(l, t):
                fr = False
                wit.append(("fr", l, s, t))

    weak = strong = True
    for l in ls:
        top = lub_hb_stores(x, l, scope)
        if top is None:
            weak = strong = False
            wit.append(("no-lub", l))
            continue
        if not _leq(x, top, rf[l]):
            weak = False
            wit.append(("weak_rc", l, rf[l], top))
        if top != rf[l]:
            strong = False
            wit.append(("strong_rc", l, rf[l], top))

    violations = sc_relaxed_violations(x)
    wit.extend(("sc_relaxed", *v) for v in violations)
    return AxiomReport(sw, wc, fr, weak, strong, not violations, wit)


def theorem3_equivalence(x: PartialString, rf: RfMap) -> bool:
    """Both characterisations of release/acquire consistency agree on ``(x, rf)``.

    Left: ``x`` is SC-relaxed and every acquire reads from the greatest
    release before it.  Right: synchronizes-with, write coherence and
    from-read hold on releases and acquires.
    """
    report = check_axioms(x, rf, "sync")
    left = report.sc_relaxed and all(rf[l] == lub_hb_stores(x, l, "sync") for l in loads(x, "sync"))
    right = report.sw and report.wc and report.fr
    return left == right


def with_initializers(x: PartialString, bit: int = 0) -> tuple[PartialString, dict[str, int]]:
    """Prepend one release per address, ordered before every event of ``x``.

    Returns the new string and the index of each address's initializer.
    Events of ``x`` are shifted by the number of addresses.
    """
    addrs = addresses(x)
    k = len(addrs)
    labels = [Store("release", a, bit) for a in addrs] + list(x.labels)
    edges = {(a + k, b + k) for a, b in x.edges}
    edges.update((i, m + k) for i in range(k) for m in x.minimal())
    taken = {x.name(e) for e in x.events}
    init_names = []
    for a in addrs:
        nm = f"init_{a}"
        while nm in taken:
            nm += "_"
        taken.add(nm)
        init_names.append(nm)
    names = init_names + [x.name(e) for e in x.events]
    return PartialString(labels, edges, names), {a: i for i, a in enumerate(addrs)}


def lift_rf(x: PartialString, rf: RfMap, inits: Mapping[str, int]) -> RfMap:
    """Re-target an rf map of ``x`` onto ``with_initializers(x)``; bottom reads the initializer."""
    k = len(inits)
    out: dict[int, Target] = {}
    for l, s in rf.items():
        out[l + k] = inits[address(x, l)] if s is BOTTOM else s + k
    return RfMap(out)


def sc_relaxed_restrict(X: Program, max_events: int) -> list[PartialString]:
    """Members of ``↓X`` (up to isomorphism) that are SC-relaxed."""
    return [s for s in enumerate_closure(X, max_events) if is_sc_relaxed(s)]


def find_races(x: PartialString) -> list[tuple[int, int]]:
    """Unordered pairs of non-synchronizing accesses to one address, at least one a store."""
    plain = [
        e for e, lab in enumerate(x.labels)
        if isinstance(lab, (Load, Store)) and lab.tag == "none"
    ]
    races = []
    for a, b in itertools.combinations(plain, 2):
        if address(x, a) != address(x, b) or x.comparable(a, b):
            continue
        if isinstance(x.labels[a], Store) or isinstance(x.labels[b], Store):
            races.append((a, b))
    return races
