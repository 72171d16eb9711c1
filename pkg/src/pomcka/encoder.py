"""Partial-order constraint encodings of release/acquire consistency for BMC.

Both encodings give every event an integer clock; ``clk_a < clk_b`` stands
for "a happens before b".  Over a program-order skeleton they differ in how
reads are tied to writes:

* ``cubic``: a boolean ``rf_l_s`` per (acquire, release) pair on one address
  and a from-read implication for every (acquire, release, release) triple.
* ``quadratic``: one integer selector ``w_l`` per acquire, equal to the clock
  of the release it reads from, bounded below by every release that happens
  before the acquire.  No triple is ever instantiated.

Only acquires and releases produce read/write constraints; plain accesses
contribute program order alone.
"""

from __future__ import annotations

import itertools
import math
import re
import statistics
from collections import Counter
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from typing import Literal, Union

from .core import Load, Opaque, PartialString, Store, antichain, chain, par_compose
from .errors import BoundExceeded, OpaqueLabelError
from .memory import address, addresses, loads, stores, with_initializers

Encoding = Literal["cubic", "quadratic"]
TAGS = ("po", "rf-some", "sw", "wc", "fr", "wrc")

# -- terms ------------------------------------------------------------------


@dataclass(frozen=True)
class Lt:
    a: str
    b: str

    def smt(self) -> str:
        return f"(< {self.a} {self.b})"

    def text(self) -> str:
        return f"{self.a} < {self.b}"

    def eval(self, env: Mapping) -> bool:
        return env[self.a] < env[self.b]


@dataclass(frozen=True)
class Le:
    a: str
    b: str

    def smt(self) -> str:
        return f"(<= {self.a} {self.b})"

    def text(self) -> str:
        return f"{self.a} <= {self.b}"

    def eval(self, env: Mapping) -> bool:
        return env[self.a] <= env[self.b]


@dataclass(frozen=True)
class Eq:
    a: str
    b: str

    def smt(self) -> str:
        return f"(= {self.a} {self.b})"

    def text(self) -> str:
        return f"{self.a} = {self.b}"

    def eval(self, env: Mapping) -> bool:
        return env[self.a] == env[self.b]


@dataclass(frozen=True)
class Var:
    name: str

    def smt(self) -> str:
        return self.name

    def text(self) -> str:
        return self.name

    def eval(self, env: Mapping) -> bool:
        return bool(env[self.name])


@dataclass(frozen=True)
class Not:
    arg: "Term"

    def smt(self) -> str:
        return f"(not {self.arg.smt()})"

    def text(self) -> str:
        return f"!({self.arg.text()})"

    def eval(self, env: Mapping) -> bool:
        return not self.arg.eval(env)


@dataclass(frozen=True)
class And:
    args: tuple["Term", ...]

    def smt(self) -> str:
        if not self.args:
            return "true"
        if len(self.args) == 1:
            return self.args[0].smt()
        return "(and " + " ".join(a.smt() for a in self.args) + ")"

    def text(self) -> str:
        return " & ".join(f"({a.text()})" for a in self.args) if self.args else "true"

    def eval(self, env: Mapping) -> bool:
        return all(a.eval(env) for a in self.args)


@dataclass(frozen=True)
class Or:
    args: tuple["Term", ...]

    def smt(self) -> str:
        if not self.args:
            return "false"
        if len(self.args) == 1:
            return self.args[0].smt()
        return "(or " + " ".join(a.smt() for a in self.args) + ")"

    def text(self) -> str:
        return " | ".join(f"({a.text()})" for a in self.args) if self.args else "false"

    def eval(self, env: Mapping) -> bool:
        return any(a.eval(env) for a in self.args)


@dataclass(frozen=True)
class Implies:
    lhs: "Term"
    rhs: "Term"

    def smt(self) -> str:
        return f"(=> {self.lhs.smt()} {self.rhs.smt()})"

    def text(self) -> str:
        return f"({self.lhs.text()}) -> ({self.rhs.text()})"

    def eval(self, env: Mapping) -> bool:
        return (not self.lhs.eval(env)) or self.rhs.eval(env)


Term = Union[Lt, Le, Eq, Var, Not, And, Or, Implies]

# -- input ------------------------------------------------------------------

_SYMBOL = re.compile(r"[^A-Za-z0-9_.]")


@dataclass
class EncodingInput:
    """A program-order skeleton over memory-access events.

    With ``init=True`` one initializer release per address is prepended
    (see :func:`pomcka.memory.with_initializers`).
    """

    skeleton: PartialString
    init: bool = True
    events: PartialString = field(init=False)
    inits: dict[str, int] = field(init=False)

    def __post_init__(self) -> None:
        for e, lab in enumerate(self.skeleton.labels):
            if isinstance(lab, Opaque):
                raise OpaqueLabelError(f"event {self.skeleton.name(e)} has opaque label {lab}")
        if self.init:
            self.events, self.inits = with_initializers(self.skeleton)
        else:
            self.events, self.inits = self.skeleton, {}

    def acquires(self, addr: str) -> list[int]:
        return [l for l in loads(self.events, "sync") if address(self.events, l) == addr]

    def releases(self, addr: str) -> list[int]:
        return [s for s in stores(self.events, "sync") if address(self.events, s) == addr]

    def addresses(self) -> list[str]:
        return addresses(self.events)


@dataclass
class Formula:
    encoding: str
    input: EncodingInput
    clocks: dict[int, str]
    selectors: dict[int, str]
    rf_vars: dict[tuple[int, int], str]
    constraints: list[tuple[str, Term]]

    @property
    def int_vars(self) -> list[str]:
        return list(self.clocks.values()) + list(self.selectors.values())

    @property
    def bool_vars(self) -> list[str]:
        return list(self.rf_vars.values())

    def tagged(self, tag: str) -> list[Term]:
        return [t for g, t in self.constraints if g == tag]


def _clock_names(x: PartialString) -> dict[int, str]:
    names: dict[int, str] = {}
    taken: set[str] = set()
    for e in x.events:
        base = _SYMBOL.sub("_", x.name(e))
        nm = base
        if nm in taken:
            nm = f"{base}_{e}"
        taken.add(nm)
        names[e] = nm
    return names


def _common(inp: EncodingInput) -> tuple[dict[int, str], list[tuple[str, Term]]]:
    x = inp.events
    short = _clock_names(x)
    clocks = {e: f"clk_{short[e]}" for e in x.events}
    cons: list[tuple[str, Term]] = [("po", Lt(clocks[a], clocks[b])) for a, b in x.covering_edges()]
    return clocks, cons


def _wc(inp: EncodingInput, clocks: Mapping[int, str]) -> list[tuple[str, Term]]:
    out = []
    for a in inp.addresses():
        for s, t in itertools.combinations(inp.releases(a), 2):
            out.append(("wc", Or((Lt(clocks[s], clocks[t]), Lt(clocks[t], clocks[s])))))
    return out


def encode_cubic(inp: EncodingInput) -> Formula:
    """Read-from booleans plus the from-read axiom instantiated on every triple."""
    clocks, cons = _common(inp)
    short = {e: c[4:] for e, c in clocks.items()}
    rf_vars: dict[tuple[int, int], str] = {}
    for a in inp.addresses():
        rels = inp.releases(a)
        for l in inp.acquires(a):
            for s in rels:
                rf_vars[(l, s)] = f"rf_{short[l]}_{short[s]}"
    for a in inp.addresses():
        rels = inp.releases(a)
        for l in inp.acquires(a):
            choices = [Var(rf_vars[(l, s)]) for s in rels]
            cons.append(("rf-some", Or(tuple(choices))))
            cons.extend(("rf-some", Not(And((u, v)))) for u, v in itertools.combinations(choices, 2))
            for s in rels:
                cons.append(("sw", Implies(Var(rf_vars[(l, s)]), Lt(clocks[s], clocks[l]))))
    cons.extend(_wc(inp, clocks))
    for a in inp.addresses():
        rels = inp.releases(a)
        for l in inp.acquires(a):
            for s, t in itertools.permutations(rels, 2):
                cons.append(("fr", Implies(And((Var(rf_vars[(l, s)]), Lt(clocks[s], clocks[t]))),
                                           Lt(clocks[l], clocks[t]))))
    return Formula("cubic", inp, clocks, {}, rf_vars, cons)


def encode_quadratic(inp: EncodingInput) -> Formula:
    """One selector per acquire standing for the greatest release before it."""
    clocks, cons = _common(inp)
    selectors: dict[int, str] = {}
    for a in inp.addresses():
        for l in inp.acquires(a):
            selectors[l] = "w_" + clocks[l][4:]
    for a in inp.addresses():
        rels = inp.releases(a)
        for l in inp.acquires(a):
            w = selectors[l]
            cons.append(("rf-some", Or(tuple(Eq(w, clocks[s]) for s in rels))))
            cons.append(("sw", Lt(w, clocks[l])))
    cons.extend(_wc(inp, clocks))
    for a in inp.addresses():
        rels = inp.releases(a)
        for l in inp.acquires(a):
            for t in rels:
                cons.append(("wrc", Implies(Lt(clocks[t], clocks[l]), Le(clocks[t], selectors[l]))))
    return Formula("quadratic", inp, clocks, selectors, {}, cons)


def encode(skeleton: PartialString, encoding: Encoding = "quadratic", init: bool = True) -> Formula:
    inp = EncodingInput(skeleton, init)
    if encoding == "cubic":
        return encode_cubic(inp)
    if encoding == "quadratic":
        return encode_quadratic(inp)
    raise ValueError(f"unknown encoding {encoding!r}")


# -- census -----------------------------------------------------------------


@dataclass
class Census:
    encoding: str
    counts: dict[str, int]
    predicted: dict[str, int]

    @property
    def matches(self) -> bool:
        return all(self.counts.get(t, 0) == n for t, n in self.predicted.items())

    def to_dict(self) -> dict:
        return {"encoding": self.encoding, "counts": self.counts, "predicted": self.predicted,
                "matches": self.matches}


def count_constraints(f: Formula) -> Census:
    """Per-tag constraint counts next to their closed-form predictions."""
    counted = Counter(tag for tag, _ in f.constraints)
    counts = {t: counted.get(t, 0) for t in TAGS}
    inp = f.input
    po = len(inp.events.covering_edges())
    wc = sw = fr = wrc = rf_some = 0
    for a in inp.addresses():
        n_acq, n_rel = len(inp.acquires(a)), len(inp.releases(a))
        wc += math.comb(n_rel, 2)
        if f.encoding == "cubic":
            sw += n_acq * n_rel
            fr += n_acq * n_rel * (n_rel - 1)
            rf_some += n_acq * (1 + math.comb(n_rel, 2))
        else:
            sw += n_acq
            wrc += n_acq * n_rel
            rf_some += n_acq
    predicted = {"po": po, "rf-some": rf_some, "sw": sw, "wc": wc, "fr": fr, "wrc": wrc}
    return Census(f.encoding, counts, predicted)


def growth_exponent(ns: list[int], counts: list[int]) -> float:
    """Least-squares slope of ``log count`` against ``log n``."""
    slope, _ = statistics.linear_regression([math.log(n) for n in ns], [math.log(c) for c in counts])
    return slope


# -- brute force ------------------------------------------------------------

MAX_BRUTE_EVENTS = 9


def _clock_assignments(f: Formula, all_permutations: bool) -> Iterator[dict[str, int]]:
    x = f.input.events
    orders: Iterable[tuple[int, ...]]
    orders = itertools.permutations(x.events) if all_permutations else x.linear_extensions()
    for order in orders:
        yield {f.clocks[e]: i + 1 for i, e in enumerate(order)}


def _choices(f: Formula) -> list[tuple[int, list[int]]]:
    inp = f.input
    return [(l, inp.releases(a)) for a in inp.addresses() for l in inp.acquires(a)]


def models(f: Formula, all_permutations: bool = False) -> Iterator[tuple[dict[str, int], dict[int, int]]]:
    """Satisfying assignments with pairwise distinct clocks.

    Yields the clock environment and the induced read-from (acquire index to
    release index).  Clock orders range over linear extensions of the
    skeleton unless ``all_permutations`` is set.
    """
    if len(f.input.events) > MAX_BRUTE_EVENTS:
        raise BoundExceeded(f"brute force limited to {MAX_BRUTE_EVENTS} events")
    picks = _choices(f)
    terms = [t for _, t in f.constraints]
    for clocks in _clock_assignments(f, all_permutations):
        for choice in itertools.product(*(rels for _, rels in picks)):
            env: dict = dict(clocks)
            rf = {l: s for (l, _), s in zip(picks, choice)}
            if f.encoding == "cubic":
                for (l, s), name in f.rf_vars.items():
                    env[name] = rf[l] == s
            else:
                for l, s in rf.items():
                    env[f.selectors[l]] = clocks[f.clocks[s]]
            if all(t.eval(env) for t in terms):
                yield clocks, rf


def is_satisfiable(f: Formula) -> bool:
    return next(models(f), None) is not None


def equisat_check(inp: EncodingInput) -> bool:
    """Both encodings satisfiable, or both unsatisfiable, by exhaustive search."""
    if len(inp.events) > MAX_BRUTE_EVENTS:
        raise BoundExceeded(f"equisat brute force limited to {MAX_BRUTE_EVENTS} events, got {len(inp.events)}")
    return is_satisfiable(encode_cubic(inp)) == is_satisfiable(encode_quadratic(inp))


# -- emission ---------------------------------------------------------------


def emit(f: Formula, fmt: Literal["smt2", "text"] = "smt2") -> bytes:
    x = f.input.events
    lines: list[str]
    if fmt == "smt2":
        lines = [f"; pomcka encoding={f.encoding} events={len(x)} initializers={len(f.input.inits)}",
                 "(set-logic QF_LIA)"]
        for e, c in f.clocks.items():
            lines.append(f"; {c} {x.labels[e]}")
            lines.append(f"(declare-fun {c} () Int)")
        for w in f.selectors.values():
            lines.append(f"(declare-fun {w} () Int)")
        for r in f.rf_vars.values():
            lines.append(f"(declare-fun {r} () Bool)")
        for tag, term in f.constraints:
            lines.append(f"; tag={tag}")
            lines.append(f"(assert {term.smt()})")
        lines.append("(check-sat)")
        lines.append("(exit)")
    elif fmt == "text":
        lines = [f"# {f.encoding} encoding, {len(x)} events"]
        for e, c in f.clocks.items():
            lines.append(f"# {c}: {x.labels[e]}")
        lines.extend(f"[{tag}] {term.text()}" for tag, term in f.constraints)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return ("\n".join(lines) + "\n").encode("utf-8")


# -- benchmark skeletons ------------------------------------------------------


def star_skeleton(n: int, addr: str = "a") -> PartialString:
    """``n`` threads, each a release on ``addr`` followed by an acquire of it."""
    threads = [chain(Store("release", addr, 1), Load("acquire", f"r{i}", addr)) for i in range(n)]
    result = antichain()
    for t in threads:
        result = par_compose(result, t)
    return result
