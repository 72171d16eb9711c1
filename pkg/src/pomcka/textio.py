"""Line-oriented text formats.

``.ps`` (one partial string)::

    event <id> opaque <token>
    event <id> load <none|acquire> <reg> <addr>
    event <id> store <none|release> <addr> <0|1>
    order <id> <id>

``.prog`` (a program): ``include <file.ps>`` lines and inline
``begin ps <name>`` ... ``end`` blocks holding ``.ps`` lines.

``.rf`` (a read-from map): ``rf <load-id> <store-id>`` or ``rf <load-id> bottom``.

``#`` starts a comment in all three.
"""

from __future__ import annotations

from pathlib import Path

from .core import Label, Load, Opaque, PartialString, Store
from .errors import CycleError, ParseError
from .memory import BOTTOM, RfMap, Target
from .program import Program


def _strip(line: str) -> list[str]:
    return line.split("#", 1)[0].split()


def _parse_ps_lines(lines: list[tuple[int, str]], path: str | None) -> PartialString:
    names: list[str] = []
    labels: list[Label] = []
    index: dict[str, int] = {}
    pending: list[tuple[int, str, str]] = []
    for lineno, raw in lines:
        words = _strip(raw)
        if not words:
            continue
        kind = words[0]
        if kind == "event":
            if len(words) < 3:
                raise ParseError("event needs an id and a kind", path, lineno)
            eid, what, args = words[1], words[2], words[3:]
            if eid in index:
                raise ParseError(f"duplicate event id {eid!r}", path, lineno)
            try:
                if what == "opaque" and len(args) == 1:
                    label: Label = Opaque(args[0])
                elif what == "load" and len(args) == 3:
                    label = Load(args[0], args[1], args[2])
                elif what == "store" and len(args) == 3:
                    if args[2] not in ("0", "1"):
                        raise ValueError(f"store bit must be 0 or 1, got {args[2]!r}")
                    label = Store(args[0], args[1], int(args[2]))
                else:
                    raise ValueError(f"malformed {what!r} event")
            except ValueError as exc:
                raise ParseError(str(exc), path, lineno) from None
            index[eid] = len(names)
            names.append(eid)
            labels.append(label)
        elif kind == "order":
            if len(words) != 3:
                raise ParseError("order needs exactly two event ids", path, lineno)
            pending.append((lineno, words[1], words[2]))
        else:
            raise ParseError(f"unknown directive {kind!r}", path, lineno)
    edges = []
    for lineno, a, b in pending:
        for eid in (a, b):
            if eid not in index:
                raise ParseError(f"unknown event id {eid!r} in order", path, lineno)
        edges.append((index[a], index[b]))
    try:
        return PartialString(labels, edges, names)
    except CycleError as exc:
        raise ParseError(f"order is cyclic: {exc}", path) from None
    except ValueError as exc:
        raise ParseError(str(exc), path) from None


def parse_ps(text: str, path: str | None = None) -> PartialString:
    return _parse_ps_lines(list(enumerate(text.splitlines(), 1)), path)


def load_ps(path: str | Path) -> PartialString:
    return parse_ps(Path(path).read_text(encoding="utf-8"), str(path))


def format_label(label: Label) -> str:
    if isinstance(label, Opaque):
        return f"opaque {label.token}"
    if isinstance(label, Load):
        return f"load {label.tag} {label.reg} {label.addr}"
    return f"store {label.tag} {label.addr} {label.bit}"


def dump_ps(x: PartialString) -> str:
    out = [f"event {x.name(e)} {format_label(lab)}" for e, lab in enumerate(x.labels)]
    out.extend(f"order {x.name(a)} {x.name(b)}" for a, b in sorted(x.edges))
    return "\n".join(out) + "\n"


def parse_prog(text: str, path: str | None = None, base: Path | None = None) -> Program:
    base = base if base is not None else (Path(path).parent if path else Path.cwd())
    gens: list[PartialString] = []
    block: list[tuple[int, str]] | None = None
    block_start = 0
    for lineno, raw in enumerate(text.splitlines(), 1):
        words = _strip(raw)
        if block is not None:
            if words == ["end"]:
                gens.append(_parse_ps_lines(block, path))
                block = None
            else:
                block.append((lineno, raw))
            continue
        if not words:
            continue
        if words[0] == "include" and len(words) == 2:
            target = base / words[1]
            try:
                gens.append(load_ps(target))
            except OSError as exc:
                raise ParseError(f"cannot include {words[1]}: {exc.strerror}", path, lineno) from None
        elif words[:2] == ["begin", "ps"] and len(words) == 3:
            block = []
            block_start = lineno
        else:
            raise ParseError(f"unexpected line {raw.strip()!r}", path, lineno)
    if block is not None:
        raise ParseError("unterminated begin ps block", path, block_start)
    return Program(gens)


def load_prog(path: str | Path) -> Program:
    p = Path(path)
    return parse_prog(p.read_text(encoding="utf-8"), str(p), p.parent)


def dump_prog(P: Program) -> str:
    out = []
    for i, g in enumerate(P.generators):
        out.append(f"begin ps g{i}")
        out.append(dump_ps(g).rstrip("\n"))
        out.append("end")
    return "\n".join(line for line in out if line) + "\n"


def parse_rf(text: str, x: PartialString, path: str | None = None) -> RfMap:
    """Resolve ``rf`` lines against the event ids of ``x``; structural checks only."""
    targets: dict[int, Target] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        words = _strip(raw)
        if not words:
            continue
        if words[0] != "rf" or len(words) != 3:
            raise ParseError(f"expected 'rf <load> <store|bottom>', got {raw.strip()!r}", path, lineno)
        known = {x.name(e) for e in x.events}
        for eid in (words[1], *([] if words[2] == "bottom" else [words[2]])):
            if eid not in known:
                raise ParseError(f"unknown event id {eid!r}", path, lineno)
        l = x.index_of(words[1])
        s: Target = BOTTOM if words[2] == "bottom" else x.index_of(words[2])
        if l in targets:
            raise ParseError(f"load {words[1]} mapped twice", path, lineno)
        targets[l] = s
    return RfMap(targets)


def load_rf(path: str | Path, x: PartialString) -> RfMap:
    return parse_rf(Path(path).read_text(encoding="utf-8"), x, str(path))


def dump_rf(rf: RfMap, x: PartialString) -> str:
    return "".join(
        f"rf {x.name(l)} {'bottom' if s is BOTTOM else x.name(s)}\n" for l, s in rf.items()
    )
