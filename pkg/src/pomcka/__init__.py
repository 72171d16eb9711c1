"""Partial-string (pomset) semantics, weak-memory axioms and BMC encodings."""

from .core import (
    EMPTY,
    Join,
    Label,
    Load,
    Opaque,
    PartialString,
    Store,
    antichain,
    chain,
    is_isomorphic,
    par_compose,
    power,
    seq_compose,
    singleton,
    size,
)
from .errors import (
    BoundExceeded,
    CycleError,
    MalformedRf,
    OpaqueLabelError,
    ParseError,
    PomsetError,
    PreconditionError,
)
from .program import ONE, ZERO, Program, enumerate_closure, prog_compose, prog_refines, prog_union
from .refine import find_morphism, refines

__version__ = "0.1.0"
