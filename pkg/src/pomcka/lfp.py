"""Kleene-star approximations and the bounded star-refinement procedure.

For elementary programs with no empty generator in ``Y``,
``X^⋈ ⊆ Y^⋈`` reduces to ``X ⊆ ⋃_{k ≤ n} Y^{k·⋈}`` with
``n = ℓ_X // ℓ_Y`` (largest generator of ``X`` over smallest of ``Y``):
refinement is a bijection, so a string of size ``ℓ_X`` can only live in an
iterate whose strings have exactly that many events.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import Join
from .errors import PreconditionError
from .program import ONE, Program, prog_compose, prog_refines, prog_union


def n_iterated(P: Program, n: int, join: Join | str) -> Program:
    """``P^{0·⋈} = 1`` and ``P^{(k+1)·⋈} = P ⋈ P^{k·⋈}``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    result = ONE
    for _ in range(n):
        result = prog_compose(P, result, join)
    return result


def lfp_approx(P: Program, n: int, join: Join | str) -> Program:
    """``⋃_{k=0..n} P^{k·⋈}``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    acc = ONE
    power = ONE
    for _ in range(n):
        power = prog_compose(P, power, join)
        acc = prog_union(acc, power)
    return acc


@dataclass(frozen=True)
class LfpQuery:
    X: Program
    Y: Program
    join: Join
    l_x: int
    l_y: int
    n: int
    verdict: bool


def lfp_query(X: Program, Y: Program, join: Join | str) -> LfpQuery:
    """Decide ``X^⋈ ⊆ Y^⋈`` and report the bound that was used."""
    join = Join(join)
    if X.is_zero:
        return LfpQuery(X, Y, join, 0, min(Y.sizes(), default=0), 0, True)
    if Y.is_zero:
        raise PreconditionError("Y must be a nonempty program")
    l_y = min(Y.sizes())
    if l_y == 0:
        raise PreconditionError("Y contains the empty partial string (the ⋈-identity 1)")
    l_x = max(X.sizes())
    n = l_x // l_y
    return LfpQuery(X, Y, join, l_x, l_y, n, prog_refines(X, lfp_approx(Y, n, join)))


def lfp_refines(X: Program, Y: Program, join: Join | str) -> bool:
    """``X^⋈ ⊆ Y^⋈``; equivalently ``X ⊆ Y^⋈`` (left star elimination)."""
    return lfp_query(X, Y, join).verdict


def in_star(X: Program, Y: Program, join: Join | str) -> bool:
    """One-sided form ``X ⊆ Y^⋈``; same bounded test as :func:`lfp_refines`."""
    return lfp_query(X, Y, join).verdict


def equal_size_shortcut(X: Program, Y: Program, join: Join | str) -> bool:
    """When every generator of ``X`` and ``Y`` has one common size, ``X^⋈ ⊆ Y^⋈`` iff ``X ⊆ Y``."""
    Join(join)
    sizes = set(X.sizes()) | set(Y.sizes())
    if len(sizes) > 1:
        raise PreconditionError(f"generators have differing sizes {sorted(sizes)}")
    return prog_refines(X, Y)

