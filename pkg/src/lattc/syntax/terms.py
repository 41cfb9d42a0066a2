"""Core terms: de Bruijn indices, with a Level at every binder, application
argument, equality type and eliminator scrutinee.

Name hints and source spans never take part in equality, so ``==`` on core
terms is alpha-equivalence.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Optional

from lattc.errors import SourceSpan

NULLARY = ("Void", "Unit", "Bool", "Nat", "tt", "true", "false", "zero", "nil", "refl")
ELIMINATORS = ("UnitElim", "BoolElim", "NatElim", "ListElim", "SumElim", "SigmaElim", "J")
ELIM_ARITY = {  # number of branches after scrutinee and motive
    "UnitElim": 1, "BoolElim": 2, "NatElim": 2, "ListElim": 2,
    "SumElim": 2, "SigmaElim": 1, "J": 1,
}


def _meta():
    return field(default=None, compare=False, repr=False)


class Term:
    __slots__ = ()
    span: Optional[SourceSpan]


@dataclass(frozen=True)
class Var(Term):
    index: int
    span: Optional[SourceSpan] = _meta()


@dataclass(frozen=True)
class Universe(Term):
    index: int
    span: Optional[SourceSpan] = _meta()


@dataclass(frozen=True)
class Pi(Term):
    level: frozenset
    dom: Term
    cod: Term  # under one binder
    name: str = field(default="_", compare=False)
    span: Optional[SourceSpan] = _meta()


@dataclass(frozen=True)
class Lam(Term):
    level: frozenset
    body: Term  # under one binder
    name: str = field(default="_", compare=False)
    span: Optional[SourceSpan] = _meta()


@dataclass(frozen=True)
class App(Term):
    fn: Term
    level: frozenset
    arg: Term
    span: Optional[SourceSpan] = _meta()


@dataclass(frozen=True)
class Eq(Term):
    obs: frozenset
    ty: Term
    lhs: Term
    rhs: Term
    span: Optional[SourceSpan] = _meta()


@dataclass(frozen=True)
class Prim(Term):
    """Nullary builtins: base types, nullary constructors and ``refl``."""

    name: str
    span: Optional[SourceSpan] = _meta()


@dataclass(frozen=True)
class Succ(Term):
    pred: Term
    span: Optional[SourceSpan] = _meta()


@dataclass(frozen=True)
class ListT(Term):
    elem: Term
    span: Optional[SourceSpan] = _meta()


@dataclass(frozen=True)
class SumT(Term):
    left: Term
    right: Term
    span: Optional[SourceSpan] = _meta()


@dataclass(frozen=True)
class SigmaT(Term):
    fst: Term
    snd: Term  # under one binder
    name: str = field(default="_", compare=False)
    span: Optional[SourceSpan] = _meta()


@dataclass(frozen=True)
class Cons(Term):
    head: Term
    tail: Term
    span: Optional[SourceSpan] = _meta()


@dataclass(frozen=True)
class Inl(Term):
    value: Term
    span: Optional[SourceSpan] = _meta()


@dataclass(frozen=True)
class Inr(Term):
    value: Term
    span: Optional[SourceSpan] = _meta()


@dataclass(frozen=True)
class Pair(Term):
    fst: Term
    snd: Term
    span: Optional[SourceSpan] = _meta()


@dataclass(frozen=True)
class Elim(Term):
    """``kind^level scrut motive branch...``; J takes an equality proof."""

    kind: str
    level: frozenset
    scrut: Term
    motive: Term
    branches: tuple
    span: Optional[SourceSpan] = _meta()


@dataclass(frozen=True)
class Absurd(Term):
    scrut: Term
    ty: Term
    span: Optional[SourceSpan] = _meta()


@dataclass(frozen=True)
class Gated(Term):
    name: str
    span: Optional[SourceSpan] = _meta()


@dataclass(frozen=True)
class Global(Term):
    name: str
    span: Optional[SourceSpan] = _meta()


LEAVES = (Var, Universe, Prim, Gated, Global)


def map_children(t: Term, f: Callable[[Term, int], Term]) -> Term:
    """Rebuild ``t`` with ``f(child, binders_entered)`` applied to each child."""
    match t:
        case Var() | Universe() | Prim() | Gated() | Global():
            return t
        case Pi(level, dom, cod):
            return replace(t, dom=f(dom, 0), cod=f(cod, 1))
        case Lam(level, body):
            return replace(t, body=f(body, 1))
        case SigmaT(fst, snd):
            return replace(t, fst=f(fst, 0), snd=f(snd, 1))
        case App(fn, level, arg):
            return replace(t, fn=f(fn, 0), arg=f(arg, 0))
        case Eq(obs, ty, lhs, rhs):
            return replace(t, ty=f(ty, 0), lhs=f(lhs, 0), rhs=f(rhs, 0))
        case Succ(pred):
            return replace(t, pred=f(pred, 0))
        case ListT(elem):
            return replace(t, elem=f(elem, 0))
        case SumT(left, right):
            return replace(t, left=f(left, 0), right=f(right, 0))
        case Cons(head, tail):
            return replace(t, head=f(head, 0), tail=f(tail, 0))
        case Inl(value) | Inr(value):
            return replace(t, value=f(value, 0))
        case Pair(fst, snd):
            return replace(t, fst=f(fst, 0), snd=f(snd, 0))
        case Elim(kind, level, scrut, motive, branches):
            return replace(t, scrut=f(scrut, 0), motive=f(motive, 0),
                           branches=tuple(f(b, 0) for b in branches))
        case Absurd(scrut, ty):
            return replace(t, scrut=f(scrut, 0), ty=f(ty, 0))
    raise TypeError(f"not a core term: {t!r}")


def children(t: Term) -> list[tuple[Term, int]]:
    out: list[tuple[Term, int]] = []

    def grab(child, depth):
        out.append((child, depth))
        return child

    map_children(t, grab)
    return out


def shift(t: Term, d: int, cutoff: int = 0) -> Term:
    if d == 0:
        return t

    def go(u, c):
        if isinstance(u, Var):
            return replace(u, index=u.index + d) if u.index >= c else u
        if isinstance(u, LEAVES):
            return u
        return map_children(u, lambda child, k: go(child, c + k))

    return go(t, cutoff)


def subst(t: Term, j: int, s: Term) -> Term:
    """Replace ``Var(j)`` by ``s``; indices above ``j`` are left alone."""

    def go(u, depth):
        if isinstance(u, Var):
            return shift(s, depth) if u.index == j + depth else u
        if isinstance(u, LEAVES):
            return u
        return map_children(u, lambda child, k: go(child, depth + k))

    return go(t, 0)


def instantiate(body: Term, arg: Term) -> Term:
    """Contract a binder: ``body`` lives under one binder, ``arg`` outside it."""
    return shift(subst(body, 0, shift(arg, 1)), -1)


def occurs(t: Term, index: int) -> bool:
    if isinstance(t, Var):
        return t.index == index
    return any(occurs(child, index + k) for child, k in children(t))


def levels_in(t: Term) -> set:
    """Every Level annotation appearing in ``t``."""
    found = set()

    def go(u):
        level = getattr(u, "level", None)
        if isinstance(level, frozenset):
            found.add(level)
        if isinstance(u, Eq):
            found.add(u.obs)
        for child, _ in children(u):
            go(child)

    go(t)
    return found


def arrow(dom: Term, cod: Term, level: frozenset = frozenset()) -> Pi:
    """Non-dependent function type; ``cod`` is given outside the binder."""
    return Pi(level, dom, shift(cod, 1))


def apps(fn: Term, *args: tuple[frozenset, Term]) -> Term:
    for level, arg in args:
        fn = App(fn, level, arg)
    return fn


def spine(t: Term) -> tuple[Term, list[tuple[frozenset, Term]]]:
    args = []
    while isinstance(t, App):
        args.append((t.level, t.arg))
        t = t.fn
    args.reverse()
    return t, args


def numeral(n: int) -> Term:
    t: Term = Prim("zero")
    for _ in range(n):
        t = Succ(t)
    return t


@dataclass(frozen=True)
class Declaration:
    """A resolved declaration.

    ``level`` is None when the declaration level is to be inferred.  For
    ``assert_level`` entries ``level`` is the asserted bound and there is no
    type.
    """

    kind: str  # "def" | "postulate" | "assert_level"
    name: str
    level: Optional[frozenset]
    type: Optional[Term] = None
    body: Optional[Term] = None
    span: Optional[SourceSpan] = field(default=None, compare=False)
