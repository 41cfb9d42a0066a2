"""Observer-indexed definitional equality.

Terms are reduced to weak head normal form and compared structurally.  An
application argument (or eliminator scrutinee) annotated strictly above the
observer is invisible to it and is not compared at all; every other argument
is compared at the same observer.  Global definitions are unfolded only when
a structural comparison fails.
"""

from __future__ import annotations

from lattc.errors import ConversionError, FuelExhausted
from lattc.syntax import terms as T
from lattc.syntax.terms import (
    Absurd, App, Cons, Elim, Eq, Gated, Global, Inl, Inr, Lam, ListT, Pair, Pi,
    Prim, SigmaT, Succ, SumT, Universe, Var,
)

DEFAULT_FUEL = 100_000


class _Top:
    """Observer that sees everything; used for conversion inside types."""

    def __repr__(self):
        return "TOP"


TOP = _Top()


class Fuel:
    def __init__(self, steps: int = DEFAULT_FUEL):
        self.remaining = steps

    def tick(self):
        if self.remaining <= 0:
            raise FuelExhausted("reduction fuel exhausted")
        self.remaining -= 1


def _body_of(env, name):
    if env is None:
        return None
    return env.body_of(name)


def _iota(t: Elim, s: T.Term) -> T.Term | None:
    """One eliminator step on a constructor, or None if ``s`` is not one."""
    ls, br = t.level, t.branches
    match t.kind, s:
        case "UnitElim", Prim("tt"):
            return br[0]
        case "BoolElim", Prim("true"):
            return br[0]
        case "BoolElim", Prim("false"):
            return br[1]
        case "NatElim", Prim("zero"):
            return br[0]
        case "NatElim", Succ(n):
            return T.apps(br[1], (ls, n), (ls, Elim(t.kind, ls, n, t.motive, br)))
        case "ListElim", Prim("nil"):
            return br[0]
        case "ListElim", Cons(x, xs):
            return T.apps(br[1], (ls, x), (ls, xs), (ls, Elim(t.kind, ls, xs, t.motive, br)))
        case "SumElim", Inl(a):
            return T.apps(br[0], (ls, a))
        case "SumElim", Inr(b):
            return T.apps(br[1], (ls, b))
        case "SigmaElim", Pair(a, b):
            return T.apps(br[0], (ls, a), (ls, b))
        case "J", Prim("refl"):
            return br[0]
    return None


def whnf(env, t: T.Term, fuel: Fuel | None = None, delta: bool = True) -> T.Term:
    """Weak head normal form.

    With ``delta=False`` a global at the head is left folded, but scrutinees
    are always reduced with unfolding so that eliminators can fire.
    """
    fuel = fuel or Fuel()
    while True:
        match t:
            case App():
                head, args = T.spine(t)
                head = whnf(env, head, fuel, delta)
                if isinstance(head, Lam):
                    fuel.tick()
                    t = T.apps(T.instantiate(head.body, args[0][1]), *args[1:])
                    continue
                if head == Gated("K") and len(args) >= 5:
                    # K A a P p d ~> d when p is refl
                    if whnf(env, args[3][1], fuel) == Prim("refl"):
                        fuel.tick()
                        t = T.apps(args[4][1], *args[5:])
                        continue
                return T.apps(head, *args)
            case Global(name):
                body = _body_of(env, name) if delta else None
                if body is None:
                    return t
                fuel.tick()
                t = body
            case Elim():
                scrut = whnf(env, t.scrut, fuel)
                reduct = _iota(t, scrut)
                if reduct is None:
                    return Elim(t.kind, t.level, scrut, t.motive, t.branches, span=t.span)
                fuel.tick()
                t = reduct
            case _:
                return t


def _unfold_head(env, t: T.Term) -> T.Term | None:
    head, args = T.spine(t)
    if isinstance(head, Global):
        body = _body_of(env, head.name)
        if body is not None:
            return T.apps(body, *args)
    return None


def hidden(obs, level: frozenset) -> bool:
    """True when an annotation at ``level`` is strictly above the observer."""
    return obs is not TOP and obs < level


class Converter:
    def __init__(self, env, fuel: Fuel | None = None):
        self.env = env
        self.fuel = fuel or Fuel()

    def whnf(self, t, delta=True):
        return whnf(self.env, t, self.fuel, delta)

    def convert(self, obs, a: T.Term, b: T.Term) -> bool:
        if a == b:
            return True
        a = self.whnf(a, delta=False)
        b = self.whnf(b, delta=False)
        while True:
            if a == b or self.structural(obs, a, b):
                return True
            ua, ub = _unfold_head(self.env, a), _unfold_head(self.env, b)
            if ua is None and ub is None:
                return False
            self.fuel.tick()
            if ua is not None:
                a = self.whnf(ua, delta=False)
            if ub is not None:
                b = self.whnf(ub, delta=False)

    def guarded(self, obs, level, a, b) -> bool:
        return hidden(obs, level) or self.convert(obs, a, b)

    def structural(self, obs, a: T.Term, b: T.Term) -> bool:
        conv = self.convert
        match a, b:
            case Var(i), Var(j):
                return i == j
            case (Universe() | Prim() | Gated() | Global()), _:
                return a == b
            case Pi(), Pi():
                return a.level == b.level and conv(obs, a.dom, b.dom) and conv(obs, a.cod, b.cod)
            case Lam(), Lam():
                return a.level == b.level and conv(obs, a.body, b.body)
            case SigmaT(), SigmaT():
                return conv(obs, a.fst, b.fst) and conv(obs, a.snd, b.snd)
            case App(), App():
                ha, xs = T.spine(a)
                hb, ys = T.spine(b)
                if len(xs) != len(ys) or not conv(obs, ha, hb):
                    return False
                return all(la == lb and self.guarded(obs, la, x, y)
                           for (la, x), (lb, y) in zip(xs, ys))
            case Eq(), Eq():
                return (a.obs == b.obs and conv(obs, a.ty, b.ty)
                        and conv(obs, a.lhs, b.lhs) and conv(obs, a.rhs, b.rhs))
            case Succ(x), Succ(y):
                return conv(obs, x, y)
            case ListT(x), ListT(y):
                return conv(obs, x, y)
            case (Inl(x), Inl(y)) | (Inr(x), Inr(y)):
                return conv(obs, x, y)
            case (SumT(x1, x2), SumT(y1, y2)) | (Cons(x1, x2), Cons(y1, y2)) \
                    | (Pair(x1, x2), Pair(y1, y2)):
                return conv(obs, x1, y1) and conv(obs, x2, y2)
            case Elim(), Elim():
                return (a.kind == b.kind and a.level == b.level
                        and self.guarded(obs, a.level, a.scrut, b.scrut)
                        and conv(obs, a.motive, b.motive)
                        and all(conv(obs, x, y) for x, y in zip(a.branches, b.branches)))
            case Absurd(), Absurd():
                # the refuted scrutinee sits at no particular level; only the type is visible
                return conv(obs, a.ty, b.ty)
        return False


def convert(env, obs, a: T.Term, b: T.Term, fuel: Fuel | None = None) -> bool:
    return Converter(env, fuel).convert(obs, a, b)


def check_refl(env, cfg, ctx, lo, a: T.Term, b: T.Term, fuel: Fuel | None = None, span=None):
    """``refl : Eq^lo _ a b`` holds iff ``a`` and ``b`` convert at ``lo``.

    On failure the error carries both weak head normal forms.
    """
    conv = Converter(env, fuel)
    if conv.convert(lo, a, b):
        return
    from lattc.lattice import format_level
    from lattc.syntax.printer import print_term
    wa, wb = conv.whnf(a), conv.whnf(b)
    names = [e.name for e in ctx]
    raise ConversionError(
        f"refl: sides are not equal at observer {format_level(lo)}: "
        f"{print_term(wa, names, cfg)} vs {print_term(wb, names, cfg)}", span, wa, wb)
