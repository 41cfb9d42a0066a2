"""Bidirectional checking of core terms at an observer level.

Two modes share one set of rules.  In *term* mode (declaration bodies) the
observer is a real level: variables, globals and gated constants above it are
rejected, and application arguments are checked at the join of the observer
with their annotation.  In *type* mode (declaration types, motives, Eq
sides, the type argument of ``absurd``) no level check ever fails and
conversion compares everything.  Type mode still carries a nominal observer,
used only to instantiate the Eq observer inside gated type schemas.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from lattc import usage
from lattc.conversion import DEFAULT_FUEL, TOP, Converter, Fuel, check_refl
from lattc.errors import (
    ConversionError, DestructorLevelError, EqObserverError, GateError,
    LevelJoinError, ScopeError, TypeCheckError, UniverseError, VarLevelError,
)
from lattc.lattice import BASE, LatticeConfig, format_level as fmt
from lattc.syntax import terms as T
from lattc.syntax.terms import (
    Absurd, App, Cons, Elim, Eq, Gated, Global, Inl, Inr, Lam, ListT, Pair, Pi,
    Prim, SigmaT, Succ, SumT, Universe, Var,
)

U0 = Universe(0)


@dataclass(frozen=True)
class ContextEntry:
    name: str
    level: frozenset
    type: T.Term


Context = tuple  # of ContextEntry, innermost last


@dataclass(frozen=True)
class GlobalEntry:
    name: str
    kind: str
    level: frozenset
    type: T.Term
    body: Optional[T.Term]
    report: object = None  # report.AssumptionReport


@dataclass
class GlobalEnv:
    """Checked declarations in order.  ``extend`` returns a new env."""

    entries: dict = field(default_factory=dict)

    def __contains__(self, name):
        return name in self.entries

    def __iter__(self):
        return iter(self.entries.values())

    def __len__(self):
        return len(self.entries)

    def get(self, name) -> GlobalEntry | None:
        return self.entries.get(name)

    def body_of(self, name):
        entry = self.entries.get(name)
        return entry.body if entry is not None else None

    def extend(self, entry: GlobalEntry) -> "GlobalEnv":
        if entry.name in self.entries:
            raise ScopeError(f"duplicate declaration {entry.name!r}")
        entries = dict(self.entries)
        entries[entry.name] = entry
        return GlobalEnv(entries)

    def names(self):
        return list(self.entries)


# -- gated constants ------------------------------------------------------------


def _equiv(a: T.Term, b: T.Term, lo) -> T.Term:
    """Quasi-inverse data between ``a`` and ``b`` (both in the current scope)."""
    v = Var
    s = T.shift
    f_ty = Pi(BASE, a, s(b, 1))
    g_ty = Pi(BASE, s(b, 1), s(a, 2))
    # inside f, g: f = 1, g = 0
    eta = Pi(BASE, s(a, 2), Eq(lo, s(a, 3), App(v(1), BASE, App(v(2), BASE, v(0))), v(0)), "x")
    # inside f, g, eta: f = 2, g = 1
    eps = Pi(BASE, s(b, 3), Eq(lo, s(b, 4), App(v(3), BASE, App(v(2), BASE, v(0))), v(0)), "y")
    return SigmaT(f_ty, SigmaT(g_ty, SigmaT(eta, eps, "eta"), "g"), "f")


def gated_schema(name: str, lo: frozenset) -> T.Term:
    """Closed type of a gated constant used at observer ``lo``."""
    v = Var
    match name:
        case "K":
            return Pi(BASE, U0, Pi(BASE, v(0), Pi(
                BASE, Pi(BASE, Eq(lo, v(1), v(0), v(0)), U0),
                Pi(BASE, Eq(lo, v(2), v(1), v(1)),
                   Pi(BASE, App(v(1), BASE, Prim("refl")), App(v(2), BASE, v(1)), "d"), "p"),
                "P"), "a"), "A")
        case "em":
            return Pi(BASE, U0, SumT(v(0), Pi(BASE, v(0), Prim("Void"))), "A")
        case "funext_ax":
            fam = Pi(BASE, v(1), App(v(1), BASE, v(0)), "x")
            return Pi(BASE, U0, Pi(BASE, Pi(BASE, v(0), U0), Pi(
                BASE, fam, Pi(
                    BASE, Pi(BASE, v(2), App(v(2), BASE, v(0)), "x"), Pi(
                        BASE, Pi(BASE, v(3), Eq(lo, App(v(3), BASE, v(0)),
                                                App(v(2), BASE, v(0)), App(v(1), BASE, v(0))), "x"),
                        Eq(lo, Pi(BASE, v(4), App(v(4), BASE, v(0)), "x"), v(2), v(1)),
                        "h"), "g"), "f"), "B"), "A")
        case "ua_ax":
            return Pi(BASE, U0, Pi(BASE, U0, Pi(
                BASE, _equiv(v(1), v(0), lo), Eq(lo, U0, v(2), v(1)), "e"), "B"), "A")
    raise ScopeError(f"unknown gated construct {name!r}")


def gate_check(cfg: LatticeConfig, construct: str, obs: frozenset, span=None):
    home = cfg.home(construct)
    if home is None:
        raise GateError(f"{construct} has no home level in this lattice", span)
    if not home <= obs:
        raise GateError(f"{construct} needs {fmt(home)} but is used at observer {fmt(obs)}", span)


# -- the checker --------------------------------------------------------------------


def _lookup(ctx: Context, i: int) -> ContextEntry:
    if i >= len(ctx):
        raise ScopeError(f"variable index {i} out of scope")
    return ctx[-1 - i]


class Checker:
    def __init__(self, env: GlobalEnv, cfg: LatticeConfig, fuel: Fuel | int | None = None,
                 span=None):
        self.env = env
        self.cfg = cfg
        if not isinstance(fuel, Fuel):
            fuel = Fuel(DEFAULT_FUEL if fuel is None else fuel)
        self.fuel = fuel
        self.conv = Converter(env, fuel)
        self.span = span

    def _err(self, cls, message, t=None):
        span = getattr(t, "span", None) or self.span
        return cls(message, span)

    def whnf(self, t):
        return self.conv.whnf(t)

    def _convertible(self, obs, a, b, types):
        return self.conv.convert(TOP if types else obs, a, b)

    def show(self, t, ctx=()) -> str:
        from lattc.syntax.printer import print_term
        return print_term(t, [e.name for e in ctx], self.cfg)

    # -- checking ----------------------------------------------------------------

    def check(self, ctx: Context, obs, t: T.Term, expected: T.Term, types=False):
        match t:
            case Lam(level, body, name):
                pi = self.whnf(expected)
                if not isinstance(pi, Pi):
                    raise self._err(ConversionError,
                                    f"function checked against non-function type {self.show(pi, ctx)}", t)
                if level != pi.level:
                    raise self._err(ConversionError,
                                    f"binder {name} is annotated {fmt(level)} but the type expects "
                                    f"{fmt(pi.level)}", t)
                inner = ctx + (ContextEntry(name, level, pi.dom),)
                self.check(inner, obs, body, pi.cod, types)
                return
            case Prim("refl"):
                eq = self.whnf(expected)
                if not isinstance(eq, Eq):
                    raise self._err(ConversionError,
                                    f"refl checked against non-equality {self.show(eq, ctx)}", t)
                self.check_refl(ctx, eq.obs, eq.lhs, eq.rhs, t)
                return
            case Prim("nil"):
                if not isinstance(self.whnf(expected), ListT):
                    raise self._err(ConversionError, "nil checked against a non-list type", t)
                return
            case Pair(fst, snd):
                sig = self.whnf(expected)
                if not isinstance(sig, SigmaT):
                    raise self._err(ConversionError, "pair checked against a non-Sigma type", t)
                self.check(ctx, obs, fst, sig.fst, types)
                self.check(ctx, obs, snd, T.instantiate(sig.snd, fst), types)
                return
            case Inl(value) | Inr(value):
                sum_ = self.whnf(expected)
                if not isinstance(sum_, SumT):
                    raise self._err(ConversionError, "injection checked against a non-Sum type", t)
                side = sum_.left if isinstance(t, Inl) else sum_.right
                self.check(ctx, obs, value, side, types)
                return
            case Cons(head, tail):
                lst = self.whnf(expected)
                if not isinstance(lst, ListT):
                    raise self._err(ConversionError, "cons checked against a non-list type", t)
                self.check(ctx, obs, head, lst.elem, types)
                self.check(ctx, obs, tail, lst, types)
                return
            case Universe(i):
                u = self.whnf(expected)
                if isinstance(u, Universe):
                    if u.index != i + 1:
                        raise self._err(UniverseError, f"Type {i} lives in Type {i + 1}, not Type {u.index}", t)
                    return
        got = self.infer(ctx, obs, t, types)
        if not self._convertible(obs, got, expected, types):
            a, b = self.whnf(got), self.whnf(expected)
            cls = UniverseError if isinstance(a, Universe) and isinstance(b, Universe) else ConversionError
            where = "in a type" if types else f"at observer {fmt(obs)}"
            raise self._err(cls, f"type mismatch {where}: expected {self.show(expected, ctx)}, "
                                 f"got {self.show(got, ctx)}", t)

    def check_refl(self, ctx, lo, a, b, t=None):
        check_refl(self.env, self.cfg, ctx, lo, a, b, self.fuel, getattr(t, "span", None) or self.span)

    # -- inference ---------------------------------------------------------------

    def infer(self, ctx: Context, obs, t: T.Term, types=False) -> T.Term:
        match t:
            case Var(i):
                entry = _lookup(ctx, i)
                if not types and not entry.level <= obs:
                    raise self._err(VarLevelError,
                                    f"{entry.name} is bound at {fmt(entry.level)} and cannot be used "
                                    f"at observer {fmt(obs)}", t)
                return T.shift(entry.type, i + 1)
            case Universe(i):
                return Universe(i + 1)
            case Pi(level, dom, cod, name):
                i = self.wf_type(ctx, dom, obs)
                j = self.wf_type(ctx + (ContextEntry(name, level, dom),), cod, obs)
                return Universe(max(i, j))
            case SigmaT(fst, snd, name):
                i = self.wf_type(ctx, fst, obs)
                j = self.wf_type(ctx + (ContextEntry(name, BASE, fst),), snd, obs)
                return Universe(max(i, j))
            case Eq(lo, ty, lhs, rhs):
                i = self.wf_type(ctx, ty, obs)
                self.check(ctx, lo, lhs, ty, types=True)
                self.check(ctx, lo, rhs, ty, types=True)
                return Universe(i)
            case ListT(elem):
                return Universe(self.wf_type(ctx, elem, obs))
            case SumT(left, right):
                return Universe(max(self.wf_type(ctx, left, obs), self.wf_type(ctx, right, obs)))
            case Prim(name):
                match name:
                    case "Void" | "Unit" | "Bool" | "Nat":
                        return U0
                    case "tt":
                        return Prim("Unit")
                    case "true" | "false":
                        return Prim("Bool")
                    case "zero":
                        return Prim("Nat")
                raise self._err(ConversionError, f"cannot infer the type of {name}; annotate it", t)
            case Succ(pred):
                self.check(ctx, obs, pred, Prim("Nat"), types)
                return Prim("Nat")
            case Cons(head, tail):
                lst = self.whnf(self.infer(ctx, obs, tail, types))
                if not isinstance(lst, ListT):
                    raise self._err(ConversionError, "cons onto something that is not a list", t)
                self.check(ctx, obs, head, lst.elem, types)
                return lst
            case App(fn, level, arg):
                pi = self.whnf(self.infer(ctx, obs, fn, types))
                if not isinstance(pi, Pi):
                    raise self._err(ConversionError,
                                    f"applying a term of non-function type {self.show(pi, ctx)}", t)
                if level != pi.level:
                    raise self._err(ConversionError,
                                    f"argument annotated {fmt(level)} but the function expects "
                                    f"{fmt(pi.level)}", t)
                joined = self.cfg.join(obs, level)
                if joined is None:
                    if not types:
                        raise self._err(LevelJoinError,
                                        f"observer {fmt(obs)} and argument level {fmt(level)} "
                                        f"have no join", t)
                    joined = obs
                self.check(ctx, joined, arg, pi.dom, types)
                return T.instantiate(pi.cod, arg)
            case Gated(name):
                if not types:
                    gate_check(self.cfg, name, obs, t.span or self.span)
                return gated_schema(name, obs)
            case Global(name):
                entry = self.env.get(name)
                if entry is None:
                    raise self._err(ScopeError, f"unknown definition {name!r}", t)
                if not types and not entry.level <= obs:
                    raise self._err(VarLevelError,
                                    f"{name} is defined at {fmt(entry.level)} and cannot be used "
                                    f"at observer {fmt(obs)}", t)
                return entry.type
            case Absurd(scrut, ty):
                self.wf_type(ctx, ty, obs)
                level = obs if types else self.absurd_level(ctx, scrut)
                self.check(ctx, level, scrut, Prim("Void"), types)
                return ty
            case Elim():
                return self.infer_elim(ctx, obs, t, types)
            case Lam():
                raise self._err(ConversionError, "cannot infer the type of a function; annotate it", t)
        raise self._err(ConversionError, f"cannot infer the type of {self.show(t, ctx)}", t)

    def absurd_level(self, ctx, scrut) -> frozenset:
        """Smallest level at which the refuted scrutinee can be checked."""
        occs = usage.scan(self.env, self.cfg, scrut, [(e.name, e.level) for e in ctx])
        found = usage.demands(self.cfg, occs)
        need = frozenset().union(*(d for _, d in found))
        need = self.cfg.closure(need)
        if not self.cfg.is_legal(need):
            parts = ", ".join(f"{usage.describe(o)} {fmt(d)}" for o, d in found)
            raise self._err(LevelJoinError, f"absurd scrutinee needs an illegal level ({parts})", scrut)
        return frozenset(need)

    def wf_type(self, ctx, t, obs=BASE) -> int:
        u = self.whnf(self.infer(ctx, obs, t, types=True))
        if not isinstance(u, Universe):
            raise self._err(UniverseError, f"expected a type, got a term of type {self.show(u, ctx)}", t)
        return u.index

    # -- eliminators ------------------------------------------------------------------

    def motive(self, ctx, obs, motive, doms) -> list[frozenset]:
        """Check ``motive`` as a family over the telescope ``doms``; return
        the levels at which it is applied."""
        body, inner, levels = motive, ctx, []
        if _lam_depth(motive) >= len(doms):
            for dom in doms:
                inner = inner + (ContextEntry(body.name, body.level, dom),)
                levels.append(body.level)
                body = body.body
            self.wf_type(inner, body, obs)
            return levels
        ty = self.infer(ctx, obs, motive, types=True)
        for dom in doms:
            pi = self.whnf(ty)
            if not isinstance(pi, Pi) or not self.conv.convert(TOP, pi.dom, dom):
                raise self._err(ConversionError, "motive has the wrong domain", motive)
            inner = inner + (ContextEntry(pi.name, pi.level, dom),)
            levels.append(pi.level)
            ty = pi.cod
        if not isinstance(self.whnf(ty), Universe):
            raise self._err(UniverseError, "motive must return a type", motive)
        return levels

    def infer_elim(self, ctx, obs, t: Elim, types) -> T.Term:
        ls = t.level
        if not types and not ls <= obs:
            raise self._err(DestructorLevelError,
                            f"{t.kind} destructs a scrutinee at {fmt(ls)} but the observer is {fmt(obs)}", t)
        s_ty = self.whnf(self.infer(ctx, obs if types else ls, t.scrut, types))
        kind, P, sh = t.kind, t.motive, T.shift

        def expect(ok, what):
            if not ok:
                raise self._err(ConversionError,
                                f"{kind} expects a scrutinee of type {what}, got {self.show(s_ty, ctx)}",
                                t.scrut)

        def at(k, *args):
            # motive shifted under k binders, applied to args
            return T.apps(sh(P, k), *zip(levels, args))

        v = Var
        match kind:
            case "UnitElim":
                expect(s_ty == Prim("Unit"), "Unit")
                levels = self.motive(ctx, obs, P, [s_ty])
                branch_tys = [at(0, Prim("tt"))]
            case "BoolElim":
                expect(s_ty == Prim("Bool"), "Bool")
                levels = self.motive(ctx, obs, P, [s_ty])
                branch_tys = [at(0, Prim("true")), at(0, Prim("false"))]
            case "NatElim":
                expect(s_ty == Prim("Nat"), "Nat")
                levels = self.motive(ctx, obs, P, [s_ty])
                branch_tys = [at(0, Prim("zero")),
                              Pi(ls, s_ty, Pi(ls, at(1, v(0)), at(2, Succ(v(1))), "ih"), "n")]
            case "ListElim":
                expect(isinstance(s_ty, ListT), "List _")
                levels = self.motive(ctx, obs, P, [s_ty])
                e = s_ty.elem
                branch_tys = [at(0, Prim("nil")),
                              Pi(ls, e, Pi(ls, ListT(sh(e, 1)), Pi(
                                  ls, at(2, v(0)), at(3, Cons(v(2), v(1))), "ih"), "xs"), "x")]
            case "SumElim":
                expect(isinstance(s_ty, SumT), "Sum _ _")
                levels = self.motive(ctx, obs, P, [s_ty])
                branch_tys = [Pi(ls, s_ty.left, at(1, Inl(v(0))), "a"),
                              Pi(ls, s_ty.right, at(1, Inr(v(0))), "b")]
            case "SigmaElim":
                expect(isinstance(s_ty, SigmaT), "Sigma _ _")
                levels = self.motive(ctx, obs, P, [s_ty])
                branch_tys = [Pi(ls, s_ty.fst, Pi(ls, s_ty.snd, at(2, Pair(v(1), v(0))), "b"), "a")]
            case "J":
                expect(isinstance(s_ty, Eq), "Eq _ _ _")
                lo, A, a, b = s_ty.obs, s_ty.ty, s_ty.lhs, s_ty.rhs
                if not types and not obs <= lo:
                    raise self._err(EqObserverError,
                                    f"J at observer {fmt(obs)} cannot use an equality observed at "
                                    f"{fmt(lo)}", t)
                doms = [A, Eq(lo, sh(A, 1), sh(a, 1), v(0))]
                levels = self.motive(ctx, obs, P, doms)
                branch_tys = [at(0, a, Prim("refl"))]
                result = at(0, b, t.scrut)
            case _:
                raise self._err(ScopeError, f"unknown eliminator {kind}", t)
        if len(t.branches) != len(branch_tys):
            raise self._err(ConversionError, f"{kind} takes {len(branch_tys)} branches", t)
        for branch, ty in zip(t.branches, branch_tys):
            self.check(ctx, obs, branch, ty, types)
        if kind == "J":
            return result
        return at(0, t.scrut)


def _lam_depth(t) -> int:
    n = 0
    while isinstance(t, Lam):
        n, t = n + 1, t.body
    return n


# -- module-level operations -------------------------------------------------------


def check(env, cfg, ctx, obs, t, expected, fuel=None):
    Checker(env, cfg, fuel).check(tuple(ctx), obs, t, expected)


def infer(env, cfg, ctx, obs, t, fuel=None) -> T.Term:
    return Checker(env, cfg, fuel).infer(tuple(ctx), obs, t)


def wf_type(env, cfg, ctx, t, fuel=None, obs=BASE) -> int:
    return Checker(env, cfg, fuel).wf_type(tuple(ctx), t, obs)


def declaration_level(env, cfg, d: T.Declaration) -> frozenset:
    """The explicit level, or the least level demanded by the body."""
    if d.level is not None:
        return d.level
    if d.body is None:
        return BASE
    from lattc.elaborate import required_level
    return required_level(env, cfg, d)


def check_declaration(env: GlobalEnv, cfg: LatticeConfig, d: T.Declaration,
                      fuel: int | None = None) -> GlobalEnv:
    if d.kind not in ("def", "postulate"):
        raise ValueError(f"cannot check a {d.kind} entry")
    if d.name in env:
        raise ScopeError(f"duplicate declaration {d.name!r}", d.span)
    if (d.body is None) != (d.kind == "postulate"):
        raise ScopeError(f"{d.name}: definitions need a body and postulates must not have one", d.span)
    checker = Checker(env, cfg, fuel, span=d.span)
    level = declaration_level(env, cfg, d)
    try:
        checker.wf_type((), d.type, level)
        if d.body is not None:
            checker.check((), level, d.body, d.type)
    except TypeCheckError as exc:
        exc.message = f"{d.name}: {exc.message}"
        exc.args = (exc.message,)
        raise
    from lattc.report import compute_report
    report = compute_report(env, cfg, d, level)
    return env.extend(GlobalEntry(d.name, d.kind, level, d.type, d.body, report))
