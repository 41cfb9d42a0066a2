"""Name resolution: surface tree to core terms.

Local names become de Bruijn indices, everything else must be a global that
is already known.  Level expressions are canonicalized against the lattice.
"""

from __future__ import annotations

from typing import Iterable

from lattc.errors import LatticeError, ParseError, ScopeError
from lattc.lattice import LatticeConfig
from lattc.syntax import terms as T
from lattc.syntax.surface import (
    SArg, SDecl, SKeyword, SLam, SLevel, SModule, SName, SNum, SPi, SSigma,
    SSpine, STerm, SUniverse,
)

GATED = ("K", "em", "funext_ax", "ua_ax")

# keyword -> (number of leading arguments, carries a level)
FORMERS = {
    "succ": (1, False), "List": (1, False), "inl": (1, False), "inr": (1, False),
    "cons": (2, False), "Sum": (2, False), "pair": (2, False),
    "Eq": (3, True), "absurd": (2, False),
}
for _kind, _n in T.ELIM_ARITY.items():
    FORMERS[_kind] = (2 + _n, True)


def resolve_level(cfg: LatticeConfig, lvl: SLevel | None) -> frozenset:
    if lvl is None:
        raise ValueError("unannotated level reached resolve; run default_annotations first")
    try:
        if lvl.alias is not None:
            return cfg.alias(lvl.alias)
        return cfg.canonicalize(lvl.names)
    except LatticeError as exc:
        exc.span = exc.span or lvl.span
        raise


class Resolver:
    def __init__(self, cfg: LatticeConfig, globals_: Iterable[str] = ()):
        self.cfg = cfg
        self.globals = set(globals_)

    def level(self, lvl):
        return resolve_level(self.cfg, lvl)

    def term(self, t: STerm, scope: list[str]) -> T.Term:
        """``scope`` lists local names innermost last."""
        span = getattr(t, "span", None)
        match t:
            case SName(name):
                for i, local in enumerate(reversed(scope)):
                    if local == name and name != "_":
                        return T.Var(i, span=span)
                if name in self.globals:
                    return T.Global(name, span=span)
                raise ScopeError(f"unknown identifier {name!r}", span)
            case SNum(value):
                out = T.numeral(value)
                return _with_span(out, span)
            case SUniverse(index):
                return T.Universe(index, span=span)
            case SPi(name, lvl, dom, cod):
                return T.Pi(self.level(lvl), self.term(dom, scope),
                            self.term(cod, scope + [name or "_"]),
                            name=name or "_", span=span)
            case SLam(binders, body):
                inner = scope + [b.name for b in binders]
                out = self.term(body, inner)
                for b in reversed(binders):
                    out = T.Lam(self.level(b.level), out, name=b.name, span=span)
                return out
            case SSigma(name, dom, body):
                return T.SigmaT(self.term(dom, scope), self.term(body, scope + [name]),
                                name=name, span=span)
            case SKeyword(name):
                return self.keyword(name, None, [], scope, span)
            case SSpine(head, head_level, args):
                if isinstance(head, SKeyword):
                    return self.keyword(head.name, head_level, list(args), scope, span)
                if head_level is not None:
                    raise ParseError("only Eq, J and eliminators take a level after the head",
                                     head_level.span)
                out = self.term(head, scope)
                return self.apply(out, args, scope, span)
        raise TypeError(f"not a surface term: {t!r}")

    def apply(self, fn: T.Term, args: Iterable[SArg], scope, span) -> T.Term:
        for a in args:
            fn = T.App(fn, self.level(a.level), self.term(a.term, scope), span=span)
        return fn

    def keyword(self, name, head_level, args: list[SArg], scope, span) -> T.Term:
        if name in T.NULLARY:
            head = T.Prim(name, span=span)
        elif name in GATED:
            head = T.Gated(name, span=span)
        elif name in FORMERS:
            n, leveled = FORMERS[name]
            if len(args) < n:
                raise ParseError(f"{name} expects {n} arguments, got {len(args)}", span)
            lead, args = args[:n], args[n:]
            for a in lead:
                if a.level is not None:
                    raise ParseError(f"arguments of {name} take no level annotation",
                                     a.level.span)
            sub = [self.term(a.term, scope) for a in lead]
            head = self.former(name, self.level(head_level) if leveled else None, sub, span)
            head_level = None if leveled else head_level
        else:
            raise ParseError(f"keyword {name!r} cannot start a term", span)
        if head_level is not None:
            raise ParseError(f"{name} takes no level annotation", head_level.span)
        return self.apply(head, args, scope, span)

    @staticmethod
    def former(name, level, sub, span) -> T.Term:
        match name:
            case "succ":
                return T.Succ(sub[0], span=span)
            case "List":
                return T.ListT(sub[0], span=span)
            case "inl":
                return T.Inl(sub[0], span=span)
            case "inr":
                return T.Inr(sub[0], span=span)
            case "cons":
                return T.Cons(sub[0], sub[1], span=span)
            case "Sum":
                return T.SumT(sub[0], sub[1], span=span)
            case "pair":
                return T.Pair(sub[0], sub[1], span=span)
            case "Eq":
                return T.Eq(level, sub[0], sub[1], sub[2], span=span)
            case "absurd":
                return T.Absurd(sub[0], sub[1], span=span)
        return T.Elim(name, level, sub[0], sub[1], tuple(sub[2:]), span=span)

    def declaration(self, d: SDecl) -> T.Declaration:
        if d.kind == "assert_level":
            if d.name not in self.globals:
                raise ScopeError(f"assertion about unknown definition {d.name!r}", d.span)
            return T.Declaration("assert_level", d.name, self.level(d.level), span=d.span)
        if d.name in self.globals:
            raise ScopeError(f"duplicate declaration {d.name!r}", d.span)
        level = None if d.infer_level else self.level(d.level)
        ty = self.term(d.type, [])
        body = self.term(d.body, []) if d.body is not None else None
        self.globals.add(d.name)
        return T.Declaration(d.kind, d.name, level, ty, body, d.span)


def _with_span(t: T.Term, span):
    from dataclasses import replace
    return replace(t, span=span)


def resolve(module: SModule, cfg: LatticeConfig, env_names: Iterable[str] = ()) -> list[T.Declaration]:
    """Resolve a module whose annotations have already been defaulted."""
    r = Resolver(cfg, env_names)
    return [r.declaration(d) for d in module.decls]


def resolve_term(t: STerm, cfg: LatticeConfig, scope=(), env_names: Iterable[str] = ()) -> T.Term:
    return Resolver(cfg, env_names).term(t, list(scope))
