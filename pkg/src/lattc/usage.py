"""Syntactic usage scan shared by level inference, ``absurd`` and reports.

Walking a term records every variable access, gated constant, global
reference and eliminator.  Positions the checker treats as types (Pi, Sigma
and Eq components, motives, the type argument of ``absurd``) and the refuted
scrutinee of ``absurd`` are *mentions*: they never constrain the level.  In
term positions each occurrence remembers the extensions already granted by
enclosing application arguments, so that

    demand = closure(requirement - granted)

is exactly what the enclosing declaration level must contain.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from lattc.errors import SourceSpan
from lattc.lattice import LatticeConfig
from lattc.syntax import terms as T


@dataclass(frozen=True)
class Occurrence:
    kind: str  # "var" | "gated" | "global" | "destruct"
    item: str
    requirement: Optional[frozenset]  # None for mentions or unavailable constructs
    granted: Optional[frozenset]  # None in type/dead positions
    span: Optional[SourceSpan] = None

    @property
    def in_term(self) -> bool:
        return self.granted is not None


def scan(env, cfg: LatticeConfig, t: T.Term, binder_levels=(), types: bool = False
         ) -> list[Occurrence]:
    """Occurrences in ``t``.

    ``binder_levels`` gives ``(name, level)`` for the free variables of
    ``t``, innermost last.  With ``types`` the whole term is a type position.
    """
    out: list[Occurrence] = []
    levels = [lvl if isinstance(lvl, tuple) else (None, lvl) for lvl in binder_levels]

    def walk(u: T.Term, granted, scope):
        span = u.span
        match u:
            case T.Var(i):
                if granted is not None and i < len(scope):
                    name, lvl = scope[-1 - i]
                    out.append(Occurrence("var", name or f"#{i}", lvl, granted, span))
            case T.Gated(name):
                out.append(Occurrence("gated", name, cfg.home(name), granted, span))
            case T.Global(name):
                entry = env.get(name) if env is not None else None
                lvl = entry.level if entry is not None else None
                out.append(Occurrence("global", name, lvl, granted, span))
            case T.App(fn, level, arg):
                walk(fn, granted, scope)
                walk(arg, None if granted is None else granted | level, scope)
            case T.Lam(level, body, name):
                walk(body, granted, scope + [(name, level)])
            case T.Pi(level, dom, cod, name):
                walk(dom, None, scope)
                walk(cod, None, scope + [(name, level)])
            case T.SigmaT(fst, snd, name):
                walk(fst, None, scope)
                walk(snd, None, scope + [(name, frozenset())])
            case T.Eq() | T.ListT() | T.SumT():
                for child, _ in T.children(u):
                    walk(child, None, scope)
            case T.Elim(kind, level, scrut, motive, branches):
                if granted is not None:
                    out.append(Occurrence("destruct", kind, level, granted, span))
                walk(scrut, granted, scope)
                walk(motive, None, scope)
                for b in branches:
                    walk(b, granted, scope)
            case T.Absurd(scrut, ty):
                walk(scrut, None, scope)
                walk(ty, None, scope)
            case _:
                for child, _ in T.children(u):
                    walk(child, granted, scope)

    walk(t, None if types else frozenset(), levels)
    return out


def demands(cfg: LatticeConfig, occs) -> list[tuple[Occurrence, frozenset]]:
    """Nonempty level demands, in source order."""
    found = []
    for occ in occs:
        if not occ.in_term or occ.requirement is None:
            continue
        need = cfg.closure(occ.requirement - occ.granted)
        if need:
            found.append((occ, frozenset(need)))
    return found


def describe(occ: Occurrence) -> str:
    label = {"var": "variable", "gated": "construct", "global": "definition",
             "destruct": "eliminator"}[occ.kind]
    return f"{label} {occ.item}"
